#pragma once

// Pairwise mutual information and three-way O-information views of a recording.
//
// Every entropy a triplet needs except the triple joint is shared with other
// triplets, so singles H(X_i) and pairs H(X_i, X_j) are computed once into an
// EntropyCache. Each triplet then costs one eigendecomposition:
//
//     TC  = H_i + H_j + H_k - H_ijk
//     DTC = H_ij + H_ik + H_jk - 2 H_ijk
//     O   = TC - DTC
//
// O > 0 means the triplet is redundancy-dominated, O < 0 synergy-dominated.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hoi/errors.hpp"
#include "hoi/kernel_entropy.hpp"
#include "hoi/parallel.hpp"
#include "hoi/recording.hpp"

namespace hoi {

constexpr std::uint64_t pair_count(std::uint64_t c) { return c * (c - 1) / 2; }
constexpr std::uint64_t triplet_count(std::uint64_t c) { return c * (c - 1) * (c - 2) / 6; }

struct EntropyCache {
  KernelParams params;
  std::vector<NormalizedGram> channel_grams;
  std::vector<double> singles;
  // Symmetric C x C matrix of H(X_i, X_j); the diagonal is unused and zero.
  Eigen::MatrixXd pairs;

  std::size_t channels() const { return singles.size(); }
};

namespace detail {

inline std::vector<std::pair<std::size_t, std::size_t>> ordered_pairs(std::size_t c) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(static_cast<std::size_t>(pair_count(c)));
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = i + 1; j < c; ++j) out.emplace_back(i, j);
  return out;
}

inline void check_channel(const EntropyCache& cache, std::size_t i) {
  if (i >= cache.channels()) {
    throw IndexError("channel " + std::to_string(i) + " out of range (C=" +
                     std::to_string(cache.channels()) + ")");
  }
}

inline std::array<std::size_t, 3> sorted_distinct(const EntropyCache& cache, std::size_t i,
                                                  std::size_t j, std::size_t k) {
  check_channel(cache, i);
  check_channel(cache, j);
  check_channel(cache, k);
  if (i == j || i == k || j == k) throw IndexError("triplet indices must be distinct");
  std::array<std::size_t, 3> idx{i, j, k};
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

/// Builds every channel Gram and the C singles plus C(C-1)/2 pair entropies.
/// Expects a standardized recording. threads == 0 selects default_thread_count().
inline EntropyCache build_cache(const Recording& rec, const KernelParams& params,
                                unsigned threads = 0) {
  params.validate();
  const std::size_t c = rec.channels();
  if (c < 2) throw TooFewChannels("at least 2 channels are required");
  if (threads == 0) threads = default_thread_count();

  EntropyCache cache;
  cache.params = params;
  cache.channel_grams.resize(c);
  cache.singles.assign(c, 0.0);
  cache.pairs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c));

  std::vector<EntropyEvaluator> evaluators(threads);
  parallel_for(c, threads, [&](unsigned w, std::size_t i) {
    const auto x = rec.channel(i);
    cache.channel_grams[i] = gram(std::span<const double>(x.data(), x.size()), params);
    cache.singles[i] = evaluators[w](cache.channel_grams[i], params.alpha);
  });

  const auto pairs = detail::ordered_pairs(c);
  std::vector<NormalizedGram> scratch(threads);
  parallel_for(pairs.size(), threads, [&](unsigned w, std::size_t p) {
    const auto [i, j] = pairs[p];
    const NormalizedGram* parts[] = {&cache.channel_grams[i], &cache.channel_grams[j]};
    hadamard_join_into(parts, scratch[w]);
    const double h = evaluators[w](scratch[w], params.alpha);
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    cache.pairs(ii, jj) = h;
    cache.pairs(jj, ii) = h;
  });
  return cache;
}

/// I(X_i; X_j) = H_i + H_j - H_ij in bits.
inline double mutual_information(const EntropyCache& cache, std::size_t i, std::size_t j) {
  detail::check_channel(cache, i);
  detail::check_channel(cache, j);
  if (i == j) throw IndexError("mutual information needs two distinct channels; use singles");
  const std::size_t a = std::min(i, j);
  const std::size_t b = std::max(i, j);
  return cache.singles[a] + cache.singles[b] -
         cache.pairs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
}

/// C x C connectivity matrix (mutual information or Pearson correlation).
struct PairwiseView {
  Eigen::MatrixXd values;
  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

/// Mutual information matrix. The diagonal holds H(X_i).
inline PairwiseView pairwise_view(const EntropyCache& cache) {
  const auto c = static_cast<Eigen::Index>(cache.channels());
  PairwiseView view{Eigen::MatrixXd(c, c)};
  for (Eigen::Index i = 0; i < c; ++i) {
    view.values(i, i) = cache.singles[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < c; ++j) {
      const double mi =
          mutual_information(cache, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      view.values(i, j) = mi;
      view.values(j, i) = mi;
    }
  }
  return view;
}

/// Pearson correlation matrix with unit diagonal.
inline PairwiseView pearson_view(const Recording& rec) {
  const auto c = static_cast<Eigen::Index>(rec.channels());
  const double n = static_cast<double>(rec.timepoints());
  RowMatrix centered = rec.data;
  Eigen::VectorXd norms(c);
  for (Eigen::Index i = 0; i < c; ++i) {
    centered.row(i).array() -= centered.row(i).sum() / n;
    norms[i] = centered.row(i).norm();
    if (!(norms[i] > 0.0)) throw DegenerateChannel(static_cast<std::size_t>(i));
  }
  PairwiseView view{Eigen::MatrixXd(c, c)};
  for (Eigen::Index i = 0; i < c; ++i) {
    view.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < c; ++j) {
      const double r =
          std::clamp(centered.row(i).dot(centered.row(j)) / (norms[i] * norms[j]), -1.0, 1.0);
      view.values(i, j) = r;
      view.values(j, i) = r;
    }
  }
  return view;
}

struct TcDtcBreakdown {
  double tc = 0.0;
  double dtc = 0.0;
  double o = 0.0;
  double triple_joint = 0.0;
};

namespace detail {

// Sums in ascending order, so the result is independent of channel labels.
inline double sorted_sum(std::array<double, 3> v) {
  std::sort(v.begin(), v.end());
  return (v[0] + v[1]) + v[2];
}

// idx must be sorted and distinct. Entropy terms are summed by value, which
// makes the result bit-identical under any relabeling of channels.
inline TcDtcBreakdown breakdown_from(const EntropyCache& cache, const std::array<std::size_t, 3>& idx,
                                     double h_ijk) {
  const auto i = static_cast<Eigen::Index>(idx[0]);
  const auto j = static_cast<Eigen::Index>(idx[1]);
  const auto k = static_cast<Eigen::Index>(idx[2]);
  TcDtcBreakdown out;
  out.triple_joint = h_ijk;
  out.tc = sorted_sum({cache.singles[idx[0]], cache.singles[idx[1]], cache.singles[idx[2]]}) - h_ijk;
  out.dtc = sorted_sum({cache.pairs(i, j), cache.pairs(i, k), cache.pairs(j, k)}) - 2.0 * h_ijk;
  out.o = out.tc - out.dtc;
  return out;
}

inline double triple_entropy(const EntropyCache& cache, const std::array<std::size_t, 3>& idx,
                             EntropyEvaluator& eval, NormalizedGram& scratch) {
  const NormalizedGram* parts[] = {&cache.channel_grams[idx[0]], &cache.channel_grams[idx[1]],
                                   &cache.channel_grams[idx[2]]};
  hadamard_join_into(parts, scratch);
  return eval(scratch, cache.params.alpha);
}

}  // namespace detail

/// TC, DTC and O-information of one triplet; one new eigendecomposition.
/// Uses the cache's alpha. Throws IndexError on repeated or out-of-range indices.
inline TcDtcBreakdown triplet_o_information(const EntropyCache& cache, std::size_t i,
                                            std::size_t j, std::size_t k) {
  const auto idx = detail::sorted_distinct(cache, i, j, k);
  EntropyEvaluator eval;
  NormalizedGram scratch;
  return detail::breakdown_from(cache, idx, detail::triple_entropy(cache, idx, eval, scratch));
}

/// Dense C x C x C tensor, row-major with i outermost and k innermost.
class OInfoTensor {
 public:
  OInfoTensor() = default;
  explicit OInfoTensor(std::size_t c) : size_(c), values_(c * c * c, 0.0) {}
  OInfoTensor(std::size_t c, std::vector<double> values) : size_(c), values_(std::move(values)) {
    if (values_.size() != c * c * c) throw ShapeError("tensor payload does not match C^3");
  }

  std::size_t size() const { return size_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * size_ + j) * size_ + k];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return values_[(i * size_ + j) * size_ + k];
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t size_ = 0;
  std::vector<double> values_;
};

/// Called after each block of triplets with (completed, total). May be
/// invoked concurrently from worker threads.
using ProgressCallback = std::function<void(std::uint64_t completed, std::uint64_t total)>;

/// O-information for all C(C-1)(C-2)/6 unordered triplets, mirrored to the
/// six orderings; cells with a repeated index stay 0. Work is split into
/// (i, j) blocks over k > j; each cell is written by exactly one block, so the
/// output is bit-identical for any thread count.
inline OInfoTensor oinfo_tensor(const EntropyCache& cache, unsigned threads = 0,
                                const ProgressCallback& progress = {}) {
  const std::size_t c = cache.channels();
  if (c < 3) throw TooFewChannels("O-information needs at least 3 channels");
  if (threads == 0) threads = default_thread_count();

  OInfoTensor tensor(c);
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = i + 1; j + 1 < c; ++j) blocks.emplace_back(i, j);

  const std::uint64_t total = triplet_count(c);
  std::atomic<std::uint64_t> done{0};
  std::vector<EntropyEvaluator> evaluators(threads);
  std::vector<NormalizedGram> scratch(threads);

  parallel_for(blocks.size(), threads, [&](unsigned w, std::size_t b) {
    const auto [i, j] = blocks[b];
    for (std::size_t k = j + 1; k < c; ++k) {
      const std::array<std::size_t, 3> idx{i, j, k};
      const double h = detail::triple_entropy(cache, idx, evaluators[w], scratch[w]);
      const double o = detail::breakdown_from(cache, idx, h).o;
      tensor(i, j, k) = o;
      tensor(i, k, j) = o;
      tensor(j, i, k) = o;
      tensor(j, k, i) = o;
      tensor(k, i, j) = o;
      tensor(k, j, i) = o;
    }
    const std::uint64_t n = done.fetch_add(c - j - 1) + (c - j - 1);
    if (progress) progress(n, total);
  });
  return tensor;
}

}  // namespace hoi
