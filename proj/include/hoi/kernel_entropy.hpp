#pragma once

// Matrix-based Renyi alpha-order entropy on normalized Gaussian Gram matrices.
//
// A channel of n samples maps to the n x n matrix A_ij = K_ij / (n sqrt(K_ii K_jj))
// with a Gaussian kernel K. A is symmetric PSD with trace 1, so its eigenvalues
// form a probability-like spectrum and
//
//     S_alpha(A) = log2(sum_i lambda_i^alpha) / (1 - alpha)
//
// is an entropy in bits bounded by log2 n. Joint entropies use the trace-normalized
// Hadamard product of the marginal Grams.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "hoi/errors.hpp"

namespace hoi {

struct KernelParams {
  double sigma = 5.0;
  double alpha = 1.01;

  /// Throws ConfigError unless sigma > 0, alpha > 0 and |alpha - 1| > 1e-6.
  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw ConfigError("sigma must be positive and finite");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha) || std::abs(alpha - 1.0) <= 1e-6) {
      throw ConfigError("alpha must be positive and different from 1");
    }
  }
};

/// Trace-one symmetric PSD Gram matrix whose diagonal is exactly 1/n.
class NormalizedGram {
 public:
  NormalizedGram() = default;

  /// Wraps an externally built matrix after checking shape, symmetry,
  /// diagonal and trace. Positive semidefiniteness is the caller's promise.
  static NormalizedGram from_matrix(Eigen::MatrixXd m) {
    if (m.rows() != m.cols() || m.rows() < 2) {
      throw ShapeError("normalized Gram must be square with n >= 2");
    }
    const auto n = m.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(m(i, i) - inv_n) > 1e-12) throw ShapeError("diagonal entries must equal 1/n");
      for (Eigen::Index j = 0; j < i; ++j) {
        if (std::abs(m(i, j) - m(j, i)) > 1e-12) throw ShapeError("Gram matrix is not symmetric");
      }
    }
    NormalizedGram g;
    g.m_ = std::move(m);
    return g;
  }

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  friend NormalizedGram gram(std::span<const double>, double);
  friend void hadamard_join_into(std::span<const NormalizedGram* const>, NormalizedGram&);

  Eigen::MatrixXd m_;
};

/// Running total of symmetric eigendecompositions performed by entropy().
inline std::atomic<std::uint64_t>& eigendecomposition_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

inline std::uint64_t eigendecomposition_count() {
  return eigendecomposition_counter().load(std::memory_order_relaxed);
}

/// Gaussian-kernel Gram of scalar samples, normalized to trace one.
inline NormalizedGram gram(std::span<const double> samples, double sigma) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 2) throw TooFewSamples("a Gram matrix needs at least 2 samples");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");

  // K_ii = exp(0) = 1, so the normalization reduces to K / n.
  const double inv_n = 1.0 / static_cast<double>(n);
  NormalizedGram g;
  g.m_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    g.m_(j, j) = inv_n;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double z = (samples[i] - samples[j]) / sigma;
      const double v = std::exp(-0.5 * z * z) * inv_n;
      g.m_(i, j) = v;
      g.m_(j, i) = v;
    }
  }
  return g;
}

inline NormalizedGram gram(std::span<const double> samples, const KernelParams& params) {
  return gram(samples, params.sigma);
}

/// Writes the trace-normalized Hadamard product of `parts` into `out`,
/// reusing its storage. The diagonal is pinned to exactly 1/n; trace
/// normalization alone leaves it within a few ulps of that.
inline void hadamard_join_into(std::span<const NormalizedGram* const> parts, NormalizedGram& out) {
  if (parts.size() < 2 || parts.size() > 3) {
    throw ShapeError("joint Gram takes 2 or 3 matrices, got " + std::to_string(parts.size()));
  }
  const auto n = parts[0]->m_.rows();
  for (const auto* p : parts) {
    if (p->m_.rows() != n) throw ShapeError("joint Gram inputs differ in sample count");
  }
  out.m_.resize(n, n);
  if (parts.size() == 2) {
    out.m_.array() = parts[0]->m_.array() * parts[1]->m_.array();
  } else {
    // Factors are multiplied in ascending order so the product does not
    // depend on the order of `parts`.
    const auto& a = parts[0]->m_;
    const auto& b = parts[1]->m_;
    const auto& c = parts[2]->m_;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j; i < n; ++i) {
        double x = a(i, j), y = b(i, j), z = c(i, j);
        if (x > y) std::swap(x, y);
        if (y > z) std::swap(y, z);
        if (x > y) std::swap(x, y);
        const double v = x * y * z;
        out.m_(i, j) = v;
        out.m_(j, i) = v;
      }
    }
  }
  const double trace = out.m_.trace();
  if (!(trace > 0.0)) throw NumericalError("joint Gram has non-positive trace");
  out.m_ /= trace;
  out.m_.diagonal().setConstant(1.0 / static_cast<double>(n));
}

inline NormalizedGram joint_gram(std::span<const NormalizedGram* const> parts) {
  NormalizedGram out;
  hadamard_join_into(parts, out);
  return out;
}

inline NormalizedGram joint_gram(const NormalizedGram& a, const NormalizedGram& b) {
  const NormalizedGram* parts[] = {&a, &b};
  return joint_gram(parts);
}

inline NormalizedGram joint_gram(const NormalizedGram& a, const NormalizedGram& b,
                                 const NormalizedGram& c) {
  const NormalizedGram* parts[] = {&a, &b, &c};
  return joint_gram(parts);
}

/// Reusable eigensolver workspace; one per thread.
class EntropyEvaluator {
 public:
  /// S_alpha(A) in bits. Eigenvalues are clamped to [0, 1] before powering
  /// and the result is clamped to [0, log2 n].
  double operator()(const NormalizedGram& a, double alpha) {
    const auto& m = a.matrix();
    solver_.compute(m, Eigen::EigenvaluesOnly);
    eigendecomposition_counter().fetch_add(1, std::memory_order_relaxed);
    if (solver_.info() != Eigen::Success) {
      throw NumericalError("symmetric eigensolver did not converge");
    }
    const auto& lambda = solver_.eigenvalues();
    // Eigenvalues below the solver's accuracy floor are rounding noise; for
    // alpha < 1 their powers would otherwise add up to a visible bias.
    const double floor = static_cast<double>(lambda.size()) *
                         std::numeric_limits<double>::epsilon() * lambda.cwiseAbs().maxCoeff();
    double power_sum = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (lambda[i] <= floor) continue;
      const double l = std::min(lambda[i], 1.0);
      power_sum += std::pow(l, alpha);
    }
    if (!(power_sum > 0.0)) throw NumericalError("Gram spectrum vanished");
    const double h = std::log2(power_sum) / (1.0 - alpha);
    return std::clamp(h, 0.0, std::log2(static_cast<double>(m.rows())));
  }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

inline double entropy(const NormalizedGram& a, double alpha) {
  EntropyEvaluator eval;
  return eval(a, alpha);
}

inline double joint_entropy(std::span<const NormalizedGram* const> parts, double alpha) {
  return entropy(joint_gram(parts), alpha);
}

inline double joint_entropy(const NormalizedGram& a, const NormalizedGram& b, double alpha) {
  return entropy(joint_gram(a, b), alpha);
}

inline double joint_entropy(const NormalizedGram& a, const NormalizedGram& b,
                            const NormalizedGram& c, double alpha) {
  return entropy(joint_gram(a, b, c), alpha);
}

/// Order-2 entropy from the Frobenius norm, tr(A^2) = sum A_ij^2. No eigensolve.
inline double collision_entropy(const NormalizedGram& a) {
  return -std::log2(a.matrix().squaredNorm());
}

}  // namespace hoi
