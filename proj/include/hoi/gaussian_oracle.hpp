#pragma once

// Closed-form Shannon quantities for multivariate Gaussians, and a seeded
// sampler. Reference material for validating the matrix-based estimator.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hoi/errors.hpp"
#include "hoi/recording.hpp"

namespace hoi::oracle {

struct GaussianSystem {
  Eigen::MatrixXd covariance;

  std::size_t dim() const { return static_cast<std::size_t>(covariance.rows()); }

  /// Throws SingularCovariance unless the matrix is square, symmetric within
  /// 1e-12 and positive definite.
  void validate() const {
    if (covariance.rows() != covariance.cols() || covariance.rows() < 1) {
      throw ShapeError("covariance must be square");
    }
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw SingularCovariance("covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) throw SingularCovariance("covariance is not positive definite");
  }
};

namespace detail {

// 0.5 log2 det(Sigma_s) via Cholesky.
inline double half_log2_det(const GaussianSystem& sys, const std::vector<std::size_t>& subset) {
  if (subset.empty()) throw IndexError("entropy subset must be nonempty");
  const auto k = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      const std::size_t ia = subset[static_cast<std::size_t>(a)];
      const std::size_t ib = subset[static_cast<std::size_t>(b)];
      if (ia >= sys.dim() || ib >= sys.dim()) throw IndexError("subset index out of range");
      sub(a, b) = sys.covariance(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ib));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  if (llt.info() != Eigen::Success) throw SingularCovariance("subset covariance is singular");
  double sum = 0.0;
  for (Eigen::Index a = 0; a < k; ++a) sum += std::log2(llt.matrixL()(a, a));
  return sum;
}

}  // namespace detail

/// Differential entropy in bits of the marginal on `subset`:
/// 0.5 log2((2 pi e)^|s| det(Sigma_s)).
inline double gaussian_entropy(const GaussianSystem& sys, const std::vector<std::size_t>& subset) {
  const double half_log_det = detail::half_log2_det(sys, subset);
  const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
  return 0.5 * static_cast<double>(subset.size()) * std::log2(two_pi_e) + half_log_det;
}

/// Shannon O-information of a 3-D Gaussian via the co-information form
/// sum H_i - sum H_ij + H_123. The (2 pi e) terms cancel (1+1+1-2-2-2+3 = 0),
/// so only the log-determinants are combined.
inline double gaussian_oinfo(const GaussianSystem& sys) {
  if (sys.dim() != 3) throw ShapeError("gaussian_oinfo needs a 3-dimensional system");
  const auto d = [&](std::vector<std::size_t> s) { return detail::half_log2_det(sys, s); };
  return d({0}) + d({1}) + d({2}) - d({0, 1}) - d({0, 2}) - d({1, 2}) + d({0, 1, 2});
}

/// Standard normal stream: mt19937_64 words mapped to 53-bit uniforms, then
/// Box-Muller, both outputs used in order. Fixed algorithm, no
/// implementation-defined distributions.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform_open() {
    // (0, 1): shift away from zero so log() stays finite.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// T i.i.d. draws x = L z with Sigma = L L^T. Draws are generated timepoint by
/// timepoint, dimension innermost.
inline Recording sample_gaussian(const GaussianSystem& sys, std::size_t timepoints,
                                 std::uint64_t seed) {
  if (timepoints < 2) throw TooFewSamples("need at least 2 timepoints");
  sys.validate();
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(sys.covariance).matrixL();
  const auto d = static_cast<Eigen::Index>(sys.dim());
  NormalStream normal(seed);
  Recording rec;
  rec.subject_id = "gaussian-" + std::to_string(seed);
  rec.data.resize(d, static_cast<Eigen::Index>(timepoints));
  Eigen::VectorXd z(d);
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(timepoints); ++t) {
    for (Eigen::Index a = 0; a < d; ++a) z[a] = normal();
    rec.data.col(t) = l * z;
  }
  return rec;
}

}  // namespace hoi::oracle
