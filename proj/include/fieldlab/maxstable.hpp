#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fieldlab/core.hpp"

namespace fieldlab {

// The stopping rule already carries a 0.9999-quantile safety factor, so the
// relative tolerance can stay coarse; expected Poisson points per draw grow
// like q_hat / epsilon.
struct DeHaanConfig {
  double epsilon = 0.1;      // relative truncation tolerance
  int max_terms = 100000;    // hard cap on Poisson points
  int min_terms = 10;        // points generated before the rule activates
  int quantile_probes = 10000;
  double quantile_level = 0.9999;
};

struct MaxStableDraw {
  Eigen::VectorXd x;   // field values per window point
  int terms = 0;
  bool truncated = false;
  double stop_margin = 0.0;  // factor*q_hat / (eps*min X) at the stop
};

// X(t) = max_i Gamma_i^{-1/alpha} |Z_i(t)| over cumulative unit-exponential
// sums, truncated once the next factor cannot move any point by more than
// epsilon relative. q_hat is a pre-estimated high quantile of sup |Z|.
class DeHaanSimulator {
 public:
  DeHaanSimulator(std::shared_ptr<const FieldSampler> spectral,
                  const HomogeneousNorm& norm, double alpha, DeHaanConfig cfg,
                  std::uint64_t seed, std::uint32_t quantile_ctx);

  MaxStableDraw sample(RngStream& rng) const;

  double q_hat() const { return q_hat_; }
  const Window& window() const { return spectral_->window(); }
  double alpha() const { return alpha_; }

 private:
  std::shared_ptr<const FieldSampler> spectral_;
  HomogeneousNorm norm_;
  double alpha_;
  DeHaanConfig cfg_;
  double q_hat_;
};

// MC estimate of E max_i |Z(t_i)|^alpha / x_i^alpha.
MCEstimate fdd_neglog(const FieldSampler& spectral,
                      const std::vector<Point>& points,
                      const std::vector<double>& x,
                      const HomogeneousNorm& norm, double alpha,
                      const McParams& mc, std::uint32_t ctx);

using SamplerFactory =
    std::function<std::shared_ptr<const FieldSampler>(std::shared_ptr<const Window>)>;

struct SupProbeRow {
  double n = 0;
  bool emp_defined = false;
  double neglog_emp = 0.0;  // -log empirical P(sup X <= r n^{l/alpha})
  double emp_p = 0.0;
  MCEstimate spec_side;     // n^{-l} E sup |Z|^alpha / r^alpha
};

// Per block size n: the supremum law of X on [0,n)^l against the spectral
// expectation that determines it; both columns approach the same limit.
std::vector<SupProbeRow> sup_distribution_probe(
    const SamplerFactory& make_spectral, const Lattice& L, double alpha,
    const HomogeneousNorm& norm, const std::vector<double>& n_list, double r,
    const DeHaanConfig& cfg, const McParams& mc, std::uint32_t ctx);

}  // namespace fieldlab
