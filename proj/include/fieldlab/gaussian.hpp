#pragma once

#include <Eigen/Dense>
#include <memory>

#include "fieldlab/core.hpp"

namespace fieldlab {

// gamma(h) = sigma * |h|_2^kappa, kappa in (0, 2]
struct VariogramSpec {
  double sigma = 1.0;
  double kappa = 1.0;

  double operator()(const Eigen::VectorXd& h) const;
  void validate() const;
};

enum class SignMode { plus_one, rademacher };

struct SpectralModel {
  VariogramSpec variogram;
  int d = 1;
  double alpha = 1.0;
  SignMode sign_mode = SignMode::plus_one;
  double jitter = 1e-10;
};

// C[s,t] = (gamma(s) + gamma(t) - gamma(t-s)) / 2 for a field with
// stationary increments pinned to 0 at the origin.
Eigen::MatrixXd covariance_matrix(const VariogramSpec& v,
                                  const Eigen::MatrixXd& points);

// Zero-mean sampler for a fixed covariance; the factor is computed once and
// shared read-only.
class GaussianSampler {
 public:
  GaussianSampler(const Eigen::MatrixXd& cov, double jitter);

  Eigen::VectorXd sample(RngStream& rng) const;
  void sample_into(RngStream& rng, Eigen::VectorXd& out) const;
  int dim() const { return static_cast<int>(chol_.rows()); }
  const Eigen::MatrixXd& chol() const { return chol_; }
  double max_roundtrip_error() const { return roundtrip_err_; }

 private:
  Eigen::MatrixXd chol_;
  double roundtrip_err_ = 0.0;
};

// Z_i(t) = xi_i exp(Y_i(t) - alpha Var(Y_i(t)) / 2) with the components
// independent copies of the variogram's Gaussian field and Y_i(0) = 0.
// The origin is pinned so that W_i(0) is exactly zero.
class BrSpectralSampler : public FieldSampler {
 public:
  BrSpectralSampler(const SpectralModel& model, std::shared_ptr<const Window> w);

  WeightedField sample(RngStream& rng) const override;
  void sample_norms(RngStream& rng, const HomogeneousNorm& norm,
                    Eigen::VectorXd& out) const override;
  const SpectralModel& model() const { return model_; }

 private:
  SpectralModel model_;
  GaussianSampler gauss_;
  Eigen::VectorXd variance_;  // exact gamma(t) per window point
};

// Mean shift induced by reweighting with exp(Y - Var(Y)/2): the law of X
// becomes that of X + Cov(X(t), Y).
Eigen::VectorXd tilt_mean_shift(const Eigen::VectorXd& cov_xy, double var_y);

}  // namespace fieldlab
