#include "fieldlab/gaussian.hpp"

#include <cmath>
#include <string>

namespace fieldlab {

double VariogramSpec::operator()(const Eigen::VectorXd& h) const {
  return sigma * std::pow(h.norm(), kappa);
}

void VariogramSpec::validate() const {
  if (!(sigma > 0)) throw UsageError("variogram: sigma must be positive");
  if (!(kappa > 0) || kappa > 2.0)
    throw UsageError("variogram: kappa must lie in (0, 2]");
}

Eigen::MatrixXd covariance_matrix(const VariogramSpec& v,
                                  const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  if (n == 0) throw UsageError("covariance_matrix: no points");
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = v(points.row(i).transpose());
  Eigen::MatrixXd C(n, n);
  for (int i = 0; i < n; ++i) {
    C(i, i) = g[i];
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd diff = (points.row(j) - points.row(i)).transpose();
      const double c = 0.5 * (g[i] + g[j] - v(diff));
      C(i, j) = c;
      C(j, i) = c;
    }
  }
  return C;
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& cov, double jitter) {
  if (cov.rows() != cov.cols())
    throw UsageError("GaussianSampler: covariance must be square");
  Eigen::MatrixXd C = cov;
  C.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() == Eigen::Success) {
    chol_ = llt.matrixL();
  } else {
    // semidefinite case (zero rows survive a zero jitter): pivoted LDLT
    // with the negative eigen-dust clamped off
    Eigen::LDLT<Eigen::MatrixXd> ldlt(C);
    if (ldlt.info() != Eigen::Success)
      throw NumericalError(
          "GaussianSampler: factorization failed (dim=" +
          std::to_string(cov.rows()) + ", jitter=" + std::to_string(jitter) +
          ", min diag=" + std::to_string(cov.diagonal().minCoeff()) + ")");
    Eigen::MatrixXd L = ldlt.matrixL();
    Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
    chol_ = ldlt.transpositionsP().transpose() *
            Eigen::MatrixXd(L * d.asDiagonal());
  }
  roundtrip_err_ = (chol_ * chol_.transpose() - C).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, C.diagonal().maxCoeff());
  if (roundtrip_err_ > 1e-8 * scale)
    throw NumericalError(
        "GaussianSampler: factor round-trip error " +
        std::to_string(roundtrip_err_) + " exceeds tolerance (dim=" +
        std::to_string(cov.rows()) + ", jitter=" + std::to_string(jitter) + ")");
}

Eigen::VectorXd GaussianSampler::sample(RngStream& rng) const {
  Eigen::VectorXd out(dim());
  sample_into(rng, out);
  return out;
}

void GaussianSampler::sample_into(RngStream& rng, Eigen::VectorXd& out) const {
  const int n = dim();
  Eigen::VectorXd xi(n);
  for (int i = 0; i < n; ++i) xi[i] = rng.normal();
  out.noalias() = chol_.triangularView<Eigen::Lower>() * xi;
}

BrSpectralSampler::BrSpectralSampler(const SpectralModel& model,
                                     std::shared_ptr<const Window> w)
    : FieldSampler(std::move(w), model.alpha),
      model_(model),
      gauss_(covariance_matrix(model.variogram, window_->embedded()),
             model.jitter),
      variance_(window_->size()) {
  model_.variogram.validate();
  if (model_.d < 1) throw UsageError("spectral model: d must be >= 1");
  if (!(model_.alpha > 0)) throw UsageError("spectral model: alpha must be positive");
  if (!window_->has_origin())
    throw UsageError("spectral sampler: window must include the origin");
  for (int i = 0; i < window_->size(); ++i)
    variance_[i] = model_.variogram(window_->embedded().row(i).transpose());
}

WeightedField BrSpectralSampler::sample(RngStream& rng) const {
  const int n = window_->size();
  const int origin = window_->origin_index();
  FieldSample f = make_field(window_, model_.d, model_.alpha);
  Eigen::VectorXd y(n);
  for (int c = 0; c < model_.d; ++c) {
    gauss_.sample_into(rng, y);
    const double xi = model_.sign_mode == SignMode::plus_one
                          ? 1.0
                          : (rng.next_u32() & 1u ? 1.0 : -1.0);
    for (int t = 0; t < n; ++t) {
      const double w =
          t == origin ? 0.0 : y[t] - 0.5 * model_.alpha * variance_[t];
      f.values(t, c) = xi * std::exp(w);
    }
  }
  return {std::move(f), 1.0};
}

void BrSpectralSampler::sample_norms(RngStream& rng,
                                     const HomogeneousNorm& norm,
                                     Eigen::VectorXd& out) const {
  const int n = window_->size();
  const int origin = window_->origin_index();
  thread_local Eigen::VectorXd y;
  thread_local Eigen::VectorXd acc;
  y.resize(n);

  if (model_.d == 1) {
    gauss_.sample_into(rng, y);
    if (model_.sign_mode == SignMode::rademacher) rng.next_u32();
    double unit = 1.0;
    const double scale1 = norm(&unit, 1);  // validates d; 1 for every kind
    for (int t = 0; t < n; ++t) {
      const double w =
          t == origin ? 0.0 : y[t] - 0.5 * model_.alpha * variance_[t];
      out[t] = scale1 * std::exp(w);
    }
    return;
  }

  // alpha-sum accumulation over components; other norms fall back
  if (norm.kind != NormKind::alpha_sum) {
    FieldSampler::sample_norms(rng, norm, out);
    return;
  }
  acc.setZero(n);
  for (int c = 0; c < model_.d; ++c) {
    gauss_.sample_into(rng, y);
    if (model_.sign_mode == SignMode::rademacher) rng.next_u32();
    for (int t = 0; t < n; ++t) {
      const double w =
          t == origin ? 0.0 : y[t] - 0.5 * model_.alpha * variance_[t];
      acc[t] += std::pow(std::exp(w), norm.alpha);
    }
  }
  for (int t = 0; t < n; ++t)
    out[t] = std::pow(acc[t] / norm.d, 1.0 / norm.alpha);
}

Eigen::VectorXd tilt_mean_shift(const Eigen::VectorXd& cov_xy, double var_y) {
  if (!(var_y > 0)) throw UsageError("tilt_mean_shift: Var(Y) must be positive");
  return cov_xy;
}

}  // namespace fieldlab
