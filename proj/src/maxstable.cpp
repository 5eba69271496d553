#include "fieldlab/maxstable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fieldlab {

DeHaanSimulator::DeHaanSimulator(std::shared_ptr<const FieldSampler> spectral,
                                 const HomogeneousNorm& norm, double alpha,
                                 DeHaanConfig cfg, std::uint64_t seed,
                                 std::uint32_t quantile_ctx)
    : spectral_(std::move(spectral)), norm_(norm), alpha_(alpha), cfg_(cfg) {
  if (spectral_->window().size() == 0)
    throw UsageError("de Haan: window is empty");
  if (!(cfg_.epsilon > 0 && cfg_.epsilon < 1))
    throw UsageError("de Haan: epsilon must lie in (0,1)");
  if (cfg_.max_terms < 1) throw UsageError("de Haan: max_terms must be >= 1");
  std::vector<double> sups(static_cast<std::size_t>(cfg_.quantile_probes));
  Eigen::VectorXd norms(spectral_->window().size());
  for (int i = 0; i < cfg_.quantile_probes; ++i) {
    RngStream rng(seed, substream_id(quantile_ctx, static_cast<std::uint64_t>(i)));
    spectral_->sample_norms(rng, norm_, norms);
    sups[static_cast<std::size_t>(i)] = norms.maxCoeff();
  }
  std::sort(sups.begin(), sups.end());
  const auto rank = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(sups.size()) - 1.0,
                       cfg_.quantile_level * static_cast<double>(sups.size())));
  q_hat_ = sups[rank];
  if (!(q_hat_ > 0))
    throw NumericalError("de Haan: estimated sup-quantile is zero");
}

MaxStableDraw DeHaanSimulator::sample(RngStream& rng) const {
  const int n = spectral_->window().size();
  MaxStableDraw draw;
  draw.x = Eigen::VectorXd::Zero(n);
  thread_local Eigen::VectorXd norms;
  norms.resize(n);
  double gamma = 0.0;
  double xmin = 0.0;
  while (true) {
    gamma += rng.exponential();
    const double factor = std::pow(gamma, -1.0 / alpha_);
    if (draw.terms >= cfg_.min_terms && factor * q_hat_ < cfg_.epsilon * xmin) {
      draw.stop_margin = factor * q_hat_ / (cfg_.epsilon * xmin);
      break;
    }
    if (draw.terms >= cfg_.max_terms) {
      draw.truncated = true;
      draw.stop_margin =
          xmin > 0 ? factor * q_hat_ / (cfg_.epsilon * xmin)
                   : std::numeric_limits<double>::infinity();
      break;
    }
    spectral_->sample_norms(rng, norm_, norms);
    xmin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      draw.x[t] = std::max(draw.x[t], factor * norms[t]);
      xmin = std::min(xmin, draw.x[t]);
    }
    ++draw.terms;
  }
  return draw;
}

MCEstimate fdd_neglog(const FieldSampler& spectral,
                      const std::vector<Point>& points,
                      const std::vector<double>& x,
                      const HomogeneousNorm& norm, double alpha,
                      const McParams& mc, std::uint32_t ctx) {
  if (points.size() != x.size() || points.empty())
    throw UsageError("fdd_neglog: need matching points and levels");
  for (double xi : x)
    if (!(xi > 0)) throw UsageError("fdd_neglog: levels must be positive");
  std::vector<int> idx;
  for (const Point& p : points) {
    const int i = spectral.window().index_of(p);
    if (i < 0) throw UsageError("fdd_neglog: point outside window");
    idx.push_back(i);
  }
  return run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = spectral.sample(rng);
        double m = 0.0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
          const double v = wf.field.norm_at(idx[i], norm) / x[i];
          m = std::max(m, std::pow(v, alpha));
        }
        return {m, wf.weight};
      },
      mc, ctx);
}

std::vector<SupProbeRow> sup_distribution_probe(
    const SamplerFactory& make_spectral, const Lattice& L, double alpha,
    const HomogeneousNorm& norm, const std::vector<double>& n_list, double r,
    const DeHaanConfig& cfg, const McParams& mc, std::uint32_t ctx) {
  if (!(r > 0)) throw UsageError("sup probe: r must be positive");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (!(n_list[i] > n_list[i - 1]))
      throw UsageError("sup probe: n_list must be increasing");
  std::vector<SupProbeRow> rows;
  const int l = L.dim();
  std::uint32_t c = ctx;
  for (double n : n_list) {
    auto window = enumerate_block(L, n);
    auto spectral = make_spectral(window);
    const double nl = std::pow(n, l);
    SupProbeRow row;
    row.n = n;

    // spectral side: n^{-l} E sup |Z|^alpha / r^alpha
    row.spec_side = run_mc(
        [&](RngStream& rng) {
          thread_local Eigen::VectorXd norms;
          norms.resize(window->size());
          spectral->sample_norms(rng, norm, norms);
          return std::pow(norms.maxCoeff(), alpha) / (std::pow(r, alpha) * nl);
        },
        mc, c++);

    // empirical side: P(sup X <= r n^{l/alpha}) from de Haan draws
    DeHaanSimulator sim(spectral, norm, alpha, cfg, mc.seed, c++);
    const double level = r * std::pow(n, static_cast<double>(l) / alpha);
    const MCEstimate p = run_mc(
        [&](RngStream& rng) {
          const MaxStableDraw d = sim.sample(rng);
          return d.x.maxCoeff() <= level ? 1.0 : 0.0;
        },
        mc, c++);
    row.emp_p = p.mean;
    if (p.mean > 0) {
      row.emp_defined = true;
      row.neglog_emp = -std::log(p.mean);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fieldlab
