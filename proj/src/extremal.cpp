#include "fieldlab/extremal.hpp"

#include <cmath>

namespace fieldlab {

std::vector<ExtremalPoint> extremal_index_blocks(
    const SamplerFactory& make_stationary, const Lattice& L, double alpha,
    const HomogeneousNorm& norm, const std::vector<double>& n_list,
    const McParams& mc, std::uint32_t ctx) {
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (!(n_list[i] > n_list[i - 1]))
      throw UsageError("blocks estimator: n_list must be increasing");
  std::vector<ExtremalPoint> out;
  const int l = L.dim();
  std::uint32_t c = ctx;
  for (double n : n_list) {
    auto window = enumerate_block(L, n);
    if (window->size() == 0)
      throw UsageError("blocks estimator: empty block window");
    auto sampler = make_stationary(window);
    const double nl = std::pow(n, l);
    ExtremalPoint pt;
    pt.n_or_a = n;
    pt.value = run_mc_weighted(
        [&](RngStream& rng) -> WeightedValue {
          WeightedField wf = sampler->sample(rng);
          double m = 0.0;
          for (int t = 0; t < wf.field.size(); ++t)
            m = std::max(m, std::pow(wf.field.norm_at(t, norm), alpha));
          return {m / nl, wf.weight};
        },
        mc, c++);
    out.push_back(pt);
  }
  return out;
}

PilResult extremal_index_pil(const FieldSampler& theta, double alpha,
                             double tau, const std::vector<double>& radii,
                             const HomogeneousNorm& norm, const McParams& mc,
                             std::uint32_t ctx) {
  if (radii.empty()) throw UsageError("pil estimator: need at least one radius");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw UsageError("pil estimator: radii must be increasing");
  const Window& w = theta.window();
  if (!w.has_origin())
    throw UsageError("pil estimator: window must include the origin");

  PilResult res;
  res.delta = w.lattice().delta();
  res.tau = tau;
  const double pref = 1.0 / res.delta;

  // every radius reuses the same substreams, so the estimates share their
  // paths and are nonincreasing in the radius replication by replication
  for (double a : radii) {
    const std::vector<int> idx = subwindow_indices(w, a);
    ExtremalPoint pt;
    pt.n_or_a = a;
    pt.value = run_mc_weighted(
        [&](RngStream& rng) -> WeightedValue {
          WeightedField wf = theta.sample(rng);
          const double r = rng.pareto(alpha);  // Y = r * Theta
          double d = 0.0;
          for (int i : idx) {
            const double nt = wf.field.norm_at(i, norm);
            if (r * nt > 1.0) d += std::pow(nt, tau);
          }
          if (d <= 0.0) throw ContractError("pil estimator: zero denominator");
          return {pref / d, wf.weight};
        },
        mc, ctx);
    res.growth.push_back(pt);
  }
  res.value = res.growth.back().value;
  return res;
}

std::vector<RefinementRow> refinement_study(const SamplerFactory& make_sampler,
                                            const Lattice& L, int levels,
                                            double block_n, double alpha,
                                            const HomogeneousNorm& norm,
                                            const McParams& mc,
                                            std::uint32_t ctx) {
  if (levels < 0) throw UsageError("refinement study: levels must be >= 0");
  const Lattice fine = L.refined(levels);
  auto window = enumerate_block(fine, block_n);
  auto sampler = make_sampler(window);
  const int l = L.dim();
  const double nl = std::pow(block_n, l);

  // level m keeps the coords divisible by 2^(levels - m)
  std::vector<std::vector<int>> level_idx(static_cast<std::size_t>(levels) + 1);
  for (int m = 0; m <= levels; ++m) {
    const std::int64_t step = static_cast<std::int64_t>(1) << (levels - m);
    for (int i = 0; i < window->size(); ++i) {
      bool keep = true;
      for (std::int64_t c : window->coord(i))
        if (c % step != 0) {
          keep = false;
          break;
        }
      if (keep) level_idx[static_cast<std::size_t>(m)].push_back(i);
    }
  }

  const std::size_t k = static_cast<std::size_t>(levels) + 1;
  std::vector<MCEstimate> cols = run_mc_multi(
      [&](RngStream& rng, std::span<double> out) {
        WeightedField wf = sampler->sample(rng);
        for (std::size_t m = 0; m < k; ++m) {
          double mx = 0.0;
          for (int i : level_idx[m])
            mx = std::max(mx, std::pow(wf.field.norm_at(i, norm), alpha));
          out[m] = mx / nl;
        }
      },
      k, mc, ctx);

  std::vector<RefinementRow> rows;
  for (int m = 0; m <= levels; ++m) {
    RefinementRow row;
    row.level = m;
    row.delta = L.refined(m).delta();
    row.points = static_cast<long long>(level_idx[static_cast<std::size_t>(m)].size());
    row.value = cols[static_cast<std::size_t>(m)];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fieldlab
