#include "fieldlab/tailfields.hpp"

#include <algorithm>
#include <cmath>

namespace fieldlab {

namespace {

int pick_categorical(const std::vector<double>& cum, RngStream& rng) {
  const double u = rng.uniform01() * cum.back();
  const auto it = std::lower_bound(cum.begin(), cum.end(), u);
  return static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(it - cum.begin()), cum.size() - 1));
}

}  // namespace

SyntheticSampler::SyntheticSampler(const SyntheticSpec& spec,
                                   std::shared_ptr<const Window> w)
    : FieldSampler(std::move(w), spec.alpha), spec_(spec) {
  if (!window_->has_origin())
    throw UsageError("synthetic sampler: window must include the origin");
  if (spec_.kind == SyntheticSpec::Kind::geometric_decay &&
      !(spec_.rho > 0 && spec_.rho < 1))
    throw UsageError("synthetic sampler: rho must lie in (0,1)");
  if (spec_.kind == SyntheticSpec::Kind::constant) {
    if (spec_.values.size() != spec_.probs.size() || spec_.values.empty())
      throw UsageError("synthetic sampler: constant law needs matching values/probs");
    double c = 0.0;
    for (double p : spec_.probs) {
      if (!(p >= 0)) throw UsageError("synthetic sampler: negative probability");
      c += p;
      cum_.push_back(c);
    }
    if (std::abs(c - 1.0) > 1e-9)
      throw UsageError("synthetic sampler: constant law must sum to 1");
  }
}

WeightedField SyntheticSampler::sample(RngStream& rng) const {
  FieldSample f = make_field(window_, spec_.d, spec_.alpha);
  switch (spec_.kind) {
    case SyntheticSpec::Kind::singleton:
      f.values(window_->origin_index(), 0) = 1.0;
      break;
    case SyntheticSpec::Kind::geometric_decay: {
      for (int i = 0; i < window_->size(); ++i) {
        const double sign = rng.next_u32() & 1u ? 1.0 : -1.0;
        f.values(i, 0) =
            sign * std::pow(spec_.rho,
                            static_cast<double>(l1_norm(window_->coord(i))));
      }
      break;
    }
    case SyntheticSpec::Kind::constant: {
      const int j = pick_categorical(cum_, rng);
      const double v = spec_.values[static_cast<std::size_t>(j)];
      for (int i = 0; i < window_->size(); ++i) f.values(i, 0) = v;
      break;
    }
  }
  return {std::move(f), 1.0};
}

LocalFieldSampler::LocalFieldSampler(std::shared_ptr<const FieldSampler> base,
                                     LocalMode mode,
                                     const HomogeneousNorm& norm, double alpha,
                                     const ResampleBank& bank)
    : FieldSampler(base->window_ptr(), alpha),
      base_(std::move(base)),
      mode_(mode),
      norm_(norm) {
  if (!window_->has_origin())
    throw UsageError("local field: window must include the origin");
  if (mode_ == LocalMode::resampled) {
    if (bank.size < 1) throw UsageError("local field: bank size must be >= 1");
    bank_.reserve(static_cast<std::size_t>(bank.size));
    double c = 0.0;
    for (int i = 0; i < bank.size; ++i) {
      RngStream rng(bank.seed, substream_id(bank.ctx, static_cast<std::uint64_t>(i)));
      WeightedField wf = base_->sample(rng);
      const double n0 = wf.field.norm_at(window_->origin_index(), norm_);
      double w = wf.weight * std::pow(n0, alpha_);
      if (n0 > 0) wf.field.values /= n0;
      bank_.push_back(std::move(wf.field));
      c += w;
      bank_cum_.push_back(c);
    }
    if (!(c > 0)) throw ContractError("local field: all bank weights are zero");
  }
}

WeightedField LocalFieldSampler::sample(RngStream& rng) const {
  switch (mode_) {
    case LocalMode::direct: {
      WeightedField wf = base_->sample(rng);
      const double n0 = wf.field.norm_at(window_->origin_index(), norm_);
      if (std::abs(n0 - 1.0) > 1e-9)
        throw ContractError(
            "local field (direct): base sample has |Z(0)| != 1");
      return wf;
    }
    case LocalMode::weighted: {
      WeightedField wf = base_->sample(rng);
      const double n0 = wf.field.norm_at(window_->origin_index(), norm_);
      wf.weight *= std::pow(n0, alpha_);
      if (n0 > 0) wf.field.values /= n0;
      return wf;
    }
    case LocalMode::resampled: {
      const int j = pick_categorical(bank_cum_, rng);
      return {bank_[static_cast<std::size_t>(j)], 1.0};
    }
  }
  throw UsageError("local field: unknown mode");
}

MCEstimate LocalFieldSampler::check_normalization(const McParams& mc,
                                                  std::uint32_t ctx,
                                                  bool* warn) const {
  const int origin = window_->origin_index();
  MCEstimate e = run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = base_->sample(rng);
        const double n0 = wf.field.norm_at(origin, norm_);
        return {std::pow(n0, alpha_), wf.weight};
      },
      mc, ctx);
  if (warn) *warn = e.ci_lo > 1.0 || e.ci_hi < 1.0;
  return e;
}

TailFieldSampler::TailFieldSampler(std::shared_ptr<const FieldSampler> theta,
                                   double alpha)
    : FieldSampler(theta->window_ptr(), alpha), theta_(std::move(theta)) {}

WeightedField TailFieldSampler::sample(RngStream& rng) const {
  WeightedField wf = theta_->sample(rng);
  wf.field.values *= rng.pareto(alpha_);
  return wf;
}

ShiftDensity ShiftDensity::uniform(const std::vector<Point>& pts) {
  ShiftDensity pn;
  pn.points = pts;
  pn.probs.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
  return pn;
}

ShiftDensity ShiftDensity::point_mass_origin(int l) {
  ShiftDensity pn;
  pn.points.push_back(Point(static_cast<std::size_t>(l), 0));
  pn.probs.push_back(1.0);
  return pn;
}

void ShiftDensity::validate() const {
  if (points.empty() || points.size() != probs.size())
    throw UsageError("shift density: need matching points/probs");
  double s = 0.0;
  for (double p : probs) {
    if (!(p > 0)) throw UsageError("shift density: probabilities must be positive");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw UsageError("shift density: probabilities must sum to 1");
}

RandomShiftSampler::RandomShiftSampler(std::shared_ptr<const FieldSampler> base,
                                       const ShiftDensity& pn,
                                       ShiftVariant variant,
                                       std::shared_ptr<const Window> out_window,
                                       const HomogeneousNorm& norm, double alpha)
    : FieldSampler(std::move(out_window), alpha),
      base_(std::move(base)),
      pn_(pn),
      variant_(variant),
      norm_(norm) {
  pn_.validate();
  const Window& bw = base_->window();
  for (const Point& n : pn_.points) {
    for (int i = 0; i < window_->size(); ++i) {
      if (!bw.contains(sub(window_->coord(i), n)))
        throw UsageError("random shift: output point " +
                         point_to_string(window_->coord(i)) +
                         " leaves the base window; enlarge it");
    }
    for (const Point& h : pn_.points) {
      if (!bw.contains(sub(h, n)))
        throw UsageError("random shift: normalizer point " +
                         point_to_string(h) +
                         " leaves the base window; enlarge it");
    }
  }
  double c = 0.0;
  for (double p : pn_.probs) cum_.push_back(c += p);
}

WeightedField RandomShiftSampler::sample(RngStream& rng) const {
  const int j = pick_categorical(cum_, rng);
  const Point& N = pn_.points[static_cast<std::size_t>(j)];
  WeightedField base = base_->sample(rng);

  double scale = 0.0;
  if (variant_ == ShiftVariant::normalized_sum) {
    double denom = 0.0;
    for (std::size_t k = 0; k < pn_.points.size(); ++k)
      denom += pn_.probs[k] *
               std::pow(base.field.norm_at(sub(pn_.points[k], N), norm_), alpha_);
    const double n0 = base.field.norm_at(base.field.origin_index(), norm_);
    scale = denom > 0 ? n0 / std::pow(denom, 1.0 / alpha_) : 0.0;
  } else {
    const double n0 = base.field.norm_at(base.field.origin_index(), norm_);
    if (n0 > 0) {
      const double r = rng.pareto(alpha_);
      double maxterm = 0.0;
      double exceed = 0.0;
      for (std::size_t k = 0; k < pn_.points.size(); ++k) {
        const double nk = base.field.norm_at(sub(pn_.points[k], N), norm_);
        maxterm = std::max(maxterm, pn_.probs[k] * std::pow(nk, alpha_));
        if (r * nk / n0 > 1.0) exceed += pn_.probs[k];
      }
      const double denom = maxterm * exceed;
      scale = denom > 0 ? std::pow(pn_.probs[static_cast<std::size_t>(j)] / denom,
                                   1.0 / alpha_)
                        : 0.0;
    }
  }

  FieldSample out = make_field(window_, base.field.dim(), alpha_);
  for (int i = 0; i < window_->size(); ++i) {
    const int src = base.field.window->index_of(sub(window_->coord(i), N));
    out.values.row(i) = scale * base.field.values.row(src);
  }
  return {std::move(out), base.weight};
}

std::vector<Point> functional_points(const FunctionalSpec& F, const Window& w) {
  if (F.kind == FunctionalKind::indicator_box ||
      F.kind == FunctionalKind::product_power)
    return F.points;
  std::vector<Point> pts;
  for (int i : subwindow_indices(w, F.radius)) pts.push_back(w.coord(i));
  return pts;
}

void require_evaluable(const FunctionalSpec& F, const Window& w,
                       const Point* shift) {
  for (const Point& p : functional_points(F, w)) {
    const Point q = shift ? sub(p, *shift) : p;
    if (!w.contains(q))
      throw UsageError("functional '" + F.name + "': point " +
                       point_to_string(q) + " is outside the window");
  }
}

ComparisonReport check_identity_boll(const FieldSampler& s1,
                                     const FieldSampler& s2,
                                     const FunctionalSpec& F, const Point& h,
                                     const HomogeneousNorm& norm, double alpha,
                                     const McParams& mc, std::uint32_t ctx) {
  for (const FieldSampler* s : {&s1, &s2}) {
    if (!s->window().contains(h))
      throw UsageError("identity check: h is outside the window");
    require_evaluable(F, s->window());
  }
  auto side = [&](const FieldSampler& s, std::uint32_t c) {
    return run_mc_weighted(
        [&](RngStream& rng) -> WeightedValue {
          WeightedField wf = s.sample(rng);
          const double nh = wf.field.norm_at(h, norm);
          if (nh == 0.0) return {0.0, wf.weight};
          EvalOptions opt;
          opt.divisor = nh;
          return {std::pow(nh, alpha) * eval_functional(F, wf.field, norm, opt),
                  wf.weight};
        },
        mc, c);
  };
  return compare(side(s1, ctx), side(s2, ctx + 1), mc.z_crit);
}

ComparisonReport check_spectral_identity(const FieldSampler& theta,
                                         const FunctionalSpec& G,
                                         const Point& h,
                                         const HomogeneousNorm& norm,
                                         double alpha, const McParams& mc,
                                         std::uint32_t ctx) {
  const Window& w = theta.window();
  if (!w.contains(h) || !w.contains(negate(h)))
    throw UsageError("spectral identity: need both h and -h in the window");
  require_evaluable(G, w);
  require_evaluable(G, w, &h);
  const MCEstimate lhs = run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = theta.sample(rng);
        const double nh = wf.field.norm_at(h, norm);
        if (nh == 0.0) return {0.0, wf.weight};
        return {std::pow(nh, alpha) * eval_functional(G, wf.field, norm),
                wf.weight};
      },
      mc, ctx);
  const MCEstimate rhs = run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = theta.sample(rng);
        const double nmh = wf.field.norm_at(negate(h), norm);
        if (nmh == 0.0) return {0.0, wf.weight};
        EvalOptions opt;
        opt.shift = &h;
        opt.divisor = nmh;  // 0-homogenized argument: B^h Theta normalized
        return {eval_functional(G, wf.field, norm, opt), wf.weight};
      },
      mc, ctx + 1);
  return compare(lhs, rhs, mc.z_crit);
}

ComparisonReport check_tail_identity(const FieldSampler& y,
                                     const FunctionalSpec& G, const Point& h,
                                     double x, const HomogeneousNorm& norm,
                                     double alpha, const McParams& mc,
                                     std::uint32_t ctx) {
  if (!(x > 0)) throw UsageError("tail identity: x must be positive");
  const Window& w = y.window();
  if (!w.contains(h) || !w.contains(negate(h)))
    throw UsageError("tail identity: need both h and -h in the window");
  require_evaluable(G, w);
  require_evaluable(G, w, &h);
  const MCEstimate lhs = run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = y.sample(rng);
        if (x * wf.field.norm_at(negate(h), norm) <= 1.0)
          return {0.0, wf.weight};
        EvalOptions opt;
        opt.shift = &h;
        opt.scale = x;
        return {eval_functional(G, wf.field, norm, opt), wf.weight};
      },
      mc, ctx);
  const MCEstimate rhs = run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = y.sample(rng);
        if (wf.field.norm_at(h, norm) <= x) return {0.0, wf.weight};
        return {std::pow(x, alpha) * eval_functional(G, wf.field, norm),
                wf.weight};
      },
      mc, ctx + 1);
  return compare(lhs, rhs, mc.z_crit);
}

ComparisonReport fdd_y_check(const FieldSampler& theta,
                             const std::vector<Point>& points,
                             const std::vector<double>& x,
                             const HomogeneousNorm& norm, double alpha,
                             const McParams& mc, std::uint32_t ctx) {
  if (points.size() != x.size() || points.empty())
    throw UsageError("fdd check: need matching points and levels");
  for (double xi : x)
    if (!(xi > 0)) throw UsageError("fdd check: levels must be positive");
  for (const Point& p : points)
    if (!theta.window().contains(p))
      throw UsageError("fdd check: point outside window");
  const MCEstimate lhs = run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = theta.sample(rng);
        const double r = rng.pareto(alpha);
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (r * wf.field.norm_at(points[i], norm) > x[i])
            return {0.0, wf.weight};
        }
        return {1.0, wf.weight};
      },
      mc, ctx);
  const MCEstimate rhs = run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = theta.sample(rng);
        double m = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          const double t = wf.field.norm_at(points[i], norm) / x[i];
          m = std::max(m, std::pow(t, alpha));
        }
        return {std::max(1.0, m) - m, wf.weight};
      },
      mc, ctx + 1);
  return compare(lhs, rhs, mc.z_crit);
}

namespace {

double sup_over(const FieldSample& f, const std::vector<Point>& pts,
                const HomogeneousNorm& norm, const Point* shift = nullptr,
                double scale = 1.0) {
  double m = 0.0;
  for (const Point& p : pts)
    m = std::max(m, scale * f.norm_at(shift ? sub(p, *shift) : p, norm));
  return m;
}

void check_vanishing(const TailMeasureH& H, const FieldSample& f,
                     const HomogeneousNorm& norm, double s0) {
  // shrink below the declared threshold; H must vanish there
  if (s0 <= 0) return;
  EvalOptions opt;
  opt.scale = 0.5 * H.eps;
  opt.divisor = s0;
  if (eval_functional(H.H, f, norm, opt) != 0.0)
    throw ContractError("tail measure: H violates its declared vanishing "
                        "property (eps=" + std::to_string(H.eps) + ")");
}

void spot_check_vanishing(const FieldSampler& sampler, const TailMeasureH& H,
                          const HomogeneousNorm& norm, const McParams& mc,
                          std::uint32_t ctx) {
  for (int i = 0; i < 8; ++i) {
    RngStream rng(mc.seed, substream_id(ctx + 7, static_cast<std::uint64_t>(i)));
    WeightedField wf = sampler.sample(rng);
    check_vanishing(H, wf.field, norm, sup_over(wf.field, H.k0, norm));
  }
}

}  // namespace

MCEstimate tail_measure_direct(const FieldSampler& spectral,
                               const TailMeasureH& H,
                               const HomogeneousNorm& norm, double alpha,
                               const McParams& mc, std::uint32_t ctx) {
  if (H.k0.empty()) throw UsageError("tail measure: K0 must be nonempty");
  if (!(H.eps > 0)) throw UsageError("tail measure: eps must be positive");
  for (const Point& p : H.k0)
    if (!spectral.window().contains(p))
      throw UsageError("tail measure: K0 point outside window");
  require_evaluable(H.H, spectral.window());
  spot_check_vanishing(spectral, H, norm, mc, ctx);
  return run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = spectral.sample(rng);
        const double s0 = sup_over(wf.field, H.k0, norm);
        if (s0 == 0.0) return {0.0, wf.weight};
        const double u = rng.pareto(alpha);
        EvalOptions opt;
        opt.scale = H.eps * u;
        opt.divisor = s0;
        const double hv = eval_functional(H.H, wf.field, norm, opt);
        return {std::pow(s0 / H.eps, alpha) * hv, wf.weight};
      },
      mc, ctx);
}

MCEstimate tail_measure_window_shift(const FieldSampler& theta,
                                     const TailMeasureH& H,
                                     const std::vector<Point>& K,
                                     const HomogeneousNorm& norm, double alpha,
                                     const McParams& mc, std::uint32_t ctx) {
  if (K.empty()) throw UsageError("tail measure: K must be nonempty");
  const Window& w = theta.window();
  for (const Point& t : K) {
    for (const Point& s : K)
      if (!w.contains(sub(s, t)))
        throw UsageError("tail measure: K differences leave the window");
    for (const Point& p : functional_points(H.H, w))
      if (!w.contains(sub(p, t)))
        throw UsageError("tail measure: shifted H point leaves the window");
  }
  spot_check_vanishing(theta, H, norm, mc, ctx);
  const double pref = std::pow(H.eps, -alpha);
  return run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = theta.sample(rng);
        const double r = rng.pareto(alpha);  // Y = r * Theta
        double acc = 0.0;
        for (const Point& t : K) {
          double exceed = 0.0;
          for (const Point& s : K)
            if (r * wf.field.norm_at(sub(s, t), norm) > 1.0) exceed += 1.0;
          if (exceed == 0.0) continue;
          EvalOptions opt;
          opt.shift = &t;
          opt.scale = H.eps * r;
          acc += eval_functional(H.H, wf.field, norm, opt) / exceed;
        }
        return {pref * acc, wf.weight};
      },
      mc, ctx);
}

MCEstimate tail_measure_theta_shift(const FieldSampler& theta,
                                    const TailMeasureH& H,
                                    const ShiftDensity& pn,
                                    const HomogeneousNorm& norm, double alpha,
                                    const McParams& mc, std::uint32_t ctx) {
  pn.validate();
  const Window& w = theta.window();
  for (const Point& n : pn.points) {
    for (const Point& h : pn.points)
      if (!w.contains(sub(h, n)))
        throw UsageError("tail measure: shift density leaves the window");
    for (const Point& p : H.k0)
      if (!w.contains(sub(p, n)))
        throw UsageError("tail measure: shifted K0 leaves the window");
    for (const Point& p : functional_points(H.H, w))
      if (!w.contains(sub(p, n)))
        throw UsageError("tail measure: shifted H point leaves the window");
  }
  spot_check_vanishing(theta, H, norm, mc, ctx);
  std::vector<double> cum;
  double c = 0.0;
  for (double p : pn.probs) cum.push_back(c += p);
  return run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = theta.sample(rng);
        const int j = pick_categorical(cum, rng);
        const Point& N = pn.points[static_cast<std::size_t>(j)];
        double denom = 0.0;
        for (std::size_t k = 0; k < pn.points.size(); ++k)
          denom += pn.probs[k] *
                   std::pow(wf.field.norm_at(sub(pn.points[k], N), norm), alpha);
        if (denom == 0.0) return {0.0, wf.weight};
        const double inorm = std::pow(denom, 1.0 / alpha);
        // raw sup over K0; the path is Theta(.-N)/inorm
        double s_raw = 0.0;
        for (const Point& p : H.k0)
          s_raw = std::max(s_raw, wf.field.norm_at(sub(p, N), norm));
        if (s_raw == 0.0) return {0.0, wf.weight};
        const double u = rng.pareto(alpha);
        EvalOptions opt;
        opt.shift = &N;
        opt.scale = H.eps * u;
        opt.divisor = s_raw;
        const double hv = eval_functional(H.H, wf.field, norm, opt);
        return {std::pow(s_raw / (H.eps * inorm), alpha) * hv, wf.weight};
      },
      mc, ctx);
}

MCEstimate integrability_probe(const FieldSampler& theta,
                               const std::vector<Point>& points,
                               const std::vector<double>& weights,
                               double sup_radius, const HomogeneousNorm& norm,
                               double alpha, const McParams& mc,
                               std::uint32_t ctx) {
  if (points.empty() || points.size() != weights.size())
    throw UsageError("integrability probe: need matching points/weights");
  for (double wgt : weights)
    if (!(wgt > 0)) throw UsageError("integrability probe: weights must be positive");
  const Window& w = theta.window();
  std::vector<Point> sup_pts;
  for (int i : subwindow_indices(w, sup_radius)) sup_pts.push_back(w.coord(i));
  for (const Point& t : points) {
    for (const Point& s : sup_pts)
      if (!w.contains(sub(s, t)))
        throw UsageError("integrability probe: window too small");
    for (const Point& r : points)
      if (!w.contains(sub(r, t)))
        throw UsageError("integrability probe: window too small");
  }
  return run_mc_weighted(
      [&](RngStream& rng) -> WeightedValue {
        WeightedField wf = theta.sample(rng);
        double acc = 0.0;
        for (std::size_t ti = 0; ti < points.size(); ++ti) {
          const Point& t = points[ti];
          double sup = 0.0;
          for (const Point& s : sup_pts)
            sup = std::max(sup,
                           std::pow(wf.field.norm_at(sub(s, t), norm), alpha));
          double denom = 0.0;
          for (std::size_t ri = 0; ri < points.size(); ++ri)
            denom += weights[ri] *
                     std::pow(wf.field.norm_at(sub(points[ri], t), norm),
                              alpha);
          if (denom > 0) acc += weights[ti] * sup / denom;
        }
        return {acc, wf.weight};
      },
      mc, ctx);
}

}  // namespace fieldlab
