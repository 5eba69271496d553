#include <doctest.h>

#include <cmath>
#include <limits>

#include "fieldlab/gaussian.hpp"
#include "fieldlab/tailfields.hpp"

using namespace fieldlab;

namespace {

const HomogeneousNorm kNorm = HomogeneousNorm::alpha_sum(1.0, 1);
constexpr double kAlpha = 1.0;

std::shared_ptr<const FieldSampler> br(std::shared_ptr<const Window> w) {
  SpectralModel m;
  m.variogram = {1.0, 1.0};
  m.alpha = kAlpha;
  return std::make_shared<BrSpectralSampler>(m, std::move(w));
}

std::shared_ptr<const FieldSampler> synthetic(SyntheticSpec::Kind kind,
                                              std::shared_ptr<const Window> w,
                                              double rho = 0.5) {
  SyntheticSpec s;
  s.kind = kind;
  s.rho = rho;
  s.alpha = kAlpha;
  return std::make_shared<SyntheticSampler>(s, std::move(w));
}

std::shared_ptr<const LocalFieldSampler> br_theta(double radius) {
  auto w = enumerate_window(Lattice::integers(1), radius);
  return std::make_shared<LocalFieldSampler>(br(w), LocalMode::direct, kNorm,
                                             kAlpha);
}

// |Z(0)| in {0, 2} equally likely, constant over the window
class TwoPointBase : public FieldSampler {
 public:
  explicit TwoPointBase(std::shared_ptr<const Window> w)
      : FieldSampler(std::move(w), 1.0) {}
  WeightedField sample(RngStream& rng) const override {
    FieldSample f = make_field(window_, 1, alpha_);
    const double v = rng.uniform01() < 0.5 ? 0.0 : 2.0;
    for (int i = 0; i < f.size(); ++i) f.values(i, 0) = v;
    return {std::move(f), 1.0};
  }
};

}  // namespace

TEST_CASE("synthetic fields have the advertised shapes") {
  auto w = enumerate_window(Lattice::integers(1), 3.0);
  RngStream rng(5, 1);

  const auto s = synthetic(SyntheticSpec::Kind::singleton, w);
  const WeightedField sf = s->sample(rng);
  CHECK(sf.field.norm_at(Point{0}, kNorm) == 1.0);
  CHECK(sf.field.norm_at(Point{1}, kNorm) == 0.0);

  const auto g = synthetic(SyntheticSpec::Kind::geometric_decay, w, 0.5);
  const WeightedField gf = g->sample(rng);
  CHECK(gf.field.norm_at(Point{0}, kNorm) == 1.0);
  CHECK(gf.field.norm_at(Point{2}, kNorm) == doctest::Approx(0.25));
  CHECK(gf.field.norm_at(Point{-3}, kNorm) == doctest::Approx(0.125));
}

TEST_CASE("local field modes agree") {
  auto w = enumerate_window(Lattice::integers(1), 2.0);

  // direct: BR already satisfies |Z(0)| = 1
  const LocalFieldSampler direct(br(w), LocalMode::direct, kNorm, kAlpha);
  RngStream rng(9, 2);
  for (int i = 0; i < 50; ++i) {
    const WeightedField t = direct.sample(rng);
    CHECK(t.field.norm_at(w->origin_index(), kNorm) == 1.0);
    CHECK(t.weight == 1.0);
  }

  // weighted mean of F = 1 under the two-point base is exactly 1
  const McParams mc{10, 20000, 4};
  auto two = std::make_shared<TwoPointBase>(w);
  const LocalFieldSampler weighted(two, LocalMode::weighted, kNorm, kAlpha);
  const MCEstimate one = run_mc_weighted(
      [&](RngStream& r) -> WeightedValue {
        const WeightedField t = weighted.sample(r);
        if (t.weight > 0)
          CHECK(t.field.norm_at(w->origin_index(), kNorm) ==
                doctest::Approx(1.0));
        return {1.0, t.weight};
      },
      mc, 1);
  CHECK(one.mean == doctest::Approx(1.0));

  // weighted vs resampled estimates of E|Theta(h)| agree
  SpectralModel m;
  m.variogram = {1.0, 1.0};
  m.alpha = kAlpha;
  auto base = std::make_shared<BrSpectralSampler>(m, w);
  const LocalFieldSampler as_weighted(base, LocalMode::weighted, kNorm, kAlpha);
  ResampleBank bank;
  bank.size = 10000;
  bank.seed = 123;
  const LocalFieldSampler as_resampled(base, LocalMode::resampled, kNorm,
                                       kAlpha, bank);
  auto mean_at_1 = [&](const LocalFieldSampler& s, std::uint32_t ctx) {
    return run_mc_weighted(
        [&](RngStream& r) -> WeightedValue {
          const WeightedField t = s.sample(r);
          return {t.weight > 0 ? t.field.norm_at(Point{1}, kNorm) : 0.0,
                  t.weight};
        },
        McParams{11, 40000, 4}, ctx);
  };
  const MCEstimate ew = mean_at_1(as_weighted, 5);
  const MCEstimate er = mean_at_1(as_resampled, 6);
  CHECK(std::abs(ew.mean - er.mean) <=
        4.0 * std::sqrt(ew.se * ew.se + er.se * er.se) + 0.02);

  // normalization probe
  bool warn = true;
  const MCEstimate norm_probe =
      direct.check_normalization(McParams{12, 20000, 2}, 9, &warn);
  CHECK(norm_probe.mean == doctest::Approx(1.0));
  CHECK_FALSE(warn);
}

TEST_CASE("tail field samples sit above 1 at the origin") {
  auto theta = br_theta(2.0);
  const TailFieldSampler y(theta, kAlpha);
  RngStream rng(21, 3);
  for (int i = 0; i < 200; ++i) {
    const WeightedField s = y.sample(rng);
    CHECK(s.field.norm_at(Point{0}, kNorm) >= 1.0);
  }
  // survival of |Y(0)| at 2
  const McParams mc{22, 100000, 4};
  const MCEstimate surv = run_mc_weighted(
      [&](RngStream& r) -> WeightedValue {
        const WeightedField s = y.sample(r);
        return {s.field.norm_at(Point{0}, kNorm) > 2.0 ? 1.0 : 0.0, s.weight};
      },
      mc, 1);
  CHECK(std::abs(surv.mean - 0.5) <= 4.0 * surv.se);

  // independence probe: corr(log |Y(0)|, |Theta(1)|) is about 0
  const long long reps = 50000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (long long i = 0; i < reps; ++i) {
    RngStream r(23, substream_id(7, static_cast<std::uint64_t>(i)));
    const WeightedField s = y.sample(r);
    const double a = std::log(s.field.norm_at(Point{0}, kNorm));
    const double b = s.field.norm_at(Point{1}, kNorm) /
                     s.field.norm_at(Point{0}, kNorm);
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  const double n = static_cast<double>(reps);
  const double corr = (sxy - sx * sy / n) /
                      std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  CHECK(std::abs(corr) <= 4.0 / std::sqrt(n));
}

TEST_CASE("defining identity holds for the field against itself") {
  auto w = enumerate_window(Lattice::integers(1), 3.0);
  auto s1 = br(w);
  auto s2 = br(w);
  const FunctionalSpec F = FunctionalSpec::box(
      {Point{0}}, {0.5}, {std::numeric_limits<double>::infinity()});
  const McParams mc{31, 50000, 4};
  for (const std::int64_t h : {0LL, 1LL, 2LL}) {
    const ComparisonReport rep = check_identity_boll(
        *s1, *s2, F, Point{h}, kNorm, kAlpha, mc, 100 + 2 * static_cast<std::uint32_t>(h));
    CHECK(rep.pass);
  }
}

TEST_CASE("random shift stays in the class") {
  const Lattice z = Lattice::integers(1);
  auto base = br(enumerate_window(z, 5.0));
  auto out = enumerate_window(z, 3.0);
  const ShiftDensity pn = ShiftDensity::uniform(
      {Point{-1}, Point{0}, Point{1}});

  const McParams mc{41, 60000, 4};
  for (const ShiftVariant variant :
       {ShiftVariant::normalized_sum, ShiftVariant::pareto_max}) {
    const RandomShiftSampler zn(base, pn, variant, out, kNorm, kAlpha);
    std::uint32_t ctx = variant == ShiftVariant::normalized_sum ? 200 : 300;
    const FunctionalSpec F = FunctionalSpec::box(
        {Point{0}}, {1.0}, {std::numeric_limits<double>::infinity()});
    for (const std::int64_t h : {0LL, 1LL}) {
      const ComparisonReport rep =
          check_identity_boll(*base, zn, F, Point{h}, kNorm, kAlpha, mc, ctx);
      ctx += 2;
      CHECK(rep.pass);
    }
  }

  // point mass at the origin reproduces the base law
  const RandomShiftSampler id(base, ShiftDensity::point_mass_origin(1),
                              ShiftVariant::normalized_sum, out, kNorm, kAlpha);
  RngStream ra(42, 9);
  RngStream rb(42, 9);
  const WeightedField a = id.sample(ra);
  rb.uniform01();  // the shift sampler draws N first; align the streams
  const WeightedField b = base->sample(rb);
  for (int i = 0; i < out->size(); ++i)
    CHECK(a.field.norm_at(i, kNorm) ==
          doctest::Approx(b.field.norm_at(out->coord(i), kNorm)));

  // window too small -> usage error
  CHECK_THROWS_AS(RandomShiftSampler(br(enumerate_window(z, 3.0)), pn,
                                     ShiftVariant::normalized_sum, out, kNorm,
                                     kAlpha),
                  UsageError);
}

TEST_CASE("singleton shifted by a density is a moving singleton") {
  const Lattice z = Lattice::integers(1);
  auto base = synthetic(SyntheticSpec::Kind::singleton,
                        enumerate_window(z, 4.0));
  auto out = enumerate_window(z, 2.0);
  const ShiftDensity pn =
      ShiftDensity::uniform({Point{-1}, Point{0}, Point{1}});
  const RandomShiftSampler zn(base, pn, ShiftVariant::normalized_sum, out,
                              kNorm, kAlpha);
  RngStream rng(43, 1);
  for (int i = 0; i < 50; ++i) {
    const WeightedField s = zn.sample(rng);
    int support = 0;
    for (int t = 0; t < s.field.size(); ++t)
      support += s.field.norm_at(t, kNorm) > 0 ? 1 : 0;
    CHECK(support == 1);
  }
}

TEST_CASE("spectral-tail identity") {
  const McParams mc{51, 60000, 4};

  // h = 0 passes with matched laws
  auto theta = br_theta(4.0);
  const FunctionalSpec one = FunctionalSpec::constant_one();
  const ComparisonReport at0 =
      check_spectral_identity(*theta, one, Point{0}, kNorm, kAlpha, mc, 400);
  CHECK(at0.pass);

  // BR at h = 1 with an exceedance indicator
  const FunctionalSpec exceed = FunctionalSpec::box(
      {Point{1}}, {1.0}, {std::numeric_limits<double>::infinity()});
  const ComparisonReport at1 =
      check_spectral_identity(*theta, exceed, Point{1}, kNorm, kAlpha, mc, 402);
  CHECK(at1.pass);

  // singleton: both sides vanish identically at h = 1
  auto sing = std::make_shared<LocalFieldSampler>(
      synthetic(SyntheticSpec::Kind::singleton,
                enumerate_window(Lattice::integers(1), 4.0)),
      LocalMode::direct, kNorm, kAlpha);
  const ComparisonReport s1 =
      check_spectral_identity(*sing, exceed, Point{1}, kNorm, kAlpha, mc, 404);
  CHECK(s1.pass);
  CHECK(s1.lhs.mean == 0.0);
  CHECK(s1.rhs.mean == 0.0);

  // window too small for the shifted evaluation: reading at -1-1 = -2
  auto tiny = br_theta(1.0);
  const FunctionalSpec at_minus1 = FunctionalSpec::box(
      {Point{-1}}, {1.0}, {std::numeric_limits<double>::infinity()});
  CHECK_THROWS_AS(check_spectral_identity(*tiny, at_minus1, Point{1}, kNorm,
                                          kAlpha, mc, 406),
                  UsageError);
}

TEST_CASE("tail identity") {
  auto theta = br_theta(3.0);
  const auto y = std::make_shared<TailFieldSampler>(theta, kAlpha);
  const McParams mc{61, 60000, 4};

  // h = 0, x = 1, G = 1: both sides are exactly 1
  const FunctionalSpec one = FunctionalSpec::constant_one();
  const ComparisonReport base =
      check_tail_identity(*y, one, Point{0}, 1.0, kNorm, kAlpha, mc, 500);
  CHECK(base.pass);
  CHECK(base.lhs.mean == 1.0);
  CHECK(base.rhs.mean == 1.0);
  CHECK(base.lhs.se == 0.0);

  // scaling sweep at h = 1
  std::uint32_t ctx = 502;
  for (const double x : {0.5, 1.0, 2.0}) {
    const ComparisonReport rep =
        check_tail_identity(*y, one, Point{1}, x, kNorm, kAlpha, mc, ctx);
    ctx += 2;
    CHECK(rep.pass);
  }
}

TEST_CASE("fdd of the tail field") {
  const McParams mc{71, 60000, 4};

  // single point: both sides have the closed form max(0, 1 - x^-alpha)
  auto theta = br_theta(3.0);
  for (const double x : {0.5, 2.0}) {
    const ComparisonReport rep =
        fdd_y_check(*theta, {Point{0}}, {x}, kNorm, kAlpha, mc,
                    600 + static_cast<std::uint32_t>(4 * x));
    const double want = std::max(0.0, 1.0 - std::pow(x, -kAlpha));
    CHECK(rep.pass);
    CHECK(rep.rhs.mean == doctest::Approx(want));
    CHECK(rep.rhs.se == doctest::Approx(0.0));
    CHECK(std::abs(rep.lhs.mean - want) <= 4.0 * rep.lhs.se + 1e-12);
  }

  // singleton, points {0,1}, x = (2,3): only the origin matters
  auto sing = std::make_shared<LocalFieldSampler>(
      synthetic(SyntheticSpec::Kind::singleton,
                enumerate_window(Lattice::integers(1), 2.0)),
      LocalMode::direct, kNorm, kAlpha);
  const ComparisonReport s =
      fdd_y_check(*sing, {Point{0}, Point{1}}, {2.0, 3.0}, kNorm, kAlpha, mc, 610);
  CHECK(s.pass);
  CHECK(s.rhs.mean == doctest::Approx(1.0 - std::pow(2.0, -kAlpha)));

  // three-point BR panel
  const ComparisonReport p = fdd_y_check(*theta, {Point{0}, Point{1}, Point{2}},
                                         {1.0, 1.0, 2.0}, kNorm, kAlpha, mc, 620);
  CHECK(p.pass);
}

TEST_CASE("comparisons flip sign when the sides swap") {
  const MCEstimate a{1.02, 0.01, 1000, 0, 0};
  const MCEstimate b{0.99, 0.02, 1000, 0, 0};
  CHECK(compare(a, b, 4.0).z == -compare(b, a, 4.0).z);

  // and the checker is bank-deterministic: same inputs, same report
  auto w = enumerate_window(Lattice::integers(1), 2.0);
  auto s1 = br(w);
  const FunctionalSpec F = FunctionalSpec::integral(1.0);
  const McParams mc{81, 20000, 2};
  const ComparisonReport r1 =
      check_identity_boll(*s1, *s1, F, Point{1}, kNorm, kAlpha, mc, 700);
  const ComparisonReport r2 =
      check_identity_boll(*s1, *s1, F, Point{1}, kNorm, kAlpha, mc, 700);
  CHECK(r1.z == r2.z);
  CHECK(r1.lhs.mean == r2.lhs.mean);
}

TEST_CASE("tail measure variants agree") {
  const Lattice z = Lattice::integers(1);
  const double inf = std::numeric_limits<double>::infinity();
  auto spectral = br(enumerate_window(z, 6.0));
  auto theta = std::make_shared<LocalFieldSampler>(spectral, LocalMode::direct,
                                                   kNorm, kAlpha);
  const McParams mc{91, 60000, 4};

  TailMeasureH H1;
  H1.H = FunctionalSpec::box({Point{0}}, {1.0}, {inf}, "exceed1");
  H1.eps = 1.0;
  H1.k0 = {Point{0}};

  const MCEstimate direct =
      tail_measure_direct(*spectral, H1, kNorm, kAlpha, mc, 800);
  CHECK(std::abs(direct.mean - 1.0) <= 4.0 * direct.se);

  std::vector<Point> K;
  for (std::int64_t k = -3; k <= 3; ++k) K.push_back(Point{k});
  const MCEstimate windowed =
      tail_measure_window_shift(*theta, H1, K, kNorm, kAlpha, mc, 801);
  CHECK(std::abs(windowed.mean - 1.0) <= 4.0 * windowed.se);

  std::vector<Point> supp;
  for (std::int64_t k = -2; k <= 2; ++k) supp.push_back(Point{k});
  const MCEstimate shifted = tail_measure_theta_shift(
      *theta, H1, ShiftDensity::uniform(supp), kNorm, kAlpha, mc, 802);
  CHECK(std::abs(shifted.mean - 1.0) <= 4.0 * shifted.se);

  const ComparisonReport dw = compare(direct, windowed, 4.0);
  const ComparisonReport ds = compare(direct, shifted, 4.0);
  const ComparisonReport ws = compare(windowed, shifted, 4.0);
  CHECK(dw.pass);
  CHECK(ds.pass);
  CHECK(ws.pass);

  // homogeneity: thresholds and the declared eps both scale by 2, and the
  // direct estimator then scales by 2^-alpha replication by replication
  TailMeasureH H2;
  H2.H = FunctionalSpec::box({Point{0}}, {2.0}, {inf}, "exceed2");
  H2.eps = 2.0;
  H2.k0 = {Point{0}};
  const MCEstimate direct2 =
      tail_measure_direct(*spectral, H2, kNorm, kAlpha, mc, 800);
  CHECK(direct2.mean == doctest::Approx(direct.mean * std::pow(2.0, -kAlpha))
                            .epsilon(1e-12));

  // a non-vanishing H violates its contract
  TailMeasureH bad;
  bad.H = FunctionalSpec::integral(1.0);
  bad.eps = 1.0;
  bad.k0 = {Point{0}};
  CHECK_THROWS_AS(tail_measure_direct(*spectral, bad, kNorm, kAlpha, mc, 803),
                  ContractError);
}

TEST_CASE("integrability probe is finite and domain-stable") {
  // geometric weights truncated at growing radii stand in for a declared
  // integrable density; the inner sup radius stays fixed
  auto theta = br_theta(12.0);
  auto truncated = [](std::int64_t radius) {
    std::pair<std::vector<Point>, std::vector<double>> out;
    for (std::int64_t k = -radius; k <= radius; ++k) {
      out.first.push_back(Point{k});
      out.second.push_back(std::pow(0.5, static_cast<double>(std::llabs(k))));
    }
    return out;
  };
  const McParams mc{95, 20000, 4};
  const auto [p4, w4] = truncated(4);
  const auto [p5, w5] = truncated(5);
  const MCEstimate at4 =
      integrability_probe(*theta, p4, w4, 3.0, kNorm, kAlpha, mc, 900);
  const MCEstimate at5 =
      integrability_probe(*theta, p5, w5, 3.0, kNorm, kAlpha, mc, 900);
  CHECK(std::isfinite(at4.mean));
  CHECK(std::isfinite(at5.mean));
  CHECK(std::abs(at5.mean - at4.mean) <= 0.10 * std::abs(at4.mean));
  MESSAGE("integrability probe A=4: ", at4.mean, " A=5: ", at5.mean);
}
