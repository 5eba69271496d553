#include "fieldlab/runner.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "fieldlab/extremal.hpp"
#include "fieldlab/functionals.hpp"
#include "fieldlab/text.hpp"

namespace fieldlab {

namespace {

// fixed context bases keep every subcommand's substreams disjoint
constexpr std::uint32_t kCtxSimBr = 0x0100;
constexpr std::uint32_t kCtxSimMax = 0x0200;
constexpr std::uint32_t kCtxIdentity = 0x0300;
constexpr std::uint32_t kCtxTail = 0x0400;
constexpr std::uint32_t kCtxFdd = 0x0500;
constexpr std::uint32_t kCtxExtremal = 0x0600;
constexpr std::uint32_t kCtxRefine = 0x0700;
constexpr std::uint32_t kCtxAxioms = 0x0800;
constexpr std::uint32_t kCtxTailMeasure = 0x0900;

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / (name + ".csv")).string();
}

std::string pass_str(bool p) { return p ? "PASS" : "FAIL"; }

void comparison_row(CsvWriter& csv, const std::string& test_id,
                    const ComparisonReport& rep) {
  csv.row({test_id, CsvWriter::num(rep.lhs.mean), CsvWriter::num(rep.lhs.se),
           CsvWriter::num(rep.rhs.mean), CsvWriter::num(rep.rhs.se),
           CsvWriter::num(rep.z), rep.pass ? "1" : "0"});
}

const std::vector<std::string> kComparisonHeader = {
    "test_id", "lhs_mean", "lhs_se", "rhs_mean", "rhs_se", "z", "pass"};

bool origin_normalized(const ExperimentConfig& cfg) {
  using MK = ExperimentConfig::ModelKind;
  switch (cfg.model_kind) {
    case MK::br:
    case MK::singleton:
    case MK::geometric:
      return true;
    case MK::constant:
      return cfg.synthetic.values.size() == 1 &&
             cfg.synthetic.values[0] == 1.0;
  }
  return false;
}

std::shared_ptr<const LocalFieldSampler> make_local(
    const ExperimentConfig& cfg, std::shared_ptr<const Window> w) {
  const LocalMode mode =
      origin_normalized(cfg) ? LocalMode::direct : LocalMode::weighted;
  return std::make_shared<LocalFieldSampler>(cfg.make_sampler(std::move(w)),
                                             mode, cfg.norm(), cfg.alpha());
}

// Stationary-law sampler on a block window. Origin-pinned fields are
// randomly shifted over the block with the sum normalizer; besides
// restoring stationarity this bounds the block maximum by the support
// size, which keeps the estimator's variance finite.
SamplerFactory stationary_factory(const ExperimentConfig& cfg) {
  return [&cfg](std::shared_ptr<const Window> block)
             -> std::shared_ptr<const FieldSampler> {
    if (cfg.model_kind == ExperimentConfig::ModelKind::constant)
      return cfg.make_sampler(std::move(block));  // already shift-inert
    double extent = 0.0;
    for (int i = 0; i < block->size(); ++i)
      extent = std::max(extent, block->embedded().row(i).cwiseAbs().maxCoeff());
    auto base_window = enumerate_window(cfg.lattice(), std::max(1.0, extent));
    auto base = cfg.make_sampler(base_window);
    const ShiftDensity pn = ShiftDensity::uniform(block->coords());
    return std::make_shared<RandomShiftSampler>(
        base, pn, ShiftVariant::normalized_sum, std::move(block), cfg.norm(),
        cfg.alpha());
  };
}

std::vector<std::pair<std::string, FunctionalSpec>> functionals_or_default(
    const ExperimentConfig& cfg) {
  if (!cfg.functionals.empty()) return cfg.functionals;
  const Point origin(static_cast<std::size_t>(cfg.lattice_dim()), 0);
  std::vector<std::pair<std::string, FunctionalSpec>> out;
  out.emplace_back("one", FunctionalSpec::constant_one("one"));
  out.emplace_back("box0", FunctionalSpec::box({origin}, {1.0},
                                               {std::numeric_limits<double>::infinity()},
                                               "box0"));
  const double r = std::min(2.0, cfg.window_radius);
  out.emplace_back("integral", FunctionalSpec::integral(r, "integral"));
  return out;
}

RunResult run_simulate_br(const ExperimentConfig& cfg) {
  RunResult res;
  auto window = enumerate_window(cfg.lattice(), cfg.window_radius);
  auto sampler = cfg.make_sampler(window);
  std::vector<std::string> header{"rep"};
  for (int i = 0; i < cfg.lattice_dim(); ++i)
    header.push_back("k" + std::to_string(i));
  for (int c = 0; c < cfg.field_dim(); ++c)
    header.push_back("v" + std::to_string(c));
  CsvWriter csv(out_path(cfg, "simulate-br"), "fieldlab simulate-br v1", header);
  for (long long rep = 0; rep < cfg.mc.reps; ++rep) {
    RngStream rng(cfg.mc.seed, substream_id(kCtxSimBr, static_cast<std::uint64_t>(rep)));
    const WeightedField wf = sampler->sample(rng);
    for (int t = 0; t < wf.field.size(); ++t) {
      std::vector<std::string> cells{CsvWriter::num(rep)};
      for (std::int64_t k : window->coord(t))
        cells.push_back(CsvWriter::num(static_cast<long long>(k)));
      for (int c = 0; c < wf.field.dim(); ++c)
        cells.push_back(CsvWriter::num(wf.field.values(t, c)));
      csv.row(cells);
    }
  }
  res.csv_files.push_back(csv.path());
  res.summary.push_back("simulate-br points=" + std::to_string(window->size()) +
                        " reps=" + std::to_string(cfg.mc.reps) + " OK");
  return res;
}

RunResult run_simulate_maxstable(const ExperimentConfig& cfg) {
  RunResult res;
  auto window = enumerate_window(cfg.lattice(), cfg.window_radius);
  auto spectral = cfg.make_sampler(window);
  DeHaanSimulator sim(spectral, cfg.norm(), cfg.alpha(), cfg.dehaan,
                      cfg.mc.seed, kCtxSimMax + 1);
  std::vector<std::string> header{"rep"};
  for (int i = 0; i < cfg.lattice_dim(); ++i)
    header.push_back("k" + std::to_string(i));
  header.insert(header.end(), {"x", "terms_used", "truncated"});
  CsvWriter csv(out_path(cfg, "simulate-maxstable"),
                "fieldlab simulate-maxstable v1", header);
  long long truncated = 0;
  for (long long rep = 0; rep < cfg.mc.reps; ++rep) {
    RngStream rng(cfg.mc.seed, substream_id(kCtxSimMax, static_cast<std::uint64_t>(rep)));
    const MaxStableDraw draw = sim.sample(rng);
    truncated += draw.truncated ? 1 : 0;
    for (int t = 0; t < window->size(); ++t) {
      std::vector<std::string> cells{CsvWriter::num(rep)};
      for (std::int64_t k : window->coord(t))
        cells.push_back(CsvWriter::num(static_cast<long long>(k)));
      cells.push_back(CsvWriter::num(draw.x[t]));
      cells.push_back(CsvWriter::num(static_cast<long long>(draw.terms)));
      cells.push_back(draw.truncated ? "1" : "0");
      csv.row(cells);
    }
  }
  res.csv_files.push_back(csv.path());
  std::ostringstream line;
  line << "simulate-maxstable reps=" << cfg.mc.reps << " q_hat="
       << fmt_double(sim.q_hat(), 6) << " truncated=" << truncated << " OK";
  res.summary.push_back(line.str());
  return res;
}

RunResult run_check_identity(const ExperimentConfig& cfg) {
  RunResult res;
  const Lattice L = cfg.lattice();
  const double base_radius = cfg.window_radius + cfg.test.shift_radius;
  auto base = cfg.make_sampler(enumerate_window(L, base_radius));
  auto out_window = enumerate_window(L, cfg.window_radius);
  std::vector<Point> support;
  for (int i : subwindow_indices(*base->window_ptr(), cfg.test.shift_radius))
    support.push_back(base->window().coord(i));
  const ShiftVariant variant = cfg.test.variant == "iii"
                                   ? ShiftVariant::pareto_max
                                   : ShiftVariant::normalized_sum;
  auto shifted = std::make_shared<RandomShiftSampler>(
      base, ShiftDensity::uniform(support), variant, out_window, cfg.norm(),
      cfg.alpha());

  CsvWriter csv(out_path(cfg, "check-identity"), "fieldlab check-identity v1",
                kComparisonHeader);
  std::uint32_t ctx = kCtxIdentity;
  bool all_pass = true;
  for (const auto& [name, F] : functionals_or_default(cfg)) {
    for (const Point& h : cfg.test.h_list) {
      const ComparisonReport rep = check_identity_boll(
          *base, *shifted, F, h, cfg.norm(), cfg.alpha(), cfg.mc, ctx);
      ctx += 2;
      const std::string id =
          "eq-boll h=" + point_to_string(h) + " F=" + name;
      comparison_row(csv, id, rep);
      res.summary.push_back(id + " " + pass_str(rep.pass) +
                            " z=" + fmt_double(rep.z, 4));
      all_pass = all_pass && rep.pass;
    }
  }
  res.csv_files.push_back(csv.path());
  res.exit_code = all_pass ? 0 : 1;
  return res;
}

RunResult run_check_tail(const ExperimentConfig& cfg) {
  RunResult res;
  auto theta =
      make_local(cfg, enumerate_window(cfg.lattice(), cfg.window_radius));
  auto y = std::make_shared<TailFieldSampler>(theta, cfg.alpha());
  CsvWriter csv(out_path(cfg, "check-tail"), "fieldlab check-tail v1",
                kComparisonHeader);
  std::uint32_t ctx = kCtxTail;
  bool all_pass = true;
  for (const auto& [name, G] : functionals_or_default(cfg)) {
    for (const Point& h : cfg.test.h_list) {
      for (double x : cfg.test.x_list) {
        const ComparisonReport rep = check_tail_identity(
            *y, G, h, x, cfg.norm(), cfg.alpha(), cfg.mc, ctx);
        ctx += 2;
        const std::string id = "eq-tYY h=" + point_to_string(h) +
                               " x=" + fmt_double(x, 6) + " G=" + name;
        comparison_row(csv, id, rep);
        res.summary.push_back(id + " " + pass_str(rep.pass) +
                              " z=" + fmt_double(rep.z, 4));
        all_pass = all_pass && rep.pass;
      }
    }
  }
  res.csv_files.push_back(csv.path());
  res.exit_code = all_pass ? 0 : 1;
  return res;
}

RunResult run_fdd_check(const ExperimentConfig& cfg) {
  RunResult res;
  auto theta =
      make_local(cfg, enumerate_window(cfg.lattice(), cfg.window_radius));
  if (cfg.test.points.size() != cfg.test.x_list.size())
    throw UsageError("fdd-check: test.points and test.x_list must have equal length");
  CsvWriter csv(out_path(cfg, "fdd-check"), "fieldlab fdd-check v1",
                kComparisonHeader);
  const ComparisonReport rep =
      fdd_y_check(*theta, cfg.test.points, cfg.test.x_list, cfg.norm(),
                  cfg.alpha(), cfg.mc, kCtxFdd);
  const std::string id =
      "eq-eB n=" + std::to_string(cfg.test.points.size());
  comparison_row(csv, id, rep);
  res.summary.push_back(id + " " + pass_str(rep.pass) +
                        " z=" + fmt_double(rep.z, 4));
  res.csv_files.push_back(csv.path());
  res.exit_code = rep.pass ? 0 : 1;
  return res;
}

RunResult run_extremal_index(const ExperimentConfig& cfg) {
  RunResult res;
  const Lattice L = cfg.lattice();
  CsvWriter csv(out_path(cfg, "extremal-index"), "fieldlab extremal-index v1",
                {"method", "lattice_delta", "n_or_a", "estimate", "se", "reps"});
  const bool do_blocks = cfg.test.method != "pil";
  const bool do_pil = cfg.test.method != "blocks";
  std::vector<ExtremalPoint> blocks;
  PilResult pil;
  if (do_blocks) {
    blocks = extremal_index_blocks(stationary_factory(cfg), L, cfg.alpha(),
                                   cfg.norm(), cfg.test.n_list, cfg.mc,
                                   kCtxExtremal);
    for (const ExtremalPoint& pt : blocks) {
      csv.row({"blocks", CsvWriter::num(L.delta()), CsvWriter::num(pt.n_or_a),
               CsvWriter::num(pt.value.mean), CsvWriter::num(pt.value.se),
               CsvWriter::num(pt.value.reps)});
      res.summary.push_back("eq-nu n=" + fmt_double(pt.n_or_a, 6) +
                            " est=" + fmt_double(pt.value.mean, 6) + " se=" +
                            fmt_double(pt.value.se, 4));
    }
  }
  if (do_pil) {
    auto theta = make_local(cfg, enumerate_window(L, cfg.test.pil_radius));
    std::vector<double> radii;
    for (double a : {0.25, 0.5, 0.75, 1.0}) {
      const double r = a * cfg.test.pil_radius;
      if (r >= 1.0) radii.push_back(r);
    }
    pil = extremal_index_pil(*theta, cfg.alpha(), cfg.test.tau, radii,
                             cfg.norm(), cfg.mc, kCtxExtremal + 0x40);
    for (const ExtremalPoint& pt : pil.growth) {
      csv.row({"pil", CsvWriter::num(L.delta()), CsvWriter::num(pt.n_or_a),
               CsvWriter::num(pt.value.mean), CsvWriter::num(pt.value.se),
               CsvWriter::num(pt.value.reps)});
    }
    res.summary.push_back("eq-pil a=" + fmt_double(cfg.test.pil_radius, 6) +
                          " est=" + fmt_double(pil.value.mean, 6) + " se=" +
                          fmt_double(pil.value.se, 4));
  }
  res.exit_code = 0;
  if (do_blocks && do_pil) {
    const ComparisonReport rep =
        compare(blocks.back().value, pil.value, cfg.mc.z_crit);
    res.summary.push_back("eq-nu-vs-pil " + std::string(pass_str(rep.pass)) +
                          " z=" + fmt_double(rep.z, 4));
    res.exit_code = rep.pass ? 0 : 1;
  }
  res.csv_files.push_back(csv.path());
  return res;
}

RunResult run_refine_study(const ExperimentConfig& cfg) {
  RunResult res;
  const Lattice L = cfg.lattice();
  auto factory = [&cfg](std::shared_ptr<const Window> w) {
    return cfg.make_sampler(std::move(w));
  };
  const std::vector<RefinementRow> rows =
      refinement_study(factory, L, cfg.test.levels, cfg.test.block,
                       cfg.alpha(), cfg.norm(), cfg.mc, kCtxRefine);
  CsvWriter csv(out_path(cfg, "refine-study"), "fieldlab refine-study v1",
                {"level", "lattice_delta", "points", "estimate", "se", "reps"});
  for (const RefinementRow& row : rows) {
    csv.row({CsvWriter::num(static_cast<long long>(row.level)),
             CsvWriter::num(row.delta), CsvWriter::num(row.points),
             CsvWriter::num(row.value.mean), CsvWriter::num(row.value.se),
             CsvWriter::num(row.value.reps)});
  }
  res.csv_files.push_back(csv.path());
  bool pass = true;
  if (rows.size() >= 2) {
    const double last = rows.back().value.mean;
    const double prev = rows[rows.size() - 2].value.mean;
    const double drift = prev != 0 ? std::abs(last - prev) / std::abs(prev) : 0;
    pass = drift < 0.10;
    res.summary.push_back("eq-3mace levels=" + std::to_string(cfg.test.levels) +
                          " est=" + fmt_double(last, 6) + " drift=" +
                          fmt_double(drift, 4) + " " + pass_str(pass));
  }
  res.exit_code = pass ? 0 : 1;
  return res;
}

RunResult run_functional_axioms(const ExperimentConfig& cfg) {
  RunResult res;
  // tail-field corpus: |Y(0)| > 1 keeps the anchoring inequality off its
  // boundary (fields pinned at exactly 1 would sit on it)
  auto theta =
      make_local(cfg, enumerate_window(cfg.lattice(), cfg.window_radius));
  const TailFieldSampler y(theta, cfg.alpha());
  std::vector<FieldSample> corpus;
  const long long corpus_size = std::min<long long>(cfg.mc.reps, 5000);
  corpus.reserve(static_cast<std::size_t>(corpus_size));
  for (long long i = 0; i < corpus_size; ++i) {
    RngStream rng(cfg.mc.seed, substream_id(kCtxAxioms, static_cast<std::uint64_t>(i)));
    corpus.push_back(y.sample(rng).field);
  }
  std::vector<Point> shifts;
  const auto sw = enumerate_window(cfg.lattice(), cfg.test.shift_radius);
  for (const Point& p : sw->coords()) shifts.push_back(p);
  const std::vector<double>& scales = cfg.test.x_list;

  CsvWriter csv(out_path(cfg, "functional-axioms"),
                "fieldlab functional-axioms v1",
                {"anchor", "axiom", "checked", "failed", "witness"});
  bool hard_pass = true;
  for (AnchorKind kind : {AnchorKind::infargsup, AnchorKind::first_exceedance}) {
    const std::string anchor =
        kind == AnchorKind::infargsup ? "infargsup" : "first_exceedance";
    const AxiomReport rep =
        axiom_check(kind, corpus, shifts, scales, cfg.norm());
    auto witness_for = [&](const std::string& ax) {
      for (const AxiomWitness& w : rep.witnesses)
        if (w.axiom == ax)
          return "field " + std::to_string(w.field_index) + " scale " +
                 fmt_double(w.scale, 4) + " shift " + point_to_string(w.shift) +
                 ": " + w.detail;
      return std::string();
    };
    const std::pair<std::string, AxiomCounts> axes[] = {
        {"a1", rep.a1}, {"a2", rep.a2}, {"a3", rep.a3}, {"hom0", rep.hom0}};
    for (const auto& [ax, counts] : axes) {
      std::string wtn = witness_for(ax);
      for (char& c : wtn)
        if (c == ',') c = ';';
      csv.row({anchor, ax, CsvWriter::num(counts.checked),
               CsvWriter::num(counts.failed), wtn});
    }
    // 0-homogeneity is not expected of the first-exceedance map
    const bool must_pass = kind == AnchorKind::infargsup
                               ? rep.all_pass()
                               : rep.a1.failed == 0 && rep.a2.failed == 0 &&
                                     rep.a3.failed == 0;
    hard_pass = hard_pass && must_pass;
    std::ostringstream line;
    line << "axioms " << anchor << " a1 " << rep.a1.failed << "/"
         << rep.a1.checked << " a2 " << rep.a2.failed << "/" << rep.a2.checked
         << " a3 " << rep.a3.failed << "/" << rep.a3.checked << " hom0 "
         << rep.hom0.failed << "/" << rep.hom0.checked << " "
         << pass_str(must_pass);
    res.summary.push_back(line.str());
  }
  res.csv_files.push_back(csv.path());
  res.exit_code = hard_pass ? 0 : 1;
  return res;
}

RunResult run_tail_measure(const ExperimentConfig& cfg) {
  RunResult res;
  const Lattice L = cfg.lattice();
  auto spectral = cfg.make_sampler(enumerate_window(L, cfg.window_radius));
  auto theta = make_local(cfg, enumerate_window(L, cfg.window_radius));

  std::vector<Point> K;
  {
    const double k_rad = std::max(1.0, std::floor(cfg.window_radius / 2.0));
    const auto kw = enumerate_window(L, k_rad);
    K = kw->coords();
  }
  std::vector<Point> support;
  for (int i : subwindow_indices(theta->window(), cfg.test.shift_radius))
    support.push_back(theta->window().coord(i));
  const ShiftDensity pn = ShiftDensity::uniform(support);

  CsvWriter csv(out_path(cfg, "tail-measure"), "fieldlab tail-measure v1",
                kComparisonHeader);
  std::uint32_t ctx = kCtxTailMeasure;
  bool all_pass = true;
  for (const auto& [name, F] : functionals_or_default(cfg)) {
    if (F.kind != FunctionalKind::indicator_box) continue;
    TailMeasureH H;
    H.H = F;
    H.eps = cfg.test.eps;
    H.k0 = cfg.test.k0.empty() ? F.points : cfg.test.k0;
    const MCEstimate direct = tail_measure_direct(*spectral, H, cfg.norm(),
                                                  cfg.alpha(), cfg.mc, ctx++);
    const MCEstimate windowed = tail_measure_window_shift(
        *theta, H, K, cfg.norm(), cfg.alpha(), cfg.mc, ctx++);
    const MCEstimate shifted = tail_measure_theta_shift(
        *theta, H, pn, cfg.norm(), cfg.alpha(), cfg.mc, ctx++);
    const std::pair<std::string, ComparisonReport> pairs[] = {
        {"direct-vs-bizha", compare(direct, windowed, cfg.mc.z_crit)},
        {"direct-vs-ninjae", compare(direct, shifted, cfg.mc.z_crit)},
        {"bizha-vs-ninjae", compare(windowed, shifted, cfg.mc.z_crit)}};
    for (const auto& [tag, rep] : pairs) {
      const std::string id = "eq-tailmeasure H=" + name + " " + tag;
      comparison_row(csv, id, rep);
      res.summary.push_back(id + " " + pass_str(rep.pass) +
                            " z=" + fmt_double(rep.z, 4));
      all_pass = all_pass && rep.pass;
    }
  }
  res.csv_files.push_back(csv.path());
  res.exit_code = all_pass ? 0 : 1;
  return res;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {
      "simulate-br",    "simulate-maxstable", "check-identity",
      "check-tail",     "fdd-check",          "extremal-index",
      "refine-study",   "functional-axioms",  "tail-measure"};
  return names;
}

RunResult run_subcommand(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "simulate-br") return run_simulate_br(cfg);
  if (name == "simulate-maxstable") return run_simulate_maxstable(cfg);
  if (name == "check-identity") return run_check_identity(cfg);
  if (name == "check-tail") return run_check_tail(cfg);
  if (name == "fdd-check") return run_fdd_check(cfg);
  if (name == "extremal-index") return run_extremal_index(cfg);
  if (name == "refine-study") return run_refine_study(cfg);
  if (name == "functional-axioms") return run_functional_axioms(cfg);
  if (name == "tail-measure") return run_tail_measure(cfg);
  throw UsageError("unknown subcommand: " + name);
}

}  // namespace fieldlab
