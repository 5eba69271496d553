#include "fieldlab/functionals.hpp"

#include <cmath>

namespace fieldlab {

AnchorResult infargsup(const FieldSample& f, const HomogeneousNorm& norm) {
  if (f.size() == 0) throw UsageError("infargsup: empty window");
  double sup = -1.0;
  for (int i = 0; i < f.size(); ++i) sup = std::max(sup, f.norm_at(i, norm));
  // window coords are lex sorted, so the first attaining index is inf
  for (int i = 0; i < f.size(); ++i) {
    if (f.norm_at(i, norm) == sup) return {f.window->coord(i)};
  }
  return {};
}

AnchorResult first_exceedance(const FieldSample& f, const HomogeneousNorm& norm) {
  for (int i = 0; i < f.size(); ++i) {
    if (f.norm_at(i, norm) > 1.0) return {f.window->coord(i)};
  }
  return {};
}

double S_V(const FieldSample& f, const std::vector<Point>& V, double alpha,
           const HomogeneousNorm& norm, double cell_weight) {
  double s = 0.0;
  for (const Point& p : V) s += std::pow(f.norm_at(p, norm), alpha);
  return s * cell_weight;
}

double B_V_tau(const FieldSample& f, const std::vector<Point>& V, double tau,
               const HomogeneousNorm& norm, double cell_weight) {
  double s = 0.0;
  for (const Point& p : V) {
    const double v = f.norm_at(p, norm);
    if (v >= 1.0) s += std::pow(v, tau);
  }
  return s * cell_weight;
}

namespace {

AnchorResult apply(AnchorKind kind, const FieldSample& f,
                   const HomogeneousNorm& norm) {
  return kind == AnchorKind::infargsup ? infargsup(f, norm)
                                       : first_exceedance(f, norm);
}

FieldSample scaled(const FieldSample& f, double c) {
  FieldSample g = f;
  g.values *= c;
  return g;
}

FieldSample shifted(const FieldSample& f, const Point& j) {
  FieldSample g = f;
  g.window = f.window->translated(j);
  return g;
}

void note(AxiomReport& rep, std::size_t cap, AxiomWitness w) {
  if (rep.witnesses.size() < cap) rep.witnesses.push_back(std::move(w));
}

std::string loc_str(const AnchorResult& r) {
  return r.finite() ? point_to_string(*r.location) : std::string("inf");
}

}  // namespace

AxiomReport axiom_check(AnchorKind kind, const std::vector<FieldSample>& corpus,
                        const std::vector<Point>& shifts,
                        const std::vector<double>& scales,
                        const HomogeneousNorm& norm, std::size_t witness_cap) {
  AxiomReport rep;
  for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
    const FieldSample& f = corpus[fi];
    const AnchorResult base = apply(kind, f, norm);

    if (base.finite()) {
      const Point& j = *base.location;
      const double vj = f.norm_at(j, norm);
      const double v0 = f.window->has_origin()
                            ? f.norm_at(f.window->origin_index(), norm)
                            : 0.0;
      ++rep.a3.checked;
      if (!(vj > 0.0)) {
        ++rep.a3.failed;
        note(rep, witness_cap,
             {"a3", static_cast<int>(fi), j, 1.0, "value 0 at location"});
      }
      ++rep.a2.checked;
      if (!(vj > std::min(1.0, v0))) {
        ++rep.a2.failed;
        note(rep, witness_cap,
             {"a2", static_cast<int>(fi), j, 1.0,
              "value does not exceed min(1, |f(0)|)"});
      }
    }

    for (const Point& j : shifts) {
      const AnchorResult moved = apply(kind, shifted(f, j), norm);
      ++rep.a1.checked;
      const bool ok =
          moved.finite() == base.finite() &&
          (!base.finite() || *moved.location == add(*base.location, j));
      if (!ok) {
        ++rep.a1.failed;
        note(rep, witness_cap,
             {"a1", static_cast<int>(fi), j, 1.0,
              "J(B^j f)=" + loc_str(moved) + " vs J(f)+j"});
      }
    }

    for (double c : scales) {
      const AnchorResult s = apply(kind, scaled(f, c), norm);
      ++rep.hom0.checked;
      const bool ok = s.finite() == base.finite() &&
                      (!base.finite() || *s.location == *base.location);
      if (!ok) {
        ++rep.hom0.failed;
        note(rep, witness_cap,
             {"hom0", static_cast<int>(fi), Point(), c,
              "location " + loc_str(base) + " -> " + loc_str(s) +
                  " under scale"});
      }
    }
  }
  return rep;
}

std::vector<EventProbeRow> event_probe(const FieldSampler& y,
                                       const std::vector<double>& radii,
                                       double m_threshold, double tau,
                                       const HomogeneousNorm& norm,
                                       double alpha, const McParams& mc,
                                       std::uint32_t ctx) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw UsageError("event probe: radii must be increasing");
  const Window& w = y.window();
  struct Sets {
    std::vector<Point> box;
    std::vector<Point> annulus;
  };
  std::vector<Sets> sets(radii.size());
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double a = radii[ri];
    for (int i : subwindow_indices(w, a)) sets[ri].box.push_back(w.coord(i));
    for (const Point& p : sets[ri].box) {
      const double l1 = static_cast<double>(l1_norm(p));
      if (l1 >= a / 2.0) sets[ri].annulus.push_back(p);
    }
    if (sets[ri].box.empty())
      throw UsageError("event probe: window smaller than probe radius");
  }
  const std::size_t k = radii.size() * 3;
  const std::vector<MCEstimate> cols = run_mc_multi(
      [&](RngStream& rng, std::span<double> out) {
        WeightedField wf = y.sample(rng);
        for (std::size_t ri = 0; ri < radii.size(); ++ri) {
          const double s = S_V(wf.field, sets[ri].box, alpha, norm);
          const double b = B_V_tau(wf.field, sets[ri].box, tau, norm);
          double far = 0.0;
          for (const Point& p : sets[ri].annulus)
            far = std::max(far, wf.field.norm_at(p, norm));
          out[ri * 3 + 0] = s < m_threshold ? 1.0 : 0.0;
          out[ri * 3 + 1] = b < m_threshold ? 1.0 : 0.0;
          out[ri * 3 + 2] = far < 1.0 ? 1.0 : 0.0;
        }
      },
      k, mc, ctx);
  std::vector<EventProbeRow> rows;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    EventProbeRow row;
    row.radius = radii[ri];
    row.frac_s_below = cols[ri * 3 + 0].mean;
    row.frac_b_below = cols[ri * 3 + 1].mean;
    row.frac_far_small = cols[ri * 3 + 2].mean;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fieldlab
