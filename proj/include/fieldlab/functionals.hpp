#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fieldlab/core.hpp"
#include "fieldlab/maxstable.hpp"

namespace fieldlab {

// Lattice location, or none when the defining set is empty.
struct AnchorResult {
  std::optional<Point> location;
  bool finite() const { return location.has_value(); }
};

// Lex-smallest window point attaining sup |f|; never empty on a nonempty
// window.
AnchorResult infargsup(const FieldSample& f, const HomogeneousNorm& norm);

// Lex-smallest window point with |f(j)| > 1.
AnchorResult first_exceedance(const FieldSample& f, const HomogeneousNorm& norm);

// sum_{t in V} |f(t)|^alpha * w  and  sum_{t in V} |f(t)|^tau 1{|f(t)| >= 1} * w
double S_V(const FieldSample& f, const std::vector<Point>& V, double alpha,
           const HomogeneousNorm& norm, double cell_weight = 1.0);
double B_V_tau(const FieldSample& f, const std::vector<Point>& V, double tau,
               const HomogeneousNorm& norm, double cell_weight = 1.0);

enum class AnchorKind { infargsup, first_exceedance };

struct AxiomWitness {
  std::string axiom;
  int field_index = 0;
  Point shift;
  double scale = 1.0;
  std::string detail;
};

struct AxiomCounts {
  long long checked = 0;
  long long failed = 0;
};

struct AxiomReport {
  AxiomCounts a1;    // shift equivariance
  AxiomCounts a2;    // |f(j)| > min(1, |f(0)|)
  AxiomCounts a3;    // |f(j)| > 0
  AxiomCounts hom0;  // location invariant under positive scaling
  long long skipped = 0;
  std::vector<AxiomWitness> witnesses;  // capped

  bool all_pass() const {
    return a1.failed == 0 && a2.failed == 0 && a3.failed == 0 &&
           hom0.failed == 0;
  }
};

AxiomReport axiom_check(AnchorKind kind, const std::vector<FieldSample>& corpus,
                        const std::vector<Point>& shifts,
                        const std::vector<double>& scales,
                        const HomogeneousNorm& norm,
                        std::size_t witness_cap = 16);

struct EventProbeRow {
  double radius = 0;
  double frac_s_below = 0;    // S_{[-a,a]}(Y) < M
  double frac_b_below = 0;    // B_{[-a,a],tau}(Y) < M
  double frac_far_small = 0;  // sup over a/2 <= |t|_1 <= a of |Y| < 1
};

// Finite-window drift table; no pass/fail semantics.
std::vector<EventProbeRow> event_probe(const FieldSampler& y,
                                       const std::vector<double>& radii,
                                       double m_threshold, double tau,
                                       const HomogeneousNorm& norm,
                                       double alpha, const McParams& mc,
                                       std::uint32_t ctx);

}  // namespace fieldlab
