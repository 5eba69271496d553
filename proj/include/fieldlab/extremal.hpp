#pragma once

#include <vector>

#include "fieldlab/maxstable.hpp"

namespace fieldlab {

struct ExtremalPoint {
  double n_or_a = 0;
  MCEstimate value;
};

// Block estimator: n^{-l} E max over [0,n)^l of |Z|^alpha, per n. The
// sampler factory must produce a stationary-law field on each block window.
std::vector<ExtremalPoint> extremal_index_blocks(
    const SamplerFactory& make_stationary, const Lattice& L, double alpha,
    const HomogeneousNorm& norm, const std::vector<double>& n_list,
    const McParams& mc, std::uint32_t ctx);

struct PilResult {
  MCEstimate value;                  // at the largest radius
  std::vector<ExtremalPoint> growth; // estimate per sub-radius (nonincreasing)
  double delta = 1.0;
  double tau = 0.0;
};

// (1/Delta) E[ 1 / sum_{s in window} |Theta(s)|^tau 1{|Y(s)| > 1} ],
// window-truncated; exact in [0, 1/Delta] when tau = 0.
PilResult extremal_index_pil(const FieldSampler& theta, double alpha,
                             double tau, const std::vector<double>& radii,
                             const HomogeneousNorm& norm, const McParams& mc,
                             std::uint32_t ctx);

struct RefinementRow {
  int level = 0;
  double delta = 0;
  long long points = 0;
  MCEstimate value;  // block estimate on the level's lattice, volume-normalized
};

// Nested-refinement study: one simulation on the finest lattice per
// replication, coarser levels read off the same path.
std::vector<RefinementRow> refinement_study(const SamplerFactory& make_sampler,
                                            const Lattice& L, int levels,
                                            double block_n, double alpha,
                                            const HomogeneousNorm& norm,
                                            const McParams& mc,
                                            std::uint32_t ctx);

}  // namespace fieldlab
