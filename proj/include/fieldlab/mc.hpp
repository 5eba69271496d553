#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fieldlab/rng.hpp"

namespace fieldlab {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MCEstimate {
  double mean = 0.0;
  double se = 0.0;
  long long reps = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct ComparisonReport {
  MCEstimate lhs;
  MCEstimate rhs;
  double z = 0.0;
  double z_crit = 4.0;
  bool pass = false;
};

struct McParams {
  std::uint64_t seed = 0;
  long long reps = 10000;
  int workers = 1;
  double z_crit = 4.0;
};

struct WeightedValue {
  double value = 0.0;
  double weight = 1.0;
};

// Numerically stable summation (pairwise).
double pairwise_sum(std::span<const double> v);

// Runs `reps` independent replications; replication i draws everything from
// the stream (seed, substream_id(ctx, i)). Output bits do not depend on the
// worker count. Replications that throw are counted and fail the run.
MCEstimate run_mc(const std::function<double(RngStream&)>& estimator,
                  const McParams& mc, std::uint32_t ctx);

// Weight-normalized mean  sum(w*v)/sum(w)  with a delta-method standard
// error. With unit weights this reduces exactly to run_mc.
MCEstimate run_mc_weighted(
    const std::function<WeightedValue(RngStream&)>& estimator,
    const McParams& mc, std::uint32_t ctx);

// One replication fills k outputs; returns one estimate per column.
std::vector<MCEstimate> run_mc_multi(
    const std::function<void(RngStream&, std::span<double>)>& estimator,
    std::size_t k, const McParams& mc, std::uint32_t ctx);

// Two-sample z comparison; requires independent replication banks.
ComparisonReport compare(const MCEstimate& lhs, const MCEstimate& rhs,
                         double z_crit);

}  // namespace fieldlab
