#include "fieldlab/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace fieldlab {

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

namespace {

struct ShardError {
  long long count = 0;
  std::string first;
};

// Fills values[i] (and optionally weights[i]) for i in [0, reps) using one
// substream per replication; sharding over workers never changes which
// stream a replication uses.
template <typename Fill>
ShardError parallel_fill(long long reps, int workers, const Fill& fill) {
  workers = std::max(1, workers);
  ShardError err;
  std::mutex err_mu;
  auto run_range = [&](long long lo, long long hi) {
    for (long long i = lo; i < hi; ++i) {
      try {
        fill(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (err.count == 0) err.first = e.what();
        ++err.count;
      }
    }
  };
  if (workers == 1 || reps < 2 * workers) {
    run_range(0, reps);
    return err;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const long long chunk = (reps + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long long lo = w * chunk;
    const long long hi = std::min(reps, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(run_range, lo, hi);
  }
  for (auto& t : pool) t.join();
  return err;
}

MCEstimate finish(double mean, double se, long long reps) {
  MCEstimate e;
  e.mean = mean;
  e.se = se;
  e.reps = reps;
  e.ci_lo = mean - 1.96 * se;
  e.ci_hi = mean + 1.96 * se;
  return e;
}

void check_params(const McParams& mc) {
  if (mc.reps < 2) throw UsageError("run_mc: reps must be >= 2");
  if (mc.reps > 0xffffffffLL) throw UsageError("run_mc: reps must fit 32 bits");
}

}  // namespace

MCEstimate run_mc(const std::function<double(RngStream&)>& estimator,
                  const McParams& mc, std::uint32_t ctx) {
  check_params(mc);
  std::vector<double> values(static_cast<std::size_t>(mc.reps));
  const ShardError err =
      parallel_fill(mc.reps, mc.workers, [&](long long i) {
        RngStream rng(mc.seed, substream_id(ctx, static_cast<std::uint64_t>(i)));
        values[static_cast<std::size_t>(i)] = estimator(rng);
      });
  if (err.count > 0)
    throw ContractError("run_mc: " + std::to_string(err.count) +
                        " replication(s) failed; first: " + err.first);
  const double n = static_cast<double>(mc.reps);
  const double mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / (n - 1.0);
  return finish(mean, std::sqrt(var / n), mc.reps);
}

MCEstimate run_mc_weighted(
    const std::function<WeightedValue(RngStream&)>& estimator,
    const McParams& mc, std::uint32_t ctx) {
  check_params(mc);
  const std::size_t n = static_cast<std::size_t>(mc.reps);
  std::vector<double> num(n), den(n);
  const ShardError err =
      parallel_fill(mc.reps, mc.workers, [&](long long i) {
        RngStream rng(mc.seed, substream_id(ctx, static_cast<std::uint64_t>(i)));
        const WeightedValue wv = estimator(rng);
        num[static_cast<std::size_t>(i)] = wv.weight * wv.value;
        den[static_cast<std::size_t>(i)] = wv.weight;
      });
  if (err.count > 0)
    throw ContractError("run_mc_weighted: " + std::to_string(err.count) +
                        " replication(s) failed; first: " + err.first);
  const double nn = static_cast<double>(mc.reps);
  const double mn = pairwise_sum(num) / nn;
  const double md = pairwise_sum(den) / nn;
  if (md == 0.0)
    throw ContractError("run_mc_weighted: all weights are zero");
  const double r = mn / md;
  std::vector<double> snn(n), snd(n), sdd(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dn = num[i] - mn;
    const double dd = den[i] - md;
    snn[i] = dn * dn;
    snd[i] = dn * dd;
    sdd[i] = dd * dd;
  }
  const double vnn = pairwise_sum(snn) / (nn - 1.0);
  const double vnd = pairwise_sum(snd) / (nn - 1.0);
  const double vdd = pairwise_sum(sdd) / (nn - 1.0);
  double v = (vnn - 2.0 * r * vnd + r * r * vdd) / (md * md);
  v = std::max(v, 0.0);
  return finish(r, std::sqrt(v / nn), mc.reps);
}

std::vector<MCEstimate> run_mc_multi(
    const std::function<void(RngStream&, std::span<double>)>& estimator,
    std::size_t k, const McParams& mc, std::uint32_t ctx) {
  check_params(mc);
  if (k == 0) return {};
  const std::size_t n = static_cast<std::size_t>(mc.reps);
  std::vector<double> values(n * k);
  const ShardError err =
      parallel_fill(mc.reps, mc.workers, [&](long long i) {
        RngStream rng(mc.seed, substream_id(ctx, static_cast<std::uint64_t>(i)));
        estimator(rng, std::span<double>(&values[static_cast<std::size_t>(i) * k], k));
      });
  if (err.count > 0)
    throw ContractError("run_mc_multi: " + std::to_string(err.count) +
                        " replication(s) failed; first: " + err.first);
  std::vector<MCEstimate> out;
  out.reserve(k);
  std::vector<double> col(n), sq(n);
  const double nn = static_cast<double>(mc.reps);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = values[i * k + j];
    const double mean = pairwise_sum(col) / nn;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = col[i] - mean;
      sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / (nn - 1.0);
    out.push_back(finish(mean, std::sqrt(var / nn), mc.reps));
  }
  return out;
}

ComparisonReport compare(const MCEstimate& lhs, const MCEstimate& rhs,
                         double z_crit) {
  ComparisonReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.z_crit = z_crit;
  const double denom = std::sqrt(lhs.se * lhs.se + rhs.se * rhs.se);
  if (denom == 0.0) {
    if (lhs.mean == rhs.mean) {
      r.z = 0.0;
      r.pass = true;
    } else {
      r.z = lhs.mean > rhs.mean ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
      r.pass = false;
    }
    return r;
  }
  r.z = (lhs.mean - rhs.mean) / denom;
  r.pass = std::abs(r.z) <= z_crit;
  return r;
}

}  // namespace fieldlab
