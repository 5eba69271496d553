#pragma once

#include <memory>
#include <vector>

#include "fieldlab/core.hpp"

namespace fieldlab {

// Closed-form discrete fields used as oracles.
struct SyntheticSpec {
  enum class Kind { singleton, geometric_decay, constant } kind = Kind::singleton;
  double rho = 0.5;  // geometric_decay
  // constant: discrete law of |Z(0)|
  std::vector<double> values{1.0};
  std::vector<double> probs{1.0};
  double alpha = 1.0;
  int d = 1;
};

class SyntheticSampler : public FieldSampler {
 public:
  SyntheticSampler(const SyntheticSpec& spec, std::shared_ptr<const Window> w);
  WeightedField sample(RngStream& rng) const override;
  const SyntheticSpec& spec() const { return spec_; }

 private:
  SyntheticSpec spec_;
  std::vector<double> cum_;  // constant-law cdf
};

enum class LocalMode { direct, weighted, resampled };

struct ResampleBank {
  int size = 10000;
  std::uint64_t seed = 0;
  std::uint32_t ctx = 0x7e5a;
};

// The field Z/|Z(0)| under the |Z(0)|^alpha-reweighted law. Emitted samples
// satisfy |Theta(0)| = 1; expectations are weight-normalized averages.
class LocalFieldSampler : public FieldSampler {
 public:
  LocalFieldSampler(std::shared_ptr<const FieldSampler> base, LocalMode mode,
                    const HomogeneousNorm& norm, double alpha,
                    const ResampleBank& bank = ResampleBank());

  WeightedField sample(RngStream& rng) const override;

  // Empirical probe of E|Z(0)|^alpha; flags when the CI excludes 1.
  MCEstimate check_normalization(const McParams& mc, std::uint32_t ctx,
                                 bool* warn = nullptr) const;

  LocalMode mode() const { return mode_; }
  const HomogeneousNorm& norm() const { return norm_; }

 private:
  std::shared_ptr<const FieldSampler> base_;
  LocalMode mode_;
  HomogeneousNorm norm_;
  std::vector<FieldSample> bank_;
  std::vector<double> bank_cum_;
};

// Y = R * Theta with R an independent alpha-Pareto draw.
class TailFieldSampler : public FieldSampler {
 public:
  TailFieldSampler(std::shared_ptr<const FieldSampler> theta, double alpha);
  WeightedField sample(RngStream& rng) const override;

 private:
  std::shared_ptr<const FieldSampler> theta_;
};

// Strictly positive discrete density on lattice points.
struct ShiftDensity {
  std::vector<Point> points;
  std::vector<double> probs;

  static ShiftDensity uniform(const std::vector<Point>& pts);
  static ShiftDensity point_mass_origin(int l);
  void validate() const;
};

enum class ShiftVariant { normalized_sum, pareto_max };

// B^N Z with the stationarity-restoring normalizers; output lives on a
// window small enough that every shifted read stays inside the base window.
class RandomShiftSampler : public FieldSampler {
 public:
  RandomShiftSampler(std::shared_ptr<const FieldSampler> base,
                     const ShiftDensity& pn, ShiftVariant variant,
                     std::shared_ptr<const Window> out_window,
                     const HomogeneousNorm& norm, double alpha);

  WeightedField sample(RngStream& rng) const override;

 private:
  std::shared_ptr<const FieldSampler> base_;
  ShiftDensity pn_;
  std::vector<double> cum_;
  ShiftVariant variant_;
  HomogeneousNorm norm_;
};

// --- identity checkers (independent banks per side; ctx and ctx+1) ---

ComparisonReport check_identity_boll(const FieldSampler& s1,
                                     const FieldSampler& s2,
                                     const FunctionalSpec& F, const Point& h,
                                     const HomogeneousNorm& norm, double alpha,
                                     const McParams& mc, std::uint32_t ctx);

ComparisonReport check_spectral_identity(const FieldSampler& theta,
                                         const FunctionalSpec& G,
                                         const Point& h,
                                         const HomogeneousNorm& norm,
                                         double alpha, const McParams& mc,
                                         std::uint32_t ctx);

ComparisonReport check_tail_identity(const FieldSampler& y,
                                     const FunctionalSpec& G, const Point& h,
                                     double x, const HomogeneousNorm& norm,
                                     double alpha, const McParams& mc,
                                     std::uint32_t ctx);

ComparisonReport fdd_y_check(const FieldSampler& theta,
                             const std::vector<Point>& points,
                             const std::vector<double>& x,
                             const HomogeneousNorm& norm, double alpha,
                             const McParams& mc, std::uint32_t ctx);

// --- tail-measure estimators ---

// H must vanish on paths with sup_{K0} |f| < eps.
struct TailMeasureH {
  FunctionalSpec H;
  double eps = 1.0;
  std::vector<Point> k0;
};

enum class TailMeasureVariant { direct, window_shift, theta_shift };

MCEstimate tail_measure_direct(const FieldSampler& spectral,
                               const TailMeasureH& H,
                               const HomogeneousNorm& norm, double alpha,
                               const McParams& mc, std::uint32_t ctx);

// Window-localized representation through the tail field Y on K.
MCEstimate tail_measure_window_shift(const FieldSampler& theta,
                                     const TailMeasureH& H,
                                     const std::vector<Point>& K,
                                     const HomogeneousNorm& norm, double alpha,
                                     const McParams& mc, std::uint32_t ctx);

// Random-shift representation through Theta and a declared density.
MCEstimate tail_measure_theta_shift(const FieldSampler& theta,
                                    const TailMeasureH& H,
                                    const ShiftDensity& pn,
                                    const HomogeneousNorm& norm, double alpha,
                                    const McParams& mc, std::uint32_t ctx);

// Window-truncated integrability diagnostic for declared weights: the mean
// of  sum_t w(t) sup_{|s|<=a} |Theta(s-t)|^alpha / sum_r |Theta(r-t)|^alpha w(r).
// Weights need not be normalized; the full-domain sum only has to exist, so
// stability is probed by growing the truncated support.
MCEstimate integrability_probe(const FieldSampler& theta,
                               const std::vector<Point>& points,
                               const std::vector<double>& weights,
                               double sup_radius, const HomogeneousNorm& norm,
                               double alpha, const McParams& mc,
                               std::uint32_t ctx);

// Referenced window coordinates of a functional (box/product points, or the
// subwindow for sup/integral kinds).
std::vector<Point> functional_points(const FunctionalSpec& F, const Window& w);

// UsageError unless every referenced point, shifted by -h, stays inside.
void require_evaluable(const FunctionalSpec& F, const Window& w,
                       const Point* shift = nullptr);

}  // namespace fieldlab
