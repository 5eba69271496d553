#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fieldlab/lattice.hpp"
#include "fieldlab/mc.hpp"
#include "fieldlab/rng.hpp"

namespace fieldlab {

enum class NormKind { alpha_sum, euclidean, sup };

// 1-homogeneous map R^d -> [0, inf).
struct HomogeneousNorm {
  NormKind kind = NormKind::alpha_sum;
  double alpha = 1.0;
  int d = 1;

  static HomogeneousNorm alpha_sum(double alpha, int d) {
    return {NormKind::alpha_sum, alpha, d};
  }
  static HomogeneousNorm euclidean(int d) { return {NormKind::euclidean, 1.0, d}; }
  static HomogeneousNorm sup(int d) { return {NormKind::sup, 1.0, d}; }

  double operator()(const double* x, int n) const;
  double operator()(const Eigen::VectorXd& x) const {
    return (*this)(x.data(), static_cast<int>(x.size()));
  }
};

// alpha-Pareto variable: survival t^-alpha on [1, inf).
struct ParetoAlpha {
  double alpha = 1.0;
};

inline double sample_pareto(const ParetoAlpha& p, RngStream& rng) {
  if (!(p.alpha > 0)) throw UsageError("sample_pareto: alpha must be positive");
  return rng.pareto(p.alpha);
}

// One realization of an R^d-valued field on a finite window.
struct FieldSample {
  std::shared_ptr<const Window> window;
  Eigen::MatrixXd values;  // |window| x d
  double alpha = 1.0;

  int size() const { return window ? window->size() : 0; }
  int dim() const { return static_cast<int>(values.cols()); }
  int origin_index() const { return window->origin_index(); }

  double norm_at(int idx, const HomogeneousNorm& norm) const;
  // ||f(k)||; throws UsageError when k is outside the window
  double norm_at(const Point& k, const HomogeneousNorm& norm) const;
};

FieldSample make_field(std::shared_ptr<const Window> w, int d, double alpha);

struct WeightedField {
  FieldSample field;
  double weight = 1.0;
};

// Draws one field realization per call; bound to a window at construction.
// Immutable and shared across workers; all randomness comes from the
// caller's stream.
class FieldSampler {
 public:
  explicit FieldSampler(std::shared_ptr<const Window> w, double alpha)
      : window_(std::move(w)), alpha_(alpha) {}
  virtual ~FieldSampler() = default;

  virtual WeightedField sample(RngStream& rng) const = 0;

  // |Z(t)| per window point without materializing the field; out must be
  // presized to the window. Only meaningful for unweighted samplers.
  virtual void sample_norms(RngStream& rng, const HomogeneousNorm& norm,
                            Eigen::VectorXd& out) const;

  const Window& window() const { return *window_; }
  std::shared_ptr<const Window> window_ptr() const { return window_; }
  double alpha() const { return alpha_; }

 protected:
  std::shared_ptr<const Window> window_;
  double alpha_;
};

enum class FunctionalKind { indicator_box, product_power, sup_window, integral };
enum class HomTag { deg0, degAlpha, general };

// Parameterized test functional on field samples.
struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::indicator_box;
  HomTag tag = HomTag::general;
  std::string name;

  // indicator_box / product_power
  std::vector<Point> points;
  std::vector<double> lower;  // per point, box
  std::vector<double> upper;  // per point, box (may be +inf)
  std::vector<double> exponents;

  // sup_window / integral: centered subwindow radius in embedded space
  double radius = 0.0;

  static FunctionalSpec box(std::vector<Point> pts, std::vector<double> lo,
                            std::vector<double> hi, std::string name = "box");
  static FunctionalSpec product_power(std::vector<Point> pts,
                                      std::vector<double> exps,
                                      std::string name = "prodpow");
  static FunctionalSpec constant_one(std::string name = "one");
  static FunctionalSpec sup_window(double radius, std::string name = "supwin");
  static FunctionalSpec integral(double radius, std::string name = "integral");

  std::string serialize() const;
};

struct EvalOptions {
  const Point* shift = nullptr;  // evaluate F(B^h f), reading f(t - h)
  double scale = 1.0;            // evaluate F(scale * f / divisor)
  double divisor = 1.0;          // normalizations divide so that x/x == 1 exactly
  double cell_weight = 1.0;      // lambda weight per lattice cell (integral)
};

// Deterministic evaluation; throws UsageError when a referenced point
// (after shifting) is outside the sample's window.
double eval_functional(const FunctionalSpec& F, const FieldSample& f,
                       const HomogeneousNorm& norm, const EvalOptions& opt = {});

// Points of f's window within the centered subwindow of the given radius.
std::vector<int> subwindow_indices(const Window& w, double radius);

}  // namespace fieldlab
