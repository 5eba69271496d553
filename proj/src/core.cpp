#include "fieldlab/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fieldlab/text.hpp"

namespace fieldlab {

double HomogeneousNorm::operator()(const double* x, int n) const {
  if (n != d) throw UsageError("norm: vector length does not match d");
  switch (kind) {
    case NormKind::alpha_sum: {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += std::pow(std::abs(x[i]), alpha);
      return std::pow(s / d, 1.0 / alpha);
    }
    case NormKind::euclidean: {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += x[i] * x[i];
      return std::sqrt(s);
    }
    case NormKind::sup: {
      double m = 0.0;
      for (int i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
      return m;
    }
  }
  return 0.0;
}

double FieldSample::norm_at(int idx, const HomogeneousNorm& norm) const {
  const int d = dim();
  double buf[16];
  if (d <= 16) {
    for (int j = 0; j < d; ++j) buf[j] = values(idx, j);
    return norm(buf, d);
  }
  Eigen::VectorXd row = values.row(idx).transpose();
  return norm(row);
}

double FieldSample::norm_at(const Point& k, const HomogeneousNorm& norm) const {
  const int idx = window->index_of(k);
  if (idx < 0)
    throw UsageError("field: point " + point_to_string(k) +
                     " is outside the window");
  return norm_at(idx, norm);
}

void FieldSampler::sample_norms(RngStream& rng, const HomogeneousNorm& norm,
                                Eigen::VectorXd& out) const {
  const WeightedField wf = sample(rng);
  if (wf.weight != 1.0)
    throw ContractError("sample_norms: sampler emits non-unit weights");
  for (int i = 0; i < wf.field.size(); ++i) out[i] = wf.field.norm_at(i, norm);
}

FieldSample make_field(std::shared_ptr<const Window> w, int d, double alpha) {
  FieldSample f;
  f.values = Eigen::MatrixXd::Zero(w->size(), d);
  f.window = std::move(w);
  f.alpha = alpha;
  return f;
}

FunctionalSpec FunctionalSpec::box(std::vector<Point> pts,
                                   std::vector<double> lo,
                                   std::vector<double> hi, std::string name) {
  FunctionalSpec F;
  F.kind = FunctionalKind::indicator_box;
  F.tag = HomTag::general;
  F.points = std::move(pts);
  F.lower = std::move(lo);
  F.upper = std::move(hi);
  F.name = std::move(name);
  if (F.lower.size() != F.points.size() || F.upper.size() != F.points.size())
    throw UsageError("functional box: one (lower, upper) pair per point");
  return F;
}

FunctionalSpec FunctionalSpec::product_power(std::vector<Point> pts,
                                             std::vector<double> exps,
                                             std::string name) {
  FunctionalSpec F;
  F.kind = FunctionalKind::product_power;
  F.points = std::move(pts);
  F.exponents = std::move(exps);
  F.name = std::move(name);
  if (F.exponents.size() != F.points.size())
    throw UsageError("functional product_power: one exponent per point");
  double degree = 0.0;
  for (double e : F.exponents) degree += e;
  F.tag = degree == 0.0 ? HomTag::deg0 : HomTag::general;
  return F;
}

FunctionalSpec FunctionalSpec::constant_one(std::string name) {
  FunctionalSpec F;
  F.kind = FunctionalKind::product_power;
  F.tag = HomTag::deg0;
  F.name = std::move(name);
  return F;
}

FunctionalSpec FunctionalSpec::sup_window(double radius, std::string name) {
  FunctionalSpec F;
  F.kind = FunctionalKind::sup_window;
  F.tag = HomTag::general;
  F.radius = radius;
  F.name = std::move(name);
  return F;
}

FunctionalSpec FunctionalSpec::integral(double radius, std::string name) {
  FunctionalSpec F;
  F.kind = FunctionalKind::integral;
  F.tag = HomTag::general;
  F.radius = radius;
  F.name = std::move(name);
  return F;
}

std::string FunctionalSpec::serialize() const {
  std::ostringstream os;
  auto pts = [&]() {
    os << "; points=";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i) os << ' ';
      os << point_to_string(points[i]);
    }
  };
  auto nums = [&](const char* key, const std::vector<double>& v) {
    os << "; " << key << '=';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ',';
      os << fmt_double(v[i]);
    }
  };
  switch (kind) {
    case FunctionalKind::indicator_box:
      os << "box";
      pts();
      nums("lower", lower);
      nums("upper", upper);
      break;
    case FunctionalKind::product_power:
      os << "prodpow";
      pts();
      nums("exps", exponents);
      break;
    case FunctionalKind::sup_window:
      os << "supwin; radius=" << fmt_double(radius);
      break;
    case FunctionalKind::integral:
      os << "integral; radius=" << fmt_double(radius);
      break;
  }
  return os.str();
}

std::vector<int> subwindow_indices(const Window& w, double radius) {
  std::vector<int> idx;
  for (int i = 0; i < w.size(); ++i) {
    if (w.embedded().row(i).cwiseAbs().maxCoeff() <= radius + 1e-9)
      idx.push_back(i);
  }
  return idx;
}

namespace {

// ||scale * f(p - shift) / divisor||; dividing first keeps values that
// coincide with the divisor exactly at scale
double shifted_norm(const FieldSample& f, const HomogeneousNorm& norm,
                    const Point& p, const EvalOptions& opt) {
  const Point q = opt.shift ? sub(p, *opt.shift) : p;
  return opt.scale * (f.norm_at(q, norm) / opt.divisor);
}

// 0^0 = 1 (absent factor); 0^e = 0 for e > 0; x=0 with e < 0 follows the
// 0/0 = 0 convention and kills the product.
double power_factor(double x, double e, bool& zero_product) {
  if (x == 0.0) {
    if (e == 0.0) return 1.0;
    zero_product = true;
    return 0.0;
  }
  return std::pow(x, e);
}

}  // namespace

double eval_functional(const FunctionalSpec& F, const FieldSample& f,
                       const HomogeneousNorm& norm, const EvalOptions& opt) {
  switch (F.kind) {
    case FunctionalKind::indicator_box: {
      for (std::size_t i = 0; i < F.points.size(); ++i) {
        const double v = shifted_norm(f, norm, F.points[i], opt);
        if (v < F.lower[i] || v > F.upper[i]) return 0.0;
      }
      return 1.0;
    }
    case FunctionalKind::product_power: {
      double prod = 1.0;
      bool zero = false;
      for (std::size_t i = 0; i < F.points.size(); ++i) {
        const double v = shifted_norm(f, norm, F.points[i], opt);
        prod *= power_factor(v, F.exponents[i], zero);
        if (zero) return 0.0;
      }
      return prod;
    }
    case FunctionalKind::sup_window: {
      double m = 0.0;
      for (int i : subwindow_indices(*f.window, F.radius)) {
        const Point& p = f.window->coord(i);
        m = std::max(m, shifted_norm(f, norm, p, opt));
      }
      return m;
    }
    case FunctionalKind::integral: {
      double s = 0.0;
      for (int i : subwindow_indices(*f.window, F.radius)) {
        const Point& p = f.window->coord(i);
        s += shifted_norm(f, norm, p, opt);
      }
      return s * opt.cell_weight;
    }
  }
  return 0.0;
}

}  // namespace fieldlab
