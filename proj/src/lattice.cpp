#include "fieldlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace fieldlab {

Point add(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Point sub(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Point negate(const Point& a) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

std::int64_t l1_norm(const Point& a) {
  std::int64_t s = 0;
  for (std::int64_t v : a) s += std::llabs(v);
  return s;
}

std::string point_to_string(const Point& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ',';
    os << p[i];
  }
  os << ')';
  return os.str();
}

int lex_compare(const Point& a, const Point& b) {
  if (a.size() != b.size())
    throw UsageError("lex_compare: points of unequal dimension");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return 0;
}

Lattice Lattice::from_matrix(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw UsageError("Lattice: base matrix must be square");
  const double det = A.determinant();
  if (std::abs(det) <= 1e-12)
    throw UsageError("Lattice: base matrix is singular (|det| <= 1e-12)");
  Lattice L;
  L.base_ = A;
  L.inv_ = A.inverse();
  L.delta_ = std::abs(det);
  return L;
}

Lattice Lattice::integers(int l) {
  return from_matrix(Eigen::MatrixXd::Identity(l, l));
}

Lattice Lattice::refined(int n) const {
  if (n < 0) throw UsageError("Lattice::refined: n must be >= 0");
  return from_matrix(std::ldexp(1.0, -n) * base_);
}

Eigen::VectorXd Lattice::embed(const Point& k) const {
  if (static_cast<int>(k.size()) != dim())
    throw UsageError("Lattice::embed: wrong coordinate dimension");
  Eigen::VectorXd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = static_cast<double>(k[static_cast<std::size_t>(i)]);
  return base_ * v;
}

int Window::index_of(const Point& k) const {
  const auto it = index_.find(k);
  return it == index_.end() ? -1 : it->second;
}

std::shared_ptr<const Window> Window::translated(const Point& j) const {
  std::vector<Point> moved;
  moved.reserve(coords_.size());
  for (const Point& k : coords_) moved.push_back(add(k, j));
  return make_window(lattice_, std::move(moved));
}

std::shared_ptr<const Window> make_window(const Lattice& L,
                                          std::vector<Point> coords) {
  auto w = std::make_shared<Window>();
  w->lattice_ = L;
  std::sort(coords.begin(), coords.end(),
            [](const Point& a, const Point& b) { return lex_compare(a, b) < 0; });
  w->coords_ = std::move(coords);
  const int n = static_cast<int>(w->coords_.size());
  w->embedded_.resize(n, L.dim());
  const Point zero(static_cast<std::size_t>(L.dim()), 0);
  for (int i = 0; i < n; ++i) {
    w->embedded_.row(i) = L.embed(w->coords_[static_cast<std::size_t>(i)]).transpose();
    w->index_.emplace(w->coords_[static_cast<std::size_t>(i)], i);
    if (w->coords_[static_cast<std::size_t>(i)] == zero) w->origin_ = i;
  }
  return w;
}

namespace {

// Integer bounding box of the preimage of a hypercube under A, then filter.
std::vector<Point> enumerate_box(const Lattice& L, double lo, double hi) {
  const int l = L.dim();
  const Eigen::MatrixXd& inv = L.base_inverse();
  Eigen::VectorXd kmin = Eigen::VectorXd::Constant(l, 1e18);
  Eigen::VectorXd kmax = Eigen::VectorXd::Constant(l, -1e18);
  const int corners = 1 << l;
  for (int c = 0; c < corners; ++c) {
    Eigen::VectorXd x(l);
    for (int i = 0; i < l; ++i) x[i] = (c >> i) & 1 ? hi : lo;
    const Eigen::VectorXd k = inv * x;
    kmin = kmin.cwiseMin(k);
    kmax = kmax.cwiseMax(k);
  }
  std::vector<std::int64_t> lo_k(static_cast<std::size_t>(l)), hi_k(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) {
    lo_k[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(kmin[i])) - 1;
    hi_k[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::ceil(kmax[i])) + 1;
  }
  std::vector<Point> out;
  Point k(static_cast<std::size_t>(l));
  const double tol = 1e-9;
  // odometer over the k-box
  for (int i = 0; i < l; ++i) k[static_cast<std::size_t>(i)] = lo_k[static_cast<std::size_t>(i)];
  while (true) {
    const Eigen::VectorXd x = L.embed(k);
    bool inside = true;
    for (int i = 0; i < l && inside; ++i)
      inside = x[i] >= lo - tol && x[i] <= hi + tol;
    if (inside) out.push_back(k);
    int pos = 0;
    while (pos < l) {
      if (++k[static_cast<std::size_t>(pos)] <= hi_k[static_cast<std::size_t>(pos)]) break;
      k[static_cast<std::size_t>(pos)] = lo_k[static_cast<std::size_t>(pos)];
      ++pos;
    }
    if (pos == l) break;
  }
  return out;
}

}  // namespace

std::shared_ptr<const Window> enumerate_window(const Lattice& L, double a) {
  if (!(a > 0)) throw UsageError("enumerate_window: radius must be positive");
  return make_window(L, enumerate_box(L, -a, a));
}

std::shared_ptr<const Window> enumerate_block(const Lattice& L, double n) {
  if (!(n > 0)) throw UsageError("enumerate_block: n must be positive");
  std::vector<Point> pts = enumerate_box(L, 0.0, n);
  // half-open on the right
  std::vector<Point> kept;
  kept.reserve(pts.size());
  for (const Point& k : pts) {
    const Eigen::VectorXd x = L.embed(k);
    bool inside = true;
    for (int i = 0; i < L.dim() && inside; ++i)
      inside = x[i] >= -1e-9 && x[i] < n - 1e-9;
    if (inside) kept.push_back(k);
  }
  return make_window(L, std::move(kept));
}

}  // namespace fieldlab
