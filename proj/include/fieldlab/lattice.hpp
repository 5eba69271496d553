#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "fieldlab/mc.hpp"

namespace fieldlab {

// Integer coordinates of a lattice point (the k in A*k).
using Point = std::vector<std::int64_t>;

struct PointHash {
  std::size_t operator()(const Point& p) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : p) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) +
           (h >> 2);
    }
    return h;
  }
};

Point add(const Point& a, const Point& b);
Point sub(const Point& a, const Point& b);
Point negate(const Point& a);
std::int64_t l1_norm(const Point& a);
std::string point_to_string(const Point& p);

// Shift-invariant total order: lexicographic on integer coordinates.
// Returns <0, 0, >0.
int lex_compare(const Point& a, const Point& b);

// Full-rank lattice {A k : k in Z^l}.
class Lattice {
 public:
  static Lattice from_matrix(const Eigen::MatrixXd& A);
  static Lattice integers(int l);

  // base matrix 2^-n * A
  Lattice refined(int n) const;

  int dim() const { return static_cast<int>(base_.rows()); }
  double delta() const { return delta_; }
  const Eigen::MatrixXd& base() const { return base_; }
  const Eigen::MatrixXd& base_inverse() const { return inv_; }
  Eigen::VectorXd embed(const Point& k) const;

 private:
  Lattice() = default;
  Eigen::MatrixXd base_;
  Eigen::MatrixXd inv_;
  double delta_ = 0.0;
};

// Points of a lattice inside a hypercube, in lexicographic order of their
// integer coordinates. Centered windows are [-a,a]^l; block windows are
// [0,n)^l so that Z^l blocks hold exactly n^l points.
class Window {
 public:
  const Lattice& lattice() const { return lattice_; }
  int size() const { return static_cast<int>(coords_.size()); }
  const std::vector<Point>& coords() const { return coords_; }
  const Point& coord(int i) const { return coords_[static_cast<std::size_t>(i)]; }
  const Eigen::MatrixXd& embedded() const { return embedded_; }
  int origin_index() const { return origin_; }
  bool has_origin() const { return origin_ >= 0; }

  // -1 when absent
  int index_of(const Point& k) const;
  bool contains(const Point& k) const { return index_of(k) >= 0; }

  // Same point set relocated by j (contents move with the window).
  std::shared_ptr<const Window> translated(const Point& j) const;

  friend std::shared_ptr<const Window> make_window(const Lattice&,
                                                   std::vector<Point>);

 private:
  Lattice lattice_ = Lattice::integers(1);
  std::vector<Point> coords_;
  Eigen::MatrixXd embedded_;
  std::unordered_map<Point, int, PointHash> index_;
  int origin_ = -1;
};

std::shared_ptr<const Window> make_window(const Lattice& L,
                                          std::vector<Point> coords);

// {A k : A k in [-a,a]^l}
std::shared_ptr<const Window> enumerate_window(const Lattice& L, double a);

// {A k : A k in [0,n)^l}
std::shared_ptr<const Window> enumerate_block(const Lattice& L, double n);

}  // namespace fieldlab
