#include <doctest.h>

#include <cmath>

#include "fieldlab/lattice.hpp"
#include "fieldlab/rng.hpp"

using namespace fieldlab;

TEST_CASE("lattice construction and delta") {
  CHECK(Lattice::integers(2).delta() == doctest::Approx(1.0));

  Eigen::MatrixXd d23(2, 2);
  d23 << 2, 0, 0, 3;
  CHECK(Lattice::from_matrix(d23).delta() == doctest::Approx(6.0));

  Eigen::MatrixXd shear(2, 2);
  shear << 1, 1, 0, 1;
  CHECK(Lattice::from_matrix(shear).delta() == doctest::Approx(1.0));

  Eigen::MatrixXd sing(2, 2);
  sing << 1, 2, 2, 4;
  CHECK_THROWS_AS(Lattice::from_matrix(sing), UsageError);
}

TEST_CASE("refinement") {
  const Lattice z = Lattice::integers(1);
  CHECK(z.refined(1).delta() == doctest::Approx(0.5));
  CHECK(Lattice::integers(2).refined(2).delta() == doctest::Approx(1.0 / 16));
  CHECK(z.refined(0).base() == z.base());

  // composition is exact on base matrices
  const Lattice a = Lattice::integers(2).refined(2).refined(3);
  const Lattice b = Lattice::integers(2).refined(5);
  CHECK(a.base() == b.base());
  CHECK(a.delta() == doctest::Approx(b.delta()).epsilon(1e-12));
}

TEST_CASE("window enumeration on Z and 2Z") {
  const auto w = enumerate_window(Lattice::integers(1), 2.0);
  REQUIRE(w->size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(w->coord(i)[0] == i - 2);
  CHECK(w->origin_index() == 2);

  Eigen::MatrixXd two(1, 1);
  two << 2;
  const auto w2 = enumerate_window(Lattice::from_matrix(two), 3.0);
  REQUIRE(w2->size() == 3);
  CHECK(w2->embedded()(0, 0) == doctest::Approx(-2));
  CHECK(w2->embedded()(1, 0) == doctest::Approx(0));
  CHECK(w2->embedded()(2, 0) == doctest::Approx(2));
}

TEST_CASE("window enumeration diag(2,3) radius 3") {
  Eigen::MatrixXd d(2, 2);
  d << 2, 0, 0, 3;
  const auto w = enumerate_window(Lattice::from_matrix(d), 3.0);
  // {-2,0,2} x {-3,0,3}
  CHECK(w->size() == 9);
}

TEST_CASE("block windows are half-open") {
  const auto b = enumerate_block(Lattice::integers(1), 8.0);
  REQUIRE(b->size() == 8);
  CHECK(b->coord(0)[0] == 0);
  CHECK(b->coord(7)[0] == 7);
  CHECK(b->has_origin());

  const auto b2 = enumerate_block(Lattice::integers(2), 4.0);
  CHECK(b2->size() == 16);
}

TEST_CASE("enumeration matches brute force on random lattices") {
  RngStream rng(2024, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int l = 1 + static_cast<int>(rng.uniform_below(3));
    Eigen::MatrixXd A(l, l);
    double det = 0.0;
    do {
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j)
          A(i, j) = std::round((rng.uniform01() * 4.0 - 2.0) * 4.0) / 4.0;
      det = A.determinant();
    } while (std::abs(det) < 0.25);
    const double a = 1.0 + 3.0 * rng.uniform01();
    const Lattice L = Lattice::from_matrix(A);
    const auto w = enumerate_window(L, a);

    // oracle: scan a generous integer box and test membership directly
    std::vector<Point> expected;
    const int R = 64;
    Point k(static_cast<std::size_t>(l), -R);
    while (true) {
      const Eigen::VectorXd x = L.embed(k);
      bool inside = true;
      for (int i = 0; i < l; ++i)
        inside = inside && std::abs(x[i]) <= a + 1e-9;
      if (inside) expected.push_back(k);
      int pos = 0;
      while (pos < l && ++k[static_cast<std::size_t>(pos)] > R) {
        k[static_cast<std::size_t>(pos)] = -R;
        ++pos;
      }
      if (pos == l) break;
    }
    REQUIRE(static_cast<std::size_t>(w->size()) == expected.size());
    for (const Point& p : expected) CHECK(w->contains(p));
  }
}

TEST_CASE("lex order is total and shift-invariant") {
  CHECK(lex_compare({0, 1}, {1, 0}) < 0);
  CHECK(lex_compare({3, 5}, {3, 5}) == 0);
  CHECK(lex_compare({5, 3}, {6, 2}) < 0);  // shifted (0,1) vs (1,0)

  RngStream rng(99, 2);
  for (int i = 0; i < 1000; ++i) {
    Point s(2), t(2), k(2);
    for (int j = 0; j < 2; ++j) {
      s[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rng.uniform_below(21)) - 10;
      t[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rng.uniform_below(21)) - 10;
      k[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rng.uniform_below(21)) - 10;
    }
    CHECK(lex_compare(s, t) == lex_compare(add(s, k), add(t, k)));
  }
}

TEST_CASE("window translation relocates contents") {
  const auto w = enumerate_window(Lattice::integers(1), 2.0);
  const auto t = w->translated({3});
  CHECK(t->size() == w->size());
  CHECK(t->coord(0)[0] == 1);
  CHECK_FALSE(t->has_origin());
  const auto back = t->translated({-3});
  CHECK(back->has_origin());
}
