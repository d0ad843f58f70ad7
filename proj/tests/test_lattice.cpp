#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "psfest/error.hpp"
#include "psfest/lattice.hpp"
#include "psfest/test_pattern.hpp"

using namespace psfest;

namespace {

constexpr double pi = std::numbers::pi;

double parseval_rel_error(const LatticeSignal& x, const GridSizes& grid) {
  const Spectrum s = dft_forward(x, grid);
  std::vector<double> sq(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) sq[i] = std::norm(s.values()[i]);
  const double freq = integrate_grid(sq, grid) / std::pow(2.0 * pi, static_cast<double>(grid.size()));
  double direct = 0.0;
  for (double v : x.values()) direct += v * v;
  return std::abs(freq - direct) / direct;
}

}  // namespace

TEST_CASE("box arithmetic") {
  const Box a = Box::cube(2, -1, 1);
  const Box b = Box::cube(2, 0, 2);
  CHECK(minkowski(a, b) == Box::cube(2, -1, 3));
  CHECK(minkowski(a, b).cells() == 25);
  CHECK(bounding_union(a, b) == Box::cube(2, -1, 2));
  CHECK(intersection(a, b) == Box::cube(2, 0, 1));
  CHECK(Box::empty_box(2).cells() == 0);
  CHECK(to_string(Box{{0, -2}, {3, 4}}) == "[0..3]x[-2..4]");
}

TEST_CASE("minkowski_sum") {
  SUBCASE("origin is the identity") {
    const IndexSet origin = IndexSet::box(Box::cube(2, 0, 0));
    const IndexSet s = IndexSet::sphere(2, 2.5);
    const IndexSet t = minkowski_sum(origin, s);
    CHECK(t.cardinality() == s.cardinality());
    for (const auto& j : oracle::cells(s.bounding_box())) CHECK(t.contains(j) == s.contains(j));
  }
  SUBCASE("boxes") {
    const IndexSet t = minkowski_sum(IndexSet::box(Box::cube(2, -1, 1)), IndexSet::box(Box::cube(2, 0, 2)));
    CHECK(t.is_box());
    CHECK(t.bounding_box() == Box::cube(2, -1, 3));
    CHECK(t.cardinality() == 25);
  }
  SUBCASE("sphere plus prism against brute-force pairs") {
    const IndexSet r = IndexSet::sphere(2, 2.0);
    const IndexSet s = IndexSet::box(Box{{0, 0}, {4, 4}});
    std::set<Coord> pairs;
    for (const auto& j : oracle::cells(r.bounding_box()))
      if (r.contains(j))
        for (const auto& k : oracle::cells(s.bounding_box())) pairs.insert(Coord{j[0] + k[0], j[1] + k[1]});
    const IndexSet t = minkowski_sum(r, s);
    CHECK(t.cardinality() == pairs.size());
    for (const auto& p : pairs) CHECK(t.contains(p));
  }
  SUBCASE("non-convex sets") {
    const IndexSet r = IndexSet::from_predicate(Box::cube(2, -3, 3), [](const Coord& j) { return (j[0] + j[1]) % 3 == 0; });
    const IndexSet s = IndexSet::from_predicate(Box{{0, 0}, {2, 5}}, [](const Coord& j) { return j[0] * j[1] % 2 == 0; });
    std::set<Coord> pairs;
    for (const auto& j : oracle::cells(r.bounding_box()))
      for (const auto& k : oracle::cells(s.bounding_box()))
        if (r.contains(j) && s.contains(k)) pairs.insert(Coord{j[0] + k[0], j[1] + k[1]});
    const IndexSet t = minkowski_sum(r, s);
    CHECK(t.cardinality() == pairs.size());
    for (const auto& q : oracle::cells(t.bounding_box())) CHECK(t.contains(q) == (pairs.count(q) == 1));
  }
  SUBCASE("empty input gives empty output") {
    CHECK(minkowski_sum(IndexSet::empty(2), IndexSet::sphere(2, 3.0)).empty());
  }
}

TEST_CASE("lattice signal basics") {
  const LatticeSignal x(Box{{-1, 2}, {1, 3}}, {1, 2, 3, 4, 5, 6});
  CHECK(x.at(Coord{0, 3}) == 4);
  CHECK(x.at(Coord{5, 5}) == 0);
  CHECK(x.sum() == 21);
  const LatticeSignal y = x.on_box(Box{{-2, 2}, {1, 4}});
  CHECK(y.sum() == 21);
  CHECK(y.at(Coord{-1, 3}) == 2);
  CHECK(y.support() == x.box());
  CHECK_THROWS_AS(LatticeSignal(Box::cube(1, 0, 1), {1.0, NAN}), DomainError);
  CHECK_THROWS_AS(x + y, DomainError);
}

TEST_CASE("grid frequencies fold into [-pi, pi)") {
  for (std::int64_t m : {1, 2, 5, 8, 165})
    for (std::int64_t k = 0; k < m; ++k) {
      const double t = grid_frequency(k, m);
      CHECK(t >= -pi);
      CHECK(t < pi);
      CHECK(t == doctest::Approx(oracle::fold(k, m)).epsilon(1e-15));
    }
}

TEST_CASE("dft_forward") {
  SUBCASE("impulse at the origin is flat") {
    const Spectrum s = dft_forward(LatticeSignal::impulse(2), GridSizes{4, 6});
    for (auto v : s.values()) CHECK(std::abs(v - cdouble{1.0, 0.0}) < 1e-15);
  }
  SUBCASE("random signals match the direct sum") {
    std::mt19937_64 gen(17);
    for (const Box& b : {Box::cube(2, 0, 3), Box{{-2, 5}, {1, 8}}, Box{{3}, {9}}, Box{{-1, 0, 2}, {1, 2, 3}}}) {
      const LatticeSignal x = oracle::random_signal(b, gen);
      GridSizes grid = b.extents();
      for (auto& g : grid) g += 1;
      const Spectrum s = dft_forward(x, grid);
      const auto pts = oracle::grid_points(grid);
      for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(s.values()[i] - oracle::dft_at(x, pts[i])) < 1e-12);
    }
  }
  SUBCASE("every input of at most 256 cells") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t d = 1 + trial % 3;
      Box b{Coord(d), Coord(d)};
      std::size_t cells = 1;
      for (std::size_t l = 0; l < d; ++l) {
        b.lo[l] = static_cast<std::int64_t>(gen() % 9) - 4;
        const auto e = static_cast<std::int64_t>(1 + gen() % (d == 1 ? 64 : d == 2 ? 12 : 6));
        b.hi[l] = b.lo[l] + e - 1;
        cells *= static_cast<std::size_t>(e);
      }
      REQUIRE(cells <= 256);
      const LatticeSignal x = oracle::random_signal(b, gen);
      const GridSizes grid = b.extents();
      const Spectrum s = dft_forward(x, grid);
      const auto pts = oracle::grid_points(grid);
      for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(s.values()[i] - oracle::dft_at(x, pts[i])) < 1e-11);
    }
  }
  SUBCASE("prism matches the closed form") {
    const PrismPattern p({2, -3}, {9, 1}, 16);
    const GridSizes grid{13, 11};
    const Spectrum s = dft_forward(render(p), grid);
    const auto pts = oracle::grid_points(grid);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const cdouble cf = transform_closed_form(p, pts[i]);
      CHECK(std::abs(s.values()[i] - cf) <= 1e-10 * std::max(1.0, std::abs(cf)));
    }
  }
  SUBCASE("grid smaller than the support is rejected") {
    const LatticeSignal x = LatticeSignal(Box::cube(2, 0, 4), std::vector<double>(25, 1.0));
    CHECK_THROWS_AS(dft_forward(x, GridSizes{4, 8}), SizingError);
    CHECK_THROWS_AS(dft_forward(x, GridSizes{5}), SizingError);
  }
}

TEST_CASE("spectrum symmetries of real signals") {
  std::mt19937_64 gen(99);
  const LatticeSignal x = oracle::random_signal(Box{{-3, 1}, {4, 6}}, gen);
  const GridSizes grid{11, 9};
  const Spectrum s = dft_forward(x, grid);
  CHECK(std::abs(s.at(Coord{0, 0}) - x.sum()) < 1e-12);
  for (const auto& k : oracle::cells(Box{{0, 0}, {10, 8}})) {
    const Coord mk{(grid[0] - k[0]) % grid[0], (grid[1] - k[1]) % grid[1]};
    CHECK(std::abs(s.at(k) - std::conj(s.at(mk))) < 1e-12);
  }
}

TEST_CASE("dft_inverse_on") {
  SUBCASE("round trip on the alias-free window") {
    std::mt19937_64 gen(3);
    const LatticeSignal x = oracle::random_signal(Box{{-4, 2}, {3, 9}}, gen);
    const GridSizes grid{8, 8};
    const InverseResult back = dft_inverse_on(dft_forward(x, grid), IndexSet::box(x.box()));
    double err = 0.0;
    for (std::size_t i = 0; i < x.values().size(); ++i) err = std::max(err, std::abs(back.signal.values()[i] - x.values()[i]));
    CHECK(err <= 1e-10);
    CHECK(back.max_imag <= 1e-10);
  }
  SUBCASE("flat spectrum gives the impulse") {
    const GridSizes grid{6, 5};
    const Spectrum flat(grid, std::vector<cdouble>(30, cdouble{1.0, 0.0}));
    const InverseResult r = dft_inverse_on(flat, IndexSet::box(Box{{-2, -2}, {3, 2}}));
    for (const auto& j : oracle::cells(r.signal.box()))
      CHECK(std::abs(r.signal.at(j) - (j == Coord{0, 0} ? 1.0 : 0.0)) < 1e-15);
  }
  SUBCASE("filtered 3x3 spectrum against the quadrature sum") {
    std::mt19937_64 gen(8);
    const GridSizes grid{3, 3};
    std::vector<cdouble> v(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& z : v) z = {u(gen), u(gen)};
    const Spectrum s(grid, v);
    const auto pts = oracle::grid_points(grid);
    const InverseResult r = dft_inverse_on(s, IndexSet::box(Box::cube(2, -1, 1)));
    for (const auto& j : oracle::cells(Box::cube(2, -1, 1))) {
      std::complex<long double> acc = 0;
      for (std::size_t i = 0; i < 9; ++i) {
        const long double ph = -(static_cast<long double>(pts[i][0]) * j[0] + static_cast<long double>(pts[i][1]) * j[1]);
        acc += std::complex<long double>(v[i].real(), v[i].imag()) * std::complex<long double>(std::cos(ph), std::sin(ph));
      }
      CHECK(std::abs(r.signal.at(j) - static_cast<double>(acc.real() / 9)) < 1e-12);
    }
  }
  SUBCASE("target wider than the grid is rejected") {
    const Spectrum s(GridSizes{4}, std::vector<cdouble>(4));
    CHECK_THROWS_AS(dft_inverse_on(s, IndexSet::box(Box{{0}, {4}})), SizingError);
  }
}

TEST_CASE("integrate_freq") {
  CHECK(integrate_freq([](auto) { return 1.0; }, GridSizes{7, 4}) == doctest::Approx(4 * pi * pi).epsilon(1e-14));
  CHECK(integrate_freq([](auto t) { return std::cos(t[0]) * std::cos(t[0]); }, GridSizes{16}) ==
        doctest::Approx(pi).epsilon(1e-14));
  const PrismPattern p({0, 0}, {4, 2}, 8);
  const double v = integrate_freq([&](auto t) { return std::norm(transform_closed_form(p, t)); }, GridSizes{9, 7});
  CHECK(v == doctest::Approx(4 * pi * pi * 15).epsilon(1e-12));
  try {
    integrate_freq([](auto t) { return t[0] > 1.0 ? NAN : 0.0; }, GridSizes{8});
    FAIL("expected a compute error");
  } catch (const ComputeError& e) {
    CHECK(std::string(e.what()).find("t = (") != std::string::npos);
  }
}

TEST_CASE("Parseval on random signals up to 64^d cells") {
  std::mt19937_64 gen(1234);
  for (std::size_t d = 1; d <= 3; ++d) {
    const std::int64_t side = d == 3 ? 16 : 64;
    const LatticeSignal x = oracle::random_signal(Box::cube(d, -side / 2, side / 2 - 1), gen);
    CHECK(parseval_rel_error(x, GridSizes(d, side)) < 1e-8);
    CHECK(parseval_rel_error(x, GridSizes(d, 2 * side + 1)) < 1e-8);
  }
  const LatticeSignal big = oracle::random_signal(Box::cube(2, 0, 63), gen);
  CHECK(parseval_rel_error(big, GridSizes{64, 64}) < 1e-8);
}
