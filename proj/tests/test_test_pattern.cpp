#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "psfest/error.hpp"
#include "psfest/test_pattern.hpp"

using namespace psfest;

TEST_CASE("render") {
  const LatticeSignal one = render(PrismPattern({0, 0}, {0, 0}, 1));
  CHECK(one.box() == Box::cube(2, 0, 0));
  CHECK(one.sum() == 1.0);

  const PrismPattern p({0, 0}, {2, 1}, 4);
  const LatticeSignal block = render(p);
  CHECK(block.box() == Box{{0, 0}, {2, 1}});
  CHECK(p.cells() == 6);
  for (double v : block.values()) CHECK(v == 1.0);

  const PrismPattern q({-3, 2, 0}, {1, 4, 6}, 10);
  CHECK(render(q).sum() == doctest::Approx(5 * 3 * 7));
  CHECK(q.edge(2) == doctest::Approx(0.7));
}

TEST_CASE("pattern validation") {
  CHECK_THROWS_AS(PrismPattern({1, 0}, {0, 0}, 1), DomainError);
  CHECK_THROWS_AS(PrismPattern({0}, {0, 0}, 1), DomainError);
  CHECK_THROWS_AS(PrismPattern({0}, {3}, 0), DomainError);
  const PrismPattern c = PrismPattern::centered(2, 32, 128, 128);
  CHECK(c.a == Coord{48, 48});
  CHECK(c.b == Coord{79, 79});
}

TEST_CASE("closed-form transform") {
  const PrismPattern p({1, -2}, {6, 2}, 8);
  const std::vector<double> zero{0.0, 0.0};
  CHECK(transform_closed_form(p, zero) == cdouble{30.0, 0.0});

  SUBCASE("first sinc zero") {
    const PrismPattern e({0, 0}, {5, 3}, 8);  // m1 = 6
    const std::vector<double> t{2.0 * std::numbers::pi / 6.0, 0.0};
    CHECK(std::abs(transform_closed_form(e, t)) < 1e-14);
  }
  SUBCASE("direct DFT at every grid frequency") {
    const GridSizes grid{17, 12};
    const auto sig = render(p);
    for (const auto& t : oracle::grid_points(grid)) {
      const cdouble want = oracle::dft_at(sig, t);
      CHECK(std::abs(transform_closed_form(p, t) - want) < 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
  SUBCASE("series branch agrees with the direct sum near zero") {
    const PrismPattern w({0}, {40}, 1);
    const auto sig = render(w);
    for (double t : {1e-7, -3e-7, 9e-7, 2e-6}) {
      const std::vector<double> tv{t};
      CHECK(std::abs(transform_closed_form(w, tv) - oracle::dft_at(sig, tv)) < 1e-10);
    }
  }
  SUBCASE("translation changes only the phase") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    const PrismPattern s({1 + 7, -2 - 3}, {6 + 7, 2 - 3}, 8);
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> t{u(gen), u(gen)};
      CHECK(std::abs(std::abs(transform_closed_form(p, t)) - std::abs(transform_closed_form(s, t))) < 1e-12);
    }
  }
}

TEST_CASE("dirichlet_ratio") {
  CHECK(dirichlet_ratio(1, 0.3) == doctest::Approx(1.0));
  CHECK(dirichlet_ratio(7, 0.0) == 7.0);
  // just either side of the series switch
  CHECK(dirichlet_ratio(9, 0.999e-6) == doctest::Approx(dirichlet_ratio(9, 1.001e-6)).epsilon(1e-12));
}

TEST_CASE("rescaled transform") {
  const PrismPattern p({10, 20}, {41, 35}, 64);
  const std::vector<double> zero{0.0, 0.0};
  CHECK(rescaled_transform(p, zero).real() == doctest::Approx(32.0 * 16.0 / (64.0 * 64.0)).epsilon(1e-15));

  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-64.0 * std::numbers::pi, 64.0 * std::numbers::pi);
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> uu{u(gen), u(gen)};
    const std::vector<double> t{uu[0] / 64.0, uu[1] / 64.0};
    const cdouble raw = transform_closed_form(p, t) / (64.0 * 64.0);
    CHECK(std::abs(rescaled_transform(p, uu) - raw) < 1e-12);
  }

  SUBCASE("limit as n grows with fixed edge lengths") {
    const std::vector<double> t{1.3, -2.1};
    double prev = 1e300;
    for (std::int64_t n : {8, 32, 128, 512}) {
      const PrismPattern q({0, 0}, {n / 2 - 1, n / 4 - 1}, n);  // c = (1/2, 1/4)
      double limit = 1.0;
      for (std::size_t l = 0; l < 2; ++l) limit *= 2.0 / t[l] * std::sin(q.edge(l) * t[l] / 2.0);
      const double gap = std::abs(std::abs(rescaled_transform(q, t)) - std::abs(limit));
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev < 1e-5);
  }
}

TEST_CASE("pattern_spectrum matches the pointwise closed form in storage order") {
  const PrismPattern p({0, 0}, {3, 4}, 4);
  const GridSizes grid{9, 7};
  const Spectrum s = pattern_spectrum(p, grid);
  const auto pts = oracle::grid_points(grid);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(s.values()[i] - transform_closed_form(p, pts[i])) < 1e-14 * (1.0 + std::abs(s.values()[i])));
}
