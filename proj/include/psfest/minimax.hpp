#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "psfest/blur.hpp"
#include "psfest/test_pattern.hpp"

namespace psfest {

/// chi_theta(x) = c1 delta^d f(delta x) (1 + theta cos(xi . x)), a
/// probability density supported on the ball of radius 1/delta.
struct ModulatedBlur {
  std::size_t dims = 2;
  double p = 2.0;  // base f = normalised (1 - ||x||^2)^p on the unit ball
  std::vector<double> xi;
  double delta = 1.0;
  int theta = 0;
  double c1 = 1.0;

  /// xi defaults to (2 pi, ..., 2 pi).
  static ModulatedBlur make(std::size_t dims, double p, double delta, int theta, std::vector<double> xi = {});

  double radius() const { return 1.0 / delta; }
};

/// Base density f(x) = Gamma(p+1+d/2) / (pi^{d/2} Gamma(p+1)) (1 - ||x||^2)_+^p.
double base_density(std::size_t dims, double p, std::span<const double> x);
/// f^Ft(w) = int f(x) e^{i w.x} dx = Gamma(p+1+d/2) (2/|w|)^nu J_nu(|w|), nu = d/2 + p.
double base_transform(std::size_t dims, double p, std::span<const double> w);

double chi_theta(const ModulatedBlur& m, std::span<const double> x);

/// phi_theta(j) = c2 n^{-d} chi_theta(j/n); c2 (reported as s_d) makes the sum 1.
BlurKernel phi_theta(const ModulatedBlur& m, std::int64_t n);

struct Separation {
  double spatial = 0.0;   // sigma^{-2} sum_j ((phi0 - phi1) * psi)(j)^2
  double spectral = 0.0;  // same through Parseval on a DFT grid
  double value() const { return spatial; }
};

/// r_n for deciding between phi0 and phi1 from one observation of the blurred
/// pattern; throws ComputeError if the two routes disagree beyond 1e-8 relative.
Separation separation(const BlurKernel& phi0, const BlurKernel& phi1, const PrismPattern& pattern, double sigma);

/// Misclassification probability of the likelihood-ratio rule, 1 - Phi(sqrt(r)/2).
double lr_error(double r_n);
/// 1 - Phi(x).
double standard_normal_sf(double x);

/// n^d sum_j (phi0(j) - phi1(j))^2.
double pair_separation_s2(const BlurKernel& phi0, const BlurKernel& phi1, std::int64_t n);

struct ClassificationMc {
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  double rate = 0.0;
  double binomial_se = 0.0;
};

/// Simulates Y = phi_theta psi + N on T with theta alternating between
/// trials and applies the sum-of-squares rule (pick the closer mean).
ClassificationMc lr_monte_carlo(const BlurKernel& phi0, const BlurKernel& phi1, const PrismPattern& pattern,
                                double sigma, std::int64_t trials, std::uint64_t root_seed);

/// I_d(eps) = int_{[0,1]^d} beta(s)^z 1{beta(s) <= eps} ds with beta(s) = prod s_l.
double lemma51_integral(double z, int d, double eps);

}  // namespace psfest
