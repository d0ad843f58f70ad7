#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "psfest/lattice.hpp"

namespace psfest {

enum class BlurFamily { polynomial_product, gaussian, spherical_polynomial, custom };
enum class SupportShape { box, sphere };

std::string to_string(BlurFamily f);
std::string to_string(SupportShape s);

/// Continuum blur g on R^d with compact support of radius lambda (sup-norm
/// for box support, Euclidean for sphere support).
struct ContinuumBlur {
  BlurFamily family = BlurFamily::polynomial_product;
  SupportShape shape = SupportShape::box;
  std::size_t dims = 2;
  double p = 5.0;
  double lambda = 0.2;
  double sd = 0.1;  // gaussian only
  std::function<double(std::span<const double>)> evaluator;  // custom only

  /// prod_l A1 (1 - (x_l/lambda)^2)^p on the cube of half-width lambda.
  static ContinuumBlur polynomial_product(double p, double lambda, std::size_t dims);
  /// Isotropic normal density of standard deviation sd, cut off at radius lambda.
  static ContinuumBlur gaussian(double sd, double lambda, std::size_t dims);
  /// Normalised (1 - ||x/lambda||^2)^p on the ball of radius lambda.
  static ContinuumBlur spherical_polynomial(double p, double lambda, std::size_t dims);
  static ContinuumBlur custom(std::function<double(std::span<const double>)> g, double lambda, std::size_t dims,
                              SupportShape shape);

  bool inside(std::span<const double> x) const;
  double operator()(std::span<const double> x) const;
};

/// (lambda sqrt(pi) Gamma(p+1) / Gamma(p+3/2))^{-d}.
double polynomial_normalizer(double p, double lambda, std::size_t dims);
/// Gamma(p+1+d/2) / (pi^{d/2} Gamma(p+1) lambda^d).
double spherical_normalizer(double p, double lambda, std::size_t dims);

/// Intensity-normalised lattice kernel phi.
struct BlurKernel {
  LatticeSignal values;
  std::int64_t n = 1;
  double lambda_n = 0.0;  // support radius in pixels
  std::optional<ContinuumBlur> parent;
  double s_d = 1.0;  // realised normaliser: phi = s_d n^{-d} g(j/n)
  SupportShape shape = SupportShape::box;

  std::size_t dims() const { return values.dims(); }
  Box box() const { return values.box(); }
};

/// Samples n^{-d} g(j/n) on the support lattice and rescales to unit sum.
BlurKernel discretize(const ContinuumBlur& g, std::int64_t n);

/// Wraps an arbitrary nonnegative lattice kernel, normalising it to unit sum.
BlurKernel kernel_from_values(LatticeSignal values, std::int64_t n, SupportShape shape);

/// Exact linear convolution phi * signal on R (+) S.
LatticeSignal blur_apply(const BlurKernel& kernel, const LatticeSignal& signal);

/// Adds iid N(0, sigma^2) to every cell of the signal's box. Cell i (row-major
/// in the box) always receives normal number i of the stream keyed by seed.
LatticeSignal add_noise(const LatticeSignal& signal, double sigma, std::uint64_t seed);

}  // namespace psfest
