#include "psfest/blur.hpp"

#include <cmath>
#include <numbers>

#include "psfest/error.hpp"
#include "psfest/kernels.hpp"
#include "psfest/rng.hpp"

namespace psfest {

std::string to_string(BlurFamily f) {
  switch (f) {
    case BlurFamily::polynomial_product: return "polynomial_product";
    case BlurFamily::gaussian: return "gaussian";
    case BlurFamily::spherical_polynomial: return "spherical_polynomial";
    case BlurFamily::custom: return "custom";
  }
  return "unknown";
}

std::string to_string(SupportShape s) { return s == SupportShape::box ? "box" : "sphere"; }

namespace {

void check_common(double lambda, std::size_t dims) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("blur support radius lambda must be positive");
  if (dims < 1) throw DomainError("blur dimension must be >= 1");
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

ContinuumBlur ContinuumBlur::polynomial_product(double p, double lambda, std::size_t dims) {
  check_common(lambda, dims);
  if (!(p > 0.0)) throw DomainError("polynomial blur exponent p must be positive");
  ContinuumBlur g;
  g.family = BlurFamily::polynomial_product;
  g.shape = SupportShape::box;
  g.dims = dims;
  g.p = p;
  g.lambda = lambda;
  return g;
}

ContinuumBlur ContinuumBlur::gaussian(double sd, double lambda, std::size_t dims) {
  check_common(lambda, dims);
  if (!(sd > 0.0)) throw DomainError("gaussian blur sd must be positive");
  ContinuumBlur g;
  g.family = BlurFamily::gaussian;
  g.shape = SupportShape::sphere;
  g.dims = dims;
  g.sd = sd;
  g.lambda = lambda;
  return g;
}

ContinuumBlur ContinuumBlur::spherical_polynomial(double p, double lambda, std::size_t dims) {
  check_common(lambda, dims);
  if (!(p > 0.0)) throw DomainError("polynomial blur exponent p must be positive");
  ContinuumBlur g;
  g.family = BlurFamily::spherical_polynomial;
  g.shape = SupportShape::sphere;
  g.dims = dims;
  g.p = p;
  g.lambda = lambda;
  return g;
}

ContinuumBlur ContinuumBlur::custom(std::function<double(std::span<const double>)> fn, double lambda,
                                    std::size_t dims, SupportShape shape) {
  check_common(lambda, dims);
  if (!fn) throw DomainError("custom blur needs an evaluator");
  ContinuumBlur g;
  g.family = BlurFamily::custom;
  g.shape = shape;
  g.dims = dims;
  g.lambda = lambda;
  g.evaluator = std::move(fn);
  return g;
}

bool ContinuumBlur::inside(std::span<const double> x) const {
  if (shape == SupportShape::box) {
    for (double v : x)
      if (std::abs(v) > lambda) return false;
    return true;
  }
  return norm2(x) <= lambda * lambda;
}

double ContinuumBlur::operator()(std::span<const double> x) const {
  if (x.size() != dims) throw DomainError("blur evaluated at a point of the wrong dimension");
  if (!inside(x)) return 0.0;
  switch (family) {
    case BlurFamily::polynomial_product: {
      double v = polynomial_normalizer(p, lambda, dims);
      for (double xl : x) v *= std::pow(1.0 - (xl / lambda) * (xl / lambda), p);
      return v;
    }
    case BlurFamily::gaussian: {
      const double dd = static_cast<double>(dims);
      return std::exp(-norm2(x) / (2.0 * sd * sd)) / std::pow(2.0 * std::numbers::pi * sd * sd, dd / 2.0);
    }
    case BlurFamily::spherical_polynomial:
      return spherical_normalizer(p, lambda, dims) * std::pow(std::max(0.0, 1.0 - norm2(x) / (lambda * lambda)), p);
    case BlurFamily::custom:
      return evaluator(x);
  }
  return 0.0;
}

double polynomial_normalizer(double p, double lambda, std::size_t dims) {
  if (!(p > 0.0) || !(lambda > 0.0)) throw DomainError("polynomial_normalizer needs p > 0 and lambda > 0");
  const double log_axis =
      std::log(lambda) + 0.5 * std::log(std::numbers::pi) + std::lgamma(p + 1.0) - std::lgamma(p + 1.5);
  return std::exp(-static_cast<double>(dims) * log_axis);
}

double spherical_normalizer(double p, double lambda, std::size_t dims) {
  if (!(p > 0.0) || !(lambda > 0.0)) throw DomainError("spherical_normalizer needs p > 0 and lambda > 0");
  const double dd = static_cast<double>(dims);
  return std::exp(std::lgamma(p + 1.0 + dd / 2.0) - std::lgamma(p + 1.0) - dd / 2.0 * std::log(std::numbers::pi) -
                  dd * std::log(lambda));
}

BlurKernel discretize(const ContinuumBlur& g, std::int64_t n) {
  if (n < 1) throw DomainError("discretize: n must be >= 1");
  const double lambda_n = g.lambda * static_cast<double>(n);
  if (lambda_n < 1.0)
    throw DegenerateKernelError("discretize: support radius " + std::to_string(lambda_n) +
                                " pixels is narrower than one pixel");
  const auto r = static_cast<std::int64_t>(std::floor(lambda_n));
  const Box box = Box::cube(g.dims, -r, r);
  const double nd = std::pow(static_cast<double>(n), static_cast<double>(g.dims));
  std::vector<double> v(box.cells(), 0.0);
  std::vector<double> x(g.dims);
  for_each_cell(box, [&](const Coord& j, std::size_t lin) {
    for (std::size_t l = 0; l < g.dims; ++l) x[l] = static_cast<double>(j[l]) / static_cast<double>(n);
    const double val = g(x);
    if (!std::isfinite(val) || val < 0.0) throw DomainError("blur evaluator returned a negative or non-finite value");
    v[lin] = val / nd;
  });
  double mass = 0.0;
  for (double a : v) mass += a;
  if (!(mass > 0.0)) throw DegenerateKernelError("discretize: sampled kernel has no mass");

  LatticeSignal raw(box, std::move(v));
  const Box tight = raw.support();
  BlurKernel k;
  k.values = raw.on_box(tight);
  for (auto& a : k.values.values_mut()) a /= mass;
  k.n = n;
  k.lambda_n = lambda_n;
  k.parent = g;
  k.s_d = 1.0 / mass;
  k.shape = g.shape;
  return k;
}

BlurKernel kernel_from_values(LatticeSignal values, std::int64_t n, SupportShape shape) {
  const double mass = values.sum();
  if (!(mass > 0.0)) throw DegenerateKernelError("kernel_from_values: kernel has no positive mass");
  BlurKernel k;
  const Box tight = values.support();
  k.values = values.on_box(tight);
  for (auto& a : k.values.values_mut()) a /= mass;
  k.n = n;
  k.s_d = 1.0 / mass;
  k.shape = shape;
  double radius = 0.0;
  for_each_cell(tight, [&](const Coord& j, std::size_t lin) {
    if (k.values.values()[lin] == 0.0) return;
    double s = 0.0;
    for (auto c : j) s = shape == SupportShape::box ? std::max(s, std::abs(static_cast<double>(c))) : s + static_cast<double>(c * c);
    radius = std::max(radius, shape == SupportShape::box ? s : std::sqrt(s));
  });
  k.lambda_n = radius;
  return k;
}

LatticeSignal blur_apply(const BlurKernel& kernel, const LatticeSignal& signal) {
  return kernels::convolve(kernel.values, signal);
}

LatticeSignal add_noise(const LatticeSignal& signal, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise sigma must be finite and >= 0");
  LatticeSignal out = signal;
  if (sigma == 0.0) return out;
  auto v = out.values_mut();
  const auto cells = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < cells; ++i)
    v[static_cast<std::size_t>(i)] += sigma * rng::normal_at(seed, static_cast<std::uint64_t>(i));
  return out;
}

}  // namespace psfest
