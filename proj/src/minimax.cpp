#include "psfest/minimax.hpp"

#include <cmath>
#include <numbers>

#include "psfest/error.hpp"
#include "psfest/kernels.hpp"
#include "psfest/rng.hpp"

namespace psfest {

namespace {

double norm_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double base_log_normalizer(std::size_t dims, double p) {
  const double dd = static_cast<double>(dims);
  return std::lgamma(p + 1.0 + dd / 2.0) - std::lgamma(p + 1.0) - dd / 2.0 * std::log(std::numbers::pi);
}

}  // namespace

ModulatedBlur ModulatedBlur::make(std::size_t dims, double p, double delta, int theta, std::vector<double> xi) {
  if (dims < 1) throw DomainError("modulated blur needs d >= 1");
  if (!(p > 0.0)) throw DomainError("modulated blur needs p > 0");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("modulated blur needs delta > 0");
  if (theta != 0 && theta != 1) throw DomainError("theta must be 0 or 1");
  if (xi.empty()) xi.assign(dims, 2.0 * std::numbers::pi);
  if (xi.size() != dims) throw DomainError("modulation frequency has the wrong dimension");
  ModulatedBlur m;
  m.dims = dims;
  m.p = p;
  m.xi = std::move(xi);
  m.delta = delta;
  m.theta = theta;
  std::vector<double> w(m.xi);
  for (auto& v : w) v /= delta;
  m.c1 = 1.0 / (1.0 + theta * base_transform(dims, p, w));
  return m;
}

double base_density(std::size_t dims, double p, std::span<const double> x) {
  const double r2 = [&] {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  }();
  if (r2 >= 1.0) return 0.0;
  return std::exp(base_log_normalizer(dims, p)) * std::pow(1.0 - r2, p);
}

double base_transform(std::size_t dims, double p, std::span<const double> w) {
  const double a = norm_of(w);
  const double nu = static_cast<double>(dims) / 2.0 + p;
  if (a < 1e-8) return 1.0 - a * a / (4.0 * (nu + 1.0));
  return std::exp(std::lgamma(nu + 1.0) + nu * std::log(2.0 / a)) * std::cyl_bessel_j(nu, a);
}

double chi_theta(const ModulatedBlur& m, std::span<const double> x) {
  if (x.size() != m.dims) throw DomainError("chi_theta evaluated at a point of the wrong dimension");
  std::vector<double> y(x.begin(), x.end());
  double phase = 0.0;
  for (std::size_t l = 0; l < m.dims; ++l) {
    y[l] *= m.delta;
    phase += m.xi[l] * x[l];
  }
  const double dd = std::pow(m.delta, static_cast<double>(m.dims));
  return m.c1 * dd * base_density(m.dims, m.p, y) * (1.0 + m.theta * std::cos(phase));
}

BlurKernel phi_theta(const ModulatedBlur& m, std::int64_t n) {
  const ContinuumBlur g = ContinuumBlur::custom([m](std::span<const double> x) { return chi_theta(m, x); }, m.radius(),
                                                m.dims, SupportShape::sphere);
  return discretize(g, n);
}

Separation separation(const BlurKernel& phi0, const BlurKernel& phi1, const PrismPattern& pattern, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("separation needs sigma > 0");
  const Box common = bounding_union(phi0.box(), phi1.box());
  const LatticeSignal diff = phi0.values.on_box(common) - phi1.values.on_box(common);
  const LatticeSignal blurred = kernels::convolve(diff, render(pattern));
  Separation s;
  for (double v : blurred.values()) s.spatial += v * v;
  s.spatial /= sigma * sigma;

  const GridSizes grid = minimal_grid(blurred.box());
  const Spectrum dft = dft_forward(diff, grid);
  std::vector<double> samples(dft.size());
  std::vector<double> t(grid.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dft.frequency_of(i, t);
    samples[i] = std::norm(dft.values()[i]) * std::norm(transform_closed_form(pattern, t));
  }
  s.spectral = integrate_grid(samples, grid) / std::pow(2.0 * std::numbers::pi, static_cast<double>(grid.size())) /
               (sigma * sigma);
  const double scale = std::max(std::abs(s.spatial), std::abs(s.spectral));
  if (scale > 0.0 && std::abs(s.spatial - s.spectral) > 1e-8 * scale)
    throw ComputeError("separation: spatial and spectral routes disagree (" + std::to_string(s.spatial) + " vs " +
                       std::to_string(s.spectral) + ")");
  return s;
}

double standard_normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double lr_error(double r_n) {
  if (!(r_n >= 0.0)) throw DomainError("lr_error needs r_n >= 0");
  return standard_normal_sf(std::sqrt(r_n) / 2.0);
}

double pair_separation_s2(const BlurKernel& phi0, const BlurKernel& phi1, std::int64_t n) {
  if (phi0.dims() != phi1.dims()) throw DomainError("pair_separation_s2: dimension mismatch");
  const Box common = bounding_union(phi0.box(), phi1.box());
  const LatticeSignal diff = phi0.values.on_box(common) - phi1.values.on_box(common);
  double s = 0.0;
  for (double v : diff.values()) s += v * v;
  return std::pow(static_cast<double>(n), static_cast<double>(phi0.dims())) * s;
}

ClassificationMc lr_monte_carlo(const BlurKernel& phi0, const BlurKernel& phi1, const PrismPattern& pattern,
                                double sigma, std::int64_t trials, std::uint64_t root_seed) {
  if (!(sigma > 0.0)) throw DomainError("lr_monte_carlo needs sigma > 0");
  if (trials < 1) throw DomainError("lr_monte_carlo needs at least one trial");
  const LatticeSignal psi = render(pattern);
  const LatticeSignal a0raw = blur_apply(phi0, psi);
  const LatticeSignal a1raw = blur_apply(phi1, psi);
  const Box t = bounding_union(a0raw.box(), a1raw.box());
  const LatticeSignal a0 = a0raw.on_box(t);
  const LatticeSignal a1 = a1raw.on_box(t);
  const auto v0 = a0.values();
  const auto v1 = a1.values();
  const std::size_t cells = v0.size();

  std::int64_t errors = 0;
#pragma omp parallel for schedule(static) reduction(+ : errors)
  for (std::int64_t k = 0; k < trials; ++k) {
    const int theta = static_cast<int>(k % 2);
    const auto key = rng::derive_seed(root_seed, static_cast<std::uint64_t>(k));
    const auto truth = theta == 0 ? v0 : v1;
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      const double y = truth[i] + sigma * rng::normal_at(key, i);
      s0 += (y - v0[i]) * (y - v0[i]);
      s1 += (y - v1[i]) * (y - v1[i]);
    }
    const int decided = s1 < s0 ? 1 : 0;
    if (decided != theta) ++errors;
  }
  ClassificationMc mc;
  mc.trials = trials;
  mc.errors = errors;
  mc.rate = static_cast<double>(errors) / static_cast<double>(trials);
  mc.binomial_se = std::sqrt(mc.rate * (1.0 - mc.rate) / static_cast<double>(trials));
  return mc;
}

double lemma51_integral(double z, int d, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw DomainError("lemma51_integral needs 0 < eps < 1");
  if (!(z >= 0.0)) throw DomainError("lemma51_integral needs z >= 0");
  if (d < 1) throw DomainError("lemma51_integral needs d >= 1");
  const double zp = z + 1.0;
  const double head = std::pow(eps, zp) / zp;  // exact I_1
  const double log_eps = -std::log(eps);
  double value = head;
  double j_term = 1.0;  // |log eps|^{k} / k!
  for (int k = 2; k <= d; ++k) {
    j_term *= log_eps / static_cast<double>(k - 1);
    value = value / zp + head * j_term;
  }
  return value;
}

}  // namespace psfest
