#include "psfest/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "psfest/error.hpp"

namespace psfest {

std::string to_string(RidgeForm f) { return f == RidgeForm::norm_power ? "norm_power" : "theorem_form"; }

RidgeForm ridge_form_from_string(const std::string& s) {
  if (s == "norm_power") return RidgeForm::norm_power;
  if (s == "theorem_form") return RidgeForm::theorem_form;
  throw DomainError("unknown ridge form '" + s + "' (expected norm_power or theorem_form)");
}

void RidgeSpec::validate() const {
  if (!(h >= 0.0) || !std::isfinite(h)) throw DomainError("ridge level h must be finite and >= 0");
  if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("ridge exponent q must be finite and >= 0");
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("filter exponent r must be finite and >= 0");
  if (n < 1) throw DomainError("ridge coordinate scale n must be >= 1");
}

double ridge_shape(RidgeForm form, double q, std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  if (s == 0.0) return 0.0;
  double val = std::pow(std::sqrt(s), q);
  if (form == RidgeForm::theorem_form)
    for (double v : u) val /= std::max(std::abs(v), 1.0);
  return val;
}

double ridge_value(const RidgeSpec& spec, std::span<const double> t) {
  double u[8];
  std::vector<double> big;
  double* up = u;
  if (t.size() > 8) {
    big.resize(t.size());
    up = big.data();
  }
  for (std::size_t l = 0; l < t.size(); ++l) up[l] = static_cast<double>(spec.n) * t[l];
  return spec.h * ridge_shape(spec.form, spec.q, std::span<const double>(up, t.size()));
}

double raw_ridge(const RidgeSpec& spec, std::span<const double> t) {
  return std::pow(static_cast<double>(spec.n), static_cast<double>(t.size())) * ridge_value(spec, t);
}

double filter_gain(double a, double rho, double r) {
  if (a >= rho) {
    if (a == 0.0) throw DivisionError("filter: psi^Ft and ridge are both zero");
    return 1.0 / a;
  }
  const double ratio = a / rho;
  return std::pow(ratio, r) * a / (rho * rho);
}

double filter_pass(double a, double rho, double r) {
  if (a >= rho) {
    if (a == 0.0) throw DivisionError("filter: psi^Ft and ridge are both zero");
    return 1.0;
  }
  return std::pow(a / rho, r + 2.0);
}

cdouble filter_factor(cdouble psi, double rho, double r) {
  const double a = std::abs(psi);
  if (a >= rho) {
    if (a == 0.0) throw DivisionError("filter: psi^Ft and ridge are both zero");
    return 1.0 / psi;
  }
  return std::conj(psi) * (std::pow(a / rho, r) / (rho * rho));
}

PsfEstimator::PsfEstimator(PrismPattern pattern, RidgeSpec spec, IndexSet target, GridSizes grid)
    : pattern_(std::move(pattern)), spec_(spec), target_(std::move(target)), grid_(std::move(grid)) {
  spec_.validate();
  if (spec_.n != pattern_.n) throw DomainError("ridge coordinate scale differs from the pattern's pixel scale");
  if (grid_.size() != pattern_.dims() || target_.dims() != pattern_.dims())
    throw SizingError("estimator grid, target and pattern dimensions differ");
  const std::size_t cells = grid_cells(grid_);
  std::vector<cdouble> f(cells);
  std::vector<std::vector<double>> axes(grid_.size());
  for (std::size_t l = 0; l < grid_.size(); ++l) axes[l] = axis_frequencies(grid_[l]);
  const auto d = grid_.size();
  int failed = 0;

#pragma omp parallel
  {
    std::vector<double> t(d);
#pragma omp for schedule(static) reduction(| : failed)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells); ++i) {
      std::size_t lin = static_cast<std::size_t>(i);
      for (std::size_t l = d; l-- > 0;) {
        const auto m = static_cast<std::size_t>(grid_[l]);
        t[l] = axes[l][lin % m];
        lin /= m;
      }
      const cdouble psi = transform_closed_form(pattern_, t);
      const double rho = raw_ridge(spec_, t);
      if (std::abs(psi) == 0.0 && rho == 0.0) {
        failed = 1;
        continue;
      }
      f[static_cast<std::size_t>(i)] = filter_factor(psi, rho, spec_.r);
    }
  }
  if (failed) throw DivisionError("estimator: psi^Ft vanishes on the grid where the ridge is zero");
  filter_ = Spectrum(grid_, std::move(f));
}

GridSizes PsfEstimator::default_grid(const Box& observation, const Box& target, double oversample) {
  GridSizes g = oversampled_grid(observation, oversample);
  for (std::size_t l = 0; l < g.size(); ++l) g[l] = std::max(g[l], target.extent(l));
  return g;
}

LatticeSignal PsfEstimator::estimate(const LatticeSignal& y, double* max_imag) const {
  Spectrum s = dft_forward(y, grid_);
  auto v = s.values_mut();
  const auto f = filter_.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= f[i];
  InverseResult res = dft_inverse_on(s, target_);
  if (max_imag) *max_imag = res.max_imag;
  return std::move(res.signal);
}

Box default_target(const Box& support, double fraction) {
  Box b = support;
  for (std::size_t l = 0; l < b.dims(); ++l) {
    const auto pad = static_cast<std::int64_t>(std::ceil(fraction * static_cast<double>(support.extent(l))));
    b.lo[l] -= pad;
    b.hi[l] += pad;
  }
  return b;
}

LatticeSignal estimate_psf(const LatticeSignal& y, const PrismPattern& pattern, const RidgeSpec& spec,
                           const IndexSet& support_r, double oversample) {
  const GridSizes grid = PsfEstimator::default_grid(y.box(), support_r.bounding_box(), oversample);
  return PsfEstimator(pattern, spec, support_r, grid).estimate(y);
}

LatticeSignal scale_correct(const LatticeSignal& estimate, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("scale factor s must be finite and positive");
  if (s == 1.0) return estimate;
  const Box& in = estimate.box();
  const std::size_t d = in.dims();
  Box out = in;
  for (std::size_t l = 0; l < d; ++l) {
    // x / s must stay strictly inside (lo - 1, hi + 1) to touch a stored cell
    out.lo[l] = std::min(in.lo[l], static_cast<std::int64_t>(std::floor(s * static_cast<double>(in.lo[l] - 1))) + 1);
    out.hi[l] = std::max(in.hi[l], static_cast<std::int64_t>(std::ceil(s * static_cast<double>(in.hi[l] + 1))) - 1);
  }
  LatticeSignal res = LatticeSignal::zeros(out);
  auto rv = res.values_mut();
  std::vector<double> frac(d);
  Coord base(d), corner(d);
  const std::size_t corners = std::size_t{1} << d;
  for_each_cell(out, [&](const Coord& j, std::size_t lin) {
    for (std::size_t l = 0; l < d; ++l) {
      const double x = static_cast<double>(j[l]) / s;
      const double f = std::floor(x);
      base[l] = static_cast<std::int64_t>(f);
      frac[l] = x - f;
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < corners; ++c) {
      double w = 1.0;
      for (std::size_t l = 0; l < d; ++l) {
        const bool up = (c >> l) & 1U;
        corner[l] = base[l] + (up ? 1 : 0);
        w *= up ? frac[l] : 1.0 - frac[l];
      }
      if (w != 0.0) acc += w * estimate.at(corner);
    }
    rv[lin] = acc;
  });
  const double before = estimate.sum();
  const double after = res.sum();
  if (after != 0.0 && before != 0.0)
    for (auto& v : rv) v *= before / after;
  return res;
}

}  // namespace psfest
