#include "psfest/restoration.hpp"

#include <cmath>

#include "psfest/error.hpp"

namespace psfest {

void RestorationSpec::validate() const {
  if (method == RestorationMethod::inverse_threshold && !(gamma > 0.0)) throw DomainError("inverse filter needs gamma > 0");
  if (method == RestorationMethod::wiener) {
    if (!(alpha > 0.0)) throw DomainError("wiener filter needs alpha > 0");
    if (!(beta >= 0.0)) throw DomainError("wiener filter needs beta >= 0");
  }
}

namespace {

RestorationResult finish(Spectrum s, const LatticeSignal& y) {
  InverseResult inv = dft_inverse_on(s, IndexSet::box(y.box()));
  RestorationResult out;
  out.image = std::move(inv.signal);
  out.max_imag = inv.max_imag;
  return out;
}

}  // namespace

RestorationResult inverse_filter(const LatticeSignal& y, const LatticeSignal& psf, double gamma, const GridSizes& grid) {
  if (!(gamma > 0.0)) throw DomainError("inverse filter needs gamma > 0");
  if (psf.max_abs() == 0.0) throw DomainError("inverse filter needs a nonzero psf");
  Spectrum ys = dft_forward(y, grid);
  const Spectrum ps = dft_forward(psf, grid);
  auto v = ys.values_mut();
  std::size_t passed = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cdouble p = ps.values()[i];
    if (std::abs(p) > gamma) {
      v[i] /= p;
      ++passed;
    } else {
      v[i] = 0.0;
    }
  }
  RestorationResult out = finish(std::move(ys), y);
  out.passed = passed;
  out.all_suppressed = passed == 0;
  return out;
}

RestorationResult wiener_filter(const LatticeSignal& y, const LatticeSignal& psf, double alpha, double beta,
                                const GridSizes& grid) {
  if (!(alpha > 0.0)) throw DomainError("wiener filter needs alpha > 0");
  if (!(beta >= 0.0)) throw DomainError("wiener filter needs beta >= 0");
  Spectrum ys = dft_forward(y, grid);
  const Spectrum ps = dft_forward(psf, grid);
  auto v = ys.values_mut();
  std::vector<double> t(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    ys.frequency_of(i, t);
    double norm2 = 0.0;
    for (double x : t) norm2 += x * x;
    const double reg = beta == 0.0 ? alpha : alpha * std::pow(std::sqrt(norm2), beta);
    const cdouble p = ps.values()[i];
    const double den = std::norm(p) + reg;
    if (den == 0.0) throw DivisionError("wiener filter: zero denominator at the zero frequency");
    v[i] *= std::conj(p) / den;
  }
  RestorationResult out = finish(std::move(ys), y);
  out.passed = v.size();
  return out;
}

RestorationResult restore(const LatticeSignal& y, const LatticeSignal& psf, const RestorationSpec& spec,
                          const GridSizes& grid) {
  spec.validate();
  return spec.method == RestorationMethod::inverse_threshold ? inverse_filter(y, psf, spec.gamma, grid)
                                                             : wiener_filter(y, psf, spec.alpha, spec.beta, grid);
}

LatticeSignal blur_periodic(const LatticeSignal& kernel, const LatticeSignal& image) {
  const GridSizes grid = minimal_grid(image.box());
  Spectrum s = dft_forward(image, grid);
  const Spectrum k = dft_forward(kernel, grid);
  auto v = s.values_mut();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= k.values()[i];
  return dft_inverse_on(s, IndexSet::box(image.box())).signal;
}

double windowed_mse(const LatticeSignal& a, const LatticeSignal& b, const Box& window) {
  if (window.empty()) throw DomainError("windowed_mse: empty window");
  double s = 0.0;
  for_each_cell(window, [&](const Coord& j, std::size_t) {
    const double e = a.at(j) - b.at(j);
    s += e * e;
  });
  return s / static_cast<double>(window.cells());
}

}  // namespace psfest
