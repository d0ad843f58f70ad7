#pragma once

#include <span>
#include <string>

#include "psfest/blur.hpp"
#include "psfest/lattice.hpp"
#include "psfest/test_pattern.hpp"

namespace psfest {

enum class RidgeForm { theorem_form, norm_power };

std::string to_string(RidgeForm f);
RidgeForm ridge_form_from_string(const std::string& s);

/// Ridge rho_n(u) = h * shape(u), evaluated at rescaled frequency u = n t.
struct RidgeSpec {
  RidgeForm form = RidgeForm::norm_power;
  double h = 0.0;
  double q = 5.0;
  double r = 1.0;
  std::int64_t n = 1;

  void validate() const;
};

/// theorem_form: ||u||^q / prod_l max(|u_l|, 1);  norm_power: ||u||^q.
double ridge_shape(RidgeForm form, double q, std::span<const double> u);
/// rho_n(n t) for a raw frequency t.
double ridge_value(const RidgeSpec& spec, std::span<const double> t);
/// The ridge in raw units, n^d rho_n(n t), compared against |psi^Ft(t)|.
double raw_ridge(const RidgeSpec& spec, std::span<const double> t);

/// conj(psi) min(1, |psi|/rho)^r / max(|psi|, rho)^2.
cdouble filter_factor(cdouble psi, double rho, double r);
/// |filter_factor| from |psi| alone.
double filter_gain(double abs_psi, double rho, double r);
/// filter_factor * psi = min(1, |psi|/rho)^{r+2}, the fraction of phi^Ft kept.
double filter_pass(double abs_psi, double rho, double r);

/// Ridge-regularised deconvolution of observations of a known prism. The
/// filter is sampled once on the frequency grid and reused for every y.
class PsfEstimator {
 public:
  PsfEstimator(PrismPattern pattern, RidgeSpec spec, IndexSet target, GridSizes grid);

  /// max(ceil(oversample * extent(T)), extent(target)) per axis.
  static GridSizes default_grid(const Box& observation, const Box& target, double oversample);

  /// phi_hat on the target set; optionally reports the largest discarded
  /// imaginary part.
  LatticeSignal estimate(const LatticeSignal& y, double* max_imag = nullptr) const;

  const GridSizes& grid() const { return grid_; }
  const IndexSet& target() const { return target_; }
  const Spectrum& filter() const { return filter_; }

 private:
  PrismPattern pattern_;
  RidgeSpec spec_;
  IndexSet target_;
  GridSizes grid_;
  Spectrum filter_;
};

/// Kernel support box dilated by a quarter of its extent on each side.
Box default_target(const Box& support, double fraction = 0.25);

LatticeSignal estimate_psf(const LatticeSignal& y, const PrismPattern& pattern, const RidgeSpec& spec,
                           const IndexSet& support_r, double oversample = 2.0);

/// phi_hat(x / s) by multilinear interpolation, rescaled to keep the
/// estimate's total mass. The output box covers both the input box and its
/// image under x -> s x.
LatticeSignal scale_correct(const LatticeSignal& estimate, double s);

}  // namespace psfest
