#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psfest/blur.hpp"
#include "psfest/estimator.hpp"
#include "psfest/test_pattern.hpp"

namespace psfest {

struct RiskReport {
  double msse = 0.0;           // closed-form total or Monte Carlo mean SSE
  double sse_sd = 0.0;         // sample standard deviation of SSE over replicates
  double sse_se = 0.0;         // standard error of the mean SSE
  double variance_term = 0.0;  // closed-form decomposition
  double bias_sq_term = 0.0;
  double closed_form = 0.0;    // variance_term + bias_sq_term
  std::int64_t replicates = 0; // 0 for a closed-form report
  double h = 0.0;
  double r = 0.0;
  double sigma = 0.0;
  std::int64_t n = 1;
  std::size_t dims = 2;
  double card_t = 0.0;
  std::string window;
  std::vector<double> per_replicate;

  double nd_msse() const;
};

/// Sum over the window of (estimate - truth)^2, both read as zero off their boxes.
double sse(const LatticeSignal& estimate, const LatticeSignal& truth, const IndexSet& window);

/// |psi^Ft|, the ridge shape and |phi^Ft|^2 sampled once on a grid, so that
/// the risk at any (h, r, sigma) is a single pass over the samples.
class ClosedFormRisk {
 public:
  ClosedFormRisk(const PrismPattern& pattern, const BlurKernel& kernel, RidgeForm form, double q, GridSizes grid);

  struct Terms {
    double variance = 0.0;
    double bias_sq = 0.0;
    double total() const { return variance + bias_sq; }
  };
  Terms evaluate(double h, double r, double sigma, double card_t) const;

  const GridSizes& grid() const { return grid_; }

 private:
  GridSizes grid_;
  std::vector<double> abs_psi_;
  std::vector<double> ridge_unit_;  // raw ridge at h = 1
  std::vector<double> phi_sq_;
};

RiskReport msse_closed_form(const PrismPattern& pattern, const BlurKernel& kernel, const RidgeSpec& spec, double sigma,
                            double card_t, const GridSizes& grid);

struct RescaledRisk {
  double nd_msse = 0.0;
  double tau = 0.0;  // n^{-d} #T
  double variance = 0.0;
  double bias_sq = 0.0;
};

/// n^d MSSE computed over A_n = [-n pi, n pi]^d with psi_n^Ft, phi_n^Ft and rho_n.
RescaledRisk msse_rescaled(const PrismPattern& pattern, const BlurKernel& kernel, const RidgeSpec& spec, double sigma,
                           double card_t, const GridSizes& grid);

/// Smallest grid at least as large as the given one on which the prism's
/// transform has no exact zeros (gcd(m_l, M_l) = 1 on every axis).
GridSizes zero_free_grid(const PrismPattern& pattern, GridSizes grid);

/// One simulated configuration: truth, observation window T, DFT grid and
/// SSE window.
struct SimulationConfig {
  PrismPattern pattern;
  BlurKernel kernel;
  RidgeSpec ridge;
  double sigma = 0.0;
  Box observation;
  GridSizes grid;
  IndexSet window;

  /// T = R (+) S, grid = ceil(oversample * extent(T)) made zero-free, window = one full grid
  /// period containing the kernel support (truth zero-padded).
  static SimulationConfig standard(PrismPattern pattern, BlurKernel kernel, RidgeSpec ridge, double sigma,
                                   double oversample = 2.0);

  double card_t() const { return static_cast<double>(observation.cells()); }
};

RiskReport closed_form_report(const SimulationConfig& cfg);

/// render -> blur -> noise -> estimate -> sse for each replicate, replicate k
/// drawing noise from rng::derive_seed(root_seed, k).
RiskReport monte_carlo_msse(const SimulationConfig& cfg, std::int64_t replicates, std::uint64_t root_seed);

enum class HSearchMode { closed_form, monte_carlo };

struct HSearchResult {
  double h_star = 0.0;
  RiskReport report;
  std::vector<double> h_values;
  std::vector<double> msse_values;  // +inf where the filter is undefined
};

std::vector<double> linear_h_grid(double lo, double hi, double step);
std::vector<double> log_h_grid(double lo, double hi, std::size_t count);

/// Minimising h over the grid (ties go to the smaller h).
HSearchResult optimize_h(const SimulationConfig& cfg, std::span<const double> h_grid,
                         HSearchMode mode = HSearchMode::closed_form, std::int64_t replicates = 101,
                         std::uint64_t root_seed = 0);

struct RateRule {
  std::size_t dims = 2;
  double lambda_const = 2.0;  // lambda_n = lambda_const * n^e pixels
  std::optional<double> lambda_exponent;  // e; (d+1)/(3d) when unset
  double sigma2_const = 1.0;  // sigma_n^2 = sigma2_const / n
  double h_const = 1.0;       // h_n = h_const * (lambda_n^d sigma_n^2 / n^d)^{1/2}
  double block_fraction = 0.25;
  double p = 5.0;
  double q = 5.0;
  double r = 1.0;
  RidgeForm form = RidgeForm::norm_power;
  double oversample = 2.0;
};

struct RateRow {
  std::int64_t n = 0;
  double lambda_n = 0.0;
  double sigma = 0.0;
  double h = 0.0;
  double nd_msse = 0.0;
  double variance = 0.0;
  double bias_sq = 0.0;
  double envelope = 0.0;  // (lambda_n^d sigma_n^2 / n^d)^{1/2} (log n)^{d-1}
  double ratio = 0.0;
};

SimulationConfig rate_config(std::int64_t n, const RateRule& rule);
/// h_const making the rule's h_n the closed-form optimum at one n (searched
/// on a log grid of `count` points over [1e-14, 10] times the rule's h at h_const = 1).
double calibrate_h_const(std::int64_t n, RateRule rule, std::size_t count = 301);
std::vector<RateRow> rate_study(std::span<const std::int64_t> ns, const RateRule& rule);

}  // namespace psfest
