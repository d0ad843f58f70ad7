#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psfest/blur.hpp"
#include "psfest/estimator.hpp"
#include "psfest/io.hpp"
#include "psfest/restoration.hpp"
#include "psfest/risk.hpp"

namespace psfest::experiment {

struct RunOptions {
  io::Config config;
  std::optional<std::uint64_t> seed;  // overrides experiment.seed
  std::filesystem::path out_dir = ".";
};

/// Root seed from the options or the config (required either way).
std::uint64_t root_seed(const RunOptions& opt);

PrismPattern pattern_from(const io::Config& c);
ContinuumBlur blur_from(const io::Config& c);
RidgeSpec ridge_from(const io::Config& c, std::int64_t n);
std::vector<double> h_grid_from(const io::Config& c);
SimulationConfig simulation_from(const io::Config& c);

/// Monte Carlo risk of the configured estimator; also saves replicate 0's
/// observation.
RiskReport run_simulate(const RunOptions& opt);

/// One observation of the test pattern on T (simulated, or read from
/// estimate.input) and the kernel estimated from it.
struct EstimateResult {
  SimulationConfig sim;
  LatticeSignal observation;
  LatticeSignal estimate;  // after scale correction
  double sse = 0.0;        // against the true kernel over the estimate's box
  double max_imag = 0.0;
};
EstimateResult run_estimate(const RunOptions& opt);

struct Table1Cell {
  double sigma = 0.0;
  double r = 0.0;
  HSearchResult search;
  RiskReport mc;  // replicates at h*
};
std::vector<Table1Cell> run_table1(const RunOptions& opt);

std::vector<RateRow> run_rate_study(const RunOptions& opt);

struct LowerBoundRow {
  std::int64_t n = 0;
  double delta = 0.0;
  double sigma = 0.0;
  double r_n = 0.0;
  double r_n_spectral = 0.0;
  double pi_n = 0.0;
  double s2 = 0.0;
  double nd_msse0 = 0.0;
  double nd_msse1 = 0.0;
  double bound = 0.0;        // s_n^2 pi_n / 4
  double ratio_half = 0.0;   // sup n^d MSSE / (sigma^2 / n^d)^{1/2}
  double ratio_third = 0.0;  // sup n^d MSSE / (sigma^2 / n^d)^{1/3}
};
std::vector<LowerBoundRow> run_lower_bound(const RunOptions& opt);

struct Lemma51Row {
  int d = 1;
  double z = 0.0;
  double eps = 0.0;
  double value = 0.0;
  double ratio = 0.0;  // I_d / (eps^{z+1} |log eps|^{d-1})
};
std::vector<Lemma51Row> run_lemma51(const RunOptions& opt);

/// Synthetic piecewise-constant scene on [0, side)^2 with a flat border of
/// width `margin`.
LatticeSignal synthetic_scene(std::int64_t side, std::int64_t margin);

struct RestoreRow {
  std::string method;
  std::string psf;
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double mse = 0.0;
};
struct RestoreResult {
  double mse_degraded = 0.0;
  std::vector<RestoreRow> rows;
};
RestoreResult run_restore(const RunOptions& opt);

}  // namespace psfest::experiment
