#include "psfest/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "psfest/error.hpp"
#include "psfest/rng.hpp"

namespace psfest {

namespace {

double pow_n(std::int64_t n, std::size_t d) { return std::pow(static_cast<double>(n), static_cast<double>(d)); }

// Grid average of samples through the frequency quadrature rule: (2 pi)^{-d} int_A.
double grid_mean(std::span<const double> samples, const GridSizes& grid) {
  return integrate_grid(samples, grid) / std::pow(2.0 * std::numbers::pi, static_cast<double>(grid.size()));
}

template <class F>
void fill_on_grid(const GridSizes& grid, std::vector<double>& out, F&& f) {
  const std::size_t d = grid.size();
  const std::size_t cells = grid_cells(grid);
  out.resize(cells);
  std::vector<std::vector<double>> axes(d);
  for (std::size_t l = 0; l < d; ++l) axes[l] = axis_frequencies(grid[l]);
#pragma omp parallel
  {
    std::vector<double> t(d);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells); ++i) {
      std::size_t lin = static_cast<std::size_t>(i);
      for (std::size_t l = d; l-- > 0;) {
        const auto m = static_cast<std::size_t>(grid[l]);
        t[l] = axes[l][lin % m];
        lin /= m;
      }
      out[static_cast<std::size_t>(i)] = f(std::span<const double>(t), static_cast<std::size_t>(i));
    }
  }
}

void check_kernel_fits(const BlurKernel& kernel, const GridSizes& grid) {
  for (std::size_t l = 0; l < grid.size(); ++l)
    if (kernel.box().extent(l) > grid[l]) throw SizingError("risk grid is smaller than the kernel support");
}

}  // namespace

GridSizes zero_free_grid(const PrismPattern& pattern, GridSizes grid) {
  for (std::size_t l = 0; l < grid.size(); ++l)
    while (std::gcd(pattern.width(l), grid[l]) != 1) ++grid[l];
  return grid;
}

double RiskReport::nd_msse() const { return pow_n(n, dims) * msse; }

double sse(const LatticeSignal& estimate, const LatticeSignal& truth, const IndexSet& window) {
  if (estimate.dims() != window.dims() || truth.dims() != window.dims()) throw DomainError("sse: dimension mismatch");
  const auto tv = truth.values();
  bool uncovered = false;
  for_each_cell(truth.box(), [&](const Coord& j, std::size_t lin) {
    if (tv[lin] != 0.0 && !window.contains(j)) uncovered = true;
  });
  if (uncovered) throw AccountingError("sse: window " + to_string(window.bounding_box()) + " excludes nonzero truth cells");
  double s = 0.0;
  for_each_cell(window.bounding_box(), [&](const Coord& j, std::size_t lin) {
    if (!window.member_at(lin)) return;
    const double e = estimate.at(j) - truth.at(j);
    s += e * e;
  });
  return s;
}

ClosedFormRisk::ClosedFormRisk(const PrismPattern& pattern, const BlurKernel& kernel, RidgeForm form, double q,
                               GridSizes grid)
    : grid_(std::move(grid)) {
  check_kernel_fits(kernel, grid_);
  RidgeSpec unit{form, 1.0, q, 0.0, pattern.n};
  unit.validate();
  const Spectrum phi = dft_forward(kernel.values, grid_);
  fill_on_grid(grid_, abs_psi_, [&](std::span<const double> t, std::size_t) { return std::abs(transform_closed_form(pattern, t)); });
  fill_on_grid(grid_, ridge_unit_, [&](std::span<const double> t, std::size_t) { return raw_ridge(unit, t); });
  fill_on_grid(grid_, phi_sq_, [&](std::span<const double>, std::size_t i) { return std::norm(phi.values()[i]); });
}

ClosedFormRisk::Terms ClosedFormRisk::evaluate(double h, double r, double sigma, double card_t) const {
  if (!(h >= 0.0) || !(r >= 0.0) || !(sigma >= 0.0)) throw DomainError("closed-form risk needs h, r, sigma >= 0");
  const std::size_t cells = abs_psi_.size();
  std::vector<double> var(cells), bias(cells);
  int failed = 0;
#pragma omp parallel for schedule(static) reduction(| : failed)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(cells); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double a = abs_psi_[i];
    const double rho = h * ridge_unit_[i];
    if (a == 0.0 && rho == 0.0) {
      failed = 1;
      continue;
    }
    const double g = filter_gain(a, rho, r);
    const double keep = filter_pass(a, rho, r);
    var[i] = g * g;
    bias[i] = phi_sq_[i] * (1.0 - keep) * (1.0 - keep);
  }
  if (failed) throw DivisionError("closed-form risk: psi^Ft vanishes on the grid where the ridge is zero");
  Terms t;
  t.variance = sigma * sigma * card_t * grid_mean(var, grid_);
  t.bias_sq = grid_mean(bias, grid_);
  return t;
}

RiskReport msse_closed_form(const PrismPattern& pattern, const BlurKernel& kernel, const RidgeSpec& spec, double sigma,
                            double card_t, const GridSizes& grid) {
  spec.validate();
  const ClosedFormRisk risk(pattern, kernel, spec.form, spec.q, grid);
  const auto terms = risk.evaluate(spec.h, spec.r, sigma, card_t);
  RiskReport rep;
  rep.variance_term = terms.variance;
  rep.bias_sq_term = terms.bias_sq;
  rep.closed_form = terms.total();
  rep.msse = rep.closed_form;
  rep.h = spec.h;
  rep.r = spec.r;
  rep.sigma = sigma;
  rep.n = pattern.n;
  rep.dims = pattern.dims();
  rep.card_t = card_t;
  rep.window = "grid";
  for (auto m : grid) rep.window += ":" + std::to_string(m);
  return rep;
}

RescaledRisk msse_rescaled(const PrismPattern& pattern, const BlurKernel& kernel, const RidgeSpec& spec, double sigma,
                           double card_t, const GridSizes& grid) {
  spec.validate();
  check_kernel_fits(kernel, grid);
  const std::size_t d = grid.size();
  const double n = static_cast<double>(pattern.n);
  const double nd = pow_n(pattern.n, d);
  RescaledRisk out;
  out.tau = card_t / nd;
  // phi_n^Ft(u) = sum_j phi(j) e^{i u.j / n}, i.e. the raw transform at t = u / n
  const Spectrum phi = dft_forward(kernel.values, grid);
  std::vector<double> var, bias;
  fill_on_grid(grid, var, [&](std::span<const double> t, std::size_t) {
    std::vector<double> u(t.begin(), t.end());
    for (auto& x : u) x *= n;
    const double a = std::abs(rescaled_transform(pattern, u));
    const double rho = spec.h * ridge_shape(spec.form, spec.q, u);
    if (a == 0.0 && rho == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double g = filter_gain(a, rho, spec.r);
    return g * g;
  });
  fill_on_grid(grid, bias, [&](std::span<const double> t, std::size_t i) {
    std::vector<double> u(t.begin(), t.end());
    for (auto& x : u) x *= n;
    const double a = std::abs(rescaled_transform(pattern, u));
    const double rho = spec.h * ridge_shape(spec.form, spec.q, u);
    if (a == 0.0 && rho == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double keep = filter_pass(a, rho, spec.r);
    return std::norm(phi.values()[i]) * (1.0 - keep) * (1.0 - keep);
  });
  for (double v : var)
    if (std::isnan(v)) throw DivisionError("rescaled risk: psi_n^Ft vanishes on the grid where the ridge is zero");
  // (2 pi)^{-d} int_{A_n} du with u_k = n t_k: weight (2 pi n)^d / prod M
  const double weight = nd / static_cast<double>(grid_cells(grid));
  auto quad = [&](const std::vector<double>& s) {
    double acc = 0.0, c = 0.0;
    for (double v : s) {
      const double t = acc + v;
      c += std::abs(acc) >= std::abs(v) ? (acc - t) + v : (v - t) + acc;
      acc = t;
    }
    return weight * (acc + c);
  };
  out.variance = sigma * sigma * out.tau / nd * quad(var);
  out.bias_sq = quad(bias);
  out.nd_msse = out.variance + out.bias_sq;
  return out;
}

SimulationConfig SimulationConfig::standard(PrismPattern pattern, BlurKernel kernel, RidgeSpec ridge, double sigma,
                                            double oversample) {
  SimulationConfig c;
  c.observation = minkowski(kernel.box(), pattern.support());
  c.grid = zero_free_grid(pattern, oversampled_grid(c.observation, oversample));
  Box w = kernel.box();
  for (std::size_t l = 0; l < w.dims(); ++l) {
    const std::int64_t slack = c.grid[l] - kernel.box().extent(l);
    w.lo[l] -= slack / 2;
    w.hi[l] = w.lo[l] + c.grid[l] - 1;
  }
  c.window = IndexSet::box(w);
  c.pattern = std::move(pattern);
  c.kernel = std::move(kernel);
  c.ridge = ridge;
  c.sigma = sigma;
  return c;
}

RiskReport closed_form_report(const SimulationConfig& cfg) {
  RiskReport rep = msse_closed_form(cfg.pattern, cfg.kernel, cfg.ridge, cfg.sigma, cfg.card_t(), cfg.grid);
  rep.window = to_string(cfg.window.bounding_box());
  return rep;
}

RiskReport monte_carlo_msse(const SimulationConfig& cfg, std::int64_t replicates, std::uint64_t root_seed) {
  if (replicates < 2) throw DomainError("monte_carlo_msse needs at least 2 replicates");
  RiskReport rep = closed_form_report(cfg);
  const PsfEstimator est(cfg.pattern, cfg.ridge, cfg.window, cfg.grid);
  const LatticeSignal clean = blur_apply(cfg.kernel, render(cfg.pattern)).on_box(cfg.observation);

  std::vector<double> values(static_cast<std::size_t>(replicates));
  std::int64_t failed_at = -1;
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < replicates; ++k) {
    try {
      const LatticeSignal y = add_noise(clean, cfg.sigma, rng::derive_seed(root_seed, static_cast<std::uint64_t>(k)));
      values[static_cast<std::size_t>(k)] = sse(est.estimate(y), cfg.kernel.values, cfg.window);
    } catch (const std::exception& e) {
#pragma omp critical(psfest_mc_failure)
      if (failed_at < 0 || k < failed_at) {
        failed_at = k;
        failure = e.what();
      }
    }
  }
  if (failed_at >= 0) throw ComputeError("replicate " + std::to_string(failed_at) + ": " + failure);

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(replicates);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  rep.msse = mean;
  rep.sse_sd = std::sqrt(ss / static_cast<double>(replicates - 1));
  rep.sse_se = rep.sse_sd / std::sqrt(static_cast<double>(replicates));
  rep.replicates = replicates;
  rep.per_replicate = std::move(values);
  return rep;
}

std::vector<double> linear_h_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("h grid needs finite bounds and step > 0");
  if (hi < lo) throw DomainError("h grid is empty (hi < lo)");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + static_cast<double>(i) * step;
  return g;
}

std::vector<double> log_h_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw DomainError("log h grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  return g;
}

HSearchResult optimize_h(const SimulationConfig& cfg, std::span<const double> h_grid, HSearchMode mode,
                         std::int64_t replicates, std::uint64_t root_seed) {
  if (h_grid.empty()) throw DomainError("optimize_h: empty h grid");
  HSearchResult res;
  res.h_values.assign(h_grid.begin(), h_grid.end());
  std::sort(res.h_values.begin(), res.h_values.end());
  res.msse_values.assign(res.h_values.size(), std::numeric_limits<double>::infinity());

  if (mode == HSearchMode::closed_form) {
    const ClosedFormRisk risk(cfg.pattern, cfg.kernel, cfg.ridge.form, cfg.ridge.q, cfg.grid);
    for (std::size_t i = 0; i < res.h_values.size(); ++i) {
      try {
        res.msse_values[i] = risk.evaluate(res.h_values[i], cfg.ridge.r, cfg.sigma, cfg.card_t()).total();
      } catch (const DivisionError&) {
      }
    }
  } else {
    for (std::size_t i = 0; i < res.h_values.size(); ++i) {
      SimulationConfig c = cfg;
      c.ridge.h = res.h_values[i];
      try {
        res.msse_values[i] = monte_carlo_msse(c, replicates, root_seed).msse;
      } catch (const ComputeError&) {
      } catch (const DivisionError&) {
      }
    }
  }

  std::size_t best = res.h_values.size();
  for (std::size_t i = 0; i < res.h_values.size(); ++i)
    if (std::isfinite(res.msse_values[i]) && (best == res.h_values.size() || res.msse_values[i] < res.msse_values[best]))
      best = i;
  if (best == res.h_values.size()) throw ComputeError("optimize_h: the risk is undefined at every grid point");
  res.h_star = res.h_values[best];

  SimulationConfig c = cfg;
  c.ridge.h = res.h_star;
  res.report = mode == HSearchMode::closed_form ? closed_form_report(c) : monte_carlo_msse(c, replicates, root_seed);
  return res;
}

SimulationConfig rate_config(std::int64_t n, const RateRule& rule) {
  const double d = static_cast<double>(rule.dims);
  const double e = rule.lambda_exponent.value_or((d + 1.0) / (3.0 * d));
  const double lambda_n = rule.lambda_const * std::pow(static_cast<double>(n), e);
  const double sigma = std::sqrt(rule.sigma2_const / static_cast<double>(n));
  const double h = rule.h_const * std::sqrt(std::pow(lambda_n, d) * sigma * sigma / pow_n(n, rule.dims));
  const auto side = std::max<std::int64_t>(1, std::llround(rule.block_fraction * static_cast<double>(n)));
  const BlurKernel kernel = discretize(ContinuumBlur::polynomial_product(rule.p, lambda_n / static_cast<double>(n), rule.dims), n);
  const PrismPattern pattern(Coord(rule.dims, 0), Coord(rule.dims, side - 1), n);
  RidgeSpec ridge{rule.form, h, rule.q, rule.r, n};
  return SimulationConfig::standard(pattern, kernel, ridge, sigma, rule.oversample);
}

double calibrate_h_const(std::int64_t n, RateRule rule, std::size_t count) {
  rule.h_const = 1.0;
  const SimulationConfig cfg = rate_config(n, rule);
  const double base = cfg.ridge.h;
  if (!(base > 0.0)) throw DomainError("calibrate_h_const: rule gives h = 0");
  const auto grid = log_h_grid(base * 1e-14, base * 10.0, count);
  return optimize_h(cfg, grid).h_star / base;
}

std::vector<RateRow> rate_study(std::span<const std::int64_t> ns, const RateRule& rule) {
  std::vector<RateRow> rows;
  const double d = static_cast<double>(rule.dims);
  for (const auto n : ns) {
    const SimulationConfig cfg = rate_config(n, rule);
    const RescaledRisk risk = msse_rescaled(cfg.pattern, cfg.kernel, cfg.ridge, cfg.sigma, cfg.card_t(), cfg.grid);
    RateRow row;
    row.n = n;
    row.lambda_n = cfg.kernel.lambda_n;
    row.sigma = cfg.sigma;
    row.h = cfg.ridge.h;
    row.nd_msse = risk.nd_msse;
    row.variance = risk.variance;
    row.bias_sq = risk.bias_sq;
    row.envelope = std::sqrt(std::pow(row.lambda_n, d) * cfg.sigma * cfg.sigma / pow_n(n, rule.dims)) *
                   std::pow(std::log(static_cast<double>(n)), d - 1.0);
    row.ratio = row.envelope > 0.0 ? row.nd_msse / row.envelope : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace psfest
