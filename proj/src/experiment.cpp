#include "psfest/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psfest/error.hpp"
#include "psfest/minimax.hpp"
#include "psfest/rng.hpp"

namespace psfest::experiment {

namespace fs = std::filesystem;
using io::format_double;

namespace {

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

fs::path out_path(const RunOptions& opt, const std::string& name) {
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + opt.out_dir.string() + ": " + ec.message());
  return opt.out_dir / name;
}

// Config values are checked here so that failures surface as ConfigError
// naming the field rather than as a precondition failure deep in a module.
template <class F>
auto checked(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

}  // namespace

std::uint64_t root_seed(const RunOptions& opt) {
  if (opt.seed) return *opt.seed;
  if (!opt.config.has("experiment.seed")) throw ConfigError("experiment.seed: required (or pass --seed)");
  return opt.config.require_u64("experiment.seed");
}

PrismPattern pattern_from(const io::Config& c) {
  const auto dims = c.get_int("pattern.dims", 2);
  if (dims < 1 || dims > 3) throw ConfigError("pattern.dims: must be 1, 2 or 3");
  const auto n = c.get_int("pattern.n", 128);
  if (c.has("pattern.a") || c.has("pattern.b")) {
    const auto a = c.get_ints("pattern.a", {});
    const auto b = c.get_ints("pattern.b", {});
    if (a.size() != static_cast<std::size_t>(dims) || b.size() != static_cast<std::size_t>(dims))
      throw ConfigError("pattern.a/pattern.b: need " + std::to_string(dims) + " coordinates each");
    return checked("pattern", [&] { return PrismPattern(a, b, n); });
  }
  const auto grid = c.get_int("pattern.grid", n);
  const auto side = c.get_int("pattern.side", 32);
  return checked("pattern.side", [&] { return PrismPattern::centered(static_cast<std::size_t>(dims), side, grid, n); });
}

ContinuumBlur blur_from(const io::Config& c) {
  const auto dims = static_cast<std::size_t>(c.get_int("pattern.dims", 2));
  const std::string family = c.get_string("blur.family", "polynomial_product");
  const double p = c.get_double("blur.p", 5.0);
  const double lambda = c.get_double("blur.lambda", 0.2);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("blur.lambda: must be finite and > 0");
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("blur.p: must be finite and > 0");
  return checked("blur", [&] {
    if (family == "polynomial_product") return ContinuumBlur::polynomial_product(p, lambda, dims);
    if (family == "spherical_polynomial") return ContinuumBlur::spherical_polynomial(p, lambda, dims);
    if (family == "gaussian") return ContinuumBlur::gaussian(c.get_double("blur.sd", lambda / 2.0), lambda, dims);
    throw ConfigError("blur.family: unknown family '" + family + "'");
  });
}

RidgeSpec ridge_from(const io::Config& c, std::int64_t n) {
  RidgeSpec s;
  s.form = checked("ridge.form", [&] { return ridge_form_from_string(c.get_string("ridge.form", "norm_power")); });
  s.h = c.get_double("ridge.h", 0.0);
  s.q = c.get_double("ridge.q", 5.0);
  s.r = c.get_double("ridge.r", 50.0);
  s.n = n;
  checked("ridge", [&] {
    s.validate();
    return 0;
  });
  return s;
}

std::vector<double> h_grid_from(const io::Config& c) {
  const std::string scale = c.get_string("search.scale", "linear");
  return checked("search", [&] {
    if (scale == "linear")
      return linear_h_grid(c.get_double("search.h_min", 0.0), c.get_double("search.h_max", 1e-3),
                           c.get_double("search.h_step", 1e-5));
    if (scale == "log")
      return log_h_grid(c.get_double("search.h_min", 1e-13), c.get_double("search.h_max", 1e-7),
                        static_cast<std::size_t>(c.get_int("search.h_count", 121)));
    throw ConfigError("search.scale: expected linear or log, got '" + scale + "'");
  });
}

SimulationConfig simulation_from(const io::Config& c) {
  const PrismPattern pattern = pattern_from(c);
  const ContinuumBlur g = blur_from(c);
  const BlurKernel kernel = checked("blur", [&] { return discretize(g, pattern.n); });
  const RidgeSpec ridge = ridge_from(c, pattern.n);
  const double sigma = c.get_double("noise.sigma", 0.1);
  if (!(sigma >= 0.0)) throw ConfigError("noise.sigma: must be >= 0");
  const double oversample = c.get_double("experiment.oversample", 2.0);
  return checked("experiment.oversample", [&] { return SimulationConfig::standard(pattern, kernel, ridge, sigma, oversample); });
}

// ---------------------------------------------------------------- simulate / estimate

RiskReport run_simulate(const RunOptions& opt) {
  const auto& c = opt.config;
  const SimulationConfig sim = simulation_from(c);
  const std::uint64_t seed = root_seed(opt);
  const auto replicates = c.get_int("experiment.replicates", 101);
  if (replicates < 2) throw ConfigError("experiment.replicates: must be >= 2");

  const RiskReport rep = monte_carlo_msse(sim, replicates, seed);
  io::emit_report({rep}, out_path(opt, "simulate.csv"));

  io::CsvWriter w(out_path(opt, "simulate_replicates.csv"), {"replicate", "seed", "sse"});
  for (std::int64_t k = 0; k < replicates; ++k)
    w.row({fmt_int(k), std::to_string(rng::derive_seed(seed, static_cast<std::uint64_t>(k))),
           format_double(rep.per_replicate[static_cast<std::size_t>(k)])});
  w.close();

  const LatticeSignal clean = blur_apply(sim.kernel, render(sim.pattern)).on_box(sim.observation);
  const LatticeSignal y0 = add_noise(clean, sim.sigma, rng::derive_seed(seed, 0));
  io::write_signal_csv(y0, out_path(opt, "observation.csv"));
  if (y0.dims() == 2) io::save_image(y0, out_path(opt, "observation.pgm"), 16);
  return rep;
}

EstimateResult run_estimate(const RunOptions& opt) {
  const auto& c = opt.config;
  EstimateResult res;
  res.sim = simulation_from(c);
  const std::string input = c.get_string("estimate.input", "");
  if (!input.empty()) {
    res.observation = io::read_signal_csv(input);
    if (res.observation.dims() != res.sim.pattern.dims()) throw ConfigError("estimate.input: dimension differs from pattern.dims");
  } else {
    const LatticeSignal clean = blur_apply(res.sim.kernel, render(res.sim.pattern)).on_box(res.sim.observation);
    res.observation = add_noise(clean, res.sim.sigma, rng::derive_seed(root_seed(opt), 0));
  }
  const double fraction = c.get_double("estimate.target_fraction", 0.25);
  const double s = c.get_double("estimate.scale", 1.0);
  if (!(s > 0.0)) throw ConfigError("estimate.scale: must be positive");
  const Box target = default_target(res.sim.kernel.box(), fraction);
  const GridSizes grid = PsfEstimator::default_grid(res.observation.box(), target, c.get_double("experiment.oversample", 2.0));
  const PsfEstimator est(res.sim.pattern, res.sim.ridge, IndexSet::box(target), grid);
  res.estimate = scale_correct(est.estimate(res.observation, &res.max_imag), s);
  res.sse = sse(res.estimate, res.sim.kernel.values, IndexSet::box(bounding_union(res.estimate.box(), res.sim.kernel.box())));

  io::write_signal_csv(res.estimate, out_path(opt, "estimate.csv"));
  if (res.estimate.dims() == 2) io::save_image(res.estimate, out_path(opt, "estimate.pgm"), 16);
  io::CsvWriter w(out_path(opt, "estimate_report.csv"),
                  {"n", "sigma", "r", "h", "scale", "sse", "nd_sse", "sum", "peak", "true_peak", "max_imag"});
  const double nd = std::pow(static_cast<double>(res.sim.pattern.n), static_cast<double>(res.sim.pattern.dims()));
  double peak = 0.0;
  for (double v : res.estimate.values()) peak = std::max(peak, v);
  w.row({fmt_int(res.sim.pattern.n), format_double(res.sim.sigma), format_double(res.sim.ridge.r),
         format_double(res.sim.ridge.h), format_double(s), format_double(res.sse), format_double(nd * res.sse),
         format_double(res.estimate.sum()), format_double(peak), format_double(res.sim.kernel.values.max_abs()),
         format_double(res.max_imag)});
  w.close();
  return res;
}

// ---------------------------------------------------------------- table 1

std::vector<Table1Cell> run_table1(const RunOptions& opt) {
  const auto& c = opt.config;
  const std::uint64_t seed = root_seed(opt);
  const auto replicates = c.get_int("experiment.replicates", 101);
  if (replicates < 2) throw ConfigError("experiment.replicates: must be >= 2");
  const auto sigmas = c.get_doubles("table1.sigma_values", {0.05, 0.1, 0.2});
  const auto rs = c.get_doubles("table1.r_values", {1.0, 10.0, 50.0, 55.0});
  const auto hgrid = h_grid_from(c);
  const std::string mode_s = c.get_string("search.mode", "closed_form");
  if (mode_s != "closed_form" && mode_s != "monte_carlo") throw ConfigError("search.mode: expected closed_form or monte_carlo");
  const HSearchMode mode = mode_s == "closed_form" ? HSearchMode::closed_form : HSearchMode::monte_carlo;
  const SimulationConfig base = simulation_from(c);

  std::vector<Table1Cell> cells;
  for (const double r : rs) {
    for (const double sigma : sigmas) {
      if (!(sigma >= 0.0) || !(r >= 0.0)) throw ConfigError("table1: sigma and r values must be >= 0");
      SimulationConfig sim = base;
      sim.sigma = sigma;
      sim.ridge.r = r;
      Table1Cell cell;
      cell.sigma = sigma;
      cell.r = r;
      cell.search = optimize_h(sim, hgrid, mode, replicates, seed);
      sim.ridge.h = cell.search.h_star;
      cell.mc = monte_carlo_msse(sim, replicates, seed);
      cells.push_back(std::move(cell));
    }
  }

  std::vector<RiskReport> reports;
  for (const auto& cell : cells) reports.push_back(cell.mc);
  io::emit_report(reports, out_path(opt, "table1.csv"));

  io::CsvWriter rep(out_path(opt, "table1_replicates.csv"), {"sigma", "r", "h_star", "replicate", "sse"});
  for (const auto& cell : cells)
    for (std::size_t k = 0; k < cell.mc.per_replicate.size(); ++k)
      rep.row({format_double(cell.sigma), format_double(cell.r), format_double(cell.search.h_star), std::to_string(k),
               format_double(cell.mc.per_replicate[k])});
  rep.close();

  io::CsvWriter hs(out_path(opt, "table1_hsearch.csv"), {"sigma", "r", "h", "msse"});
  for (const auto& cell : cells)
    for (std::size_t i = 0; i < cell.search.h_values.size(); ++i)
      hs.row({format_double(cell.sigma), format_double(cell.r), format_double(cell.search.h_values[i]),
              format_double(cell.search.msse_values[i])});
  hs.close();
  return cells;
}

// ---------------------------------------------------------------- rate study

std::vector<RateRow> run_rate_study(const RunOptions& opt) {
  const auto& c = opt.config;
  RateRule rule;
  rule.dims = static_cast<std::size_t>(c.get_int("rate.dims", 2));
  rule.lambda_const = c.get_double("rate.lambda_const", rule.lambda_const);
  rule.sigma2_const = c.get_double("rate.sigma2_const", rule.sigma2_const);
  rule.h_const = c.get_double("rate.h_const", rule.h_const);
  rule.block_fraction = c.get_double("rate.block_fraction", rule.block_fraction);
  rule.p = c.get_double("rate.p", rule.p);
  rule.q = c.get_double("rate.q", rule.q);
  rule.r = c.get_double("rate.r", rule.r);
  rule.oversample = c.get_double("experiment.oversample", rule.oversample);
  if (c.has("rate.lambda_exponent")) rule.lambda_exponent = c.get_double("rate.lambda_exponent", 1.0);
  rule.form = checked("rate.form", [&] { return ridge_form_from_string(c.get_string("rate.form", "norm_power")); });
  if (!(rule.sigma2_const >= 0.0) || !(rule.lambda_const > 0.0) || !(rule.h_const >= 0.0))
    throw ConfigError("rate: lambda_const must be > 0, sigma2_const and h_const >= 0");
  const auto ns = c.get_ints("rate.n_values", {32, 48, 64, 96, 128});
  if (c.has("rate.calibrate_n")) {
    if (c.has("rate.h_const")) throw ConfigError("rate.calibrate_n: conflicts with rate.h_const");
    rule.h_const = checked("rate.calibrate_n", [&] { return calibrate_h_const(c.get_int("rate.calibrate_n", 64), rule); });
  }
  const auto rows = checked("rate", [&] { return rate_study(ns, rule); });

  io::CsvWriter w(out_path(opt, "rate_study.csv"),
                  {"n", "lambda_n", "sigma", "h", "nd_msse", "var_term", "bias2_term", "envelope", "ratio"});
  for (const auto& r : rows)
    w.row({fmt_int(r.n), format_double(r.lambda_n), format_double(r.sigma), format_double(r.h), format_double(r.nd_msse),
           format_double(r.variance), format_double(r.bias_sq), format_double(r.envelope), format_double(r.ratio)});
  w.close();
  return rows;
}

// ---------------------------------------------------------------- lower bound

std::vector<LowerBoundRow> run_lower_bound(const RunOptions& opt) {
  const auto& c = opt.config;
  const auto dims = static_cast<std::size_t>(c.get_int("lower_bound.dims", 2));
  const double p = c.get_double("lower_bound.p", 3.0);
  const double delta_const = c.get_double("lower_bound.delta_const", 1.0);
  const double sigma = c.get_double("lower_bound.sigma", 0.1);
  const double block_fraction = c.get_double("lower_bound.block_fraction", 0.25);
  const auto ns = c.get_ints("lower_bound.n_values", {32, 64, 128});
  const auto hgrid = h_grid_from(c);
  const double r_filter = c.get_double("ridge.r", 50.0);
  if (!(sigma > 0.0)) throw ConfigError("lower_bound.sigma: must be > 0");
  if (!(delta_const > 0.0)) throw ConfigError("lower_bound.delta_const: must be > 0");

  std::vector<LowerBoundRow> rows;
  for (const auto n : ns) {
    const double d = static_cast<double>(dims);
    const double nd = std::pow(static_cast<double>(n), d);
    LowerBoundRow row;
    row.n = n;
    row.sigma = sigma;
    row.delta = delta_const * std::pow(sigma * sigma / nd, 1.0 / (3.0 * d));
    const auto m0 = checked("lower_bound", [&] { return ModulatedBlur::make(dims, p, row.delta, 0); });
    const auto m1 = ModulatedBlur::make(dims, p, row.delta, 1);
    const BlurKernel phi0 = checked("lower_bound.delta_const", [&] { return phi_theta(m0, n); });
    const BlurKernel phi1 = phi_theta(m1, n);
    auto side = std::max<std::int64_t>(1, std::llround(block_fraction * static_cast<double>(n)));
    const PrismPattern pattern(Coord(dims, 0), Coord(dims, side - 1), n);
    const Separation sep = separation(phi0, phi1, pattern, sigma);
    row.r_n = sep.spatial;
    row.r_n_spectral = sep.spectral;
    row.pi_n = lr_error(row.r_n);
    row.s2 = pair_separation_s2(phi0, phi1, n);

    RidgeSpec ridge = ridge_from(c, n);
    ridge.r = r_filter;
    const auto msse_for = [&](const BlurKernel& k) {
      const SimulationConfig sim = SimulationConfig::standard(pattern, k, ridge, sigma);
      return optimize_h(sim, hgrid).report.nd_msse();
    };
    row.nd_msse0 = msse_for(phi0);
    row.nd_msse1 = msse_for(phi1);
    row.bound = row.s2 * row.pi_n / 4.0;
    const double sup = std::max(row.nd_msse0, row.nd_msse1);
    row.ratio_half = sup / std::sqrt(sigma * sigma / nd);
    row.ratio_third = sup / std::cbrt(sigma * sigma / nd);
    rows.push_back(row);
  }

  io::CsvWriter w(out_path(opt, "lower_bound.csv"),
                  {"n", "delta_n", "sigma", "r_n", "r_n_spectral", "pi_n", "s2", "nd_msse0", "nd_msse1", "bound",
                   "ratio_half", "ratio_third"});
  for (const auto& r : rows)
    w.row({fmt_int(r.n), format_double(r.delta), format_double(r.sigma), format_double(r.r_n),
           format_double(r.r_n_spectral), format_double(r.pi_n), format_double(r.s2), format_double(r.nd_msse0),
           format_double(r.nd_msse1), format_double(r.bound), format_double(r.ratio_half), format_double(r.ratio_third)});
  w.close();
  return rows;
}

// ---------------------------------------------------------------- lemma 5.1

std::vector<Lemma51Row> run_lemma51(const RunOptions& opt) {
  const auto& c = opt.config;
  const auto zs = c.get_doubles("lemma51.z_values", {0.0, 1.0, 4.0});
  const auto ds = c.get_ints("lemma51.d_values", {1, 2, 3});
  const auto exps = c.get_ints("lemma51.eps_exponents", {1, 2, 3, 4, 5, 6});
  std::vector<Lemma51Row> rows;
  for (const auto d : ds)
    for (const double z : zs)
      for (const auto e : exps) {
        Lemma51Row row;
        row.d = static_cast<int>(d);
        row.z = z;
        row.eps = std::pow(10.0, -static_cast<double>(e));
        row.value = checked("lemma51", [&] { return lemma51_integral(z, row.d, row.eps); });
        row.ratio = row.value / (std::pow(row.eps, z + 1.0) * std::pow(-std::log(row.eps), static_cast<double>(d - 1)));
        rows.push_back(row);
      }
  io::CsvWriter w(out_path(opt, "lemma51.csv"), {"d", "z", "eps", "I_d", "ratio"});
  for (const auto& r : rows)
    w.row({std::to_string(r.d), format_double(r.z), format_double(r.eps), format_double(r.value), format_double(r.ratio)});
  w.close();
  return rows;
}

// ---------------------------------------------------------------- restoration

LatticeSignal synthetic_scene(std::int64_t side, std::int64_t margin) {
  if (side < 4 * margin + 16) throw DomainError("synthetic scene too small for its margin");
  const Box box = Box::cube(2, 0, side - 1);
  std::vector<double> v(box.cells(), 40.0);
  const double inner = static_cast<double>(side - 2 * margin);
  const auto at = [&](double f) { return static_cast<double>(margin) + f * inner; };
  for_each_cell(box, [&](const Coord& j, std::size_t lin) {
    const double y = static_cast<double>(j[0]);
    const double x = static_cast<double>(j[1]);
    if (y < margin || x < margin || y >= side - margin || x >= side - margin) return;
    double val = 90.0;
    if (y >= at(0.05) && y < at(0.45) && x >= at(0.08) && x < at(0.55)) val = 200.0;
    const double dy = y - at(0.7), dx = x - at(0.3);
    if (dy * dy + dx * dx < std::pow(0.18 * inner, 2)) val = 150.0;
    if (y >= at(0.55) && y < at(0.62) && x >= at(0.6) && x < at(0.95)) val = 245.0;
    if (y >= at(0.1) && y < at(0.4) && x >= at(0.7) && x < at(0.9)) val = 20.0 + 200.0 * (y - at(0.1)) / (0.3 * inner);
    v[lin] = val;
  });
  return LatticeSignal(box, std::move(v));
}

RestoreResult run_restore(const RunOptions& opt) {
  const auto& c = opt.config;
  const std::uint64_t seed = root_seed(opt);
  const double lambda = c.get_double("restore.lambda", 0.1);
  const double p = c.get_double("restore.p", 5.0);
  const double sigma = c.get_double("restore.sigma", 5.0);
  const double s = c.get_double("restore.scale", 1.0);
  const double r = c.get_double("restore.r", 50.0);
  const std::string method = c.get_string("restore.method", "both");
  if (method != "both" && method != "inverse" && method != "wiener")
    throw ConfigError("restore.method: expected inverse, wiener or both");
  if (!(sigma >= 0.0)) throw ConfigError("restore.sigma: must be >= 0");

  // scene: an input PGM or the synthetic default
  LatticeSignal scene;
  const std::string input = c.get_string("restore.input", "");
  if (!input.empty()) {
    scene = io::load_image(input);
  } else {
    const auto side = c.get_int("restore.side", 128);
    const auto margin = static_cast<std::int64_t>(std::ceil(lambda * static_cast<double>(side))) + 2;
    scene = checked("restore.side", [&] { return synthetic_scene(side, margin); });
  }
  const std::int64_t n = scene.box().extent(0);
  const BlurKernel truth = checked("restore.lambda", [&] { return discretize(ContinuumBlur::polynomial_product(p, lambda, 2), n); });
  const LatticeSignal degraded =
      add_noise(blur_periodic(truth.values, scene), sigma, rng::derive_seed(seed, 1));

  // the psf is estimated from a degraded test pattern taken by the same device
  const double range = c.get_double("restore.intensity", 255.0);
  const double pattern_sigma = c.get_double("restore.pattern_sigma", sigma / range);
  auto pattern_side = c.get_int("restore.pattern_side", 33);
  const PrismPattern pattern(Coord{0, 0}, Coord{pattern_side - 1, pattern_side - 1}, n);
  RidgeSpec ridge{RidgeForm::norm_power, c.get_double("restore.h", 0.0), 5.0, r, n};
  SimulationConfig sim = SimulationConfig::standard(pattern, truth, ridge, pattern_sigma);
  if (!c.has("restore.h")) sim.ridge.h = optimize_h(sim, log_h_grid(1e-14, 1e-6, 81)).h_star;
  const LatticeSignal pattern_obs =
      add_noise(blur_apply(truth, render(pattern)).on_box(sim.observation), pattern_sigma, rng::derive_seed(seed, 0));
  const Box target = default_target(truth.box());
  const PsfEstimator est(pattern, sim.ridge, IndexSet::box(target),
                         PsfEstimator::default_grid(sim.observation, target, 2.0));
  const LatticeSignal psf_hat = scale_correct(est.estimate(pattern_obs), s);
  const BlurKernel gauss = discretize(ContinuumBlur::gaussian(lambda / 2.0, lambda, 2), n);

  const Box window = scene.box();
  const GridSizes grid = minimal_grid(scene.box());
  RestoreResult res;
  res.mse_degraded = windowed_mse(degraded, scene, window);

  const auto gammas = c.has("restore.gamma") ? c.get_doubles("restore.gamma", {}) : log_h_grid(1e-3, 0.5, 28);
  const auto alphas = c.has("restore.alpha") ? c.get_doubles("restore.alpha", {}) : log_h_grid(1e-6, 1.0, 31);
  const auto betas = c.get_doubles("restore.beta", {0.0, 1.0, 2.0, 4.0});

  const auto best_inverse = [&](const LatticeSignal& psf, const std::string& label) {
    RestoreRow best{"inverse", label, 0, 0, 0, std::numeric_limits<double>::infinity()};
    LatticeSignal img;
    for (double g : gammas) {
      const auto out = checked("restore.gamma", [&] { return inverse_filter(degraded, psf, g, grid); });
      const double m = windowed_mse(out.image, scene, window);
      if (m < best.mse) {
        best.mse = m;
        best.gamma = g;
        img = out.image;
      }
    }
    return std::make_pair(best, img);
  };
  const auto best_wiener = [&](const LatticeSignal& psf, const std::string& label) {
    RestoreRow best{"wiener", label, 0, 0, 0, std::numeric_limits<double>::infinity()};
    LatticeSignal img;
    for (double b : betas)
      for (double a : alphas) {
        const auto out = checked("restore.alpha", [&] { return wiener_filter(degraded, psf, a, b, grid); });
        const double m = windowed_mse(out.image, scene, window);
        if (m < best.mse) {
          best.mse = m;
          best.alpha = a;
          best.beta = b;
          img = out.image;
        }
      }
    return std::make_pair(best, img);
  };

  const auto save = [&](const LatticeSignal& img, const std::string& name) {
    io::save_image(img, out_path(opt, name), 8, io::PgmEncoding::binary, 0.0, range);
  };
  save(scene, "scene.pgm");
  save(degraded, "degraded.pgm");
  io::write_signal_csv(psf_hat, out_path(opt, "restore_psf.csv"));
  if (method != "wiener") {
    auto [row, img] = best_inverse(psf_hat, "estimated");
    res.rows.push_back(row);
    save(img, "restored_inverse.pgm");
  }
  if (method != "inverse") {
    auto [row, img] = best_wiener(psf_hat, "estimated");
    res.rows.push_back(row);
    save(img, "restored_wiener.pgm");
    auto [grow, gimg] = best_wiener(gauss.values, "gaussian");
    res.rows.push_back(grow);
    save(gimg, "restored_wiener_gaussian.pgm");
  }

  io::CsvWriter w(out_path(opt, "restore.csv"), {"method", "psf", "gamma", "alpha", "beta", "mse", "mse_degraded"});
  for (const auto& row : res.rows)
    w.row({row.method, row.psf, format_double(row.gamma), format_double(row.alpha), format_double(row.beta),
           format_double(row.mse), format_double(res.mse_degraded)});
  w.close();
  return res;
}

}  // namespace psfest::experiment
