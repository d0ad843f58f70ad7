// Acceptance runs. Each criterion prints one "criterion k: PASS|FAIL" line
// (details go to the lines before it) and the process exits nonzero on FAIL.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "psfest/blur.hpp"
#include "psfest/estimator.hpp"
#include "psfest/experiment.hpp"
#include "psfest/io.hpp"
#include "psfest/minimax.hpp"
#include "psfest/risk.hpp"
#include "psfest/test_pattern.hpp"

using namespace psfest;
namespace fs = std::filesystem;

namespace {

const fs::path config_dir = PSFEST_CONFIG_DIR;
const fs::path work = fs::temp_directory_path() / "psfest_acceptance";

struct Verdict {
  bool pass = true;
  std::string summary;
};

experiment::RunOptions options(const std::string& config, const std::string& out) {
  experiment::RunOptions opt;
  opt.config = io::Config::load(config_dir / config);
  opt.out_dir = work / out;
  return opt;
}

// ------------------------------------------------------------ 1 and 3

struct PaperCell {
  double r, sigma, msse, se, h;
};

// MSSE, se of SSE and h from the published Table 1.
const std::vector<PaperCell> table1_published = {
    {1, 0.05, 1.9744, 0.0607, 1.0e-4},  {1, 0.1, 2.0987, 0.0750, 1.1e-4},  {1, 0.2, 2.3457, 0.0887, 1.2e-4},
    {10, 0.05, 1.2046, 0.0779, 2.0e-5}, {10, 0.1, 1.3708, 0.0474, 3.1e-5}, {10, 0.2, 1.4961, 0.0954, 3.2e-5},
    {50, 0.05, 0.6397, 0.0324, 1.7e-5}, {50, 0.1, 0.6644, 0.0531, 1.7e-5}, {50, 0.2, 0.7533, 0.0874, 1.7e-5},
    {55, 0.05, 0.6397, 0.0324, 1.7e-5}, {55, 0.1, 0.6643, 0.0531, 1.7e-5}, {55, 0.2, 0.7532, 0.0873, 1.7e-5},
};

std::map<std::pair<double, double>, experiment::Table1Cell> table1_cells(const std::string& out) {
  std::map<std::pair<double, double>, experiment::Table1Cell> cells;
  for (auto& c : experiment::run_table1(options("table1.ini", out))) cells[{c.r, c.sigma}] = c;
  return cells;
}

Verdict criterion_table1() {
  auto cells = table1_cells("c1");
  Verdict v;
  int value_misses = 0, order_misses = 0;
  fmt::print("{:>4} {:>6} {:>12} {:>10} {:>10} {:>10} {:>10}\n", "r", "sigma", "h*", "nd_msse", "nd_sd", "published", "tolerance");
  for (const auto& p : table1_published) {
    const auto& c = cells.at({p.r, p.sigma});
    const double got = c.mc.nd_msse();
    const double sd = std::pow(static_cast<double>(c.mc.n), 2.0) * c.mc.sse_sd;
    const double tol = std::max(0.15 * p.msse, 3.0 * p.se);
    const bool ok = std::abs(got - p.msse) <= tol;
    value_misses += !ok;
    fmt::print("{:>4} {:>6} {:>12.4g} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} {}\n", p.r, p.sigma, c.search.h_star, got, sd,
               p.msse, tol, ok ? "ok" : "MISS");
  }
  auto m = [&](double r, double s) { return cells.at({r, s}).mc.nd_msse(); };
  for (double s : {0.05, 0.1, 0.2}) {
    if (!(m(1, s) > m(10, s) && m(10, s) > m(50, s))) {
      ++order_misses;
      fmt::print("order: at sigma={} MSSE is not strictly decreasing over r = 1, 10, 50 ({:.4f}, {:.4f}, {:.4f})\n", s,
                 m(1, s), m(10, s), m(50, s));
    }
    if (std::abs(m(50, s) - m(55, s)) > 0.001) {
      ++order_misses;
      fmt::print("order: at sigma={} |MSSE(r=50) - MSSE(r=55)| = {:.4g} > 0.001\n", s, std::abs(m(50, s) - m(55, s)));
    }
  }
  for (double r : {1.0, 10.0, 50.0, 55.0})
    if (!(m(r, 0.05) < m(r, 0.1) && m(r, 0.1) < m(r, 0.2))) {
      ++order_misses;
      fmt::print("order: at r={} MSSE is not strictly increasing in sigma\n", r);
    }
  v.pass = value_misses == 0 && order_misses == 0;
  v.summary = fmt::format("{} of 12 cells outside tolerance, {} ordering violations", value_misses, order_misses);
  return v;
}

Verdict criterion_closed_form_vs_mc() {
  auto cells = table1_cells("c3");
  Verdict v;
  int misses = 0;
  double worst = 0.0;
  for (const auto& [key, c] : cells) {
    const double z = std::abs(c.mc.msse - c.mc.closed_form) / c.mc.sse_se;
    worst = std::max(worst, z);
    misses += !(z < 3.0) || c.mc.replicates < 101;
    fmt::print("r={:<3} sigma={:<5} h*={:.4g} closed={:.6g} mc={:.6g} se={:.3g} z={:.2f}\n", c.r, c.sigma, c.search.h_star,
               c.mc.closed_form, c.mc.msse, c.mc.sse_se, z);
  }
  v.pass = misses == 0 && cells.size() == 12;
  v.summary = fmt::format("{} cells, largest |mc - closed| / se = {:.2f}", cells.size(), worst);
  return v;
}

// ------------------------------------------------------------ 2

Verdict criterion_exact_recovery() {
  Verdict v;
  double worst = 0.0;
  for (std::int64_t n : {32, 64}) {
    const std::vector<std::pair<std::string, ContinuumBlur>> families = {
        {"polynomial_product", ContinuumBlur::polynomial_product(5.0, 0.2, 2)},
        {"gaussian", ContinuumBlur::gaussian(0.1, 0.2, 2)},
        {"spherical_polynomial", ContinuumBlur::spherical_polynomial(3.0, 0.2, 2)}};
    for (const auto& [name, g] : families) {
      const PrismPattern pattern = PrismPattern::centered(2, n / 4, n, n);
      const auto cfg = SimulationConfig::standard(pattern, discretize(g, n), RidgeSpec{RidgeForm::norm_power, 0.0, 5.0, 50.0, n}, 0.0);
      const PsfEstimator est(cfg.pattern, cfg.ridge, cfg.window, cfg.grid);
      const LatticeSignal y = blur_apply(cfg.kernel, render(cfg.pattern)).on_box(cfg.observation);
      const LatticeSignal hat = est.estimate(y);
      const LatticeSignal truth = cfg.kernel.values.on_box(hat.box());
      double err = 0.0;
      for (std::size_t i = 0; i < truth.values().size(); ++i) err = std::max(err, std::abs(hat.values()[i] - truth.values()[i]));
      worst = std::max(worst, err);
      fmt::print("n={:<3} {:<22} max abs error {:.3g}\n", n, name, err);
      v.pass = v.pass && err <= 1e-9;
    }
  }
  v.summary = fmt::format("worst max abs error {:.3g} (limit 1e-9)", worst);
  return v;
}

// ------------------------------------------------------------ 4

// Closed form against the transform of the rendered prism at every grid frequency.
double prism_gap(const Coord& widths) {
  const std::size_t d = widths.size();
  Coord a(d), b(d);
  GridSizes grid(d);
  for (std::size_t l = 0; l < d; ++l) {
    a[l] = widths[l] % 5 - 2;
    b[l] = a[l] + widths[l] - 1;
    grid[l] = widths[l] + widths[l] % 7 + 1;
  }
  const PrismPattern p(a, b, 1);
  const Spectrum direct = dft_forward(render(p), grid);
  const Spectrum closed = pattern_spectrum(p, grid);
  double gap = 0.0;
  for (std::size_t i = 0; i < direct.values().size(); ++i) gap = std::max(gap, std::abs(direct.values()[i] - closed.values()[i]));
  return gap;
}

// sum_j x(j) e^{i t.j} written out, in long double.
std::complex<double> brute_dft(const LatticeSignal& x, std::span<const double> t) {
  std::complex<long double> acc = 0;
  for_each_cell(x.box(), [&](const Coord& j, std::size_t lin) {
    long double ph = 0;
    for (std::size_t l = 0; l < j.size(); ++l) ph += static_cast<long double>(t[l]) * j[l];
    acc += static_cast<long double>(x.values()[lin]) * std::complex<long double>(std::cos(ph), std::sin(ph));
  });
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

Verdict criterion_transforms() {
  Verdict v;
  const std::int64_t cap = 10000;
  double worst = 0.0;
  std::int64_t count = 0;
  for (std::int64_t m = 1; m <= cap; ++m, ++count) worst = std::max(worst, prism_gap({m}));
  for (std::int64_t m1 = 1; m1 <= cap; ++m1)
    for (std::int64_t m2 = 1; m1 * m2 <= cap; ++m2, ++count) worst = std::max(worst, prism_gap({m1, m2}));
  // d = 3: every shape up to axis order, and every ordering once prod m <= 1000
  for (std::int64_t m1 = 1; m1 <= cap; ++m1)
    for (std::int64_t m2 = 1; m1 * m2 <= cap; ++m2)
      for (std::int64_t m3 = 1; m1 * m2 * m3 <= cap; ++m3) {
        if (m1 * m2 * m3 > 1000 && !(m1 <= m2 && m2 <= m3)) continue;
        worst = std::max(worst, prism_gap({m1, m2, m3}));
        ++count;
      }
  fmt::print("{} prisms (d = 1, 2, 3, prod m <= {}): largest |closed form - transform| = {:.3g}\n", count, cap, worst);

  // the transform itself against the literal sum on smaller prisms
  double worst_brute = 0.0;
  for (std::int64_t m1 = 1; m1 <= 24; ++m1)
    for (std::int64_t m2 = 1; m1 * m2 <= 256; ++m2) {
      const PrismPattern p({-1, 3}, {m1 - 2, m2 + 2}, 1);
      const GridSizes grid{m1 + 2, m2 + 1};
      const Spectrum s = pattern_spectrum(p, grid);
      const LatticeSignal x = render(p);
      for_each_frequency(grid, [&](std::span<const double> t, std::size_t i) {
        worst_brute = std::max(worst_brute, std::abs(brute_dft(x, t) - s.values()[i]));
      });
    }
  fmt::print("prisms with prod m <= 256: largest |closed form - literal sum| = {:.3g}\n", worst_brute);

  double worst_parseval = 0.0;
  std::mt19937_64 gen(404);
  std::normal_distribution<double> nd;
  const std::vector<std::pair<Box, GridSizes>> cases = {
      {Box{{-7}, {300}}, {613}},         {Box{{0, 0}, {63, 40}}, {64, 41}},  {Box{{-3, 5}, {20, 30}}, {50, 33}},
      {Box{{0, 0, 0}, {15, 9, 12}}, {17, 19, 13}}, {Box{{2, -2, 0}, {9, 9, 9}}, {8, 12, 10}}};
  for (const auto& [box, grid] : cases) {
    std::vector<double> vals(box.cells());
    for (auto& x : vals) x = nd(gen);
    const LatticeSignal x(box, vals);
    double energy = 0.0;
    for (double e : vals) energy += e * e;
    const Spectrum s = dft_forward(x, grid);
    std::vector<double> mag(s.values().size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::norm(s.values()[i]);
    const double freq = integrate_grid(mag, grid) / std::pow(2.0 * std::numbers::pi, static_cast<double>(grid.size()));
    worst_parseval = std::max(worst_parseval, std::abs(freq - energy) / energy);
  }
  fmt::print("Parseval on random signals: largest relative gap = {:.3g}\n", worst_parseval);

  v.pass = worst <= 1e-10 && worst_brute <= 1e-10 && worst_parseval <= 1e-8;
  v.summary = fmt::format("closed form gap {:.3g}, literal-sum gap {:.3g} (limit 1e-10); Parseval {:.3g} (limit 1e-8)", worst,
                          worst_brute, worst_parseval);
  return v;
}

// ------------------------------------------------------------ 5

Verdict criterion_rate() {
  Verdict v;
  const auto rows = experiment::run_rate_study(options("rate.ini", "c5"));
  double lo = 1e300, hi = 0.0;
  for (const auto& r : rows) {
    fmt::print("n={:<4} lambda_n={:<8.4g} h={:<10.4g} nd_msse={:<10.4g} envelope={:<10.4g} ratio={:.4g}\n", r.n, r.lambda_n, r.h,
               r.nd_msse, r.envelope, r.ratio);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }

  // For comparison only: the (d+1)/(3d) width rule breaks n / lambda_n bounded.
  auto cfg = io::Config::load(config_dir / "rate.ini");
  io::Config alt;
  for (const char* k : {"dims", "n_values", "lambda_const", "sigma2_const", "calibrate_n", "block_fraction", "form", "p", "q", "r"})
    alt.set(std::string("rate.") + k, cfg.require_string(std::string("rate.") + k));
  experiment::RunOptions opt;
  opt.config = alt;
  opt.out_dir = work / "c5_default_width";
  double alo = 1e300, ahi = 0.0;
  std::string trend;
  for (const auto& r : experiment::run_rate_study(opt)) {
    alo = std::min(alo, r.ratio);
    ahi = std::max(ahi, r.ratio);
    trend += fmt::format(" {:.4g}", r.ratio);
  }
  fmt::print("information: lambda_n = 0.2 n^(1/2) gives ratios{} (max/min {:.3g})\n", trend, ahi / alo);

  v.pass = rows.size() == 5 && hi / lo < 10.0;
  v.summary = fmt::format("max/min ratio {:.3g} over n = 32..128 (limit 10)", hi / lo);
  return v;
}

// ------------------------------------------------------------ 6

Verdict criterion_lemma51() {
  Verdict v;
  double worst_d1 = 0.0, worst_band = 0.0;
  for (double z : {0.0, 1.0, 4.0}) {
    for (int k = 1; k <= 6; ++k) {
      const double eps = std::pow(10.0, -k);
      const double want = std::pow(eps, z + 1.0) / (z + 1.0);
      worst_d1 = std::max(worst_d1, std::abs(lemma51_integral(z, 1, eps) - want) / want);
    }
    for (int d : {2, 3}) {
      double lo = 1e300, hi = 0.0;
      for (int k = 1; k <= 6; ++k) {
        const double eps = std::pow(10.0, -k);
        const double ratio = lemma51_integral(z, d, eps) / (std::pow(eps, z + 1.0) * std::pow(-std::log(eps), d - 1.0));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      fmt::print("d={} z={}: ratio in [{:.4g}, {:.4g}], max/min {:.3g}\n", d, z, lo, hi, hi / lo);
      worst_band = std::max(worst_band, hi / lo);
    }
  }
  fmt::print("d=1 largest relative error {:.3g}\n", worst_d1);
  v.pass = worst_d1 <= 1e-10 && worst_band < 10.0;
  v.summary = fmt::format("I_1 relative error {:.3g} (limit 1e-10), largest max/min {:.3g} (limit 10)", worst_d1, worst_band);
  return v;
}

// ------------------------------------------------------------ 7

Verdict criterion_lr() {
  Verdict v;
  const std::int64_t trials = 10000;
  struct Setting {
    double delta, target;
  };
  // r_n needed for pi_n = 0.488, 0.2, 0.05
  const std::vector<Setting> settings = {{2.0, 0.01}, {1.5, 2.8332}, {1.0, 10.822}};
  std::uint64_t seed = 700;
  for (const auto& s : settings) {
    const std::int64_t n = 16;
    const BlurKernel k0 = phi_theta(ModulatedBlur::make(2, 3.0, s.delta, 0), n);
    const BlurKernel k1 = phi_theta(ModulatedBlur::make(2, 3.0, s.delta, 1), n);
    const PrismPattern pattern({0, 0}, {3, 3}, n);
    const double sigma = std::sqrt(separation(k0, k1, pattern, 1.0).value() / s.target);
    const double r_n = separation(k0, k1, pattern, sigma).value();
    const double pi_n = lr_error(r_n);
    const auto mc = lr_monte_carlo(k0, k1, pattern, sigma, trials, seed++);
    const double se = std::sqrt(pi_n * (1.0 - pi_n) / static_cast<double>(trials));
    const double z = std::abs(mc.rate - pi_n) / se;
    fmt::print("delta={} sigma={:.4g} r_n={:.4g} pi_n={:.4f} mc={:.4f} ({} of {}) z={:.2f}\n", s.delta, sigma, r_n, pi_n, mc.rate,
               mc.errors, mc.trials, z);
    v.pass = v.pass && z < 3.0;
  }
  v.summary = "pi_n against 10^4 simulated decisions at three settings";
  return v;
}

// ------------------------------------------------------------ 8

Verdict criterion_restore() {
  Verdict v;
  const auto res = experiment::run_restore(options("restore.ini", "c8"));
  double inv = -1.0, wie = -1.0, gauss = -1.0;
  for (const auto& r : res.rows) {
    fmt::print("{:<8} {:<10} gamma={:<10.4g} alpha={:<10.4g} beta={:<4g} mse={:.4f}\n", r.method, r.psf, r.gamma, r.alpha, r.beta, r.mse);
    if (r.method == "inverse" && r.psf == "estimated") inv = r.mse;
    if (r.method == "wiener" && r.psf == "estimated") wie = r.mse;
    if (r.method == "wiener" && r.psf == "gaussian") gauss = r.mse;
  }
  fmt::print("degraded mse={:.4f}\n", res.mse_degraded);
  v.pass = inv >= 0.0 && wie >= 0.0 && gauss >= 0.0 && inv < res.mse_degraded && wie < res.mse_degraded && gauss > wie;
  v.summary = fmt::format("degraded {:.2f}, inverse {:.2f}, wiener {:.2f}, gaussian-psf wiener {:.2f}", res.mse_degraded, inv, wie, gauss);
  return v;
}

// ------------------------------------------------------------ 9

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Verdict criterion_determinism() {
  Verdict v;
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"simulate", "simulate.ini"}, {"estimate", "estimate.ini"}, {"table1", "table1.ini"}, {"restore", "restore.ini"},
      {"rate-study", "rate.ini"},   {"lower-bound", "lower_bound.ini"}, {"lemma51", "lemma51.ini"}};
  std::size_t compared = 0, differing = 0;
  for (const auto& [verb, cfg] : runs) {
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      const fs::path dir = work / "c9" / (verb + "_" + tag);
      fs::remove_all(dir);
      const std::string cmd = fmt::format("{} {} --config {} --out {} > /dev/null", PSFEST_CLI, verb, (config_dir / cfg).string(), dir.string());
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        fmt::print("{} run {} failed\n", verb, tag);
        v.pass = false;
      }
      dirs.push_back(dir);
    }
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      const auto name = e.path().filename();
      ++files;
      ++compared;
      if (!fs::exists(dirs[1] / name) || slurp(e.path()) != slurp(dirs[1] / name)) {
        ++differing;
        fmt::print("{}: {} differs between runs\n", verb, name.string());
      }
    }
    fmt::print("{:<12} {} artifacts compared\n", verb, files);
    if (files == 0) v.pass = false;
  }
  v.pass = v.pass && differing == 0;
  v.summary = fmt::format("{} artifacts compared, {} differ", compared, differing);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int k = 0;
  app.add_option("--criterion", k, "criterion number 1..9")->required()->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  fs::create_directories(work);
  Verdict v;
  try {
    switch (k) {
      case 1: v = criterion_table1(); break;
      case 2: v = criterion_exact_recovery(); break;
      case 3: v = criterion_closed_form_vs_mc(); break;
      case 4: v = criterion_transforms(); break;
      case 5: v = criterion_rate(); break;
      case 6: v = criterion_lemma51(); break;
      case 7: v = criterion_lr(); break;
      case 8: v = criterion_restore(); break;
      case 9: v = criterion_determinism(); break;
    }
  } catch (const std::exception& e) {
    v.pass = false;
    v.summary = std::string("error: ") + e.what();
  }
  fmt::print("criterion {}: {} {}\n", k, v.pass ? "PASS" : "FAIL", v.summary);
  return v.pass ? 0 : 1;
}
