// Command-line front end for the experiments.

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>

#include "psfest/error.hpp"
#include "psfest/experiment.hpp"
#include "psfest/io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

int fail(int code, const std::string& kind, const std::string& what) {
  std::cerr << "psfest: " << kind << ": " << one_line(what) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace psfest;

  CLI::App app{"Point-spread function estimation from a known test pattern"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Root seed (overrides experiment.seed)");
  app.add_option("--config", config_path, "Experiment configuration file")->required();
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (default: OpenMP's choice)")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo risk of one estimator configuration");
  auto* estimate = app.add_subcommand("estimate", "Estimate the kernel from one observation of the pattern");
  auto* restore = app.add_subcommand("restore", "Restore a blurred image with inverse and Wiener filters");
  auto* table1 = app.add_subcommand("table1", "MSSE over the (r, sigma) grid with per-cell h search");
  auto* rate = app.add_subcommand("rate-study", "Risk against the rate envelope over a sequence of n");
  auto* lower = app.add_subcommand("lower-bound", "Two-point separation, LR error and measured risk");
  auto* lemma = app.add_subcommand("lemma51", "Tabulate I_d(eps) and its normalised ratio");

  std::string method;
  std::vector<double> gamma, alpha, beta;
  restore->add_option("--method", method, "inverse, wiener or both")
      ->check(CLI::IsMember({"inverse", "wiener", "both"}));
  restore->add_option("--gamma", gamma, "Inverse-filter threshold(s)");
  restore->add_option("--alpha", alpha, "Wiener regulariser(s)");
  restore->add_option("--beta", beta, "Wiener frequency exponent(s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "usage", e.what());
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    experiment::RunOptions opt;
    opt.config = io::Config::load(config_path);
    if (*seed_opt) opt.seed = seed;
    opt.out_dir = out_dir;

    const auto join = [](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_double(v[i]);
      return s;
    };
    if (!method.empty()) opt.config.set("restore.method", method);
    if (!gamma.empty()) opt.config.set("restore.gamma", join(gamma));
    if (!alpha.empty()) opt.config.set("restore.alpha", join(alpha));
    if (!beta.empty()) opt.config.set("restore.beta", join(beta));

    if (*simulate) {
      const auto rep = experiment::run_simulate(opt);
      std::printf("simulate: n^d MSSE %.6g (se %.3g) over %lld replicates, closed form %.6g\n", rep.nd_msse(),
                  rep.sse_se * std::pow(static_cast<double>(rep.n), static_cast<double>(rep.dims)),
                  static_cast<long long>(rep.replicates),
                  rep.closed_form * std::pow(static_cast<double>(rep.n), static_cast<double>(rep.dims)));
    } else if (*estimate) {
      const auto res = experiment::run_estimate(opt);
      std::printf("estimate: SSE %.6g, sum %.12g\n", res.sse, res.estimate.sum());
    } else if (*restore) {
      const auto res = experiment::run_restore(opt);
      std::printf("restore: degraded MSE %.6g\n", res.mse_degraded);
      for (const auto& r : res.rows) std::printf("  %-8s %-10s MSE %.6g\n", r.method.c_str(), r.psf.c_str(), r.mse);
    } else if (*table1) {
      const auto cells = experiment::run_table1(opt);
      for (const auto& c : cells)
        std::printf("table1: r=%g sigma=%g h*=%.4g n^d MSSE=%.6g\n", c.r, c.sigma, c.search.h_star, c.mc.nd_msse());
    } else if (*rate) {
      const auto rows = experiment::run_rate_study(opt);
      for (const auto& r : rows) std::printf("rate-study: n=%lld ratio=%.6g\n", static_cast<long long>(r.n), r.ratio);
    } else if (*lower) {
      const auto rows = experiment::run_lower_bound(opt);
      for (const auto& r : rows)
        std::printf("lower-bound: n=%lld delta=%.4g r_n=%.4g pi_n=%.4g\n", static_cast<long long>(r.n), r.delta, r.r_n,
                    r.pi_n);
    } else if (*lemma) {
      const auto rows = experiment::run_lemma51(opt);
      std::printf("lemma51: %zu rows\n", rows.size());
    }
  } catch (const ConfigError& e) {
    return fail(kExitConfig, "config error", e.what());
  } catch (const DomainError& e) {
    return fail(kExitConfig, "invalid parameter", e.what());
  } catch (const ImageHeaderError& e) {
    return fail(kExitConfig, "image header error", e.what());
  } catch (const ImageDepthError& e) {
    return fail(kExitConfig, "image depth error", e.what());
  } catch (const ImagePayloadError& e) {
    return fail(kExitConfig, "image payload error", e.what());
  } catch (const std::exception& e) {
    return fail(kExitCompute, "compute error", e.what());
  }
  return 0;
}
