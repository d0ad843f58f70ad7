#include "psfest/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace psfest::fft {

namespace {

// FFTW's planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Plan::Plan(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("fft plan of length 0");
  std::vector<cdouble> in(n), out(n);
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  forward_ = fftw_plan_dft_1d(len, as_fftw(in.data()), as_fftw(out.data()), FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft_1d(len, as_fftw(in.data()), as_fftw(out.data()), FFTW_BACKWARD, flags);
  if (!forward_ || !backward_) throw std::runtime_error("fftw planning failed");
}

Plan::~Plan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void Plan::execute(cdouble* data, int sign, cdouble* scratch) const {
  std::copy(data, data + n_, scratch);
  auto plan = static_cast<fftw_plan>(sign < 0 ? forward_ : backward_);
  fftw_execute_dft(plan, as_fftw(scratch), as_fftw(data));
}

void Plan::execute(std::vector<cdouble>& data, int sign) const {
  std::vector<cdouble> scratch(n_);
  execute(data.data(), sign, scratch.data());
}

std::shared_ptr<const Plan> plan_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const Plan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const Plan>(n);
  return slot;
}

std::size_t next_smooth(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace psfest::fft
