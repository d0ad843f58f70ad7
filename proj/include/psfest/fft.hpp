#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace psfest::fft {

using cdouble = std::complex<double>;

/// One-dimensional complex DFT of a fixed length backed by FFTW:
///   X[k] = sum_j x[j] exp(sign * 2 pi i j k / n),  sign = +1 or -1, unnormalised.
/// Plans are created with FFTW_ESTIMATE (deterministic) and are safe to
/// execute from many threads at once, each with its own scratch.
class Plan {
 public:
  explicit Plan(std::size_t n);
  ~Plan();
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  std::size_t size() const { return n_; }
  std::size_t scratch_size() const { return n_; }

  /// In-place transform of n contiguous values.
  void execute(cdouble* data, int sign, cdouble* scratch) const;
  void execute(std::vector<cdouble>& data, int sign) const;

 private:
  std::size_t n_;
  void* forward_ = nullptr;   // fftw_plan, sign -1
  void* backward_ = nullptr;  // fftw_plan, sign +1
};

/// Shared, cached plan for length n (thread-safe).
std::shared_ptr<const Plan> plan_for(std::size_t n);

/// Smallest 2^a 3^b 5^c not below n.
std::size_t next_smooth(std::size_t n);

}  // namespace psfest::fft
