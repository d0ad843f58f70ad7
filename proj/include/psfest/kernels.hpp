#pragma once

// Data-parallel kernels (OpenMP) and the serial reference implementations
// they are tested and benchmarked against.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "psfest/lattice.hpp"

namespace psfest::kernels {

/// In-place d-dimensional DFT over a row-major array:
///   X[k] = sum_j x[j] exp(sign * 2 pi i k.j / M) per axis, unnormalised.
/// Lines along each axis are distributed across OpenMP threads.
void fft_nd(std::span<cdouble> data, std::span<const std::int64_t> dims, int sign);

/// Exact linear convolution (a*b)(j) = sum_k a(k) b(j-k) by direct gathering,
/// parallel over output cells.
LatticeSignal convolve_direct(const LatticeSignal& a, const LatticeSignal& b);

/// Linear convolution through zero-padded FFTs on a 5-smooth grid.
LatticeSignal convolve_fft(const LatticeSignal& a, const LatticeSignal& b);

/// Direct route for small work (<= direct_work_limit multiply-adds), FFT otherwise.
LatticeSignal convolve(const LatticeSignal& a, const LatticeSignal& b);

inline constexpr double direct_work_limit = 2.0e6;

}  // namespace psfest::kernels

namespace psfest::reference {

/// Naive O(N^2) d-dimensional DFT, same convention as kernels::fft_nd.
std::vector<cdouble> dft_nd(std::span<const cdouble> data, std::span<const std::int64_t> dims,
                            int sign);

/// Serial scatter-form linear convolution.
LatticeSignal convolve(const LatticeSignal& a, const LatticeSignal& b);

}  // namespace psfest::reference
