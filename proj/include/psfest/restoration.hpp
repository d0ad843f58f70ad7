#pragma once

#include "psfest/lattice.hpp"

namespace psfest {

enum class RestorationMethod { inverse_threshold, wiener };

struct RestorationSpec {
  RestorationMethod method = RestorationMethod::wiener;
  double gamma = 0.01;
  double alpha = 1e-3;
  double beta = 2.0;

  void validate() const;
};

struct RestorationResult {
  LatticeSignal image;
  double max_imag = 0.0;
  /// Set when every frequency failed the inverse-filter threshold.
  bool all_suppressed = false;
  std::size_t passed = 0;
};

/// Transforms are taken on `grid` (periodic semantics); the output covers y's box.
RestorationResult inverse_filter(const LatticeSignal& y, const LatticeSignal& psf, double gamma, const GridSizes& grid);
RestorationResult wiener_filter(const LatticeSignal& y, const LatticeSignal& psf, double alpha, double beta,
                                const GridSizes& grid);
RestorationResult restore(const LatticeSignal& y, const LatticeSignal& psf, const RestorationSpec& spec,
                          const GridSizes& grid);

/// Circular convolution of an image with a kernel on the image's own box
/// (grid = image extents), the degradation matching the filters' periodic
/// semantics.
LatticeSignal blur_periodic(const LatticeSignal& kernel, const LatticeSignal& image);

/// Mean squared difference over a window, both signals read as zero off their boxes.
double windowed_mse(const LatticeSignal& a, const LatticeSignal& b, const Box& window);

}  // namespace psfest
