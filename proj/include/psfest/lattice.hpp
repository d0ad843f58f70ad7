#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace psfest {

using Coord = std::vector<std::int64_t>;
using GridSizes = std::vector<std::int64_t>;
using cdouble = std::complex<double>;

/// Axis-aligned box of lattice points with inclusive corners. A box with
/// lo[l] > hi[l] on any axis is empty.
struct Box {
  Coord lo;
  Coord hi;

  static Box from_extents(Coord lo, std::span<const std::int64_t> extents);
  static Box cube(std::size_t dims, std::int64_t lo, std::int64_t hi);
  static Box empty_box(std::size_t dims);

  std::size_t dims() const { return lo.size(); }
  bool empty() const;
  std::int64_t extent(std::size_t axis) const { return hi[axis] - lo[axis] + 1; }
  GridSizes extents() const;
  std::size_t cells() const;
  bool contains(std::span<const std::int64_t> j) const;
  bool contains(const Box& other) const;
  /// Row-major position of j (last axis fastest). j must lie inside the box.
  std::size_t linear_index(std::span<const std::int64_t> j) const;
  Box dilated(std::int64_t by) const;

  friend bool operator==(const Box&, const Box&) = default;
};

/// {j + k : j in a, k in b} for boxes.
Box minkowski(const Box& a, const Box& b);
/// Smallest box containing both.
Box bounding_union(const Box& a, const Box& b);
Box intersection(const Box& a, const Box& b);
std::string to_string(const Box& b);

/// Advances j through the box in row-major order; returns false after the last cell.
bool next_cell(const Box& box, Coord& j);

/// Calls f(j, linear) for every cell in row-major order.
template <class F>
void for_each_cell(const Box& box, F&& f) {
  if (box.empty()) return;
  Coord j = box.lo;
  std::size_t lin = 0;
  do {
    f(static_cast<const Coord&>(j), lin);
    ++lin;
  } while (next_cell(box, j));
}

/// Finite subset of Z^d: a bounding box plus a membership mask.
class IndexSet {
 public:
  IndexSet() = default;

  static IndexSet box(Box b);
  static IndexSet empty(std::size_t dims);
  /// Lattice points with Euclidean norm at most radius.
  static IndexSet sphere(std::size_t dims, double radius);
  static IndexSet from_mask(Box b, std::vector<std::uint8_t> mask);

  template <class Pred>
  static IndexSet from_predicate(Box b, Pred&& pred) {
    std::vector<std::uint8_t> mask(b.cells(), 0);
    for_each_cell(b, [&](const Coord& j, std::size_t lin) { mask[lin] = pred(j) ? 1 : 0; });
    return from_mask(std::move(b), std::move(mask));
  }

  const Box& bounding_box() const { return box_; }
  std::size_t dims() const { return box_.dims(); }
  bool empty() const { return count_ == 0; }
  std::size_t cardinality() const { return count_; }
  bool is_box() const { return mask_.empty() && count_ > 0; }
  bool contains(std::span<const std::int64_t> j) const;
  /// Membership by row-major position inside the bounding box.
  bool member_at(std::size_t lin) const { return mask_.empty() ? count_ > 0 : mask_[lin] != 0; }

 private:
  Box box_;
  std::vector<std::uint8_t> mask_;  // empty means every cell of box_
  std::size_t count_ = 0;
};

/// {j + k : j in r, k in s} with exact cardinality.
IndexSet minkowski_sum(const IndexSet& r, const IndexSet& s);

/// Real-valued function on a finite box of Z^d. Values are stored row-major
/// and must be finite; the box's lower corner is the grid coordinate of the
/// first stored cell.
class LatticeSignal {
 public:
  LatticeSignal() = default;
  LatticeSignal(Box box, std::vector<double> values);

  static LatticeSignal zeros(Box box);
  static LatticeSignal impulse(std::size_t dims);

  const Box& box() const { return box_; }
  const Coord& offset() const { return box_.lo; }
  std::size_t dims() const { return box_.dims(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values_mut() { return values_; }

  /// Value at j, zero outside the stored box.
  double at(std::span<const std::int64_t> j) const;
  double sum() const;
  double max_abs() const;
  /// Tight box around the nonzero cells (empty box if all zero).
  Box support() const;
  IndexSet support_set() const;
  /// Same function re-expressed on another box (zero padding or cropping).
  LatticeSignal on_box(const Box& target) const;

 private:
  Box box_;
  std::vector<double> values_;
};

/// Pointwise sum; both operands must share one bounding box.
LatticeSignal operator+(const LatticeSignal& a, const LatticeSignal& b);
LatticeSignal operator-(const LatticeSignal& a, const LatticeSignal& b);
LatticeSignal operator*(double s, const LatticeSignal& a);

/// Frequency t_k = 2*pi*k/M folded into [-pi, pi).
double grid_frequency(std::int64_t k, std::int64_t m);
std::vector<double> axis_frequencies(std::int64_t m);
std::size_t grid_cells(std::span<const std::int64_t> grid);

/// Complex samples on the equispaced frequency grid, stored row-major in
/// DFT index order (k = 0 .. M-1 per axis).
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(GridSizes grid, std::vector<cdouble> values);

  const GridSizes& grid_sizes() const { return grid_; }
  std::size_t dims() const { return grid_.size(); }
  std::size_t size() const { return values_.size(); }
  std::span<const cdouble> values() const { return values_; }
  std::span<cdouble> values_mut() { return values_; }

  cdouble at(std::span<const std::int64_t> k) const;
  /// Frequency vector of the sample stored at position lin.
  void frequency_of(std::size_t lin, std::span<double> t) const;

 private:
  GridSizes grid_;
  std::vector<cdouble> values_;
};

/// Calls f(t, lin) for every grid frequency in storage order.
template <class F>
void for_each_frequency(std::span<const std::int64_t> grid, F&& f) {
  const std::size_t d = grid.size();
  std::vector<std::vector<double>> axes(d);
  for (std::size_t l = 0; l < d; ++l) axes[l] = axis_frequencies(grid[l]);
  Box b = Box::from_extents(Coord(d, 0), grid);
  std::vector<double> t(d);
  for_each_cell(b, [&](const Coord& k, std::size_t lin) {
    for (std::size_t l = 0; l < d; ++l) t[l] = axes[l][static_cast<std::size_t>(k[l])];
    f(std::span<const double>(t), lin);
  });
}

/// Smallest per-axis grid that holds a box without aliasing.
GridSizes minimal_grid(const Box& box);
/// ceil(factor * extent) per axis.
GridSizes oversampled_grid(const Box& box, double factor);

/// value(t_k) = sum_j x(j) exp(i t_k . j) with j in absolute coordinates.
Spectrum dft_forward(const LatticeSignal& signal, std::span<const std::int64_t> grid);

struct InverseResult {
  LatticeSignal signal;
  double max_imag = 0.0;
};

/// Riemann-sum inverse (1/prod M) sum_k S(t_k) exp(-i t_k . j) on the target
/// set; real part kept, largest discarded imaginary part reported.
InverseResult dft_inverse_on(const Spectrum& spectrum, const IndexSet& target);

using FrequencyIntegrand = std::function<double(std::span<const double>)>;

/// (2 pi)^d / prod M * sum_k f(t_k).
double integrate_freq(const FrequencyIntegrand& integrand, std::span<const std::int64_t> grid);
/// Same rule applied to precomputed samples in storage order.
double integrate_grid(std::span<const double> samples, std::span<const std::int64_t> grid);

}  // namespace psfest
