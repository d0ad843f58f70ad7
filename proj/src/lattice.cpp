#include "psfest/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "psfest/error.hpp"
#include "psfest/kernels.hpp"

namespace psfest {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

void require_same_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DomainError(std::string(what) + ": dimension mismatch");
}

}  // namespace

// ---------------------------------------------------------------- Box

Box Box::from_extents(Coord lo, std::span<const std::int64_t> extents) {
  Box b;
  b.hi.resize(lo.size());
  for (std::size_t l = 0; l < lo.size(); ++l) b.hi[l] = lo[l] + extents[l] - 1;
  b.lo = std::move(lo);
  return b;
}

Box Box::cube(std::size_t dims, std::int64_t lo, std::int64_t hi) {
  return Box{Coord(dims, lo), Coord(dims, hi)};
}

Box Box::empty_box(std::size_t dims) { return Box{Coord(dims, 0), Coord(dims, -1)}; }

bool Box::empty() const {
  for (std::size_t l = 0; l < dims(); ++l)
    if (lo[l] > hi[l]) return true;
  return dims() == 0;
}

GridSizes Box::extents() const {
  GridSizes e(dims());
  for (std::size_t l = 0; l < dims(); ++l) e[l] = std::max<std::int64_t>(0, extent(l));
  return e;
}

std::size_t Box::cells() const {
  if (empty()) return 0;
  std::size_t c = 1;
  for (std::size_t l = 0; l < dims(); ++l) c *= static_cast<std::size_t>(extent(l));
  return c;
}

bool Box::contains(std::span<const std::int64_t> j) const {
  if (j.size() != dims()) return false;
  for (std::size_t l = 0; l < dims(); ++l)
    if (j[l] < lo[l] || j[l] > hi[l]) return false;
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.empty()) return true;
  if (other.dims() != dims() || empty()) return false;
  return contains(other.lo) && contains(other.hi);
}

std::size_t Box::linear_index(std::span<const std::int64_t> j) const {
  std::size_t lin = 0;
  for (std::size_t l = 0; l < dims(); ++l)
    lin = lin * static_cast<std::size_t>(extent(l)) + static_cast<std::size_t>(j[l] - lo[l]);
  return lin;
}

Box Box::dilated(std::int64_t by) const {
  Box b = *this;
  for (std::size_t l = 0; l < dims(); ++l) {
    b.lo[l] -= by;
    b.hi[l] += by;
  }
  return b;
}

Box minkowski(const Box& a, const Box& b) {
  require_same_dims(a.dims(), b.dims(), "minkowski");
  if (a.empty() || b.empty()) return Box::empty_box(a.dims());
  Box out = a;
  for (std::size_t l = 0; l < a.dims(); ++l) {
    out.lo[l] += b.lo[l];
    out.hi[l] += b.hi[l];
  }
  return out;
}

Box bounding_union(const Box& a, const Box& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  require_same_dims(a.dims(), b.dims(), "bounding_union");
  Box out = a;
  for (std::size_t l = 0; l < a.dims(); ++l) {
    out.lo[l] = std::min(a.lo[l], b.lo[l]);
    out.hi[l] = std::max(a.hi[l], b.hi[l]);
  }
  return out;
}

Box intersection(const Box& a, const Box& b) {
  require_same_dims(a.dims(), b.dims(), "intersection");
  Box out = a;
  for (std::size_t l = 0; l < a.dims(); ++l) {
    out.lo[l] = std::max(a.lo[l], b.lo[l]);
    out.hi[l] = std::min(a.hi[l], b.hi[l]);
  }
  return out;
}

std::string to_string(const Box& b) {
  std::ostringstream os;
  for (std::size_t l = 0; l < b.dims(); ++l) os << (l ? "x" : "") << '[' << b.lo[l] << ".." << b.hi[l] << ']';
  return os.str();
}

bool next_cell(const Box& box, Coord& j) {
  for (std::size_t l = box.dims(); l-- > 0;) {
    if (++j[l] <= box.hi[l]) return true;
    j[l] = box.lo[l];
  }
  return false;
}

// ---------------------------------------------------------------- IndexSet

IndexSet IndexSet::box(Box b) {
  IndexSet s;
  s.count_ = b.cells();
  s.box_ = std::move(b);
  return s;
}

IndexSet IndexSet::empty(std::size_t dims) {
  IndexSet s;
  s.box_ = Box::empty_box(dims);
  return s;
}

IndexSet IndexSet::sphere(std::size_t dims, double radius) {
  if (!(radius >= 0.0)) return empty(dims);
  const auto r = static_cast<std::int64_t>(std::floor(radius));
  const double r2 = radius * radius;
  return from_predicate(Box::cube(dims, -r, r), [&](const Coord& j) {
    double s = 0.0;
    for (auto v : j) s += static_cast<double>(v) * static_cast<double>(v);
    return s <= r2;
  });
}

IndexSet IndexSet::from_mask(Box b, std::vector<std::uint8_t> mask) {
  if (mask.size() != b.cells()) throw DomainError("IndexSet mask size does not match its box");
  IndexSet s;
  s.count_ = static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto v) { return v != 0; }));
  s.box_ = std::move(b);
  if (s.count_ != s.box_.cells()) s.mask_ = std::move(mask);
  return s;
}

bool IndexSet::contains(std::span<const std::int64_t> j) const {
  if (count_ == 0 || !box_.contains(j)) return false;
  return member_at(box_.linear_index(j));
}

IndexSet minkowski_sum(const IndexSet& r, const IndexSet& s) {
  require_same_dims(r.dims(), s.dims(), "minkowski_sum");
  if (r.empty() || s.empty()) return IndexSet::empty(r.dims());
  const Box out = minkowski(r.bounding_box(), s.bounding_box());
  if (r.is_box() && s.is_box()) return IndexSet::box(out);

  // Members as linear offsets in the output box's strides; out.lo = r.lo + s.lo.
  auto offsets = [&](const IndexSet& set) {
    std::vector<std::size_t> off;
    off.reserve(set.cardinality());
    const Box& b = set.bounding_box();
    Coord rel(b.dims());
    for_each_cell(b, [&](const Coord& j, std::size_t lin) {
      if (!set.member_at(lin)) return;
      std::size_t o = 0;
      for (std::size_t l = 0; l < b.dims(); ++l)
        o = o * static_cast<std::size_t>(out.extent(l)) + static_cast<std::size_t>(j[l] - b.lo[l]);
      off.push_back(o);
    });
    return off;
  };
  const auto ro = offsets(r);
  const auto so = offsets(s);
  std::vector<std::uint8_t> mask(out.cells(), 0);
  for (auto a : ro)
    for (auto b : so) mask[a + b] = 1;
  return IndexSet::from_mask(out, std::move(mask));
}

// ---------------------------------------------------------------- LatticeSignal

LatticeSignal::LatticeSignal(Box box, std::vector<double> values) : box_(std::move(box)), values_(std::move(values)) {
  if (values_.size() != box_.cells()) throw DomainError("LatticeSignal: value count does not match box " + to_string(box_));
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("LatticeSignal: non-finite value");
}

LatticeSignal LatticeSignal::zeros(Box box) {
  const std::size_t n = box.cells();
  return LatticeSignal(std::move(box), std::vector<double>(n, 0.0));
}

LatticeSignal LatticeSignal::impulse(std::size_t dims) {
  return LatticeSignal(Box::cube(dims, 0, 0), {1.0});
}

double LatticeSignal::at(std::span<const std::int64_t> j) const {
  if (!box_.contains(j)) return 0.0;
  return values_[box_.linear_index(j)];
}

double LatticeSignal::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double LatticeSignal::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Box LatticeSignal::support() const {
  Box s = Box::empty_box(dims());
  bool any = false;
  for_each_cell(box_, [&](const Coord& j, std::size_t lin) {
    if (values_[lin] == 0.0) return;
    if (!any) {
      s = Box{j, j};
      any = true;
      return;
    }
    for (std::size_t l = 0; l < j.size(); ++l) {
      s.lo[l] = std::min(s.lo[l], j[l]);
      s.hi[l] = std::max(s.hi[l], j[l]);
    }
  });
  return s;
}

IndexSet LatticeSignal::support_set() const {
  std::vector<std::uint8_t> mask(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) mask[i] = values_[i] != 0.0;
  return IndexSet::from_mask(box_, std::move(mask));
}

LatticeSignal LatticeSignal::on_box(const Box& target) const {
  LatticeSignal out = zeros(target);
  const Box common = intersection(box_, target);
  for_each_cell(common, [&](const Coord& j, std::size_t) {
    out.values_[target.linear_index(j)] = values_[box_.linear_index(j)];
  });
  return out;
}

namespace {
template <class Op>
LatticeSignal combine(const LatticeSignal& a, const LatticeSignal& b, Op op) {
  if (a.box() != b.box()) throw DomainError("signals must share a bounding box: " + to_string(a.box()) + " vs " + to_string(b.box()));
  std::vector<double> v(a.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a.values()[i], b.values()[i]);
  return LatticeSignal(a.box(), std::move(v));
}
}  // namespace

LatticeSignal operator+(const LatticeSignal& a, const LatticeSignal& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}

LatticeSignal operator-(const LatticeSignal& a, const LatticeSignal& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}

LatticeSignal operator*(double s, const LatticeSignal& a) {
  std::vector<double> v(a.values().begin(), a.values().end());
  for (auto& x : v) x *= s;
  return LatticeSignal(a.box(), std::move(v));
}

// ---------------------------------------------------------------- Spectrum

double grid_frequency(std::int64_t k, std::int64_t m) {
  const std::int64_t kk = 2 * k < m ? k : k - m;
  return 2.0 * std::numbers::pi * static_cast<double>(kk) / static_cast<double>(m);
}

std::vector<double> axis_frequencies(std::int64_t m) {
  std::vector<double> t(static_cast<std::size_t>(m));
  for (std::int64_t k = 0; k < m; ++k) t[static_cast<std::size_t>(k)] = grid_frequency(k, m);
  return t;
}

std::size_t grid_cells(std::span<const std::int64_t> grid) {
  std::size_t c = 1;
  for (auto m : grid) c *= static_cast<std::size_t>(m);
  return c;
}

Spectrum::Spectrum(GridSizes grid, std::vector<cdouble> values) : grid_(std::move(grid)), values_(std::move(values)) {
  for (auto m : grid_)
    if (m <= 0) throw SizingError("Spectrum: grid sizes must be positive");
  if (values_.size() != grid_cells(grid_)) throw DomainError("Spectrum: value count does not match grid");
}

cdouble Spectrum::at(std::span<const std::int64_t> k) const {
  std::size_t lin = 0;
  for (std::size_t l = 0; l < grid_.size(); ++l)
    lin = lin * static_cast<std::size_t>(grid_[l]) + static_cast<std::size_t>(floor_mod(k[l], grid_[l]));
  return values_[lin];
}

void Spectrum::frequency_of(std::size_t lin, std::span<double> t) const {
  for (std::size_t l = grid_.size(); l-- > 0;) {
    const auto m = static_cast<std::size_t>(grid_[l]);
    t[l] = grid_frequency(static_cast<std::int64_t>(lin % m), grid_[l]);
    lin /= m;
  }
}

GridSizes minimal_grid(const Box& box) { return box.extents(); }

GridSizes oversampled_grid(const Box& box, double factor) {
  if (!(factor >= 1.0) || !std::isfinite(factor)) throw DomainError("oversample factor must be >= 1");
  GridSizes g = box.extents();
  for (auto& m : g) m = static_cast<std::int64_t>(std::ceil(factor * static_cast<double>(m) - 1e-9));
  return g;
}

// ---------------------------------------------------------------- transforms

Spectrum dft_forward(const LatticeSignal& signal, std::span<const std::int64_t> grid) {
  const std::size_t d = signal.dims();
  if (grid.size() != d) throw SizingError("dft_forward: grid has " + std::to_string(grid.size()) + " axes, signal has " + std::to_string(d));
  for (auto m : grid)
    if (m <= 0) throw SizingError("dft_forward: grid sizes must be positive");
  const Box support = signal.support();
  if (!support.empty()) {
    for (std::size_t l = 0; l < d; ++l)
      if (support.extent(l) > grid[l])
        throw SizingError("dft_forward: grid size " + std::to_string(grid[l]) + " on axis " + std::to_string(l) +
                          " is smaller than the support extent " + std::to_string(support.extent(l)));
  }
  GridSizes g(grid.begin(), grid.end());
  std::vector<cdouble> data(grid_cells(g), cdouble{});
  const Box& box = signal.box();
  const auto vals = signal.values();
  if (!support.empty()) {
    for_each_cell(support, [&](const Coord& j, std::size_t) {
      std::size_t lin = 0;
      for (std::size_t l = 0; l < d; ++l)
        lin = lin * static_cast<std::size_t>(g[l]) + static_cast<std::size_t>(floor_mod(j[l], g[l]));
      data[lin] += vals[box.linear_index(j)];
    });
  }
  kernels::fft_nd(data, g, +1);
  return Spectrum(std::move(g), std::move(data));
}

InverseResult dft_inverse_on(const Spectrum& spectrum, const IndexSet& target) {
  const auto& g = spectrum.grid_sizes();
  const std::size_t d = g.size();
  if (target.dims() != d) throw SizingError("dft_inverse_on: target dimension does not match spectrum");
  const Box& tb = target.bounding_box();
  if (!tb.empty()) {
    for (std::size_t l = 0; l < d; ++l)
      if (tb.extent(l) > g[l])
        throw SizingError("dft_inverse_on: target extent " + std::to_string(tb.extent(l)) + " on axis " + std::to_string(l) +
                          " exceeds the alias-free window " + std::to_string(g[l]));
  }
  std::vector<cdouble> data(spectrum.values().begin(), spectrum.values().end());
  kernels::fft_nd(data, g, -1);
  const double scale = 1.0 / static_cast<double>(grid_cells(g));
  InverseResult res;
  res.signal = LatticeSignal::zeros(tb);
  auto out = res.signal.values_mut();
  for_each_cell(tb, [&](const Coord& j, std::size_t lin) {
    if (!target.member_at(lin)) return;
    std::size_t k = 0;
    for (std::size_t l = 0; l < d; ++l)
      k = k * static_cast<std::size_t>(g[l]) + static_cast<std::size_t>(floor_mod(j[l], g[l]));
    const cdouble v = data[k] * scale;
    out[lin] = v.real();
    res.max_imag = std::max(res.max_imag, std::abs(v.imag()));
  });
  return res;
}

double integrate_grid(std::span<const double> samples, std::span<const std::int64_t> grid) {
  const std::size_t n = grid_cells(grid);
  if (samples.size() != n) throw DomainError("integrate_grid: sample count does not match grid");
  // Neumaier-compensated serial sum: order fixed, result independent of threads
  double s = 0.0, c = 0.0;
  for (double v : samples) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  const double vol = std::pow(2.0 * std::numbers::pi, static_cast<double>(grid.size()));
  return vol * (s + c) / static_cast<double>(n);
}

double integrate_freq(const FrequencyIntegrand& integrand, std::span<const std::int64_t> grid) {
  const std::size_t n = grid_cells(grid);
  const std::size_t d = grid.size();
  std::vector<std::vector<double>> axes(d);
  for (std::size_t l = 0; l < d; ++l) axes[l] = axis_frequencies(grid[l]);
  std::vector<double> samples(n);

#pragma omp parallel
  {
    std::vector<double> t(d);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      std::size_t lin = static_cast<std::size_t>(i);
      for (std::size_t l = d; l-- > 0;) {
        const auto m = static_cast<std::size_t>(grid[l]);
        t[l] = axes[l][lin % m];
        lin /= m;
      }
      samples[static_cast<std::size_t>(i)] = integrand(t);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(samples[i])) continue;
    std::vector<double> t(d);
    std::size_t lin = i;
    for (std::size_t l = d; l-- > 0;) {
      const auto m = static_cast<std::size_t>(grid[l]);
      t[l] = axes[l][lin % m];
      lin /= m;
    }
    std::ostringstream os;
    os << "integrate_freq: non-finite integrand at t = (";
    for (std::size_t l = 0; l < d; ++l) os << (l ? ", " : "") << t[l];
    os << ")";
    throw ComputeError(os.str());
  }
  return integrate_grid(samples, grid);
}

}  // namespace psfest
