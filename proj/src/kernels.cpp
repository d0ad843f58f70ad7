#include "psfest/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psfest/error.hpp"
#include "psfest/fft.hpp"

namespace psfest::kernels {

void fft_nd(std::span<cdouble> data, std::span<const std::int64_t> dims, int sign) {
  const std::size_t total = grid_cells(dims);
  if (data.size() != total) throw DomainError("fft_nd: data size does not match dims");
  std::size_t inner = total;  // product of extents after the current axis
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const auto n = static_cast<std::size_t>(dims[axis]);
    inner /= n;
    if (n == 1) continue;
    const std::size_t outer = total / (n * inner);
    const auto plan = fft::plan_for(n);
    const auto lines = static_cast<std::int64_t>(outer * inner);

#pragma omp parallel
    {
      std::vector<cdouble> line(n), scratch(plan->scratch_size());
#pragma omp for schedule(static)
      for (std::int64_t li = 0; li < lines; ++li) {
        const std::size_t o = static_cast<std::size_t>(li) / inner;
        const std::size_t i = static_cast<std::size_t>(li) % inner;
        cdouble* base = data.data() + o * n * inner + i;
        for (std::size_t k = 0; k < n; ++k) line[k] = base[k * inner];
        plan->execute(line.data(), sign, scratch.data());
        for (std::size_t k = 0; k < n; ++k) base[k * inner] = line[k];
      }
    }
  }
}

namespace {

void check_pair(const LatticeSignal& a, const LatticeSignal& b) {
  if (a.dims() != b.dims()) throw DomainError("convolve: dimension mismatch");
}

}  // namespace

LatticeSignal convolve_direct(const LatticeSignal& a, const LatticeSignal& b) {
  check_pair(a, b);
  const Box out_box = minkowski(a.box(), b.box());
  LatticeSignal out = LatticeSignal::zeros(out_box);
  if (out_box.empty()) return out;
  const std::size_t d = a.dims();
  const Box& ab = a.box();
  const Box& bb = b.box();
  const auto av = a.values();
  const auto bv = b.values();
  auto ov = out.values_mut();
  const auto cells = static_cast<std::int64_t>(out_box.cells());

#pragma omp parallel
  {
    Coord j(d), klo(d), khi(d), k(d);
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < cells; ++c) {
      std::size_t lin = static_cast<std::size_t>(c);
      for (std::size_t l = d; l-- > 0;) {
        const auto e = static_cast<std::size_t>(out_box.extent(l));
        j[l] = out_box.lo[l] + static_cast<std::int64_t>(lin % e);
        lin /= e;
      }
      // k ranges over a's box with j - k inside b's box
      bool any = true;
      for (std::size_t l = 0; l < d; ++l) {
        klo[l] = std::max(ab.lo[l], j[l] - bb.hi[l]);
        khi[l] = std::min(ab.hi[l], j[l] - bb.lo[l]);
        any = any && klo[l] <= khi[l];
      }
      if (!any) continue;
      const Box kb{klo, khi};
      double acc = 0.0;
      k = klo;
      Coord jk(d);
      do {
        for (std::size_t l = 0; l < d; ++l) jk[l] = j[l] - k[l];
        acc += av[ab.linear_index(k)] * bv[bb.linear_index(jk)];
      } while (next_cell(kb, k));
      ov[static_cast<std::size_t>(c)] = acc;
    }
  }
  return out;
}

LatticeSignal convolve_fft(const LatticeSignal& a, const LatticeSignal& b) {
  check_pair(a, b);
  const Box out_box = minkowski(a.box(), b.box());
  if (out_box.empty()) return LatticeSignal::zeros(out_box);
  const std::size_t d = a.dims();
  GridSizes g(d);
  for (std::size_t l = 0; l < d; ++l) g[l] = static_cast<std::int64_t>(fft::next_smooth(static_cast<std::size_t>(out_box.extent(l))));

  // place both operands relative to their own lower corners
  auto load = [&](const LatticeSignal& s) {
    std::vector<cdouble> buf(grid_cells(g), cdouble{});
    const auto v = s.values();
    for_each_cell(s.box(), [&](const Coord& j, std::size_t lin) {
      std::size_t p = 0;
      for (std::size_t l = 0; l < d; ++l) p = p * static_cast<std::size_t>(g[l]) + static_cast<std::size_t>(j[l] - s.box().lo[l]);
      buf[p] = v[lin];
    });
    fft_nd(buf, g, -1);
    return buf;
  };
  auto fa = load(a);
  const auto fb = load(b);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  fft_nd(fa, g, +1);
  const double scale = 1.0 / static_cast<double>(fa.size());

  LatticeSignal out = LatticeSignal::zeros(out_box);
  auto ov = out.values_mut();
  for_each_cell(out_box, [&](const Coord& j, std::size_t lin) {
    std::size_t p = 0;
    for (std::size_t l = 0; l < d; ++l) p = p * static_cast<std::size_t>(g[l]) + static_cast<std::size_t>(j[l] - out_box.lo[l]);
    ov[lin] = fa[p].real() * scale;
  });
  return out;
}

LatticeSignal convolve(const LatticeSignal& a, const LatticeSignal& b) {
  const double work = static_cast<double>(a.box().cells()) * static_cast<double>(b.box().cells());
  return work <= direct_work_limit ? convolve_direct(a, b) : convolve_fft(a, b);
}

}  // namespace psfest::kernels

namespace psfest::reference {

std::vector<cdouble> dft_nd(std::span<const cdouble> data, std::span<const std::int64_t> dims, int sign) {
  const std::size_t d = dims.size();
  const Box b = Box::from_extents(Coord(d, 0), dims);
  if (data.size() != b.cells()) throw DomainError("dft_nd: data size does not match dims");
  std::vector<cdouble> out(data.size());
  for_each_cell(b, [&](const Coord& k, std::size_t klin) {
    cdouble acc{};
    for_each_cell(b, [&](const Coord& j, std::size_t jlin) {
      double phase = 0.0;
      for (std::size_t l = 0; l < d; ++l)
        phase += static_cast<double>((k[l] * j[l]) % dims[l]) / static_cast<double>(dims[l]);
      const double a = sign * 2.0 * std::numbers::pi * phase;
      acc += data[jlin] * cdouble{std::cos(a), std::sin(a)};
    });
    out[klin] = acc;
  });
  return out;
}

LatticeSignal convolve(const LatticeSignal& a, const LatticeSignal& b) {
  if (a.dims() != b.dims()) throw DomainError("convolve: dimension mismatch");
  const Box out_box = minkowski(a.box(), b.box());
  LatticeSignal out = LatticeSignal::zeros(out_box);
  auto ov = out.values_mut();
  const auto bv = b.values();
  Coord s(a.dims());
  for_each_cell(a.box(), [&](const Coord& j, std::size_t ja) {
    const double x = a.values()[ja];
    if (x == 0.0) return;
    for_each_cell(b.box(), [&](const Coord& k, std::size_t kb) {
      for (std::size_t l = 0; l < s.size(); ++l) s[l] = j[l] + k[l];
      ov[out_box.linear_index(s)] += x * bv[kb];
    });
  });
  return out;
}

}  // namespace psfest::reference
