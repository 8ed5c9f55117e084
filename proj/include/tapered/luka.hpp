#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "tapered/frame.hpp"
#include "tapered/scalar_format.hpp"

namespace tapered {

template <class T>
using Field = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class FlowStatus : std::uint8_t { Ok, Singular, Exception };

/// Per-pixel spatial and temporal derivatives in one scalar format.
template <class T>
struct GradientField {
  Field<T> ix, iy, it;

  int width() const noexcept { return static_cast<int>(ix.cols()); }
  int height() const noexcept { return static_cast<int>(ix.rows()); }
};

template <class T>
struct FlowField {
  Field<T> u, v;
  Field<FlowStatus> status;

  int width() const noexcept { return static_cast<int>(u.cols()); }
  int height() const noexcept { return static_cast<int>(u.rows()); }
};

template <class T>
struct WindowSolution {
  T u;
  T v;
  FlowStatus status;
};

struct FlowOptions {
  int window_radius = 2;
  /// Determinants with |det| <= tau (converted into the run's format) are singular.
  double tau = 1e-9;
  unsigned threads = 1;
};

namespace detail {

inline void require_flow_inputs(const Frame& f1, const Frame& f2)
{
  if (f1.width() != f2.width() || f1.height() != f2.height()) {
    throw std::invalid_argument("frames differ in size");
  }
  if (f1.width() < 3 || f1.height() < 3) throw std::invalid_argument("frames must be at least 3x3");
}

template <class T>
struct Products {
  T xx, xy, yy, xt, yt;
};

template <ScalarFormat F>
Products<scalar_t<F>> products_at(const GradientField<scalar_t<F>>& g, int x, int y, const F& fmt)
{
  const auto ix = g.ix(y, x);
  const auto iy = g.iy(y, x);
  const auto it = g.it(y, x);
  return {fmt.mul(ix, ix), fmt.mul(ix, iy), fmt.mul(iy, iy), fmt.mul(ix, it), fmt.mul(iy, it)};
}

template <ScalarFormat F>
bool is_singular(const scalar_t<F>& det, const scalar_t<F>& tau, const F& fmt)
{
  return !(fmt.compare(det, tau) > 0) && !(fmt.compare(det, fmt.neg(tau)) < 0);
}

// Row-major window accumulation followed by the Cramer's-rule solve.
template <ScalarFormat F, class ProductAt>
WindowSolution<scalar_t<F>> solve_accumulated(ProductAt&& product_at, int x, int y, int radius, const F& fmt,
                                              const scalar_t<F>& tau)
{
  auto s = product_at(x - radius, y - radius);
  for (int wy = y - radius; wy <= y + radius; ++wy) {
    for (int wx = x - radius; wx <= x + radius; ++wx) {
      if (wy == y - radius && wx == x - radius) continue;
      const auto p = product_at(wx, wy);
      s.xx = fmt.add(s.xx, p.xx);
      s.xy = fmt.add(s.xy, p.xy);
      s.yy = fmt.add(s.yy, p.yy);
      s.xt = fmt.add(s.xt, p.xt);
      s.yt = fmt.add(s.yt, p.yt);
    }
  }
  const auto det = fmt.sub(fmt.mul(s.xx, s.yy), fmt.mul(s.xy, s.xy));
  if (fmt.is_exception(det)) return {det, det, FlowStatus::Exception};
  const auto zero = fmt.from_pixel(0);
  if (is_singular(det, tau, fmt)) return {zero, zero, FlowStatus::Singular};
  const auto u = fmt.div(fmt.sub(fmt.mul(s.xy, s.yt), fmt.mul(s.yy, s.xt)), det);
  const auto v = fmt.div(fmt.sub(fmt.mul(s.xy, s.xt), fmt.mul(s.xx, s.yt)), det);
  const bool bad = fmt.is_exception(u) || fmt.is_exception(v);
  return {u, v, bad ? FlowStatus::Exception : FlowStatus::Ok};
}

template <ScalarFormat F>
unsigned usable_threads(const F& fmt, unsigned requested)
{
  if constexpr (std::is_same_v<F, ReferenceFormat>) {
    if (fmt.tap != nullptr) return 1;  // the tap is not synchronized
  }
  return std::max(1u, requested);
}

// Runs body(y) for y in [begin, end) on up to `threads` workers, interleaved by row.
template <class Body>
void for_rows(int begin, int end, unsigned threads, Body&& body)
{
  if (threads <= 1 || end - begin < 2) {
    for (int y = begin; y < end; ++y) body(y);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (int y = begin + static_cast<int>(t); y < end; y += static_cast<int>(threads)) body(y);
    });
  }
}

}  // namespace detail

/// Central differences on frame 1 (one-sided on the border ring) and the
/// frame difference in time, all on normalized pixels in the target format.
template <ScalarFormat F>
GradientField<scalar_t<F>> gradients(const Frame& f1, const Frame& f2, int norm, const F& fmt)
{
  detail::require_flow_inputs(f1, f2);
  using V = scalar_t<F>;

  std::array<bool, 256> used{};
  for (auto p : f1.bytes()) used[p] = true;
  for (auto p : f2.bytes()) used[p] = true;
  std::array<std::optional<V>, 256> lut;
  for (int p = 0; p < 256; ++p) {
    if (used[p]) lut[p] = normalize_pixel(p, norm, fmt);
  }
  auto n1 = [&](int x, int y) { return *lut[f1.at(x, y)]; };
  auto n2 = [&](int x, int y) { return *lut[f2.at(x, y)]; };
  const V two = fmt.from_pixel(2);

  const int w = f1.width();
  const int h = f1.height();
  GradientField<V> g{Field<V>(h, w), Field<V>(h, w), Field<V>(h, w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x == 0) {
        g.ix(y, x) = fmt.sub(n1(1, y), n1(0, y));
      } else if (x == w - 1) {
        g.ix(y, x) = fmt.sub(n1(w - 1, y), n1(w - 2, y));
      } else {
        g.ix(y, x) = fmt.div(fmt.sub(n1(x + 1, y), n1(x - 1, y)), two);
      }
      if (y == 0) {
        g.iy(y, x) = fmt.sub(n1(x, 1), n1(x, 0));
      } else if (y == h - 1) {
        g.iy(y, x) = fmt.sub(n1(x, h - 1), n1(x, h - 2));
      } else {
        g.iy(y, x) = fmt.div(fmt.sub(n1(x, y + 1), n1(x, y - 1)), two);
      }
      g.it(y, x) = fmt.sub(n2(x, y), n1(x, y));
    }
  }
  return g;
}

/// Solves the windowed normal equations at (x, y). Pixels whose window does
/// not fit inside the field are reported Singular with zero flow.
template <ScalarFormat F>
WindowSolution<scalar_t<F>> solve_window(const GradientField<scalar_t<F>>& grads, int x, int y, int radius,
                                         const F& fmt, double tau = 1e-9)
{
  if (radius < 0) throw std::invalid_argument("window radius must be non-negative");
  const auto zero = fmt.from_pixel(0);
  if (x - radius < 0 || y - radius < 0 || x + radius >= grads.width() || y + radius >= grads.height()) {
    return {zero, zero, FlowStatus::Singular};
  }
  auto product_at = [&](int px, int py) { return detail::products_at(grads, px, py, fmt); };
  return detail::solve_accumulated(product_at, x, y, radius, fmt, fmt.from_real(tau));
}

template <ScalarFormat F>
FlowField<scalar_t<F>> flow(const Frame& f1, const Frame& f2, int norm, const FlowOptions& opts, const F& fmt)
{
  using V = scalar_t<F>;
  if (opts.window_radius < 0) throw std::invalid_argument("window radius must be non-negative");
  const auto g = gradients(f1, f2, norm, fmt);
  const int w = g.width();
  const int h = g.height();
  const int r = opts.window_radius;
  const unsigned threads = detail::usable_threads(fmt, opts.threads);

  Field<detail::Products<V>> products(h, w);
  detail::for_rows(0, h, threads, [&](int y) {
    for (int x = 0; x < w; ++x) products(y, x) = detail::products_at(g, x, y, fmt);
  });

  const V zero = fmt.from_pixel(0);
  const V tau = fmt.from_real(opts.tau);
  FlowField<V> out{Field<V>(h, w), Field<V>(h, w), Field<FlowStatus>(h, w)};
  out.u.fill(zero);
  out.v.fill(zero);
  out.status.fill(FlowStatus::Singular);

  auto product_at = [&](int px, int py) { return products(py, px); };
  detail::for_rows(r, h - r, threads, [&](int y) {
    for (int x = r; x < w - r; ++x) {
      const auto s = detail::solve_accumulated(product_at, x, y, r, fmt, tau);
      out.u(y, x) = s.u;
      out.v(y, x) = s.v;
      out.status(y, x) = s.status;
    }
  });
  return out;
}

/// Converts a flow field to binary64 through the format's exact conversion.
template <ScalarFormat F>
FlowField<double> to_reference_field(const FlowField<scalar_t<F>>& f, const F& fmt)
{
  FlowField<double> out{Field<double>(f.height(), f.width()), Field<double>(f.height(), f.width()), f.status};
  for (Eigen::Index i = 0; i < f.u.size(); ++i) {
    out.u.data()[i] = fmt.to_reference(f.u.data()[i]);
    out.v.data()[i] = fmt.to_reference(f.v.data()[i]);
  }
  return out;
}

/// Runs the kernel in a runtime-selected format and returns binary64 flow.
inline FlowField<double> flow_any(const Frame& f1, const Frame& f2, int norm, const FlowOptions& opts,
                                  const AnyFormat& fmt)
{
  return std::visit([&](const auto& f) { return to_reference_field(flow(f1, f2, norm, opts, f), f); }, fmt);
}

}  // namespace tapered
