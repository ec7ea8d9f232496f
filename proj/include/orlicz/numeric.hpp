#ifndef ORLICZ_NUMERIC_HPP
#define ORLICZ_NUMERIC_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <span>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace orlicz {

/// Pairwise (cascade) summation. The split points depend only on the length,
/// so the result is identical however the caller partitions the work.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (i + 1 == n) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

/// n log-spaced points on [lo, hi], endpoints exact.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out = linspace(std::log(lo), std::log(hi), n);
  for (double& x : out) x = std::exp(x);
  if (!out.empty()) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

/// Doubles the density of a positive increasing grid by inserting geometric midpoints.
inline std::vector<double> refine_grid(std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.empty() ? 0 : 2 * grid.size() - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) out.push_back(std::sqrt(grid[i - 1] * grid[i]));
    out.push_back(grid[i]);
  }
  return out;
}

/// Least-squares slope of log(y) against log(x). Points with non-positive
/// coordinates are ignored; returns NaN with fewer than two usable points.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::nan("");
  const double dm = static_cast<double>(m);
  const double den = dm * sxx - sx * sx;
  if (den == 0) return std::nan("");
  return (dm * sxy - sx * sy) / den;
}

/// Shortest round-trip decimal representation; used for every number we write
/// to CSV or config text so outputs are byte-stable.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Worker count for sample sweeps: hardware concurrency capped by ORLICZ_THREADS.
inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ORLICZ_THREADS")) {
    const std::string s(env);
    std::size_t cap = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc{} && cap > 0) n = std::min(n, cap);
  }
  return n;
}

/// out[i] = fn(i) for i in [0, count), split into contiguous blocks across
/// worker_count() threads. Results land in index order, so any reduction the
/// caller runs afterwards is independent of the thread count.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn&& fn) {
  std::vector<T> out(count);
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(1, count / 256));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  const std::size_t block = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block, hi = std::min(count, lo + block);
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace orlicz

#endif  // ORLICZ_NUMERIC_HPP
