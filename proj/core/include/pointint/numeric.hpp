#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

namespace pointint {

inline constexpr double pi = std::numbers::pi;

// Point in a D <= 3 dimensional flat domain. Unused trailing coordinates are 0.
struct Point {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    std::size_t dim = 1;

    Point() = default;
    explicit Point(double x0) : x{x0, 0.0, 0.0}, dim(1) {}
    Point(double x0, double x1) : x{x0, x1, 0.0}, dim(2) {}
    Point(double x0, double x1, double x2) : x{x0, x1, x2}, dim(3) {}

    double operator[](std::size_t i) const { return x[i]; }
    double& operator[](std::size_t i) { return x[i]; }

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance_sq(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

// Neumaier's variant of Kahan summation. Order of add() calls is the caller's
// contract; results are deterministic for a fixed order.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
        abs_ += std::abs(v);
    }
    double value() const { return sum_ + comp_; }
    // Sum of magnitudes, used for roundoff estimates.
    double magnitude() const { return abs_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_ = 0.0;
};

inline double compensated_sum(std::span<const double> v) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value();
}

// Worker threads used by grid evaluations. Affects speed only.
inline std::atomic<unsigned> g_thread_count{1};
inline void set_thread_count(unsigned n) { g_thread_count = std::max(1u, n); }
inline unsigned thread_count() { return g_thread_count.load(); }

// Runs fn(i) for i in [0, n) over contiguous chunks. Each index is visited by
// exactly one thread and callers write into per-index slots, so the result does
// not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2 * threads) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
}

}  // namespace pointint
