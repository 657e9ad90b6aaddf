#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace isinglab {

// Thrown when an exact enumeration would exceed the configured cap.
// Callers must treat this as a refusal, never as a fallback signal.
struct cap_exceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultEnumerationCap = 25;

// Streaming log-sum-exp: log(sum_i exp(v_i)) without overflow.
// Values may be added in any fixed order; accumulators can be merged,
// which is how block-parallel enumeration combines partial sums.
class LogSumExp {
public:
    void add(double v) {
        if (std::isinf(v) && v < 0) return;  // exp(-inf) contributes 0
        if (v <= max_) {
            sum_ += std::exp(v - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - v) + 1.0;
            max_ = v;
        }
    }

    void merge(const LogSumExp& other) {
        if (other.empty()) return;
        if (other.max_ <= max_) {
            sum_ += other.sum_ * std::exp(other.max_ - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
            max_ = other.max_;
        }
    }

    bool empty() const { return max_ == -std::numeric_limits<double>::infinity(); }

    // log of the accumulated sum; -inf when nothing was added.
    double log() const { return empty() ? max_ : max_ + std::log(sum_); }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

// log C(n, r) via log-gamma; C(100, 50) overflows 64-bit integers,
// so binomials never leave the log domain.
inline double log_binomial(int n, int r) {
    if (r < 0 || r > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(r) + 1.0) -
           std::lgamma(double(n - r) + 1.0);
}

// log(1 + exp(t)) without overflow for large |t|.
inline double log1p_exp(double t) {
    return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// Shortest decimal string that round-trips to the same double.
// Used everywhere results are printed so output is byte-reproducible.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

// Deterministic parallel map over [0, count): each index computes into its
// own slot, so results are independent of thread count and scheduling.
template <typename Fn>
inline void parallel_for(std::uint64_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::uint64_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace detail

}  // namespace isinglab
