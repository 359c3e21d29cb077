#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rangeudf {

// Error taxonomy. Validation/format errors map to CLI exit code 1, IO errors to 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

template <class S>
struct Vec3T {
    S x = 0, y = 0, z = 0;

    Vec3T() = default;
    Vec3T(S x_, S y_, S z_) : x(x_), y(y_), z(z_) {}

    S& operator[](int i) { return (&x)[i]; }
    S operator[](int i) const { return (&x)[i]; }

    Vec3T operator+(const Vec3T& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3T operator-(const Vec3T& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3T operator*(S s) const { return {x * s, y * s, z * s}; }
    Vec3T operator/(S s) const { return {x / s, y / s, z / s}; }
    Vec3T& operator+=(const Vec3T& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3T& operator-=(const Vec3T& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    bool operator==(const Vec3T& o) const { return x == o.x && y == o.y && z == o.z; }

    template <class T>
    Vec3T<T> cast() const { return {static_cast<T>(x), static_cast<T>(y), static_cast<T>(z)}; }
};

template <class S> inline Vec3T<S> operator*(S s, const Vec3T<S>& v) { return v * s; }
template <class S> inline S dot(const Vec3T<S>& a, const Vec3T<S>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
template <class S> inline Vec3T<S> cross(const Vec3T<S>& a, const Vec3T<S>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <class S> inline S norm2(const Vec3T<S>& v) { return dot(v, v); }
template <class S> inline S norm(const Vec3T<S>& v) { return std::sqrt(dot(v, v)); }
template <class S> inline Vec3T<S> cwise_min(const Vec3T<S>& a, const Vec3T<S>& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
template <class S> inline Vec3T<S> cwise_max(const Vec3T<S>& a, const Vec3T<S>& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

using Vec3f = Vec3T<float>;
using Vec3d = Vec3T<double>;

struct Aabb {
    Vec3d lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec3d hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    void grow(const Vec3d& p) { lo = cwise_min(lo, p); hi = cwise_max(hi, p); }
    void grow(const Aabb& b) { lo = cwise_min(lo, b.lo); hi = cwise_max(hi, b.hi); }
    Vec3d extent() const { return hi - lo; }
    Vec3d center() const { return (lo + hi) * 0.5; }
    bool valid() const { return lo.x <= hi.x; }

    // Squared distance from a point to the box, 0 inside.
    double dist2(const Vec3d& p) const {
        double d2 = 0;
        for (int i = 0; i < 3; ++i) {
            double v = p[i];
            if (v < lo[i]) { double d = lo[i] - v; d2 += d * d; }
            else if (v > hi[i]) { double d = v - hi[i]; d2 += d * d; }
        }
        return d2;
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic RNG. Distribution helpers are hand-rolled so streams are
// bit-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return eng_(); }

    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Uniform in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection-free modulo is fine here; bias is < 2^-40 for our n.
        return eng_() % n;
    }

    double normal() {
        // Box-Muller, single value per call; stateless apart from the engine.
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Independent substream, stable under reordering of other draws.
    Rng fork(std::uint64_t stream) const {
        std::ostringstream os;
        os << eng_;
        return Rng(splitmix64(std::hash<std::string>{}(os.str())) ^ splitmix64(stream ^ 0xabcdef12345ull));
    }

    std::string serialize() const {
        std::ostringstream os;
        os << eng_;
        return os.str();
    }
    void deserialize(const std::string& s) {
        std::istringstream is(s);
        is >> eng_;
        if (!is) throw FormatError("invalid RNG state string");
    }

private:
    std::mt19937_64 eng_;
};

// Derives a per-entity seed from a base seed and a stable tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return splitmix64(splitmix64(base) ^ (tag * 0x9e3779b97f4a7c15ull + 0x1234abcdull));
}

namespace detail {
inline int& thread_count_ref() {
    static int n = 0;  // 0 = unset, resolve lazily
    return n;
}
}  // namespace detail

inline void set_thread_count(int n) { detail::thread_count_ref() = n; }

inline int thread_count() {
    int n = detail::thread_count_ref();
    if (n > 0) return n;
    if (const char* env = std::getenv("RANGEUDF_THREADS")) {
        int e = std::atoi(env);
        if (e > 0) { detail::thread_count_ref() = e; return e; }
    }
    unsigned hw = std::thread::hardware_concurrency();
    int r = hw == 0 ? 1 : static_cast<int>(hw);
    detail::thread_count_ref() = r;
    return r;
}

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries depend
// only on n and the configured thread count, so results written by index are
// deterministic. fn must not touch shared mutable state.
inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    int workers = std::min<std::int64_t>(thread_count(), n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    std::int64_t chunk = (n + workers - 1) / workers;
    for (int t = 1; t < workers; ++t) {
        std::int64_t b = t * chunk, e = std::min<std::int64_t>(n, b + chunk);
        if (b >= e) break;
        threads.emplace_back([&fn, b, e] { fn(b, e); });
    }
    fn(0, std::min<std::int64_t>(n, chunk));
    for (auto& th : threads) th.join();
}

}  // namespace rangeudf
