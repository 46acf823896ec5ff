#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "stemgrow/errors.hpp"

namespace stemgrow {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
    constexpr Vec3 operator/(double c) const { return {x / c, y / c, z / c}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    Vec3& operator*=(double c) {
        x *= c;
        y *= c;
        z *= c;
        return *this;
    }
    constexpr bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

constexpr Vec3 operator*(double c, const Vec3& v) { return v * c; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (n == 0.0) throw UsageError("normalized: zero vector");
    return v / n;
}

inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Proper rotation matrix (orthogonal, det = +1).
struct Rot3 {
    double m[3][3];

    static Rot3 identity() {
        return Rot3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    }

    Vec3 apply(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
};

// exp of the skew matrix of `omega`, in closed form.
// For |omega| < 1e-8 the sin(t)/t and (1-cos t)/t^2 factors are replaced by
// their 2nd-order Taylor forms to avoid cancellation (per-step rotations are
// O(dt) and routinely tiny).
inline Rot3 rodrigues(const Vec3& omega) {
    if (!is_finite(omega)) throw UsageError("rodrigues: non-finite rotation vector");
    const double t2 = norm2(omega);
    const double t = std::sqrt(t2);
    double a;  // sin(t)/t
    double b;  // (1-cos(t))/t^2
    if (t < 1e-8) {
        a = 1.0 - t2 / 6.0;
        b = 0.5 - t2 / 24.0;
    } else {
        a = std::sin(t) / t;
        b = (1.0 - std::cos(t)) / t2;
    }
    const double wx = omega.x, wy = omega.y, wz = omega.z;
    // I + a*A + b*A^2 with A = skew(omega), A v = omega x v.
    Rot3 r;
    r.m[0][0] = 1.0 + b * (-wz * wz - wy * wy);
    r.m[0][1] = -a * wz + b * wx * wy;
    r.m[0][2] = a * wy + b * wx * wz;
    r.m[1][0] = a * wz + b * wx * wy;
    r.m[1][1] = 1.0 + b * (-wx * wx - wz * wz);
    r.m[1][2] = -a * wx + b * wy * wz;
    r.m[2][0] = -a * wy + b * wx * wz;
    r.m[2][1] = a * wx + b * wy * wz;
    r.m[2][2] = 1.0 + b * (-wx * wx - wy * wy);
    return r;
}

// Node parameters of a composite trapezoid rule, s_0 < s_1 < ... < s_N.
struct QuadratureGrid {
    std::vector<double> s;

    static QuadratureGrid uniform(double s0, double ds, std::size_t n_nodes) {
        if (n_nodes == 0) throw UsageError("QuadratureGrid: empty grid");
        if (ds <= 0.0) throw UsageError("QuadratureGrid: nonpositive spacing");
        QuadratureGrid g;
        g.s.resize(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) g.s[i] = s0 + ds * static_cast<double>(i);
        return g;
    }

    std::size_t size() const { return s.size(); }

    // Composite trapezoid weight of node i; all nonnegative.
    double weight(std::size_t i) const {
        const std::size_t n = s.size();
        if (n == 1) return 0.0;
        if (i == 0) return 0.5 * (s[1] - s[0]);
        if (i == n - 1) return 0.5 * (s[n - 1] - s[n - 2]);
        return 0.5 * (s[i + 1] - s[i - 1]);
    }
};

// Composite trapezoid approximation of the integral over [s_0, s_N].
// Exact for piecewise-linear integrands on the grid.
template <typename T>
T trapezoid(const std::vector<T>& values, const QuadratureGrid& grid) {
    if (values.size() != grid.size())
        throw UsageError("trapezoid: values length does not match grid");
    T acc{};
    for (std::size_t i = 0; i < values.size(); ++i) acc += values[i] * grid.weight(i);
    return acc;
}

// Cumulative trapezoid prefix on a uniform grid: out[i] = integral over
// [s_0, s_i] of the piecewise-linear interpolant. out[0] = 0.
template <typename T>
std::vector<T> cumulative_trapezoid(const std::vector<T>& values, double ds) {
    std::vector<T> out(values.size());
    if (values.empty()) return out;
    out[0] = T{};
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + (values[i - 1] + values[i]) * (0.5 * ds);
    return out;
}

}  // namespace stemgrow
