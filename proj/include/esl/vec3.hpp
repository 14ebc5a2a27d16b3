// Small fixed-size linear algebra used throughout the library.
#pragma once

#include <array>
#include <cmath>

namespace esl {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 &operator+=(const Vec3 &o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3 &operator-=(const Vec3 &o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3 &operator*=(double s) {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
constexpr Vec3 operator-(const Vec3 &a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3 &a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3 &a) { return a / norm(a); }

inline bool is_finite(const Vec3 &a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

namespace axes {
inline constexpr Vec3 i{1.0, 0.0, 0.0};
inline constexpr Vec3 j{0.0, 1.0, 0.0};
inline constexpr Vec3 k{0.0, 0.0, 1.0};
} // namespace axes

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> a{};

    constexpr double operator()(int r, int c) const { return a[3 * r + c]; }
    constexpr double &operator()(int r, int c) { return a[3 * r + c]; }

    static constexpr Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }
};

inline Mat3 operator*(const Mat3 &l, const Mat3 &r) {
    Mat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += l(i, k) * r(k, j);
            out(i, j) = s;
        }
    return out;
}

inline Vec3 operator*(const Mat3 &m, const Vec3 &v) {
    return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
            m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
            m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

inline Mat3 transpose(const Mat3 &m) {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t(i, j) = m(j, i);
    return t;
}

inline double determinant(const Mat3 &m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

inline double frobenius_distance(const Mat3 &l, const Mat3 &r) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) s += (l.a[i] - r.a[i]) * (l.a[i] - r.a[i]);
    return std::sqrt(s);
}

/// Cross-product matrix: skew(w) * v == cross(w, v).
inline Mat3 skew(const Vec3 &w) {
    Mat3 m;
    m(0, 1) = -w.z;
    m(0, 2) = w.y;
    m(1, 0) = w.z;
    m(1, 2) = -w.x;
    m(2, 0) = -w.y;
    m(2, 1) = w.x;
    return m;
}

} // namespace esl
