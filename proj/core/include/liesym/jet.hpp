#pragma once

#include <cmath>

namespace liesym {

/// Value of a scalar field on (x,t) together with its first partials.
///
/// Arithmetic follows forward-mode differentiation, so evaluating a closed form
/// with Jet arguments seeded as x = {x, 1, 0}, t = {t, 0, 1} yields the exact
/// partial derivatives alongside the value.
struct Jet {
    double v = 0.0;
    double dx = 0.0;
    double dt = 0.0;

    constexpr Jet() = default;
    constexpr Jet(double value) : v(value) {}
    constexpr Jet(double value, double ddx, double ddt) : v(value), dx(ddx), dt(ddt) {}

    static constexpr Jet x_seed(double x) { return {x, 1.0, 0.0}; }
    static constexpr Jet t_seed(double t) { return {t, 0.0, 1.0}; }

    Jet& operator+=(const Jet& o) { v += o.v; dx += o.dx; dt += o.dt; return *this; }
    Jet& operator-=(const Jet& o) { v -= o.v; dx -= o.dx; dt -= o.dt; return *this; }
    Jet& operator*=(const Jet& o) {
        dx = dx * o.v + v * o.dx;
        dt = dt * o.v + v * o.dt;
        v *= o.v;
        return *this;
    }
    Jet& operator/=(const Jet& o) {
        const double inv = 1.0 / o.v;
        const double q = v * inv;
        dx = (dx - q * o.dx) * inv;
        dt = (dt - q * o.dt) * inv;
        v = q;
        return *this;
    }
};

inline Jet operator-(const Jet& a) { return {-a.v, -a.dx, -a.dt}; }
inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator+(Jet a, double b) { a.v += b; return a; }
inline Jet operator+(double a, Jet b) { b.v += a; return b; }
inline Jet operator-(Jet a, double b) { a.v -= b; return a; }
inline Jet operator-(double a, const Jet& b) { return {a - b.v, -b.dx, -b.dt}; }
inline Jet operator*(Jet a, double b) { return {a.v * b, a.dx * b, a.dt * b}; }
inline Jet operator*(double a, const Jet& b) { return {a * b.v, a * b.dx, a * b.dt}; }
inline Jet operator/(const Jet& a, double b) { return {a.v / b, a.dx / b, a.dt / b}; }

inline Jet exp(const Jet& a) {
    const double e = std::exp(a.v);
    return {e, e * a.dx, e * a.dt};
}
inline Jet sin(const Jet& a) {
    const double c = std::cos(a.v);
    return {std::sin(a.v), c * a.dx, c * a.dt};
}
inline Jet cos(const Jet& a) {
    const double s = -std::sin(a.v);
    return {std::cos(a.v), s * a.dx, s * a.dt};
}
inline Jet sqrt(const Jet& a) {
    const double r = std::sqrt(a.v);
    const double k = 0.5 / r;
    return {r, k * a.dx, k * a.dt};
}

inline double value_of(double a) { return a; }
inline double value_of(const Jet& a) { return a.v; }

} // namespace liesym
