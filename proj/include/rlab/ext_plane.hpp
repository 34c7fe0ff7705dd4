#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace rlab {

using Complex = std::complex<double>;

/// Points with |z| beyond this magnitude are handled in the w = 1/z chart.
inline constexpr double kNearInfinity = 1e8;

/// A point of the extended complex plane (Riemann sphere).
struct ExtPoint {
    Complex value{0.0, 0.0};
    bool at_infinity = false;

    ExtPoint() = default;
    ExtPoint(Complex z) : value(z) {}  // NOLINT(google-explicit-constructor)
    ExtPoint(double x) : value(x, 0.0) {}

    static ExtPoint infinity() {
        ExtPoint p;
        p.at_infinity = true;
        return p;
    }

    bool is_inf() const { return at_infinity; }

    /// Finite representative; only meaningful when !at_infinity.
    Complex finite() const { return value; }
};

inline bool near_infinity(Complex z) { return std::abs(z) > kNearInfinity; }

namespace detail {
// sqrt(1 + |z|^2) without overflow.
inline double sph_scale(Complex z) { return std::hypot(1.0, std::abs(z)); }
}  // namespace detail

/// Chordal distance on the sphere, normalized so that sup = 1
/// (antipodal points), d(z, inf) = 1/sqrt(1+|z|^2).
inline double chordal(Complex a, Complex b) {
    const double ma = std::abs(a), mb = std::abs(b);
    // Work in the inverted chart when both points are huge: the chordal
    // metric is invariant under z -> 1/z.
    if (ma > 1e100 && mb > 1e100) {
        a = 1.0 / a;
        b = 1.0 / b;
        return std::abs(a - b) / (detail::sph_scale(a) * detail::sph_scale(b));
    }
    if (ma > 1e100) return 1.0 / detail::sph_scale(b);  // effectively infinity
    if (mb > 1e100) return 1.0 / detail::sph_scale(a);
    return std::abs(a - b) / (detail::sph_scale(a) * detail::sph_scale(b));
}

inline double chordal(const ExtPoint& a, const ExtPoint& b) {
    if (a.is_inf() && b.is_inf()) return 0.0;
    if (a.is_inf()) return 1.0 / detail::sph_scale(b.value);
    if (b.is_inf()) return 1.0 / detail::sph_scale(a.value);
    return chordal(a.value, b.value);
}

/// Deterministic total order on complex numbers (re, then im); used for
/// reproducible reductions and fiber orderings.
inline bool lex_less(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline bool lex_less(const ExtPoint& a, const ExtPoint& b) {
    if (a.is_inf() != b.is_inf()) return !a.is_inf();  // infinity sorts last
    if (a.is_inf()) return false;
    return lex_less(a.value, b.value);
}

}  // namespace rlab
