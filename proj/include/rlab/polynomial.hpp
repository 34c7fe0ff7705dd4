#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <utility>
#include <vector>

#include "rlab/ext_plane.hpp"

namespace rlab {

/// Dense univariate polynomial over the complex numbers, coefficients in
/// ascending degree order. The zero polynomial is an empty vector.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { strip_exact_zeros(); }
    Polynomial(std::initializer_list<Complex> coeffs) : c_(coeffs) { strip_exact_zeros(); }

    static Polynomial constant(Complex a) { return Polynomial{std::vector<Complex>{a}}; }

    static Polynomial from_roots(const std::vector<Complex>& roots, Complex lead = 1.0) {
        std::vector<Complex> c{lead};
        for (Complex r : roots) {
            c.push_back(0.0);
            for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
            c[0] *= -r;
        }
        return Polynomial(std::move(c));
    }

    const std::vector<Complex>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    Complex lead() const { return c_.empty() ? Complex{0.0} : c_.back(); }
    Complex operator[](std::size_t k) const { return k < c_.size() ? c_[k] : Complex{0.0}; }

    Complex eval(Complex z) const {
        Complex acc{0.0};
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * z + c_[k];
        return acc;
    }

    /// Horner evaluation of p and p' in one pass.
    std::pair<Complex, Complex> eval_with_derivative(Complex z) const {
        Complex p{0.0}, dp{0.0};
        for (std::size_t k = c_.size(); k-- > 0;) {
            dp = dp * z + p;
            p = p * z + c_[k];
        }
        return {p, dp};
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<Complex> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
        return Polynomial(std::move(d));
    }

    /// Coefficient reversal to a fixed length n+1: q(w) = w^n p(1/w).
    /// Used to move computations to the w = 1/z chart.
    Polynomial reversed(int n) const {
        assert(n >= degree());
        std::vector<Complex> r(static_cast<std::size_t>(n) + 1, Complex{0.0});
        for (std::size_t k = 0; k < c_.size(); ++k) r[static_cast<std::size_t>(n) - k] = c_[k];
        return Polynomial(std::move(r));
    }

    /// Largest coefficient magnitude; 0 for the zero polynomial.
    double coeff_scale() const {
        double s = 0.0;
        for (Complex a : c_) s = std::max(s, std::abs(a));
        return s;
    }

    /// Drop trailing coefficients of magnitude <= rel_tol * coeff_scale().
    Polynomial trimmed(double rel_tol) const {
        const double cut = rel_tol * coeff_scale();
        std::vector<Complex> r = c_;
        while (!r.empty() && std::abs(r.back()) <= cut) r.pop_back();
        return Polynomial(std::move(r));
    }

    /// Exact synthetic division by (z - root); the remainder is discarded.
    Polynomial deflated(Complex root) const {
        if (c_.size() <= 1) return {};
        std::vector<Complex> q(c_.size() - 1);
        Complex carry = c_.back();
        for (std::size_t k = c_.size() - 1; k > 0; --k) {
            q[k - 1] = carry;
            carry = c_[k - 1] + root * carry;
        }
        return Polynomial(std::move(q));
    }

    /// Number of exact-zero low-order coefficients (roots at the origin).
    int trailing_zero_count() const {
        int n = 0;
        for (Complex a : c_) {
            if (a != Complex{0.0}) break;
            ++n;
        }
        return c_.empty() ? 0 : std::min<int>(n, degree());
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Complex> r(std::max(a.c_.size(), b.c_.size()), Complex{0.0});
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] + b[k];
        return Polynomial(std::move(r));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        std::vector<Complex> r(std::max(a.c_.size(), b.c_.size()), Complex{0.0});
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = a[k] - b[k];
        return Polynomial(std::move(r));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Complex> r(a.c_.size() + b.c_.size() - 1, Complex{0.0});
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(r));
    }

    friend Polynomial operator*(Complex s, const Polynomial& a) {
        std::vector<Complex> r = a.c_;
        for (Complex& x : r) x *= s;
        return Polynomial(std::move(r));
    }

  private:
    void strip_exact_zeros() {
        while (!c_.empty() && c_.back() == Complex{0.0}) c_.pop_back();
    }

    std::vector<Complex> c_;
};

}  // namespace rlab
