#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/polynomial.hpp"
#include "rlab/roots.hpp"

namespace rlab {

struct Pole {
    ExtPoint location;
    int order = 1;
};

/// A quadratic differential phi(z) dz^2, held either as a rational function
/// or as a black-box pointwise rule with declared poles. Membership in
/// Q(S_R) additionally requires simple poles inside the postcritical set and
/// L1-integrability, which callers check via quadrature.
class QuadDifferential {
  public:
    QuadDifferential() = default;

    /// Rational differential num/den; poles are derived from the denominator
    /// roots and from the decay order at infinity.
    static QuadDifferential rational(Polynomial num, Polynomial den, std::string label);

    /// Black-box rule (z-chart representative) with declared poles.
    static QuadDifferential from_rule(std::function<Complex(Complex)> rule,
                                      std::vector<Pole> poles, std::string label);

    /// Pointwise value in the z-chart; rational differentials switch to
    /// reversed coefficients beyond |z| = 1e8 to stay overflow-free.
    Complex eval(Complex z) const;

    /// Transformed representative in the w = 1/z chart:
    /// phi_w(w) = phi(1/w) / w^4.
    Complex eval_wchart(Complex w) const;

    /// The w-chart differential as its own object (rational differentials
    /// stay rational; rule-backed ones wrap the transform).
    QuadDifferential transported_to_wchart() const;

    const std::vector<Pole>& poles() const { return poles_; }
    const std::string& label() const { return label_; }
    bool is_rational() const { return rational_; }
    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    QuadDifferential scaled(Complex factor) const;

  private:
    bool rational_ = false;
    Polynomial num_, den_;
    int wpow_ = 0;  // cached deg den - deg num for chart switches
    std::function<Complex(Complex)> rule_;
    std::vector<Pole> poles_;
    std::string label_;
};

/// A measurable field mu(z) dzbar/dz with |mu| <= 1 a.e., given by a
/// pointwise rule (z-chart representative) and an optional support predicate.
struct LineField {
    std::function<Complex(Complex)> rule;
    std::function<bool(Complex)> support;  // null = whole plane
    std::string label;

    Complex eval(Complex z) const {
        if (support && !support(z)) return Complex{0.0};
        return rule(z);
    }

    /// w-chart representative: mu_w(w) = mu(1/w) * w^2 / conj(w^2).
    Complex eval_wchart(Complex w) const {
        if (w == Complex{0.0}) return Complex{0.0};
        const Complex w2 = w * w;
        return eval(1.0 / w) * (w2 / std::conj(w2));
    }

    static LineField constant(Complex value, std::string label_text) {
        return LineField{[value](Complex) { return value; }, nullptr, std::move(label_text)};
    }
};

/// A sequence of Cesaro-average measurements indexed by n.
struct CesaroSeries {
    std::vector<int> n_values;       // strictly increasing
    std::vector<Complex> values;     // pointwise values or (real) norms
    std::vector<double> abs_errors;  // per-entry error estimates
    std::string target;              // what functional was measured

    void push(int n, Complex v, double err) {
        if (!n_values.empty() && n <= n_values.back())
            throw Error("CesaroSeries: n schedule must be strictly increasing");
        n_values.push_back(n);
        values.push_back(v);
        abs_errors.push_back(err);
    }
};

}  // namespace rlab
