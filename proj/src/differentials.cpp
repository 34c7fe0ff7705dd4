#include "rlab/differentials.hpp"

#include <cmath>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

Complex ipow(Complex z, int k) {
    if (k < 0) return 1.0 / ipow(z, -k);
    Complex r{1.0};
    while (k-- > 0) r *= z;
    return r;
}

}  // namespace

QuadDifferential QuadDifferential::rational(Polynomial num, Polynomial den, std::string label) {
    if (den.is_zero()) throw Error("quadratic differential: zero denominator");
    if (num.is_zero()) throw Error("quadratic differential: zero numerator");
    QuadDifferential q;
    q.rational_ = true;
    q.num_ = std::move(num);
    q.den_ = std::move(den);
    q.wpow_ = q.den_.degree() - q.num_.degree();
    q.label_ = std::move(label);
    if (q.den_.degree() >= 1)
        for (const auto& cl : solve_clustered(q.den_, 1e-10))
            q.poles_.push_back({ExtPoint{cl.center}, cl.multiplicity});
    // phi(1/w)/w^4 has a pole of order degN + 4 - degD at w = 0.
    const int inf_order = q.num_.degree() + 4 - q.den_.degree();
    if (inf_order > 0) q.poles_.push_back({ExtPoint::infinity(), inf_order});
    return q;
}

QuadDifferential QuadDifferential::from_rule(std::function<Complex(Complex)> rule,
                                             std::vector<Pole> poles, std::string label) {
    QuadDifferential q;
    q.rational_ = false;
    q.rule_ = std::move(rule);
    q.poles_ = std::move(poles);
    q.label_ = std::move(label);
    return q;
}

Complex QuadDifferential::eval(Complex z) const {
    if (!rational_) return rule_(z);
    if (!near_infinity(z)) {
        return num_.eval(z) / den_.eval(z);
    }
    const Complex w = 1.0 / z;
    const Complex nr = num_.reversed(num_.degree()).eval(w);
    const Complex dr = den_.reversed(den_.degree()).eval(w);
    return ipow(w, wpow_) * nr / dr;
}

Complex QuadDifferential::eval_wchart(Complex w) const {
    if (!rational_) {
        const Complex w2 = w * w;
        return rule_(1.0 / w) / (w2 * w2);
    }
    if (std::abs(w) > kNearInfinity) {
        const Complex w2 = w * w;
        return eval(1.0 / w) / (w2 * w2);
    }
    const Complex nr = num_.reversed(num_.degree()).eval(w);
    const Complex dr = den_.reversed(den_.degree()).eval(w);
    return ipow(w, wpow_ - 4) * nr / dr;
}

QuadDifferential QuadDifferential::transported_to_wchart() const {
    if (rational_) {
        Polynomial n = num_.reversed(num_.degree());
        Polynomial d = den_.reversed(den_.degree());
        const int p = wpow_ - 4;
        auto shift = [](const Polynomial& poly, int k) {
            std::vector<Complex> c(static_cast<std::size_t>(k), Complex{0.0});
            c.insert(c.end(), poly.coeffs().begin(), poly.coeffs().end());
            return Polynomial(std::move(c));
        };
        if (p >= 0)
            n = shift(n, p);
        else
            d = shift(d, -p);
        return rational(std::move(n), std::move(d), label_ + "|w");
    }
    auto base = *this;
    std::vector<Pole> tpoles;
    for (const Pole& pl : poles_) {
        if (pl.location.is_inf())
            tpoles.push_back({ExtPoint{Complex{0.0}}, pl.order});
        else if (pl.location.value == Complex{0.0})
            tpoles.push_back({ExtPoint::infinity(), pl.order});
        else
            tpoles.push_back({ExtPoint{1.0 / pl.location.value}, pl.order});
    }
    return from_rule([base](Complex w) { return base.eval_wchart(w); }, std::move(tpoles),
                     label_ + "|w");
}

QuadDifferential QuadDifferential::scaled(Complex factor) const {
    if (rational_) {
        auto q = rational(factor * num_, den_, label_);
        return q;
    }
    auto base = rule_;
    return from_rule([base, factor](Complex z) { return factor * base(z); }, poles_, label_);
}

}  // namespace rlab
