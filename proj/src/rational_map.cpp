#include "rlab/rational_map.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "rlab/errors.hpp"

namespace rlab {

RationalMap::RationalMap(Polynomial num, Polynomial den, double coprime_tol)
    : num_(std::move(num)), den_(std::move(den)) {
    if (num_.is_zero()) throw Error("rational map: numerator is identically zero");
    if (den_.is_zero()) throw Error("rational map: denominator is identically zero");
    // Leading coefficients are nonzero by construction (trailing zeros are
    // stripped), so only the common-root screen remains.
    if (den_.degree() >= 1) {
        const auto beta = solve_roots(den_);
        const double scale = num_.coeff_scale();
        for (Complex b : beta) {
            const double grow = std::pow(1.0 + std::abs(b), num_.degree());
            if (std::abs(num_.eval(b)) <= coprime_tol * scale * grow)
                throw Error("rational map: num and den share a root near (" +
                            std::to_string(b.real()) + ", " + std::to_string(b.imag()) + ")");
        }
    }
    degree_ = std::max(num_.degree(), den_.degree());
    dnum_ = num_.derivative();
    dden_ = den_.derivative();
}

ExtPoint RationalMap::eval(const ExtPoint& z) const {
    const int n = degree_;
    if (!z.is_inf() && !near_infinity(z.value)) {
        const Complex p = num_.eval(z.value);
        const Complex q = den_.eval(z.value);
        if (q == Complex{0.0}) return ExtPoint::infinity();
        const Complex v = p / q;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return ExtPoint::infinity();
        return ExtPoint{v};
    }
    // w = 1/z chart: R(1/w) = Pr(w)/Qr(w) with reversed coefficients.
    const Complex w = z.is_inf() ? Complex{0.0} : 1.0 / z.value;
    const Complex pr = num_.reversed(n).eval(w);
    const Complex qr = den_.reversed(n).eval(w);
    if (qr == Complex{0.0}) return ExtPoint::infinity();
    const Complex v = pr / qr;
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return ExtPoint::infinity();
    return ExtPoint{v};
}

ExtPoint RationalMap::derivative_at(Complex z) const {
    const Complex q = den_.eval(z);
    if (q == Complex{0.0}) return ExtPoint::infinity();
    const Complex n = dnum_.eval(z) * q - num_.eval(z) * dden_.eval(z);
    const Complex v = n / (q * q);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return ExtPoint::infinity();
    return ExtPoint{v};
}

RationalMap RationalMap::derivative() const {
    Polynomial n = dnum_ * den_ - num_ * dden_;
    Polynomial d = den_ * den_;
    if (den_.degree() >= 1) {
        // A pole of order m contributes a factor (z-a)^(m-1) to both sides.
        for (const auto& cl : solve_clustered(den_, 1e-10)) {
            for (int k = 0; k < cl.multiplicity - 1; ++k) {
                n = n.deflated(cl.center);
                d = d.deflated(cl.center);
            }
        }
    }
    return RationalMap(std::move(n), std::move(d));
}

std::vector<std::pair<ExtPoint, int>> critical_points(const RationalMap& map) {
    const int d = map.degree();
    if (d < 2) throw Error("critical_points requires degree >= 2");
    const Polynomial& P = map.num();
    const Polynomial& Q = map.den();
    // Roots of N = P'Q - PQ' carry exactly the finite critical
    // multiplicities, pole contributions included.
    Polynomial N = P.derivative() * Q - P * Q.derivative();
    N = N.trimmed(1e-14);

    std::vector<std::pair<ExtPoint, int>> crit;
    int finite_total = 0;
    if (N.degree() >= 1) {
        for (const auto& cl : solve_clustered(N, 1e-10)) {
            crit.emplace_back(ExtPoint{cl.center}, cl.multiplicity);
            finite_total += cl.multiplicity;
        }
    } else if (N.degree() < 0) {
        throw RootSolveFailure("derivative numerator vanished identically");
    }

    // Multiplicity at infinity from the local degree in the w = 1/z chart.
    const ExtPoint u = map.eval(ExtPoint::infinity());
    const Polynomial Pr = P.reversed(d);
    const Polynomial Qr = Q.reversed(d);
    int mult_inf = 0;
    if (u.is_inf()) {
        // F(w) = Qr/Pr vanishes at 0 to order d - deg Q.
        mult_inf = (d - Q.degree()) - 1;
    } else {
        Polynomial F = Pr - Polynomial::constant(u.value) * Qr;
        const double cut = 1e-12 * std::max(Pr.coeff_scale(), Qr.coeff_scale() * std::abs(u.value) + 1e-300);
        int t = 0;
        for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(F.degree()) + 1; ++k) {
            if (std::abs(F[k]) > cut) break;
            ++t;
        }
        mult_inf = t - 1;  // local degree t
    }
    if (mult_inf > 0) crit.emplace_back(ExtPoint::infinity(), mult_inf);

    int total = finite_total + std::max(mult_inf, 0);
    if (total != 2 * d - 2)
        throw RootSolveFailure("Riemann-Hurwitz count failed: got " + std::to_string(total) +
                               ", expected " + std::to_string(2 * d - 2));
    return crit;
}

namespace {

// Points chordally indistinguishable from infinity are stored as infinity;
// orbits through poles otherwise leave huge finite artifacts behind.
ExtPoint snap_infinity(const ExtPoint& p, double tol) {
    if (!p.is_inf() && chordal(p, ExtPoint::infinity()) <= tol) return ExtPoint::infinity();
    return p;
}

}  // namespace

std::vector<ExtPoint> critical_values(const RationalMap& map, double tol) {
    std::vector<ExtPoint> vals;
    for (const auto& [c, m] : critical_points(map)) {
        const ExtPoint v = snap_infinity(map.eval(c), tol);
        bool known = false;
        for (const auto& u : vals)
            if (chordal(u, v) <= tol) {
                known = true;
                break;
            }
        if (!known) vals.push_back(v);
    }
    std::sort(vals.begin(), vals.end(), [](const ExtPoint& a, const ExtPoint& b) { return lex_less(a, b); });
    return vals;
}

PostcriticalData postcritical_set(const RationalMap& map, int max_depth, double tol) {
    PostcriticalData data;
    auto find = [&](const ExtPoint& x) -> int {
        for (std::size_t i = 0; i < data.points.size(); ++i)
            if (chordal(data.points[i], x) <= tol) return static_cast<int>(i);
        return -1;
    };

    // Breadth-first closure: expand every set point until the set maps into
    // itself or the per-orbit depth budget runs out.
    std::deque<std::pair<int, int>> work;  // (index, depth at which the point appeared)
    for (const ExtPoint& v : critical_values(map, tol)) {
        if (find(v) >= 0) continue;
        data.points.push_back(v);
        work.emplace_back(static_cast<int>(data.points.size()) - 1, 0);
    }

    data.resolved = true;
    while (!work.empty()) {
        auto [idx, depth] = work.front();
        work.pop_front();
        data.depth_used = std::max(data.depth_used, depth);
        if (depth >= max_depth) {
            data.resolved = false;
            continue;
        }
        const ExtPoint img = snap_infinity(map.eval(data.points[static_cast<std::size_t>(idx)]), tol);
        if (find(img) < 0) {
            data.points.push_back(img);
            work.emplace_back(static_cast<int>(data.points.size()) - 1, depth + 1);
        }
    }
    std::sort(data.points.begin(), data.points.end(),
              [](const ExtPoint& a, const ExtPoint& b) { return lex_less(a, b); });
    return data;
}

Fiber preimages(const RationalMap& map, const ExtPoint& target, double tol) {
    const int d = map.degree();
    Fiber fib;
    fib.target = target;

    // Near-infinite targets switch to 1/R = 1/z: solve Q - (1/z) P instead.
    const bool inverted = target.is_inf() || near_infinity(target.value);
    const Complex zt = inverted ? (target.is_inf() ? Complex{0.0} : 1.0 / target.value)
                                : target.value;
    const Polynomial& A = inverted ? map.den() : map.num();
    const Polynomial& B = inverted ? map.num() : map.den();

    std::vector<Complex> coeffs(static_cast<std::size_t>(d) + 1, Complex{0.0});
    double scale = 0.0;
    for (int k = 0; k <= d; ++k) {
        coeffs[static_cast<std::size_t>(k)] =
            A[static_cast<std::size_t>(k)] - zt * B[static_cast<std::size_t>(k)];
        scale = std::max(scale, std::abs(A[static_cast<std::size_t>(k)]) +
                                    std::abs(zt) * std::abs(B[static_cast<std::size_t>(k)]));
    }
    // Leading cancellations send preimages to infinity.
    int inf_mult = 0;
    while (!coeffs.empty() && std::abs(coeffs.back()) <= 1e-13 * scale && inf_mult < d) {
        coeffs.pop_back();
        ++inf_mult;
    }
    Polynomial F{std::move(coeffs)};

    std::vector<RootCluster> clusters;
    if (F.degree() >= 1) clusters = solve_clustered(F, std::max(tol, 1e-12));

    for (const auto& cl : clusters) {
        fib.roots.emplace_back(ExtPoint{cl.center}, cl.multiplicity);
        if (cl.multiplicity > 1) fib.has_multiple = true;
    }
    if (inf_mult > 0) {
        fib.roots.emplace_back(ExtPoint::infinity(), inf_mult);
        if (inf_mult > 1) fib.has_multiple = true;
    }

    for (const auto& [root, mult] : fib.roots)
        fib.residual = std::max(fib.residual, chordal(map.eval(root), target));
    if (fib.total_multiplicity() != d)
        throw RootSolveFailure("fiber multiplicities sum to " +
                               std::to_string(fib.total_multiplicity()) + ", expected " +
                               std::to_string(d));
    const double res_tol = std::max(1e-7, 1e3 * tol);
    if (fib.residual > res_tol && !fib.has_multiple)
        throw RootSolveFailure("fiber residual " + std::to_string(fib.residual) +
                               " above tolerance");
    return fib;
}

}  // namespace rlab
