#include "rlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

// Principal-value cube root via polar decomposition; cheaper and branch-stable
// compared to pow(z, 1/3).
inline Complex ccbrt(Complex z) {
    const double r = std::abs(z);
    if (r == 0.0) return {0.0, 0.0};
    const double th = std::arg(z) / 3.0;
    const double m = std::cbrt(r);
    return {m * std::cos(th), m * std::sin(th)};
}

// Branch-stable monic quadratic: the discriminant root sign avoids
// cancellation, the second root comes from Viete.
inline void quadratic_monic(Complex b, Complex c, Complex& x0, Complex& x1) {
    Complex s = std::sqrt(b * b - 4.0 * c);
    if (std::real(std::conj(b) * s) > 0.0) s = -s;
    x0 = 0.5 * (-b + s);
    x1 = (x0 == Complex{0.0}) ? -b : c / x0;
}

}  // namespace

void solve_quadratic_arr(const Complex c[3], Complex out[2]) {
    quadratic_monic(c[1] / c[2], c[0] / c[2], out[0], out[1]);
}

void solve_cubic_arr(const Complex c[4], Complex out[3]) {
    // Cardano on the monic cubic, selecting the larger |s1| branch.
    const Complex e1 = -c[2] / c[3];
    const Complex e2 = c[1] / c[3];
    const Complex e3 = -c[0] / c[3];
    const Complex e1sq = e1 * e1;
    const Complex A = 2.0 * e1 * e1sq - 9.0 * e1 * e2 + 27.0 * e3;
    const Complex B = e1sq - 3.0 * e2;
    Complex s = std::sqrt(A * A - 4.0 * B * B * B);
    if (std::real(std::conj(A) * s) < 0.0) s = -s;
    const Complex s1 = ccbrt(0.5 * (A + s));
    const Complex s2 = (s1 == Complex{0.0}) ? Complex{0.0} : B / s1;
    constexpr double kHalfSqrt3 = 0.86602540378443864676;
    const Complex w1{-0.5, kHalfSqrt3};
    const Complex w2{-0.5, -kHalfSqrt3};
    const double third = 1.0 / 3.0;
    out[0] = third * (e1 + s1 + s2);
    out[1] = third * (e1 + w2 * s1 + w1 * s2);
    out[2] = third * (e1 + w1 * s1 + w2 * s2);
}

void solve_quartic_arr(const Complex c[5], Complex out[4]) {
    // Ferrari: depress, solve the resolvent cubic, split into two quadratics.
    const Complex b = c[3] / c[4], cc = c[2] / c[4], d = c[1] / c[4], e = c[0] / c[4];
    const Complex sh = 0.25 * b;  // z = y - b/4
    const Complex b2 = b * b;
    const Complex p = cc - 0.375 * b2;
    const Complex q = d - 0.5 * b * cc + 0.125 * b2 * b;
    const Complex r = e - 0.25 * b * d + 0.0625 * b2 * cc - (3.0 / 256.0) * b2 * b2;

    if (std::abs(q) <= 1e-14 * (1.0 + std::abs(p) + std::abs(r))) {
        // Biquadratic.
        Complex u0, u1;
        quadratic_monic(p, r, u0, u1);
        const Complex s0 = std::sqrt(u0), s1 = std::sqrt(u1);
        out[0] = s0 - sh;
        out[1] = -s0 - sh;
        out[2] = s1 - sh;
        out[3] = -s1 - sh;
        return;
    }
    // Resolvent cubic 8m^3 + 8pm^2 + (2p^2-8r)m - q^2 = 0; the largest |m|
    // root keeps sqrt(2m) well conditioned.
    const Complex rc[4] = {-q * q, 2.0 * p * p - 8.0 * r, 8.0 * p, Complex{8.0}};
    Complex ms[3];
    solve_cubic_arr(rc, ms);
    Complex m = ms[0];
    if (std::abs(ms[1]) > std::abs(m)) m = ms[1];
    if (std::abs(ms[2]) > std::abs(m)) m = ms[2];
    const Complex s = std::sqrt(2.0 * m);
    const Complex t = q / (2.0 * s);
    quadratic_monic(s, 0.5 * p + m - t, out[0], out[1]);
    quadratic_monic(-s, 0.5 * p + m + t, out[2], out[3]);
    out[0] -= sh;
    out[1] -= sh;
    out[2] -= sh;
    out[3] -= sh;
}

std::vector<Complex> solve_quadratic(Complex c0, Complex c1, Complex c2) {
    const Complex c[3] = {c0, c1, c2};
    Complex out[2];
    solve_quadratic_arr(c, out);
    return {out[0], out[1]};
}

std::vector<Complex> solve_cubic(Complex c0, Complex c1, Complex c2, Complex c3) {
    const Complex c[4] = {c0, c1, c2, c3};
    Complex out[3];
    solve_cubic_arr(c, out);
    return {out[0], out[1], out[2]};
}

std::vector<Complex> solve_quartic(Complex c0, Complex c1, Complex c2, Complex c3, Complex c4) {
    const Complex c[5] = {c0, c1, c2, c3, c4};
    Complex out[4];
    solve_quartic_arr(c, out);
    return {out[0], out[1], out[2], out[3]};
}

namespace {

// One or two Newton steps per root; refines the closed forms to full
// double accuracy away from multiple roots.
void newton_polish(const Polynomial& p, std::vector<Complex>& roots, int steps) {
    for (Complex& z : roots) {
        for (int s = 0; s < steps; ++s) {
            auto [f, df] = p.eval_with_derivative(z);
            if (df == Complex{0.0}) break;
            const Complex dz = f / df;
            if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag())) break;
            z -= dz;
            if (std::abs(dz) <= 1e-15 * (1.0 + std::abs(z))) break;
        }
    }
}

std::vector<Complex> aberth(const Polynomial& p, const RootSolveOptions& opts) {
    const int n = p.degree();
    std::vector<Complex> z(static_cast<std::size_t>(n));
    // Initial guesses on a circle of the Cauchy-bound radius.
    double radius = 0.0;
    const Complex lead = p.lead();
    for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(p[static_cast<std::size_t>(k)] / lead));
    radius = 1.0 + radius;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        const double phase = 0.4 + restart * 0.7301;
        const double spread = (restart == 0) ? 1.0 : (0.5 + unit(rng));
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * M_PI * (k + phase) / n + 0.01 * restart;
            z[static_cast<std::size_t>(k)] = spread * radius * Complex{std::cos(th), std::sin(th)};
        }

        for (int it = 0; it < opts.max_iter; ++it) {
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
                Complex& zi = z[static_cast<std::size_t>(i)];
                auto [f, df] = p.eval_with_derivative(zi);
                if (f == Complex{0.0}) continue;
                Complex sum{0.0};
                bool collided = false;
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const Complex d = zi - z[static_cast<std::size_t>(j)];
                    if (d == Complex{0.0}) {
                        zi += 1e-8 * radius * Complex{unit(rng) - 0.5, unit(rng) - 0.5};
                        collided = true;
                        break;
                    }
                    sum += 1.0 / d;
                }
                if (collided) {
                    worst = 1.0;
                    continue;
                }
                Complex corr;
                if (df == Complex{0.0}) {
                    corr = -1e-6 * radius;  // nudge off a stationary point
                } else {
                    const Complex ratio = f / df;
                    const Complex denom = 1.0 - ratio * sum;
                    corr = (denom == Complex{0.0}) ? ratio : ratio / denom;
                }
                zi -= corr;
                worst = std::max(worst, std::abs(corr) / (1.0 + std::abs(zi)));
            }
            if (worst < opts.tol) return z;
        }
    }
    throw RootSolveFailure("aberth iteration did not converge at degree " + std::to_string(n));
}

}  // namespace

std::vector<Complex> solve_roots(const Polynomial& p, const RootSolveOptions& opts) {
    if (p.degree() < 1) throw RootSolveFailure("cannot solve roots of a constant polynomial");

    // Exact roots at the origin come off first.
    const int zeros = p.trailing_zero_count();
    Polynomial q = p;
    for (int k = 0; k < zeros; ++k) q = q.deflated(Complex{0.0});

    std::vector<Complex> roots(static_cast<std::size_t>(zeros), Complex{0.0});
    const int n = q.degree();
    if (n >= 1) {
        std::vector<Complex> r;
        const auto& c = q.coeffs();
        switch (n) {
            case 1:
                r = {-c[0] / c[1]};
                break;
            case 2:
                r = solve_quadratic(c[0], c[1], c[2]);
                break;
            case 3:
                r = solve_cubic(c[0], c[1], c[2], c[3]);
                break;
            case 4:
                r = solve_quartic(c[0], c[1], c[2], c[3], c[4]);
                break;
            default:
                r = aberth(q, opts);
                break;
        }
        if (n >= 2 && n <= 4 && opts.polish) newton_polish(q, r, 2);

        // Residual sanity; fall back to Aberth if a closed form lost accuracy.
        if (n <= 4) {
            const double scale = q.coeff_scale();
            double worst = 0.0;
            for (Complex zi : r) {
                const double grow = std::pow(1.0 + std::abs(zi), n);
                worst = std::max(worst, std::abs(q.eval(zi)) / (scale * grow));
            }
            if (!(worst < 1e-9)) r = aberth(q, opts);
        }
        roots.insert(roots.end(), r.begin(), r.end());
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) { return lex_less(a, b); });
    return roots;
}

std::vector<RootCluster> cluster_roots(std::vector<Complex> roots, double tol) {
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) { return lex_less(a, b); });
    const std::size_t n = roots.size();
    std::vector<int> owner(n);
    for (std::size_t i = 0; i < n; ++i) owner[i] = static_cast<int>(i);

    auto members = [&](int rep) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (owner[i] == rep) idx.push_back(i);
        return idx;
    };
    auto radius_center = [&](const std::vector<std::size_t>& idx, Complex& center) {
        center = Complex{0.0};
        for (std::size_t i : idx) center += roots[i];
        center /= double(idx.size());
        double rad = 0.0;
        for (std::size_t i : idx) rad = std::max(rad, std::abs(roots[i] - center));
        return rad;
    };

    // Merge the pair of clusters with the smallest scale-normalized gap while
    // the merged cluster of size m stays tighter than scale * tol^(1/m).
    for (;;) {
        double best = 0.0;
        int a = -1, b = -1;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (owner[i] == owner[j]) continue;
                const double scale = 1.0 + 0.5 * std::abs(roots[i] + roots[j]);
                const double d = std::abs(roots[i] - roots[j]) / scale;
                if (a < 0 || d < best) {
                    best = d;
                    a = owner[i];
                    b = owner[j];
                }
            }
        if (a < 0) break;
        std::vector<std::size_t> trial;
        for (std::size_t i = 0; i < n; ++i)
            if (owner[i] == a || owner[i] == b) trial.push_back(i);
        Complex center;
        const double rad = radius_center(trial, center);
        const double scale = 1.0 + std::abs(center);
        const double limit = scale * std::pow(tol, 1.0 / double(trial.size()));
        if (rad >= limit) break;  // normalized-nearest pair failed; stop
        for (std::size_t i : trial) owner[i] = std::min(a, b);
    }

    std::vector<RootCluster> out;
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        const auto idx = members(owner[i]);
        for (std::size_t j : idx) seen[j] = 1;
        RootCluster cl;
        cl.radius = radius_center(idx, cl.center);
        cl.multiplicity = static_cast<int>(idx.size());
        out.push_back(cl);
    }
    std::sort(out.begin(), out.end(),
              [](const RootCluster& x, const RootCluster& y) { return lex_less(x.center, y.center); });
    return out;
}

std::vector<RootCluster> solve_clustered(const Polynomial& p, double cluster_tol,
                                         const RootSolveOptions& opts) {
    return cluster_roots(solve_roots(p, opts), cluster_tol);
}

}  // namespace rlab
