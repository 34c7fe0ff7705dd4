#include "rlab/lattes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rlab/errors.hpp"

namespace rlab {

QuadDifferential canonical_quad_diff(const std::vector<ExtPoint>& branch_points) {
    if (branch_points.size() != 4)
        throw BadPointCount("canonical differential needs exactly 4 branch points");
    std::vector<Complex> finite;
    int at_inf = 0;
    for (const ExtPoint& p : branch_points) {
        if (p.is_inf())
            ++at_inf;
        else
            finite.push_back(p.value);
    }
    if (at_inf > 1) throw BadPointCount("at most one branch point may sit at infinity");
    return QuadDifferential::rational(Polynomial::constant(1.0), Polynomial::from_roots(finite),
                                      "canonical");
}

LineField invariant_line_field(const QuadDifferential& phi) {
    LineField mu;
    mu.label = "conj(" + phi.label() + ")/|" + phi.label() + "|";
    mu.rule = [phi](Complex z) -> Complex {
        const Complex v = phi.eval(z);
        const double a = std::abs(v);
        if (!(a > 0.0) || !std::isfinite(a)) return Complex{0.0};
        return std::conj(v) / a;
    };
    return mu;
}

LattesData flexible_lattes(Complex g2, Complex g3) {
    const Complex disc = g2 * g2 * g2 - 27.0 * g3 * g3;
    const double scale = std::abs(g2 * g2 * g2) + 27.0 * std::abs(g3 * g3) + 1.0;
    if (std::abs(disc) <= 1e-10 * scale)
        throw DegenerateInvariants("g2^3 - 27 g3^2 vanishes; the lattice degenerates");

    Polynomial num{{g2 * g2 / 16.0, 2.0 * g3, g2 / 2.0, Complex{0.0}, Complex{1.0}}};
    const Polynomial cubic{{-g3, -g2, Complex{0.0}, Complex{4.0}}};
    RationalMap map(std::move(num), cubic);

    const std::vector<Complex> es = solve_roots(cubic);
    std::vector<ExtPoint> branch;
    for (Complex e : es) branch.emplace_back(e);
    branch.push_back(ExtPoint::infinity());

    LattesData data{g2, g3, std::move(map), branch, canonical_quad_diff(branch)};

    // Construction self-check 1: the postcritical set is exactly the branch
    // locus. This pins the duplication formula against typos.
    const PostcriticalData post = postcritical_set(data.map);
    if (!post.resolved || post.points.size() != branch.size())
        throw Error("lattes self-check failed: postcritical set did not resolve to 4 points");
    for (const ExtPoint& p : post.points) {
        bool found = false;
        for (const ExtPoint& b : branch)
            if (chordal(p, b) <= 1e-6) found = true;
        if (!found) throw Error("lattes self-check failed: postcritical point off the branch set");
    }

    // Construction self-check 2: the canonical differential is Ruelle-fixed.
    const RuelleOperator op(data.map, data.canonical_phi);
    const Complex probes[3] = {{2.0, 1.0}, {-1.3, 0.7}, {0.4, -2.1}};
    for (Complex z0 : probes) {
        Complex z = z0;
        // Nudge deterministically off any critical-value zone.
        for (int tries = 0; tries < 8; ++tries) {
            try {
                const Complex lhs = op(z);
                const Complex rhs = data.canonical_phi.eval(z);
                if (std::abs(lhs - rhs) > 1e-6 * std::abs(rhs))
                    throw Error("lattes self-check failed: canonical differential not fixed");
                break;
            } catch (const CriticalFiber&) {
                z += Complex{0.11, 0.07};
            }
        }
    }
    return data;
}

int q_dimension(const PostcriticalData& post) {
    return std::max(0, static_cast<int>(post.points.size()) - 3);
}

std::vector<QuadDifferential> quadratic_differential_basis(const PostcriticalData& post) {
    const int dim = q_dimension(post);
    std::vector<QuadDifferential> basis;
    if (dim <= 0) return basis;
    std::vector<Complex> finite;
    bool has_inf = false;
    for (const ExtPoint& p : post.points) {
        if (p.is_inf())
            has_inf = true;
        else
            finite.push_back(p.value);
    }
    // Simple poles at every puncture; when infinity is not punctured the
    // denominator keeps all factors so each element still decays like z^-4.
    const Polynomial den = Polynomial::from_roots(finite);
    (void)has_inf;
    for (int j = 0; j < dim; ++j) {
        std::vector<Complex> mono(static_cast<std::size_t>(j) + 1, Complex{0.0});
        mono.back() = Complex{1.0};
        basis.push_back(QuadDifferential::rational(Polynomial{std::move(mono)}, den,
                                                   "basis:" + std::to_string(j)));
    }
    return basis;
}

LattesCheck lattes_residual(const RationalMap& map, const std::vector<QuadDifferential>& basis,
                            const LattesCheckOptions& opts) {
    const PostcriticalData post = postcritical_set(map);
    if (!post.resolved)
        throw UnresolvedPostcritical("lattes residual needs a resolved postcritical set");
    LattesCheck check;
    check.dim = static_cast<int>(basis.size());
    if (basis.empty()) return check;  // dim Q = 0: not applicable
    check.applicable = true;

    // Probe points away from critical values and basis poles.
    std::vector<Complex> crit;
    for (const ExtPoint& v : critical_values(map))
        if (!v.is_inf()) crit.push_back(v.value);
    std::vector<Complex> poles;
    for (const QuadDifferential& phi : basis)
        for (const Pole& p : phi.poles())
            if (!p.location.is_inf()) poles.push_back(p.location.value);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Complex> probes;
    while (static_cast<int>(probes.size()) < opts.probe_count) {
        const double r = 0.5 + 2.5 * unif(rng);
        const double th = 2.0 * M_PI * unif(rng);
        const Complex z = r * Complex{std::cos(th), std::sin(th)};
        bool ok = true;
        for (Complex c : crit) ok = ok && std::abs(z - c) > 2e-3;
        for (Complex p : poles) ok = ok && std::abs(z - p) > 2e-3;
        if (ok) probes.push_back(z);
    }

    // R* is linear: evaluate it once per basis element, then scan unit
    // coefficient vectors as linear combinations.
    const std::size_t nb = basis.size(), np = probes.size();
    std::vector<std::vector<Complex>> img(nb), val(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const RuelleOperator op(map, basis[b]);
        img[b].resize(np);
        val[b].resize(np);
        for (std::size_t i = 0; i < np; ++i) {
            img[b][i] = op(probes[i]);
            val[b][i] = basis[b].eval(probes[i]);
        }
    }

    auto residual_of = [&](const std::vector<Complex>& coef) {
        double dev = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            Complex a{0.0}, v{0.0};
            for (std::size_t b = 0; b < nb; ++b) {
                a += coef[b] * img[b][i];
                v += coef[b] * val[b][i];
            }
            dev = std::max(dev, std::abs(a - v));
            mag = std::max(mag, std::abs(v));
        }
        return mag > 0.0 ? dev / mag : 1e300;
    };

    if (nb == 1) {
        check.residual = residual_of({Complex{1.0}});
        return check;
    }
    double best = 1e300;
    std::vector<Complex> coef(nb);
    for (int s = 0; s < opts.search_samples + static_cast<int>(nb); ++s) {
        if (s < static_cast<int>(nb)) {
            std::fill(coef.begin(), coef.end(), Complex{0.0});
            coef[static_cast<std::size_t>(s)] = Complex{1.0};
        } else {
            double norm = 0.0;
            for (std::size_t b = 0; b < nb; ++b) {
                coef[b] = Complex{2.0 * unif(rng) - 1.0, 2.0 * unif(rng) - 1.0};
                norm += std::norm(coef[b]);
            }
            norm = std::sqrt(norm);
            for (std::size_t b = 0; b < nb; ++b) coef[b] /= norm;
        }
        best = std::min(best, residual_of(coef));
    }
    check.residual = best;
    return check;
}

}  // namespace rlab
