#include "rlab/ergodic.hpp"

#include <algorithm>
#include <cmath>

#include "rlab/errors.hpp"
#include "rlab/kernels.hpp"

namespace rlab {

namespace {

constexpr double kG2x[2] = {0.21132486540518713, 0.7886751345948129};

struct DecayNode {
    Complex z;
    double weight;  // polar measure share
    int corner;     // 0..3 within its cell
    int cell;
};

}  // namespace

CesaroSeries cesaro_decay(const RationalMap& map, const QuadDifferential& phi,
                          const std::vector<int>& n_schedule, const Region& region,
                          const DecayOptions& opts) {
    if (n_schedule.empty()) throw Error("cesaro_decay: empty n schedule");
    for (std::size_t i = 0; i < n_schedule.size(); ++i) {
        if (n_schedule[i] < 1) throw Error("cesaro_decay: n must be >= 1");
        if (i > 0 && n_schedule[i] <= n_schedule[i - 1])
            throw Error("cesaro_decay: n schedule must be strictly increasing");
    }
    if (region.kind != Region::Kind::Disk && region.kind != Region::Kind::Annulus)
        throw Error("cesaro_decay integrates over disk or annulus regions");

    // Fixed polar partition with a 2x2 Gauss rule per cell. Nodes that fall
    // into a critical-value or pole zone are rotated slightly within their
    // cell (deterministically) until clear.
    std::vector<Complex> avoid;
    for (const ExtPoint& v : critical_values(map))
        if (!v.is_inf()) avoid.push_back(v.value);
    for (const Pole& p : phi.poles())
        if (!p.location.is_inf()) avoid.push_back(p.location.value);

    const double r0 = region.kind == Region::Kind::Disk ? 0.0 : region.r0;
    const double r1 = region.r1;
    const int nr = std::max(1, opts.grid.radial_cells);
    const int na = std::max(1, opts.grid.angular_cells);
    std::vector<DecayNode> nodes;
    for (int ir = 0; ir < nr; ++ir)
        for (int ia = 0; ia < na; ++ia) {
            const double ra = r0 + (r1 - r0) * ir / nr;
            const double rb = r0 + (r1 - r0) * (ir + 1) / nr;
            const double ta = 2.0 * M_PI * ia / na;
            const double tb = 2.0 * M_PI * (ia + 1) / na;
            const double measure = 0.5 * (rb * rb - ra * ra) * (tb - ta);
            for (int ci = 0; ci < 2; ++ci)
                for (int cj = 0; cj < 2; ++cj) {
                    const double rr = ra + (rb - ra) * kG2x[ci];
                    double tt = ta + (tb - ta) * kG2x[cj];
                    Complex z;
                    for (int tries = 0; tries < 16; ++tries) {
                        z = region.center + rr * Complex{std::cos(tt), std::sin(tt)};
                        bool ok = true;
                        for (Complex c : avoid) ok = ok && std::abs(z - c) > 1e-3;
                        if (ok) break;
                        tt += (tb - ta) * 0.013;
                    }
                    // 2x2 Gauss weights are all 1/4; the polar r factor is
                    // folded in relative to the cell's mean radius so the
                    // four node weights sum to the exact cell measure.
                    const double rbar = 0.5 * (ra + rb);
                    nodes.push_back({z, 0.25 * measure * (rr / rbar), ci * 2 + cj,
                                     ir * na + ia});
                }
        }

    const int max_n = n_schedule.back();
    const int depth = max_n - 1;

    // Choose where to parallelize: across nodes for cheap trees, inside the
    // tree for deep ones. Either way the values are identical.
    std::uint64_t tree_nodes = 1, level = 1;
    for (int k = 1; k <= depth && tree_nodes < (1u << 24); ++k) {
        level *= static_cast<std::uint64_t>(map.degree());
        tree_nodes += level;
    }
    const bool heavy = tree_nodes >= (1u << 24);

    std::vector<std::vector<double>> cesaro_abs(nodes.size());
    auto eval_node = [&](std::size_t i, Exec tree_exec) {
        TreeOptions topts = opts.tree;
        topts.exec = tree_exec;
        const auto powers = ruelle_powers(map, phi, depth, nodes[i].z, topts);
        std::vector<double> out(n_schedule.size());
        kernels::KahanSum<Complex> prefix;
        int taken = 0;
        for (std::size_t s = 0; s < n_schedule.size(); ++s) {
            while (taken < n_schedule[s]) {
                prefix.add(powers[static_cast<std::size_t>(taken)]);
                ++taken;
            }
            out[s] = std::abs(prefix.get() / double(n_schedule[s]));
        }
        return out;
    };
    if (heavy) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            cesaro_abs[i] = eval_node(i, opts.tree.exec);
    } else {
        kernels::map_indexed(opts.tree.exec, nodes.size(), cesaro_abs,
                             [&](std::size_t i) { return eval_node(i, Exec::Serial); });
    }

    CesaroSeries series;
    series.target = "L1 norm of C_n(" + phi.label() + ") on the region";
    for (std::size_t s = 0; s < n_schedule.size(); ++s) {
        kernels::KahanSum<double> full;
        kernels::KahanSum<double> diag;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double v = cesaro_abs[i][s] * nodes[i].weight;
            full.add(v);
            if (nodes[i].corner == 0 || nodes[i].corner == 3) diag.add(2.0 * v);
        }
        const double est = full.get();
        series.push(n_schedule[s], Complex{est, 0.0}, std::abs(est - diag.get()));
    }
    return series;
}

QuadDifferential hk_family(int k) {
    if (k < 0) throw Error("hk_family needs k >= 0");
    // One radial integral: ||zeta^k||_L1(disk) = 2 pi int_0^1 r^{k+1} dr,
    // evaluated by composite Gauss so the normalization is numerical, then
    // inverted. (The closed form (k+2)/(2 pi) is asserted in tests.)
    const int panels = 8;
    kernels::KahanSum<double> acc;
    for (int p = 0; p < panels; ++p) {
        const double a = double(p) / panels, b = double(p + 1) / panels;
        static const double x16[8] = {0.0198550717512319, 0.1016667612931866, 0.2372337950418355,
                                      0.4082826787521751, 0.5917173212478249, 0.7627662049581645,
                                      0.8983332387068134, 0.9801449282487681};
        static const double w16[8] = {0.0506142681451881, 0.1111905172266872, 0.1568533229389436,
                                      0.1813418916891810, 0.1813418916891810, 0.1568533229389436,
                                      0.1111905172266872, 0.0506142681451881};
        for (int q = 0; q < 8; ++q) {
            const double r = a + (b - a) * x16[q];
            acc.add((b - a) * w16[q] * std::pow(r, k + 1));
        }
    }
    const double norm = 2.0 * M_PI * acc.get();
    const Complex ck{1.0 / norm, 0.0};
    std::vector<Complex> mono(static_cast<std::size_t>(k) + 1, Complex{0.0});
    mono.back() = ck;
    return QuadDifferential::rational(Polynomial{std::move(mono)}, Polynomial::constant(1.0),
                                      "hk:" + std::to_string(k));
}

RayPoint ray_point(int N, double mu_norm, double r, int i, double t) {
    if (i < 1 || i > N) throw IndexOutOfRange("ray index must satisfy 1 <= i <= N");
    if (mu_norm < 0.0) throw Error("mu_norm must be nonnegative");
    if (r < mu_norm) throw Error("ray parameter requires r >= mu_norm");
    if (t < 0.0) throw Error("ray parameter t must be nonnegative");
    RayPoint p;
    p.t = t;
    p.vector.assign(static_cast<std::size_t>(N), Complex{0.0});
    if (t <= r) {
        for (auto& x : p.vector) x = Complex{t * mu_norm, 0.0};
    } else {
        for (auto& x : p.vector) x = Complex{r * mu_norm, 0.0};
        p.vector[static_cast<std::size_t>(i - 1)] += Complex{(t - r) * mu_norm, 0.0};
    }
    return p;
}

double sup_norm(const std::vector<Complex>& v) {
    double m = 0.0;
    for (const Complex& x : v) m = std::max(m, std::abs(x));
    return m;
}

RayCurve ray_distance_curves(int N, double mu_norm, double r1, int i1, double r2, int i2,
                             const std::vector<double>& t_schedule) {
    RayCurve curve;
    for (double t : t_schedule) {
        const RayPoint a = ray_point(N, mu_norm, r1, i1, t);
        const RayPoint b = ray_point(N, mu_norm, r2, i2, t);
        std::vector<Complex> diff(a.vector.size());
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = a.vector[k] - b.vector[k];
        curve.t_values.push_back(t);
        curve.distances.push_back(sup_norm(diff));
    }
    return curve;
}

RayAuditReport isometry_ray_audit(const std::vector<RayPoint>& points, double mu_norm) {
    RayAuditReport report;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            std::vector<Complex> diff(points[i].vector.size());
            for (std::size_t k = 0; k < diff.size(); ++k)
                diff[k] = points[i].vector[k] - points[j].vector[k];
            const double expect = std::abs(points[i].t - points[j].t) * mu_norm;
            report.max_deviation =
                std::max(report.max_deviation, std::abs(sup_norm(diff) - expect));
            ++report.pairs;
        }
    return report;
}

}  // namespace rlab
