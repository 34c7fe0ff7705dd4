#include "rlab/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "rlab/errors.hpp"
#include "rlab/kernels.hpp"

namespace rlab {

namespace {

constexpr int kMaxFast = 4;
constexpr int kMaxDeg = 16;

// Preimage branches of an expanding map walk toward repelling fixed points,
// including the one at infinity; tree nodes live in whichever of the two
// charts keeps their coordinate inside this radius.
constexpr double kChartSwitch = 50.0;

enum Status : int {
    kOk = 0,
    kCrit = 1,
    kPole = 2,
    kRootFail = 3,
    kInfFiber = 4,
    kNodeBudget = 6,
};

[[noreturn]] void raise(int status, Complex where) {
    const std::string at = " near (" + std::to_string(where.real()) + ", " +
                           std::to_string(where.imag()) + ")";
    switch (status) {
        case kCrit:
            throw CriticalFiber("preimage fiber is critical" + at);
        case kPole:
            throw PoleHit("preimage landed on a pole of the test function" + at);
        case kRootFail:
            throw RootSolveFailure("fiber root refinement failed" + at);
        case kInfFiber:
            throw Error("preimage fiber degenerated at infinity" + at);
        case kNodeBudget:
            throw BudgetExceeded("preimage-tree node budget exhausted");
        default:
            throw Error("internal preimage-tree failure" + at);
    }
}

// F and F' by one Horner pass over a padded coefficient array.
inline void horner2(const Complex* c, int d, Complex y, Complex& f, Complex& df) {
    f = c[d];
    df = Complex{0.0};
    for (int k = d - 1; k >= 0; --k) {
        df = df * y + f;
        f = f * y + c[k];
    }
}

// One chart of the dynamical system: the pieces of the fiber polynomial
// A - target*B (A/B is the chart map), the chart's finite critical values,
// and the finite poles of the chart representative of the differential.
struct ChartSide {
    int d = 0;
    Complex a[kMaxFast + 1]{}, b[kMaxFast + 1]{};
    std::vector<Complex> crit;
    std::vector<Complex> poles;
    const RationalMap* gmap = nullptr;  // generic fallback, degree > 4

    int check_target(Complex y, double crit_tol) const {
        for (Complex c : crit)
            if (std::abs(y - c) <= crit_tol) return kCrit;
        return kOk;
    }

    int check_point(Complex y, double pole_tol) const {
        for (Complex pl : poles)
            if (std::abs(y - pl) <= pole_tol) return kPole;
        return kOk;
    }
};

// A node of the preimage tree: the chart it lives in (0 = z, 1 = w), its
// chart coordinate, and the accumulated weight in that chart's differential
// convention, so the level contribution is phi_chart(point) * weight.
struct TreeNode {
    int chart;
    Complex pt;
    Complex weight;  // for children of a solve this holds the multiplier
};

// Self-contained two-chart system; not copyable (sides point into members).
struct TreeSys {
    RationalMap map_z;
    RationalMap map_w;  // S = 1/R(1/w)
    QuadDifferential phi_z;
    QuadDifferential phi_w;
    ChartSide side[2];
    double crit_tol = kCriticalZone;
    double pole_tol = 1e-11;

    TreeSys(const RationalMap& map, const QuadDifferential& ph, double ct, double pt)
        : map_z(map),
          map_w(conjugated_by_inversion(map)),
          phi_z(ph),
          phi_w(ph.transported_to_wchart()),
          crit_tol(ct),
          pole_tol(pt) {
        const int d = map_z.degree();
        if (d > kMaxDeg) throw Error("transfer kernels support degree <= 16");
        auto fill = [d](ChartSide& s, const RationalMap& m) {
            s.d = d;
            s.gmap = &m;
            if (d <= kMaxFast)
                for (int k = 0; k <= d; ++k) {
                    s.a[k] = m.num()[static_cast<std::size_t>(k)];
                    s.b[k] = m.den()[static_cast<std::size_t>(k)];
                }
        };
        fill(side[0], map_z);
        fill(side[1], map_w);

        for (const ExtPoint& v : critical_values(map_z)) {
            if (!v.is_inf()) {
                side[0].crit.push_back(v.value);
                if (v.value != Complex{0.0}) side[1].crit.push_back(1.0 / v.value);
            } else {
                side[1].crit.push_back(Complex{0.0});
            }
        }
        for (const Pole& pl : phi_z.poles()) {
            if (!pl.location.is_inf()) {
                side[0].poles.push_back(pl.location.value);
                if (pl.location.value != Complex{0.0})
                    side[1].poles.push_back(1.0 / pl.location.value);
            } else {
                side[1].poles.push_back(Complex{0.0});
            }
        }
    }
    TreeSys(const TreeSys&) = delete;
    TreeSys& operator=(const TreeSys&) = delete;

    Complex phi_eval(int chart, Complex pt) const {
        return chart == 0 ? phi_z.eval(pt) : phi_w.eval(pt);
    }

    TreeNode root_node(Complex z) const {
        if (std::abs(z) > kChartSwitch) {
            const Complex w = 1.0 / z;
            const Complex w2 = w * w;
            return {1, w, Complex{1.0} / (w2 * w2)};
        }
        return {0, z, Complex{1.0}};
    }

    // Children of a node: the fiber of its point under the chart map, with
    // weight multipliers in each child's own chart. Roots are taken from
    // whichever chart's fiber polynomial is well conditioned for them
    // (small roots from the direct side, large ones through the other
    // chart), so branches marching to the repelling point at infinity stay
    // accurate.
    int solve_children(int chartA, Complex x, TreeNode out[]) const {
        const ChartSide& A = side[chartA];
        const ChartSide& B = side[1 - chartA];
        const int d = A.d;
        if (d > kMaxFast) return solve_children_generic(chartA, x, out);

        Complex ca[kMaxFast + 1];
        double scale_a = 0.0;
        for (int k = 0; k <= d; ++k) {
            ca[k] = A.a[k] - x * A.b[k];
            scale_a = std::max(scale_a, std::abs(ca[k]));
        }
        if (!(scale_a > 0.0)) return kRootFail;

        struct Raw {
            Complex y;        // coordinate in chart A terms (may be huge)
            Complex deriv;    // chart-A map derivative equivalent at y
            bool from_b;      // solved on the B side
            Complex v;        // B-side coordinate when from_b
            Complex deriv_b;  // B-side chart-map derivative when from_b
        };
        Raw raw[kMaxFast];
        int count = 0;

        const bool two_sided = std::abs(x) > 1e-30 && std::abs(ca[d]) < 1e-3 * scale_a;
        int keep_a = d;
        if (two_sided) {
            const Complex xb = 1.0 / x;
            Complex cb[kMaxFast + 1];
            double scale_b = 0.0;
            for (int k = 0; k <= d; ++k) {
                cb[k] = B.a[k] - xb * B.b[k];
                scale_b = std::max(scale_b, std::abs(cb[k]));
            }
            Complex vs[kMaxFast];
            switch (d) {
                case 2:
                    solve_quadratic_arr(cb, vs);
                    break;
                case 3:
                    solve_cubic_arr(cb, vs);
                    break;
                default:
                    solve_quartic_arr(cb, vs);
                    break;
            }
            for (int i = 0; i < d; ++i) {
                Complex v = vs[i], f, df;
                horner2(cb, d, v, f, df);
                for (int step = 0; step < 2; ++step) {
                    if (df == Complex{0.0}) break;
                    const Complex dz = f / df;
                    if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag())) break;
                    v -= dz;
                    horner2(cb, d, v, f, df);
                    if (std::abs(dz) <= 1e-10 * (1.0 + std::abs(v))) break;
                }
                if (std::abs(v) >= 0.1) continue;  // this root belongs to the A side
                if (!(std::abs(f) <= 1e-8 * scale_b)) return kRootFail;
                if (df == Complex{0.0}) return kCrit;
                Complex bv{0.0};
                for (int k = d; k >= 0; --k) bv = bv * v + B.b[k];
                if (bv == Complex{0.0}) return kRootFail;
                Raw r;
                r.from_b = true;
                r.v = v;
                r.deriv_b = df / bv;  // S'(v)
                r.y = (v == Complex{0.0}) ? Complex{1e300} : 1.0 / v;
                r.deriv = Complex{0.0};
                raw[count++] = r;
            }
            keep_a = d - count;
        }

        // Direct side: closed form, polish, keep the smallest keep_a roots.
        Complex ys[kMaxFast];
        switch (d) {
            case 2:
                solve_quadratic_arr(ca, ys);
                break;
            case 3:
                solve_cubic_arr(ca, ys);
                break;
            default:
                solve_quartic_arr(ca, ys);
                break;
        }
        std::sort(ys, ys + d, [](Complex p, Complex q) { return std::abs(p) < std::abs(q); });
        for (int i = 0; i < keep_a; ++i) {
            Complex y = ys[i], f, df;
            horner2(ca, d, y, f, df);
            for (int step = 0; step < 2; ++step) {
                if (df == Complex{0.0}) return kRootFail;
                const Complex dz = f / df;
                if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag())) return kRootFail;
                y -= dz;
                horner2(ca, d, y, f, df);
                if (std::abs(dz) <= 1e-10 * (1.0 + std::abs(y))) break;
            }
            const double grow = std::pow(1.0 + std::abs(y), d);
            if (!(std::abs(f) <= 1e-8 * scale_a * grow)) return kRootFail;
            Complex bv{0.0};
            for (int k = d; k >= 0; --k) bv = bv * y + A.b[k];
            if (bv == Complex{0.0}) return kRootFail;
            Raw r;
            r.from_b = false;
            r.y = y;
            r.deriv = df / bv;  // chart-A map derivative
            if (r.deriv == Complex{0.0}) return kCrit;
            raw[count++] = r;
        }
        if (count != d) return kRootFail;

        // Distinctness in the chordal metric (chart independent).
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                if (chordal(raw[i].y, raw[j].y) <= 1e-9) return kCrit;

        // Assemble children in their own charts.
        for (int i = 0; i < d; ++i) {
            const Raw& r = raw[i];
            TreeNode child;
            if (r.from_b) {
                if (std::abs(r.v) <= 1.0 / kChartSwitch) {
                    const Complex xb = 1.0 / x;
                    const Complex xb2 = xb * xb;
                    child = {1 - chartA, r.v, xb2 * xb2 / (r.deriv_b * r.deriv_b)};
                } else {
                    // Back to the A chart: chart-A derivative from the B data.
                    const Complex da = r.deriv_b * r.v * r.v * x * x;
                    if (da == Complex{0.0}) return kCrit;
                    child = {chartA, 1.0 / r.v, Complex{1.0} / (da * da)};
                }
            } else if (std::abs(r.y) > kChartSwitch) {
                const Complex w = 1.0 / r.y;
                const Complex w2 = w * w;
                child = {1 - chartA, w, w2 * w2 / (r.deriv * r.deriv)};
            } else {
                child = {chartA, r.y, Complex{1.0} / (r.deriv * r.deriv)};
            }
            out[i] = child;
        }
        std::sort(out, out + d, [](const TreeNode& p, const TreeNode& q) {
            if (p.chart != q.chart) return p.chart < q.chart;
            return lex_less(p.pt, q.pt);
        });
        return kOk;
    }

    int solve_children_generic(int chartA, Complex x, TreeNode out[]) const {
        Fiber fib;
        try {
            fib = preimages(*side[chartA].gmap, ExtPoint{x});
        } catch (const RootSolveFailure&) {
            return kRootFail;
        }
        if (fib.has_multiple) return kCrit;
        int i = 0;
        for (const auto& [pt, mult] : fib.roots) {
            if (pt.is_inf()) {
                // Exact branch through the chart's infinity: hand it to the
                // other chart at 0 with the transported weight.
                const ChartSide& B = side[1 - chartA];
                const Complex xb = 1.0 / x;
                Polynomial num(std::vector<Complex>(B.gmap->num().coeffs()));
                const Complex g0 = B.gmap->num()[0] - xb * B.gmap->den()[0];
                (void)g0;
                // Derivative of the B chart map at 0 via its coefficients.
                const Complex n0 = B.gmap->num()[0], n1 = B.gmap->num()[1];
                const Complex d0 = B.gmap->den()[0], d1 = B.gmap->den()[1];
                if (d0 == Complex{0.0}) return kInfFiber;
                const Complex sp = (n1 * d0 - n0 * d1) / (d0 * d0);
                if (sp == Complex{0.0}) return kCrit;
                const Complex xb2 = xb * xb;
                out[i++] = {1 - chartA, Complex{0.0}, xb2 * xb2 / (sp * sp)};
                continue;
            }
            const ExtPoint der = side[chartA].gmap->derivative_at(pt.value);
            if (der.is_inf() || der.value == Complex{0.0}) return kCrit;
            if (std::abs(pt.value) > kChartSwitch) {
                const Complex w = 1.0 / pt.value;
                const Complex w2 = w * w;
                out[i++] = {1 - chartA, w, w2 * w2 / (der.value * der.value)};
            } else {
                out[i++] = {chartA, pt.value, Complex{1.0} / (der.value * der.value)};
            }
        }
        std::sort(out, out + i, [](const TreeNode& p, const TreeNode& q) {
            if (p.chart != q.chart) return p.chart < q.chart;
            return lex_less(p.pt, q.pt);
        });
        return kOk;
    }
};

// Number of tree nodes through level n, saturating at the budget cap.
std::uint64_t tree_node_count(int d, int n, std::uint64_t cap) {
    std::uint64_t total = 0, level = 1;
    for (int k = 0; k <= n; ++k) {
        total += level;
        if (total >= cap) return cap;
        if (level > cap / static_cast<std::uint64_t>(d)) return cap;
        level *= static_cast<std::uint64_t>(d);
    }
    return total;
}

struct SubtreeOut {
    int status = kOk;
    Complex bad{0.0};
    std::vector<Complex> sums;  // level sums for levels L..n
    std::uint64_t nodes = 0;
    std::uint64_t pruned = 0;
    double pruned_weight = 0.0;
    double pruned_bound = 0.0;
    double max_abs_phi = 0.0;
};

struct SubtreeWalker {
    const TreeSys* sys;
    int n;           // deepest level
    int base_level;  // level of the subtree root
    double prune_eps;
    std::uint64_t node_cap;
    std::vector<kernels::KahanSum<Complex>> acc;
    SubtreeOut out;

    void run(const TreeNode& root) {
        acc.assign(static_cast<std::size_t>(n - base_level) + 1, {});
        visit(root, base_level);
        out.sums.resize(acc.size());
        for (std::size_t k = 0; k < acc.size(); ++k) out.sums[k] = acc[k].get();
    }

    void visit(const TreeNode& node, int level) {
        if (out.status != kOk) return;
        if (++out.nodes > node_cap) {
            out.status = kNodeBudget;
            return;
        }
        const Complex ph = sys->phi_eval(node.chart, node.pt);
        if (!std::isfinite(ph.real()) || !std::isfinite(ph.imag())) {
            out.status = kPole;
            out.bad = node.pt;
            return;
        }
        out.max_abs_phi = std::max(out.max_abs_phi, std::abs(ph));
        acc[static_cast<std::size_t>(level - base_level)].add(ph * node.weight);
        if (level == n) return;

        int st = sys->side[node.chart].check_target(node.pt, sys->crit_tol);
        if (st != kOk) {
            out.status = st;
            out.bad = node.pt;
            return;
        }
        TreeNode kids[kMaxDeg];
        st = sys->solve_children(node.chart, node.pt, kids);
        if (st != kOk) {
            out.status = st;
            out.bad = node.pt;
            return;
        }
        for (int i = 0; i < sys->side[node.chart].d; ++i) {
            TreeNode child = kids[i];
            child.weight *= node.weight;
            st = sys->side[child.chart].check_point(child.pt, sys->pole_tol);
            if (st != kOk) {
                out.status = st;
                out.bad = child.pt;
                return;
            }
            if (prune_eps > 0.0 && std::abs(child.weight) < prune_eps) {
                ++out.pruned;
                out.pruned_weight += std::abs(child.weight);
                double tail = 0.0, lvl = 1.0;
                for (int k = level + 1; k <= n; ++k) {
                    tail += lvl;
                    lvl *= sys->side[node.chart].d;
                }
                out.pruned_bound += std::abs(child.weight) * tail;
                continue;
            }
            visit(child, level + 1);
            if (out.status != kOk) return;
        }
    }
};

}  // namespace

std::vector<Complex> ruelle_powers(const RationalMap& map, const QuadDifferential& phi, int n,
                                   Complex z, const TreeOptions& opts, TreeReport* report) {
    if (n < 0) throw Error("ruelle_powers: negative power");
    if (map.degree() < 2) throw Error("ruelle_powers requires degree >= 2");
    const TreeSys sys(map, phi, opts.crit_tol, opts.pole_tol);
    const int d = map.degree();

    if (opts.prune_eps <= 0.0 &&
        tree_node_count(d, n, opts.node_budget + 1) > opts.node_budget)
        throw BudgetExceeded("preimage tree of depth " + std::to_string(n) + " at degree " +
                             std::to_string(d) + " exceeds the node budget");

    const TreeNode root = sys.root_node(z);
    if (int st = sys.side[root.chart].check_point(root.pt, opts.pole_tol); st != kOk)
        raise(st, z);

    // Split level: enough subtrees to parallelize, shallow enough to keep
    // the breadth-first prefix tiny.
    int split = 0;
    std::uint64_t width = 1;
    while (split < n && width < 64) {
        width *= static_cast<std::uint64_t>(d);
        ++split;
    }

    // Breadth-first prefix (levels 0..split-1) and the subtree roots.
    std::vector<kernels::KahanSum<Complex>> prefix(static_cast<std::size_t>(n) + 1);
    std::vector<TreeNode> frontier{root};
    std::uint64_t prefix_nodes = 0;
    TreeReport rep;
    for (int level = 0; level < split; ++level) {
        prefix_nodes += frontier.size();
        std::vector<TreeNode> next_frontier;
        next_frontier.reserve(frontier.size() * static_cast<std::size_t>(d));
        for (const TreeNode& node : frontier) {
            const Complex ph = sys.phi_eval(node.chart, node.pt);
            if (!std::isfinite(ph.real()) || !std::isfinite(ph.imag())) raise(kPole, node.pt);
            prefix[static_cast<std::size_t>(level)].add(ph * node.weight);
            if (int st = sys.side[node.chart].check_target(node.pt, opts.crit_tol); st != kOk)
                raise(st, node.pt);
            TreeNode kids[kMaxDeg];
            if (int st = sys.solve_children(node.chart, node.pt, kids); st != kOk)
                raise(st, node.pt);
            for (int i = 0; i < d; ++i) {
                TreeNode child = kids[i];
                child.weight *= node.weight;
                if (int st = sys.side[child.chart].check_point(child.pt, opts.pole_tol); st != kOk)
                    raise(st, child.pt);
                if (opts.prune_eps > 0.0 && std::abs(child.weight) < opts.prune_eps) {
                    ++rep.pruned_branches;
                    rep.pruned_weight += std::abs(child.weight);
                    continue;
                }
                next_frontier.push_back(child);
            }
        }
        frontier.swap(next_frontier);
    }

    // Parallel subtrees with deterministic index-ordered combination.
    const std::uint64_t per_cap =
        opts.prune_eps > 0.0
            ? opts.node_budget / std::max<std::uint64_t>(1, frontier.size()) + 64
            : ~std::uint64_t{0};
    std::vector<SubtreeOut> outs;
    kernels::map_indexed(opts.exec, frontier.size(), outs, [&](std::size_t i) {
        SubtreeWalker walker;
        walker.sys = &sys;
        walker.n = n;
        walker.base_level = split;
        walker.prune_eps = opts.prune_eps;
        walker.node_cap = per_cap;
        walker.run(frontier[i]);
        return std::move(walker.out);
    });

    double max_phi = 0.0;
    for (const SubtreeOut& o : outs) {
        if (o.status != kOk) raise(o.status, o.bad);
        max_phi = std::max(max_phi, o.max_abs_phi);
    }
    std::vector<Complex> result(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k < split; ++k)
        result[static_cast<std::size_t>(k)] = prefix[static_cast<std::size_t>(k)].get();
    for (int k = split; k <= n; ++k) {
        kernels::KahanSum<Complex> acc;
        for (const SubtreeOut& o : outs) acc.add(o.sums[static_cast<std::size_t>(k - split)]);
        result[static_cast<std::size_t>(k)] = acc.get();
    }
    if (report) {
        for (const SubtreeOut& o : outs) {
            rep.nodes += o.nodes;
            rep.pruned_branches += o.pruned;
            rep.pruned_weight += o.pruned_weight;
            rep.pruned_mass_bound += o.pruned_bound * max_phi;
        }
        rep.nodes += prefix_nodes;
        *report = rep;
    }
    return result;
}

Complex ruelle_power(const RationalMap& map, const QuadDifferential& phi, int n, Complex z,
                     const TreeOptions& opts, TreeReport* report) {
    return ruelle_powers(map, phi, n, z, opts, report).back();
}

Complex cesaro_average(const RationalMap& map, const QuadDifferential& phi, int n, Complex z,
                       const TreeOptions& opts) {
    if (n < 1) throw Error("cesaro_average requires n >= 1");
    const auto powers = ruelle_powers(map, phi, n - 1, z, opts);
    kernels::KahanSum<Complex> acc;
    for (int i = 0; i < n; ++i) acc.add(powers[static_cast<std::size_t>(i)]);
    return acc.get() / double(n);
}

struct RuelleOperator::Impl {
    TreeSys sys;
    Impl(const RationalMap& map, const QuadDifferential& phi, double ct, double pt)
        : sys(map, phi, ct, pt) {}
};

RuelleOperator::RuelleOperator(const RationalMap& map, QuadDifferential phi, double crit_tol,
                               double pole_tol)
    : impl_(std::make_shared<Impl>(map, phi, crit_tol, pole_tol)) {}

Complex RuelleOperator::operator()(Complex z) const {
    const TreeSys& sys = impl_->sys;
    const TreeNode node = sys.root_node(z);
    if (int st = sys.side[node.chart].check_target(node.pt, sys.crit_tol); st != kOk)
        raise(st, z);
    TreeNode kids[kMaxDeg];
    if (int st = sys.solve_children(node.chart, node.pt, kids); st != kOk) raise(st, z);
    kernels::KahanSum<Complex> acc;
    for (int i = 0; i < sys.side[node.chart].d; ++i) {
        TreeNode child = kids[i];
        child.weight *= node.weight;
        if (int st = sys.side[child.chart].check_point(child.pt, sys.pole_tol); st != kOk)
            raise(st, child.pt);
        const Complex ph = sys.phi_eval(child.chart, child.pt);
        if (!std::isfinite(ph.real()) || !std::isfinite(ph.imag())) raise(kPole, child.pt);
        acc.add(ph * child.weight);
    }
    return acc.get();
}

const RationalMap& RuelleOperator::map() const { return impl_->sys.map_z; }
const QuadDifferential& RuelleOperator::phi() const { return impl_->sys.phi_z; }

Complex ruelle_apply(const RationalMap& map, const QuadDifferential& phi, Complex z,
                     double crit_tol, double pole_tol) {
    return RuelleOperator(map, phi, crit_tol, pole_tol)(z);
}

namespace {

// conj(R')/R' with the phase computed stably near poles and infinity.
Complex derivative_unit_factor(const RationalMap& map, Complex z) {
    auto uc = [](Complex x) -> Complex {
        const double a = std::abs(x);
        if (!(a > 0.0) || !std::isfinite(a)) return Complex{0.0};
        const Complex u{x.real() / a, x.imag() / a};
        return std::conj(u) / u;
    };
    if (!near_infinity(z)) {
        const Complex qv = map.den().eval(z);
        const Complex nv = map.num().derivative().eval(z) * qv -
                           map.num().eval(z) * map.den().derivative().eval(z);
        const Complex un = uc(nv), uq = uc(qv);
        if (un == Complex{0.0} || uq == Complex{0.0}) return Complex{0.0};
        return un / (uq * uq);
    }
    // R'(z) = -T'(w) w^2 at w = 1/z with T(w) = R(1/w).
    const int d = map.degree();
    const Complex w = 1.0 / z;
    const Polynomial pr = map.num().reversed(d);
    const Polynomial qr = map.den().reversed(d);
    const Complex tq = qr.eval(w);
    const Complex tn = pr.derivative().eval(w) * tq - pr.eval(w) * qr.derivative().eval(w);
    const Complex un = uc(tn), uq = uc(tq), uw = uc(w);
    if (un == Complex{0.0} || uq == Complex{0.0} || uw == Complex{0.0}) return Complex{0.0};
    return (un / (uq * uq)) * uw * uw;
}

}  // namespace

Complex beltrami_pullback(const RationalMap& map, const LineField& mu, Complex z, double tol) {
    const ExtPoint dv = map.derivative_at(z);
    if (!dv.is_inf() && std::abs(dv.value) < tol)
        throw CriticalPoint("derivative vanishes within tolerance");
    const ExtPoint img = map.eval(ExtPoint{z});
    if (img.is_inf()) throw CriticalPoint("image at infinity");
    const Complex unit = dv.is_inf() ? derivative_unit_factor(map, z)
                                     : std::conj(dv.value) / dv.value;
    return mu.eval(img.value) * unit;
}

LineField pullback_field(const RationalMap& map, const LineField& mu) {
    LineField out;
    out.label = "Bel(" + mu.label + ")";
    out.rule = [map, mu](Complex z) -> Complex {
        const ExtPoint img = map.eval(ExtPoint{z});
        if (img.is_inf()) return Complex{0.0};
        const Complex unit = derivative_unit_factor(map, z);
        return mu.eval(img.value) * unit;
    };
    return out;
}

Complex cesaro_beltrami(const RationalMap& map, const LineField& mu, int n, Complex z,
                        double tol) {
    if (n < 1) throw Error("cesaro_beltrami requires n >= 1");
    kernels::KahanSum<Complex> acc;
    Complex x = z;
    Complex unit{1.0};  // conj((R^i)')/(R^i)' along the orbit
    for (int i = 0; i < n; ++i) {
        acc.add(mu.eval(x) * unit);
        if (i + 1 == n) break;
        const ExtPoint dv = map.derivative_at(x);
        if (!dv.is_inf() && std::abs(dv.value) < tol)
            throw CriticalPoint("orbit hit a critical point");
        const Complex step = derivative_unit_factor(map, x);
        if (step == Complex{0.0}) throw CriticalPoint("orbit hit a degenerate derivative");
        unit *= step;
        unit /= std::abs(unit);  // keep the factor on the unit circle
        const ExtPoint img = map.eval(ExtPoint{x});
        if (img.is_inf()) throw CriticalPoint("orbit reached infinity");
        x = img.value;
    }
    return acc.get() / double(n);
}

RationalMap conjugated_by_inversion(const RationalMap& map) {
    const int d = map.degree();
    return RationalMap(map.den().reversed(d), map.num().reversed(d));
}

SphereRule ruelle_image_rule(const RationalMap& map, const QuadDifferential& phi, double crit_tol,
                             double pole_tol) {
    auto op_z = std::make_shared<RuelleOperator>(map, phi, crit_tol, pole_tol);
    auto op_w = std::make_shared<RuelleOperator>(conjugated_by_inversion(map),
                                                 phi.transported_to_wchart(), crit_tol, pole_tol);
    SphereRule rule;
    rule.z = [op_z](Complex z) { return (*op_z)(z); };
    rule.w = [op_w](Complex w) { return (*op_w)(w); };
    return rule;
}

std::vector<Exclusion> transfer_exclusions(const RationalMap& map, const QuadDifferential& phi,
                                           double radius, double crit_cutoff) {
    std::vector<Exclusion> ex;
    for (const ExtPoint& v : critical_values(map)) ex.push_back({v, radius, crit_cutoff});
    for (const Pole& p : phi.poles()) {
        ex.push_back({p.location, radius, 0.0});
        ex.push_back({map.eval(p.location), radius, 0.0});
    }
    return ex;
}

double duality_residual(const RationalMap& map, const LineField& mu, const QuadDifferential& phi,
                        const QuadratureConfig& cfg) {
    const Region region = Region::whole_sphere().with_exclusions(transfer_exclusions(map, phi));

    const RationalMap conj_map = conjugated_by_inversion(map);
    const QuadDifferential phi_w = phi.transported_to_wchart();
    LineField mu_w;
    mu_w.label = mu.label + "|w";
    mu_w.rule = [mu](Complex w) { return mu.eval_wchart(w); };

    const LineField bel_z = pullback_field(map, mu);
    const LineField bel_w = pullback_field(conj_map, mu_w);
    SphereRule lhs;
    lhs.z = [&bel_z, &phi](Complex z) { return bel_z.eval(z) * phi.eval(z); };
    lhs.w = [&bel_w, &phi_w](Complex w) { return bel_w.eval(w) * phi_w.eval(w); };
    const QuadratureResult left = integrate_complex(lhs, region, cfg);

    const RuelleOperator op_z(map, phi);
    const RuelleOperator op_w(conj_map, phi_w);
    SphereRule rhs;
    rhs.z = [&mu, &op_z](Complex z) { return mu.eval(z) * op_z(z); };
    rhs.w = [&mu_w, &op_w](Complex w) { return mu_w.eval(w) * op_w(w); };
    const QuadratureResult right = integrate_complex(rhs, region, cfg);

    return std::abs(left.value - right.value);
}

}  // namespace rlab
