#include "rlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

// Gauss-Legendre nodes/weights on [0,1]. Cells are estimated with the
// 5-point tensor rule; the 3-point rule drives the error estimate.
constexpr double kG5x[5] = {0.046910077030668004, 0.23076534494715845, 0.5,
                            0.76923465505284155, 0.953089922969332};
constexpr double kG5w[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                            0.23931433524968324, 0.11846344252809454};
constexpr double kG3x[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kG3w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

enum class Chart { Z, W };

struct Circle {
    Complex c;
    double r;
};

// Image of the circle |z - c| = r under w = 1/z; requires 0 outside the
// closed disk.
Circle invert_circle(const Circle& k) {
    const double alpha = std::norm(k.c) - k.r * k.r;
    return {std::conj(k.c) / alpha, k.r / std::abs(alpha)};
}

// Normalized exclusion in its owner chart.
struct NormEx {
    Chart chart;
    Complex center;
    double rho;
    double cutoff;
    bool patched = false;  // has a companion polar patch re-covering its disk
};

struct Patch {
    Chart chart = Chart::Z;
    bool polar = true;
    Complex center{0.0};
    double a0 = 0, a1 = 0, b0 = 0, b1 = 0;  // (r, theta) or (x, y)
    std::vector<Circle> holes;              // hard region holes (chart coords)
    int own_exclusion = -1;                 // >= 0: this is a pole patch
};

struct Cell {
    int patch;
    double a0, a1, b0, b1;
    int depth;
};

struct CellOut {
    Complex i3{0.0}, i2{0.0};
    double mass3 = 0.0;  // integral of |value| under the 3x3 rule
    double amb = 0.0;    // hole-masking ambiguity
    bool dead = false;
    bool straddle = false;
    bool nonfinite = false;
};

// C5 smoothstep for the partition of unity around exclusions: 1 on
// [0, rho/2], 0 beyond rho. The high smoothness keeps the Gauss cells at
// full order across the transition band.
double bump(double s, double rho) {
    if (s <= 0.5 * rho) return 1.0;
    if (s >= rho) return 0.0;
    const double t = (s - 0.5 * rho) / (0.5 * rho);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double t6 = t3 * t3;
    const double step =
        t6 * (462.0 - 1980.0 * t + 3465.0 * t2 - 3080.0 * t3 + 1386.0 * t2 * t2 - 252.0 * t2 * t3);
    return 1.0 - step;
}

double cell_measure(const Patch& p, const Cell& c) {
    if (p.polar) return 0.5 * (c.a1 * c.a1 - c.a0 * c.a0) * (c.b1 - c.b0);
    return (c.a1 - c.a0) * (c.b1 - c.b0);
}

// Distance bounds from a point q to the polar sector {center + r e^{it}}.
void sector_dist_bounds(const Patch& p, const Cell& c, Complex q, double& dmin, double& dmax) {
    const Complex delta = q - p.center;
    const double rho = std::abs(delta);
    const double alpha = std::arg(delta);
    auto wrap_in = [&](double ang) {
        double t = std::fmod(ang - c.b0, 2.0 * M_PI);
        if (t < 0) t += 2.0 * M_PI;
        return t <= (c.b1 - c.b0);
    };
    const double ca = std::cos(c.b0 - alpha), cb = std::cos(c.b1 - alpha);
    double cmax = std::max(ca, cb), cmin = std::min(ca, cb);
    if (wrap_in(alpha)) cmax = 1.0;
    if (wrap_in(alpha + M_PI)) cmin = -1.0;
    auto d2 = [&](double r, double cth) { return r * r + rho * rho - 2.0 * r * rho * cth; };
    const double rstar = std::clamp(rho * cmax, c.a0, c.a1);
    dmin = std::sqrt(std::max(0.0, d2(rstar, cmax)));
    dmax = std::sqrt(std::max({d2(c.a0, cmin), d2(c.a1, cmin)}));
}

void rect_dist_bounds(const Cell& c, Complex q, double& dmin, double& dmax) {
    const double dx = std::max({c.a0 - q.real(), 0.0, q.real() - c.a1});
    const double dy = std::max({c.b0 - q.imag(), 0.0, q.imag() - c.b1});
    dmin = std::hypot(dx, dy);
    const double fx = std::max(std::abs(q.real() - c.a0), std::abs(q.real() - c.a1));
    const double fy = std::max(std::abs(q.imag() - c.b0), std::abs(q.imag() - c.b1));
    dmax = std::hypot(fx, fy);
}

struct Assembled {
    std::vector<Patch> patches;
    std::vector<NormEx> exclusions;
    double total_measure = 0.0;
    std::vector<Cell> initial;
};

void push_polar_patch(Assembled& a, Chart chart, Complex center, double r0, double r1,
                      int own_excl = -1) {
    if (r1 <= r0) return;
    Patch p;
    p.chart = chart;
    p.polar = true;
    p.center = center;
    p.a0 = r0;
    p.a1 = r1;
    p.b0 = 0.0;
    p.b1 = 2.0 * M_PI;
    p.own_exclusion = own_excl;
    a.patches.push_back(p);
}

std::vector<NormEx> normalize_exclusions(const Region& region) {
    std::vector<NormEx> ex;
    for (const Exclusion& e : region.exclusions) {
        NormEx n;
        n.cutoff = e.inner_cutoff;
        if (e.point.is_inf()) {
            n.chart = Chart::W;
            n.center = Complex{0.0};
            n.rho = e.radius;
        } else {
            if (std::abs(e.point.value) > 100.0)
                throw Error("exclusion points beyond |z| = 100 must be declared at infinity");
            n.chart = Chart::Z;
            n.center = e.point.value;
            n.rho = e.radius;
        }
        bool dup = false;
        for (auto& m : ex)
            if (m.chart == n.chart && std::abs(m.center - n.center) < 1e-12) {
                m.rho = std::max(m.rho, n.rho);
                m.cutoff = std::min(m.cutoff, n.cutoff);
                dup = true;
            }
        if (!dup) ex.push_back(n);
    }
    // Disjoint supports keep the partition of unity exact.
    for (std::size_t i = 0; i < ex.size(); ++i)
        for (std::size_t j = i + 1; j < ex.size(); ++j) {
            if (ex[i].chart == ex[j].chart) {
                const double d = std::abs(ex[i].center - ex[j].center);
                if (ex[i].rho + ex[j].rho >= d) {
                    ex[i].rho = std::min(ex[i].rho, 0.45 * d);
                    ex[j].rho = std::min(ex[j].rho, 0.45 * d);
                }
            } else {
                // z-chart disk vs the infinity disk |w| < rho_w.
                const NormEx& zc = ex[i].chart == Chart::Z ? ex[i] : ex[j];
                NormEx& wc = ex[i].chart == Chart::W ? ex[i] : ex[j];
                if (std::abs(wc.center) < 1e-12) {
                    const double need = 1.0 / (std::abs(zc.center) + zc.rho + 1.0);
                    wc.rho = std::min(wc.rho, need);
                }
            }
        }
    for (auto& e : ex) e.cutoff = std::min(e.cutoff, e.rho);
    return ex;
}

Assembled assemble(const Region& region) {
    Assembled a;
    a.exclusions = normalize_exclusions(region);

    switch (region.kind) {
        case Region::Kind::Empty:
            break;
        case Region::Kind::WholeSphere:
            push_polar_patch(a, Chart::Z, Complex{0.0}, 0.0, 2.0);
            push_polar_patch(a, Chart::W, Complex{0.0}, 0.0, 0.5);
            break;
        case Region::Kind::Disk:
            push_polar_patch(a, Chart::Z, region.center, 0.0, region.r1);
            break;
        case Region::Kind::Annulus:
            push_polar_patch(a, Chart::Z, region.center, region.r0, region.r1);
            break;
        case Region::Kind::ComplementOfDisks: {
            push_polar_patch(a, Chart::Z, Complex{0.0}, 0.0, 2.0);
            push_polar_patch(a, Chart::W, Complex{0.0}, 0.0, 0.5);
            for (const auto& [c, r] : region.holes) {
                const Circle k{c, r};
                for (Patch& p : a.patches) {
                    if (p.chart == Chart::Z) {
                        p.holes.push_back(k);
                    } else if (std::abs(c) > r) {
                        p.holes.push_back(invert_circle(k));
                    }
                }
            }
            break;
        }
        case Region::Kind::GridMask: {
            const double hx = (region.x1 - region.x0) / region.nx;
            const double hy = (region.y1 - region.y0) / region.ny;
            for (int j = 0; j < region.ny; ++j)
                for (int i = 0; i < region.nx; ++i) {
                    if (!region.mask[static_cast<std::size_t>(j) * region.nx + i]) continue;
                    Patch p;
                    p.chart = Chart::Z;
                    p.polar = false;
                    p.a0 = region.x0 + i * hx;
                    p.a1 = p.a0 + hx;
                    p.b0 = region.y0 + j * hy;
                    p.b1 = p.b0 + hy;
                    a.patches.push_back(p);
                }
            break;
        }
    }

    // Pole patches re-cover each exclusion disk with singularity-friendly
    // polar cells; the bump partition removes the same mass from the bulk.
    // Exclusions that do not fit inside the region keep their mass in the
    // bulk cells instead (patched stays false and no bump is applied).
    for (std::size_t e = 0; e < a.exclusions.size(); ++e) {
        NormEx& n = a.exclusions[e];
        bool covered = false;
        switch (region.kind) {
            case Region::Kind::WholeSphere:
                covered = true;
                break;
            case Region::Kind::Disk:
            case Region::Kind::Annulus: {
                if (n.chart == Chart::Z) {
                    const double d = std::abs(n.center - region.center);
                    covered = d + n.rho <= region.r1 &&
                              (region.kind == Region::Kind::Disk || d - n.rho >= region.r0);
                }
                break;
            }
            case Region::Kind::ComplementOfDisks: {
                covered = true;
                for (const auto& [c, r] : region.holes) {
                    const Complex zc = n.chart == Chart::Z
                                           ? n.center
                                           : (std::abs(n.center) < 1e-300 ? Complex{1e300}
                                                                          : 1.0 / n.center);
                    if (std::abs(zc - c) <= r + (n.chart == Chart::Z ? n.rho : 0.0))
                        covered = false;
                }
                break;
            }
            default:
                covered = false;
                break;
        }
        if (covered) {
            n.patched = true;
            push_polar_patch(a, n.chart, n.center, n.cutoff, n.rho, static_cast<int>(e));
        }
    }

    // Initial cells: radial x angular splits (geometric radii over wide
    // dynamic ranges), 2x2 for rectangles.
    for (std::size_t pi = 0; pi < a.patches.size(); ++pi) {
        const Patch& p = a.patches[pi];
        if (p.polar) {
            std::vector<double> rs;
            if (p.a0 > 0.0 && p.a1 / p.a0 > 50.0) {
                const int k =
                    std::max(4, static_cast<int>(std::ceil(2.0 * std::log10(p.a1 / p.a0))));
                for (int i = 0; i <= k; ++i)
                    rs.push_back(p.a1 * std::pow(p.a0 / p.a1, 1.0 - double(i) / k));
            } else if (p.own_exclusion >= 0) {
                // Align radial boundaries with the smoothstep knots so the
                // transition band never crosses a cell interior.
                const double knot = 0.5 * p.a1;
                if (p.a0 < knot) {
                    rs.push_back(p.a0);
                    rs.push_back(0.5 * (p.a0 + knot));
                    rs.push_back(knot);
                } else {
                    rs.push_back(p.a0);
                }
                rs.push_back(0.5 * (knot + p.a1));
                rs.push_back(p.a1);
            } else {
                for (int i = 0; i <= 4; ++i) rs.push_back(p.a0 + (p.a1 - p.a0) * i / 4.0);
            }
            const int nth = 8;
            for (std::size_t i = 0; i + 1 < rs.size(); ++i)
                for (int j = 0; j < nth; ++j)
                    a.initial.push_back({static_cast<int>(pi), rs[i], rs[i + 1],
                                         p.b0 + (p.b1 - p.b0) * j / nth,
                                         p.b0 + (p.b1 - p.b0) * (j + 1) / nth, 0});
        } else {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    a.initial.push_back({static_cast<int>(pi), p.a0 + (p.a1 - p.a0) * i / 2.0,
                                         p.a0 + (p.a1 - p.a0) * (i + 1) / 2.0,
                                         p.b0 + (p.b1 - p.b0) * j / 2.0,
                                         p.b0 + (p.b1 - p.b0) * (j + 1) / 2.0, 0});
        }
    }
    for (const Cell& c : a.initial)
        a.total_measure += cell_measure(a.patches[static_cast<std::size_t>(c.patch)], c);
    return a;
}

class Integrator {
  public:
    Integrator(const SphereRule& rule, const Region& region, const QuadratureConfig& cfg, bool l1)
        : rule_(rule), cfg_(cfg), l1_(l1), asm_(assemble(region)) {
        straddle_cap_ = std::min(
            cfg_.max_depth, 4 + static_cast<int>(std::ceil(std::log2(1.0 / std::max(cfg_.tol, 1e-15)))));
    }

    QuadratureResult run() {
        QuadratureResult res;
        std::vector<Cell> cells = asm_.initial;
        std::vector<Cell> next;
        std::vector<CellOut> outs;
        kernels::KahanSum<Complex> val;
        kernels::KahanSum<double> err;
        kernels::KahanSum<double> mass;
        std::vector<double> increments;
        bool overflow = false;
        double mass_scale = 0.0;  // total-mass estimate from the first sweep

        while (!cells.empty()) {
            const bool last_round = res.cells_used + cells.size() >= cfg_.cell_budget;
            kernels::map_indexed(cfg_.exec, cells.size(), outs,
                                 [&](std::size_t i) { return evaluate(cells[i]); });
            if (mass_scale == 0.0) {
                kernels::KahanSum<double> m0;
                for (const CellOut& o : outs) m0.add(o.mass3);
                mass_scale = m0.get();
            }
            next.clear();
            kernels::KahanSum<double> gen_mass;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const Cell& c = cells[i];
                const CellOut& o = outs[i];
                if (o.dead) continue;
                const Patch& p = asm_.patches[static_cast<std::size_t>(c.patch)];
                // Error budget: half shared by area, half by mass share, so
                // concentrated singular mass is not starved by tiny cells.
                double tol_cell =
                    0.5 * cfg_.tol * cell_measure(p, c) / std::max(asm_.total_measure, 1e-300);
                if (mass_scale > 0.0) tol_cell += 0.5 * cfg_.tol * o.mass3 / mass_scale;
                double e = std::abs(o.i3 - o.i2) + o.amb;
                const bool tiny =
                    (c.a1 - c.a0) + (c.b1 - c.b0) < 1e-9 * ((p.a1 - p.a0) + (p.b1 - p.b0));
                const int cap = o.straddle ? straddle_cap_ : cfg_.max_depth;
                const bool want_split = e > tol_cell && c.depth < cap && !tiny;
                if (want_split && !last_round) {
                    const double am = 0.5 * (c.a0 + c.a1), bm = 0.5 * (c.b0 + c.b1);
                    next.push_back({c.patch, c.a0, am, c.b0, bm, c.depth + 1});
                    next.push_back({c.patch, am, c.a1, c.b0, bm, c.depth + 1});
                    next.push_back({c.patch, c.a0, am, bm, c.b1, c.depth + 1});
                    next.push_back({c.patch, am, c.a1, bm, c.b1, c.depth + 1});
                    continue;
                }
                if (want_split) overflow = true;
                if (o.nonfinite) e += o.mass3 + tol_cell;
                val.add(o.i3);
                err.add(e);
                mass.add(o.mass3);
                gen_mass.add(o.mass3);
            }
            res.cells_used += cells.size();
            increments.push_back(gen_mass.get());
            cells.swap(next);

            // Divergence heuristics: growing partial sums or runaway value.
            const std::size_t k = increments.size();
            if (k >= 6) {
                bool growing = increments[k - 1] > 10.0 * cfg_.tol;
                for (std::size_t j = k - 4; j < k && growing; ++j)
                    growing = increments[j] >= 0.999 * increments[j - 1] &&
                              increments[j] > cfg_.tol;
                if (growing) {
                    res.diverging = true;
                    break;
                }
            }
            if (mass.get() > 1e200) {
                res.diverging = true;
                break;
            }
        }

        res.value = val.get();
        res.abs_error_estimate = err.get() + cutoff_mass_estimate();
        res.converged = !overflow && !res.diverging &&
                        res.abs_error_estimate <= 10.0 * cfg_.tol + 1e-300;
        if (overflow && !res.diverging) {
            const std::size_t k = increments.size();
            const bool growing =
                k >= 2 && increments[k - 1] >= increments[k - 2] && increments[k - 1] > 10.0 * cfg_.tol;
            if (growing)
                res.diverging = true;
            else
                throw BudgetExceeded("quadrature cell budget exhausted at " +
                                     std::to_string(res.cells_used) + " cells");
        }
        return res;
    }

  private:
    // The smooth partition factor at a chart point: bulk patches carry
    // prod(1 - chi_e) over patched exclusions, pole patches chi_own.
    double partition_factor(const Patch& p, Complex pt_chart) const {
        double f = 1.0;
        for (std::size_t e = 0; e < asm_.exclusions.size(); ++e) {
            const NormEx& n = asm_.exclusions[e];
            if (!n.patched) continue;
            double s;
            if (n.chart == p.chart) {
                s = std::abs(pt_chart - n.center);
            } else if (pt_chart == Complex{0.0}) {
                s = 1e300;
            } else {
                s = std::abs(1.0 / pt_chart - n.center);
            }
            const double chi = bump(s, n.rho);
            if (p.own_exclusion == static_cast<int>(e))
                f *= chi;
            else
                f *= 1.0 - chi;
        }
        return f;
    }

    CellOut evaluate(const Cell& c) const {
        const Patch& p = asm_.patches[static_cast<std::size_t>(c.patch)];
        CellOut out;

        for (const Circle& h : p.holes) {
            double dmin, dmax;
            if (p.polar)
                sector_dist_bounds(p, c, h.c, dmin, dmax);
            else
                rect_dist_bounds(c, h.c, dmin, dmax);
            if (dmax <= h.r) {
                out.dead = true;
                return out;
            }
            if (dmin < h.r) out.straddle = true;
        }

        const double da = c.a1 - c.a0, db = c.b1 - c.b0;
        auto node = [&](double xa, double xb, Complex& pt, double& jac) {
            const double aa = c.a0 + da * xa, bb = c.b0 + db * xb;
            if (p.polar) {
                pt = p.center + aa * Complex{std::cos(bb), std::sin(bb)};
                jac = aa * da * db;
            } else {
                pt = Complex{aa, bb};
                jac = da * db;
            }
        };
        auto sample = [&](Complex pt) -> Complex {
            if (out.straddle) {
                for (const Circle& h : p.holes)
                    if (std::abs(pt - h.c) < h.r) return Complex{0.0};
            }
            const double f = partition_factor(p, pt);
            if (f == 0.0) return Complex{0.0};
            Complex v;
            try {
                v = (p.chart == Chart::Z) ? rule_.z(pt) : rule_.w(pt);
            } catch (const Error&) {
                return Complex{std::numeric_limits<double>::quiet_NaN(), 0.0};
            }
            if (l1_) v = Complex{std::abs(v), 0.0};
            return f * v;
        };

        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                Complex pt;
                double jac;
                node(kG5x[i], kG5x[j], pt, jac);
                const Complex v = sample(pt);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    out.nonfinite = true;
                    continue;
                }
                const double wgt = kG5w[i] * kG5w[j] * jac;
                out.i3 += wgt * v;
                out.mass3 += wgt * std::abs(v);
            }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Complex pt;
                double jac;
                node(kG3x[i], kG3x[j], pt, jac);
                const Complex v = sample(pt);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    out.nonfinite = true;
                    continue;
                }
                out.i2 += kG3w[i] * kG3w[j] * jac * v;
            }
        if (out.straddle) out.amb = out.mass3;
        return out;
    }

    // Mass omitted inside inner cutoffs, estimated from a ring at 1.2x the
    // cutoff radius (the integrand is r^-1-like at declared poles).
    double cutoff_mass_estimate() const {
        kernels::KahanSum<double> total;
        for (const Patch& p : asm_.patches) {
            if (p.own_exclusion < 0) continue;
            const NormEx& n = asm_.exclusions[static_cast<std::size_t>(p.own_exclusion)];
            if (n.cutoff <= 0.0) continue;
            const double r = 1.2 * n.cutoff;
            kernels::KahanSum<double> ring;
            int good = 0;
            for (int k = 0; k < 8; ++k) {
                const double th = 2.0 * M_PI * (k + 0.5) / 8.0;
                const Complex pt = n.center + r * Complex{std::cos(th), std::sin(th)};
                Complex v;
                try {
                    v = (p.chart == Chart::Z) ? rule_.z(pt) : rule_.w(pt);
                } catch (const Error&) {
                    continue;
                }
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) continue;
                ring.add(std::abs(v) * r);
                ++good;
            }
            if (good > 0) total.add((ring.get() / good) * 2.0 * M_PI * n.cutoff);
        }
        return total.get();
    }

    const SphereRule& rule_;
    QuadratureConfig cfg_;
    bool l1_;
    Assembled asm_;
    int straddle_cap_ = 24;
};

}  // namespace

SphereRule make_sphere_rule(PointRule z_rule) {
    SphereRule r;
    r.z = z_rule;
    r.w = [z_rule](Complex w) -> Complex {
        if (w == Complex{0.0}) return Complex{0.0};
        const double aw = std::abs(w);
        const double j = 1.0 / (aw * aw * aw * aw);
        return z_rule(1.0 / w) * j;
    };
    return r;
}

Region Region::empty() {
    Region r;
    r.kind = Kind::Empty;
    return r;
}
Region Region::whole_sphere() {
    Region r;
    r.kind = Kind::WholeSphere;
    return r;
}
Region Region::disk(Complex center, double radius) {
    Region r;
    r.kind = Kind::Disk;
    r.center = center;
    r.r1 = radius;
    return r;
}
Region Region::annulus(Complex center, double inner, double outer) {
    Region r;
    r.kind = Kind::Annulus;
    r.center = center;
    r.r0 = inner;
    r.r1 = outer;
    return r;
}
Region Region::complement_of_disks(std::vector<std::pair<Complex, double>> removed) {
    Region r;
    r.kind = Kind::ComplementOfDisks;
    r.holes = std::move(removed);
    return r;
}
Region Region::grid_mask(double x0, double x1, double y0, double y1, int nx, int ny,
                         std::vector<char> mask) {
    Region r;
    r.kind = Kind::GridMask;
    r.x0 = x0;
    r.x1 = x1;
    r.y0 = y0;
    r.y1 = y1;
    r.nx = nx;
    r.ny = ny;
    r.mask = std::move(mask);
    return r;
}

Region Region::with_exclusions(std::vector<Exclusion> ex) const {
    Region r = *this;
    for (auto& e : ex) r.exclusions.push_back(e);
    return r;
}

QuadratureResult integrate_l1(const SphereRule& f, const Region& region,
                              const QuadratureConfig& cfg) {
    return Integrator(f, region, cfg, /*l1=*/true).run();
}

QuadratureResult integrate_l1(const PointRule& f, const Region& region,
                              const QuadratureConfig& cfg) {
    return integrate_l1(make_sphere_rule(f), region, cfg);
}

QuadratureResult integrate_complex(const SphereRule& f, const Region& region,
                                   const QuadratureConfig& cfg) {
    return Integrator(f, region, cfg, /*l1=*/false).run();
}

QuadratureResult integrate_complex(const PointRule& f, const Region& region,
                                   const QuadratureConfig& cfg) {
    return integrate_complex(make_sphere_rule(f), region, cfg);
}

std::vector<Exclusion> pole_exclusions(const QuadDifferential& phi, double radius,
                                       double inner_cutoff) {
    std::vector<Exclusion> ex;
    for (const Pole& p : phi.poles()) ex.push_back({p.location, radius, inner_cutoff});
    return ex;
}

QuadratureResult pairing(const LineField& mu, const QuadDifferential& phi, const Region& region,
                         const QuadratureConfig& cfg) {
    SphereRule rule;
    rule.z = [&mu, &phi](Complex z) { return mu.eval(z) * phi.eval(z); };
    rule.w = [&mu, &phi](Complex w) { return mu.eval_wchart(w) * phi.eval_wchart(w); };
    return integrate_complex(rule, region.with_exclusions(pole_exclusions(phi)), cfg);
}

double teich_lower_bound(const LineField& mu, const std::vector<QuadDifferential>& basis,
                         const QuadratureConfig& cfg) {
    double best = 0.0;
    const Region sphere = Region::whole_sphere();
    for (const QuadDifferential& phi : basis) {
        SphereRule abs_rule;
        abs_rule.z = [&phi](Complex z) { return phi.eval(z); };
        abs_rule.w = [&phi](Complex w) { return phi.eval_wchart(w); };
        const auto norm =
            integrate_l1(abs_rule, sphere.with_exclusions(pole_exclusions(phi)), cfg);
        if (!(norm.real() > 0.0)) continue;
        const auto pr = pairing(mu, phi, sphere, cfg);
        best = std::max(best, std::abs(pr.value) / norm.real());
    }
    return best;
}

}  // namespace rlab
