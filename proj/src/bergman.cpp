#include "rlab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

constexpr double kThreeOverTwoPi = 3.0 / (2.0 * M_PI);

// (3/2) pi i [pi (1 - z conj(zeta))^2]^-2 = (3i) / (2 pi (1 - z conj(zeta))^4)
Complex disk_kernel(Complex z, Complex zeta) {
    const Complex t = 1.0 - z * std::conj(zeta);
    const Complex t2 = t * t;
    return Complex{0.0, kThreeOverTwoPi} / (t2 * t2);
}

}  // namespace

Complex KernelContext::to_disk(Complex z) const {
    return map_.is_identity() ? z : map_.inverse().apply(z);
}

bool KernelContext::contains(Complex z) const { return std::abs(to_disk(z)) < 1.0; }

Complex KernelContext::kernel(Complex z, Complex zeta) const {
    if (map_.is_identity()) {
        if (std::abs(z) >= 1.0 || std::abs(zeta) >= 1.0)
            throw OutsideDomain("kernel arguments must lie in the unit disk");
        return disk_kernel(z, zeta);
    }
    const Mobius inv = map_.inverse();
    const Complex u = inv.apply(z), v = inv.apply(zeta);
    if (std::abs(u) >= 1.0 || std::abs(v) >= 1.0)
        throw OutsideDomain("kernel arguments must lie in the transported disk");
    const Complex du = inv.deriv(z), dv = inv.deriv(zeta);
    const Complex cdv = std::conj(dv);
    return disk_kernel(u, v) * du * du * cdv * cdv;
}

double KernelContext::lambda(Complex z) const {
    const Complex u = to_disk(z);
    const double au = std::abs(u);
    if (au >= 1.0) throw OutsideDomain("density argument outside the domain");
    const double base = 1.0 / (1.0 - au * au);
    if (map_.is_identity()) return base;
    return base / std::abs(map_.deriv(u));
}

Complex KernelContext::omega(Complex zeta, Complex z) const {
    const double lam = lambda(zeta);
    return kernel(z, zeta) / (lam * lam);
}

Complex KernelContext::w_function(Complex z) const { return omega(z, z); }

QuadratureResult KernelContext::project(const PointRule& f, Complex z, const QuadratureConfig& cfg,
                                        bool precheck) const {
    const Mobius inv = map_.inverse();
    const Complex u = map_.is_identity() ? z : inv.apply(z);
    if (std::abs(u) >= 1.0) throw OutsideDomain("projection point outside the domain");

    // Pull the integrand back to the disk: g(v) = f(m(v)) m'(v)^2.
    PointRule g = f;
    if (!map_.is_identity()) {
        const Mobius m = map_;
        g = [m, f](Complex v) {
            const Complex dv = m.deriv(v);
            return f(m.apply(v)) * dv * dv;
        };
    }
    const Region disk = Region::disk(Complex{0.0}, 1.0);
    if (precheck) {
        QuadratureConfig rough = cfg;
        rough.tol = std::max(cfg.tol, 1e-3);
        rough.cell_budget = std::min<std::uint64_t>(cfg.cell_budget, 1u << 16);
        QuadratureResult l1;
        try {
            l1 = integrate_l1(g, disk, rough);
        } catch (const BudgetExceeded&) {
            throw NotIntegrable("projection input failed the integrability pre-check");
        }
        if (l1.diverging) throw NotIntegrable("projection input is not integrable");
    }

    PointRule integrand = [g, u](Complex v) {
        const double t = 1.0 - std::norm(v);
        const Complex den = 1.0 - u * std::conj(v);
        const Complex den2 = den * den;
        return (3.0 / M_PI) * (t * t) * g(v) / (den2 * den2);
    };
    QuadratureResult r = integrate_complex(integrand, disk, cfg);
    if (!map_.is_identity()) {
        const Complex dz = inv.deriv(z);
        r.value *= dz * dz;
        r.abs_error_estimate *= std::norm(dz);
    }
    return r;
}

Exhaustion Exhaustion::default_disks(int n_max) {
    if (n_max < 1) throw Error("exhaustion needs n_max >= 1");
    Exhaustion e;
    for (int n = 1; n <= n_max; ++n) e.radii_.push_back(1.0 - 1.0 / n);
    return e;
}

Exhaustion Exhaustion::from_radii(std::vector<double> radii) {
    if (radii.empty()) throw Error("exhaustion needs at least one set");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < 0.0 || radii[i] >= 1.0)
            throw Error("exhaustion radii must lie in [0, 1)");
        if (i > 0 && radii[i] < radii[i - 1]) throw Error("exhaustion must be nested");
    }
    Exhaustion e;
    e.radii_ = std::move(radii);
    return e;
}

double Exhaustion::radius(int n) const {
    if (n < 1 || n > n_max()) throw IndexOutOfRange("exhaustion index out of range");
    return radii_[static_cast<std::size_t>(n - 1)];
}

double Exhaustion::shell_measure(int n) const {
    const double r0 = radius(n);
    const double r1 = radius(std::min(n + 1, n_max()));
    return M_PI * (r1 * r1 - r0 * r0);
}

Complex exhaustion_apply(const KernelContext& ctx, const Exhaustion& exh, int n,
                         const PointRule& f, Complex z, const QuadratureConfig& cfg) {
    const double r = exh.radius(n);
    if (std::abs(z) > r) return Complex{0.0};
    return ctx.project(f, z, cfg).value;
}

namespace {

// Taylor coefficients of P(f) about 0: P(f)(z) = sum_k c_k z^k with
// c_k = (3/pi) binom(k+3, 3) integral over supp f of
//       conj(v)^k (1-|v|^2)^2 f(v) dm(v).
std::vector<Complex> projection_coefficients(const PointRule& f, const Region& support,
                                             double radius_bound, const QuadratureConfig& cfg) {
    const int terms =
        std::max(16, static_cast<int>(std::ceil(std::log(1e-12) / std::log(std::max(radius_bound, 0.05)))));
    std::vector<Complex> coeffs(static_cast<std::size_t>(terms));
    for (int k = 0; k < terms; ++k) {
        PointRule moment = [&f, k](Complex v) {
            const double t = 1.0 - std::norm(v);
            Complex vk{1.0};
            const Complex cv = std::conj(v);
            for (int j = 0; j < k; ++j) vk *= cv;
            return t * t * vk * f(v);
        };
        const QuadratureResult m = integrate_complex(moment, support, cfg);
        const double binom = (k + 1.0) * (k + 2.0) * (k + 3.0) / 6.0;
        coeffs[static_cast<std::size_t>(k)] = (3.0 / M_PI) * binom * m.value;
    }
    return coeffs;
}

Complex eval_poly(const std::vector<Complex>& c, Complex z) {
    Complex acc{0.0};
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
}

double support_radius_bound(const Region& support) {
    switch (support.kind) {
        case Region::Kind::Disk:
        case Region::Kind::Annulus:
            return std::abs(support.center) + support.r1;
        case Region::Kind::GridMask:
            return std::max({std::hypot(support.x0, support.y0), std::hypot(support.x0, support.y1),
                             std::hypot(support.x1, support.y0), std::hypot(support.x1, support.y1)});
        default:
            throw Error("exhaustion_defect supports bounded disk-like regions only");
    }
}

}  // namespace

Interval exhaustion_defect(const KernelContext& ctx, const Exhaustion& exh, int n,
                           const Region& support, const DefectOptions& opts,
                           const QuadratureConfig& cfg) {
    if (!ctx.is_disk())
        throw Error("exhaustion_defect is implemented on the unit-disk context");
    if (support.kind == Region::Kind::Empty ||
        (support.kind == Region::Kind::Disk && support.r1 <= 0.0))
        return {0.0, 0.0};
    const double rn = exh.radius(n);
    const double qbound = support_radius_bound(support);
    if (qbound >= 1.0) throw Error("defect support must be compact in the disk");
    const Region tail = Region::annulus(Complex{0.0}, rn, 1.0);

    // Upper bound: sup over the support of the L1 tail norm of the kernel.
    // The integrand is smooth on the tail annulus because the support stays
    // away from the boundary.
    auto tail_norm = [&](Complex zeta) {
        const double t = 1.0 - std::norm(zeta);
        const Complex cz = std::conj(zeta);
        PointRule rule = [t, cz](Complex z) {
            const Complex den = 1.0 - z * cz;
            const double ad = std::abs(den);
            const double ad2 = ad * ad;
            return Complex{(3.0 / M_PI) * t * t / (ad2 * ad2), 0.0};
        };
        return integrate_l1(rule, tail, cfg).real();
    };
    std::vector<Complex> sup_pts;
    switch (support.kind) {
        case Region::Kind::Disk:
        case Region::Kind::Annulus: {
            for (int ring = 1; ring <= opts.sup_grid_rings; ++ring)
                for (int j = 0; j < opts.sup_grid_angles; ++j) {
                    const double rr = support.kind == Region::Kind::Disk
                                          ? support.r1 * ring / opts.sup_grid_rings
                                          : support.r0 + (support.r1 - support.r0) * (ring - 1) /
                                                             std::max(1, opts.sup_grid_rings - 1);
                    const double th = 2.0 * M_PI * j / opts.sup_grid_angles;
                    sup_pts.push_back(support.center + rr * Complex{std::cos(th), std::sin(th)});
                }
            sup_pts.push_back(support.center);
            break;
        }
        default: {
            sup_pts.push_back(Complex{qbound, 0.0});
            break;
        }
    }
    std::vector<double> sup_vals;
    kernels::map_indexed(cfg.exec, sup_pts.size(), sup_vals, [&](std::size_t i) {
        return std::abs(sup_pts[i]) < 1.0 ? tail_norm(sup_pts[i]) : 0.0;
    });
    double upper = 0.0;
    for (double v : sup_vals) upper = std::max(upper, v);

    // Lower bound: seeded unit-L1-norm probes supported in A; the defect of
    // P_n against P is the mass of P(f) beyond Y_n.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double lower = 0.0;
    for (int probe = 0; probe < opts.probe_count; ++probe) {
        struct GaussBump {
            Complex c;
            double sigma;
            double amp;
        };
        std::vector<GaussBump> bumps;
        for (int b = 0; b < 5; ++b) {
            const double rr = qbound * std::sqrt(unif(rng)) * 0.9;
            const double th = 2.0 * M_PI * unif(rng);
            bumps.push_back({support.center * 0.0 + rr * Complex{std::cos(th), std::sin(th)} +
                                 support.center,
                             0.05 + 0.2 * qbound * unif(rng), 2.0 * unif(rng) - 1.0});
        }
        PointRule f = [bumps](Complex v) {
            double s = 0.0;
            for (const auto& g : bumps) s += g.amp * std::exp(-std::norm(v - g.c) / (g.sigma * g.sigma));
            return Complex{s, 0.0};
        };
        const double norm = integrate_l1(f, support, cfg).real();
        if (!(norm > 1e-12)) continue;
        PointRule fn = [f, norm](Complex v) { return f(v) / norm; };
        const auto coeffs = projection_coefficients(fn, support, qbound, cfg);
        PointRule pf = [&coeffs](Complex z) { return eval_poly(coeffs, z); };
        const double mass = integrate_l1(pf, tail, cfg).real();
        lower = std::max(lower, mass);
    }
    lower = std::min(lower, upper);
    return {lower, upper};
}

}  // namespace rlab
