#include "rlab/hyperbolic.hpp"

#include <algorithm>
#include <cmath>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

// Conservative constant for the twice-punctured-plane estimate
// lambda(v) >= 1 / (2|v| (|log|v|| + K)) (curvature -1). The sharp cusp
// constant is Gamma(1/4)^4 / (4 pi^2) ~= 4.377; K = 10 keeps the inequality
// safely one-sided at every scale.
constexpr double kTwicePuncturedMargin = 10.0;

double hempel_floor(Complex v) {
    const double a = std::abs(v);
    if (a == 0.0 || !std::isfinite(a)) return 0.0;
    return 1.0 / (2.0 * a * (std::abs(std::log(a)) + kTwicePuncturedMargin));
}

// Best lower bound for the curvature -1 density of C \ {0,1} at v, taking
// the max over the six anharmonic symmetries of {0, 1, infinity}.
double twice_punctured_lower(Complex v) {
    double best = hempel_floor(v);
    best = std::max(best, hempel_floor(1.0 - v));
    const double av = std::abs(v);
    if (av > 0.0) {
        best = std::max(best, hempel_floor(1.0 / v) / (av * av));
        best = std::max(best, hempel_floor(1.0 - 1.0 / v) / (av * av));
    }
    const double a1 = std::abs(v - 1.0);
    if (a1 > 0.0) {
        best = std::max(best, hempel_floor(1.0 / (1.0 - v)) / (a1 * a1));
        best = std::max(best, hempel_floor(v / (v - 1.0)) / (a1 * a1));
    }
    return best;
}

}  // namespace

MetricModel MetricModel::disk() {
    MetricModel m;
    m.kind_ = Kind::Disk;
    return m;
}

MetricModel MetricModel::punctured_disk() {
    MetricModel m;
    m.kind_ = Kind::PuncturedDisk;
    return m;
}

MetricModel MetricModel::annulus(double r, double R) {
    if (!(0.0 < r && r < R)) throw Error("annulus model requires 0 < r < R");
    MetricModel m;
    m.kind_ = Kind::Annulus;
    m.r_ = r;
    m.R_ = R;
    return m;
}

MetricModel MetricModel::punctured_sphere(std::vector<ExtPoint> punctures) {
    MetricModel m;
    m.kind_ = Kind::PuncturedSphere;
    m.punctures_ = std::move(punctures);
    if (m.punctures_.size() < 3)
        throw Error("punctured sphere needs at least 3 punctures to be hyperbolic");
    for (const ExtPoint& p : m.punctures_) {
        if (p.is_inf()) {
            if (m.has_inf_) throw Error("duplicate puncture at infinity");
            m.has_inf_ = true;
        } else {
            m.finite_punctures_.push_back(p.value);
        }
    }
    for (std::size_t i = 0; i < m.finite_punctures_.size(); ++i)
        for (std::size_t j = i + 1; j < m.finite_punctures_.size(); ++j)
            if (std::abs(m.finite_punctures_[i] - m.finite_punctures_[j]) < 1e-12)
                throw Error("punctures must be distinct");
    // Clearance of each finite puncture: distance to the nearest other one.
    for (std::size_t i = 0; i < m.finite_punctures_.size(); ++i) {
        double c = 1e300;
        for (std::size_t j = 0; j < m.finite_punctures_.size(); ++j)
            if (i != j) c = std::min(c, std::abs(m.finite_punctures_[i] - m.finite_punctures_[j]));
        m.clearance_.push_back(c);
    }
    if (m.has_inf_) {
        double c = 1e300;
        for (Complex p : m.finite_punctures_)
            if (std::abs(p) > 0.0) c = std::min(c, 1.0 / std::abs(p));
        m.inf_clearance_ = c;
    }
    return m;
}

double MetricModel::density(Complex z) const {
    const double a = std::abs(z);
    switch (kind_) {
        case Kind::Disk:
            if (a >= 1.0) throw OutsideDomain("disk density needs |z| < 1");
            return 1.0 / (1.0 - a * a);
        case Kind::PuncturedDisk:
            if (a <= 0.0 || a >= 1.0) throw OutsideDomain("punctured disk needs 0 < |z| < 1");
            return 1.0 / (2.0 * a * std::log(1.0 / a));
        case Kind::Annulus: {
            if (a <= r_ || a >= R_) throw OutsideDomain("annulus density needs r < |z| < R");
            const double L = std::log(R_ / r_);
            const double s = std::sin(M_PI * std::log(a / r_) / L);
            return M_PI / (2.0 * L * a * s);
        }
        case Kind::PuncturedSphere:
            throw Error("punctured-sphere densities are bounds-only; use density_bounds");
    }
    throw Error("unreachable metric kind");
}

Interval MetricModel::density_bounds(Complex z) const {
    if (kind_ != Kind::PuncturedSphere) {
        const double v = density(z);
        return {v, v};
    }
    for (Complex p : finite_punctures_)
        if (z == p) throw OutsideDomain("density requested at a puncture");

    // Upper bounds by domain monotonicity: an inscribed round disk always,
    // an inscribed punctured disk near each puncture (and near infinity).
    double upper = 1e300;
    double dmin = 1e300;
    for (std::size_t i = 0; i < finite_punctures_.size(); ++i) {
        const double s = std::abs(z - finite_punctures_[i]);
        dmin = std::min(dmin, s);
        const double rho = clearance_[i];
        if (s < rho) {
            const double lg = std::log(rho / s);
            if (lg > 0.0) upper = std::min(upper, 1.0 / (2.0 * s * lg));
        }
    }
    upper = std::min(upper, 1.0 / dmin);
    if (has_inf_) {
        const double aw = 1.0 / std::max(std::abs(z), 1e-300);
        if (aw < inf_clearance_) {
            const double lg = std::log(inf_clearance_ / aw);
            if (lg > 0.0) upper = std::min(upper, aw / (2.0 * lg));
        }
    }

    // Lower bound: the domain sits inside every thrice-punctured sphere
    // spanned by a triple of punctures; transport the twice-punctured-plane
    // floor through the cross-ratio map (curvature -4 halves the -1 form).
    double lower = 0.0;
    const std::size_t nf = finite_punctures_.size();
    auto improve = [&](double cand) { lower = std::max(lower, cand); };
    // Triples of finite punctures.
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = i + 1; j < nf; ++j)
            for (std::size_t k = j + 1; k < nf; ++k) {
                const Complex a = finite_punctures_[i], b = finite_punctures_[j],
                              c = finite_punctures_[k];
                const Complex kk = (b - c) / (b - a);
                const Complex g = kk * (z - a) / (z - c);
                const double gp = std::abs(kk * (a - c)) / std::norm(z - c);
                improve(0.5 * twice_punctured_lower(g) * gp);
            }
    // Pairs of finite punctures with the puncture at infinity.
    if (has_inf_)
        for (std::size_t i = 0; i < nf; ++i)
            for (std::size_t j = i + 1; j < nf; ++j) {
                const Complex a = finite_punctures_[i], b = finite_punctures_[j];
                const Complex g = (z - a) / (b - a);
                const double gp = 1.0 / std::abs(b - a);
                improve(0.5 * twice_punctured_lower(g) * gp);
            }
    lower = std::min(lower, upper);  // bounds of the same quantity never cross
    return {lower, upper};
}

Interval MetricModel::density_sq_bounds(Complex z) const {
    const Interval b = density_bounds(z);
    return {b.lower * b.lower, b.upper * b.upper};
}

AreaEstimate hyperbolic_area(const MetricModel& model, const Region& region,
                             const QuadratureConfig& cfg) {
    AreaEstimate est;
    if (!model.bounds_only()) {
        PointRule rule = [&model](Complex z) -> Complex {
            const double d = model.density(z);
            return Complex{d * d, 0.0};
        };
        const QuadratureResult r = integrate_l1(rule, region, cfg);
        est.area = {r.real(), r.real()};
        est.abs_error_estimate = r.abs_error_estimate;
        est.cells_used = r.cells_used;
        est.converged = r.converged;
        est.diverging = r.diverging;
        return est;
    }
    PointRule lo = [&model](Complex z) -> Complex {
        return Complex{model.density_sq_bounds(z).lower, 0.0};
    };
    PointRule hi = [&model](Complex z) -> Complex {
        return Complex{model.density_sq_bounds(z).upper, 0.0};
    };
    const QuadratureResult rl = integrate_l1(lo, region, cfg);
    const QuadratureResult rh = integrate_l1(hi, region, cfg);
    est.area = {rl.real(), rh.real()};
    est.abs_error_estimate = rl.abs_error_estimate + rh.abs_error_estimate;
    est.cells_used = rl.cells_used + rh.cells_used;
    est.converged = rl.converged && rh.converged;
    est.diverging = rl.diverging || rh.diverging;
    return est;
}

namespace {

// lambda^-2 |phi| with the conservative (upper) reading for bounds models.
double bergman_quotient(const MetricModel& model, const QuadDifferential& phi, Complex z) {
    const double lam_lower =
        model.bounds_only() ? model.density_bounds(z).lower : model.density(z);
    if (!(lam_lower > 0.0)) return 0.0;
    return std::abs(phi.eval(z)) / (lam_lower * lam_lower);
}

}  // namespace

double bergman_sup_estimate(const MetricModel& model, const QuadDifferential& phi,
                            const BcondGrid& grid, Exec exec) {
    // Multi-resolution grid: polar bulk on both charts plus dyadic annuli
    // toward every puncture.
    std::vector<Complex> pts;
    for (int k = 1; k <= grid.bulk_rings; ++k)
        for (int j = 0; j < grid.bulk_angles; ++j) {
            const double r = 2.0 * k / grid.bulk_rings;
            const double th = 2.0 * M_PI * (j + 0.37) / grid.bulk_angles;
            pts.push_back(r * Complex{std::cos(th), std::sin(th)});
            if (k < grid.bulk_rings) {  // |w| = r/4 < 1/2 covers |z| > 2
                const Complex w = 0.25 * r * Complex{std::cos(th), std::sin(th)};
                pts.push_back(1.0 / w);
            }
        }
    auto add_puncture_fan = [&](Complex center, double rho, bool invert) {
        for (int lv = 1; lv <= grid.puncture_levels; ++lv)
            for (int j = 0; j < grid.puncture_angles; ++j) {
                const double s = rho * std::pow(0.5, lv);
                const double th = 2.0 * M_PI * (j + 0.13) / grid.puncture_angles;
                const Complex p = center + s * Complex{std::cos(th), std::sin(th)};
                pts.push_back(invert ? 1.0 / p : p);
            }
    };
    if (model.bounds_only()) {
        for (const ExtPoint& p : model.punctures()) {
            if (p.is_inf())
                add_puncture_fan(Complex{0.0}, 0.4, /*invert=*/true);
            else
                add_puncture_fan(p.value, 0.4, /*invert=*/false);
        }
    }

    std::vector<double> vals;
    kernels::map_indexed(exec, pts.size(), vals, [&](std::size_t i) -> double {
        const Complex z = pts[i];
        if (std::abs(z) > 1e8) return 0.0;
        for (const ExtPoint& p : model.punctures())
            if (!p.is_inf() && std::abs(z - p.value) < 1e-13) return 0.0;
        return bergman_quotient(model, phi, z);
    });
    double sup = 0.0;
    for (double v : vals) sup = std::max(sup, v);
    return sup;
}

double bcond_ratio(const RationalMap& map, const std::vector<QuadDifferential>& basis,
                   const MetricModel& model, const BcondGrid& grid, const QuadratureConfig& cfg) {
    const PostcriticalData post = postcritical_set(map);
    if (!post.resolved)
        throw UnresolvedPostcritical("B-condition ratio needs a resolved postcritical set");
    double worst = 0.0;
    for (const QuadDifferential& phi : basis) {
        SphereRule abs_rule;
        abs_rule.z = [&phi](Complex z) { return phi.eval(z); };
        abs_rule.w = [&phi](Complex w) { return phi.eval_wchart(w); };
        const QuadratureResult norm = integrate_l1(
            abs_rule, Region::whole_sphere().with_exclusions(pole_exclusions(phi)), cfg);
        if (!(norm.real() > 0.0)) continue;
        const double sup = bergman_sup_estimate(model, phi, grid, cfg.exec);
        worst = std::max(worst, sup / norm.real());
    }
    return worst;
}

}  // namespace rlab
