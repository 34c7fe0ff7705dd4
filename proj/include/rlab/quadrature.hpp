#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rlab/differentials.hpp"
#include "rlab/kernels.hpp"

namespace rlab {

/// Pointwise rule in one chart.
using PointRule = std::function<Complex(Complex)>;

/// An integrand on the sphere: the z-chart rule plus the w = 1/z chart rule.
/// Contract: w(omega) == z(1/omega) / |omega|^4 as area densities. The
/// adapter below derives the w rule mechanically; transfer integrands supply
/// an analytically transformed rule instead to stay overflow-free.
struct SphereRule {
    PointRule z;
    PointRule w;
};

SphereRule make_sphere_rule(PointRule z_rule);

/// A declared singular or excluded point. The integrator carves the disk of
/// the given radius out of the bulk cells and re-covers it with a polar patch
/// (r-weighted, so simple poles integrate cleanly) down to inner_cutoff.
/// Mass inside the cutoff is estimated from the innermost ring and added to
/// the error. inner_cutoff == radius cuts the zone out entirely.
/// For the point at infinity, radii are measured in the w = 1/z chart.
struct Exclusion {
    ExtPoint point;
    double radius = 0.05;
    double inner_cutoff = 0.0;
};

/// Integration region on the sphere. Disk and annulus regions are handled in
/// polar coordinates about their center; the whole sphere splits into the
/// |z| <= 2 chart and the |w| < 1/2 chart.
struct Region {
    enum class Kind { Empty, WholeSphere, Disk, Annulus, ComplementOfDisks, GridMask };

    Kind kind = Kind::WholeSphere;
    Complex center{0.0};
    double r0 = 0.0, r1 = 0.0;                        // disk/annulus radii
    std::vector<std::pair<Complex, double>> holes;    // complement-of-disks
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;            // grid-mask bounding box
    int nx = 0, ny = 0;
    std::vector<char> mask;                           // row-major, ny rows of nx
    std::vector<Exclusion> exclusions;

    static Region empty();
    static Region whole_sphere();
    static Region disk(Complex center, double radius);
    static Region annulus(Complex center, double inner, double outer);
    static Region complement_of_disks(std::vector<std::pair<Complex, double>> removed);
    static Region grid_mask(double x0, double x1, double y0, double y1, int nx, int ny,
                            std::vector<char> mask);

    Region with_exclusions(std::vector<Exclusion> ex) const;
};

struct QuadratureConfig {
    double tol = 1e-6;                   // absolute error target
    std::uint64_t cell_budget = 1u << 22;
    int max_depth = 44;
    Exec exec = Exec::OpenMP;
};

struct QuadratureResult {
    Complex value{0.0};
    double abs_error_estimate = 0.0;
    std::uint64_t cells_used = 0;
    bool converged = false;
    bool diverging = false;  // budget ran out with growing partial sums

    double real() const { return value.real(); }
};

/// Adaptive L1 integral of |f| over the region. Divergence is reported as
/// converged = false with the diverging flag set; a budget exhausted while
/// still settling throws BudgetExceeded.
QuadratureResult integrate_l1(const SphereRule& f, const Region& region,
                              const QuadratureConfig& cfg = {});
QuadratureResult integrate_l1(const PointRule& f, const Region& region,
                              const QuadratureConfig& cfg = {});

/// Complex-valued integral of f over the region (same machinery, no modulus).
QuadratureResult integrate_complex(const SphereRule& f, const Region& region,
                                   const QuadratureConfig& cfg = {});
QuadratureResult integrate_complex(const PointRule& f, const Region& region,
                                   const QuadratureConfig& cfg = {});

/// The pairing integral of phi against mu over a region.
QuadratureResult pairing(const LineField& mu, const QuadDifferential& phi, const Region& region,
                         const QuadratureConfig& cfg = {});

/// Certified lower bound for the Teichmuller norm of mu: the max of
/// |pairing(mu, phi)| over an L1-normalized finite basis.
double teich_lower_bound(const LineField& mu, const std::vector<QuadDifferential>& basis,
                         const QuadratureConfig& cfg = {});

/// Exclusions covering the poles of phi, sized for whole-sphere integrals.
std::vector<Exclusion> pole_exclusions(const QuadDifferential& phi, double radius = 0.05,
                                       double inner_cutoff = 0.0);

}  // namespace rlab
