#pragma once

#include <cstdint>
#include <vector>

#include "rlab/hyperbolic.hpp"
#include "rlab/quadrature.hpp"

namespace rlab {

/// Mobius map z -> (az + b)/(cz + d).
struct Mobius {
    Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    Complex apply(Complex z) const { return (a * z + b) / (c * z + d); }
    Complex deriv(Complex z) const {
        const Complex den = c * z + d;
        return (a * d - b * c) / (den * den);
    }
    Mobius inverse() const { return {d, -b, -c, a}; }
    bool is_identity() const {
        return a == Complex{1.0} && b == Complex{0.0} && c == Complex{0.0} && d == Complex{1.0};
    }
};

/// The kernel machinery on the unit disk, optionally transported by a
/// Mobius map to a round disk or half-plane. All constants follow the
/// curvature -4 normalization of the hyperbolic density.
class KernelContext {
  public:
    KernelContext() = default;
    explicit KernelContext(Mobius disk_to_domain) : map_(disk_to_domain) {}

    /// K(z, zeta); on the disk (3/2) pi i K_D(z,zeta)^2 with K_D the
    /// classical Bergman kernel [pi (1 - z conj(zeta))^2]^-1. Antisymmetric:
    /// K(zeta, z) = -conj(K(z, zeta)).
    Complex kernel(Complex z, Complex zeta) const;

    /// omega(zeta, z) = lambda^-2(zeta) K(z, zeta).
    Complex omega(Complex zeta, Complex z) const;

    /// w(z) = omega(z, z); |w| = (3 / 2 pi) lambda^2 exactly.
    Complex w_function(Complex z) const;

    /// Hyperbolic density of the domain at z (curvature -4).
    double lambda(Complex z) const;

    /// P(f)(z): the L1 -> Q projection in real-measure form,
    /// (3/pi) integral (1-|v|^2)^2 (1 - u conj(v))^-4 f(v) dm(v) on the disk,
    /// transported through the Mobius map when present. Checks integrability
    /// first when precheck is set and throws NotIntegrable on divergence.
    QuadratureResult project(const PointRule& f, Complex z, const QuadratureConfig& cfg = {},
                             bool precheck = false) const;

    bool is_disk() const { return map_.is_identity(); }
    const Mobius& disk_to_domain() const { return map_; }

    /// Domain membership (open disk, transported).
    bool contains(Complex z) const;

  private:
    Complex to_disk(Complex z) const;
    Mobius map_;  // unit disk -> domain
};

/// Nested compact exhaustion of the disk by closed concentric disks;
/// defaults to radius 1 - 1/n.
class Exhaustion {
  public:
    static Exhaustion default_disks(int n_max);
    static Exhaustion from_radii(std::vector<double> radii);  // must be nested

    int n_max() const { return static_cast<int>(radii_.size()); }
    /// Radius of Y_n, 1-indexed.
    double radius(int n) const;
    /// Lebesgue measure of Y_{n+1} \ Y_n.
    double shell_measure(int n) const;

  private:
    std::vector<double> radii_;
};

/// P_n(f)(z) = chi_{Y_n}(z) P(f)(z).
Complex exhaustion_apply(const KernelContext& ctx, const Exhaustion& exh, int n,
                         const PointRule& f, Complex z, const QuadratureConfig& cfg = {});

struct DefectOptions {
    int probe_count = 5;
    std::uint64_t seed = 0x5eed2024u;
    int sup_grid_angles = 16;
    int sup_grid_rings = 4;
};

/// Two-sided estimate of the restricted defect norm
///   sup { ||P_n f - P f||_L1 : ||f||_L1 = 1, supp f in A }.
/// Lower bound: seeded unit-norm bump-mixture probes. Upper bound: the
/// kernel-norm tail sup_{zeta in A} integral over D \ Y_n of
/// (3/pi)(1-|zeta|^2)^2 |1 - z conj(zeta)|^-4 dm(z).
Interval exhaustion_defect(const KernelContext& ctx, const Exhaustion& exh, int n,
                           const Region& support, const DefectOptions& opts = {},
                           const QuadratureConfig& cfg = {});

}  // namespace rlab
