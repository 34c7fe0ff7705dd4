#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rlab/differentials.hpp"
#include "rlab/quadrature.hpp"
#include "rlab/rational_map.hpp"

namespace rlab {

struct TreeOptions {
    std::uint64_t node_budget = 1u << 22;
    double prune_eps = 0.0;  // 0 = pruning off
    double crit_tol = kCriticalZone;
    double pole_tol = 1e-11;
    Exec exec = Exec::OpenMP;
};

/// Accounting for a preimage-tree evaluation; the pruned-mass bound is a
/// coarse sup-based estimate and is only meaningful when pruning is on.
struct TreeReport {
    std::uint64_t nodes = 0;
    std::uint64_t pruned_branches = 0;
    double pruned_weight = 0.0;
    double pruned_mass_bound = 0.0;
};

/// Cached evaluator for a single application (R* phi)(z): critical values,
/// pole lists, and closed-form fiber paths are prepared once.
class RuelleOperator {
  public:
    RuelleOperator(const RationalMap& map, QuadDifferential phi,
                   double crit_tol = kCriticalZone, double pole_tol = 1e-11);

    Complex operator()(Complex z) const;

    const RationalMap& map() const { return map_; }
    const QuadDifferential& phi() const { return phi_; }

  private:
    RationalMap map_;
    QuadDifferential phi_;
    double crit_tol_, pole_tol_;
    std::vector<Complex> finite_crit_values_;
    std::vector<Complex> finite_poles_;
    bool pole_at_inf_ = false;
    Polynomial rev_num_, rev_den_;  // for the branch through infinity
};

/// (R*)^i phi(z) for i = 0..n off one shared preimage tree with d^n leaves,
/// deterministic lexicographic branch order and compensated level sums.
std::vector<Complex> ruelle_powers(const RationalMap& map, const QuadDifferential& phi, int n,
                                   Complex z, const TreeOptions& opts = {},
                                   TreeReport* report = nullptr);

/// Single application; throws CriticalFiber within crit_tol of a critical
/// value and PoleHit when a preimage lands near a pole of phi.
Complex ruelle_apply(const RationalMap& map, const QuadDifferential& phi, Complex z,
                     double crit_tol = kCriticalZone, double pole_tol = 1e-11);

Complex ruelle_power(const RationalMap& map, const QuadDifferential& phi, int n, Complex z,
                     const TreeOptions& opts = {}, TreeReport* report = nullptr);

/// (1/n) sum_{i<n} (R*)^i phi(z); levels are shared across i.
Complex cesaro_average(const RationalMap& map, const QuadDifferential& phi, int n, Complex z,
                       const TreeOptions& opts = {});

/// Bel(mu)(z) = mu(R(z)) conj(R'(z))/R'(z); throws CriticalPoint when
/// |R'(z)| < tol.
Complex beltrami_pullback(const RationalMap& map, const LineField& mu, Complex z,
                          double tol = 1e-12);

/// Total version for integration: 0 at critical points and poles (a measure
/// zero set); unit derivative factors are computed phase-stably near poles
/// and infinity.
LineField pullback_field(const RationalMap& map, const LineField& mu);

/// Forward-orbit average (1/n) sum mu(R^i(z)) conj((R^i)')/(R^i)'.
Complex cesaro_beltrami(const RationalMap& map, const LineField& mu, int n, Complex z,
                        double tol = 1e-12);

/// | integral Bel(mu) phi dm  -  integral mu R*(phi) dm | over the sphere.
double duality_residual(const RationalMap& map, const LineField& mu, const QuadDifferential& phi,
                        const QuadratureConfig& cfg = {});

/// The conjugated system S = 1/R(1/w) (the map in the w = 1/z chart).
RationalMap conjugated_by_inversion(const RationalMap& map);

/// Two-chart rule for z -> (R* phi)(z); the w chart rides on the conjugated
/// system so fibers stay at moderate magnitudes. The w rule is the
/// transported differential (S* phi_w)(w) = (R* phi)(1/w) w^-4, which meets
/// the SphereRule contract in modulus (L1 use) while carrying the
/// quadratic-differential phase; pair it with a w-transported Beltrami field
/// for complex integrals, as duality_residual does.
SphereRule ruelle_image_rule(const RationalMap& map, const QuadDifferential& phi,
                             double crit_tol = kCriticalZone, double pole_tol = 1e-11);

/// Exclusions for integrating R* phi over the sphere: critical values (with
/// an evaluability cutoff), poles of phi, and their images.
std::vector<Exclusion> transfer_exclusions(const RationalMap& map, const QuadDifferential& phi,
                                           double radius = 0.03, double crit_cutoff = 2e-6);

}  // namespace rlab
