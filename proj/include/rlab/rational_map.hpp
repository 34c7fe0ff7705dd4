#pragma once

#include <utility>
#include <vector>

#include "rlab/polynomial.hpp"
#include "rlab/roots.hpp"

namespace rlab {

/// Default merge tolerance (chordal metric) for postcritical point sets.
inline constexpr double kPostcriticalTol = 1e-9;

/// Exclusion radius around critical values inside which preimage fibers are
/// treated as critical (the Ruelle sum presumes simple fibers).
inline constexpr double kCriticalZone = 1e-6;

/// A preimage fiber R^{-1}(target) with multiplicities.
struct Fiber {
    std::vector<std::pair<ExtPoint, int>> roots;  // (point, multiplicity)
    ExtPoint target;
    double residual = 0.0;   // max chordal |R(root) - target|
    bool has_multiple = false;  // some cluster has multiplicity > 1

    int total_multiplicity() const {
        int s = 0;
        for (const auto& r : roots) s += r.second;
        return s;
    }
};

/// Forward orbits of the critical values, merged within tolerance.
struct PostcriticalData {
    std::vector<ExtPoint> points;
    bool resolved = false;  // every orbit entered a detected cycle
    int depth_used = 0;
};

/// A rational map R = P/Q on the extended plane, held as a pair of
/// coefficient lists. Immutable after construction; all operations are pure.
class RationalMap {
  public:
    /// Validates nonzero leading coefficients and screens for common roots
    /// (resultant-style check: den roots must not annihilate num).
    RationalMap(Polynomial num, Polynomial den, double coprime_tol = 1e-8);

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    int degree() const { return degree_; }

    /// Total extended-plane evaluation; poles map to infinity, points beyond
    /// |z| = 1e8 are evaluated through the w = 1/z chart.
    ExtPoint eval(const ExtPoint& z) const;

    /// Derivative value at a finite point; infinite at poles.
    ExtPoint derivative_at(Complex z) const;

    /// R' as a rational map, (P'Q - PQ')/Q^2 with detected common factors at
    /// multiple poles divided out.
    RationalMap derivative() const;

  private:
    Polynomial num_, den_;
    Polynomial dnum_, dden_;  // cached coefficient lists of P', Q'
    int degree_;
};

/// Critical points with Riemann-Hurwitz multiplicities (local degree - 1),
/// including the point at infinity when critical. The multiplicity sum is
/// checked against 2 deg - 2; RootSolveFailure otherwise.
std::vector<std::pair<ExtPoint, int>> critical_points(const RationalMap& map);

/// Images of the critical points, deduplicated within chordal tol.
std::vector<ExtPoint> critical_values(const RationalMap& map, double tol = kPostcriticalTol);

/// Breadth-first closure of the critical-value orbits; points merged within
/// chordal tol. Never throws: an unresolved truncation is reported, not an
/// error.
PostcriticalData postcritical_set(const RationalMap& map, int max_depth = 64,
                                  double tol = kPostcriticalTol);

/// Preimage fiber by simultaneous root-finding of P(w) - z Q(w), switched to
/// the 1/R chart for targets near infinity. Multiplicities from clustering;
/// their sum always equals deg R.
Fiber preimages(const RationalMap& map, const ExtPoint& target, double tol = 1e-12);

}  // namespace rlab
