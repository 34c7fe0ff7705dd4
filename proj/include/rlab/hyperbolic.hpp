#pragma once

#include <vector>

#include "rlab/differentials.hpp"
#include "rlab/quadrature.hpp"
#include "rlab/rational_map.hpp"

namespace rlab {

/// Two-sided estimate for quantities that are only computable as bounds.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Hyperbolic density models on planar domains under the curvature -4
/// normalization (disk density 1 at the origin). Punctured spheres carry
/// honest two-sided bounds instead of a pointwise value.
class MetricModel {
  public:
    enum class Kind { Disk, PuncturedDisk, Annulus, PuncturedSphere };

    static MetricModel disk();
    static MetricModel punctured_disk();
    static MetricModel annulus(double r, double R);
    /// Requires at least 3 distinct punctures (else the domain is not
    /// hyperbolic); at most one puncture may sit at infinity.
    static MetricModel punctured_sphere(std::vector<ExtPoint> punctures);

    Kind kind() const { return kind_; }
    bool bounds_only() const { return kind_ == Kind::PuncturedSphere; }
    const std::vector<ExtPoint>& punctures() const { return punctures_; }

    /// Exact density for the closed-form kinds; throws OutsideDomain beyond
    /// the domain and Error when called on a bounds-only model.
    double density(Complex z) const;

    /// Two-sided density bounds; exact kinds return a collapsed interval.
    /// Punctured spheres combine inscribed punctured disks (upper bound)
    /// with a thrice-punctured-sphere comparison (lower bound).
    Interval density_bounds(Complex z) const;

    /// lambda^2 as used in area integrals; interval semantics as above.
    Interval density_sq_bounds(Complex z) const;

  private:
    Kind kind_ = Kind::Disk;
    double r_ = 0.0, R_ = 0.0;  // annulus radii
    std::vector<ExtPoint> punctures_;
    std::vector<Complex> finite_punctures_;
    bool has_inf_ = false;
    std::vector<double> clearance_;  // distance to the nearest other puncture
    double inf_clearance_ = 0.0;     // in the w = 1/z chart
};

/// Area estimate carrying an interval for bounds-only models (the interval
/// collapses for exact kinds).
struct AreaEstimate {
    Interval area;
    double abs_error_estimate = 0.0;
    std::uint64_t cells_used = 0;
    bool converged = false;
    bool diverging = false;
};

/// Integral of lambda^2 over the region. Divergence (infinite hyperbolic
/// area) is reported through converged/diverging, not thrown.
AreaEstimate hyperbolic_area(const MetricModel& model, const Region& region,
                             const QuadratureConfig& cfg = {});

struct BcondGrid {
    int bulk_rings = 12;       // polar rings on each chart disk
    int bulk_angles = 24;
    int puncture_levels = 18;  // dyadic annuli toward each puncture
    int puncture_angles = 12;
};

/// Upper estimate of sup lambda^-2 |phi| / ||phi||_1 over the basis: the sup
/// uses the lower density bound (so the ratio is an upper estimate), the
/// norm comes from integrate_l1. Throws UnresolvedPostcritical when the
/// postcritical set is not resolved.
double bcond_ratio(const RationalMap& map, const std::vector<QuadDifferential>& basis,
                   const MetricModel& model, const BcondGrid& grid = {},
                   const QuadratureConfig& cfg = {});

/// The grid-sup of lambda^-2 |phi| alone (shared by bcond_ratio and tests).
double bergman_sup_estimate(const MetricModel& model, const QuadDifferential& phi,
                            const BcondGrid& grid, Exec exec = Exec::OpenMP);

}  // namespace rlab
