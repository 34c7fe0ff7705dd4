#pragma once

#include <vector>

#include "rlab/differentials.hpp"
#include "rlab/quadrature.hpp"
#include "rlab/transfer.hpp"

namespace rlab {

/// Partition used for the Cesaro-norm estimates: a fixed polar grid whose
/// nodes are shared by every n in the schedule, so the series is directly
/// comparable across n. Deep trees (large degree and n) force coarse grids;
/// the error estimate reports the coarseness honestly.
struct DecayGrid {
    int radial_cells = 4;
    int angular_cells = 8;
};

struct DecayOptions {
    DecayGrid grid;
    TreeOptions tree;
};

/// Series n -> estimate of the L1 norm of C_n(phi) over the region, all
/// entries evaluated on one shared preimage tree per grid node.
CesaroSeries cesaro_decay(const RationalMap& map, const QuadDifferential& phi,
                          const std::vector<int>& n_schedule, const Region& region,
                          const DecayOptions& opts = {});

/// Hamilton-Krushkal family on the disk: phi_k = c_k zeta^k with c_k fixed
/// numerically (one radial integral) so that the L1 norm on the disk is 1.
QuadDifferential hk_family(int k);

/// A point on the truncated geodesic ray psi_{r,i} in the sup-norm model:
/// t*m for t <= r, r*m + (t - r)*mu_norm*e_i for t > r, where m is the
/// constant vector with value mu_norm.
struct RayPoint {
    std::vector<Complex> vector;
    double t = 0.0;
};

RayPoint ray_point(int N, double mu_norm, double r, int i, double t);

double sup_norm(const std::vector<Complex>& v);

struct RayCurve {
    std::vector<double> t_values;
    std::vector<double> distances;  // sup-norm distance per t
};

/// Distance curve between psi_{r1,i1} and psi_{r2,i2} along a t schedule:
/// bounded by |r1 - r2| mu_norm for equal indices, asymptotically linear of
/// slope mu_norm for distinct ones.
RayCurve ray_distance_curves(int N, double mu_norm, double r1, int i1, double r2, int i2,
                             const std::vector<double>& t_schedule);

struct RayAuditReport {
    double max_deviation = 0.0;
    int pairs = 0;
};

/// Constant-speed check for samples of a single ray: the sup-norm distance
/// of any two samples must equal |t1 - t2| * mu_norm.
RayAuditReport isometry_ray_audit(const std::vector<RayPoint>& points, double mu_norm);

}  // namespace rlab
