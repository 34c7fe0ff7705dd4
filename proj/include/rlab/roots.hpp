#pragma once

#include <vector>

#include "rlab/polynomial.hpp"

namespace rlab {

/// A cluster of nearby roots interpreted as one root with multiplicity.
struct RootCluster {
    Complex center{0.0};
    int multiplicity = 1;
    double radius = 0.0;  // max distance of members to the center
};

struct RootSolveOptions {
    double tol = 1e-12;       // correction/residual target, relative to root scale
    int max_iter = 200;       // Aberth sweeps per restart
    int max_restarts = 4;     // perturbed restarts before giving up
    bool polish = true;       // Newton-polish closed-form roots
    unsigned long long seed = 0x5eed5eedULL;  // restart perturbation seed
};

/// All roots of p (degree >= 1), unclustered, in deterministic lexicographic
/// order. Closed forms are used through degree 4 (with Newton polish);
/// higher degrees run Aberth-Ehrlich simultaneous iteration with seeded
/// perturbation restarts. Throws RootSolveFailure on non-convergence.
std::vector<Complex> solve_roots(const Polynomial& p, const RootSolveOptions& opts = {});

/// Greedy single-link clustering of a root list into multiple roots: a
/// cluster of size m is accepted while its radius stays below
/// scale * tol^(1/m).
std::vector<RootCluster> cluster_roots(std::vector<Complex> roots, double tol);

/// solve_roots + cluster_roots.
std::vector<RootCluster> solve_clustered(const Polynomial& p, double cluster_tol,
                                         const RootSolveOptions& opts = {});

// Allocation-free closed forms on full ascending coefficient arrays
// (leading coefficient nonzero). These are the inner-loop workhorses of the
// preimage-tree kernels; the vector overloads below wrap them.
void solve_quadratic_arr(const Complex c[3], Complex out[2]);
void solve_cubic_arr(const Complex c[4], Complex out[3]);
void solve_quartic_arr(const Complex c[5], Complex out[4]);

std::vector<Complex> solve_quadratic(Complex c0, Complex c1, Complex c2);
std::vector<Complex> solve_cubic(Complex c0, Complex c1, Complex c2, Complex c3);
std::vector<Complex> solve_quartic(Complex c0, Complex c1, Complex c2, Complex c3, Complex c4);

}  // namespace rlab
