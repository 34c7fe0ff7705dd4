#pragma once

#include <vector>

#include "rlab/differentials.hpp"
#include "rlab/rational_map.hpp"
#include "rlab/transfer.hpp"

namespace rlab {

/// A flexible Lattes map built from Weierstrass invariants, with its branch
/// data and the canonical fixed quadratic differential.
struct LattesData {
    Complex g2{0.0}, g3{0.0};
    RationalMap map;
    std::vector<ExtPoint> branch_points;  // e1, e2, e3, infinity
    QuadDifferential canonical_phi;
};

/// Degree-4 map from the duplication formula
///   R(z) = (z^4 + (g2/2) z^2 + 2 g3 z + g2^2/16) / (4 z^3 - g2 z - g3).
/// The construction validates itself: the postcritical set must resolve to
/// the branch points, and the canonical differential must be fixed by the
/// Ruelle operator at probe points. Throws DegenerateInvariants when the
/// discriminant g2^3 - 27 g3^2 vanishes.
LattesData flexible_lattes(Complex g2, Complex g3);

/// 1 / prod (z - e_i) over the finite branch points; exactly four points,
/// at most one at infinity (BadPointCount otherwise).
QuadDifferential canonical_quad_diff(const std::vector<ExtPoint>& branch_points);

/// mu = conj(phi)/|phi| (0 on the zero set of phi).
LineField invariant_line_field(const QuadDifferential& phi);

/// dim Q(S_R) for a finitely punctured sphere: max(0, #punctures - 3).
int q_dimension(const PostcriticalData& post);

/// Monomial-over-product basis of Q(S_R): z^j / prod (z - p_i) over the
/// finite punctures, j = 0 .. dim-1 (the product runs over all punctures
/// when infinity is not one, so every element decays like z^-4 there).
std::vector<QuadDifferential> quadratic_differential_basis(const PostcriticalData& post);

struct LattesCheck {
    bool applicable = false;  // false when dim Q = 0
    double residual = 0.0;
    int dim = 0;
};

struct LattesCheckOptions {
    int probe_count = 48;
    int search_samples = 200;  // unit coefficient vectors when dim > 1
    std::uint64_t seed = 0x1a77e5u;
};

/// Numerical Lattes classifier: the minimum over unit basis combinations of
/// max-probe |R* phi - phi| / max |phi|. Near zero flags a Lattes candidate.
LattesCheck lattes_residual(const RationalMap& map, const std::vector<QuadDifferential>& basis,
                            const LattesCheckOptions& opts = {});

}  // namespace rlab
