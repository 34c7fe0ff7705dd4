#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rlab/roots.hpp"

using namespace rlab;

namespace {

double fiber_residual(const Polynomial& p, const std::vector<Complex>& roots) {
    double worst = 0.0;
    const double scale = p.coeff_scale();
    for (Complex r : roots) {
        const double grow = std::pow(1.0 + std::abs(r), p.degree());
        worst = std::max(worst, std::abs(p.eval(r)) / (scale * grow));
    }
    return worst;
}

}  // namespace

TEST_CASE("closed forms match known roots") {
    auto qs = solve_quadratic({-4.0, 0.0}, {0.0, 0.0}, {1.0, 0.0});  // z^2 - 4
    std::sort(qs.begin(), qs.end(), [](Complex a, Complex b) { return lex_less(a, b); });
    CHECK(std::abs(qs[0] - Complex{-2.0, 0.0}) < 1e-14);
    CHECK(std::abs(qs[1] - Complex{2.0, 0.0}) < 1e-14);

    // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
    auto cs = solve_cubic({-6, 0}, {11, 0}, {-6, 0}, {1, 0});
    std::sort(cs.begin(), cs.end(), [](Complex a, Complex b) { return lex_less(a, b); });
    CHECK(std::abs(cs[0] - Complex{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(cs[1] - Complex{2.0, 0.0}) < 1e-12);
    CHECK(std::abs(cs[2] - Complex{3.0, 0.0}) < 1e-12);

    // roots i, -i, 2, -2: (z^2+1)(z^2-4) = z^4 - 3z^2 - 4
    auto fs = solve_quartic({-4, 0}, {0, 0}, {-3, 0}, {0, 0}, {1, 0});
    Polynomial p{{Complex{-4, 0}, Complex{0, 0}, Complex{-3, 0}, Complex{0, 0}, Complex{1, 0}}};
    CHECK(fiber_residual(p, fs) < 1e-12);
}

TEST_CASE("solve_roots handles origin roots and sorts deterministically") {
    // z^3 (z - 1)
    Polynomial p{{Complex{0}, Complex{0}, Complex{0}, Complex{-1}, Complex{1}}};
    const auto roots = solve_roots(p);
    REQUIRE(roots.size() == 4);
    CHECK(std::abs(roots[0]) < 1e-15);
    CHECK(std::abs(roots[1]) < 1e-15);
    CHECK(std::abs(roots[2]) < 1e-15);
    CHECK(std::abs(roots[3] - Complex{1.0, 0.0}) < 1e-12);
}

TEST_CASE("random polynomials through degree 9: residuals and coefficient recovery") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int deg = 2 + trial % 8;
        std::vector<Complex> roots_true(static_cast<std::size_t>(deg));
        for (auto& r : roots_true) r = Complex{unif(rng), unif(rng)};
        const Polynomial p = Polynomial::from_roots(roots_true, Complex{1.3, -0.4});
        const auto roots = solve_roots(p);
        REQUIRE(roots.size() == roots_true.size());
        CHECK(fiber_residual(p, roots) < 1e-9);
        // Elementary symmetric check: reconstructed polynomial matches.
        const Polynomial q = Polynomial::from_roots(roots, p.lead());
        for (int k = 0; k <= deg; ++k)
            CHECK(std::abs(q[static_cast<std::size_t>(k)] - p[static_cast<std::size_t>(k)]) <
                  1e-7 * (1.0 + p.coeff_scale()));
    }
}

TEST_CASE("clustering detects multiplicities") {
    // (z - 1)^2 (z + 1): double root at 1.
    Polynomial p = Polynomial::from_roots({{1, 0}, {1, 0}, {-1, 0}});
    const auto clusters = solve_clustered(p, 1e-12);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].multiplicity == 1);
    CHECK(std::abs(clusters[0].center - Complex{-1.0, 0.0}) < 1e-10);
    CHECK(clusters[1].multiplicity == 2);
    CHECK(std::abs(clusters[1].center - Complex{1.0, 0.0}) < 1e-6);
}

TEST_CASE("clustering keeps distinct nearby roots apart") {
    const Complex a{0.5, 0.0}, b{0.5 + 2e-3, 0.0};
    Polynomial p = Polynomial::from_roots({a, b});
    const auto clusters = solve_clustered(p, 1e-12);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].multiplicity == 1);
    CHECK(clusters[1].multiplicity == 1);
}

TEST_CASE("aberth path agrees with closed forms") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Complex> coeffs(5);
        for (auto& c : coeffs) c = Complex{unif(rng), unif(rng)};
        coeffs[4] += Complex{2.0, 0.0};  // keep the lead well away from zero
        Polynomial p{coeffs};
        RootSolveOptions opts;
        opts.polish = false;
        const auto closed = solve_quartic(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]);
        const auto all = solve_roots(p, opts);
        for (Complex c : closed) {
            double best = 1e300;
            for (Complex r : all) best = std::min(best, std::abs(c - r));
            CHECK(best < 1e-7);
        }
    }
}
