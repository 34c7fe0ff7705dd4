#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rlab/errors.hpp"
#include "rlab/hyperbolic.hpp"
#include "rlab/lattes.hpp"

using namespace rlab;

TEST_CASE("closed-form densities under the curvature -4 convention") {
    const MetricModel disk = MetricModel::disk();
    CHECK(disk.density(Complex{0.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(disk.density(Complex{0.5, 0.0}) == doctest::Approx(1.0 / 0.75).epsilon(1e-15));
    CHECK_THROWS_AS(disk.density(Complex{1.1, 0.0}), OutsideDomain);

    const MetricModel pd = MetricModel::punctured_disk();
    CHECK(pd.density(Complex{std::exp(-1.0), 0.0}) ==
          doctest::Approx(std::exp(1.0) / 2.0).epsilon(1e-14));
    CHECK_THROWS_AS(pd.density(Complex{0.0}), OutsideDomain);

    // Annulus at the geometric mean radius: lambda = pi / (2 L |z|).
    const MetricModel an = MetricModel::annulus(0.5, 2.0);
    const double L = std::log(4.0);
    CHECK(an.density(Complex{1.0, 0.0}) == doctest::Approx(M_PI / (2.0 * L)).epsilon(1e-14));
}

TEST_CASE("domain monotonicity: smaller domain, larger density") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    const MetricModel disk = MetricModel::disk();
    const MetricModel pd = MetricModel::punctured_disk();
    for (int i = 0; i < 200; ++i) {
        const double r = unif(rng);
        const double th = 2.0 * M_PI * unif(rng);
        const Complex z = r * Complex{std::cos(th), std::sin(th)};
        CHECK(pd.density(z) >= disk.density(z));
    }
}

TEST_CASE("punctured-sphere bounds") {
    const MetricModel m = MetricModel::punctured_sphere(
        {ExtPoint{Complex{0.0}}, ExtPoint{Complex{1.0, 0.0}}, ExtPoint::infinity()});
    SUBCASE("lower <= upper, both positive, at random points") {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> unif(-3.0, 3.0);
        int used = 0;
        while (used < 1000) {
            const Complex z{unif(rng), unif(rng)};
            if (std::abs(z) < 1e-6 || std::abs(z - Complex{1.0, 0.0}) < 1e-6) continue;
            const Interval b = m.density_bounds(z);
            CHECK(b.lower > 0.0);
            CHECK(b.lower <= b.upper);
            ++used;
        }
    }
    SUBCASE("the sandwich is tight near a puncture") {
        const Interval b = m.density_bounds(Complex{1e-6, 0.0});
        CHECK(b.lower > 0.0);
        CHECK(b.upper / b.lower < 10.0);
    }
    SUBCASE("exact models bracket the punctured-sphere density") {
        // C \ {0,1} sits inside the punctured disk of radius 1 about 0.
        const MetricModel pd = MetricModel::punctured_disk();
        for (double r : {1e-4, 1e-3, 1e-2, 0.5}) {
            const Complex z{r, 0.0};
            CHECK(m.density_bounds(z).lower <= pd.density(z) * (1.0 + 1e-12));
        }
    }
    SUBCASE("needs at least three punctures") {
        CHECK_THROWS_AS(
            MetricModel::punctured_sphere({ExtPoint{Complex{0.0}}, ExtPoint::infinity()}), Error);
    }
}

TEST_CASE("hyperbolic areas") {
    SUBCASE("disk model over disk(0, 1/2) is pi/3") {
        const auto est = hyperbolic_area(MetricModel::disk(), Region::disk(Complex{0.0}, 0.5));
        CHECK(est.converged);
        CHECK(est.area.lower == doctest::Approx(M_PI / 3.0).epsilon(1e-8));
        CHECK(est.area.upper == doctest::Approx(M_PI / 3.0).epsilon(1e-8));
    }
    SUBCASE("full disk diverges") {
        const auto est = hyperbolic_area(MetricModel::disk(), Region::disk(Complex{0.0}, 1.0));
        CHECK(!est.converged);
        CHECK(est.diverging);
    }
    SUBCASE("punctured-disk annulus has area pi/4") {
        const auto est = hyperbolic_area(MetricModel::punctured_disk(),
                                         Region::annulus(Complex{0.0}, std::exp(-2.0), std::exp(-1.0)));
        CHECK(est.converged);
        CHECK(est.area.lower == doctest::Approx(M_PI / 4.0).epsilon(1e-8));
    }
    SUBCASE("additivity over disjoint annuli") {
        const MetricModel disk = MetricModel::disk();
        const double whole =
            hyperbolic_area(disk, Region::disk(Complex{0.0}, 0.6)).area.lower;
        const double inner =
            hyperbolic_area(disk, Region::disk(Complex{0.0}, 0.3)).area.lower;
        const double outer =
            hyperbolic_area(disk, Region::annulus(Complex{0.0}, 0.3, 0.6)).area.lower;
        CHECK(std::abs(whole - inner - outer) < 2e-6);
    }
}

TEST_CASE("B-condition ratio") {
    const RationalMap zi(Polynomial{{Complex{0, 1}, Complex{0, 0}, Complex{1, 0}}},
                         Polynomial::constant(1.0));
    const PostcriticalData post = postcritical_set(zi);
    const auto basis = quadratic_differential_basis(post);
    REQUIRE(basis.size() == 1);
    const MetricModel model = MetricModel::punctured_sphere(post.points);

    SUBCASE("finite and stable under 4x grid refinement") {
        const double r1 = bcond_ratio(zi, basis, model);
        BcondGrid fine;
        fine.bulk_rings = 24;
        fine.bulk_angles = 48;
        fine.puncture_levels = 22;
        fine.puncture_angles = 24;
        const double r2 = bcond_ratio(zi, basis, model, fine);
        CHECK(std::isfinite(r1));
        CHECK(r1 > 0.0);
        CHECK(std::abs(r2 - r1) <= 0.2 * std::max(r1, r2));
    }
    SUBCASE("scale invariance") {
        const double r1 = bcond_ratio(zi, basis, model);
        const std::vector<QuadDifferential> scaled{basis[0].scaled(Complex{10.0, 0.0})};
        const double r2 = bcond_ratio(zi, scaled, model);
        CHECK(std::abs(r1 - r2) < 1e-10 * std::max(1.0, r1));
    }
    SUBCASE("Lattes basis ratio is finite") {
        const LattesData lat = flexible_lattes(Complex{4.0, 0.0}, Complex{0.0, 0.0});
        const PostcriticalData lpost = postcritical_set(lat.map);
        const auto lbasis = quadratic_differential_basis(lpost);
        const MetricModel lmodel = MetricModel::punctured_sphere(lpost.points);
        const double r = bcond_ratio(lat.map, lbasis, lmodel);
        CHECK(std::isfinite(r));
        CHECK(r > 0.0);
    }
    SUBCASE("unresolved postcritical sets are rejected") {
        // Generic quadratic with an (almost surely) infinite critical orbit.
        const RationalMap generic(
            Polynomial{{Complex{0.2311, 0.417}, Complex{0, 0}, Complex{1, 0}}},
            Polynomial::constant(1.0));
        CHECK_THROWS_AS(bcond_ratio(generic, basis, model), UnresolvedPostcritical);
    }
}
