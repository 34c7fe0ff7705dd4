#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rlab/ergodic.hpp"
#include "rlab/errors.hpp"
#include "rlab/lattes.hpp"

using namespace rlab;

namespace {

RationalMap zsq_plus_i() {
    return RationalMap(Polynomial{{Complex{0, 1}, Complex{0, 0}, Complex{1, 0}}},
                       Polynomial::constant(1.0));
}

}  // namespace

TEST_CASE("Hamilton-Krushkal family") {
    SUBCASE("unit L1 norms, re-verified by quadrature") {
        for (int k : {0, 5, 20}) {
            const QuadDifferential phi = hk_family(k);
            const auto norm = integrate_l1([&phi](Complex z) { return phi.eval(z); },
                                           Region::disk(Complex{0.0}, 1.0));
            CHECK(norm.converged);
            CHECK(norm.real() == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
    SUBCASE("the numerical constant matches (k+2)/(2 pi)") {
        for (int k : {0, 3, 12}) {
            const QuadDifferential phi = hk_family(k);
            // phi(1) = c_k.
            CHECK(std::abs(phi.eval(Complex{1.0, 0.0}) -
                           Complex{(k + 2.0) / (2.0 * M_PI), 0.0}) < 1e-10);
        }
    }
    SUBCASE("degeneration: compact-set sups decrease and vanish") {
        double prev = 1e300;
        for (int k : {2, 4, 8, 14, 20}) {
            const QuadDifferential phi = hk_family(k);
            const double sup_half = std::abs(phi.eval(Complex{0.5, 0.0}));
            CHECK(sup_half < prev);
            prev = sup_half;
        }
        const double at20 = std::abs(hk_family(20).eval(Complex{0.5, 0.0}));
        CHECK(at20 < 1e-3);
    }
    SUBCASE("alignment pairing equals the norm") {
        const int k = 6;
        const QuadDifferential phi = hk_family(k);
        LineField mu;
        mu.label = "aligned";
        mu.rule = [k](Complex z) {
            if (z == Complex{0.0}) return Complex{0.0};
            Complex num{1.0};
            const Complex u = std::conj(z) / std::abs(z);
            for (int j = 0; j < k; ++j) num *= u;
            return num;
        };
        const auto pr = integrate_complex(
            [&](Complex z) { return mu.eval(z) * phi.eval(z); }, Region::disk(Complex{0.0}, 1.0));
        CHECK(pr.value.real() == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(std::abs(pr.value.imag()) < 1e-8);
    }
}

TEST_CASE("geodesic ray formulas") {
    SUBCASE("t = 0 gives the zero vector") {
        const RayPoint p = ray_point(4, 1.0, 2.0, 1, 0.0);
        CHECK(sup_norm(p.vector) == 0.0);
    }
    SUBCASE("t <= r gives the constant segment") {
        const RayPoint p = ray_point(4, 0.7, 2.0, 3, 1.5);
        for (const Complex& x : p.vector) CHECK(std::abs(x - Complex{1.05, 0.0}) < 1e-15);
    }
    SUBCASE("the worked value psi_{2,1}(5) = (5,2,2,2)") {
        const RayPoint p = ray_point(4, 1.0, 2.0, 1, 5.0);
        REQUIRE(p.vector.size() == 4);
        CHECK(p.vector[0] == Complex{5.0, 0.0});
        CHECK(p.vector[1] == Complex{2.0, 0.0});
        CHECK(p.vector[2] == Complex{2.0, 0.0});
        CHECK(p.vector[3] == Complex{2.0, 0.0});
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(ray_point(4, 1.0, 2.0, 0, 1.0), IndexOutOfRange);
        CHECK_THROWS_AS(ray_point(4, 1.0, 2.0, 5, 1.0), IndexOutOfRange);
        CHECK_THROWS_AS(ray_point(4, 1.0, 0.5, 1, 1.0), Error);  // r < mu_norm
    }
}

TEST_CASE("ray distance curves") {
    SUBCASE("same index, different r: bounded by |r1-r2| mu with eventual equality") {
        const auto curve = ray_distance_curves(8, 1.0, 2.0, 1, 3.0, 1, {0.0, 1.0, 2.5, 3.0, 5.0, 80.0});
        for (std::size_t i = 0; i < curve.t_values.size(); ++i)
            CHECK(curve.distances[i] <= 1.0 + 1e-12);
        CHECK(curve.distances[3] == doctest::Approx(1.0));   // t = 3.0 = r2
        CHECK(curve.distances[5] == doctest::Approx(1.0));   // stays exactly 1 beyond
        CHECK(curve.distances[0] == 0.0);
    }
    SUBCASE("different indices diverge linearly") {
        const auto curve = ray_distance_curves(8, 1.0, 2.0, 1, 2.0, 2, {10.0});
        CHECK(curve.distances[0] == doctest::Approx(8.0));  // (10 - 2) * 1
    }
}

TEST_CASE("isometry audit") {
    const double mu = 0.8;
    const double r = 2.0;
    SUBCASE("collinear segment t in [0, r]") {
        std::vector<RayPoint> pts;
        for (double t : {0.0, 0.5, 1.0, 1.7, 2.0}) pts.push_back(ray_point(6, mu, r, 2, t));
        CHECK(isometry_ray_audit(pts, mu).max_deviation < 1e-12);
    }
    SUBCASE("segment beyond the bend t in [r, 2r]") {
        std::vector<RayPoint> pts;
        for (double t : {2.0, 2.5, 3.1, 4.0}) pts.push_back(ray_point(6, mu, r, 2, t));
        CHECK(isometry_ray_audit(pts, mu).max_deviation < 1e-12);
    }
    SUBCASE("mixed pairs across the bend") {
        std::vector<RayPoint> pts;
        for (double t : {0.0, 1.0, 1.9, 2.0, 2.6, 3.5, 7.0}) pts.push_back(ray_point(6, mu, r, 2, t));
        CHECK(isometry_ray_audit(pts, mu).max_deviation < 1e-12);
    }
}

TEST_CASE("cesaro decay series") {
    const RationalMap map = zsq_plus_i();
    const auto basis = quadratic_differential_basis(postcritical_set(map));
    REQUIRE(basis.size() == 1);
    const Region region = Region::annulus(Complex{0.0}, 2.0, 4.0);

    SUBCASE("the n = 1 entry is the plain L1 norm of phi on the region") {
        DecayOptions opts;
        opts.grid.radial_cells = 8;
        opts.grid.angular_cells = 16;
        const CesaroSeries series = cesaro_decay(map, basis[0], {1}, region, opts);
        const auto direct = integrate_l1([&](Complex z) { return basis[0].eval(z); }, region);
        CHECK(series.values[0].real() ==
              doctest::Approx(direct.real()).epsilon(5e-3));
    }
    SUBCASE("strict decay over the schedule") {
        const CesaroSeries series = cesaro_decay(map, basis[0], {1, 2, 4, 8, 16}, region, {});
        REQUIRE(series.n_values.size() == 5);
        for (std::size_t i = 1; i < series.values.size(); ++i)
            CHECK(series.values[i].real() < series.values[i - 1].real());
        CHECK(series.values[4].real() < 0.9 * series.values[0].real());
    }
    SUBCASE("series entries are identical across execution policies") {
        DecayOptions ser, par;
        ser.tree.exec = Exec::Serial;
        par.tree.exec = Exec::OpenMP;
        const CesaroSeries a = cesaro_decay(map, basis[0], {1, 2, 4}, region, ser);
        const CesaroSeries b = cesaro_decay(map, basis[0], {1, 2, 4}, region, par);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            CHECK(a.values[i].real() == b.values[i].real());
            CHECK(a.values[i].imag() == b.values[i].imag());
        }
    }
    SUBCASE("schedules must increase strictly") {
        CHECK_THROWS_AS(cesaro_decay(map, basis[0], {2, 2}, region, {}), Error);
    }
    SUBCASE("the Lattes series is constant") {
        const LattesData lat = flexible_lattes(Complex{4.0, 0.0}, Complex{0.0, 0.0});
        DecayOptions opts;
        opts.grid.radial_cells = 1;
        opts.grid.angular_cells = 1;
        opts.tree.node_budget = 1u << 24;
        const CesaroSeries series =
            cesaro_decay(lat.map, lat.canonical_phi, {1, 2, 4, 8}, region, opts);
        const double base = series.values[0].real();
        for (const Complex& v : series.values)
            CHECK(std::abs(v.real() - base) < 1e-5 * base);
    }
}
