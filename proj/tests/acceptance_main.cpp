// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. Usage: acceptance <rlab-binary> <output-dir>
//
// Criteria 5 and 10 drive the command-line tool on generated experiment
// files so that the emitted CSV artifacts themselves are what is checked.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rlab/bergman.hpp"
#include "rlab/ergodic.hpp"
#include "rlab/errors.hpp"
#include "rlab/hyperbolic.hpp"
#include "rlab/io.hpp"
#include "rlab/lattes.hpp"
#include "rlab/quadrature.hpp"
#include "rlab/transfer.hpp"

using namespace rlab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail, double seconds) {
    std::printf("[%s] %-14s %s (%.1f s)\n", ok ? "PASS" : "FAIL", name, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

RationalMap zsq_plus_i() {
    return RationalMap(Polynomial{{Complex{0, 1}, Complex{0, 0}, Complex{1, 0}}},
                       Polynomial::constant(1.0));
}

// Regular grid points: an offset lattice filtered away from the given
// centers, truncated to exactly `count` points.
std::vector<Complex> regular_grid(int count, double extent, const std::vector<Complex>& avoid,
                                  double clearance) {
    std::vector<Complex> pts;
    const int side = static_cast<int>(std::ceil(std::sqrt(count * 1.4))) + 2;
    for (int i = 0; i < side && static_cast<int>(pts.size()) < count; ++i)
        for (int j = 0; j < side && static_cast<int>(pts.size()) < count; ++j) {
            const Complex z{-extent + 2.0 * extent * (i + 0.5) / side + 0.013,
                            -extent + 2.0 * extent * (j + 0.5) / side + 0.007};
            bool ok = true;
            for (Complex c : avoid) ok = ok && std::abs(z - c) > clearance;
            if (ok) pts.push_back(z);
        }
    return pts;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& cmd) { return std::system(cmd.c_str()); }

// --------------------------------------------------------------------------

void criterion1_lattes_fixed_point(const LattesData& lat) {
    const double t0 = omp_get_wtime();
    std::vector<Complex> avoid;
    for (const ExtPoint& v : critical_values(lat.map))
        if (!v.is_inf()) avoid.push_back(v.value);
    for (const Pole& p : lat.canonical_phi.poles())
        if (!p.location.is_inf()) avoid.push_back(p.location.value);
    const auto grid = regular_grid(400, 2.2, avoid, 5e-2);

    double worst = 0.0;
    bool grid_ok = grid.size() == 400;
    const RuelleOperator op(lat.map, lat.canonical_phi);
    for (Complex z : grid) {
        const Complex lhs = op(z);
        const Complex rhs = lat.canonical_phi.eval(z);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    const double dt = omp_get_wtime() - t0;
    report("criterion-1", grid_ok && worst < 1e-6 && dt < 10.0,
           "Lattes fixed point: max |R*phi - phi|/|phi| = " + fmt(worst) + " over 400 points",
           dt);
}

void criterion2_beltrami(const LattesData& lat) {
    const double t0 = omp_get_wtime();
    const LineField mu_lat = invariant_line_field(lat.canonical_phi);
    std::vector<Complex> avoid{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1},
                               {2.414213562, 0}, {-2.414213562, 0}, {0.414213562, 0},
                               {-0.414213562, 0}};
    const auto grid = regular_grid(100, 1.95, avoid, 5e-2);

    double worst_lat = 0.0;
    for (Complex z : grid)
        worst_lat = std::max(worst_lat,
                             std::abs(beltrami_pullback(lat.map, mu_lat, z) - mu_lat.eval(z)));

    const RationalMap zi = zsq_plus_i();
    const auto basis = quadratic_differential_basis(postcritical_set(zi));
    const LineField mu_zi = invariant_line_field(basis[0]);
    double worst_zi = 0.0;
    for (Complex z : grid)
        worst_zi =
            std::max(worst_zi, std::abs(beltrami_pullback(zi, mu_zi, z) - mu_zi.eval(z)));

    const double dt = omp_get_wtime() - t0;
    report("criterion-2",
           grid.size() == 100 && worst_lat < 1e-7 && worst_zi > 0.1 && dt < 5.0,
           "Beltrami invariance: Lattes max " + fmt(worst_lat) + ", z^2+i max " + fmt(worst_zi),
           dt);
}

void criterion3_duality(const LattesData& lat) {
    const double t0 = omp_get_wtime();
    const RationalMap zi = zsq_plus_i();
    const auto basis = quadratic_differential_basis(postcritical_set(zi));
    LineField smooth;
    smooth.label = "smooth";
    smooth.rule = [](Complex z) {
        return 0.6 * std::exp(Complex{0.0, 0.2}) * std::conj(z) / (1.0 + std::norm(z));
    };
    struct Triple {
        const RationalMap* map;
        LineField mu;
        const QuadDifferential* phi;
    };
    const Triple triples[5] = {
        {&lat.map, invariant_line_field(lat.canonical_phi), &lat.canonical_phi},
        {&lat.map, LineField::constant(Complex{0.5, 0.2}, "const"), &lat.canonical_phi},
        {&zi, invariant_line_field(basis[0]), &basis[0]},
        {&zi, smooth, &basis[0]},
        {&zi, LineField::constant(Complex{-0.3, 0.6}, "const"), &basis[0]},
    };
    double worst = 0.0;
    for (const Triple& t : triples)
        worst = std::max(worst, duality_residual(*t.map, t.mu, *t.phi, {}));
    const double dt = omp_get_wtime() - t0;
    report("criterion-3", worst < 1e-3 && dt < 120.0,
           "duality residual over 5 triples: max " + fmt(worst), dt);
}

void criterion4_contraction(const LattesData& lat) {
    const double t0 = omp_get_wtime();
    const RationalMap zi = zsq_plus_i();
    const auto basis_zi = quadratic_differential_basis(postcritical_set(zi));
    const QuadratureConfig cfg;  // default tolerance
    bool ok = true;
    std::string detail = "L1 contraction:";
    struct Pair {
        const RationalMap* map;
        const QuadDifferential* phi;
    };
    const Pair pairs[2] = {{&lat.map, &lat.canonical_phi}, {&zi, &basis_zi[0]}};
    for (const Pair& p : pairs) {
        SphereRule abs_phi;
        abs_phi.z = [&p](Complex z) { return p.phi->eval(z); };
        abs_phi.w = [&p](Complex w) { return p.phi->eval_wchart(w); };
        const double n0 =
            integrate_l1(abs_phi,
                         Region::whole_sphere().with_exclusions(pole_exclusions(*p.phi)), cfg)
                .real();
        const SphereRule img = ruelle_image_rule(*p.map, *p.phi);
        const double n1 =
            integrate_l1(
                img, Region::whole_sphere().with_exclusions(transfer_exclusions(*p.map, *p.phi)),
                cfg)
                .real();
        ok = ok && n1 <= n0 + 2.0 * cfg.tol;
        detail += " |R*phi|=" + fmt(n1) + " vs |phi|=" + fmt(n0) + ";";
    }
    const double dt = omp_get_wtime() - t0;
    report("criterion-4", ok, detail, dt);
}

struct DecaySeries {
    std::vector<int> n;
    std::vector<double> value;
};

DecaySeries parse_decay_csv(const std::string& path) {
    DecaySeries s;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        s.n.push_back(std::stoi(cell));
        std::getline(row, cell, ',');
        s.value.push_back(std::stod(cell));
    }
    return s;
}

void write_decay_experiments(const std::string& dir) {
    {
        std::ofstream f(dir + "/acc_map_lattes.json");
        f << R"json({"num": [[1,0],[0,0],[2,0],[0,0],[1,0]], "den": [[0,0],[-4,0],[0,0],[4,0]],)json"
          << R"json( "label": "lattes-4-0"})json" << "\n";
    }
    {
        std::ofstream f(dir + "/acc_map_zsqi.json");
        f << R"json({"num": [[0,1],[0,0],[1,0]], "den": [[1,0]], "label": "z^2+i"})json" << "\n";
    }
    {
        std::ofstream f(dir + "/acc_decay_lattes.json");
        f << R"json({"experiment": "cesaro-decay", "map": "acc_map_lattes.json",)json"
          << R"json( "phi": "canonical", "n_schedule": [1,2,4,8,16],)json"
          << R"json( "region": {"kind":"annulus","center":[0,0],"r":2.0,"R":4.0},)json"
          << R"json( "tol": 1e-6, "seed": 1, "node_budget": 2147483648,)json"
          << R"json( "params": {"radial_cells": 1, "angular_cells": 1}})json" << "\n";
    }
    {
        std::ofstream f(dir + "/acc_decay_zsqi.json");
        f << R"json({"experiment": "cesaro-decay", "map": "acc_map_zsqi.json",)json"
          << R"json( "phi": "basis:0", "n_schedule": [1,2,4,8,16],)json"
          << R"json( "region": {"kind":"annulus","center":[0,0],"r":2.0,"R":4.0},)json"
          << R"json( "tol": 1e-6, "seed": 1, "node_budget": 4194304,)json"
          << R"json( "params": {"radial_cells": 4, "angular_cells": 8}})json" << "\n";
    }
}

void criterion5_cesaro(const std::string& rlab, const std::string& dir) {
    const double t0 = omp_get_wtime();
    write_decay_experiments(dir);
    const std::string lat8 = dir + "/c5_lattes_t8";
    const std::string zi8 = dir + "/c5_zsqi_t8";
    bool ran = run_cli(rlab + " run --experiment " + dir + "/acc_decay_lattes.json --threads 8 --out " +
                       lat8 + " > /dev/null") == 0;
    ran = run_cli(rlab + " run --experiment " + dir + "/acc_decay_zsqi.json --threads 8 --out " +
                  zi8 + " > /dev/null") == 0 &&
          ran;
    bool ok = ran;
    std::string detail;
    if (ran) {
        const DecaySeries lat = parse_decay_csv(lat8 + "/decay.csv");
        const DecaySeries zi = parse_decay_csv(zi8 + "/decay.csv");
        ok = lat.n.size() == 5 && zi.n.size() == 5;
        if (ok) {
            double dev = 0.0;
            for (double v : lat.value) dev = std::max(dev, std::abs(v - lat.value[0]));
            const double rel = dev / lat.value[0];
            bool strict = true;
            for (std::size_t i = 1; i < zi.value.size(); ++i)
                strict = strict && zi.value[i] < zi.value[i - 1];
            const double ratio = zi.value.back() / zi.value.front();
            ok = rel < 1e-5 && strict && ratio < 0.9;
            detail = "Lattes constancy " + fmt(rel) + ", z^2+i strictly decreasing with s(16)/s(1) = " +
                     fmt(ratio);
        } else {
            detail = "series truncated";
        }
    } else {
        detail = "CLI run failed";
    }
    const double dt = omp_get_wtime() - t0;
    report("criterion-5", ok && dt < 300.0, detail, dt);
}

void criterion6_kernel_suite() {
    const double t0 = omp_get_wtime();
    const KernelContext ctx;
    bool ok = true;
    std::string detail;

    // Antisymmetry.
    double anti = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double a = 0.9 * std::cos(0.7 * i), b = 0.9 * std::sin(1.3 * i + 0.4);
        const Complex z{0.5 * a, 0.5 * b}, zeta{0.6 * b, -0.4 * a};
        anti = std::max(anti, std::abs(ctx.kernel(zeta, z) + std::conj(ctx.kernel(z, zeta))));
    }
    ok = ok && anti < 1e-12;

    // Reproducing probes.
    double proj = 0.0;
    for (Complex z : {Complex{0.0, 0.0}, Complex{0.5, 0.0}, Complex{0.0, 0.5}}) {
        proj = std::max(proj,
                        std::abs(ctx.project([](Complex) { return Complex{1.0}; }, z).value -
                                 Complex{1.0}));
        proj = std::max(proj, std::abs(ctx.project([](Complex v) { return v; }, z).value - z));
        proj = std::max(proj, std::abs(ctx.project([](Complex v) { return std::conj(v); }, z).value));
    }
    ok = ok && proj < 1e-6;

    // The |w| = (3/2pi) lambda^2 law.
    double law = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Complex z{0.85 * std::cos(2.1 * i) * std::sin(0.3 * i), 0.85 * std::sin(1.7 * i)};
        const double lam2 = ctx.lambda(z) * ctx.lambda(z);
        law = std::max(law, std::abs(std::abs(ctx.w_function(z)) - 3.0 / (2.0 * M_PI) * lam2) / lam2);
    }
    ok = ok && law < 1e-12;

    // Mass of |w| against the hyperbolic area.
    double mass_half = 0.0, mass_dev = 0.0;
    for (double r : {0.3, 0.5, 0.7}) {
        const double mass = integrate_l1([&ctx](Complex z) { return ctx.w_function(z); },
                                         Region::disk(Complex{0.0}, r))
                                .real();
        const double area =
            hyperbolic_area(MetricModel::disk(), Region::disk(Complex{0.0}, r)).area.lower;
        mass_dev = std::max(mass_dev, std::abs(mass - 3.0 / (2.0 * M_PI) * area));
        if (r == 0.5) mass_half = mass;
    }
    ok = ok && mass_dev < 1e-6 && std::abs(mass_half - 0.5) < 1e-6;

    detail = "antisym " + fmt(anti) + ", probes " + fmt(proj) + ", w-law " + fmt(law) +
             ", mass(1/2) - 1/2 = " + fmt(mass_half - 0.5);
    report("criterion-6", ok, detail, omp_get_wtime() - t0);
}

void criterion7_areas() {
    const double t0 = omp_get_wtime();
    QuadratureConfig tight;
    tight.tol = 1e-9;
    const AreaEstimate a1 =
        hyperbolic_area(MetricModel::disk(), Region::disk(Complex{0.0}, 0.5), tight);
    const AreaEstimate a2 = hyperbolic_area(
        MetricModel::punctured_disk(),
        Region::annulus(Complex{0.0}, std::exp(-2.0), std::exp(-1.0)), tight);
    const AreaEstimate a3 = hyperbolic_area(MetricModel::disk(), Region::disk(Complex{0.0}, 1.0));
    const bool ok = std::abs(a1.area.lower - M_PI / 3.0) < 1e-8 &&
                    std::abs(a2.area.lower - M_PI / 4.0) < 1e-8 && !a3.converged && a3.diverging;
    report("criterion-7", ok,
           "areas: disk " + fmt(a1.area.lower) + " (pi/3), annulus " + fmt(a2.area.lower) +
               " (pi/4), full-disk divergence " + (a3.diverging ? "detected" : "MISSED"),
           omp_get_wtime() - t0);
}

void criterion8_exhaustion() {
    const double t0 = omp_get_wtime();
    const KernelContext ctx;
    const Exhaustion exh = Exhaustion::default_disks(12);
    const Region A = Region::disk(Complex{0.0}, 0.25);
    QuadratureConfig cfg;
    cfg.tol = 1e-5;
    bool ordered = true, decreasing = true, below_one = false;
    double prev = 1e300, last = 0.0;
    for (int n : {2, 3, 4, 6, 8, 10}) {
        const Interval d = exhaustion_defect(ctx, exh, n, A, {}, cfg);
        ordered = ordered && d.lower <= d.upper;
        decreasing = decreasing && d.upper < prev;
        prev = d.upper;
        last = d.upper;
    }
    below_one = last < 1.0;
    report("criterion-8", ordered && decreasing && below_one,
           "exhaustion defect: upper decreasing to " + fmt(last) + ", lower <= upper everywhere",
           omp_get_wtime() - t0);
}

void criterion9_rays() {
    const double t0 = omp_get_wtime();
    const int N = 8;
    const double mu = 1.0;
    bool ok = true;

    // Worked value psi_{2,1}(5) = (5,2,2,2) padded to dimension 8.
    const RayPoint p = ray_point(4, mu, 2.0, 1, 5.0);
    ok = ok && p.vector[0] == Complex{5.0, 0.0} && p.vector[1] == Complex{2.0, 0.0} &&
         p.vector[2] == Complex{2.0, 0.0} && p.vector[3] == Complex{2.0, 0.0};

    // (a) same-index curves bounded by |r1 - r2| mu.
    const std::vector<double> ts{0, 0.5, 1, 2, 2.5, 3, 4, 8, 50};
    const RayCurve same = ray_distance_curves(N, mu, 2.0, 1, 3.0, 1, ts);
    double dev_a = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ok = ok && same.distances[i] <= 1.0 + 1e-12;
        if (ts[i] >= 3.0) dev_a = std::max(dev_a, std::abs(same.distances[i] - 1.0));
    }

    // (b) cross-index curves grow like mu (t - r).
    const RayCurve cross = ray_distance_curves(N, mu, 2.0, 1, 2.0, 2, ts);
    double dev_b = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i] > 2.0) dev_b = std::max(dev_b, std::abs(cross.distances[i] - (ts[i] - 2.0)));

    // (c) constant-speed parameterization.
    std::vector<RayPoint> samples;
    for (double t : ts) samples.push_back(ray_point(N, mu, 2.0, 1, t));
    const double dev_c = isometry_ray_audit(samples, mu).max_deviation;

    ok = ok && dev_a < 1e-12 && dev_b < 1e-12 && dev_c < 1e-12;
    report("criterion-9", ok,
           "ray model: deviations " + fmt(dev_a) + " / " + fmt(dev_b) + " / " + fmt(dev_c) +
               ", worked value exact",
           omp_get_wtime() - t0);
}

void criterion10_determinism(const std::string& rlab, const std::string& dir) {
    const double t0 = omp_get_wtime();
    // Criterion 5 already produced the 8-thread artifacts; rerun at 1 thread.
    const std::string lat1 = dir + "/c10_lattes_t1";
    const std::string zi1 = dir + "/c10_zsqi_t1";
    bool ran = run_cli(rlab + " run --experiment " + dir + "/acc_decay_lattes.json --threads 1 --out " +
                       lat1 + " > /dev/null") == 0;
    ran = run_cli(rlab + " run --experiment " + dir + "/acc_decay_zsqi.json --threads 1 --out " +
                  zi1 + " > /dev/null") == 0 &&
          ran;
    bool ok = ran;
    if (ran) {
        ok = read_file(dir + "/c5_lattes_t8/decay.csv") == read_file(lat1 + "/decay.csv") &&
             read_file(dir + "/c5_zsqi_t8/decay.csv") == read_file(zi1 + "/decay.csv");
    }
    report("criterion-10", ok,
           ok ? "CSV bodies byte-identical at 1 and 8 threads" : "thread-count mismatch",
           omp_get_wtime() - t0);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <rlab-binary> <output-dir>\n");
        return 2;
    }
    const std::string rlab_bin = argv[1];
    const std::string out_dir = argv[2];
    fs::create_directories(out_dir);

    try {
        const LattesData lat = flexible_lattes(Complex{4.0, 0.0}, Complex{0.0, 0.0});
        criterion1_lattes_fixed_point(lat);
        criterion2_beltrami(lat);
        criterion3_duality(lat);
        criterion4_contraction(lat);
        criterion5_cesaro(rlab_bin, out_dir);
        criterion6_kernel_suite();
        criterion7_areas();
        criterion8_exhaustion();
        criterion9_rays();
        criterion10_determinism(rlab_bin, out_dir);
    } catch (const std::exception& e) {
        std::printf("[FAIL] suite aborted: %s\n", e.what());
        return 1;
    }
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
