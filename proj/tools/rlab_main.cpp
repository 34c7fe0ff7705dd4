// Command-line front end: map analysis, experiment execution, and the
// flexible-Lattes catalog. Scientific findings never fail the process; only
// operational errors (bad input, exhausted budgets) produce nonzero exits.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "rlab/bergman.hpp"
#include "rlab/ergodic.hpp"
#include "rlab/errors.hpp"
#include "rlab/hyperbolic.hpp"
#include "rlab/io.hpp"
#include "rlab/lattes.hpp"
#include "rlab/quadrature.hpp"
#include "rlab/transfer.hpp"

namespace {

using namespace rlab;
using nlohmann::json;
namespace fs = std::filesystem;

struct CliOptions {
    std::string map_path;
    std::string experiment_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::uint64_t budget = 0;
    int threads = 0;
    bool have_seed = false, have_tol = false, have_budget = false;
};

json point_json(const ExtPoint& p) {
    if (p.is_inf()) return json::array({"inf"});
    return json::array({p.value.real(), p.value.imag()});
}

double param_or(const ExperimentFile& ex, const std::string& key, double fallback) {
    const auto it = ex.params.find(key);
    return it == ex.params.end() ? fallback : it->second;
}

QuadDifferential resolve_phi(const std::string& label, const PostcriticalData& post) {
    if (label.rfind("basis:", 0) == 0) {
        const int idx = std::stoi(label.substr(6));
        const auto basis = quadratic_differential_basis(post);
        if (idx < 0 || idx >= static_cast<int>(basis.size()))
            throw ParseError("field `phi`: basis index out of range (dim Q = " +
                             std::to_string(basis.size()) + ")");
        return basis[static_cast<std::size_t>(idx)];
    }
    if (label == "canonical") {
        if (post.points.size() != 4)
            throw ParseError("field `phi`: canonical needs exactly 4 postcritical points");
        return canonical_quad_diff(post.points);
    }
    if (label.rfind("hk:", 0) == 0) return hk_family(std::stoi(label.substr(3)));
    throw ParseError("field `phi`: expected basis:K, canonical, or hk:K");
}

LineField resolve_mu(const std::string& label, const QuadDifferential& phi) {
    if (label == "invariant" || label == "aligned") return invariant_line_field(phi);
    if (label.rfind("constant:", 0) == 0) {
        const std::string body = label.substr(9);
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw ParseError("field `mu`: constant needs re,im");
        const Complex c{std::stod(body.substr(0, comma)), std::stod(body.substr(comma + 1))};
        if (std::abs(c) > 1.0) throw ParseError("field `mu`: |constant| must be <= 1");
        return LineField::constant(c, label);
    }
    if (label == "smooth") {
        LineField mu;
        mu.label = "smooth";
        mu.rule = [](Complex z) {
            return 0.6 * std::exp(Complex{0.0, 0.2}) * std::conj(z) / (1.0 + std::norm(z));
        };
        return mu;
    }
    throw ParseError("field `mu`: expected invariant, constant:re,im, or smooth");
}

RationalMap load_map(const std::string& path, RunManifest& manifest) {
    const MapFile mf = read_map_file(path);
    manifest.inputs.emplace_back(path, sha256_file(path));
    return RationalMap(mf.num, mf.den);
}

void emit(RunManifest& manifest, CsvWriter& csv) {
    const auto [digest, rows] = csv.save();
    manifest.artifacts.push_back({csv.path(), digest, rows});
}

int finish(RunManifest& manifest, const std::string& out_dir) {
    manifest.finished_utc = utc_timestamp();
    manifest.save((fs::path(out_dir) / "manifest.json").string());
    return 0;
}

// ---------------------------------------------------------------------------
// analyze-map

int cmd_analyze_map(const CliOptions& cli) {
    const MapFile mf = read_map_file(cli.map_path);
    const RationalMap map(mf.num, mf.den);
    const auto crit = critical_points(map);
    const auto values = critical_values(map);
    const PostcriticalData post = postcritical_set(map);
    const auto basis = quadratic_differential_basis(post);

    json out;
    out["label"] = mf.label;
    out["degree"] = map.degree();
    json cps = json::array();
    for (const auto& [p, m] : crit) cps.push_back({{"point", point_json(p)}, {"multiplicity", m}});
    out["critical_points"] = cps;
    json cvs = json::array();
    for (const auto& v : values) cvs.push_back(point_json(v));
    out["critical_values"] = cvs;
    json pts = json::array();
    for (const auto& p : post.points) pts.push_back(point_json(p));
    out["postcritical"] = {{"points", pts},
                           {"size", post.points.size()},
                           {"resolved", post.resolved},
                           {"depth_used", post.depth_used}};
    out["dim_q"] = q_dimension(post);
    json labels = json::array();
    for (const auto& phi : basis) labels.push_back(phi.label());
    out["basis"] = labels;
    std::cout << out.dump(2) << "\n";

    if (cli.out_dir != ".") {
        fs::create_directories(cli.out_dir);
        RunManifest manifest;
        manifest.command = "analyze-map";
        manifest.started_utc = utc_timestamp();
        manifest.inputs.emplace_back(cli.map_path, sha256_file(cli.map_path));
        const std::string path = (fs::path(cli.out_dir) / "analyze.json").string();
        std::ofstream f(path);
        f << out.dump(2) << "\n";
        f.close();
        manifest.artifacts.push_back({path, sha256_file(path), 1});
        manifest.audits.push_back({"postcritical_resolved", post.resolved, ""});
        return finish(manifest, cli.out_dir);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// experiments

int run_cesaro_decay(const ExperimentFile& ex, RunManifest& manifest, const std::string& out_dir) {
    const RationalMap map = load_map(ex.map_path, manifest);
    const PostcriticalData post = postcritical_set(map);
    const QuadDifferential phi = resolve_phi(ex.phi, post);
    DecayOptions opts;
    opts.grid.radial_cells = static_cast<int>(param_or(ex, "radial_cells", 4));
    opts.grid.angular_cells = static_cast<int>(param_or(ex, "angular_cells", 8));
    opts.tree.node_budget = ex.node_budget;
    std::vector<int> schedule = ex.n_schedule;
    if (schedule.empty()) schedule = {1, 2, 4, 8, 16};

    const CesaroSeries series = cesaro_decay(map, phi, schedule, ex.region, opts);
    CsvWriter csv((fs::path(out_dir) / "decay.csv").string(), {"n", "re", "im", "abs"});
    for (std::size_t i = 0; i < series.n_values.size(); ++i) {
        csv.row({std::to_string(series.n_values[i]), fmt_g17(series.values[i].real()),
                 fmt_g17(series.values[i].imag()), fmt_g17(std::abs(series.values[i]))});
    }
    emit(manifest, csv);
    manifest.audits.push_back({"postcritical_resolved", post.resolved, ""});
    manifest.audits.push_back(
        {"series_length", series.n_values.size() == schedule.size(), series.target});
    return 0;
}

int run_lattes_check(const ExperimentFile& ex, RunManifest& manifest, const std::string& out_dir) {
    const RationalMap map = load_map(ex.map_path, manifest);
    const PostcriticalData post = postcritical_set(map);
    const auto basis = quadratic_differential_basis(post);
    LattesCheckOptions opts;
    opts.seed = ex.seed + 0x1a77e5u;
    const LattesCheck check = lattes_residual(map, basis, opts);

    CsvWriter csv((fs::path(out_dir) / "lattes_check.csv").string(),
                  {"applicable", "dim_q", "residual"});
    csv.row({std::to_string(check.applicable ? 1 : 0), std::to_string(check.dim),
             fmt_g17(check.residual)});
    emit(manifest, csv);
    manifest.audits.push_back({"postcritical_resolved", post.resolved, ""});
    std::printf("lattes-check: applicable=%d dim=%d residual=%.3e\n", check.applicable ? 1 : 0,
                check.dim, check.residual);
    return 0;
}

int run_duality(const ExperimentFile& ex, RunManifest& manifest, const std::string& out_dir) {
    const RationalMap map = load_map(ex.map_path, manifest);
    const PostcriticalData post = postcritical_set(map);
    const QuadDifferential phi = resolve_phi(ex.phi, post);
    const LineField mu = resolve_mu(ex.mu, phi);
    QuadratureConfig cfg;
    cfg.tol = ex.tol;
    cfg.cell_budget = ex.budget;
    const double residual = duality_residual(map, mu, phi, cfg);

    CsvWriter csv((fs::path(out_dir) / "duality.csv").string(), {"mu", "phi", "residual"});
    csv.row({mu.label, phi.label(), fmt_g17(residual)});
    emit(manifest, csv);
    std::printf("duality: mu=%s phi=%s residual=%.3e\n", mu.label.c_str(), phi.label().c_str(),
                residual);
    return 0;
}

int run_bcond(const ExperimentFile& ex, RunManifest& manifest, const std::string& out_dir) {
    const RationalMap map = load_map(ex.map_path, manifest);
    const PostcriticalData post = postcritical_set(map);
    const auto basis = quadratic_differential_basis(post);
    const MetricModel model = MetricModel::punctured_sphere(post.points);
    QuadratureConfig cfg;
    cfg.tol = std::max(ex.tol, 1e-5);
    BcondGrid coarse;
    BcondGrid fine;
    fine.bulk_rings = 2 * coarse.bulk_rings;
    fine.bulk_angles = 2 * coarse.bulk_angles;
    fine.puncture_levels = coarse.puncture_levels + 4;
    fine.puncture_angles = 2 * coarse.puncture_angles;
    const double r1 = bcond_ratio(map, basis, model, coarse, cfg);
    const double r2 = bcond_ratio(map, basis, model, fine, cfg);

    CsvWriter csv((fs::path(out_dir) / "bcond.csv").string(),
                  {"ratio_coarse", "ratio_fine", "rel_change"});
    const double rel = std::abs(r2 - r1) / std::max({r1, r2, 1e-300});
    csv.row({fmt_g17(r1), fmt_g17(r2), fmt_g17(rel)});
    emit(manifest, csv);
    manifest.audits.push_back({"grid_stability_20pct", rel <= 0.2, fmt_g17(rel)});
    std::printf("bcond: ratio=%.6g refined=%.6g rel_change=%.3g\n", r1, r2, rel);
    return 0;
}

int run_area(const ExperimentFile& ex, RunManifest& manifest, const std::string& out_dir) {
    MetricModel model = MetricModel::disk();
    if (ex.phi == "punctured-disk") {
        model = MetricModel::punctured_disk();
    } else if (ex.phi == "punctured-sphere") {
        const RationalMap map = load_map(ex.map_path, manifest);
        model = MetricModel::punctured_sphere(postcritical_set(map).points);
    } else if (ex.phi != "disk" && !ex.phi.empty() && ex.phi != "basis:0") {
        throw ParseError("field `phi`: area models are disk, punctured-disk, punctured-sphere");
    }
    QuadratureConfig cfg;
    cfg.tol = ex.tol;
    cfg.cell_budget = ex.budget;
    const AreaEstimate est = hyperbolic_area(model, ex.region, cfg);

    CsvWriter csv((fs::path(out_dir) / "area.csv").string(),
                  {"lower", "upper", "abs_err", "converged", "diverging", "cells"});
    csv.row({fmt_g17(est.area.lower), fmt_g17(est.area.upper), fmt_g17(est.abs_error_estimate),
             std::to_string(est.converged ? 1 : 0), std::to_string(est.diverging ? 1 : 0),
             std::to_string(est.cells_used)});
    emit(manifest, csv);
    std::printf("area: [%.9g, %.9g] converged=%d diverging=%d\n", est.area.lower, est.area.upper,
                est.converged ? 1 : 0, est.diverging ? 1 : 0);
    return 0;
}

int run_kernel_projection(const ExperimentFile& ex, RunManifest& manifest,
                          const std::string& out_dir) {
    const KernelContext ctx;
    QuadratureConfig cfg;
    cfg.tol = ex.tol;
    const std::vector<Complex> probes{{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}};
    CsvWriter csv((fs::path(out_dir) / "kernel_projection.csv").string(),
                  {"z_re", "z_im", "p1_re", "p1_im", "pz_re", "pz_im", "pconj_re", "pconj_im"});
    double worst = 0.0;
    for (Complex z : probes) {
        const Complex p1 = ctx.project([](Complex) { return Complex{1.0}; }, z, cfg).value;
        const Complex pz = ctx.project([](Complex v) { return v; }, z, cfg).value;
        const Complex pc = ctx.project([](Complex v) { return std::conj(v); }, z, cfg).value;
        csv.number_row({z.real(), z.imag(), p1.real(), p1.imag(), pz.real(), pz.imag(), pc.real(),
                        pc.imag()});
        worst = std::max({worst, std::abs(p1 - Complex{1.0}), std::abs(pz - z), std::abs(pc)});
    }
    emit(manifest, csv);
    manifest.audits.push_back({"reproducing_probes", worst < 1e-6, fmt_g17(worst)});
    std::printf("kernel-projection: max reproducing deviation %.3e\n", worst);
    return 0;
}

int run_exhaustion_defect(const ExperimentFile& ex, RunManifest& manifest,
                          const std::string& out_dir) {
    const KernelContext ctx;
    std::vector<int> schedule = ex.n_schedule;
    if (schedule.empty()) schedule = {2, 3, 4, 6, 8, 10};
    const Exhaustion exh = Exhaustion::default_disks(schedule.back() + 1);
    Region support = ex.region;
    if (support.kind != Region::Kind::Disk) support = Region::disk(Complex{0.0}, 0.25);
    DefectOptions opts;
    opts.probe_count = static_cast<int>(param_or(ex, "probes", 5));
    opts.seed = ex.seed + 0x5eed2024u;
    QuadratureConfig cfg;
    cfg.tol = std::max(ex.tol, 1e-5);

    CsvWriter csv((fs::path(out_dir) / "defect.csv").string(), {"n", "lower", "upper"});
    bool ordered = true, decreasing = true;
    double prev = 1e300;
    for (int n : schedule) {
        const Interval d = exhaustion_defect(ctx, exh, n, support, opts, cfg);
        csv.row({std::to_string(n), fmt_g17(d.lower), fmt_g17(d.upper)});
        ordered = ordered && d.lower <= d.upper;
        decreasing = decreasing && d.upper < prev;
        prev = d.upper;
    }
    emit(manifest, csv);
    manifest.audits.push_back({"lower_leq_upper", ordered, ""});
    manifest.audits.push_back({"upper_strictly_decreasing", decreasing, ""});
    std::printf("exhaustion-defect: ordered=%d decreasing=%d final_upper=%.6g\n", ordered ? 1 : 0,
                decreasing ? 1 : 0, prev);
    return 0;
}

int run_rays(const ExperimentFile& ex, RunManifest& manifest, const std::string& out_dir) {
    const int N = static_cast<int>(param_or(ex, "N", 8));
    const double mu_norm = param_or(ex, "mu_norm", 1.0);
    const double r1 = param_or(ex, "r1", 2.0);
    const double r2 = param_or(ex, "r2", 3.0);
    std::vector<double> ts;
    for (int n : ex.n_schedule) ts.push_back(n);
    if (ts.empty()) ts = {0, 1, 2, 3, 5, 10, 40};

    const RayCurve same = ray_distance_curves(N, mu_norm, r1, 1, r2, 1, ts);
    const RayCurve cross = ray_distance_curves(N, mu_norm, r1, 1, r1, 2, ts);
    CsvWriter csv((fs::path(out_dir) / "rays.csv").string(),
                  {"t", "same_index_dist", "cross_index_dist"});
    bool bounded = true;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        csv.number_row({ts[i], same.distances[i], cross.distances[i]});
        bounded = bounded && same.distances[i] <= std::abs(r1 - r2) * mu_norm + 1e-12;
    }
    emit(manifest, csv);

    std::vector<RayPoint> pts;
    for (double t : ts) pts.push_back(ray_point(N, mu_norm, r1, 1, t));
    const RayAuditReport audit = isometry_ray_audit(pts, mu_norm);
    manifest.audits.push_back({"same_index_bounded", bounded, ""});
    manifest.audits.push_back(
        {"isometry_deviation", audit.max_deviation < 1e-12, fmt_g17(audit.max_deviation)});
    std::printf("rays: isometry deviation %.3e over %d pairs\n", audit.max_deviation, audit.pairs);
    return 0;
}

int cmd_run(const CliOptions& cli) {
    ExperimentFile ex = read_experiment_file(cli.experiment_path);
    // Relative map references resolve against the experiment file.
    if (!ex.map_path.empty() && fs::path(ex.map_path).is_relative())
        ex.map_path = (fs::path(cli.experiment_path).parent_path() / ex.map_path).string();
    if (cli.have_seed) ex.seed = cli.seed;
    if (cli.have_tol) ex.tol = cli.tol;
    if (cli.have_budget) {
        ex.budget = cli.budget;
        ex.node_budget = cli.budget;
    }
    if (cli.threads > 0) ex.threads = cli.threads;
    set_thread_count(ex.threads);

    fs::create_directories(cli.out_dir);
    RunManifest manifest;
    manifest.command = "run";
    manifest.experiment = ex.experiment;
    manifest.started_utc = utc_timestamp();
    manifest.seed = ex.seed;
    manifest.tol = ex.tol;
    manifest.budget = ex.budget;
    manifest.threads = ex.threads;
    manifest.inputs.emplace_back(cli.experiment_path, sha256_file(cli.experiment_path));

    int rc;
    if (ex.experiment == "cesaro-decay")
        rc = run_cesaro_decay(ex, manifest, cli.out_dir);
    else if (ex.experiment == "lattes-check")
        rc = run_lattes_check(ex, manifest, cli.out_dir);
    else if (ex.experiment == "duality")
        rc = run_duality(ex, manifest, cli.out_dir);
    else if (ex.experiment == "bcond")
        rc = run_bcond(ex, manifest, cli.out_dir);
    else if (ex.experiment == "area")
        rc = run_area(ex, manifest, cli.out_dir);
    else if (ex.experiment == "kernel-projection")
        rc = run_kernel_projection(ex, manifest, cli.out_dir);
    else if (ex.experiment == "exhaustion-defect")
        rc = run_exhaustion_defect(ex, manifest, cli.out_dir);
    else if (ex.experiment == "rays")
        rc = run_rays(ex, manifest, cli.out_dir);
    else
        throw ParseError("field `experiment`: unknown experiment `" + ex.experiment + "`");

    finish(manifest, cli.out_dir);
    return manifest.all_audits_passed() && rc == 0 ? 0 : 1;
}

int cmd_catalog(const CliOptions& cli, const std::string& g2s, const std::string& g3s) {
    auto parse_c = [](const std::string& s, const char* name) {
        const auto comma = s.find(',');
        try {
            if (comma == std::string::npos) return Complex{std::stod(s), 0.0};
            return Complex{std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
        } catch (const std::exception&) {
            throw ParseError(std::string("flag `") + name + "`: expected re[,im]");
        }
    };
    const Complex g2 = parse_c(g2s, "--g2");
    const Complex g3 = parse_c(g3s, "--g3");
    const LattesData lat = flexible_lattes(g2, g3);

    fs::create_directories(cli.out_dir);
    RunManifest manifest;
    manifest.command = "catalog";
    manifest.started_utc = utc_timestamp();

    // Verification report embedded alongside the coefficients.
    const RuelleOperator op(lat.map, lat.canonical_phi);
    const Complex probe{2.1, 1.3};
    const double fp_resid = std::abs(op(probe) - lat.canonical_phi.eval(probe)) /
                            std::abs(lat.canonical_phi.eval(probe));
    std::map<std::string, std::string> extra;
    extra["verified_postcritical"] = "resolved:4";
    extra["verified_fixed_point_residual"] = fmt_g17(fp_resid);

    const std::string path = (fs::path(cli.out_dir) / "lattes_map.json").string();
    write_map_file(path, lat.map, "lattes(" + fmt_g17(g2.real()) + "," + fmt_g17(g3.real()) + ")",
                   extra);
    manifest.artifacts.push_back({path, sha256_file(path), 1});
    manifest.audits.push_back({"fixed_point_residual", fp_resid < 1e-6, fmt_g17(fp_resid)});
    std::printf("catalog: wrote %s (fixed-point residual %.3e)\n", path.c_str(), fp_resid);
    finish(manifest, cli.out_dir);
    return manifest.all_audits_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical lab for Ruelle and Beltrami operators of rational maps"};
    app.require_subcommand(1);
    CliOptions cli;

    auto* analyze = app.add_subcommand("analyze-map", "degree, critical and postcritical data");
    analyze->add_option("--map", cli.map_path, "map description file")->required();
    analyze->add_option("--out", cli.out_dir, "output directory");

    auto* run = app.add_subcommand("run", "execute an experiment file");
    run->add_option("--experiment", cli.experiment_path, "experiment file")->required();
    run->add_option("--out", cli.out_dir, "output directory");
    auto* seed_opt = run->add_option("--seed", cli.seed, "seed override");
    auto* tol_opt = run->add_option("--tol", cli.tol, "tolerance override");
    auto* budget_opt = run->add_option("--budget", cli.budget, "cell/node budget override");
    run->add_option("--threads", cli.threads, "OpenMP thread count (0 = default)");

    std::string g2s = "4", g3s = "0";
    auto* catalog = app.add_subcommand("catalog", "write a flexible Lattes map file");
    catalog->add_option("--g2", g2s, "g2 invariant, re[,im]");
    catalog->add_option("--g3", g3s, "g3 invariant, re[,im]");
    catalog->add_option("--out", cli.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);
    cli.have_seed = seed_opt->count() > 0;
    cli.have_tol = tol_opt->count() > 0;
    cli.have_budget = budget_opt->count() > 0;

    try {
        if (app.got_subcommand("analyze-map")) return cmd_analyze_map(cli);
        if (app.got_subcommand("run")) return cmd_run(cli);
        if (app.got_subcommand("catalog")) return cmd_catalog(cli, g2s, g3s);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
