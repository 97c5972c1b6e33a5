#include "horolab/commands.hpp"

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "horolab/christoffel.hpp"
#include "horolab/errors.hpp"
#include "horolab/horospherical.hpp"
#include "horolab/parallel.hpp"
#include "horolab/verify.hpp"
#include "horolab/weingarten.hpp"

namespace horolab {

namespace {

constexpr int kDefaultDegree = 16;

int grid_degree(const Config& cfg, const FieldSource& src)
{
    const int L = src.degree(cfg.get_int("L", kDefaultDegree));
    if (L < 4 || L > 64) throw ParseError("L must lie in 4..64");
    return L;
}

FieldSource require_source(const Config& cfg, const std::string& key)
{
    if (!cfg.has(key)) throw ParseError("missing required key '" + key + "'");
    return FieldSource::parse(cfg.get(key, ""));
}

struct Dilated {
    ConformalFactor rho;
    double tau = 1;
};

/// Applies `tau` or, with `auto_tau = true`, the find_tau0 dilation.
Dilated dilate(const Config& cfg, const ConformalFactor& raw, const SphereGrid& grid)
{
    if (cfg.has("tau") && cfg.get_bool("auto_tau", false)) throw ParseError("tau and auto_tau = true are exclusive");
    const double tau = cfg.get_bool("auto_tau", false) ? find_tau0(raw, grid) : cfg.get_double("tau", 1.0);
    if (!(tau > 0)) throw ParseError("tau must be positive");
    return {tau == 1 ? raw : raw.shifted(std::log(tau)), tau};
}

/// Nodes where g - 2 Sch is not positive definite.
std::vector<int> irregular_nodes(const ConformalFactor& rho, const SphereGrid& grid)
{
    const std::vector<Jet2<double>> jets = sweep_jets(rho, grid);
    std::vector<int> bad;
    for (std::size_t i = 0; i < jets.size(); ++i)
        if (!regularity(jets[i]).regular) bad.push_back(static_cast<int>(i));
    return bad;
}

int report_irregular(const std::vector<int>& bad, const ConformalFactor& raw, const SphereGrid& grid, double tau,
                     std::ostream& err)
{
    err << "horolab: hypersurface not regular at " << bad.size() << " of " << grid.size() << " nodes for tau = "
        << format_double(tau) << " (first node " << bad.front() << ", theta = " << format_double(grid.theta(bad.front()))
        << ", phi = " << format_double(grid.phi(bad.front())) << ")\n";
    try {
        err << "horolab: find_tau0 suggests tau = " << format_double(find_tau0(raw, grid)) << " (or auto_tau = true)\n";
    } catch (const NotFound& e) {
        err << "horolab: " << e.what() << '\n';
    }
    return kExitNotRegular;
}

struct Extremes {
    double kappa_min = 0, kappa_max = 0;
    bool convex = true, canonical = true, strong = true, umbilic = true;
};

Extremes extremes(const std::vector<CurvatureReport>& reports)
{
    Extremes e;
    e.kappa_min = reports.front().kappas.minCoeff();
    e.kappa_max = reports.front().kappas.maxCoeff();
    for (const CurvatureReport& r : reports) {
        e.kappa_min = std::min(e.kappa_min, r.kappas.minCoeff());
        e.kappa_max = std::max(e.kappa_max, r.kappas.maxCoeff());
        e.convex = e.convex && r.horospherically_convex;
        e.canonical = e.canonical && r.canonical;
        e.strong = e.strong && r.strongly_h_convex;
        e.umbilic = e.umbilic && r.umbilic;
    }
    return e;
}

const char* yes_no(bool b)
{
    return b ? "true" : "false";
}

void append_flags(std::ostringstream& s, const std::vector<CurvatureReport>& reports)
{
    const Extremes e = extremes(reports);
    s << "nodes = " << reports.size() << "\nkappa_min = " << format_double(e.kappa_min)
      << "\nkappa_max = " << format_double(e.kappa_max) << "\nhorospherically_convex = " << yes_no(e.convex)
      << "\ncanonical = " << yes_no(e.canonical) << "\nstrongly_h_convex = " << yes_no(e.strong)
      << "\numbilic = " << yes_no(e.umbilic) << '\n';
}

}  // namespace

int run_build(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err)
{
    cfg.require_keys({"rho", "L", "tau", "auto_tau"});
    const FieldSource src = require_source(cfg, "rho");
    const GridPtr grid = make_grid(grid_degree(cfg, src));
    const ConformalFactor raw = src.factor(2);
    const Dilated d = dilate(cfg, raw, *grid);
    const std::vector<int> bad = irregular_nodes(d.rho, *grid);
    if (!bad.empty()) return report_irregular(bad, raw, *grid, d.tau, err);

    const RealizationChecks checks = realize(d.rho, *grid);
    std::filesystem::create_directories(outdir);
    write_report_csv(outdir / "report.csv", *grid, checks.reports);
    write_obj(outdir / "surface.obj", mesh_for(d.rho, *grid, checks.frames));
    std::ostringstream s;
    s << "command = build\nrho = " << cfg.get("rho", "") << "\nL = " << grid->degree() << "\ntau = " << format_double(d.tau)
      << '\n';
    append_flags(s, checks.reports);
    s << "identity_chain_max_deviation = " << format_double(checks.max_identity_deviation)
      << "\nmetric_max_deviation = " << format_double(checks.max_metric_deviation) << '\n';
    write_text(outdir / "summary.txt", s.str());
    out << s.str();
    return kExitOk;
}

int run_solve(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err)
{
    cfg.require_keys({"target", "L", "tol", "max_iter", "damping"});
    const FieldSource src = require_source(cfg, "target");
    SolveConfig sc;
    sc.L = grid_degree(cfg, src);
    sc.tol = cfg.get_double("tol", sc.tol);
    sc.max_iter = cfg.get_int("max_iter", sc.max_iter);
    sc.damping = cfg.get_double("damping", sc.damping);
    if (!(sc.tol > 0) || sc.max_iter < 1 || !(sc.damping > 0 && sc.damping <= 1))
        throw ParseError("tol must be positive, max_iter at least 1 and damping in (0, 1]");
    const GridPtr grid = make_grid(sc.L);
    const ScalarField S = src.field(grid);
    SolveOutcome solved = solve_nirenberg(S, sc);

    std::filesystem::create_directories(outdir);
    write_scalar_field(outdir / "rho.csv", solved.rho);
    write_residuals_csv(outdir / "residuals.csv", solved.residuals);
    write_kw_csv(outdir / "kw.csv", solved.kw);
    std::ostringstream s;
    s << "command = solve\ntarget = " << cfg.get("target", "") << "\nL = " << sc.L << "\nstatus = " << to_string(solved.status)
      << "\niterations = " << solved.residuals.size() - 1 << "\nresidual = " << format_double(solved.residuals.back())
      << "\nkw_noise_floor = " << format_double(solved.kw_noise_floor) << '\n';
    for (Eigen::Index i = 0; i < solved.kw.size(); ++i) s << "kw_" << i + 1 << " = " << format_double(solved.kw(i)) << '\n';
    for (int i : solved.kw_flagged) s << "kw_flagged = " << i << '\n';

    if (solved.status != SolveStatus::Converged) {
        write_text(outdir / "summary.txt", s.str());
        out << s.str();
        err << "horolab: Nirenberg solve did not converge (" << to_string(solved.status) << ")\n";
        return kExitFailure;
    }
    const BuildOutcome b = realize_solution(S, std::move(solved));
    write_report_csv(outdir / "report.csv", *grid, b.reports);
    write_obj(outdir / "surface.obj", b.mesh);
    s << "tau = " << format_double(b.tau) << '\n';
    append_flags(s, b.reports);
    s << "christoffel_max_deviation = " << format_double(b.max_c_deviation)
      << "\nidentity_chain_max_deviation = " << format_double(b.max_identity_deviation)
      << "\nmetric_max_deviation = " << format_double(b.max_metric_deviation) << '\n';
    write_text(outdir / "summary.txt", s.str());
    out << s.str();
    return kExitOk;
}

int run_verify(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err)
{
    const VerifyOptions opt = verify_options(cfg);
    const std::vector<VerifyCheck> checks = run_verify_suites(opt, outdir);
    const VerifyCheck* first = nullptr;
    std::size_t failed = 0;
    for (const VerifyCheck& c : checks) {
        if (c.pass) continue;
        ++failed;
        if (!first) first = &c;
    }
    if (first) {
        err << "horolab: verify FAIL, " << failed << " of " << checks.size() << " checks failed; first: " << first->suite
            << ": " << first->name << " (value " << format_double(first->value) << ", bound " << format_double(first->bound)
            << ")\n";
        return kExitFailure;
    }
    out << "verify PASS (" << checks.size() << " checks)\n";
    return kExitOk;
}

int run_dual(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err)
{
    cfg.require_keys({"rho", "L", "t"});
    const FieldSource src = require_source(cfg, "rho");
    const GridPtr grid = make_grid(grid_degree(cfg, src));
    const ConformalFactor rho = src.factor(2);
    const double t = cfg.has("t") ? cfg.get_double("t", 0) : admissible_dual_time(rho, *grid);
    const std::size_t N = static_cast<std::size_t>(grid->size());
    std::vector<DualRow> rows(N);
    std::vector<std::string> failure(N);
    std::vector<char> zero(N, 0);
    parallel_for(N, [&](std::size_t i) {
        rows[i].node = static_cast<int>(i);
        try {
            rows[i].result = schouten_inverse(rho, grid->point_vec(static_cast<int>(i)), t);
        } catch (const ZeroEigenvalue& e) {
            zero[i] = 1;
            failure[i] = e.what();
        } catch (const Error& e) {
            failure[i] = e.what();
        }
    });
    std::vector<DualRow> good;
    std::ostringstream problems;
    std::size_t zeros = 0, others = 0;
    for (std::size_t i = 0; i < N; ++i) {
        if (failure[i].empty()) {
            good.push_back(rows[i]);
            continue;
        }
        (zero[i] ? zeros : others) += 1;
        problems << "node " << i << " theta = " << format_double(grid->theta(static_cast<int>(i)))
                 << " phi = " << format_double(grid->phi(static_cast<int>(i))) << ": " << failure[i] << '\n';
    }
    std::filesystem::create_directories(outdir);
    write_dual_csv(outdir / "dual.csv", *grid, good);
    double worst = 0;
    for (const DualRow& r : good) worst = std::max(worst, (r.result.products.array() - 1).abs().maxCoeff());
    std::ostringstream s;
    s << "command = dual\nrho = " << cfg.get("rho", "") << "\nL = " << grid->degree() << "\nt = " << format_double(t)
      << "\nnodes = " << N << "\nzero_eigenvalue_nodes = " << zeros << "\nother_failures = " << others
      << "\nmax_product_deviation = " << format_double(worst) << '\n';
    write_text(outdir / "summary.txt", s.str());
    out << s.str();
    if (zeros + others) {
        err << problems.str();
        return kExitFailure;
    }
    return kExitOk;
}

int run_weingarten(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err)
{
    cfg.require_keys({"rho", "L", "k", "tau", "auto_tau"});
    const FieldSource src = require_source(cfg, "rho");
    const GridPtr grid = make_grid(grid_degree(cfg, src));
    const ConformalFactor raw = src.factor(2);
    const Dilated d = dilate(cfg, raw, *grid);
    const WeingartenFunctional wf{cfg.get_int("k", 2), 2};
    wf.cone();
    const std::vector<int> bad = irregular_nodes(d.rho, *grid);
    if (!bad.empty()) return report_irregular(bad, raw, *grid, d.tau, err);
    const std::vector<CurvatureReport> reports = sweep_reports(d.rho, *grid);

    std::ostringstream csv;
    csv << "theta,phi,kappa_min,kappa_max,weingarten\n";
    std::size_t outside = 0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const int node = static_cast<int>(i);
        csv << format_double(grid->theta(node)) << ',' << format_double(grid->phi(node)) << ','
            << format_double(reports[i].kappas.minCoeff()) << ',' << format_double(reports[i].kappas.maxCoeff()) << ',';
        try {
            csv << format_double(weingarten_value(wf, reports[i].kappas));
        } catch (const DomainViolation&) {
            ++outside;
        }
        csv << '\n';
    }
    std::filesystem::create_directories(outdir);
    write_text(outdir / "weingarten.csv", csv.str());
    std::ostringstream s;
    s << "command = weingarten\nrho = " << cfg.get("rho", "") << "\nL = " << grid->degree() << "\nk = " << wf.k
      << "\ntau = " << format_double(d.tau) << '\n';
    append_flags(s, reports);
    s << "outside_gamma_star = " << outside << '\n';
    if (outside == 0) {
        const UmbilicityDiagnostic u = umbilicity_diagnostic(reports, wf);
        s << "umbilicity_spread = " << format_double(u.max_spread) << "\nweingarten_mean = " << format_double(u.mean_weingarten)
          << "\nweingarten_constancy_deviation = " << format_double(u.wein_const_dev) << '\n';
    }
    write_text(outdir / "summary.txt", s.str());
    out << s.str();
    if (outside) {
        err << "horolab: curvatures outside Gamma* at " << outside << " nodes; their weingarten field is empty\n";
        return kExitFailure;
    }
    return kExitOk;
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"horolab: conformal metrics on the sphere and horospherically convex hypersurfaces"};
    app.require_subcommand(1);
    std::string config_path;
    std::string outdir = "horolab_out";
    using Runner = int (*)(const Config&, const std::filesystem::path&, std::ostream&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Runner>> commands = {
        {"build", "Realize a conformal factor as a hypersurface and report its curvature", run_build},
        {"solve", "Solve the Christoffel problem for a target Christoffel/scalar curvature", run_solve},
        {"verify", "Run every invariant suite", run_verify},
        {"dual", "Tabulate Schouten eigenvalues against those of the dual metric", run_dual},
        {"weingarten", "Evaluate the Weingarten functional over the grid", run_weingarten},
    };
    Runner chosen = nullptr;
    for (const auto& [name, help, runner] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "flat key = value configuration file")->required();
        sub->add_option("-o,--output", outdir, "output directory");
        sub->callback([&chosen, r = runner] { chosen = r; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return kExitOk;
        const auto subs = app.get_subcommands();
        std::cerr << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }
    try {
        const Config cfg = Config::load(config_path);
        return chosen(cfg, outdir, std::cout, std::cerr);
    } catch (const ParseError& e) {
        std::cerr << "horolab: parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "horolab: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace horolab
