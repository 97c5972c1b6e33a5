#include "horolab/verify.hpp"

#include <random>
#include <sstream>

#include "horolab/christoffel.hpp"
#include "horolab/horospherical.hpp"
#include "horolab/parallel.hpp"
#include "horolab/weingarten.hpp"

namespace horolab {

namespace {

class Ledger {
public:
    explicit Ledger(std::string suite) : suite_(std::move(suite)) {}
    void suite(std::string s) { suite_ = std::move(s); }
    void at_most(const std::string& name, double value, double bound) { add(name, value, bound, Relation::AtMost); }
    void at_least(const std::string& name, double value, double bound) { add(name, value, bound, Relation::AtLeast); }
    void above(const std::string& name, double value, double bound) { add(name, value, bound, Relation::Above); }
    std::vector<VerifyCheck> checks;

private:
    void add(const std::string& name, double value, double bound, Relation rel)
    {
        bool pass = false;
        switch (rel) {
        case Relation::AtMost:
            pass = value <= bound;
            break;
        case Relation::AtLeast:
            pass = value >= bound;
            break;
        case Relation::Above:
            pass = value > bound;
            break;
        }
        checks.push_back({suite_, name, value, bound, rel, pass});
    }
    std::string suite_;
};

const char* relation_text(Relation r)
{
    switch (r) {
    case Relation::AtMost:
        return "<=";
    case Relation::AtLeast:
        return ">=";
    case Relation::Above:
        return ">";
    }
    return "?";
}

Vec<double> random_point(std::mt19937_64& gen, int dim)
{
    std::normal_distribution<double> nd;
    Vec<double> x(dim);
    for (int i = 0; i < dim; ++i) x(i) = nd(gen);
    return x.normalized();
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(a));
}

double max_abs(const Mat<double>& m)
{
    return m.cwiseAbs().maxCoeff();
}

double p2_target(const Vec<double>& x)
{
    return 0.5 * (1 + 0.1 * (1.5 * x(2) * x(2) - 0.5));
}

/// Random polynomial factor raised by the find_tau0 shift plus a margin.
ConformalFactor regular_factor(int n, unsigned seed, double amplitude, const SphereGrid& grid)
{
    const ConformalFactor raw = polynomial_factor(n, random_polynomial(n, 8, amplitude, seed), "poly");
    if (n == 2) return raw.shifted(std::log(find_tau0(raw, grid)) + 0.2);
    return raw.shifted(1.5);
}

void lorentz_suite(Ledger& L, std::mt19937_64& gen, int samples)
{
    L.suite("lorentz");
    std::normal_distribution<double> nd;
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        LorentzVec u(5), v(5), w(5);
        for (int i = 0; i < 5; ++i) u(i) = nd(gen), v(i) = nd(gen), w(i) = nd(gen);
        const double a = nd(gen);
        worst = std::max(worst, rel(lorentz_dot(u, v), lorentz_dot(v, u)));
        worst = std::max(worst, rel(lorentz_dot(LorentzVec(a * u + w), v), a * lorentz_dot(u, v) + lorentz_dot(w, v)));
    }
    L.at_most("dot symmetric and bilinear", worst, 1e-12);
    int wrong = 0, past = 0;
    for (int s = 0; s < samples; ++s) {
        const Vec<double> x = random_point(gen, 3);
        const double r = 3 * nd(gen);
        LorentzVec v(4);
        v << 1, x;
        wrong += classify(LorentzVec(std::exp(r) * v)).tag != Quadric::LightCone;
        LorentzVec h(4);
        h << std::cosh(r), std::sinh(r) * x;
        past += classify(h).tag != Quadric::Hyperbolic || classify(LorentzVec(-h)).tag != Quadric::None;
    }
    L.at_most("scaled sphere points classify as light cone", wrong, 0);
    L.at_most("hyperbolic points and their negatives", past, 0);
}

void sphere_suite(Ledger& L, std::mt19937_64& gen, int samples)
{
    L.suite("sphere");
    const ConformalFactor rho = polynomial_factor(2, random_polynomial(2, 6, 1.0, static_cast<unsigned>(gen())), "poly");
    double g = 0, h = 0, tr = 0;
    for (int s = 0; s < samples; ++s) {
        const Vec<double> x = random_point(gen, 3);
        const Jet2<double> a = jet2(rho, x);
        const Jet2<double> f = jet2(rho.with_mode(JetMode::FiniteDifference), x);
        g = std::max(g, (a.grad - f.grad).cwiseAbs().maxCoeff());
        h = std::max(h, max_abs(a.hess - f.hess));
        const double S = scalar_curvature(a);
        tr = std::max(tr, rel(S / 2, schouten_eigen(schouten(a), a).values.sum()));
    }
    L.at_most("finite-difference gradient", g, 1e-5);
    L.at_most("finite-difference hessian", h, 1e-3);
    L.at_most("schouten trace equals S/2", tr, 1e-8);
    double c_dev = 0;
    for (int n : {2, 3})
        for (double c : {-1.0, 0.0, 0.5, 1.0})
            c_dev = std::max(c_dev, rel(n * (n - 1) * std::exp(-2 * c),
                                        scalar_curvature(jet2(constant_factor(n, c), Vec<double>(Vec<double>::Unit(n + 1, n))))));
    L.at_most("scalar curvature of dilated spheres", c_dev, 1e-14);
}

void grid_suite(Ledger& L, std::mt19937_64& gen, const GridPtr& grid)
{
    L.suite("grid");
    constexpr double pi = 3.14159265358979323846;
    L.at_most("weights sum to 4 pi", std::abs(grid->weights().sum() - 4 * pi), 1e-10);
    L.at_most("second moment of x3",
              std::abs(integrate(sample(grid, [](const Vec<double>& x) { return x(2) * x(2); })) - 4 * pi / 3), 1e-10);
    std::normal_distribution<double> nd;
    Eigen::VectorXd c(grid->harmonics());
    for (int i = 0; i < c.size(); ++i) c(i) = nd(gen);
    const ScalarField f = synthesize(grid, c);
    L.at_most("analysis and synthesis round trip", (synthesize(grid, analyze(f)).samples - f.samples).cwiseAbs().maxCoeff(),
              1e-9);
}

void horospherical_suite(Ledger& L, std::mt19937_64& gen, int samples, const GridPtr& grid)
{
    L.suite("horospherical");
    const SphereGrid coarse(8);
    double frame = 0;
    for (int n : {2, 3}) {
        const ConformalFactor rho = polynomial_factor(n, random_polynomial(n, 8, 1.0, static_cast<unsigned>(gen())), "poly");
        for (int s = 0; s < samples; ++s) {
            const SurfaceFrame<double> f = represent(jet2(rho, random_point(gen, n + 1)));
            const double scale = std::max(1.0, f.phi.squaredNorm());
            frame = std::max({frame, std::abs(lorentz_norm2(f.phi) + 1) / scale, std::abs(lorentz_norm2(f.psi)) / scale,
                              std::abs(lorentz_dot(f.phi, f.psi) + 1) / scale,
                              (f.psi.tail(n + 1) / f.psi(0) - f.x).norm()});
        }
    }
    L.at_most("frame invariants", frame, 1e-9);

    double sphere = 0;
    for (int n : {2, 3}) {
        for (double c : {0.25, std::log(2.0), 1.0}) {
            const CurvatureReport r = curvature_report(jet2(constant_factor(n, c), random_point(gen, n + 1)));
            const double radius = (1 - std::exp(-2 * c)) / 2;
            for (int i = 0; i < n; ++i) {
                sphere = std::max({sphere, std::abs(r.kappas(i) + 1 / std::tanh(c)), std::abs(r.radii(i) - radius),
                                   std::abs(r.schouten_lambdas(i) - std::exp(-2 * c) / 2)});
            }
            sphere = std::max({sphere, std::abs(r.scalar - n * (n - 1) * std::exp(-2 * c)),
                               std::abs(r.christoffel_mean - radius)});
        }
    }
    L.at_most("geodesic sphere oracle", sphere, 1e-9);

    double chain = 0, chain_fd = 0, mixed = 0, metric = 0, forms = 0;
    for (int n : {2, 3}) {
        const ConformalFactor rho = regular_factor(n, static_cast<unsigned>(gen()), 0.5, coarse);
        for (int s = 0; s < samples; ++s) {
            const Vec<double> x = random_point(gen, n + 1);
            const Jet2<double> j = jet2(rho, x);
            chain = std::max(chain, identity_chain_deviation(curvature_report(j)));
            if (n == 2 && s < samples / 4) {
                const ConformalFactor fd = rho.with_mode(JetMode::FiniteDifference);
                const MeasuredForms m = measured_forms(fd, x);
                const Jet2<double> jf = jet2(fd, x);
                chain_fd = std::max(chain_fd, identity_chain_deviation(curvature_report(jf, {m.first, m.second})));
                const MeasuredForms ma = measured_forms(rho, x);
                const FundamentalForms<double> f = fundamental_forms(j);
                const double scale = std::max(1.0, max_abs(f.first));
                forms = std::max({forms, max_abs(f.first - ma.first) / scale, max_abs(f.second - ma.second) / scale});
                const Mat<double> g = metric_matrix(j);
                mixed = std::max(mixed, max_abs(ma.mixed - (g / 2 - schouten(j))) / std::max(1.0, max_abs(g)));
                metric = std::max(metric, max_abs(ma.horospherical - g) / std::max(1.0, max_abs(g)));
            }
        }
    }
    L.at_most("identity chain with analytic jets", chain, 1e-7);
    L.at_most("identity chain with finite-difference jets and forms", chain_fd, 1e-4);
    L.at_most("fundamental forms against differences of phi", forms, 1e-5);
    L.at_most("mixed form equals g/2 - Sch", mixed, 1e-5);
    L.at_most("light cone metric equals e^{2 rho} g0", metric, 1e-5);

    double curprin = 0, first_t = 0;
    const ConformalFactor rho = regular_factor(2, static_cast<unsigned>(gen()), 0.5, coarse);
    for (double t : {0.3, 0.8}) {
        for (int s = 0; s < samples / 4; ++s) {
            const Vec<double> x = random_point(gen, 3);
            const FundamentalForms<double> f = fundamental_forms(jet2(rho, x));
            const SymmetricEigen<double> p = generalized_eigen(f.second, f.first);
            const MeasuredForms m = measured_forms(rho, x, t);
            const Vec<double> kt = generalized_eigen(m.second, m.first).values;
            for (int i = 0; i < 2; ++i) {
                curprin = std::max(curprin, rel(kt(i), flowed_curvature(p.values(i), t)));
                const Vec<double> v = p.vectors.col(i);
                first_t = std::max(first_t, rel(std::pow(std::cosh(t) - p.values(i) * std::sinh(t), 2), v.dot(m.first * v)));
            }
        }
    }
    L.at_most("flowed principal curvatures", curprin, 1e-5);
    L.at_most("flowed first fundamental form", first_t, 1e-5);
    double flow_c = 0;
    for (double c : {0.25, std::log(2.0), 1.0}) {
        for (double t : {0.0, 0.5, std::log(2.0), 2.0}) {
            const CurvatureReport r0 = curvature_report(jet2(constant_factor(2, c), random_point(gen, 3)));
            const CurvatureReport rt = curvature_report(jet2(constant_factor(2, c + t), random_point(gen, 3)));
            flow_c = std::max(flow_c, std::abs(christoffel_flow_mean(r0.christoffel_mean, t) - rt.christoffel_mean));
        }
    }
    L.at_most("christoffel flow law on spheres", flow_c, 1e-14);

    const GridPtr lap_grid = grid->degree() >= 24 ? grid : make_grid(24);
    const ConformalFactor smooth =
        harmonic_factor(harmonic_coefficients(3, {{0, 0, 1.0}, {1, 1, 0.2}, {2, 0, 0.15}, {3, -2, 0.05}}), "smooth");
    L.at_most("laplacian representation", laplacian_representation_error(smooth, lap_grid), 1e-4);

    const ConformalFactor random_rho = polynomial_factor(2, random_polynomial(2, 8, 2.0, static_cast<unsigned>(gen())), "poly");
    const double tau = find_tau0(random_rho, *grid);
    double lmax = 0;
    for (const Jet2<double>& j : sweep_jets(random_rho, *grid)) lmax = std::max(lmax, schouten_eigen(schouten(j), j).values.maxCoeff());
    L.above("find_tau0 dilation margin tau^2/2 - max lambda", tau * tau / 2 - lmax, 0);
}

std::vector<DualRow> dual_suite(Ledger& L, const GridPtr& grid)
{
    L.suite("dual");
    const ConformalFactor rho = coordinate_factor(2, 1, 0.4, 0.15);
    const double t = admissible_dual_time(rho, *grid);
    std::vector<DualRow> rows(static_cast<std::size_t>(grid->size()));
    std::vector<double> drift(rows.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        rows[i].node = static_cast<int>(i);
        rows[i].result = schouten_inverse(rho, grid->point_vec(static_cast<int>(i)), t);
        const DualResult b = schouten_inverse(rho, grid->point_vec(static_cast<int>(i)), t + 0.3);
        drift[i] = (rows[i].result.lambda_star - b.lambda_star).cwiseAbs().maxCoeff();
    });
    double product = 0, worst_drift = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        product = std::max(product, (rows[i].result.products.array() - 1).abs().maxCoeff());
        worst_drift = std::max(worst_drift, drift[i]);
    }
    L.at_most("lambda times lambda star", product, 1e-5);
    L.at_most("independence of the flow time", worst_drift, 1e-6);
    return rows;
}

struct ChristoffelArtifacts {
    SolveOutcome half, monotone;
    BuildOutcome built;
};

ChristoffelArtifacts christoffel_suite(Ledger& L, const GridPtr& grid)
{
    L.suite("christoffel");
    SolveConfig cfg;
    cfg.L = grid->degree();
    ChristoffelArtifacts a;
    a.half = solve_nirenberg(constant_field(grid, 0.5), cfg);
    L.at_most("constant target residual", a.half.residuals.back(), 1e-10);
    L.at_most("constant target newton steps", static_cast<double>(a.half.residuals.size() - 1), 8);
    L.at_most("constant target solution is ln 2", (a.half.rho.samples.array() - std::log(2.0)).abs().maxCoeff(), 1e-10);
    a.monotone = solve_nirenberg(sample(grid, [](const Vec<double>& x) { return 2 + x(2); }), cfg);
    L.at_least("monotone target not converged", a.monotone.status != SolveStatus::Converged, 1);
    L.at_least("monotone target |KW3|", std::abs(a.monotone.kw(2)), 1.0);
    L.at_most("monotone target KW noise floor", a.monotone.kw_noise_floor, 1e-8);
    a.built = build_solution(sample(grid, p2_target), cfg);
    L.at_most("round trip christoffel mean", a.built.max_c_deviation, 1e-6);
    L.at_most("round trip horospherical metric", a.built.max_metric_deviation, 1e-6);
    L.at_most("round trip identity chain", a.built.max_identity_deviation, 1e-6);
    const double floor = std::max(a.built.solve.kw_noise_floor, 1e-14);
    L.at_most("converged KW over noise floor", a.built.solve.kw.cwiseAbs().maxCoeff() / floor, 10);
    return a;
}

std::vector<CurvatureReport> weingarten_suite(Ledger& L, std::mt19937_64& gen, int samples, const GridPtr& grid)
{
    L.suite("weingarten");
    std::uniform_real_distribution<double> omega(-8.0, 0.99), lam(0.01, 0.45), scale(0.2, 2.0);
    double inv = 0;
    for (int s = 0; s < 10 * samples; ++s) {
        Vec<double> x(3);
        for (int i = 0; i < 3; ++i) x(i) = omega(gen);
        inv = std::max(inv, (transform_T(transform_T(x)) - x).cwiseAbs().maxCoeff() / std::max(1.0, x.cwiseAbs().maxCoeff()));
    }
    L.at_most("transform involution", inv, 1e-12);
    double homog = 0, w7 = 0;
    for (int k = 1; k <= 3; ++k) {
        const WeingartenFunctional wf{k, 3};
        for (int s = 0; s < samples; ++s) {
            Vec<double> l(3);
            for (int i = 0; i < 3; ++i) l(i) = lam(gen);
            const double sc = scale(gen);
            const double f = wf.f(l);
            homog = std::max(homog, std::abs(wf.f(Vec<double>(sc * l)) - sc * f) / std::max(1.0, sc * f));
            const Vec<double> kappa = transform_T(Vec<double>(2 * l));
            const Vec<double> inner = sc * transform_T(kappa);
            if (!(inner.array() < 1).all()) continue;
            const double w = weingarten_value(wf, kappa);
            w7 = std::max(w7, std::abs(sc * w - weingarten_value(wf, transform_T(inner))) / std::max(1.0, sc * w));
        }
    }
    L.at_most("f_k homogeneity", homog, 1e-10);
    L.at_most("weingarten homogeneity law", w7, 1e-10);
    const WeingartenFunctional wf{2, 2};
    std::vector<CurvatureReport> sphere = sweep_reports(constant_factor(2, std::log(2.0)), *grid);
    const UmbilicityDiagnostic d = umbilicity_diagnostic(sphere, wf);
    L.at_most("sphere umbilicity spread", d.max_spread, 1e-10);
    L.at_most("sphere weingarten constancy", d.wein_const_dev, 1e-10);
    const ConformalFactor perturbed =
        harmonic_factor(harmonic_coefficients(2, {{0, 0, std::log(2.0) * std::sqrt(16 * std::atan(1.0))}, {2, 0, 1e-2}}));
    L.above("perturbed sphere umbilicity spread", umbilicity_diagnostic(sweep_reports(perturbed, *grid), wf).max_spread, 0);
    return sphere;
}

void input_suite(Ledger& L, const FieldSource& src, int fallback_degree)
{
    L.suite("input");
    const GridPtr grid = make_grid(src.degree(fallback_degree));
    const ConformalFactor raw = src.factor(2);
    const ConformalFactor rho = raw.shifted(std::log(find_tau0(raw, *grid)));
    double chain = 0;
    for (const CurvatureReport& r : sweep_reports(rho, *grid)) chain = std::max(chain, identity_chain_deviation(r));
    L.at_most("identity chain on the supplied factor", chain, 1e-7);
}

}  // namespace

VerifyOptions verify_options(const Config& cfg)
{
    cfg.require_keys({"L", "seed", "samples", "rho"});
    VerifyOptions o;
    o.L = cfg.get_int("L", o.L);
    const int seed = cfg.get_int("seed", 1);
    if (seed < 0) throw ParseError("seed must be non-negative");
    o.seed = static_cast<unsigned>(seed);
    o.samples = cfg.get_int("samples", o.samples);
    if (o.samples < 4) throw ParseError("samples must be at least 4");
    if (o.L < 4 || o.L > 64) throw ParseError("L must lie in 4..64");
    if (cfg.has("rho")) {
        o.rho = FieldSource::parse(cfg.get("rho", ""));
        o.rho->factor(2);
    }
    return o;
}

std::vector<VerifyCheck> run_verify_suites(const VerifyOptions& opt, const std::filesystem::path& outdir)
{
    std::mt19937_64 gen(opt.seed);
    const GridPtr grid = make_grid(opt.L);
    Ledger L("lorentz");
    lorentz_suite(L, gen, opt.samples);
    sphere_suite(L, gen, opt.samples);
    grid_suite(L, gen, grid);
    horospherical_suite(L, gen, opt.samples, grid);
    const std::vector<DualRow> dual = dual_suite(L, grid);
    const ChristoffelArtifacts chris = christoffel_suite(L, grid);
    const std::vector<CurvatureReport> sphere = weingarten_suite(L, gen, opt.samples, grid);
    if (opt.rho) input_suite(L, *opt.rho, opt.L);

    std::filesystem::create_directories(outdir);
    std::ostringstream csv;
    csv << "suite,check,value,relation,bound,pass\n";
    int failed = 0;
    const VerifyCheck* first = nullptr;
    for (const VerifyCheck& c : L.checks) {
        csv << c.suite << ',' << c.name << ',' << format_double(c.value) << ',' << relation_text(c.relation) << ','
            << format_double(c.bound) << ',' << (c.pass ? "PASS" : "FAIL") << '\n';
        if (!c.pass) {
            ++failed;
            if (!first) first = &c;
        }
    }
    write_text(outdir / "verify.csv", csv.str());
    write_report_csv(outdir / "report.csv", *grid, sphere);
    write_residuals_csv(outdir / "residuals.csv", chris.half.residuals);
    write_kw_csv(outdir / "kw.csv", chris.monotone.kw);
    write_dual_csv(outdir / "dual.csv", *grid, dual);
    write_obj(outdir / "surface.obj", chris.built.mesh);
    std::ostringstream summary;
    summary << "command = verify\nL = " << opt.L << "\nseed = " << opt.seed << "\nsamples = " << opt.samples
            << "\nchecks = " << L.checks.size() << "\nfailed = " << failed << '\n';
    if (first) summary << "first_failure = " << first->suite << ": " << first->name << '\n';
    summary << "result = " << (failed ? "FAIL" : "PASS") << '\n';
    write_text(outdir / "summary.txt", summary.str());
    return L.checks;
}

}  // namespace horolab
