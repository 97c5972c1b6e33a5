#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "horolab/christoffel.hpp"
#include "horolab/errors.hpp"
#include "horolab/horospherical.hpp"
#include "horolab/verify.hpp"
#include "horolab/weingarten.hpp"

using namespace horolab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[PRIMARY] %s %s: %s; runtime %.2f s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Vec<double> random_point(std::mt19937_64& gen, int dim)
{
    std::normal_distribution<double> nd;
    Vec<double> x(dim);
    for (int i = 0; i < dim; ++i) x(i) = nd(gen);
    return x.normalized();
}

/// Random harmonic expansion of degree <= 8 with coefficients decaying like 1/(1+l)^2.
ConformalFactor band_limited(std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(81);
    for (int l = 0; l <= 8; ++l)
        for (int m = -l; m <= l; ++m) c(l * l + l + m) = 0.8 * u(gen) / ((1.0 + l) * (1.0 + l));
    return harmonic_factor(c, "band-limited");
}

/// Oracle Schouten tensor in the jet frame: -Hess + d rho d rho - (|grad|^2 - 1)/2 g0.
Mat<double> schouten_oracle(const Jet2<double>& j)
{
    const Vec<double> d = j.frame.transpose() * j.grad;
    return -j.hess + d * d.transpose() - 0.5 * (d.squaredNorm() - 1) * Mat<double>::Identity(d.size(), d.size());
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

double p2_target(const Vec<double>& x)
{
    return 0.5 * (1 + 0.1 * (1.5 * x(2) * x(2) - 0.5));
}

}  // namespace

int main()
{
    std::mt19937_64 gen(20261018);

    criterion("geodesic-sphere oracle", [&] {
        const auto start = std::chrono::steady_clock::now();
        double worst = 0;
        for (int n : {2, 3}) {
            for (double c : {0.25, std::log(2.0), 1.0}) {
                const double kappa = -std::cosh(c) / std::sinh(c), R = (1 - std::exp(-2 * c)) / 2, lam = std::exp(-2 * c) / 2,
                             S = n * (n - 1) * std::exp(-2 * c);
                for (int s = 0; s < 50; ++s) {
                    const CurvatureReport r = curvature_report(jet2(constant_factor(n, c), random_point(gen, n + 1)));
                    for (int i = 0; i < n; ++i)
                        worst = std::max({worst, std::abs(r.kappas(i) - kappa), std::abs(r.radii(i) - R),
                                          std::abs(r.schouten_lambdas(i) - lam)});
                    worst = std::max({worst, std::abs(r.scalar - S), std::abs(r.christoffel_mean - R)});
                }
            }
        }
        const double t = elapsed_since(start);
        return Outcome{worst <= 1e-9 && t < 1, "max deviation " + num(worst) + " (tol 1e-9), time " + num(t) + " s (limit 1 s)"};
    });

    criterion("identity chain", [&] {
        const auto start = std::chrono::steady_clock::now();
        const GridPtr grid = make_grid(16);
        double analytic = 0, fd = 0;
        for (int k = 0; k < 5; ++k) {
            const ConformalFactor raw = band_limited(gen);
            const ConformalFactor rho = raw.shifted(std::log(find_tau0(raw, *grid)));
            const ConformalFactor rho_fd = rho.with_mode(JetMode::FiniteDifference);
            for (int i = 0; i < grid->size(); ++i) {
                const Vec<double> x = grid->point_vec(i);
                analytic = std::max(analytic, identity_chain_deviation(curvature_report(jet2(rho, x))));
                if (i % 4 == 0) {
                    const MeasuredForms m = measured_forms(rho_fd, x);
                    fd = std::max(fd, identity_chain_deviation(curvature_report(jet2(rho_fd, x), {m.first, m.second})));
                }
            }
        }
        const double t = elapsed_since(start);
        return Outcome{analytic <= 1e-7 && fd <= 1e-4 && t < 10,
                       "analytic " + num(analytic) + " (tol 1e-7), FD " + num(fd) + " (tol 1e-4), time " + num(t) +
                           " s (limit 10 s)"};
    });

    criterion("light-cone metric and mixed form", [&] {
        const ConformalFactor rho = band_limited(gen);
        double metric = 0, mixed = 0;
        for (int s = 0; s < 200; ++s) {
            const Vec<double> x = random_point(gen, 3);
            const Jet2<double> j = jet2(rho, x);
            const MeasuredForms m = measured_forms(rho, x);
            Vec<double> v(2);
            v << std::normal_distribution<double>()(gen), std::normal_distribution<double>()(gen);
            v.normalize();
            const double g = std::exp(2 * j.value);
            const double scale = std::max(1.0, g);
            metric = std::max(metric, std::abs(v.dot(m.horospherical * v) - g) / scale);
            mixed = std::max(mixed, std::abs(v.dot(m.mixed * v) - (g / 2 - v.dot(schouten_oracle(j) * v))) / scale);
        }
        return Outcome{metric <= 1e-5 && mixed <= 1e-5,
                       "metric " + num(metric) + ", mixed " + num(mixed) + " over 200 samples (tol 1e-5)"};
    });

    criterion("Laplacian representation", [&] {
        const ConformalFactor rho = harmonic_factor(
            harmonic_coefficients(4, {{0, 0, 1.2}, {1, 0, 0.2}, {2, 1, 0.15}, {3, -2, 0.08}, {4, 3, 0.03}}), "smooth");
        const double err = laplacian_representation_error(rho, make_grid(24));
        return Outcome{err <= 1e-4, "max componentwise error " + num(err) + " at degree 24 (tol 1e-4)"};
    });

    criterion("parallel flow", [&] {
        const GridPtr coarse = make_grid(8);
        const ConformalFactor raw = band_limited(gen);
        const ConformalFactor rho = raw.shifted(std::log(find_tau0(raw, *coarse)) + 0.2);
        double curv = 0, first = 0;
        for (double t : {0.2, 0.6, 1.0}) {
            for (int s = 0; s < 30; ++s) {
                const Vec<double> x = random_point(gen, 3);
                const FundamentalForms<double> f = fundamental_forms(jet2(rho, x));
                const SymmetricEigen<double> p = generalized_eigen(f.second, f.first);
                const MeasuredForms m = measured_forms(rho, x, t);
                const Vec<double> kt = generalized_eigen(m.second, m.first).values;
                for (int i = 0; i < 2; ++i) {
                    const double k = p.values(i);
                    const double oracle = (k * std::cosh(t) - std::sinh(t)) / (std::cosh(t) - k * std::sinh(t));
                    curv = std::max(curv, std::abs(kt(i) - oracle) / std::max(1.0, std::abs(oracle)));
                    const Vec<double> v = p.vectors.col(i);
                    const double expect = std::pow(std::cosh(t) - k * std::sinh(t), 2) * v.dot(f.first * v);
                    first = std::max(first, std::abs(v.dot(m.first * v) - expect) / std::max(1.0, expect));
                }
            }
        }
        double law = 0;
        for (double c : {0.25, std::log(2.0), 1.0})
            for (double t : {-0.1, 0.5, 1.5}) {
                const CurvatureReport r = curvature_report(jet2(constant_factor(2, c), random_point(gen, 3)));
                law = std::max(law, std::abs(christoffel_flow_mean(r.christoffel_mean, t) - (1 - std::exp(-2 * (c + t))) / 2));
            }
        return Outcome{curv <= 1e-5 && first <= 1e-5 && law <= 1e-14,
                       "curvatures " + num(curv) + ", first form " + num(first) + " (tol 1e-5), sphere flow law " + num(law) +
                           " (tol 1e-14)"};
    });

    criterion("Nirenberg solver", [&] {
        const auto start = std::chrono::steady_clock::now();
        const GridPtr grid = make_grid(16);
        SolveConfig cfg;
        const SolveOutcome half = solve_nirenberg(constant_field(grid, 0.5), cfg);
        const double ln2 = (half.rho.samples.array() - std::log(2.0)).abs().maxCoeff();
        const int steps = static_cast<int>(half.residuals.size()) - 1;
        const SolveOutcome mono = solve_nirenberg(sample(grid, [](const Vec<double>& x) { return 2 + x(2); }), cfg);
        const bool flagged = std::find(mono.kw_flagged.begin(), mono.kw_flagged.end(), 3) != mono.kw_flagged.end();
        const double t = elapsed_since(start);
        const bool pass = half.status == SolveStatus::Converged && half.residuals.back() <= 1e-10 && steps <= 8 && ln2 <= 1e-8 &&
                          mono.status != SolveStatus::Converged && flagged && std::abs(mono.kw(2)) >= 1 &&
                          mono.kw_noise_floor <= 1e-8 && t < 30;
        return Outcome{pass, "S=1/2: residual " + num(half.residuals.back()) + " in " + std::to_string(steps) +
                                 " steps, |rho - ln 2| " + num(ln2) + "; S=2+x3: " + to_string(mono.status) + ", |KW3| " +
                                 num(std::abs(mono.kw(2))) + ", floor " + num(mono.kw_noise_floor) + "; time " + num(t) +
                                 " s (limit 30 s)"};
    });

    criterion("round trip", [&] {
        const GridPtr grid = make_grid(16);
        const BuildOutcome b = build_solution(sample(grid, p2_target), SolveConfig{});
        double c = 0, metric = 0;
        const double tau2 = b.tau * b.tau;
        const Eigen::VectorXd rho = b.solve.rho.samples;
        for (int i = 0; i < grid->size(); ++i) {
            const double R = 0.5 - p2_target(grid->point_vec(i)) / (4 * tau2);
            c = std::max(c, std::abs(b.reports[static_cast<std::size_t>(i)].christoffel_mean - R) / std::max(1.0, std::abs(R)));
            const MeasuredForms m = measured_forms(harmonic_factor(*b.solve.rho.coefficients).shifted(std::log(b.tau)),
                                                   grid->point_vec(i));
            const double g = tau2 * std::exp(2 * rho(i));
            metric = std::max(metric, (m.horospherical - g * Mat<double>::Identity(2, 2)).cwiseAbs().maxCoeff() / std::max(1.0, g));
        }
        return Outcome{c <= 1e-6 && metric <= 1e-6,
                       "tau " + num(b.tau) + ", achieved C " + num(c) + ", metric " + num(metric) + " (tol 1e-6, every node)"};
    });

    criterion("Schouten inversion", [&] {
        const GridPtr grid = make_grid(12);
        const std::vector<ConformalFactor> factors = {
            coordinate_factor(2, 1, 0.4, 0.15), constant_factor(2, std::log(2.0)),
            harmonic_factor(harmonic_coefficients(2, {{0, 0, 1.6}, {1, 1, 0.12}, {2, 0, 0.05}}), "harmonic")};
        double product = 0, drift = 0;
        for (const ConformalFactor& rho : factors) {
            const double t1 = admissible_dual_time(rho, *grid);
            const double t2 = t1 + 0.2;
            for (int i = 0; i < grid->size(); ++i) {
                const Vec<double> x = grid->point_vec(i);
                const Jet2<double> j = jet2(rho, x);
                const Mat<double> sch = schouten_oracle(j);
                const Vec<double> lam = symmetric_eigen(Mat<double>(std::exp(-2 * j.value) * sch)).values;
                const DualResult a = schouten_inverse(rho, x, t1);
                const DualResult b = schouten_inverse(rho, x, t2);
                Vec<double> star = a.lambda_star;
                std::sort(star.data(), star.data() + star.size(), [](double p, double q) { return 1 / p < 1 / q; });
                for (int k = 0; k < 2; ++k) product = std::max(product, std::abs(lam(k) * star(k) - 1));
                drift = std::max(drift, (a.lambda_star - b.lambda_star).cwiseAbs().maxCoeff());
            }
        }
        return Outcome{product <= 1e-5 && drift <= 1e-6,
                       "products " + num(product) + " (tol 1e-5), drift between two t " + num(drift) + " (tol 1e-6), 3 factors"};
    });

    criterion("Weingarten suite", [&] {
        std::uniform_real_distribution<double> omega(-10.0, 0.99), lam(0.01, 0.45), scale(0.25, 3.0);
        double inv = 0, homog = 0, w7 = 0;
        for (int s = 0; s < 1000; ++s) {
            Vec<double> x(3);
            for (int i = 0; i < 3; ++i) x(i) = omega(gen);
            Vec<double> once(3), twice(3);
            for (int i = 0; i < 3; ++i) once(i) = (x(i) + 1) / (x(i) - 1);
            twice = transform_T(transform_T(x));
            inv = std::max({inv, (transform_T(x) - once).cwiseAbs().maxCoeff(),
                            (twice - x).cwiseAbs().maxCoeff() / std::max(1.0, x.cwiseAbs().maxCoeff())});
        }
        for (int n : {2, 3}) {
            for (int k = 1; k <= n; ++k) {
                const WeingartenFunctional wf{k, n};
                for (int s = 0; s < 200; ++s) {
                    Vec<double> l(n);
                    for (int i = 0; i < n; ++i) l(i) = lam(gen);
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
        }
        const GridPtr grid = make_grid(12);
        const WeingartenFunctional wf{2, 2};
        double sphere = 0;
        for (double c : {0.25, std::log(2.0), 1.0}) {
            const UmbilicityDiagnostic d = umbilicity_diagnostic(sweep_reports(constant_factor(2, c), *grid), wf);
            sphere = std::max({sphere, d.max_spread, d.wein_const_dev});
        }
        const double y00 = std::sqrt(4 * std::acos(-1.0));
        const ConformalFactor perturbed = harmonic_factor(harmonic_coefficients(2, {{0, 0, std::log(2.0) * y00}, {2, 0, 1e-2}}));
        const double spread = umbilicity_diagnostic(sweep_reports(perturbed, *grid), wf).max_spread;
        return Outcome{inv <= 1e-12 && homog <= 1e-10 && w7 <= 1e-10 && sphere <= 1e-10 && spread > 0,
                       "T involution " + num(inv) + " (tol 1e-12), f_k " + num(homog) + " (tol 1e-10), homogeneity law " +
                           num(w7) + " (tol 1e-10), sphere umbilicity " + num(sphere) + " (tol 1e-10), perturbed " +
                           num(spread) + " (> 0)"};
    });

    criterion("determinism", [&] {
        const std::filesystem::path base = std::filesystem::temp_directory_path() / "horolab_acceptance_determinism";
        std::filesystem::remove_all(base);
        const VerifyOptions opt;
        bool all_pass = true;
        for (const char* threads : {"1", "4"}) {
            setenv("HOROLAB_THREADS", threads, 1);
            for (int run = 0; run < 2; ++run)
                for (const VerifyCheck& c : run_verify_suites(opt, base / (std::string(threads) + "_" + std::to_string(run))))
                    all_pass = all_pass && c.pass;
        }
        unsetenv("HOROLAB_THREADS");
        int files = 0, differing = 0;
        for (const auto& entry : std::filesystem::directory_iterator(base / "1_0")) {
            const std::string ref = slurp(entry.path());
            ++files;
            for (const char* other : {"1_1", "4_0", "4_1"})
                differing += slurp(base / other / entry.path().filename()) != ref;
        }
        return Outcome{differing == 0 && files >= 7 && all_pass,
                       std::to_string(files) + " files x 4 runs, " + std::to_string(differing) + " differing, suites " +
                           (all_pass ? "pass" : "fail")};
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
