#include "horolab/christoffel.hpp"

#include <algorithm>
#include <cmath>

#include "horolab/parallel.hpp"

namespace horolab {

ScalarField christoffel_to_scalar(const ScalarField& C, int n)
{
    ScalarField S{C.grid, (n * (n - 1.0)) * (1.0 - 2.0 * C.samples.array()).matrix(), std::nullopt};
    return S;
}

ScalarField scalar_to_christoffel(const ScalarField& S, double tau, int n)
{
    if (!(tau > 0)) throw DomainViolation("scalar_to_christoffel: tau must be positive");
    ScalarField C{S.grid, (0.5 * (1.0 - S.samples.array() / (tau * tau * n * (n - 1.0)))).matrix(), std::nullopt};
    return C;
}

const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Converged:
        return "Converged";
    case SolveStatus::Diverged:
        return "Diverged";
    case SolveStatus::ObstructionSuspected:
        return "ObstructionSuspected";
    }
    return "Unknown";
}

namespace {

Eigen::VectorXd laplacian_coefficients(const Eigen::VectorXd& c)
{
    Eigen::VectorXd out = c;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const int l = SphereGrid::degree_of(static_cast<int>(k));
        out(k) *= -double(l) * (l + 1);
    }
    return out;
}

double sup_norm(const Eigen::VectorXd& v)
{
    return v.cwiseAbs().maxCoeff();
}

/// Tangential gradient of the harmonic expansion at every node, as rows.
Eigen::MatrixXd spectral_gradient(const GridPtr& grid, const Eigen::VectorXd& c)
{
    Eigen::MatrixXd g(grid->size(), 3);
    parallel_for(static_cast<std::size_t>(grid->size()), [&](std::size_t i) {
        const Vec<double> x = grid->point_vec(static_cast<int>(i));
        const AmbientJet<double> a = harmonic_expansion_jet(c, x);
        g.row(static_cast<Eigen::Index>(i)) = (a.grad - x.dot(a.grad) * x).transpose();
    });
    return g;
}

Eigen::VectorXd coefficients_of(const ScalarField& f)
{
    return f.coefficients ? *f.coefficients : analyze(f);
}

}  // namespace

Eigen::VectorXd nirenberg_residual(const GridPtr& grid, const Eigen::VectorXd& c, const ScalarField& S)
{
    const Eigen::VectorXd rho = synthesize(grid, c).samples;
    const Eigen::VectorXd lap = synthesize(grid, laplacian_coefficients(c)).samples;
    return (-lap.array() + 1.0 - 0.5 * (2.0 * rho.array()).exp() * S.samples.array()).matrix();
}

ScalarField scalar_curvature_field(const ScalarField& rho)
{
    const Eigen::VectorXd c = coefficients_of(rho);
    const Eigen::VectorXd values = synthesize(rho.grid, c).samples;
    const Eigen::VectorXd lap = synthesize(rho.grid, laplacian_coefficients(c)).samples;
    return ScalarField{rho.grid, (2.0 * (-2.0 * values.array()).exp() * (1.0 - lap.array())).matrix(), std::nullopt};
}

Eigen::VectorXd kazdan_warner(const ScalarField& F, const ScalarField& rho)
{
    const GridPtr& grid = rho.grid;
    const Eigen::MatrixXd grad = spectral_gradient(grid, coefficients_of(rho));
    const int n = 2;
    Eigen::VectorXd out(3);
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd integrand(grid->size());
        for (int node = 0; node < grid->size(); ++node) {
            const double xi = grid->point(node)(i);
            integrand(node) = n * F.samples(node) * std::exp(n * rho.samples(node)) * (xi - grad(node, i));
        }
        out(i) = weighted_sum(grid->weights(), integrand);
    }
    return out;
}

Eigen::VectorXd kazdan_warner_direct(const ScalarField& F, const ScalarField& rho)
{
    const GridPtr& grid = rho.grid;
    const Eigen::MatrixXd grad = spectral_gradient(grid, coefficients_of(F));
    Eigen::VectorXd out(3);
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd integrand(grid->size());
        for (int node = 0; node < grid->size(); ++node) integrand(node) = grad(node, i) * std::exp(2 * rho.samples(node));
        out(i) = weighted_sum(grid->weights(), integrand);
    }
    return out;
}

double kazdan_warner_noise_floor(const ScalarField& rho)
{
    return kazdan_warner(scalar_curvature_field(rho), rho).cwiseAbs().maxCoeff();
}

SolveOutcome solve_nirenberg(const ScalarField& S, const SolveConfig& cfg)
{
    if (!(cfg.tol > 0)) throw DomainViolation("solve_nirenberg: tolerance must be positive");
    if (cfg.max_iter < 1) throw DomainViolation("solve_nirenberg: max_iter must be at least 1");
    if (!(cfg.damping > 0 && cfg.damping <= 1)) throw DomainViolation("solve_nirenberg: damping must lie in (0, 1]");
    const GridPtr grid = S.grid;
    if (grid->degree() != cfg.L) throw DimensionMismatch("solve_nirenberg: target grid degree differs from L");
    const Eigen::MatrixXd& B = grid->basis();
    const int K = grid->harmonics();

    Eigen::VectorXd c = Eigen::VectorXd::Zero(K);
    if (cfg.initial) {
        if (cfg.initial->size() > K) throw DimensionMismatch("solve_nirenberg: initial guess exceeds grid degree");
        c.head(cfg.initial->size()) = *cfg.initial;
    }
    Eigen::VectorXd stiffness(K);
    for (int k = 0; k < K; ++k) {
        const int l = SphereGrid::degree_of(k);
        stiffness(k) = double(l) * (l + 1);
    }

    SolveOutcome out;
    Eigen::VectorXd F = nirenberg_residual(grid, c, S);
    double r = sup_norm(F);
    out.residuals.push_back(r);
    out.damping.push_back(0);
    Eigen::VectorXd best = c;
    double best_r = r;
    double alpha = cfg.damping;
    bool converged = r <= cfg.tol;

    for (int it = 0; it < cfg.max_iter && !converged; ++it) {
        const Eigen::VectorXd rho = B * c;
        const Eigen::VectorXd w = grid->weights().cwiseProduct((2.0 * rho.array()).exp().matrix()).cwiseProduct(S.samples);
        Eigen::MatrixXd J = -B.transpose() * w.asDiagonal() * B;
        J.diagonal() += stiffness;
        const Eigen::VectorXd rhs = analyze(ScalarField{grid, F, std::nullopt});
        Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-10);
        const Eigen::VectorXd step = -svd.solve(rhs);
        if (!step.allFinite()) break;

        double a = alpha;
        Eigen::VectorXd trial;
        Eigen::VectorXd trial_F;
        double trial_r = 0;
        bool improved = false;
        for (int halving = 0; halving < 30; ++halving) {
            trial = c + a * step;
            trial_F = nirenberg_residual(grid, trial, S);
            trial_r = sup_norm(trial_F);
            if (std::isfinite(trial_r) && trial_r < r) {
                improved = true;
                break;
            }
            a /= 2;
        }
        if (!std::isfinite(trial_r)) break;
        c = trial;
        F = trial_F;
        r = trial_r;
        out.residuals.push_back(r);
        out.damping.push_back(a);
        alpha = improved ? std::min(1.0, 2 * a) : a;
        if (r < best_r) {
            best_r = r;
            best = c;
        }
        converged = r <= cfg.tol;
    }

    const Eigen::VectorXd& final_c = converged ? c : best;
    out.rho = synthesize(grid, final_c);
    out.rho.coefficients = final_c;
    out.kw = kazdan_warner(S, out.rho);
    out.kw_noise_floor = kazdan_warner_noise_floor(out.rho);
    if (converged) {
        out.status = SolveStatus::Converged;
    } else {
        const double floor = std::max(out.kw_noise_floor, 1e-14);
        for (int i = 0; i < 3; ++i)
            if (std::abs(out.kw(i)) > 10 * floor) out.kw_flagged.push_back(i + 1);
        out.status = out.kw_flagged.empty() ? SolveStatus::Diverged : SolveStatus::ObstructionSuspected;
    }
    return out;
}

double identity_chain_deviation(const CurvatureReport& r)
{
    const int n = static_cast<int>(r.kappas.size());
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
    double worst = 0;
    worst = std::max(worst, rel(r.scalar, n * (n - 1.0) - 2 * (n - 1.0) * r.radii.sum()));
    worst = std::max(worst, rel(r.scalar, 2 * (n - 1.0) * r.schouten_lambdas.sum()));
    const Vec<double> half_t = transform_T(r.kappas) / 2;
    for (int i = 0; i < n; ++i) {
        const double k = r.kappas(i);
        const double lam = r.schouten_lambdas(i);
        worst = std::max(worst, rel(lam, 0.5 - r.radii(i)));
        worst = std::max(worst, rel(lam, -(1 + k) / (2 * (1 - k))));
        worst = std::max(worst, rel(lam, half_t(i)));
    }
    return worst;
}

RealizationChecks realize(const ConformalFactor& rho, const SphereGrid& grid, const Eigen::VectorXd& expected_metric)
{
    const std::size_t N = static_cast<std::size_t>(grid.size());
    if (expected_metric.size() != 0 && expected_metric.size() != grid.size())
        throw DimensionMismatch("realize: expected metric has the wrong length");
    RealizationChecks out;
    out.reports.resize(N);
    out.frames.resize(N);
    std::vector<double> metric_dev(N), identity_dev(N);
    parallel_for(N, [&](std::size_t i) {
        const Vec<double> x = grid.point_vec(static_cast<int>(i));
        const Jet2<double> j = jet2(rho, x);
        out.reports[i] = curvature_report(j);
        out.frames[i] = represent(j);
        const double factor = expected_metric.size() ? expected_metric(static_cast<Eigen::Index>(i)) : std::exp(2 * j.value);
        const MeasuredForms m = measured_forms(rho, x);
        const Mat<double> expect = factor * Mat<double>::Identity(j.n(), j.n());
        metric_dev[i] = (m.horospherical - expect).cwiseAbs().maxCoeff() / std::max(1.0, factor);
        identity_dev[i] = identity_chain_deviation(out.reports[i]);
    });
    for (std::size_t i = 0; i < N; ++i) {
        out.max_metric_deviation = std::max(out.max_metric_deviation, metric_dev[i]);
        out.max_identity_deviation = std::max(out.max_identity_deviation, identity_dev[i]);
    }
    return out;
}

Mesh mesh_for(const ConformalFactor& rho, const SphereGrid& grid, const std::vector<SurfaceFrame<double>>& frames)
{
    const Vec<double> north = Vec<double>::Unit(3, 2);
    return poincare_mesh(frames, represent(jet2(rho, north)), represent(jet2(rho, Vec<double>(-north))), grid);
}

BuildOutcome build_solution(const ScalarField& S, const SolveConfig& cfg)
{
    return realize_solution(S, solve_nirenberg(S, cfg));
}

BuildOutcome realize_solution(const ScalarField& S, SolveOutcome solved)
{
    BuildOutcome out;
    out.solve = std::move(solved);
    if (out.solve.status != SolveStatus::Converged)
        throw SolveFailed(std::string("build_solution: Nirenberg solve ended with status ") + to_string(out.solve.status));
    const GridPtr grid = S.grid;
    const ConformalFactor rho = harmonic_factor(*out.solve.rho.coefficients, "solution");
    out.tau = find_tau0(rho, *grid);
    const ConformalFactor rho_tau = rho.shifted(std::log(out.tau));
    const Eigen::VectorXd expected_metric = out.tau * out.tau * (2.0 * out.solve.rho.samples.array()).exp().matrix();
    RealizationChecks checks = realize(rho_tau, *grid, expected_metric);
    out.reports = std::move(checks.reports);
    out.frames = std::move(checks.frames);
    out.max_metric_deviation = checks.max_metric_deviation;
    out.max_identity_deviation = checks.max_identity_deviation;
    out.expected_c = scalar_to_christoffel(S, out.tau, 2);
    for (int i = 0; i < grid->size(); ++i) {
        const double expect = out.expected_c.samples(i);
        const double got = out.reports[static_cast<std::size_t>(i)].christoffel_mean;
        out.max_c_deviation = std::max(out.max_c_deviation, std::abs(got - expect) / std::max(1.0, std::abs(expect)));
    }
    out.mesh = mesh_for(rho_tau, *grid, out.frames);
    if (out.max_c_deviation > 1e-6) throw InvariantViolation("build_solution: Christoffel mean deviates from the target");
    if (out.max_metric_deviation > 1e-6)
        throw InvariantViolation("build_solution: horospherical metric deviates from tau^2 e^{2 rho} g0");
    if (out.max_identity_deviation > 1e-6) throw InvariantViolation("build_solution: identity chain violated");
    return out;
}

}  // namespace horolab
