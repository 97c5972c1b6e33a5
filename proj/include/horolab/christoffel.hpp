#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "horolab/grid.hpp"
#include "horolab/horospherical.hpp"

namespace horolab {

/// S = n(n-1)(1 - 2C).
ScalarField christoffel_to_scalar(const ScalarField& C, int n);
/// C = (1 - S / (tau^2 n(n-1))) / 2.
ScalarField scalar_to_christoffel(const ScalarField& S, double tau, int n);

struct SolveConfig {
    int L = 16;
    double tol = 1e-10;
    int max_iter = 30;
    double damping = 0.5;
    /// Harmonic coefficients of the starting rho; zero when absent.
    std::optional<Eigen::VectorXd> initial;
};

enum class SolveStatus { Converged, Diverged, ObstructionSuspected };
const char* to_string(SolveStatus s);

struct SolveOutcome {
    SolveStatus status = SolveStatus::Diverged;
    /// Final iterate (best-residual iterate when not converged), with coefficients.
    ScalarField rho;
    /// Sup-norm nodal residual of every accepted iterate, starting with the initial guess.
    std::vector<double> residuals;
    std::vector<double> damping;
    /// Kazdan-Warner integrals of the target against rho, i = 1..3.
    Eigen::VectorXd kw;
    double kw_noise_floor = 0;
    std::vector<int> kw_flagged;
};

/// -Delta rho + 1 - (e^{2 rho}/2) S at the nodes, rho given by harmonic coefficients.
Eigen::VectorXd nirenberg_residual(const GridPtr& grid, const Eigen::VectorXd& rho_coefficients, const ScalarField& S);

SolveOutcome solve_nirenberg(const ScalarField& S, const SolveConfig& cfg);

/// n * integral of F e^{n rho} (x_i - g0(grad rho, grad x_i)) dv0, which equals
/// integral of g0(grad F, grad x_i) dv_g after integrating by parts.
Eigen::VectorXd kazdan_warner(const ScalarField& F, const ScalarField& rho);
/// integral of g0(grad F, grad x_i) e^{n rho} dv0 with grad F from the harmonic expansion of F.
Eigen::VectorXd kazdan_warner_direct(const ScalarField& F, const ScalarField& rho);
/// Largest |KW_i(S_rho, rho)| where S_rho is the scalar curvature of e^{2 rho} g0 itself.
double kazdan_warner_noise_floor(const ScalarField& rho);

/// Scalar curvature of e^{2 rho} g0 at the nodes.
ScalarField scalar_curvature_field(const ScalarField& rho);

struct BuildOutcome {
    SolveOutcome solve;
    double tau = 1;
    std::vector<CurvatureReport> reports;
    std::vector<SurfaceFrame<double>> frames;
    Mesh mesh;
    ScalarField expected_c;
    double max_c_deviation = 0;
    double max_metric_deviation = 0;
    double max_identity_deviation = 0;
};

/// Solve, dilate by find_tau0 and realize the hypersurface; throws SolveFailed
/// when the solve does not converge and InvariantViolation when a node check fails.
BuildOutcome build_solution(const ScalarField& S, const SolveConfig& cfg);
/// The realization half of build_solution for an existing converged solve.
BuildOutcome realize_solution(const ScalarField& S, SolveOutcome solved);

/// Pointwise checks on a regular factor at every node of `grid`; used by build_solution.
struct RealizationChecks {
    std::vector<CurvatureReport> reports;
    std::vector<SurfaceFrame<double>> frames;
    double max_metric_deviation = 0;
    double max_identity_deviation = 0;
};
/// `expected_metric` holds the conformal factor of the expected horospherical metric per node;
/// when empty, e^{2 rho} at the node is used.
RealizationChecks realize(const ConformalFactor& rho, const SphereGrid& grid,
                          const Eigen::VectorXd& expected_metric = Eigen::VectorXd());

/// Largest |a - b| / max(1, |a|) among: S against n(n-1) - 2(n-1) sum R_i and 2(n-1) sum lambda_i;
/// Schouten lambda_i against 1/2 - R_i, -(1 + kappa_i)/(2(1 - kappa_i)) and T(kappa_i)/2.
double identity_chain_deviation(const CurvatureReport& r);

Mesh mesh_for(const ConformalFactor& rho, const SphereGrid& grid, const std::vector<SurfaceFrame<double>>& frames);

}  // namespace horolab
