#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "horolab/grid.hpp"
#include "horolab/lorentz.hpp"
#include "horolab/sphere.hpp"
#include "horolab/weingarten.hpp"

namespace horolab {

/// psi = e^rho (1, x).
template <typename Scalar, typename Derived>
LorentzVector<Scalar> light_cone_map(Scalar rho, const Eigen::MatrixBase<Derived>& x)
{
    using std::exp;
    LorentzVector<Scalar> psi(x.size() + 1);
    psi(0) = Scalar(1);
    psi.tail(x.size()) = x;
    return exp(rho) * psi;
}

/// phi in H^{n+1}, unit normal eta, and psi = phi + eta on the light cone.
template <typename Scalar>
struct SurfaceFrame {
    SpherePoint<Scalar> x;
    LorentzVector<Scalar> phi, eta, psi;
};

template <typename Scalar>
SurfaceFrame<Scalar> represent(const Jet2<Scalar>& j)
{
    using std::exp;
    const Eigen::Index dim = j.x.size();
    SurfaceFrame<Scalar> f;
    f.x = j.x;
    f.psi = light_cone_map(j.value, j.x);
    LorentzVector<Scalar> one_x(dim + 1), tangent(dim + 1);
    one_x << Scalar(1), j.x;
    tangent << Scalar(0), j.grad - j.x;
    const Scalar e = exp(j.value);
    f.phi = (e / 2) * (Scalar(1) + (Scalar(1) + j.grad_norm2()) / (e * e)) * one_x + tangent / e;
    f.eta = f.psi - f.phi;
    return f;
}

/// phi_t = e^{-t} phi + sinh(t) psi, psi_t = e^t psi.
template <typename Scalar>
SurfaceFrame<Scalar> parallel_flow(const SurfaceFrame<Scalar>& f, Scalar t)
{
    using std::exp;
    using std::sinh;
    SurfaceFrame<Scalar> out;
    out.x = f.x;
    out.phi = exp(-t) * f.phi + sinh(t) * f.psi;
    out.psi = exp(t) * f.psi;
    out.eta = out.psi - out.phi;
    return out;
}

/// 1/2 - (e^{-2t}/2)(1 - 2C).
template <typename Scalar>
Scalar christoffel_flow_mean(Scalar C, Scalar t)
{
    using std::exp;
    return Scalar(0.5) - exp(-2 * t) / 2 * (Scalar(1) - 2 * C);
}

/// (kappa - tanh t) / (1 - kappa tanh t).
template <typename Scalar>
Scalar flowed_curvature(Scalar kappa, Scalar t)
{
    using std::tanh;
    const Scalar th = tanh(t);
    return (kappa - th) / (Scalar(1) - kappa * th);
}

/// A = g - 2 Sch_g in the jet frame.
template <typename Scalar>
Mat<Scalar> regularity_matrix(const Jet2<Scalar>& j)
{
    return metric_matrix(j) - 2 * schouten(j);
}

template <typename Scalar>
struct FundamentalForms {
    Mat<Scalar> first, second;
};

/// I = (e^{-2 rho}/4) A^2 and II = I - g/2 + Sch_g, as frame matrices.
template <typename Scalar>
FundamentalForms<Scalar> fundamental_forms(const Jet2<Scalar>& j)
{
    using std::exp;
    const Mat<Scalar> sch = schouten(j);
    const Mat<Scalar> g = metric_matrix(j);
    const Mat<Scalar> a = g - 2 * sch;
    FundamentalForms<Scalar> out;
    out.first = exp(-2 * j.value) / Scalar(4) * a * a;
    out.first = (out.first + out.first.transpose()).eval() / Scalar(2);
    out.second = out.first - g / Scalar(2) + sch;
    return out;
}

struct Regularity {
    /// g - 2 Sch_g positive definite.
    bool regular = false;
    /// g - 2 Sch_g invertible, equivalently I positive definite.
    bool nonsingular = false;
    double min_eig = 0;
    double min_abs_eig = 0;
    double threshold = 0;
};

inline double regularity_threshold(double rho)
{
    return 1e-8 * (1 + std::exp(2 * rho));
}

Regularity regularity(const Jet2<double>& j);

struct CurvatureReport {
    Vec<double> x;
    /// Ascending.
    Vec<double> kappas;
    Vec<double> radii;
    /// 1/2 - R_i, paired with kappas.
    Vec<double> lambdas;
    /// Eigenvalues of g^{-1} Sch_g matched to kappas by eigendirection.
    Vec<double> schouten_lambdas;
    Vec<double> signed_contact;
    Vec<double> dilation;
    std::vector<bool> dilation_valid;
    double christoffel_mean = 0;
    double scalar = 0;
    /// sigma_1..sigma_n of the lambdas.
    Vec<double> sigma;
    bool horospherically_convex = false;
    bool canonical = false;
    bool strongly_h_convex = false;
    bool umbilic = false;
    /// Largest 1 - |cos| between matched principal and Schouten directions; 0 at umbilics.
    double direction_mismatch = 0;
    Regularity regularity;
};

inline constexpr double kUmbilicThreshold = 1e-7;

/// Principal data from the generalized eigenproblem II v = kappa I v.
CurvatureReport curvature_report(const Jet2<double>& j);
/// Same, from given forms; `jet` supplies rho, the Schouten tensor and the point.
CurvatureReport curvature_report(const Jet2<double>& j, const FundamentalForms<double>& forms);

/// (1/n) sum arccoth|kappa_i|; checked against -log(2^n sigma_n(lambda)) / (2n).
double contact_mean(const CurvatureReport& r);

/// Differentials of the frame maps along the chart frame at x, by central differences
/// of the frames at neighboring points (each built from its own jet).
struct MeasuredForms {
    Mat<double> dphi, deta, dpsi;
    Mat<double> first, second, mixed, horospherical;
};

MeasuredForms measured_forms(const ConformalFactor& rho, const Vec<double>& x, double t = 0,
                             double h = kGradientStep);

/// Lorentz Gram matrix <a_i, b_j> of column sets.
Mat<double> lorentz_gram(const Mat<double>& a, const Mat<double>& b);

/// Smallest tau = 2^k (k = 0..20) making rho + ln tau regular at every node.
double find_tau0(const ConformalFactor& rho, const SphereGrid& grid);

/// Reports at every grid node, in node order.
std::vector<CurvatureReport> sweep_reports(const ConformalFactor& rho, const SphereGrid& grid);
std::vector<Jet2<double>> sweep_jets(const ConformalFactor& rho, const SphereGrid& grid);

struct DualResult {
    Vec<double> lambdas;
    /// Paired with lambdas; the public contract is lambda_star = 1 / lambda.
    Vec<double> lambda_star;
    Vec<double> products;
    double t = 0;
};

/// Schouten eigenvalues of the metric of the negative Gauss map branch of the t-flowed
/// hypersurface, rescaled and multiplied by 4.
DualResult schouten_inverse(const ConformalFactor& rho, const Vec<double>& x, double t);
/// t chosen from find_tau0 on `grid`.
DualResult schouten_inverse(const ConformalFactor& rho, const Vec<double>& x, const SphereGrid& grid);
double admissible_dual_time(const ConformalFactor& rho, const SphereGrid& grid);

inline constexpr double kZeroEigenvalueThreshold = 1e-6;

/// Max over nodes and components of |(1/n) Delta^g psi + (S + n(n-1))/(2n(n-1)) psi - phi|,
/// with Delta^g psi computed spectrally on the grid (n = 2).
double laplacian_representation_error(const ConformalFactor& rho, const GridPtr& grid);

struct Mesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;
};

/// Poincare-ball image phi_vec / (1 + phi_0) of the frames at the nodes plus the two poles.
Mesh poincare_mesh(const std::vector<SurfaceFrame<double>>& node_frames, const SurfaceFrame<double>& north,
                   const SurfaceFrame<double>& south, const SphereGrid& grid);

}  // namespace horolab
