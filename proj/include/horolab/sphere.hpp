#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "horolab/errors.hpp"
#include "horolab/symmetric_eigen.hpp"

namespace horolab {

/// Unit vector of R^{n+1}.
template <typename Scalar>
using SpherePoint = Vec<Scalar>;

template <typename Derived>
void require_on_sphere(const Eigen::MatrixBase<Derived>& x, const char* where)
{
    using std::abs;
    if (x.size() < 3) throw DimensionMismatch(std::string(where) + ": sphere dimension must be at least 2");
    if (!(abs(static_cast<double>(x.squaredNorm()) - 1.0) <= 2e-12))
        throw DomainViolation(std::string(where) + ": point is not on the unit sphere");
}

/// g0-orthonormal tangent frame at x as the columns of an (n+1) x n matrix.
/// Built from the n ambient axes with smallest |x_k| (ties to the lower index),
/// each projected off x and Gram-Schmidt orthonormalized in that order.
template <typename Derived>
Mat<typename Derived::Scalar> tangent_frame(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    using std::abs;
    const Eigen::Index dim = x.size();
    std::vector<Eigen::Index> axes(static_cast<std::size_t>(dim));
    std::iota(axes.begin(), axes.end(), Eigen::Index(0));
    std::stable_sort(axes.begin(), axes.end(), [&](Eigen::Index a, Eigen::Index b) { return abs(x(a)) < abs(x(b)); });
    Mat<Scalar> frame(dim, dim - 1);
    for (Eigen::Index c = 0; c < dim - 1; ++c) {
        Vec<Scalar> v = Vec<Scalar>::Unit(dim, axes[static_cast<std::size_t>(c)]);
        v -= x.dot(v) * x;
        for (Eigen::Index p = 0; p < c; ++p) v -= frame.col(p).dot(v) * frame.col(p);
        frame.col(c) = v / v.norm();
    }
    return frame;
}

/// Value, ambient sphere gradient and covariant Hessian (in `frame`) of a function on S^n.
template <typename Scalar>
struct Jet2 {
    SpherePoint<Scalar> x;
    Mat<Scalar> frame;
    Scalar value{};
    Vec<Scalar> grad;
    Mat<Scalar> hess;

    int n() const { return static_cast<int>(frame.cols()); }
    /// Gradient components in the frame.
    Vec<Scalar> grad_frame() const { return frame.transpose() * grad; }
    Scalar grad_norm2() const { return grad.squaredNorm(); }
};

/// Value, Euclidean gradient and Euclidean Hessian of a function on R^{n+1}.
template <typename Scalar>
struct AmbientJet {
    Scalar value{};
    Vec<Scalar> grad;
    Mat<Scalar> hess;
};

/// Restriction of an ambient function to the sphere: the gradient is the tangential
/// projection and the covariant Hessian picks up -(x . DF) g0 from the curvature of S^n.
template <typename Scalar>
Jet2<Scalar> restrict_to_sphere(const AmbientJet<Scalar>& f, const SpherePoint<Scalar>& x)
{
    Jet2<Scalar> j;
    j.x = x;
    j.frame = tangent_frame(x);
    j.value = f.value;
    const Scalar radial = x.dot(f.grad);
    j.grad = f.grad - radial * x;
    j.hess = j.frame.transpose() * f.hess * j.frame - radial * Mat<Scalar>::Identity(j.n(), j.n());
    j.hess = (j.hess + j.hess.transpose()).eval() / Scalar(2);
    return j;
}

enum class JetMode { Analytic, FiniteDifference };

/// A conformal factor rho on S^n. `jet` is the analytic 2-jet when available.
struct ConformalFactor {
    int n = 2;
    std::function<double(const Vec<double>&)> value;
    std::function<Jet2<double>(const Vec<double>&)> jet;
    JetMode mode = JetMode::Analytic;
    std::string label;

    double operator()(const Vec<double>& x) const { return value(x); }
    ConformalFactor with_mode(JetMode m) const
    {
        ConformalFactor out = *this;
        out.mode = m;
        return out;
    }
    /// rho + t.
    ConformalFactor shifted(double t) const;
};

ConformalFactor constant_factor(int n, double c);
/// rho = a + b x_i with i in 1..n+1.
ConformalFactor coordinate_factor(int n, int i, double a, double b);
/// Restriction to S^n of an ambient function given with its derivatives.
ConformalFactor ambient_factor(int n, std::function<AmbientJet<double>(const Vec<double>&)> f, std::string label);
/// A factor known only through its values; jets come from finite differences.
ConformalFactor sampled_factor(int n, std::function<double(const Vec<double>&)> f, std::string label);

inline constexpr double kGradientStep = 1e-5;
inline constexpr double kHessianStep = 1e-3;

/// Chart centered at x: u -> ((1 - |u|^2/4) x + sum u_i e_i) / (1 + |u|^2/4).
/// Its metric is the identity at the center and has vanishing first derivatives there.
template <typename Scalar>
Vec<Scalar> chart_point(const SpherePoint<Scalar>& x, const Mat<Scalar>& frame, const Vec<Scalar>& u)
{
    const Scalar s = u.squaredNorm() / Scalar(4);
    return ((Scalar(1) - s) * x + frame * u) / (Scalar(1) + s);
}

/// Central-difference jet in the chart centered at x.
Jet2<double> fd_jet(const std::function<double(const Vec<double>&)>& f, const Vec<double>& x,
                    double h_grad = kGradientStep, double h_hess = kHessianStep);

Jet2<double> jet2(const ConformalFactor& rho, const Vec<double>& x);

template <typename Scalar>
Scalar laplacian_g0(const Jet2<Scalar>& j)
{
    return j.hess.trace();
}

/// Scalar curvature of e^{2 rho} g0.
template <typename Scalar>
Scalar scalar_curvature(const Jet2<Scalar>& j)
{
    using std::exp;
    const Scalar n(j.n());
    return 2 * (n - 1) * exp(-2 * j.value) * (n / 2 - laplacian_g0(j) - (n - 2) / 2 * j.grad_norm2());
}

/// Schouten tensor of e^{2 rho} g0 as a matrix in the jet's frame.
template <typename Scalar>
Mat<Scalar> schouten(const Jet2<Scalar>& j)
{
    const Vec<Scalar> d = j.grad_frame();
    const Eigen::Index n = j.n();
    Mat<Scalar> sch = -j.hess + d * d.transpose() - (j.grad_norm2() - Scalar(1)) / Scalar(2) * Mat<Scalar>::Identity(n, n);
    return (sch + sch.transpose()).eval() / Scalar(2);
}

/// Eigenvalues of g^{-1} Sch_g, ascending, with frame-coordinate eigenvectors.
template <typename Scalar>
SymmetricEigen<Scalar> schouten_eigen(const Mat<Scalar>& sch, const Jet2<Scalar>& j)
{
    using std::exp;
    return symmetric_eigen(Mat<Scalar>(exp(-2 * j.value) * sch));
}

template <typename Scalar>
Mat<Scalar> metric_matrix(const Jet2<Scalar>& j)
{
    using std::exp;
    return exp(2 * j.value) * Mat<Scalar>::Identity(j.n(), j.n());
}

/// A polynomial on R^{n+1}: sum of coefficient * prod x_k^{e_k}.
struct AmbientPolynomial {
    struct Term {
        std::vector<int> exponents;
        double coefficient = 0;
    };
    int dim = 3;
    std::vector<Term> terms;

    AmbientJet<double> evaluate(const Vec<double>& p) const;
    int degree() const;
};

/// Random polynomial of total degree at most `degree` in n+1 variables; coefficients
/// are uniform in [-1, 1] scaled by amplitude / (1 + total degree)^2.
AmbientPolynomial random_polynomial(int n, int degree, double amplitude, unsigned seed);

ConformalFactor polynomial_factor(int n, const AmbientPolynomial& p, std::string label);

}  // namespace horolab
