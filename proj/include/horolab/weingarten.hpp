#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "horolab/errors.hpp"
#include "horolab/symmetric_eigen.hpp"

namespace horolab {

/// Elementary symmetric function S_k; S_0 = 1.
template <typename Derived>
typename Derived::Scalar sigma_k(const Eigen::MatrixBase<Derived>& x, int k)
{
    using Scalar = typename Derived::Scalar;
    const int n = static_cast<int>(x.size());
    if (k < 0 || k > n) throw DomainViolation("sigma_k: k must lie in 0..n");
    std::vector<Scalar> e(static_cast<std::size_t>(k + 1), Scalar(0));
    e[0] = Scalar(1);
    for (int i = 0; i < n; ++i)
        for (int j = std::min(k, i + 1); j >= 1; --j) e[j] += x(i) * e[j - 1];
    return e[static_cast<std::size_t>(k)];
}

/// Componentwise (x + 1)/(x - 1) on {x_i < 1}.
template <typename Derived>
Vec<typename Derived::Scalar> transform_T(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    Vec<Scalar> out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x(i) < Scalar(1))) throw DomainViolation("transform_T: component not below 1");
        out(i) = (x(i) + Scalar(1)) / (x(i) - Scalar(1));
    }
    return out;
}

enum class ConeKind { GammaK, GammaN, Gamma1 };

struct ConeSpec {
    ConeKind kind = ConeKind::GammaK;
    int k = 1;
    int n = 2;

    static ConeSpec gamma(int k, int n);
};

inline ConeSpec ConeSpec::gamma(int k, int n)
{
    if (k < 1 || k > n) throw DomainViolation("cone: k must lie in 1..n");
    if (k == n) return {ConeKind::GammaN, k, n};
    if (k == 1) return {ConeKind::Gamma1, k, n};
    return {ConeKind::GammaK, k, n};
}

/// Gamma_k as {S_j > 0 for all j <= k}; Gamma_n as the positive cone; Gamma_1 as {S_1 > 0}.
template <typename Derived>
bool cone_contains(const ConeSpec& cone, const Eigen::MatrixBase<Derived>& x)
{
    if (x.size() != cone.n) throw DimensionMismatch("cone_contains: vector length differs from cone dimension");
    switch (cone.kind) {
    case ConeKind::GammaN:
        return (x.array() > 0).all();
    case ConeKind::Gamma1:
        return x.sum() > 0;
    case ConeKind::GammaK:
        for (int j = 1; j <= cone.k; ++j)
            if (!(sigma_k(x, j) > 0)) return false;
        return true;
    }
    return false;
}

/// f_k = S_k^{1/k} on Gamma_k.
struct WeingartenFunctional {
    int k = 1;
    int n = 2;

    ConeSpec cone() const { return ConeSpec::gamma(k, n); }

    template <typename Derived>
    typename Derived::Scalar f(const Eigen::MatrixBase<Derived>& x) const
    {
        using std::pow;
        if (!cone_contains(cone(), x)) throw DomainViolation("f_k: argument outside Gamma_k");
        return pow(sigma_k(x, k), typename Derived::Scalar(1) / typename Derived::Scalar(k));
    }

    /// f evaluated at the closure of Gamma_k: returns 0 where S_k vanishes.
    template <typename Derived>
    typename Derived::Scalar f_closure(const Eigen::MatrixBase<Derived>& x) const
    {
        using std::max;
        using std::pow;
        using Scalar = typename Derived::Scalar;
        return pow(max(Scalar(0), sigma_k(x, k)), Scalar(1) / Scalar(k));
    }
};

/// W(kappa) = f(T(kappa) / 2), defined on Gamma* = T(Gamma cap Omega).
template <typename Derived>
typename Derived::Scalar weingarten_value(const WeingartenFunctional& wf, const Eigen::MatrixBase<Derived>& kappas)
{
    using Scalar = typename Derived::Scalar;
    const Vec<Scalar> lambda = transform_T(kappas) / Scalar(2);
    if (!cone_contains(wf.cone(), lambda)) throw DomainViolation("weingarten_value: curvatures outside Gamma*");
    return wf.f(lambda);
}

/// W along kappa(s) = T(2 (lambda_b + s (lambda_i - lambda_b))) as s -> 0, where lambda_b lies on
/// the boundary of Gamma_k and lambda_i inside. Returns the values at the sampled s.
std::vector<double> boundary_ray_probe(const WeingartenFunctional& wf, const Vec<double>& lambda_boundary,
                                       const Vec<double>& lambda_interior, const std::vector<double>& s_values);

struct CurvatureReport;

struct UmbilicityDiagnostic {
    double max_spread = 0;
    double wein_const_dev = 0;
    double mean_weingarten = 0;
};

UmbilicityDiagnostic umbilicity_diagnostic(const std::vector<CurvatureReport>& reports, const WeingartenFunctional& wf);

/// S_k of the radii from the S_j of the lambdas, using R_i = 1/2 - lambda_i.
double radii_sigma_from_lambdas(const Vec<double>& lambdas, int k);

}  // namespace horolab
