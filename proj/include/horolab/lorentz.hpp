#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "horolab/errors.hpp"

namespace horolab {

/// Point or vector of the Minkowski space L^{n+2}; index 0 is the timelike coordinate.
template <typename Scalar>
using LorentzVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using LorentzVec = LorentzVector<double>;

/// <u, v> = -u0 v0 + sum_{i>=1} ui vi.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar lorentz_dot(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v)
{
    if (u.size() != v.size())
        throw DimensionMismatch("lorentz_dot: sizes " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
    if (u.size() == 0) return typename DerivedA::Scalar(0);
    return -u(0) * v(0) + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

template <typename Derived>
typename Derived::Scalar lorentz_norm2(const Eigen::MatrixBase<Derived>& v)
{
    return lorentz_dot(v, v);
}

enum class Quadric { Hyperbolic, DeSitter, LightCone, None };

struct QuadricClass {
    Quadric tag = Quadric::None;
    double tolerance = 1e-9;
};

inline constexpr double kDefaultClassifyTolerance = 1e-9;

/// Membership in H^{n+1}, S_1^{n+1} or N_+^{n+1}. The tolerance is relative to
/// max(1, |v|^2_Euclidean) so that large light-cone vectors classify correctly.
template <typename Derived>
QuadricClass classify(const Eigen::MatrixBase<Derived>& v, double tol = kDefaultClassifyTolerance)
{
    using std::abs;
    if (!(tol > 0)) throw DomainViolation("classify: tolerance must be positive");
    QuadricClass out{Quadric::None, tol};
    if (v.size() < 2 || !v.allFinite()) return out;
    const double q = static_cast<double>(lorentz_norm2(v));
    const double scale = std::max(1.0, static_cast<double>(v.squaredNorm()));
    const double t = tol * scale;
    const bool future = v(0) > 0;
    // Nearest admissible level.
    double best = t;
    auto consider = [&](Quadric tag, double level, bool admissible) {
        const double d = abs(q - level);
        if (admissible && d <= best) {
            best = d;
            out.tag = tag;
        }
    };
    consider(Quadric::Hyperbolic, -1.0, future);
    consider(Quadric::DeSitter, 1.0, true);
    consider(Quadric::LightCone, 0.0, future);
    return out;
}

}  // namespace horolab
