#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace horolab {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kDegeneracyThreshold = 1e-12;

/// Ascending eigenvalues with unit eigenvectors as columns. When two eigenvalues
/// coincide to the relative degeneracy threshold the vectors are not meaningful
/// and `degenerate` is set.
template <typename Scalar>
struct SymmetricEigen {
    Vec<Scalar> values;
    Mat<Scalar> vectors;
    bool degenerate = false;
};

namespace detail {

template <typename Scalar>
bool has_coincident(const Vec<Scalar>& sorted)
{
    using std::abs;
    Scalar scale(1);
    for (Eigen::Index i = 0; i < sorted.size(); ++i) scale = std::max<Scalar>(scale, abs(sorted(i)));
    for (Eigen::Index i = 1; i < sorted.size(); ++i)
        if (sorted(i) - sorted(i - 1) <= Scalar(kDegeneracyThreshold) * scale) return true;
    return false;
}

}  // namespace detail

/// Symmetric eigendecomposition. 2x2 uses the rotation-angle closed form, 3x3 the
/// trigonometric closed form, larger sizes Eigen's iterative solver.
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> symmetric_eigen(const Eigen::MatrixBase<Derived>& m_in)
{
    using Scalar = typename Derived::Scalar;
    using std::atan2;
    using std::cos;
    using std::hypot;
    using std::sin;
    const Mat<Scalar> m = (m_in + m_in.transpose()) / Scalar(2);
    SymmetricEigen<Scalar> out;
    const Eigen::Index n = m.rows();
    if (n == 1) {
        out.values = m.col(0);
        out.vectors = Mat<Scalar>::Identity(1, 1);
    } else if (n == 2) {
        const Scalar a = m(0, 0), b = m(0, 1), d = m(1, 1);
        const Scalar mean = (a + d) / 2;
        const Scalar radius = hypot((a - d) / 2, b);
        const Scalar angle = atan2(2 * b, a - d) / 2;
        out.values.resize(2);
        out.values << mean - radius, mean + radius;
        out.vectors.resize(2, 2);
        out.vectors << -sin(angle), cos(angle), cos(angle), sin(angle);
    } else if (n == 3) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 3, 3>> solver;
        solver.computeDirect(Eigen::Matrix<Scalar, 3, 3>(m));
        out.values = solver.eigenvalues();
        out.vectors = solver.eigenvectors();
    } else {
        Eigen::SelfAdjointEigenSolver<Mat<Scalar>> solver(m);
        out.values = solver.eigenvalues();
        out.vectors = solver.eigenvectors();
    }
    out.degenerate = detail::has_coincident(out.values);
    return out;
}

/// Generalized problem B v = mu A v with A positive definite. Eigenvalues ascending;
/// vectors are A-orthonormal columns.
template <typename DerivedB, typename DerivedA>
SymmetricEigen<typename DerivedB::Scalar> generalized_eigen(const Eigen::MatrixBase<DerivedB>& b,
                                                            const Eigen::MatrixBase<DerivedA>& a)
{
    using Scalar = typename DerivedB::Scalar;
    const Mat<Scalar> bs = (b + b.transpose()) / Scalar(2);
    const Mat<Scalar> as = (a + a.transpose()) / Scalar(2);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat<Scalar>> solver(bs, as);
    SymmetricEigen<Scalar> out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    out.degenerate = detail::has_coincident(out.values);
    return out;
}

/// For each column of `a`, the index of the column of `b` with the greatest
/// absolute cosine. Greedy on the best remaining pair, so the result is a permutation.
template <typename Scalar>
std::vector<int> match_by_cosine(const Mat<Scalar>& a, const Mat<Scalar>& b)
{
    using std::abs;
    const Eigen::Index n = a.cols();
    Mat<Scalar> cosines(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            cosines(i, j) = abs(a.col(i).dot(b.col(j))) / (a.col(i).norm() * b.col(j).norm());
    std::vector<int> pairing(static_cast<std::size_t>(n), -1);
    std::vector<bool> used_a(static_cast<std::size_t>(n)), used_b(static_cast<std::size_t>(n));
    for (Eigen::Index round = 0; round < n; ++round) {
        Scalar best(-1);
        Eigen::Index bi = 0, bj = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (used_a[static_cast<std::size_t>(i)]) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (used_b[static_cast<std::size_t>(j)]) continue;
                if (cosines(i, j) > best) {
                    best = cosines(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        used_a[static_cast<std::size_t>(bi)] = used_b[static_cast<std::size_t>(bj)] = true;
        pairing[static_cast<std::size_t>(bi)] = static_cast<int>(bj);
    }
    return pairing;
}

}  // namespace horolab
