#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <tuple>

#include "horolab/sphere.hpp"

namespace horolab {

/// Gauss-Legendre (colatitude) x uniform (longitude) quadrature grid on S^2 for
/// spherical-harmonic degree L. Nodes are colatitude-major with theta ascending.
class SphereGrid {
public:
    explicit SphereGrid(int L);

    int degree() const { return L_; }
    int rings() const { return L_ + 1; }
    int longitudes() const { return 2 * L_ + 2; }
    int size() const { return rings() * longitudes(); }
    /// Number of real harmonics up to degree L, (L+1)^2.
    int harmonics() const { return (L_ + 1) * (L_ + 1); }

    double theta(int node) const { return theta_(node / longitudes()); }
    double phi(int node) const { return phi_(node % longitudes()); }
    const Eigen::Vector3d& point(int node) const { return points_[static_cast<std::size_t>(node)]; }
    Vec<double> point_vec(int node) const { return point(node); }
    const Eigen::VectorXd& weights() const { return weights_; }
    const Eigen::VectorXd& ring_cosines() const { return z_; }

    /// Values of every real harmonic at every node (nodes x harmonics).
    const Eigen::MatrixXd& basis() const { return basis_; }
    /// The degree l of harmonic index l^2 + l + m.
    static int degree_of(int index);

private:
    int L_;
    Eigen::VectorXd z_, theta_, phi_, weights_;
    std::vector<Eigen::Vector3d> points_;
    Eigen::MatrixXd basis_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;
GridPtr make_grid(int L);

/// Samples of a function on a grid, with harmonic coefficients once analyzed.
struct ScalarField {
    GridPtr grid;
    Eigen::VectorXd samples;
    std::optional<Eigen::VectorXd> coefficients;
};

ScalarField sample(const GridPtr& grid, const std::function<double(const Vec<double>&)>& f);
ScalarField constant_field(const GridPtr& grid, double v);

/// Real orthonormal harmonic coefficients by quadrature.
Eigen::VectorXd analyze(const ScalarField& f);
ScalarField synthesize(const GridPtr& grid, const Eigen::VectorXd& coefficients);
ScalarField with_coefficients(ScalarField f);

/// Quadrature of f (times weight when given) against the round area element.
double integrate(const ScalarField& f);
double integrate(const ScalarField& f, const ScalarField& weight);
/// Fixed-shape pairwise sum of w_i v_i.
double weighted_sum(const Eigen::VectorXd& w, const Eigen::VectorXd& v);

/// Real harmonic of index l^2 + l + m at a point, orthonormal on S^2;
/// m > 0 uses cos(m phi), m < 0 uses sin(|m| phi), no Condon-Shortley phase.
double real_harmonic(int l, int m, const Eigen::Vector3d& x);

/// The harmonic expansion sum c_i Y_i written as an ambient function of (x, y, z)
/// so that its derivatives are exact everywhere including the poles.
AmbientJet<double> harmonic_expansion_jet(const Eigen::VectorXd& coefficients, const Vec<double>& p);
ConformalFactor harmonic_factor(const Eigen::VectorXd& coefficients, std::string label = "harmonic");

/// Coefficient vector of length (L+1)^2 from (l, m, value) triples.
Eigen::VectorXd harmonic_coefficients(int L, std::initializer_list<std::tuple<int, int, double>> entries);

}  // namespace horolab
