#include <doctest.h>

#include <map>
#include <random>

#include "horolab/horospherical.hpp"

using namespace horolab;

namespace {

Vec<double> random_point(std::mt19937_64& gen, int dim)
{
    std::normal_distribution<double> nd;
    Vec<double> x(dim);
    for (int i = 0; i < dim; ++i) x(i) = nd(gen);
    return x.normalized();
}

Vec<double> north(int dim)
{
    return Vec<double>::Unit(dim, dim - 1);
}

double max_abs(const Mat<double>& m)
{
    return m.cwiseAbs().maxCoeff();
}

/// A random polynomial factor shifted until it is regular on a coarse grid.
ConformalFactor regular_polynomial(int n, unsigned seed, double amplitude = 1.0)
{
    const ConformalFactor raw = polynomial_factor(n, random_polynomial(n, 6, amplitude, seed), "poly");
    if (n != 2) return raw.shifted(1.5);
    return raw.shifted(std::log(find_tau0(raw, SphereGrid(8))) + 0.2);
}

}  // namespace

TEST_CASE("light cone map examples")
{
    const LorentzVec a = light_cone_map(0.0, Vec<double>(north(3)));
    CHECK((a - (LorentzVec(4) << 1, 0, 0, 1).finished()).norm() == 0.0);
    Vec<double> x(3);
    x << 1, 0, 0;
    const LorentzVec b = light_cone_map(std::log(2.0), x);
    CHECK((b - (LorentzVec(4) << 2, 2, 0, 0).finished()).norm() <= 1e-15);
    CHECK(classify(b).tag == Quadric::LightCone);
}

TEST_CASE("light cone map pulls back e^{2 rho} g0 along curves")
{
    std::mt19937_64 gen(21);
    const ConformalFactor rho = polynomial_factor(2, random_polynomial(2, 5, 1.0, 4u), "poly");
    for (int trial = 0; trial < 30; ++trial) {
        const Vec<double> p = random_point(gen, 3);
        Vec<double> v = random_point(gen, 3);
        v -= v.dot(p) * p;
        auto curve = [&](double s) { return Vec<double>(std::cos(s) * p + std::sin(s) * v.normalized()); };
        const double h = 1e-5;
        const LorentzVec d = (light_cone_map(rho(curve(h)), curve(h)) - light_cone_map(rho(curve(-h)), curve(-h))) / (2 * h);
        const double expect = std::exp(2 * rho(p));
        CHECK(std::abs(lorentz_dot(d, d) - expect) <= 1e-8 * std::max(1.0, expect));
    }
}

TEST_CASE("represent on spheres and at the pole")
{
    std::mt19937_64 gen(22);
    const ConformalFactor l2 = constant_factor(2, std::log(2.0));
    for (int trial = 0; trial < 5; ++trial) {
        const Vec<double> x = random_point(gen, 3);
        const SurfaceFrame<double> f = represent(jet2(l2, x));
        CHECK(std::abs(f.phi(0) - 1.25) <= 1e-15);
        CHECK((f.phi.tail(3) - 0.75 * x).norm() <= 1e-15);
    }
    const SurfaceFrame<double> f = represent(jet2(coordinate_factor(2, 3, 0, 1), north(3)));
    CHECK(std::abs(f.phi(0) - std::cosh(1.0)) <= 1e-15);
    CHECK(std::abs(f.phi(3) - std::sinh(1.0)) <= 1e-15);
    CHECK(std::abs(f.phi(1)) + std::abs(f.phi(2)) <= 1e-15);
}

TEST_CASE("frame invariants hold for random factors")
{
    std::mt19937_64 gen(23);
    for (int n : {2, 3}) {
        const ConformalFactor rho = polynomial_factor(n, random_polynomial(n, 8, 1.0, 40u + n), "poly");
        for (int trial = 0; trial < 500; ++trial) {
            const Vec<double> x = random_point(gen, n + 1);
            const SurfaceFrame<double> f = represent(jet2(rho, x));
            const double scale = std::max(1.0, f.phi.squaredNorm());
            CHECK(std::abs(lorentz_norm2(f.phi) + 1) <= 1e-9 * scale);
            CHECK(std::abs(lorentz_norm2(f.eta) - 1) <= 1e-9 * scale);
            CHECK(std::abs(lorentz_dot(f.phi, f.eta)) <= 1e-9 * scale);
            CHECK(std::abs(lorentz_dot(f.phi, f.psi) + 1) <= 1e-9 * scale);
            CHECK((f.phi + f.eta - f.psi).norm() <= 1e-15 * scale);
            CHECK((f.psi.tail(n + 1) / f.psi(0) - x).norm() <= 1e-12);
            CHECK(classify(f.phi).tag == Quadric::Hyperbolic);
        }
    }
}

TEST_CASE("psi is normal to phi")
{
    std::mt19937_64 gen(24);
    const ConformalFactor rho = polynomial_factor(2, random_polynomial(2, 6, 1.0, 9u), "poly");
    for (int trial = 0; trial < 50; ++trial) {
        const Vec<double> x = random_point(gen, 3);
        const MeasuredForms m = measured_forms(rho, x);
        const SurfaceFrame<double> f = represent(jet2(rho, x));
        for (int i = 0; i < 2; ++i) CHECK(std::abs(lorentz_dot(m.dphi.col(i), f.psi)) <= 1e-6);
    }
}

TEST_CASE("fundamental forms of spheres and the degenerate point map")
{
    for (double c : {0.25, std::log(2.0), 1.0}) {
        const Jet2<double> j = jet2(constant_factor(2, c), north(3));
        const FundamentalForms<double> f = fundamental_forms(j);
        const Mat<double> id = Mat<double>::Identity(2, 2);
        CHECK(max_abs(f.first - std::sinh(c) * std::sinh(c) * id) <= 1e-14);
        CHECK(max_abs(f.second + std::sinh(c) * std::cosh(c) * id) <= 1e-14);
    }
    const Jet2<double> z = jet2(constant_factor(2, 0.0), north(3));
    CHECK(max_abs(fundamental_forms(z).first) == 0.0);
    CHECK_THROWS_AS(curvature_report(z), SingularPoint);
}

TEST_CASE("closed-form fundamental forms match differences of the frame")
{
    std::mt19937_64 gen(25);
    const ConformalFactor rho = regular_polynomial(2, 3u);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec<double> x = random_point(gen, 3);
        const FundamentalForms<double> f = fundamental_forms(jet2(rho, x));
        const MeasuredForms m = measured_forms(rho, x);
        const double scale = std::max(1.0, max_abs(f.first));
        CHECK(max_abs(f.first - m.first) <= 1e-5 * scale);
        CHECK(max_abs(f.second - m.second) <= 1e-5 * scale);
    }
}

TEST_CASE("mixed form equals half the metric minus the Schouten tensor")
{
    std::mt19937_64 gen(26);
    const ConformalFactor rho = polynomial_factor(2, random_polynomial(2, 6, 1.0, 12u), "poly");
    for (int trial = 0; trial < 50; ++trial) {
        const Vec<double> x = random_point(gen, 3);
        const Jet2<double> j = jet2(rho, x);
        const MeasuredForms m = measured_forms(rho, x);
        const Mat<double> expect = metric_matrix(j) / 2 - schouten(j);
        CHECK(max_abs(m.mixed - expect) <= 1e-5 * std::max(1.0, max_abs(expect)));
        CHECK(max_abs(m.horospherical - metric_matrix(j)) <= 1e-5 * std::max(1.0, max_abs(metric_matrix(j))));
    }
}

TEST_CASE("curvature report of the ln 2 sphere")
{
    for (int n : {2, 3}) {
        const CurvatureReport r = curvature_report(jet2(constant_factor(n, std::log(2.0)), north(n + 1)));
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(r.kappas(i) + 5.0 / 3) <= 1e-12);
            CHECK(std::abs(r.radii(i) - 3.0 / 8) <= 1e-12);
            CHECK(std::abs(r.lambdas(i) - 1.0 / 8) <= 1e-12);
            CHECK(std::abs(r.schouten_lambdas(i) - 1.0 / 8) <= 1e-12);
            CHECK(std::abs(r.signed_contact(i) + 0.25) <= 1e-12);
            CHECK(std::abs(r.dilation(i) - 0.25) <= 1e-12);
        }
        CHECK(std::abs(r.christoffel_mean - 3.0 / 8) <= 1e-12);
        CHECK(std::abs(r.scalar - n * (n - 1) / 4.0) <= 1e-12);
        CHECK(r.umbilic);
        CHECK(r.canonical);
        CHECK(r.horospherically_convex);
        CHECK(r.strongly_h_convex);
    }
}

TEST_CASE("curvature report identities on random factors")
{
    std::mt19937_64 gen(27);
    for (int n : {2, 3}) {
        const ConformalFactor rho = regular_polynomial(n, 50u + n, 0.5);
        for (int trial = 0; trial < 100; ++trial) {
            const Jet2<double> j = jet2(rho, random_point(gen, n + 1));
            const CurvatureReport r = curvature_report(j);
            CHECK((r.kappas.array() < 1).all());
            CHECK((r.lambdas - r.schouten_lambdas).cwiseAbs().maxCoeff() <= 1e-8);
            const double via_radii = n * (n - 1) - 2 * (n - 1) * r.radii.sum();
            CHECK(std::abs(via_radii - r.scalar) <= 1e-7 * std::max(1.0, std::abs(r.scalar)));
            CHECK(r.direction_mismatch <= 1e-6);
            const Vec<double> half_t = transform_T(r.kappas) / 2;
            CHECK((half_t - r.lambdas).cwiseAbs().maxCoeff() <= 1e-9);
            const Vec<double> minus_t = -transform_T(r.kappas);
            for (int i = 0; i < n; ++i) {
                if (!r.dilation_valid[static_cast<std::size_t>(i)]) continue;
                const double delta = (1 + r.kappas(i)) / (1 - r.kappas(i));
                CHECK(std::abs(r.signed_contact(i) - delta) <= 1e-12 * std::max(1.0, std::abs(delta)));
                CHECK(r.dilation(i) == std::abs(r.signed_contact(i)));
                CHECK(std::abs(minus_t(i) - delta) <= 1e-12 * std::max(1.0, std::abs(delta)));
            }
        }
    }
}

TEST_CASE("parallel flow of spheres and identity at zero")
{
    std::mt19937_64 gen(28);
    for (double c : {0.3, 1.0}) {
        for (double t : {0.0, 0.4, -0.2}) {
            const Vec<double> x = random_point(gen, 3);
            const SurfaceFrame<double> f = parallel_flow(represent(jet2(constant_factor(2, c), x)), t);
            CHECK(std::abs(f.phi(0) - std::cosh(c + t)) <= 1e-14);
            CHECK((f.phi.tail(3) - std::sinh(c + t) * x).norm() <= 1e-14);
        }
    }
    const ConformalFactor rho = polynomial_factor(2, random_polynomial(2, 4, 1.0, 2u), "poly");
    const SurfaceFrame<double> f = represent(jet2(rho, random_point(gen, 3)));
    const SurfaceFrame<double> g = parallel_flow(f, 0.0);
    CHECK((g.phi - f.phi).norm() == 0.0);
    CHECK((g.psi - f.psi).norm() == 0.0);
}

TEST_CASE("flowed curvatures and first forms follow the flow laws")
{
    std::mt19937_64 gen(29);
    const ConformalFactor rho = regular_polynomial(2, 8u, 0.5);
    for (double t : {0.3, 0.8}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Vec<double> x = random_point(gen, 3);
            const Jet2<double> j = jet2(rho, x);
            const FundamentalForms<double> f = fundamental_forms(j);
            const SymmetricEigen<double> principal = generalized_eigen(f.second, f.first);
            const MeasuredForms m = measured_forms(rho, x, t);
            const Vec<double> kt = generalized_eigen(m.second, m.first).values;
            for (int i = 0; i < 2; ++i) {
                const double k = principal.values(i);
                CHECK(std::abs(kt(i) - flowed_curvature(k, t)) <= 1e-6 * std::max(1.0, std::abs(kt(i))));
                const Vec<double> v = principal.vectors.col(i);
                const double it = v.dot(m.first * v);
                const double expect = std::pow(std::cosh(t) - k * std::sinh(t), 2);
                CHECK(std::abs(it - expect) <= 1e-5 * std::max(1.0, expect));
            }
            CHECK(max_abs(m.horospherical - std::exp(2 * t) * metric_matrix(j)) <=
                  1e-6 * std::exp(2 * t) * std::exp(2 * j.value));
        }
    }
}

TEST_CASE("umbilic flag survives parallel flow")
{
    const ConformalFactor rho = constant_factor(2, 0.7);
    const MeasuredForms m = measured_forms(rho, north(3), 0.5);
    const Vec<double> k = generalized_eigen(m.second, m.first).values;
    CHECK(k(1) - k(0) <= 1e-7 * (1 + k.cwiseAbs().maxCoeff()));
    CHECK(std::abs(k(0) + 1 / std::tanh(1.2)) <= 1e-6);
}

TEST_CASE("christoffel flow mean")
{
    CHECK(christoffel_flow_mean(3.0 / 8, 0.0) == 3.0 / 8);
    CHECK(christoffel_flow_mean(3.0 / 8, 60.0) == doctest::Approx(0.5).epsilon(1e-15));
    const double c = christoffel_flow_mean(3.0 / 8, std::log(2.0));
    CHECK(std::abs(c - 15.0 / 32) <= 1e-15);
    const CurvatureReport r = curvature_report(jet2(constant_factor(2, 2 * std::log(2.0)), north(3)));
    CHECK(std::abs(r.christoffel_mean - c) <= 1e-14);
}

TEST_CASE("regularity examples")
{
    for (double c : {0.25, 1.0}) {
        const Regularity r = regularity(jet2(constant_factor(2, c), north(3)));
        CHECK(r.regular);
        CHECK(std::abs(r.min_eig - (std::exp(2 * c) - 1)) <= 1e-14);
    }
    const Regularity z = regularity(jet2(constant_factor(2, 0.0), north(3)));
    CHECK_FALSE(z.regular);
    CHECK_FALSE(z.nonsingular);
    CHECK(z.min_eig == 0.0);
    const Regularity x3 = regularity(jet2(coordinate_factor(2, 3, 0, 1), north(3)));
    CHECK(x3.regular);
    CHECK(std::abs(x3.min_eig - (std::exp(2.0) - 3)) <= 1e-14);
    const Regularity neg = regularity(jet2(constant_factor(2, -0.5), north(3)));
    CHECK_FALSE(neg.regular);
    CHECK(neg.nonsingular);
}

TEST_CASE("find_tau0 scan")
{
    const SphereGrid g(8);
    CHECK(find_tau0(constant_factor(2, 0.0), g) == 2.0);
    CHECK(find_tau0(constant_factor(2, 1.0), g) == 1.0);
    CHECK(find_tau0(constant_factor(2, -3.0), g) == 32.0);
    for (unsigned seed : {1u, 2u, 3u}) {
        const ConformalFactor rho = polynomial_factor(2, random_polynomial(2, 8, 2.0, seed), "poly");
        const double tau = find_tau0(rho, g);
        double lmax = 0;
        for (const Jet2<double>& j : sweep_jets(rho, g)) lmax = std::max(lmax, schouten_eigen(schouten(j), j).values.maxCoeff());
        CHECK(tau * tau / 2 > lmax);
        if (tau > 1) CHECK(tau * tau / 8 <= lmax + 1e-8 * (1 + tau * tau));
    }
}

TEST_CASE("schouten inverse on spheres")
{
    const SphereGrid g(8);
    for (double c : {0.25, 1.0}) {
        const DualResult d = schouten_inverse(constant_factor(2, c), north(3), 0.0);
        for (int i = 0; i < 2; ++i) CHECK(std::abs(d.lambda_star(i) - 2 * std::exp(2 * c)) <= 1e-6 * std::exp(2 * c));
    }
    const DualResult z = schouten_inverse(constant_factor(2, 0.0), north(3), g);
    CHECK(z.t == doctest::Approx(std::log(2.0)));
    for (int i = 0; i < 2; ++i) CHECK(std::abs(z.lambda_star(i) - 2) <= 1e-6);
    CHECK_THROWS_AS(schouten_inverse(constant_factor(2, 0.0), north(3), 0.0), FlowNotRegular);
}

TEST_CASE("schouten inverse reciprocity on a perturbed factor")
{
    std::mt19937_64 gen(30);
    const ConformalFactor rho = coordinate_factor(2, 1, 0.4, 0.15);
    const SphereGrid g(8);
    const double t = admissible_dual_time(rho, g);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec<double> x = random_point(gen, 3);
        const DualResult a = schouten_inverse(rho, x, t);
        const DualResult b = schouten_inverse(rho, x, t + 0.3);
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(a.products(i) - 1) <= 1e-5);
            CHECK(std::abs(a.lambda_star(i) - b.lambda_star(i)) <= 1e-6 * std::max(1.0, std::abs(a.lambda_star(i))));
        }
    }
}

TEST_CASE("schouten inverse rejects vanishing eigenvalues")
{
    CHECK_THROWS_AS(schouten_inverse(coordinate_factor(2, 3, 0, -0.5), north(3), 1.0), ZeroEigenvalue);
}

TEST_CASE("contact mean")
{
    for (double c : {0.25, std::log(2.0), 1.0}) {
        const CurvatureReport r = curvature_report(jet2(constant_factor(2, c), north(3)));
        CHECK(std::abs(contact_mean(r) - c) <= 1e-12);
    }
    CurvatureReport r = curvature_report(jet2(constant_factor(2, 1.0), north(3)));
    r.kappas(0) = -1;
    r.strongly_h_convex = false;
    CHECK_THROWS_AS(contact_mean(r), NotStronglyConvex);
}

TEST_CASE("laplacian representation on the grid")
{
    const GridPtr g = make_grid(24);
    const ConformalFactor rho = harmonic_factor(harmonic_coefficients(4, {{0, 0, 1.0}, {1, 1, 0.2}, {2, 0, 0.15}, {3, -2, 0.05}}));
    CHECK(laplacian_representation_error(rho, g) <= 1e-4);
    CHECK(laplacian_representation_error(constant_factor(2, 0.6), g) <= 1e-10);
}

TEST_CASE("poincare mesh is closed")
{
    const SphereGrid g(6);
    const ConformalFactor rho = constant_factor(2, 0.5);
    std::vector<SurfaceFrame<double>> frames;
    for (int i = 0; i < g.size(); ++i) frames.push_back(represent(jet2(rho, g.point_vec(i))));
    const Mesh m = poincare_mesh(frames, represent(jet2(rho, north(3))), represent(jet2(rho, Vec<double>(-north(3)))), g);
    CHECK(m.vertices.size() == static_cast<std::size_t>(g.size() + 2));
    const double r = std::tanh(0.25);
    for (const auto& v : m.vertices) CHECK(std::abs(v.norm() - r) <= 1e-14);
    std::map<std::pair<int, int>, int> edges;
    for (const auto& f : m.faces)
        for (int e = 0; e < 3; ++e) edges[{std::min(f[e], f[(e + 1) % 3]), std::max(f[e], f[(e + 1) % 3])}]++;
    for (const auto& [edge, count] : edges) CHECK(count == 2);
    CHECK(static_cast<long>(m.vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.faces.size()) == 2);
}
