#include "horolab/horospherical.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "horolab/parallel.hpp"

namespace horolab {

namespace {

Mat<double> symmetrize(const Mat<double>& m)
{
    return (m + m.transpose()) / 2;
}

std::string where(const Vec<double>& x)
{
    std::ostringstream os;
    os.precision(17);
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
    os << ")";
    return os.str();
}

/// Pairing of columns of `principal` with columns of `other`; falls back to `fallback`
/// when either side has coincident eigenvalues.
std::vector<int> pair_directions(const SymmetricEigen<double>& principal, const SymmetricEigen<double>& other,
                                 bool umbilic, const std::vector<int>& fallback, double* mismatch)
{
    if (umbilic || principal.degenerate || other.degenerate) {
        if (mismatch) *mismatch = 0;
        return fallback;
    }
    const std::vector<int> pairing = match_by_cosine(principal.vectors, other.vectors);
    if (mismatch) {
        double worst = 0;
        for (std::size_t i = 0; i < pairing.size(); ++i) {
            const Vec<double> a = principal.vectors.col(static_cast<Eigen::Index>(i)).normalized();
            const Vec<double> b = other.vectors.col(pairing[i]).normalized();
            worst = std::max(worst, 1 - std::abs(a.dot(b)));
        }
        *mismatch = worst;
    }
    return pairing;
}

std::vector<int> reversed(int n)
{
    std::vector<int> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = n - 1 - i;
    return r;
}

}  // namespace

Regularity regularity(const Jet2<double>& j)
{
    const SymmetricEigen<double> e = symmetric_eigen(regularity_matrix(j));
    Regularity r;
    r.min_eig = e.values(0);
    r.min_abs_eig = e.values.cwiseAbs().minCoeff();
    r.threshold = regularity_threshold(j.value);
    r.regular = r.min_eig > r.threshold;
    r.nonsingular = r.min_abs_eig > r.threshold;
    return r;
}

CurvatureReport curvature_report(const Jet2<double>& j)
{
    return curvature_report(j, fundamental_forms(j));
}

CurvatureReport curvature_report(const Jet2<double>& j, const FundamentalForms<double>& forms)
{
    const int n = j.n();
    CurvatureReport r;
    r.x = j.x;
    r.regularity = regularity(j);
    if (!r.regularity.nonsingular)
        throw SingularPoint("curvature_report: g - 2 Sch_g is singular at " + where(j.x), r.regularity.min_eig);
    const SymmetricEigen<double> first = symmetric_eigen(forms.first);
    if (!(first.values(0) > 0))
        throw SingularPoint("curvature_report: first fundamental form is not positive definite at " + where(j.x),
                            r.regularity.min_eig);

    const SymmetricEigen<double> principal = generalized_eigen(forms.second, forms.first);
    r.kappas = principal.values;
    const double spread = r.kappas(n - 1) - r.kappas(0);
    r.umbilic = spread < kUmbilicThreshold * (1 + r.kappas.cwiseAbs().maxCoeff());

    const SymmetricEigen<double> sch = schouten_eigen(schouten(j), j);
    const std::vector<int> pairing = pair_directions(principal, sch, r.umbilic, reversed(n), &r.direction_mismatch);

    r.radii.resize(n);
    r.lambdas.resize(n);
    r.schouten_lambdas.resize(n);
    r.signed_contact.resize(n);
    r.dilation.resize(n);
    r.dilation_valid.assign(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        const double k = r.kappas(i);
        r.radii(i) = 1 / (1 - k);
        r.lambdas(i) = 0.5 - r.radii(i);
        r.schouten_lambdas(i) = sch.values(pairing[static_cast<std::size_t>(i)]);
        r.signed_contact(i) = (1 + k) / (1 - k);
        r.dilation(i) = std::abs(r.signed_contact(i));
        r.dilation_valid[static_cast<std::size_t>(i)] = k != -1.0;
    }
    r.christoffel_mean = r.radii.mean();
    r.scalar = scalar_curvature(j);
    r.sigma.resize(n);
    for (int k = 1; k <= n; ++k) r.sigma(k - 1) = sigma_k(r.lambdas, k);
    r.canonical = (r.kappas.array() < 1).all();
    r.horospherically_convex = r.canonical || (r.kappas.array() > 1).all();
    r.strongly_h_convex = (r.kappas.array() < -1).all();
    return r;
}

double contact_mean(const CurvatureReport& r)
{
    if (!r.strongly_h_convex) throw NotStronglyConvex("contact_mean: some principal curvature is not below -1");
    const int n = static_cast<int>(r.kappas.size());
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += std::atanh(1 / std::abs(r.kappas(i)));
    const double mean = sum / n;
    const double via_sigma = -std::log(std::pow(2.0, n) * sigma_k(r.lambdas, n)) / (2 * n);
    if (!(std::abs(mean - via_sigma) <= 1e-8 * std::max(1.0, std::abs(mean))))
        throw InvariantViolation("contact_mean: log(2^n sigma_n) identity violated");
    return mean;
}

Mat<double> lorentz_gram(const Mat<double>& a, const Mat<double>& b)
{
    Mat<double> g(a.cols(), b.cols());
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        for (Eigen::Index k = 0; k < b.cols(); ++k) g(i, k) = lorentz_dot(a.col(i), b.col(k));
    return g;
}

MeasuredForms measured_forms(const ConformalFactor& rho, const Vec<double>& x, double t, double h)
{
    require_on_sphere(x, "measured_forms");
    const Mat<double> e = tangent_frame(x);
    const int n = static_cast<int>(e.cols());
    MeasuredForms m;
    m.dphi.resize(n + 2, n);
    m.deta.resize(n + 2, n);
    m.dpsi.resize(n + 2, n);
    for (int i = 0; i < n; ++i) {
        const Vec<double> u = h * Vec<double>::Unit(n, i);
        const SurfaceFrame<double> fp = parallel_flow(represent(jet2(rho, chart_point(x, e, u))), t);
        const SurfaceFrame<double> fm = parallel_flow(represent(jet2(rho, chart_point(x, e, Vec<double>(-u)))), t);
        m.dphi.col(i) = (fp.phi - fm.phi) / (2 * h);
        m.deta.col(i) = (fp.eta - fm.eta) / (2 * h);
        m.dpsi.col(i) = (fp.psi - fm.psi) / (2 * h);
    }
    m.first = symmetrize(lorentz_gram(m.dphi, m.dphi));
    m.second = symmetrize(-lorentz_gram(m.dphi, m.deta));
    m.mixed = symmetrize(lorentz_gram(m.dphi, m.dpsi));
    m.horospherical = symmetrize(lorentz_gram(m.dpsi, m.dpsi));
    return m;
}

std::vector<Jet2<double>> sweep_jets(const ConformalFactor& rho, const SphereGrid& grid)
{
    std::vector<Jet2<double>> jets(static_cast<std::size_t>(grid.size()));
    parallel_for(jets.size(), [&](std::size_t i) { jets[i] = jet2(rho, grid.point_vec(static_cast<int>(i))); });
    return jets;
}

std::vector<CurvatureReport> sweep_reports(const ConformalFactor& rho, const SphereGrid& grid)
{
    std::vector<CurvatureReport> reports(static_cast<std::size_t>(grid.size()));
    parallel_for(reports.size(),
                 [&](std::size_t i) { reports[i] = curvature_report(jet2(rho, grid.point_vec(static_cast<int>(i)))); });
    return reports;
}

double find_tau0(const ConformalFactor& rho, const SphereGrid& grid)
{
    const std::vector<Jet2<double>> jets = sweep_jets(rho, grid);
    std::vector<double> value(jets.size()), top(jets.size());
    double max_abs_lambda = 0;
    for (std::size_t i = 0; i < jets.size(); ++i) {
        const SymmetricEigen<double> e = symmetric_eigen(schouten(jets[i]));
        value[i] = jets[i].value;
        top[i] = e.values(e.values.size() - 1);
        max_abs_lambda = std::max(max_abs_lambda, e.values.cwiseAbs().maxCoeff() * std::exp(-2 * jets[i].value));
    }
    for (int k = 0; k <= 20; ++k) {
        const double tau = std::ldexp(1.0, k);
        bool ok = true;
        for (std::size_t i = 0; i < jets.size() && ok; ++i) {
            const double g = tau * tau * std::exp(2 * value[i]);
            ok = g - 2 * top[i] > 1e-8 * (1 + g);
        }
        if (!ok) continue;
        const double shift = std::log(tau);
        bool certified = true;
        for (std::size_t i = 0; i < jets.size() && certified; ++i) {
            Jet2<double> j = jets[i];
            j.value += shift;
            certified = regularity(j).regular;
        }
        if (certified) return tau;
    }
    throw NotFound("find_tau0: no tau up to 2^20 regularizes the factor", max_abs_lambda);
}

namespace {

struct DualPieces {
    Mat<double> metric, schouten;
};

DualPieces dual_metric(const ConformalFactor& rho_t, const Vec<double>& x, double h)
{
    const Mat<double> e = tangent_frame(x);
    const int n = static_cast<int>(e.cols());
    Mat<double> dphi(n + 2, n), dneg(n + 2, n);
    for (int i = 0; i < n; ++i) {
        const Vec<double> u = h * Vec<double>::Unit(n, i);
        const SurfaceFrame<double> fp = represent(jet2(rho_t, chart_point(x, e, u)));
        const SurfaceFrame<double> fm = represent(jet2(rho_t, chart_point(x, e, Vec<double>(-u))));
        dphi.col(i) = (fp.phi - fm.phi) / (2 * h);
        dneg.col(i) = ((fp.phi - fp.eta) - (fm.phi - fm.eta)) / (2 * h);
    }
    DualPieces d;
    d.metric = symmetrize(lorentz_gram(dneg, dneg));
    d.schouten = d.metric / 2 - symmetrize(lorentz_gram(dphi, dneg));
    return d;
}

void check_flow(const Jet2<double>& j, double t)
{
    Jet2<double> jt = j;
    jt.value += t;
    const Regularity reg = regularity(jt);
    if (!reg.nonsingular) throw FlowNotRegular("schouten_inverse: flowed hypersurface is singular at " + where(j.x));
    const FundamentalForms<double> f = fundamental_forms(jt);
    const Vec<double> kappa = generalized_eigen(f.second, f.first).values;
    if ((kappa.array() + 1).abs().minCoeff() < 1e-3 || (1 - kappa.array()).abs().minCoeff() < 1e-3)
        throw FlowNotRegular("schouten_inverse: flowed principal curvature reaches -1 or 1 at " + where(j.x));
}

}  // namespace

DualResult schouten_inverse(const ConformalFactor& rho, const Vec<double>& x, double t)
{
    const Jet2<double> j = jet2(rho, x);
    const int n = j.n();
    const SymmetricEigen<double> lam = schouten_eigen(schouten(j), j);
    if (lam.values.cwiseAbs().minCoeff() < kZeroEigenvalueThreshold)
        throw ZeroEigenvalue("schouten_inverse: Schouten eigenvalue near zero at " + where(x));
    check_flow(j, t);

    const DualPieces d = dual_metric(rho.shifted(t), x, kGradientStep);
    const SymmetricEigen<double> dual = generalized_eigen(d.schouten, d.metric);

    // Monotone fallback: 1/(4 lambda) sorted ascending against the dual eigenvalues.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return 1 / lam.values(a) < 1 / lam.values(b); });
    std::vector<int> fallback(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) fallback[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
    const bool umbilic = lam.values(n - 1) - lam.values(0) < kUmbilicThreshold * (1 + lam.values.cwiseAbs().maxCoeff());
    const std::vector<int> pairing = pair_directions(lam, dual, umbilic, fallback, nullptr);

    DualResult out;
    out.t = t;
    out.lambdas = lam.values;
    out.lambda_star.resize(n);
    out.products.resize(n);
    const double scale = std::exp(-2 * t);
    for (int i = 0; i < n; ++i) {
        const double star = scale * dual.values(pairing[static_cast<std::size_t>(i)]);
        if (!(std::abs(lam.values(i) * star - 0.25) <= 1e-4))
            throw InvariantViolation("schouten_inverse: lambda * lambda_star differs from 1/4 at " + where(x));
        out.lambda_star(i) = 4 * star;
        out.products(i) = lam.values(i) * out.lambda_star(i);
    }
    return out;
}

double admissible_dual_time(const ConformalFactor& rho, const SphereGrid& grid)
{
    const double t = std::log(find_tau0(rho, grid));
    const std::vector<Jet2<double>> jets = sweep_jets(rho, grid);
    for (const Jet2<double>& j : jets) {
        Jet2<double> jt = j;
        jt.value += t;
        const FundamentalForms<double> f = fundamental_forms(jt);
        const Vec<double> kappa = generalized_eigen(f.second, f.first).values;
        if ((kappa.array() + 1).abs().minCoeff() <= 0.1)
            throw FlowNotRegular("admissible_dual_time: flowed principal curvature within 0.1 of -1 at " + where(j.x));
    }
    return t;
}

DualResult schouten_inverse(const ConformalFactor& rho, const Vec<double>& x, const SphereGrid& grid)
{
    return schouten_inverse(rho, x, admissible_dual_time(rho, grid));
}

double laplacian_representation_error(const ConformalFactor& rho, const GridPtr& grid)
{
    if (rho.n != 2) throw DimensionMismatch("laplacian_representation_error: grid is S^2 only");
    const std::vector<Jet2<double>> jets = sweep_jets(rho, *grid);
    const int N = grid->size();
    Eigen::MatrixXd psi(N, 4), phi(N, 4);
    Eigen::VectorXd s(N), value(N);
    for (int i = 0; i < N; ++i) {
        const SurfaceFrame<double> f = represent(jets[static_cast<std::size_t>(i)]);
        psi.row(i) = f.psi.transpose();
        phi.row(i) = f.phi.transpose();
        s(i) = scalar_curvature(jets[static_cast<std::size_t>(i)]);
        value(i) = jets[static_cast<std::size_t>(i)].value;
    }
    double worst = 0;
    for (int c = 0; c < 4; ++c) {
        Eigen::VectorXd coef = analyze(ScalarField{grid, psi.col(c), std::nullopt});
        for (Eigen::Index k = 0; k < coef.size(); ++k) {
            const int l = SphereGrid::degree_of(static_cast<int>(k));
            coef(k) *= -double(l) * (l + 1);
        }
        const Eigen::VectorXd lap0 = synthesize(grid, coef).samples;
        for (int i = 0; i < N; ++i) {
            const double lap = std::exp(-2 * value(i)) * lap0(i);
            const double rebuilt = lap / 2 + (s(i) + 2) / 4 * psi(i, c);
            worst = std::max(worst, std::abs(rebuilt - phi(i, c)));
        }
    }
    return worst;
}

Mesh poincare_mesh(const std::vector<SurfaceFrame<double>>& node_frames, const SurfaceFrame<double>& north,
                   const SurfaceFrame<double>& south, const SphereGrid& grid)
{
    auto ball = [](const SurfaceFrame<double>& f) {
        return Eigen::Vector3d(f.phi.tail(3) / (1 + f.phi(0)));
    };
    Mesh m;
    m.vertices.reserve(node_frames.size() + 2);
    m.vertices.push_back(ball(north));
    for (const SurfaceFrame<double>& f : node_frames) m.vertices.push_back(ball(f));
    m.vertices.push_back(ball(south));
    const int nl = grid.longitudes(), nr = grid.rings();
    auto v = [&](int ring, int k) { return 1 + ring * nl + (k % nl); };
    const int south_index = static_cast<int>(m.vertices.size()) - 1;
    for (int k = 0; k < nl; ++k) m.faces.push_back({0, v(0, k), v(0, k + 1)});
    for (int r = 0; r + 1 < nr; ++r) {
        for (int k = 0; k < nl; ++k) {
            m.faces.push_back({v(r, k), v(r + 1, k), v(r + 1, k + 1)});
            m.faces.push_back({v(r, k), v(r + 1, k + 1), v(r, k + 1)});
        }
    }
    for (int k = 0; k < nl; ++k) m.faces.push_back({south_index, v(nr - 1, k + 1), v(nr - 1, k)});
    return m;
}

}  // namespace horolab
