#include "horolab/grid.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <tuple>

namespace horolab {

namespace {

constexpr double kPi = std::numbers::pi;

/// q_l^m(z) = Pbar_l^m(z) / (1 - z^2)^{m/2} and its first two z-derivatives,
/// from the three-term recurrence in l. Stored at [l * (L + 1) + m].
struct ReducedLegendre {
    int L;
    std::vector<double> q, dq, d2q;

    ReducedLegendre(int L_, double z) : L(L_)
    {
        const std::size_t count = static_cast<std::size_t>((L + 1) * (L + 1));
        q.assign(count, 0.0);
        dq.assign(count, 0.0);
        d2q.assign(count, 0.0);
        double diag = 1.0 / std::sqrt(4 * kPi);
        for (int m = 0; m <= L; ++m) {
            if (m > 0) diag *= std::sqrt((2.0 * m + 1) / (2.0 * m));
            at(q, m, m) = diag;
            if (m + 1 > L) continue;
            const double a = std::sqrt(2.0 * m + 3);
            at(q, m + 1, m) = a * z * diag;
            at(dq, m + 1, m) = a * diag;
            for (int l = m + 2; l <= L; ++l) {
                const double al = std::sqrt((4.0 * l * l - 1) / (double(l) * l - double(m) * m));
                const double bl = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1));
                at(q, l, m) = al * (z * at(q, l - 1, m) - bl * at(q, l - 2, m));
                at(dq, l, m) = al * (at(q, l - 1, m) + z * at(dq, l - 1, m) - bl * at(dq, l - 2, m));
                at(d2q, l, m) = al * (2 * at(dq, l - 1, m) + z * at(d2q, l - 1, m) - bl * at(d2q, l - 2, m));
            }
        }
    }

    double& at(std::vector<double>& v, int l, int m) { return v[static_cast<std::size_t>(l * (L + 1) + m)]; }
    double get(const std::vector<double>& v, int l, int m) const { return v[static_cast<std::size_t>(l * (L + 1) + m)]; }
};

int degree_for_size(Eigen::Index size)
{
    const int L = static_cast<int>(std::lround(std::sqrt(static_cast<double>(size)))) - 1;
    if ((L + 1) * (L + 1) != size) throw DimensionMismatch("harmonic coefficient count is not a perfect square");
    return L;
}

double pairwise(const Eigen::VectorXd& w, const Eigen::VectorXd& v, Eigen::Index begin, Eigen::Index end)
{
    if (end - begin <= 8) {
        double s = 0;
        for (Eigen::Index i = begin; i < end; ++i) s += w(i) * v(i);
        return s;
    }
    const Eigen::Index mid = begin + (end - begin) / 2;
    return pairwise(w, v, begin, mid) + pairwise(w, v, mid, end);
}

}  // namespace

int SphereGrid::degree_of(int index)
{
    return static_cast<int>(std::floor(std::sqrt(static_cast<double>(index))));
}

SphereGrid::SphereGrid(int L) : L_(L)
{
    if (L < 4) throw DomainViolation("make_grid: degree must be at least 4");
    if (L > 64) throw DomainViolation("make_grid: degree above 64 is not supported");
    const int nr = rings(), nl = longitudes();
    z_.resize(nr);
    theta_.resize(nr);
    Eigen::VectorXd ring_w(nr);
    for (int i = 0; i < nr; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (nr + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= nr; ++k) {
                const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = nr * (z * p1 - p0) / (z * z - 1);
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= nr; ++k) {
                const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = nr * (z * p1 - p0) / (z * z - 1);
        }
        z_(i) = z;
        theta_(i) = std::acos(z);
        ring_w(i) = 2.0 / ((1 - z * z) * dp * dp);
    }
    phi_.resize(nl);
    for (int k = 0; k < nl; ++k) phi_(k) = 2 * kPi * k / nl;
    weights_.resize(size());
    points_.resize(static_cast<std::size_t>(size()));
    for (int i = 0; i < nr; ++i) {
        const double s = std::sin(theta_(i));
        for (int k = 0; k < nl; ++k) {
            const int node = i * nl + k;
            weights_(node) = ring_w(i) * 2 * kPi / nl;
            points_[static_cast<std::size_t>(node)] = Eigen::Vector3d(s * std::cos(phi_(k)), s * std::sin(phi_(k)), z_(i));
        }
    }
    basis_.resize(size(), harmonics());
    for (int i = 0; i < nr; ++i) {
        const ReducedLegendre q(L_, z_(i));
        for (int k = 0; k < nl; ++k) {
            const int node = i * nl + k;
            const Eigen::Vector3d& p = point(node);
            std::complex<double> w = 1.0;
            for (int m = 0; m <= L_; ++m) {
                for (int l = m; l <= L_; ++l) {
                    const double base = q.get(q.q, l, m);
                    if (m == 0) {
                        basis_(node, l * l + l) = base;
                    } else {
                        basis_(node, l * l + l + m) = std::sqrt(2.0) * base * w.real();
                        basis_(node, l * l + l - m) = std::sqrt(2.0) * base * w.imag();
                    }
                }
                w *= std::complex<double>(p(0), p(1));
            }
        }
    }
}

GridPtr make_grid(int L)
{
    return std::make_shared<const SphereGrid>(L);
}

ScalarField sample(const GridPtr& grid, const std::function<double(const Vec<double>&)>& f)
{
    ScalarField out{grid, Eigen::VectorXd(grid->size()), std::nullopt};
    for (int i = 0; i < grid->size(); ++i) out.samples(i) = f(grid->point_vec(i));
    return out;
}

ScalarField constant_field(const GridPtr& grid, double v)
{
    return ScalarField{grid, Eigen::VectorXd::Constant(grid->size(), v), std::nullopt};
}

Eigen::VectorXd analyze(const ScalarField& f)
{
    const SphereGrid& g = *f.grid;
    if (f.samples.size() != g.size()) throw DimensionMismatch("analyze: sample count does not match grid");
    const Eigen::VectorXd weighted = g.weights().cwiseProduct(f.samples);
    Eigen::VectorXd c(g.harmonics());
    for (int i = 0; i < g.harmonics(); ++i) c(i) = weighted_sum(g.basis().col(i), weighted);
    return c;
}

ScalarField synthesize(const GridPtr& grid, const Eigen::VectorXd& coefficients)
{
    const int L = degree_for_size(coefficients.size());
    if (L > grid->degree()) throw DomainViolation("synthesize: band limit exceeds grid degree");
    ScalarField out{grid, Eigen::VectorXd(grid->size()), coefficients};
    const Eigen::MatrixXd& B = grid->basis();
    for (int node = 0; node < grid->size(); ++node) {
        double s = 0;
        for (Eigen::Index i = 0; i < coefficients.size(); ++i) s += B(node, i) * coefficients(i);
        out.samples(node) = s;
    }
    if (coefficients.size() < grid->harmonics()) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(grid->harmonics());
        full.head(coefficients.size()) = coefficients;
        out.coefficients = full;
    }
    return out;
}

ScalarField with_coefficients(ScalarField f)
{
    f.coefficients = analyze(f);
    return f;
}

double weighted_sum(const Eigen::VectorXd& w, const Eigen::VectorXd& v)
{
    if (w.size() != v.size()) throw DimensionMismatch("weighted_sum: size mismatch");
    return pairwise(w, v, 0, w.size());
}

double integrate(const ScalarField& f)
{
    return weighted_sum(f.grid->weights(), f.samples);
}

double integrate(const ScalarField& f, const ScalarField& weight)
{
    if (f.grid.get() != weight.grid.get() && f.grid->degree() != weight.grid->degree())
        throw DimensionMismatch("integrate: fields live on different grids");
    return weighted_sum(f.grid->weights(), f.samples.cwiseProduct(weight.samples));
}

double real_harmonic(int l, int m, const Eigen::Vector3d& x)
{
    const int am = std::abs(m);
    if (am > l) throw DomainViolation("real_harmonic: |m| > l");
    ReducedLegendre q(l, x(2));
    const std::complex<double> w = std::pow(std::complex<double>(x(0), x(1)), am);
    const double base = q.get(q.q, l, am);
    if (m == 0) return base;
    return std::sqrt(2.0) * base * (m > 0 ? w.real() : w.imag());
}

AmbientJet<double> harmonic_expansion_jet(const Eigen::VectorXd& c, const Vec<double>& p)
{
    if (p.size() != 3) throw DimensionMismatch("harmonic expansions live on S^2");
    const int L = degree_for_size(c.size());
    ReducedLegendre q(L, p(2));
    // Powers (x + i y)^k for k = 0..L.
    std::vector<std::complex<double>> w(static_cast<std::size_t>(L + 1));
    w[0] = 1.0;
    for (int k = 1; k <= L; ++k) w[k] = w[k - 1] * std::complex<double>(p(0), p(1));
    auto W = [&](int k) { return k < 0 ? std::complex<double>(0.0) : w[static_cast<std::size_t>(k)]; };

    AmbientJet<double> out{0, Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()};
    for (int m = 0; m <= L; ++m) {
        double A = 0, dA = 0, d2A = 0, B = 0, dB = 0, d2B = 0;
        for (int l = m; l <= L; ++l) {
            const double cp = c(l * l + l + m);
            A += cp * q.get(q.q, l, m);
            dA += cp * q.get(q.dq, l, m);
            d2A += cp * q.get(q.d2q, l, m);
            if (m > 0) {
                const double cm = c(l * l + l - m);
                B += cm * q.get(q.q, l, m);
                dB += cm * q.get(q.dq, l, m);
                d2B += cm * q.get(q.d2q, l, m);
            }
        }
        const double norm = m == 0 ? 1.0 : std::sqrt(2.0);
        // F_m = A(z) Re w^m + B(z) Im w^m; write Z = A - i B so F_m = Re(Z w^m).
        const std::complex<double> Z(A, -B), dZ(dA, -dB), d2Z(d2A, -d2B);
        const double md = m;
        const std::complex<double> f = Z * W(m);
        const std::complex<double> fx = Z * md * W(m - 1);
        const std::complex<double> fy = Z * std::complex<double>(0, md) * W(m - 1);
        const std::complex<double> fz = dZ * W(m);
        const std::complex<double> fxx = Z * md * (md - 1) * W(m - 2);
        const std::complex<double> fxy = Z * std::complex<double>(0, md * (md - 1)) * W(m - 2);
        const std::complex<double> fyy = -Z * md * (md - 1) * W(m - 2);
        const std::complex<double> fxz = dZ * md * W(m - 1);
        const std::complex<double> fyz = dZ * std::complex<double>(0, md) * W(m - 1);
        const std::complex<double> fzz = d2Z * W(m);
        out.value += norm * f.real();
        out.grad(0) += norm * fx.real();
        out.grad(1) += norm * fy.real();
        out.grad(2) += norm * fz.real();
        out.hess(0, 0) += norm * fxx.real();
        out.hess(0, 1) += norm * fxy.real();
        out.hess(1, 1) += norm * fyy.real();
        out.hess(0, 2) += norm * fxz.real();
        out.hess(1, 2) += norm * fyz.real();
        out.hess(2, 2) += norm * fzz.real();
    }
    out.hess(1, 0) = out.hess(0, 1);
    out.hess(2, 0) = out.hess(0, 2);
    out.hess(2, 1) = out.hess(1, 2);
    return out;
}

ConformalFactor harmonic_factor(const Eigen::VectorXd& coefficients, std::string label)
{
    degree_for_size(coefficients.size());
    return ambient_factor(
        2, [coefficients](const Vec<double>& p) { return harmonic_expansion_jet(coefficients, p); }, std::move(label));
}

Eigen::VectorXd harmonic_coefficients(int L, std::initializer_list<std::tuple<int, int, double>> entries)
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero((L + 1) * (L + 1));
    for (const auto& [l, m, v] : entries) {
        if (l > L || std::abs(m) > l) throw DomainViolation("harmonic_coefficients: index out of range");
        c(l * l + l + m) = v;
    }
    return c;
}

}  // namespace horolab
