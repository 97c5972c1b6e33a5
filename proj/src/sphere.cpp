#include "horolab/sphere.hpp"

#include <random>

namespace horolab {

Jet2<double> fd_jet(const std::function<double(const Vec<double>&)>& f, const Vec<double>& x, double h_grad,
                    double h_hess)
{
    require_on_sphere(x, "fd_jet");
    Jet2<double> j;
    j.x = x;
    j.frame = tangent_frame(x);
    const int n = j.n();
    j.value = f(x);
    auto at = [&](const Vec<double>& u) { return f(chart_point(x, j.frame, u)); };
    Vec<double> d(n);
    for (int i = 0; i < n; ++i) {
        const Vec<double> u = h_grad * Vec<double>::Unit(n, i);
        d(i) = (at(u) - at(-u)) / (2 * h_grad);
    }
    j.grad = j.frame * d;
    j.hess.resize(n, n);
    const double h2 = h_hess * h_hess;
    for (int i = 0; i < n; ++i) {
        const Vec<double> ui = h_hess * Vec<double>::Unit(n, i);
        j.hess(i, i) = (at(ui) - 2 * j.value + at(-ui)) / h2;
        for (int k = i + 1; k < n; ++k) {
            const Vec<double> uk = h_hess * Vec<double>::Unit(n, k);
            const double v = (at(ui + uk) - at(ui - uk) - at(uk - ui) + at(-ui - uk)) / (4 * h2);
            j.hess(i, k) = j.hess(k, i) = v;
        }
    }
    return j;
}

Jet2<double> jet2(const ConformalFactor& rho, const Vec<double>& x)
{
    require_on_sphere(x, "jet2");
    if (x.size() != rho.n + 1) throw DimensionMismatch("jet2: point dimension does not match the factor");
    if (rho.mode == JetMode::Analytic && rho.jet) return rho.jet(x);
    return fd_jet(rho.value, x);
}

ConformalFactor ConformalFactor::shifted(double t) const
{
    ConformalFactor out = *this;
    auto v = value;
    out.value = [v, t](const Vec<double>& x) { return v(x) + t; };
    if (jet) {
        auto jf = jet;
        out.jet = [jf, t](const Vec<double>& x) {
            Jet2<double> j = jf(x);
            j.value += t;
            return j;
        };
    }
    return out;
}

ConformalFactor ambient_factor(int n, std::function<AmbientJet<double>(const Vec<double>&)> f, std::string label)
{
    ConformalFactor rho;
    rho.n = n;
    rho.value = [f](const Vec<double>& x) { return f(x).value; };
    rho.jet = [f](const Vec<double>& x) { return restrict_to_sphere(f(x), x); };
    rho.label = std::move(label);
    return rho;
}

ConformalFactor sampled_factor(int n, std::function<double(const Vec<double>&)> f, std::string label)
{
    ConformalFactor rho;
    rho.n = n;
    rho.value = std::move(f);
    rho.mode = JetMode::FiniteDifference;
    rho.label = std::move(label);
    return rho;
}

ConformalFactor constant_factor(int n, double c)
{
    const int dim = n + 1;
    return ambient_factor(
        n,
        [c, dim](const Vec<double>&) {
            return AmbientJet<double>{c, Vec<double>::Zero(dim), Mat<double>::Zero(dim, dim)};
        },
        "constant");
}

ConformalFactor coordinate_factor(int n, int i, double a, double b)
{
    if (i < 1 || i > n + 1) throw DomainViolation("coordinate_factor: axis out of range");
    const int dim = n + 1;
    const int k = i - 1;
    return ambient_factor(
        n,
        [=](const Vec<double>& x) {
            return AmbientJet<double>{a + b * x(k), b * Vec<double>::Unit(dim, k), Mat<double>::Zero(dim, dim)};
        },
        "coordinate");
}

namespace {

double ipow(double base, int e)
{
    double r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

AmbientJet<double> AmbientPolynomial::evaluate(const Vec<double>& p) const
{
    AmbientJet<double> out{0, Vec<double>::Zero(dim), Mat<double>::Zero(dim, dim)};
    for (const Term& t : terms) {
        std::vector<double> pw(static_cast<std::size_t>(dim)), d1(pw.size()), d2(pw.size());
        for (int k = 0; k < dim; ++k) {
            const int e = t.exponents[static_cast<std::size_t>(k)];
            pw[k] = ipow(p(k), e);
            d1[k] = e >= 1 ? e * ipow(p(k), e - 1) : 0.0;
            d2[k] = e >= 2 ? e * (e - 1) * ipow(p(k), e - 2) : 0.0;
        }
        double value = t.coefficient;
        for (int k = 0; k < dim; ++k) value *= pw[k];
        out.value += value;
        for (int a = 0; a < dim; ++a) {
            double ga = t.coefficient * d1[a];
            for (int k = 0; k < dim; ++k)
                if (k != a) ga *= pw[k];
            out.grad(a) += ga;
            for (int b = 0; b < dim; ++b) {
                double h = t.coefficient;
                for (int k = 0; k < dim; ++k) {
                    if (a == b && k == a)
                        h *= d2[k];
                    else if (k == a || k == b)
                        h *= d1[k];
                    else
                        h *= pw[k];
                }
                out.hess(a, b) += h;
            }
        }
    }
    return out;
}

int AmbientPolynomial::degree() const
{
    int d = 0;
    for (const Term& t : terms) d = std::max(d, std::accumulate(t.exponents.begin(), t.exponents.end(), 0));
    return d;
}

namespace {

void exponent_tuples(int dim, int remaining, std::vector<int>& current, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(current.size()) == dim - 1) {
        current.push_back(remaining);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current.push_back(e);
        exponent_tuples(dim, remaining - e, current, out);
        current.pop_back();
    }
}

}  // namespace

AmbientPolynomial random_polynomial(int n, int degree, double amplitude, unsigned seed)
{
    AmbientPolynomial p;
    p.dim = n + 1;
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int d = 0; d <= degree; ++d) {
        std::vector<std::vector<int>> tuples;
        std::vector<int> cur;
        exponent_tuples(p.dim, d, cur, tuples);
        const double scale = amplitude / ((1.0 + d) * (1.0 + d));
        for (auto& e : tuples) p.terms.push_back({e, scale * coef(gen)});
    }
    return p;
}

ConformalFactor polynomial_factor(int n, const AmbientPolynomial& p, std::string label)
{
    if (p.dim != n + 1) throw DimensionMismatch("polynomial_factor: variable count must be n+1");
    return ambient_factor(n, [p](const Vec<double>& x) { return p.evaluate(x); }, std::move(label));
}

}  // namespace horolab
