#include "horolab/weingarten.hpp"

#include "horolab/horospherical.hpp"

namespace horolab {

std::vector<double> boundary_ray_probe(const WeingartenFunctional& wf, const Vec<double>& lambda_boundary,
                                       const Vec<double>& lambda_interior, const std::vector<double>& s_values)
{
    std::vector<double> out;
    out.reserve(s_values.size());
    for (double s : s_values) {
        const Vec<double> lambda = lambda_boundary + s * (lambda_interior - lambda_boundary);
        const Vec<double> kappa = transform_T(Vec<double>(2 * lambda));
        out.push_back(weingarten_value(wf, kappa));
    }
    return out;
}

UmbilicityDiagnostic umbilicity_diagnostic(const std::vector<CurvatureReport>& reports, const WeingartenFunctional& wf)
{
    UmbilicityDiagnostic d;
    if (reports.empty()) return d;
    std::vector<double> w(reports.size());
    double sum = 0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const Vec<double>& k = reports[i].kappas;
        d.max_spread = std::max(d.max_spread, k.maxCoeff() - k.minCoeff());
        w[i] = weingarten_value(wf, k);
        sum += w[i];
    }
    d.mean_weingarten = sum / static_cast<double>(w.size());
    for (double v : w) d.wein_const_dev = std::max(d.wein_const_dev, std::abs(v - d.mean_weingarten));
    return d;
}

double radii_sigma_from_lambdas(const Vec<double>& lambdas, int k)
{
    const int n = static_cast<int>(lambdas.size());
    if (k < 0 || k > n) throw DomainViolation("radii_sigma_from_lambdas: k must lie in 0..n");
    double total = 0;
    for (int j = 0; j <= k; ++j) {
        double binom = 1;
        for (int r = 1; r <= k - j; ++r) binom = binom * (n - j - (k - j) + r) / r;
        total += binom * std::pow(0.5, k - j) * ((j % 2) ? -1.0 : 1.0) * sigma_k(lambdas, j);
    }
    return total;
}

}  // namespace horolab
