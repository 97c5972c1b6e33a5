#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "horolab/christoffel.hpp"
#include "horolab/grid.hpp"
#include "horolab/horospherical.hpp"

namespace horolab {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& context);
int parse_int(const std::string& text, const std::string& context);

/// Flat `key = value` configuration; `#` starts a comment.
class Config {
public:
    static Config parse(const std::string& text, const std::string& source = "config");
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Throws ParseError naming the first key outside `allowed`.
    void require_keys(const std::vector<std::string>& allowed) const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::string source_;
    std::map<std::string, std::string> values_;
};

/// CSV with header `theta,phi,value`, colatitude-major node order.
void write_scalar_field(const std::filesystem::path& path, const ScalarField& f);
/// Infers the grid degree from the row count 2(L+1)^2 and checks every node position.
ScalarField read_scalar_field(const std::filesystem::path& path);

/// `constant:<v>`, `coordinate:<i>:<a>:<b>`, or a path to a scalar-field CSV.
struct FieldSource {
    enum class Kind { Constant, Coordinate, File } kind = Kind::Constant;
    double a = 0, b = 0;
    int axis = 0;
    std::filesystem::path path;

    static FieldSource parse(const std::string& text);
    /// The factor: analytic for builtins, harmonic expansion of the samples for files.
    ConformalFactor factor(int n = 2) const;
    /// Samples on `grid`; files must match the grid degree.
    ScalarField field(const GridPtr& grid) const;
    /// Degree implied by a file source, or `fallback` for builtins.
    int degree(int fallback) const;
};

void write_report_csv(const std::filesystem::path& path, const SphereGrid& grid, const std::vector<CurvatureReport>& reports);
void write_obj(const std::filesystem::path& path, const Mesh& mesh);
void write_residuals_csv(const std::filesystem::path& path, const std::vector<double>& residuals);
void write_kw_csv(const std::filesystem::path& path, const Eigen::VectorXd& kw);

struct DualRow {
    int node = 0;
    DualResult result;
};
void write_dual_csv(const std::filesystem::path& path, const SphereGrid& grid, const std::vector<DualRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace horolab
