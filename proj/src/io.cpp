#include "horolab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace horolab {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    return os;
}

}  // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context)
{
    const std::string t = trim(text);
    double v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ParseError(context + ": expected a number, got '" + text + "'");
    return v;
}

int parse_int(const std::string& text, const std::string& context)
{
    const std::string t = trim(text);
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ParseError(context + ": expected an integer, got '" + text + "'");
    return v;
}

Config Config::parse(const std::string& text, const std::string& source)
{
    Config c;
    c.source_ = source;
    std::istringstream is(text);
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(number);
        if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(where + ": empty key");
        if (c.values_.count(key)) throw ParseError(where + ": duplicate key '" + key + "'");
        c.values_[key] = value;
    }
    return c;
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path.string());
}

std::string Config::get(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const
{
    return has(key) ? parse_double(values_.at(key), source_ + ": " + key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const
{
    return has(key) ? parse_int(values_.at(key), source_ + ": " + key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key)) return fallback;
    const std::string v = values_.at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError(source_ + ": " + key + ": expected true or false, got '" + v + "'");
}

void Config::require_keys(const std::vector<std::string>& allowed) const
{
    for (const auto& [key, value] : values_) {
        bool ok = false;
        for (const std::string& a : allowed) ok = ok || a == key;
        if (!ok) throw ParseError(source_ + ": unknown key '" + key + "'");
    }
}

void write_scalar_field(const std::filesystem::path& path, const ScalarField& f)
{
    std::ofstream os = open_out(path);
    os << "theta,phi,value\n";
    for (int i = 0; i < f.grid->size(); ++i)
        os << format_double(f.grid->theta(i)) << ',' << format_double(f.grid->phi(i)) << ',' << format_double(f.samples(i))
           << '\n';
}

ScalarField read_scalar_field(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot read field " + path.string());
    std::string line;
    if (!std::getline(is, line) || trim(line) != "theta,phi,value")
        throw ParseError(path.string() + ":1: expected header theta,phi,value");
    std::vector<std::array<double, 3>> rows;
    int number = 1;
    while (std::getline(is, line)) {
        ++number;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        const std::string where = path.string() + ":" + std::to_string(number);
        if (cells.size() != 3) throw ParseError(where + ": expected 3 columns, got " + std::to_string(cells.size()));
        rows.push_back({parse_double(cells[0], where + " theta"), parse_double(cells[1], where + " phi"),
                        parse_double(cells[2], where + " value")});
    }
    const int half = static_cast<int>(rows.size()) / 2;
    const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(half))));
    if (rows.empty() || static_cast<int>(rows.size()) != 2 * root * root || root - 1 < 4)
        throw ParseError(path.string() + ": row count " + std::to_string(rows.size()) +
                         " is not 2(L+1)^2 for a supported degree L");
    const GridPtr grid = make_grid(root - 1);
    ScalarField f{grid, Eigen::VectorXd(grid->size()), std::nullopt};
    for (int i = 0; i < grid->size(); ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (std::abs(r[0] - grid->theta(i)) > 1e-9 || std::abs(r[1] - grid->phi(i)) > 1e-9)
            throw ParseError(path.string() + ":" + std::to_string(i + 2) + ": node does not match the degree-" +
                             std::to_string(grid->degree()) + " grid");
        if (!std::isfinite(r[2])) throw ParseError(path.string() + ":" + std::to_string(i + 2) + ": value is not finite");
        f.samples(i) = r[2];
    }
    return with_coefficients(f);
}

FieldSource FieldSource::parse(const std::string& text)
{
    FieldSource s;
    const std::string t = trim(text);
    if (t.rfind("constant:", 0) == 0) {
        s.kind = Kind::Constant;
        s.a = parse_double(t.substr(9), "constant value");
    } else if (t.rfind("coordinate:", 0) == 0) {
        const std::vector<std::string> parts = split(t.substr(11), ':');
        if (parts.size() != 3) throw ParseError("coordinate source: expected coordinate:<i>:<a>:<b>");
        s.kind = Kind::Coordinate;
        s.axis = parse_int(parts[0], "coordinate axis");
        s.a = parse_double(parts[1], "coordinate offset");
        s.b = parse_double(parts[2], "coordinate slope");
        if (s.axis < 1 || s.axis > 3) throw ParseError("coordinate source: axis must be 1, 2 or 3");
    } else if (!t.empty()) {
        s.kind = Kind::File;
        s.path = t;
    } else {
        throw ParseError("empty field source");
    }
    return s;
}

ConformalFactor FieldSource::factor(int n) const
{
    switch (kind) {
    case Kind::Constant:
        return constant_factor(n, a);
    case Kind::Coordinate:
        return coordinate_factor(n, axis, a, b);
    case Kind::File:
        return harmonic_factor(*read_scalar_field(path).coefficients, path.filename().string());
    }
    throw ParseError("unknown field source");
}

ScalarField FieldSource::field(const GridPtr& grid) const
{
    if (kind == Kind::File) {
        ScalarField f = read_scalar_field(path);
        if (f.grid->degree() != grid->degree())
            throw ParseError(path.string() + ": field degree " + std::to_string(f.grid->degree()) + " differs from L = " +
                             std::to_string(grid->degree()));
        f.grid = grid;
        return f;
    }
    const ConformalFactor rho = factor(2);
    return with_coefficients(sample(grid, rho.value));
}

int FieldSource::degree(int fallback) const
{
    return kind == Kind::File ? read_scalar_field(path).grid->degree() : fallback;
}

void write_report_csv(const std::filesystem::path& path, const SphereGrid& grid, const std::vector<CurvatureReport>& reports)
{
    std::ofstream os = open_out(path);
    os << "theta,phi,kappa_min,kappa_max,R_mean,lambda_min,lambda_max,S,C,regular\n";
    for (int i = 0; i < grid.size(); ++i) {
        const CurvatureReport& r = reports[static_cast<std::size_t>(i)];
        os << format_double(grid.theta(i)) << ',' << format_double(grid.phi(i)) << ',' << format_double(r.kappas.minCoeff())
           << ',' << format_double(r.kappas.maxCoeff()) << ',' << format_double(r.radii.mean()) << ','
           << format_double(r.lambdas.minCoeff()) << ',' << format_double(r.lambdas.maxCoeff()) << ','
           << format_double(r.scalar) << ',' << format_double(r.christoffel_mean) << ','
           << (r.regularity.regular ? 1 : 0) << '\n';
    }
}

void write_obj(const std::filesystem::path& path, const Mesh& mesh)
{
    std::ofstream os = open_out(path);
    os << "# Poincare ball image\n";
    for (const Eigen::Vector3d& v : mesh.vertices)
        os << "v " << format_double(v(0)) << ' ' << format_double(v(1)) << ' ' << format_double(v(2)) << '\n';
    for (const auto& f : mesh.faces) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_residuals_csv(const std::filesystem::path& path, const std::vector<double>& residuals)
{
    std::ofstream os = open_out(path);
    os << "iter,residual\n";
    for (std::size_t i = 0; i < residuals.size(); ++i) os << i << ',' << format_double(residuals[i]) << '\n';
}

void write_kw_csv(const std::filesystem::path& path, const Eigen::VectorXd& kw)
{
    std::ofstream os = open_out(path);
    os << "i,value\n";
    for (Eigen::Index i = 0; i < kw.size(); ++i) os << i + 1 << ',' << format_double(kw(i)) << '\n';
}

void write_dual_csv(const std::filesystem::path& path, const SphereGrid& grid, const std::vector<DualRow>& rows)
{
    std::ofstream os = open_out(path);
    os << "theta,phi,lambda_i,lambda_star_i,product\n";
    for (const DualRow& row : rows) {
        for (Eigen::Index i = 0; i < row.result.lambdas.size(); ++i)
            os << format_double(grid.theta(row.node)) << ',' << format_double(grid.phi(row.node)) << ','
               << format_double(row.result.lambdas(i)) << ',' << format_double(row.result.lambda_star(i)) << ','
               << format_double(row.result.products(i)) << '\n';
    }
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os = open_out(path);
    os << text;
}

}  // namespace horolab
