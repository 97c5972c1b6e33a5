#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "horolab/io.hpp"

namespace horolab {

enum class Relation { AtMost, AtLeast, Above };

struct VerifyCheck {
    std::string suite;
    std::string name;
    double value = 0;
    double bound = 0;
    Relation relation = Relation::AtMost;
    bool pass = false;
};

struct VerifyOptions {
    int L = 16;
    unsigned seed = 1;
    int samples = 100;
    /// Optional extra factor checked by the input suite.
    std::optional<FieldSource> rho;
};

VerifyOptions verify_options(const Config& cfg);

/// Runs every property suite and writes verify.csv, summary.txt and the sample
/// artifacts (report.csv, residuals.csv, kw.csv, dual.csv, surface.obj) to `outdir`.
std::vector<VerifyCheck> run_verify_suites(const VerifyOptions& opt, const std::filesystem::path& outdir);

}  // namespace horolab
