#pragma once

#include <filesystem>
#include <iosfwd>

#include "horolab/io.hpp"

namespace horolab {

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitNotRegular = 3 };

int run_build(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err);
int run_solve(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err);
int run_verify(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err);
int run_dual(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err);
int run_weingarten(const Config& cfg, const std::filesystem::path& outdir, std::ostream& out, std::ostream& err);

/// `horolab <build|solve|verify|dual|weingarten> <config> [-o outdir]`.
int run_cli(int argc, char** argv);

}  // namespace horolab
