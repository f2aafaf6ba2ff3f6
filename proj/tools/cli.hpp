#pragma once

#include "spde/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde::cli {

enum class Subcommand { census, convergence, mesh_study, selftest };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunSpec {
    Subcommand command = Subcommand::census;
    CensusConfig census = CensusConfig::defaults(1);
    ConvergenceConfig convergence = ConvergenceConfig::defaults(1);
    /// One convergence study is run per entry.
    std::vector<Nonlinearity> convergence_nonlinearities;
    MeshStudyConfig mesh = MeshStudyConfig::defaults();
    std::filesystem::path out;
    std::optional<std::filesystem::path> config_file;
    unsigned jobs = 0;
    std::uint64_t seed = default_seed;
    /// Set when --help was requested; nothing else is meaningful then.
    std::optional<std::string> help;
};

using EnvLookup = std::function<const char*(const char*)>;

/// Validated RunSpec from argv. Throws UsageError naming the offending flag.
/// Config-file entries ("key = value", '#' comments) are applied first so
/// that command-line flags override them; SPDE_LAB_SEED is the seed fallback.
RunSpec parse_args(std::span<const std::string> args, const EnvLookup& env = {});
RunSpec parse_args(int argc, const char* const* argv, const EnvLookup& env = {});

/// dyadic "2^-j" literal or decimal equal to horizon / 2^j; returns j.
int parse_dyadic_step(const std::string& text, double horizon);
/// "a..b" or comma list.
std::vector<int> parse_levels(const std::string& text);

/// Exit codes: 0 success, 1 I/O or configuration error, 2 selftest failure.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace spde::cli
