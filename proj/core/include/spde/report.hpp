#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spde {

struct CensusRow {
    std::string integrator;
    std::string g;
    double lambda = 0.0;
    int dimension = 1;
    int subdivisions = 0;
    double tau = 0.0;
    std::size_t samples = 0;
    std::size_t positive = 0;
    std::size_t diverged = 0;
    /// Order-dependent combination of the per-sample increment checksums.
    std::uint64_t increment_checksum = 0;
    std::size_t exponent_clamps = 0;
};

struct ErrorRow {
    std::string integrator;
    std::string g;
    double lambda = 0.0;
    int dimension = 1;
    int subdivisions = 0;
    int level = 0;
    double tau = 0.0;
    double rms_sup_error = 0.0;
    std::size_t samples_used = 0;
    std::size_t diverged = 0;
};

struct SlopeRow {
    std::string integrator;
    std::string g;
    double lambda = 0.0;
    int subdivisions = 0;
    double slope = 0.0;
};

struct MomentRow {
    std::string integrator;
    std::string g;
    double lambda = 0.0;
    int dimension = 1;
    int subdivisions = 0;
    int level = 0;
    double tau = 0.0;
    double sup_second_moment = 0.0;
};

enum class ReportKind { census, convergence, moments };

struct ExperimentReport {
    ReportKind kind = ReportKind::census;
    /// Emitted as "# key=value" lines; must not hold run-dependent data.
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<CensusRow> census;
    std::vector<ErrorRow> errors;
    std::vector<SlopeRow> slopes;
    std::vector<MomentRow> moments;
    double wall_seconds = 0.0;

    std::string metadata_value(const std::string& key) const;
};

/// Rows and slopes of `more` appended to `into`; metadata of `into` kept.
void append(ExperimentReport& into, const ExperimentReport& more);

/// Least-squares slope of log2(error) against log2(tau). Points with a
/// non-positive or non-finite error are skipped; NaN if fewer than two remain.
double fit_loglog_slope(std::span<const double> tau, std::span<const double> error);

/// Shortest round-trip decimal.
std::string format_double(double x);

std::string to_csv(const ExperimentReport& report);
std::string summary_text(const ExperimentReport& report);

/// Writes the CSV to `path` and the summary to `path` + ".summary.txt".
/// Throws std::runtime_error naming the path on I/O failure.
void write_report(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace spde
