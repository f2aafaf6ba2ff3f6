#include "spde/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace spde {

std::string ExperimentReport::metadata_value(const std::string& key) const {
    for (const auto& [k, v] : metadata)
        if (k == key) return v;
    return {};
}

void append(ExperimentReport& into, const ExperimentReport& more) {
    into.census.insert(into.census.end(), more.census.begin(), more.census.end());
    into.errors.insert(into.errors.end(), more.errors.begin(), more.errors.end());
    into.slopes.insert(into.slopes.end(), more.slopes.begin(), more.slopes.end());
    into.moments.insert(into.moments.end(), more.moments.begin(), more.moments.end());
    into.wall_seconds += more.wall_seconds;
}

double fit_loglog_slope(std::span<const double> tau, std::span<const double> error) {
    if (tau.size() != error.size()) throw std::invalid_argument("slope fit needs matching tau and error");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!(error[i] > 0.0) || !std::isfinite(error[i]) || !(tau[i] > 0.0)) continue;
        const double x = std::log2(tau[i]);
        const double y = std::log2(error[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (dn * sxy - sx * sy) / denom;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::string slope_label(const ExperimentReport& r, const SlopeRow& s) {
    std::set<std::tuple<std::string, double, int>> series;
    for (const auto& row : r.slopes) series.emplace(row.g, row.lambda, row.subdivisions);
    if (series.size() <= 1) return s.integrator;
    return s.integrator + "[g=" + s.g + ",lambda=" + format_double(s.lambda) + ",N=" + std::to_string(s.subdivisions) +
           "]";
}

}  // namespace

std::string to_csv(const ExperimentReport& r) {
    std::ostringstream os;
    for (const auto& [k, v] : r.metadata) os << "# " << k << '=' << v << '\n';
    switch (r.kind) {
        case ReportKind::census:
            os << "integrator,g,lambda,d,N,tau,samples,positive,diverged\n";
            for (const auto& c : r.census) {
                os << c.integrator << ',' << c.g << ',' << format_double(c.lambda) << ',' << c.dimension << ','
                   << c.subdivisions << ',' << format_double(c.tau) << ',' << c.samples << ',' << c.positive << ','
                   << c.diverged << '\n';
            }
            break;
        case ReportKind::convergence:
            os << "integrator,g,lambda,d,N,level,tau,rms_sup_error\n";
            for (const auto& e : r.errors) {
                os << e.integrator << ',' << e.g << ',' << format_double(e.lambda) << ',' << e.dimension << ','
                   << e.subdivisions << ',' << e.level << ',' << format_double(e.tau) << ','
                   << format_double(e.rms_sup_error) << '\n';
            }
            for (const auto& s : r.slopes) os << "# slope:" << slope_label(r, s) << '=' << format_double(s.slope) << '\n';
            break;
        case ReportKind::moments:
            os << "integrator,g,lambda,d,N,level,tau,sup_second_moment\n";
            for (const auto& m : r.moments) {
                os << m.integrator << ',' << m.g << ',' << format_double(m.lambda) << ',' << m.dimension << ','
                   << m.subdivisions << ',' << m.level << ',' << format_double(m.tau) << ','
                   << format_double(m.sup_second_moment) << '\n';
            }
            break;
    }
    return os.str();
}

std::string summary_text(const ExperimentReport& r) {
    std::ostringstream os;
    os << r.metadata_value("experiment") << " (seed " << r.metadata_value("seed") << ", d=" << r.metadata_value("d")
       << ", N=" << r.metadata_value("N") << ")\n";
    switch (r.kind) {
        case ReportKind::census:
            os << std::left << std::setw(10) << "g" << std::setw(8) << "lambda" << std::setw(6) << "int"
               << std::setw(12) << "positive" << "diverged\n";
            for (const auto& c : r.census) {
                os << std::setw(10) << c.g << std::setw(8) << format_double(c.lambda) << std::setw(6) << c.integrator
                   << std::setw(12) << (std::to_string(c.positive) + "/" + std::to_string(c.samples)) << c.diverged
                   << '\n';
            }
            break;
        case ReportKind::convergence: {
            os << std::left << std::setw(10) << "g" << std::setw(6) << "N" << std::setw(6) << "int" << std::setw(7)
               << "level" << std::setw(24) << "rms_sup_error" << "diverged\n";
            for (const auto& e : r.errors) {
                os << std::setw(10) << e.g << std::setw(6) << e.subdivisions << std::setw(6) << e.integrator
                   << std::setw(7) << e.level << std::setw(24) << format_double(e.rms_sup_error) << e.diverged << '\n';
            }
            for (const auto& s : r.slopes) os << "slope " << slope_label(r, s) << " = " << format_double(s.slope) << '\n';
            break;
        }
        case ReportKind::moments:
            for (const auto& m : r.moments) {
                os << m.integrator << " level " << m.level << ": sup E|u|^2 = " << format_double(m.sup_second_moment)
                   << '\n';
            }
            break;
    }
    os << "wall clock: " << std::fixed << std::setprecision(2) << r.wall_seconds << " s\n";
    return os.str();
}

void write_report(const ExperimentReport& r, const std::filesystem::path& path) {
    auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("failed writing '" + p.string() + "'");
    };
    write(path, to_csv(r));
    auto summary = path;
    summary += ".summary.txt";
    write(summary, summary_text(r));
}

}  // namespace spde
