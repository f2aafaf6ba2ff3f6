#pragma once

#include "spde/heat_operator.hpp"
#include "spde/mesh.hpp"
#include "spde/noise_paths.hpp"
#include "spde/nonlinearity.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace spde {

enum class IntegratorKind {
    lie_trotter,              // LT: exp(tau A) [u * exp(f(u) dB - f(u)^2 tau / 2)]
    euler_maruyama,           // EM: u + tau A u + g(u) dB
    semi_implicit_euler,      // SEM: (I - tau A)^{-1} (u + g(u) dB)
    stochastic_exponential,   // SEXP: exp(tau A) (u + g(u) dB)
};

inline constexpr std::array<IntegratorKind, 4> all_integrators{
    IntegratorKind::lie_trotter, IntegratorKind::euler_maruyama, IntegratorKind::semi_implicit_euler,
    IntegratorKind::stochastic_exponential};

/// LT, EM, SEM, SEXP.
std::string_view to_string(IntegratorKind kind) noexcept;
/// Case-insensitive.
std::optional<IntegratorKind> parse_integrator(std::string_view name) noexcept;

/// Everything a constant-step run needs, precomputed once for (tau, grid)
/// and shared read-only between threads.
class StepContext {
public:
    StepContext(HeatOperator op, Nonlinearity nonlinearity, double tau);

    const HeatOperator& op() const noexcept { return op_; }
    const Grid& grid() const noexcept { return op_.grid(); }
    const Nonlinearity& nonlinearity() const noexcept { return nonlinearity_; }
    double tau() const noexcept { return tau_; }
    const SemigroupPropagator& propagator() const noexcept { return propagator_; }
    const ImplicitSolver& implicit_solver() const noexcept { return implicit_; }

private:
    HeatOperator op_;
    Nonlinearity nonlinearity_;
    double tau_;
    SemigroupPropagator propagator_;
    ImplicitSolver implicit_;
};

/// Per-thread scratch for the step kernels.
class StepWorkspace {
public:
    explicit StepWorkspace(const Grid& grid) : spectral(grid), scratch(grid.size()) {}

    SpectralWorkspace spectral;
    std::vector<double> scratch;
};

struct StepDiagnostics {
    /// LT exponents clamped at max_lt_exponent.
    std::size_t exponent_clamps = 0;
};

/// Upper bound applied to f dB - f^2 tau / 2 before exponentiation.
inline constexpr double max_lt_exponent = 700.0;

// Span kernels: `u` and `out` may alias.
void step_lt(const StepContext& ctx, std::span<const double> u, double dbeta, std::span<double> out,
             StepWorkspace& ws, StepDiagnostics* diag = nullptr);
void step_em(const StepContext& ctx, std::span<const double> u, double dbeta, std::span<double> out,
             StepWorkspace& ws);
void step_sem(const StepContext& ctx, std::span<const double> u, double dbeta, std::span<double> out,
              StepWorkspace& ws);
void step_sexp(const StepContext& ctx, std::span<const double> u, double dbeta, std::span<double> out,
               StepWorkspace& ws);
void step(IntegratorKind kind, const StepContext& ctx, std::span<const double> u, double dbeta,
          std::span<double> out, StepWorkspace& ws, StepDiagnostics* diag = nullptr);

GridField step_lt(const StepContext& ctx, const GridField& u, double dbeta);
GridField step_em(const StepContext& ctx, const GridField& u, double dbeta);
GridField step_sem(const StepContext& ctx, const GridField& u, double dbeta);
GridField step_sexp(const StepContext& ctx, const GridField& u, double dbeta);

enum class RecordMode { summary, full };

struct PathOptions {
    RecordMode mode = RecordMode::summary;
    /// Called with (m, u_m) for every finite state, m = 0..M.
    std::function<void(std::size_t, std::span<const double>)> observer;
};

struct PathRecord {
    IntegratorKind kind{};
    std::size_t steps = 0;
    /// Minimum over all entries of u_0..u_M; NaN once diverged.
    double running_min = 0.0;
    /// sup_norm(u_m), m = 0..M (shorter if diverged).
    std::vector<double> sup_norms;
    std::vector<double> final_values;
    /// u_0..u_M, only in RecordMode::full.
    std::vector<std::vector<double>> trajectory;
    /// First step m whose state is non-finite.
    std::optional<std::size_t> diverged_at;
    std::size_t exponent_clamps = 0;
    std::uint64_t increment_checksum = 0;

    bool diverged() const noexcept { return diverged_at.has_value(); }
    /// True iff every stored state is finite and entrywise >= 0.
    bool positive() const noexcept { return !diverged() && running_min >= 0.0; }
};

/// Iterates `kind` over all increments. Divergence stops the run and is
/// recorded, never thrown.
PathRecord run_path(IntegratorKind kind, const StepContext& ctx, std::span<const double> u0,
                    std::span<const double> increments, const PathOptions& options = {});
PathRecord run_path(IntegratorKind kind, const StepContext& ctx, const GridField& u0,
                    std::span<const double> increments, const PathOptions& options = {});

}  // namespace spde
