#include "spde/integrators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spde {

std::string_view to_string(IntegratorKind kind) noexcept {
    switch (kind) {
        case IntegratorKind::lie_trotter: return "LT";
        case IntegratorKind::euler_maruyama: return "EM";
        case IntegratorKind::semi_implicit_euler: return "SEM";
        case IntegratorKind::stochastic_exponential: return "SEXP";
    }
    return "?";
}

std::optional<IntegratorKind> parse_integrator(std::string_view name) noexcept {
    for (auto kind : all_integrators) {
        const auto tag = to_string(kind);
        if (tag.size() == name.size() &&
            std::equal(tag.begin(), tag.end(), name.begin(), [](char a, char b) {
                return a == std::toupper(static_cast<unsigned char>(b));
            })) {
            return kind;
        }
    }
    return std::nullopt;
}

StepContext::StepContext(HeatOperator op, Nonlinearity nonlinearity, double tau)
    : op_(std::move(op)),
      nonlinearity_(std::move(nonlinearity)),
      tau_(tau),
      propagator_(op_, tau),
      implicit_(op_, tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("time step must be positive");
}

void step_lt(const StepContext& ctx, std::span<const double> u, double dbeta, std::span<double> out,
             StepWorkspace& ws, StepDiagnostics* diag) {
    const auto& nl = ctx.nonlinearity();
    const double half_tau = 0.5 * ctx.tau();
    auto& w = ws.scratch;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double f = nl.f(u[i]);
        double exponent = f * dbeta - f * f * half_tau;
        if (exponent > max_lt_exponent) {
            exponent = max_lt_exponent;
            if (diag) ++diag->exponent_clamps;
        }
        w[i] = u[i] * std::exp(exponent);
    }
    ctx.propagator().apply(w, out, ws.spectral);
}

void step_em(const StepContext& ctx, std::span<const double> u, double dbeta, std::span<double> out,
             StepWorkspace& ws) {
    const auto& nl = ctx.nonlinearity();
    const double tau = ctx.tau();
    auto& lap = ws.scratch;
    ctx.op().apply_laplacian(u, lap);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + tau * lap[i] + nl.g(u[i]) * dbeta;
}

void step_sem(const StepContext& ctx, std::span<const double> u, double dbeta, std::span<double> out,
              StepWorkspace& ws) {
    const auto& nl = ctx.nonlinearity();
    auto& rhs = ws.scratch;
    for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = u[i] + nl.g(u[i]) * dbeta;
    ctx.implicit_solver().solve(rhs, out, ws.spectral);
}

void step_sexp(const StepContext& ctx, std::span<const double> u, double dbeta, std::span<double> out,
               StepWorkspace& ws) {
    const auto& nl = ctx.nonlinearity();
    auto& w = ws.scratch;
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] + nl.g(u[i]) * dbeta;
    ctx.propagator().apply(w, out, ws.spectral);
}

void step(IntegratorKind kind, const StepContext& ctx, std::span<const double> u, double dbeta,
          std::span<double> out, StepWorkspace& ws, StepDiagnostics* diag) {
    switch (kind) {
        case IntegratorKind::lie_trotter: step_lt(ctx, u, dbeta, out, ws, diag); return;
        case IntegratorKind::euler_maruyama: step_em(ctx, u, dbeta, out, ws); return;
        case IntegratorKind::semi_implicit_euler: step_sem(ctx, u, dbeta, out, ws); return;
        case IntegratorKind::stochastic_exponential: step_sexp(ctx, u, dbeta, out, ws); return;
    }
}

namespace {

GridField step_field(IntegratorKind kind, const StepContext& ctx, const GridField& u, double dbeta) {
    if (!(u.grid() == ctx.grid())) throw std::invalid_argument("field grid does not match step context");
    StepWorkspace ws(ctx.grid());
    std::vector<double> out(u.size());
    step(kind, ctx, u.values(), dbeta, out, ws);
    return GridField(ctx.grid(), std::move(out));
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

GridField step_lt(const StepContext& ctx, const GridField& u, double dbeta) {
    return step_field(IntegratorKind::lie_trotter, ctx, u, dbeta);
}
GridField step_em(const StepContext& ctx, const GridField& u, double dbeta) {
    return step_field(IntegratorKind::euler_maruyama, ctx, u, dbeta);
}
GridField step_sem(const StepContext& ctx, const GridField& u, double dbeta) {
    return step_field(IntegratorKind::semi_implicit_euler, ctx, u, dbeta);
}
GridField step_sexp(const StepContext& ctx, const GridField& u, double dbeta) {
    return step_field(IntegratorKind::stochastic_exponential, ctx, u, dbeta);
}

PathRecord run_path(IntegratorKind kind, const StepContext& ctx, std::span<const double> u0,
                    std::span<const double> increments, const PathOptions& options) {
    if (u0.size() != ctx.grid().size()) throw std::invalid_argument("initial field does not match grid");
    if (increments.empty()) throw std::invalid_argument("run_path needs at least one increment");

    PathRecord rec;
    rec.kind = kind;
    rec.steps = increments.size();
    rec.increment_checksum = increment_checksum(increments);
    rec.sup_norms.reserve(increments.size() + 1);

    std::vector<double> u(u0.begin(), u0.end());
    StepWorkspace ws(ctx.grid());
    StepDiagnostics diag;

    auto record = [&](std::size_t m) {
        const double lo = min_value(u);
        if (std::isnan(lo)) {
            rec.diverged_at = m;
            rec.running_min = std::numeric_limits<double>::quiet_NaN();
            return false;
        }
        rec.running_min = m == 0 ? lo : std::min(rec.running_min, lo);
        rec.sup_norms.push_back(sup_norm(u));
        if (options.mode == RecordMode::full) rec.trajectory.push_back(u);
        if (options.observer) options.observer(m, u);
        return true;
    };

    if (!all_finite(u)) throw std::invalid_argument("initial field must be finite");
    record(0);
    for (std::size_t m = 0; m < increments.size(); ++m) {
        step(kind, ctx, u, increments[m], u, ws, &diag);
        if (!record(m + 1)) break;
    }
    rec.exponent_clamps = diag.exponent_clamps;
    rec.final_values = std::move(u);
    return rec;
}

PathRecord run_path(IntegratorKind kind, const StepContext& ctx, const GridField& u0,
                    std::span<const double> increments, const PathOptions& options) {
    if (!(u0.grid() == ctx.grid())) throw std::invalid_argument("initial field does not match grid");
    return run_path(kind, ctx, u0.values(), increments, options);
}

}  // namespace spde
