#pragma once

#include "spde/integrators.hpp"
#include "spde/mesh.hpp"
#include "spde/nonlinearity.hpp"
#include "spde/report.hpp"

#include <cstdint>
#include <vector>

namespace spde {

inline constexpr std::uint64_t default_seed = 20240229;

/// Positivity census: S sample paths, every integrator and every g on the
/// same increments; a path is positive iff all states are finite and >= 0.
struct CensusConfig {
    int dimension = 1;
    double horizon = 2.0;
    /// tau = horizon / 2^level.
    int level = 6;
    int subdivisions = 256;
    std::vector<Nonlinearity> nonlinearities{Nonlinearity::linear(2.5), Nonlinearity::rational(2.5),
                                             Nonlinearity::sine_plus(2.5), Nonlinearity::log1p(2.5)};
    InitialData initial = InitialData::sine_1d();
    std::size_t samples = 100;
    std::uint64_t seed = default_seed;
    std::vector<IntegratorKind> integrators{all_integrators.begin(), all_integrators.end()};
    /// 0 = hardware concurrency. Never affects results.
    unsigned jobs = 0;

    /// T = 2, tau = 2^-5, lambda = 2.5, S = 100; N = 2^8 in 1D, 2^4 per axis in 2D.
    static CensusConfig defaults(int dimension);
    double tau() const noexcept;
    void validate() const;
};

enum class ReferenceKind {
    lie_trotter,   // LT on the finest level of the same path
    exact_linear,  // exp(t A) exp(lambda beta(t) - lambda^2 t / 2) u0; linear g only
};

/// Mean-square error study over dyadic levels against a per-sample reference.
struct ConvergenceConfig {
    int dimension = 1;
    double horizon = 0.5;
    int reference_level = 16;
    std::vector<int> levels{4, 5, 6, 7, 8, 9, 10, 11, 12};
    int subdivisions = 256;
    Nonlinearity nonlinearity = Nonlinearity::rational(1.0);
    InitialData initial = InitialData::sine_1d();
    std::size_t samples = 150;
    std::uint64_t seed = default_seed;
    std::vector<IntegratorKind> integrators{IntegratorKind::lie_trotter, IntegratorKind::semi_implicit_euler,
                                            IntegratorKind::stochastic_exponential};
    ReferenceKind reference = ReferenceKind::lie_trotter;
    /// Levels used for the slope fit; empty = all levels except the two
    /// just below the reference level.
    std::vector<int> fit_levels;
    unsigned jobs = 0;

    /// T = 0.5, S = 150; 1D: N = 2^8, levels 4..12, reference 16;
    /// 2D: N = 2^4, levels 4..10, reference 14.
    static ConvergenceConfig defaults(int dimension);
    void validate() const;
    std::vector<int> effective_fit_levels() const;
};

struct MeshStudyConfig {
    ConvergenceConfig base;
    std::vector<int> subdivisions{16, 64, 256, 1024};
    std::vector<Nonlinearity> nonlinearities{Nonlinearity::linear(1.5), Nonlinearity::rational(1.5)};

    /// LT only, g in {1.5 v, 1.5 v / (1 + v^2)}, N in {2^4, 2^6, 2^8, 2^10}.
    static MeshStudyConfig defaults();
};

ExperimentReport positivity_census(const CensusConfig& cfg);

/// For each level j: sup over coarsest-level checkpoints t_m and grid points
/// x_n of sqrt(E|u_j(t_m, x_n) - u_ref(t_m, x_n)|^2), plus a fitted log-log
/// slope per integrator. Diverged (sample, integrator, level) cells are
/// excluded and counted.
ExperimentReport mean_square_error_study(const ConvergenceConfig& cfg);

/// mean_square_error_study per (g, N), each with its own reference.
ExperimentReport mesh_independence_study(const MeshStudyConfig& cfg);

/// sup over all steps and grid points of E|u_m(x_n)|^2, per integrator and level.
/// Uses cfg.levels; the reference fields are ignored.
ExperimentReport moment_bound_study(const ConvergenceConfig& cfg);

unsigned resolve_jobs(unsigned jobs) noexcept;

}  // namespace spde
