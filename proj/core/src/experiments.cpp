#include "spde/experiments.hpp"

#include "spde/noise_paths.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#ifndef SPDE_VERSION
#define SPDE_VERSION "dev"
#endif

namespace spde {

unsigned resolve_jobs(unsigned jobs) noexcept {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace {

using Clock = std::chrono::steady_clock;

/// Runs compute(k) for k = 0..count-1 on up to `jobs` threads and feeds the
/// results to reduce(k, result) in ascending k. The reduction order is fixed,
/// so the outcome does not depend on the thread count.
template <class Compute, class Reduce>
void ordered_parallel(std::size_t count, unsigned jobs, Compute compute, Reduce reduce) {
    using Result = decltype(compute(std::size_t{}));
    jobs = resolve_jobs(jobs);
    const std::size_t block = std::size_t{jobs} * 2;
    std::vector<std::optional<Result>> results(block);

    for (std::size_t start = 0; start < count; start += block) {
        const std::size_t n = std::min(block, count - start);
        if (jobs == 1 || n == 1) {
            for (std::size_t i = 0; i < n; ++i) results[i].emplace(compute(start + i));
        } else {
            std::atomic<std::size_t> next{0};
            std::exception_ptr error;
            std::mutex error_mutex;
            std::vector<std::thread> workers;
            const std::size_t nthreads = std::min<std::size_t>(jobs, n);
            workers.reserve(nthreads);
            for (std::size_t t = 0; t < nthreads; ++t) {
                workers.emplace_back([&] {
                    for (std::size_t i = next++; i < n; i = next++) {
                        try {
                            results[i].emplace(compute(start + i));
                        } catch (...) {
                            std::lock_guard lock(error_mutex);
                            if (!error) error = std::current_exception();
                        }
                    }
                });
            }
            for (auto& w : workers) w.join();
            if (error) std::rethrow_exception(error);
        }
        for (std::size_t i = 0; i < n; ++i) {
            reduce(start + i, std::move(*results[i]));
            results[i].reset();
        }
    }
}

double dyadic_step(double horizon, int level) { return std::ldexp(horizon, -level); }

std::string join_levels(const std::vector<int>& levels) {
    std::string s;
    for (std::size_t i = 0; i < levels.size(); ++i) s += (i ? ";" : "") + std::to_string(levels[i]);
    return s;
}

std::string join_integrators(const std::vector<IntegratorKind>& kinds) {
    std::string s;
    for (std::size_t i = 0; i < kinds.size(); ++i) s += (i ? ";" : "") + std::string(to_string(kinds[i]));
    return s;
}

void common_metadata(ExperimentReport& r, const char* experiment, std::uint64_t seed) {
    r.metadata.emplace_back("spde-lab", SPDE_VERSION);
    r.metadata.emplace_back("experiment", experiment);
    r.metadata.emplace_back("seed", std::to_string(seed));
    r.metadata.emplace_back("rng", std::string(rng_method_name));
}

}  // namespace

// ---------------------------------------------------------------------------
// Configs

CensusConfig CensusConfig::defaults(int dimension) {
    CensusConfig cfg;
    cfg.dimension = dimension;
    cfg.subdivisions = dimension == 2 ? 16 : 256;
    cfg.initial = InitialData::sine(dimension);
    return cfg;
}

double CensusConfig::tau() const noexcept { return dyadic_step(horizon, level); }

void CensusConfig::validate() const {
    Grid grid(dimension, subdivisions);
    if (!(horizon > 0.0)) throw std::invalid_argument("census horizon must be positive");
    if (level < 0 || level > max_path_level) throw std::invalid_argument("census level must be in [0, 24]");
    if (samples == 0) throw std::invalid_argument("census needs at least one sample");
    if (initial.dimension() != dimension) throw std::invalid_argument("initial data dimension mismatch");
    const auto u0 = sample_initial(initial, grid);
    if (!(min_value(u0) >= 0.0)) {
        throw std::invalid_argument("positivity census needs nonnegative initial data on the grid");
    }
}

ConvergenceConfig ConvergenceConfig::defaults(int dimension) {
    ConvergenceConfig cfg;
    cfg.dimension = dimension;
    cfg.initial = InitialData::sine(dimension);
    if (dimension == 2) {
        cfg.subdivisions = 16;
        cfg.reference_level = 14;
        cfg.levels = {4, 5, 6, 7, 8, 9, 10};
    }
    return cfg;
}

void ConvergenceConfig::validate() const {
    Grid grid(dimension, subdivisions);
    (void)grid;
    if (!(horizon > 0.0)) throw std::invalid_argument("convergence horizon must be positive");
    if (reference_level < 0 || reference_level > max_path_level) {
        throw std::invalid_argument("reference level must be in [0, 24]");
    }
    if (levels.empty()) throw std::invalid_argument("convergence study needs at least one level");
    for (int j : levels) {
        if (j < 0 || j >= reference_level) {
            throw std::invalid_argument("level " + std::to_string(j) + " must be in [0, reference level " +
                                        std::to_string(reference_level) + ")");
        }
    }
    for (int j : fit_levels) {
        if (std::find(levels.begin(), levels.end(), j) == levels.end()) {
            throw std::invalid_argument("fit level " + std::to_string(j) + " is not a study level");
        }
    }
    if (samples == 0) throw std::invalid_argument("convergence study needs at least one sample");
    if (initial.dimension() != dimension) throw std::invalid_argument("initial data dimension mismatch");
    if (reference == ReferenceKind::exact_linear && nonlinearity.kind() != NonlinearityKind::linear &&
        nonlinearity.kind() != NonlinearityKind::zero) {
        throw std::invalid_argument("exact reference is only available for linear g");
    }
}

std::vector<int> ConvergenceConfig::effective_fit_levels() const {
    if (!fit_levels.empty()) return fit_levels;
    std::vector<int> out;
    for (int j : levels)
        if (j < reference_level - 2) out.push_back(j);
    return out;
}

MeshStudyConfig MeshStudyConfig::defaults() {
    MeshStudyConfig cfg;
    cfg.base = ConvergenceConfig::defaults(1);
    cfg.base.integrators = {IntegratorKind::lie_trotter};
    return cfg;
}

// ---------------------------------------------------------------------------
// Positivity census

ExperimentReport positivity_census(const CensusConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    const Grid grid(cfg.dimension, cfg.subdivisions);
    const HeatOperator op(grid);
    const GridField u0 = sample_initial(cfg.initial, grid);
    const double tau = cfg.tau();

    std::vector<StepContext> contexts;
    contexts.reserve(cfg.nonlinearities.size());
    for (const auto& nl : cfg.nonlinearities) contexts.emplace_back(op, nl, tau);

    const std::size_t ng = contexts.size();
    const std::size_t ni = cfg.integrators.size();

    struct Outcome {
        bool positive = false;
        bool diverged = false;
        std::uint64_t checksum = 0;
        std::size_t clamps = 0;
    };

    std::vector<CensusRow> rows(ng * ni);
    for (std::size_t g = 0; g < ng; ++g) {
        for (std::size_t i = 0; i < ni; ++i) {
            auto& row = rows[g * ni + i];
            row.integrator = std::string(to_string(cfg.integrators[i]));
            row.g = cfg.nonlinearities[g].name();
            row.lambda = cfg.nonlinearities[g].intensity();
            row.dimension = cfg.dimension;
            row.subdivisions = cfg.subdivisions;
            row.tau = tau;
            row.samples = cfg.samples;
        }
    }

    ordered_parallel(
        cfg.samples, cfg.jobs,
        [&](std::size_t k) {
            const auto path = sample_path(cfg.horizon, cfg.level, cfg.seed, k);
            std::vector<Outcome> out(ng * ni);
            for (std::size_t g = 0; g < ng; ++g) {
                for (std::size_t i = 0; i < ni; ++i) {
                    const auto rec = run_path(cfg.integrators[i], contexts[g], u0, path.increments());
                    out[g * ni + i] = {rec.positive(), rec.diverged(), rec.increment_checksum, rec.exponent_clamps};
                }
            }
            return out;
        },
        [&](std::size_t, std::vector<Outcome> out) {
            for (std::size_t c = 0; c < rows.size(); ++c) {
                rows[c].positive += out[c].positive ? 1 : 0;
                rows[c].diverged += out[c].diverged ? 1 : 0;
                rows[c].increment_checksum = rows[c].increment_checksum * 0x100000001b3ull ^ out[c].checksum;
                rows[c].exponent_clamps += out[c].clamps;
            }
        });

    ExperimentReport r;
    r.kind = ReportKind::census;
    common_metadata(r, "census", cfg.seed);
    r.metadata.emplace_back("d", std::to_string(cfg.dimension));
    r.metadata.emplace_back("N", std::to_string(cfg.subdivisions));
    r.metadata.emplace_back("T", format_double(cfg.horizon));
    r.metadata.emplace_back("tau", format_double(tau));
    r.metadata.emplace_back("samples", std::to_string(cfg.samples));
    r.metadata.emplace_back("initial", cfg.initial.name());
    r.metadata.emplace_back("integrators", join_integrators(cfg.integrators));
    r.census = std::move(rows);
    r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

// ---------------------------------------------------------------------------
// Mean-square error study

namespace {

/// Reference fields at the checkpoints t_c = c * T / 2^jmin, c = 0..2^jmin.
class ReferenceBuilder {
public:
    ReferenceBuilder(const ConvergenceConfig& cfg, const HeatOperator& op, int coarsest)
        : cfg_(cfg), coarsest_(coarsest), checkpoints_((std::size_t{1} << coarsest) + 1) {
        if (cfg.reference == ReferenceKind::lie_trotter) {
            context_.emplace(op, cfg.nonlinearity, dyadic_step(cfg.horizon, cfg.reference_level));
        } else {
            const double dt = dyadic_step(cfg.horizon, coarsest);
            for (std::size_t c = 0; c < checkpoints_; ++c)
                heat_flows_.emplace_back(op, static_cast<double>(c) * dt);
        }
    }

    std::size_t checkpoints() const noexcept { return checkpoints_; }

    /// Row-major checkpoints x grid values.
    std::vector<double> build(const BrownianPath& path, std::span<const double> u0) const {
        const std::size_t n = u0.size();
        std::vector<double> ref(checkpoints_ * n);
        if (context_) {
            const std::size_t stride = std::size_t{1} << (cfg_.reference_level - coarsest_);
            const auto rec = run_path(IntegratorKind::lie_trotter, *context_, u0, path.increments(),
                                      {RecordMode::summary, [&](std::size_t m, std::span<const double> u) {
                                           if (m % stride == 0) std::copy(u.begin(), u.end(), ref.begin() + (m / stride) * n);
                                       }});
            if (rec.diverged()) throw std::runtime_error("reference solution diverged");
            return ref;
        }
        const double lambda = cfg_.nonlinearity.kind() == NonlinearityKind::zero ? 0.0 : cfg_.nonlinearity.intensity();
        const auto coarse = path.coarsen(coarsest_);
        const double dt = dyadic_step(cfg_.horizon, coarsest_);
        SpectralWorkspace ws(heat_flows_.front().grid());
        std::vector<double> flowed(n);
        double beta = 0.0;
        for (std::size_t c = 0; c < checkpoints_; ++c) {
            if (c > 0) beta += coarse[c - 1];
            const double t = static_cast<double>(c) * dt;
            const double factor = std::exp(lambda * beta - 0.5 * lambda * lambda * t);
            heat_flows_[c].apply(u0, flowed, ws);
            for (std::size_t i = 0; i < n; ++i) ref[c * n + i] = factor * flowed[i];
        }
        return ref;
    }

private:
    const ConvergenceConfig& cfg_;
    int coarsest_;
    std::size_t checkpoints_;
    std::optional<StepContext> context_;
    std::vector<SemigroupPropagator> heat_flows_;
};

}  // namespace

ExperimentReport mean_square_error_study(const ConvergenceConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    const Grid grid(cfg.dimension, cfg.subdivisions);
    const HeatOperator op(grid);
    const GridField u0 = sample_initial(cfg.initial, grid);
    const std::size_t n = grid.size();

    std::vector<int> levels = cfg.levels;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const int coarsest = levels.front();

    const ReferenceBuilder reference(cfg, op, coarsest);
    const std::size_t nc = reference.checkpoints();

    std::vector<StepContext> contexts;
    contexts.reserve(levels.size());
    for (int j : levels) contexts.emplace_back(op, cfg.nonlinearity, dyadic_step(cfg.horizon, j));

    const std::size_t ni = cfg.integrators.size();
    const std::size_t nl = levels.size();
    const std::size_t cell = nc * n;

    struct SampleErrors {
        std::vector<double> squared;  // (integrator, level, checkpoint, point)
        std::vector<char> diverged;   // (integrator, level)
    };

    std::vector<double> sum_sq(ni * nl * cell, 0.0);
    std::vector<std::size_t> used(ni * nl, 0);
    std::vector<std::size_t> diverged(ni * nl, 0);

    ordered_parallel(
        cfg.samples, cfg.jobs,
        [&](std::size_t k) {
            const auto path = sample_path(cfg.horizon, cfg.reference_level, cfg.seed, k);
            const auto ref = reference.build(path, u0.values());
            SampleErrors out{std::vector<double>(ni * nl * cell, 0.0), std::vector<char>(ni * nl, 0)};
            for (std::size_t l = 0; l < nl; ++l) {
                const auto increments = path.coarsen(levels[l]);
                const std::size_t stride = std::size_t{1} << (levels[l] - coarsest);
                for (std::size_t i = 0; i < ni; ++i) {
                    double* sq = out.squared.data() + (i * nl + l) * cell;
                    const auto rec = run_path(cfg.integrators[i], contexts[l], u0, increments,
                                              {RecordMode::summary, [&](std::size_t m, std::span<const double> u) {
                                                   if (m % stride) return;
                                                   const std::size_t c = m / stride;
                                                   for (std::size_t p = 0; p < n; ++p) {
                                                       const double e = u[p] - ref[c * n + p];
                                                       sq[c * n + p] = e * e;
                                                   }
                                               }});
                    out.diverged[i * nl + l] = rec.diverged() ? 1 : 0;
                }
            }
            return out;
        },
        [&](std::size_t, SampleErrors s) {
            for (std::size_t c = 0; c < ni * nl; ++c) {
                if (s.diverged[c]) {
                    ++diverged[c];
                    continue;
                }
                ++used[c];
                const double* src = s.squared.data() + c * cell;
                double* dst = sum_sq.data() + c * cell;
                for (std::size_t p = 0; p < cell; ++p) dst[p] += src[p];
            }
        });

    ExperimentReport r;
    r.kind = ReportKind::convergence;
    common_metadata(r, "convergence", cfg.seed);
    r.metadata.emplace_back("d", std::to_string(cfg.dimension));
    r.metadata.emplace_back("N", std::to_string(cfg.subdivisions));
    r.metadata.emplace_back("T", format_double(cfg.horizon));
    r.metadata.emplace_back("samples", std::to_string(cfg.samples));
    r.metadata.emplace_back("initial", cfg.initial.name());
    r.metadata.emplace_back("reference",
                            cfg.reference == ReferenceKind::exact_linear
                                ? std::string("exact-linear")
                                : "LT@level" + std::to_string(cfg.reference_level));
    r.metadata.emplace_back("levels", join_levels(levels));
    r.metadata.emplace_back("fit_levels", join_levels(cfg.effective_fit_levels()));

    const auto fit = cfg.effective_fit_levels();
    for (std::size_t i = 0; i < ni; ++i) {
        std::vector<double> fit_tau, fit_err;
        for (std::size_t l = 0; l < nl; ++l) {
            const std::size_t c = i * nl + l;
            double sup = 0.0;
            if (used[c] > 0) {
                const double* acc = sum_sq.data() + c * cell;
                for (std::size_t p = 0; p < cell; ++p) sup = std::max(sup, acc[p] / static_cast<double>(used[c]));
                sup = std::sqrt(sup);
            } else {
                sup = std::numeric_limits<double>::quiet_NaN();
            }
            ErrorRow row;
            row.integrator = std::string(to_string(cfg.integrators[i]));
            row.g = cfg.nonlinearity.name();
            row.lambda = cfg.nonlinearity.intensity();
            row.dimension = cfg.dimension;
            row.subdivisions = cfg.subdivisions;
            row.level = levels[l];
            row.tau = dyadic_step(cfg.horizon, levels[l]);
            row.rms_sup_error = sup;
            row.samples_used = used[c];
            row.diverged = diverged[c];
            if (std::find(fit.begin(), fit.end(), levels[l]) != fit.end()) {
                fit_tau.push_back(row.tau);
                fit_err.push_back(sup);
            }
            r.errors.push_back(std::move(row));
        }
        r.slopes.push_back({std::string(to_string(cfg.integrators[i])), cfg.nonlinearity.name(),
                            cfg.nonlinearity.intensity(), cfg.subdivisions, fit_loglog_slope(fit_tau, fit_err)});
    }
    r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

ExperimentReport mesh_independence_study(const MeshStudyConfig& cfg) {
    if (cfg.subdivisions.empty()) throw std::invalid_argument("mesh study needs at least one N");
    if (cfg.nonlinearities.empty()) throw std::invalid_argument("mesh study needs at least one g");
    const auto t0 = Clock::now();
    ExperimentReport out;
    bool first = true;
    for (const auto& nl : cfg.nonlinearities) {
        for (int big_n : cfg.subdivisions) {
            ConvergenceConfig c = cfg.base;
            c.subdivisions = big_n;
            c.nonlinearity = nl;
            auto r = mean_square_error_study(c);
            if (first) {
                out = std::move(r);
                first = false;
            } else {
                append(out, r);
            }
        }
    }
    for (auto& [key, value] : out.metadata) {
        if (key == "experiment") value = "mesh-study";
        if (key == "N") {
            value.clear();
            for (std::size_t i = 0; i < cfg.subdivisions.size(); ++i)
                value += (i ? ";" : "") + std::to_string(cfg.subdivisions[i]);
        }
    }
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
}

// ---------------------------------------------------------------------------
// Second-moment sanity study

ExperimentReport moment_bound_study(const ConvergenceConfig& cfg) {
    if (cfg.levels.empty()) throw std::invalid_argument("moment study needs at least one level");
    const auto t0 = Clock::now();
    const Grid grid(cfg.dimension, cfg.subdivisions);
    const HeatOperator op(grid);
    const GridField u0 = sample_initial(cfg.initial, grid);
    const std::size_t n = grid.size();

    std::vector<int> levels = cfg.levels;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const int finest = levels.back();
    if (levels.front() < 0 || finest > max_path_level) throw std::invalid_argument("moment levels out of range");

    std::vector<StepContext> contexts;
    std::vector<std::size_t> offsets;  // start of each (integrator, level) block
    std::size_t total = 0;
    const std::size_t ni = cfg.integrators.size();
    for (int j : levels) contexts.emplace_back(op, cfg.nonlinearity, dyadic_step(cfg.horizon, j));
    for (std::size_t i = 0; i < ni; ++i) {
        for (int j : levels) {
            offsets.push_back(total);
            total += ((std::size_t{1} << j) + 1) * n;
        }
    }
    const std::size_t nl = levels.size();

    struct SampleMoments {
        std::vector<double> squares;
        std::vector<char> diverged;
    };
    std::vector<double> sums(total, 0.0);
    std::vector<std::size_t> used(ni * nl, 0);

    ordered_parallel(
        cfg.samples, cfg.jobs,
        [&](std::size_t k) {
            const auto path = sample_path(cfg.horizon, finest, cfg.seed, k);
            SampleMoments out{std::vector<double>(total, 0.0), std::vector<char>(ni * nl, 0)};
            for (std::size_t l = 0; l < nl; ++l) {
                const auto increments = path.coarsen(levels[l]);
                for (std::size_t i = 0; i < ni; ++i) {
                    double* dst = out.squares.data() + offsets[i * nl + l];
                    const auto rec = run_path(cfg.integrators[i], contexts[l], u0, increments,
                                              {RecordMode::summary, [&](std::size_t m, std::span<const double> u) {
                                                   for (std::size_t p = 0; p < n; ++p) dst[m * n + p] = u[p] * u[p];
                                               }});
                    out.diverged[i * nl + l] = rec.diverged() ? 1 : 0;
                }
            }
            return out;
        },
        [&](std::size_t, SampleMoments s) {
            for (std::size_t c = 0; c < ni * nl; ++c) {
                if (s.diverged[c]) continue;
                ++used[c];
                const std::size_t begin = offsets[c];
                const std::size_t end = c + 1 < offsets.size() ? offsets[c + 1] : total;
                for (std::size_t p = begin; p < end; ++p) sums[p] += s.squares[p];
            }
        });

    ExperimentReport r;
    r.kind = ReportKind::moments;
    common_metadata(r, "moments", cfg.seed);
    r.metadata.emplace_back("d", std::to_string(cfg.dimension));
    r.metadata.emplace_back("N", std::to_string(cfg.subdivisions));
    r.metadata.emplace_back("T", format_double(cfg.horizon));
    r.metadata.emplace_back("samples", std::to_string(cfg.samples));
    r.metadata.emplace_back("levels", join_levels(levels));
    for (std::size_t i = 0; i < ni; ++i) {
        for (std::size_t l = 0; l < nl; ++l) {
            const std::size_t c = i * nl + l;
            const std::size_t begin = offsets[c];
            const std::size_t end = c + 1 < offsets.size() ? offsets[c + 1] : total;
            double sup = std::numeric_limits<double>::quiet_NaN();
            if (used[c] > 0) {
                sup = 0.0;
                for (std::size_t p = begin; p < end; ++p) sup = std::max(sup, sums[p] / static_cast<double>(used[c]));
            }
            r.moments.push_back({std::string(to_string(cfg.integrators[i])), cfg.nonlinearity.name(),
                                 cfg.nonlinearity.intensity(), cfg.dimension, cfg.subdivisions, levels[l],
                                 dyadic_step(cfg.horizon, levels[l]), sup});
        }
    }
    r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

}  // namespace spde
