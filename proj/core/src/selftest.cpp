#include "spde/selftest.hpp"

#include "spde/integrators.hpp"
#include "spde/noise_paths.hpp"
#include "spde/nonlinearity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace spde {

bool SelftestReport::passed() const noexcept {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

DenseMatrix identity(std::size_t n) {
    DenseMatrix m{n, n, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c{a.rows, b.cols, std::vector<double>(a.rows * b.cols, 0.0)};
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<double> multiply(const DenseMatrix& a, std::span<const double> v) {
    std::vector<double> out(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out[i] += a(i, j) * v[j];
    return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string sci(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

/// Tracks the worst ratio observed/tolerance of a check.
class Worst {
public:
    void observe(double deviation, double tolerance) {
        const double ratio = tolerance > 0 ? deviation / tolerance : (deviation > 0 ? INFINITY : 0.0);
        if (!(ratio <= worst_ratio_)) {
            worst_ratio_ = std::isnan(ratio) ? INFINITY : ratio;
            deviation_ = deviation;
            tolerance_ = tolerance;
        }
    }
    CheckResult result(std::string name) const {
        return {std::move(name), worst_ratio_ <= 1.0,
                "worst " + sci(deviation_) + " vs tolerance " + sci(tolerance_)};
    }

private:
    double worst_ratio_ = 0.0;
    double deviation_ = 0.0;
    double tolerance_ = 0.0;
};

std::vector<double> random_field(std::mt19937_64& rng, std::size_t n, bool nonnegative) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    std::vector<double> v(n);
    for (double& x : v) {
        x = nonnegative ? (unit(rng) < 0.3 ? 0.0 : std::abs(normal(rng))) : normal(rng);
    }
    return v;
}

struct Case {
    int d;
    int big_n;
};

const std::vector<Case> small_cases{{1, 2}, {1, 3}, {1, 5}, {1, 8}, {1, 17}, {2, 2}, {2, 3}, {2, 5}, {2, 8}};

CheckResult check_semigroup_law(std::mt19937_64& rng) {
    Worst w;
    std::uniform_real_distribution<double> time(1e-4, 0.5);
    for (const auto& c : small_cases) {
        const HeatOperator op(Grid(c.d, c.big_n));
        for (int trial = 0; trial < 8; ++trial) {
            const double s = time(rng), t = time(rng);
            const GridField v(op.grid(), random_field(rng, op.grid().size(), trial % 2 == 0));
            const auto two_step = op.apply_semigroup(s, op.apply_semigroup(t, v));
            const auto one_step = op.apply_semigroup(s + t, v);
            w.observe(max_abs_diff(two_step.values(), one_step.values()), 1e-10 * sup_norm(one_step));
        }
    }
    return w.result("semigroup law exp(sA) exp(tA) = exp((s+t)A)");
}

CheckResult check_kernel_positivity(std::mt19937_64& rng) {
    Worst w;
    for (const auto& c : small_cases) {
        const HeatOperator op(Grid(c.d, c.big_n));
        for (double tau : {1e-9, 1e-4, 0.01, 0.3, 5.0}) {
            for (int trial = 0; trial < 4; ++trial) {
                const GridField v(op.grid(), random_field(rng, op.grid().size(), true));
                const auto out = op.apply_semigroup(tau, v);
                w.observe(std::max(0.0, -min_value(out)), 0.0);
            }
        }
    }
    return w.result("kernel positivity: nonnegative in, nonnegative out");
}

CheckResult check_contraction(std::mt19937_64& rng) {
    Worst w;
    std::uniform_real_distribution<double> time(1e-6, 1.0);
    for (const auto& c : small_cases) {
        const HeatOperator op(Grid(c.d, c.big_n));
        for (int trial = 0; trial < 8; ++trial) {
            const GridField v(op.grid(), random_field(rng, op.grid().size(), trial % 2 == 1));
            const double in = sup_norm(v);
            const double out = sup_norm(op.apply_semigroup(time(rng), v));
            w.observe(std::max(0.0, out - in), 1e-14 * in);
        }
    }
    return w.result("contraction sup|exp(tA)v| <= sup|v|");
}

CheckResult check_dense_agreement(std::mt19937_64& rng) {
    Worst w;
    std::uniform_real_distribution<double> time(1e-3, 1.0);
    for (int d : {1, 2}) {
        for (int big_n = 2; big_n <= 8; ++big_n) {
            const HeatOperator op(Grid(d, big_n));
            const auto a = op.dense_matrix();
            for (int trial = 0; trial < 3; ++trial) {
                const double tau = time(rng);
                const auto e = dense_expm(a, tau);
                const GridField v(op.grid(), random_field(rng, op.grid().size(), trial == 0));
                const auto expected = multiply(e, v.values());
                const auto got = op.apply_semigroup(tau, v);
                w.observe(max_abs_diff(got.values(), expected), 1e-10 * sup_norm(v));
            }
        }
    }
    return w.result("spectral semigroup vs dense matrix exponential (N <= 8)");
}

CheckResult check_implicit_residual(std::mt19937_64& rng) {
    Worst w;
    std::uniform_real_distribution<double> time(1e-3, 1.0);
    for (const auto& c : small_cases) {
        if (c.big_n > 8) continue;
        const HeatOperator op(Grid(c.d, c.big_n));
        for (int trial = 0; trial < 6; ++trial) {
            const double tau = time(rng);
            const GridField b(op.grid(), random_field(rng, op.grid().size(), false));
            const auto x = op.solve_implicit(tau, b);
            const auto ax = op.apply_laplacian(x);
            std::vector<double> residual(b.size());
            for (std::size_t i = 0; i < b.size(); ++i) residual[i] = x[i] - tau * ax[i] - b[i];
            w.observe(sup_norm(residual), 1e-12 * sup_norm(b));

            // Round trip: x -> (I - tau A) x -> solve.
            const GridField y(op.grid(), random_field(rng, op.grid().size(), false));
            const auto ay = op.apply_laplacian(y);
            std::vector<double> rhs(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) rhs[i] = y[i] - tau * ay[i];
            const auto back = op.solve_implicit(tau, GridField(op.grid(), rhs));
            w.observe(max_abs_diff(back.values(), y.values()), 1e-12 * sup_norm(y));
        }
    }
    return w.result("implicit solve residual and round trip");
}

CheckResult check_eigenpairs() {
    Worst w;
    for (const auto& c : small_cases) {
        const HeatOperator op(Grid(c.d, c.big_n));
        const std::size_t n = op.grid().points_per_axis();
        for (std::size_t k0 = 1; k0 <= n; ++k0) {
            for (std::size_t k1 = 1; k1 <= (c.d == 2 ? n : 1); ++k1) {
                const auto v = op.sine_mode(k0, k1);
                const double mu = op.mode_eigenvalue(k0, k1);
                const auto lv = op.apply_laplacian(v);
                w.observe(max_abs_diff(lv.values(), v.scaled(mu).values()), 1e-10 * std::abs(mu));
            }
        }
    }
    return w.result("discrete sine modes are eigenvectors with mu_k = -4N^2 sin^2(k pi / 2N)");
}

CheckResult check_coarsening(std::uint64_t seed) {
    std::size_t mismatches = 0;
    for (std::uint64_t k = 0; k < 4; ++k) {
        const auto path = sample_path(0.5 + static_cast<double>(k), 10, seed, k);
        const auto fine = path.increments();
        for (int j = 0; j <= path.level(); ++j) {
            const auto coarse = path.coarsen(j);
            const std::size_t children = std::size_t{1} << (path.level() - j);
            double fine_sum = 0.0, coarse_sum = 0.0;
            std::size_t f = 0;
            for (std::size_t m = 0; m < coarse.size(); ++m) {
                double children_sum = 0.0;
                for (std::size_t c = 0; c < children; ++c, ++f) {
                    children_sum += fine[f];
                    fine_sum += fine[f];
                }
                coarse_sum += coarse[m];
                if (children_sum != coarse[m] || fine_sum != coarse_sum) ++mismatches;
            }
            if (coarse_sum != path.endpoint()) ++mismatches;
        }
    }
    return {"Brownian coarsening: partial sums agree exactly across levels", mismatches == 0,
            std::to_string(mismatches) + " mismatches"};
}

// Hand-coded scalar versions of the catalogue, independent of Nonlinearity.
double oracle_g(NonlinearityKind kind, double lambda, double v) {
    switch (kind) {
        case NonlinearityKind::linear: return lambda * v;
        case NonlinearityKind::rational: return lambda * v / (1.0 + v * v);
        case NonlinearityKind::sine_plus: return lambda * (std::sin(v) + v);
        case NonlinearityKind::log1p: return lambda * std::log(1.0 + v);
        default: return 0.0;
    }
}

CheckResult check_scalar_oracle(std::mt19937_64& rng) {
    Worst w;
    const HeatOperator op(Grid(1, 2));
    std::uniform_real_distribution<double> state(-0.9, 3.0);
    std::uniform_real_distribution<double> step(1e-3, 0.5);
    std::normal_distribution<double> normal;
    constexpr double mu = -8.0;  // N = 2: single eigenvalue -4 * 4 * sin^2(pi/4)
    for (auto kind : {NonlinearityKind::linear, NonlinearityKind::rational, NonlinearityKind::sine_plus,
                      NonlinearityKind::log1p}) {
        const double lambda = 2.5;
        const auto nl = Nonlinearity::make(kind, lambda);
        for (int trial = 0; trial < 1000; ++trial) {
            const double tau = step(rng);
            const double u = state(rng);
            const double db = std::sqrt(tau) * normal(rng);
            const StepContext ctx(op, nl, tau);
            const GridField field(op.grid(), {u});
            const double g = oracle_g(kind, lambda, u);
            const double f = u != 0.0 ? g / u : lambda;
            const double heat = std::exp(mu * tau);
            const double expected[4] = {heat * u * std::exp(f * db - f * f * tau / 2.0),
                                        u + tau * mu * u + g * db, (u + g * db) / (1.0 - tau * mu),
                                        heat * (u + g * db)};
            const double got[4] = {step_lt(ctx, field, db)[0], step_em(ctx, field, db)[0],
                                   step_sem(ctx, field, db)[0], step_sexp(ctx, field, db)[0]};
            for (int i = 0; i < 4; ++i) w.observe(std::abs(got[i] - expected[i]), 1e-13 * std::max(1.0, std::abs(expected[i])));
        }
    }
    return w.result("N = 2 scalar oracle for LT, EM, SEM, SEXP (4000 cases)");
}

CheckResult check_fg_consistency() {
    Worst w;
    for (auto kind : {NonlinearityKind::linear, NonlinearityKind::rational, NonlinearityKind::sine_plus,
                      NonlinearityKind::log1p}) {
        const auto nl = Nonlinearity::make(kind, 2.5);
        for (int i = -2000; i <= 2000; ++i) {
            if (i == 0) continue;
            const double v = 0.005 * i + 1e-7;
            const double g = nl.g(v);
            w.observe(std::abs(v * nl.f(v) - g), 1e-12 * std::abs(g));
        }
    }
    return w.result("v f(v) = g(v) on [-10, 10]");
}

CheckResult check_zero_fixed_point() {
    std::size_t nonzero = 0;
    for (int d : {1, 2}) {
        const HeatOperator op(Grid(d, d == 1 ? 32 : 8));
        const std::vector<double> increments{0.3, -1.2, 0.7, 2.0, -0.4};
        for (const auto& nl : {Nonlinearity::linear(2.5), Nonlinearity::rational(2.5), Nonlinearity::sine_plus(2.5),
                               Nonlinearity::log1p(2.5)}) {
            const StepContext ctx(op, nl, 0.05);
            for (auto kind : all_integrators) {
                const auto rec = run_path(kind, ctx, GridField::zeros(op.grid()), increments);
                for (double x : rec.final_values) nonzero += x != 0.0;
            }
        }
    }
    return {"zero initial data stays exactly zero", nonzero == 0, std::to_string(nonzero) + " nonzero entries"};
}

CheckResult check_zero_noise(std::mt19937_64& rng) {
    std::size_t mismatches = 0;
    for (int d : {1, 2}) {
        const HeatOperator op(Grid(d, d == 1 ? 32 : 8));
        const double tau = 0.01;
        const StepContext ctx(op, Nonlinearity::zero(), tau);
        const GridField u(op.grid(), random_field(rng, op.grid().size(), true));
        for (double db : {-3.0, 0.0, 0.25}) {
            const auto heat = op.apply_semigroup(tau, u);
            const auto lap = op.apply_laplacian(u);
            std::vector<double> euler(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) euler[i] = u[i] + tau * lap[i];
            const auto implicit = op.solve_implicit(tau, u);
            const auto lt = step_lt(ctx, u, db);
            const auto sexp = step_sexp(ctx, u, db);
            const auto em = step_em(ctx, u, db);
            const auto sem = step_sem(ctx, u, db);
            for (std::size_t i = 0; i < u.size(); ++i) {
                mismatches += lt[i] != heat[i];
                mismatches += sexp[i] != heat[i];
                mismatches += em[i] != euler[i];
                mismatches += sem[i] != implicit[i];
            }
        }
    }
    return {"zero noise: LT = SEXP = heat flow, EM/SEM = explicit/implicit Euler (bitwise)", mismatches == 0,
            std::to_string(mismatches) + " mismatched entries"};
}

}  // namespace

DenseMatrix dense_expm(const DenseMatrix& a, double t) {
    const std::size_t n = a.rows;
    double norm = 0.0;  // max column sum of |t a|
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(t * a(i, j));
        norm = std::max(norm, s);
    }
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    DenseMatrix scaled = a;
    const double factor = std::ldexp(t, -squarings);
    for (double& x : scaled.data) x *= factor;

    DenseMatrix result = identity(n);
    DenseMatrix term = identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = multiply(term, scaled);
        for (double& x : term.data) x /= k;
        for (std::size_t i = 0; i < result.data.size(); ++i) result.data[i] += term.data[i];
    }
    for (int s = 0; s < squarings; ++s) result = multiply(result, result);
    return result;
}

SelftestReport run_selftest(std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    SelftestReport r;
    auto guarded = [&](const char* name, const std::function<CheckResult()>& check) {
        try {
            r.checks.push_back(check());
        } catch (const std::exception& e) {
            r.checks.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };
    guarded("semigroup law", [&] { return check_semigroup_law(rng); });
    guarded("kernel positivity", [&] { return check_kernel_positivity(rng); });
    guarded("contraction", [&] { return check_contraction(rng); });
    guarded("dense exponential", [&] { return check_dense_agreement(rng); });
    guarded("implicit solve", [&] { return check_implicit_residual(rng); });
    guarded("eigenpairs", [&] { return check_eigenpairs(); });
    guarded("coarsening", [&] { return check_coarsening(seed); });
    guarded("scalar oracle", [&] { return check_scalar_oracle(rng); });
    guarded("f/g consistency", [&] { return check_fg_consistency(); });
    guarded("zero fixed point", [&] { return check_zero_fixed_point(); });
    guarded("zero noise", [&] { return check_zero_noise(rng); });
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace spde
