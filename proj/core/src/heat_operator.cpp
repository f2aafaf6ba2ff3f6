#include "spde/heat_operator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace spde {

namespace detail {

namespace {
// FFTW's planner is not re-entrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

AlignedBuffer aligned_buffer(std::size_t n) {
    auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * std::max<std::size_t>(n, 1)));
    if (!p) throw std::bad_alloc();
    return AlignedBuffer(p);
}
}  // namespace

void AlignedFree::operator()(double* p) const noexcept { fftw_free(p); }

/// Unnormalised type-I DST (FFTW RODFT00) along every axis of the grid.
/// Applying it twice multiplies by (2N)^d.
class SineTransform {
public:
    SineTransform(int dimension, std::size_t n, int subdivisions)
        : normalisation_(std::pow(2.0 * subdivisions, dimension)) {
        auto a = aligned_buffer(dimension == 1 ? n : n * n);
        auto b = aligned_buffer(dimension == 1 ? n : n * n);
        const int ni = static_cast<int>(n);
        // FFTW_ESTIMATE picks the plan deterministically, so results are
        // bit-reproducible across runs.
        std::lock_guard lock(planner_mutex());
        plan_ = dimension == 1
                    ? fftw_plan_r2r_1d(ni, a.get(), b.get(), FFTW_RODFT00, FFTW_ESTIMATE)
                    : fftw_plan_r2r_2d(ni, ni, a.get(), b.get(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
        if (!plan_) throw std::runtime_error("failed to plan discrete sine transform");
    }

    ~SineTransform() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }

    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;

    void execute(double* in, double* out) const { fftw_execute_r2r(plan_, in, out); }
    double normalisation() const noexcept { return normalisation_; }

private:
    fftw_plan plan_ = nullptr;
    double normalisation_;
};

}  // namespace detail

namespace {

constexpr std::size_t dense_cap = 4096;

bool nonnegative_finite(std::span<const double> v) {
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) return false;
    }
    return true;
}

// Clamps roundoff negatives when the input was nonnegative.
void copy_with_clamp(std::span<const double> src, std::span<double> out, bool clamp, double input_sup) {
    if (!clamp) {
        std::copy(src.begin(), src.end(), out.begin());
        return;
    }
    const double threshold = 1e-12 * input_sup;
    for (std::size_t i = 0; i < src.size(); ++i) {
        double x = src[i];
        if (x < 0.0) {
            if (x > -threshold) {
                x = 0.0;
            } else {
                throw PositivityViolation("semigroup produced " + std::to_string(x) + " at index " +
                                          std::to_string(i) + " from a nonnegative input");
            }
        }
        out[i] = x;
    }
}

}  // namespace

SpectralWorkspace::SpectralWorkspace(const Grid& grid)
    : size_(grid.size()), a_(detail::aligned_buffer(size_)), b_(detail::aligned_buffer(size_)) {}

HeatOperator::HeatOperator(Grid grid) : grid_(grid) {
    const std::size_t n = grid_.points_per_axis();
    const double big_n = grid_.subdivisions();
    eigenvalues_.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * big_n));
        eigenvalues_[k - 1] = -4.0 * big_n * big_n * s * s;
    }
    transform_ = std::make_shared<const detail::SineTransform>(grid_.dimension(), n, grid_.subdivisions());
}

void HeatOperator::check_grid(const GridField& v) const {
    if (!(v.grid() == grid_)) throw std::invalid_argument("field grid does not match operator grid");
}

GridField HeatOperator::sine_mode(std::size_t k0, std::size_t k1) const {
    const std::size_t n = grid_.points_per_axis();
    if (k0 < 1 || k0 > n || (grid_.dimension() == 2 && (k1 < 1 || k1 > n))) {
        throw std::out_of_range("sine mode index out of range");
    }
    const double h = grid_.mesh_size();
    const double scale = std::sqrt(2.0 * h);
    auto axis = [&](std::size_t k, std::size_t i) {
        return scale * std::sin(static_cast<double>(k) * std::numbers::pi * static_cast<double>(i + 1) * h);
    };
    std::vector<double> v(grid_.size());
    if (grid_.dimension() == 1) {
        for (std::size_t i = 0; i < n; ++i) v[i] = axis(k0, i);
    } else {
        for (std::size_t i0 = 0; i0 < n; ++i0)
            for (std::size_t i1 = 0; i1 < n; ++i1) v[i0 * n + i1] = axis(k0, i0) * axis(k1, i1);
    }
    return GridField(grid_, std::move(v));
}

double HeatOperator::mode_eigenvalue(std::size_t k0, std::size_t k1) const {
    return grid_.dimension() == 1 ? eigenvalues_.at(k0 - 1) : eigenvalues_.at(k0 - 1) + eigenvalues_.at(k1 - 1);
}

void HeatOperator::apply_laplacian(std::span<const double> v, std::span<double> out) const {
    const std::size_t n = grid_.points_per_axis();
    const double n2 = static_cast<double>(grid_.subdivisions()) * grid_.subdivisions();
    if (grid_.dimension() == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i > 0 ? v[i - 1] : 0.0;
            const double right = i + 1 < n ? v[i + 1] : 0.0;
            out[i] = n2 * (left - 2.0 * v[i] + right);
        }
        return;
    }
    for (std::size_t i0 = 0; i0 < n; ++i0) {
        for (std::size_t i1 = 0; i1 < n; ++i1) {
            const std::size_t i = i0 * n + i1;
            const double up = i0 > 0 ? v[i - n] : 0.0;
            const double down = i0 + 1 < n ? v[i + n] : 0.0;
            const double left = i1 > 0 ? v[i - 1] : 0.0;
            const double right = i1 + 1 < n ? v[i + 1] : 0.0;
            out[i] = n2 * (up + down + left + right - 4.0 * v[i]);
        }
    }
}

GridField HeatOperator::apply_laplacian(const GridField& v) const {
    check_grid(v);
    std::vector<double> out(v.size());
    apply_laplacian(v.values(), out);
    return GridField(grid_, std::move(out));
}

GridField HeatOperator::apply_semigroup(double tau, const GridField& v) const {
    check_grid(v);
    if (tau < 0.0) throw std::invalid_argument("semigroup time must be nonnegative");
    if (tau == 0.0) return v;
    SemigroupPropagator prop(*this, tau);
    SpectralWorkspace ws(grid_);
    std::vector<double> out(v.size());
    prop.apply(v.values(), out, ws);
    return GridField(grid_, std::move(out));
}

GridField HeatOperator::solve_implicit(double tau, const GridField& b) const {
    check_grid(b);
    ImplicitSolver solver(*this, tau);
    SpectralWorkspace ws(grid_);
    std::vector<double> out(b.size());
    solver.solve(b.values(), out, ws);
    return GridField(grid_, std::move(out));
}

DenseMatrix HeatOperator::dense_matrix() const {
    const std::size_t size = grid_.size();
    if (size > dense_cap) {
        throw std::length_error("dense matrix requested for " + std::to_string(size) +
                                " unknowns; cap is " + std::to_string(dense_cap));
    }
    const std::size_t n = grid_.points_per_axis();
    const double n2 = static_cast<double>(grid_.subdivisions()) * grid_.subdivisions();
    DenseMatrix m{size, size, std::vector<double>(size * size, 0.0)};
    if (grid_.dimension() == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = -2.0 * n2;
            if (i > 0) m(i, i - 1) = n2;
            if (i + 1 < n) m(i, i + 1) = n2;
        }
        return m;
    }
    // A (x) I + I (x) A with A the 1D matrix.
    for (std::size_t i0 = 0; i0 < n; ++i0) {
        for (std::size_t i1 = 0; i1 < n; ++i1) {
            const std::size_t r = i0 * n + i1;
            m(r, r) = -4.0 * n2;
            if (i0 > 0) m(r, r - n) = n2;
            if (i0 + 1 < n) m(r, r + n) = n2;
            if (i1 > 0) m(r, r - 1) = n2;
            if (i1 + 1 < n) m(r, r + 1) = n2;
        }
    }
    return m;
}

SemigroupPropagator::SemigroupPropagator(const HeatOperator& op, double tau)
    : grid_(op.grid()), tau_(tau), transform_(op.transform()) {
    if (tau < 0.0) throw std::invalid_argument("semigroup time must be nonnegative");
    const auto mu = op.axis_eigenvalues();
    const std::size_t n = mu.size();
    const double scale = 1.0 / transform_->normalisation();
    if (grid_.dimension() == 1) {
        multipliers_.resize(n);
        for (std::size_t k = 0; k < n; ++k) multipliers_[k] = std::exp(tau * mu[k]) * scale;
    } else {
        multipliers_.resize(n * n);
        for (std::size_t k0 = 0; k0 < n; ++k0)
            for (std::size_t k1 = 0; k1 < n; ++k1)
                multipliers_[k0 * n + k1] = std::exp(tau * (mu[k0] + mu[k1])) * scale;
    }
}

void SemigroupPropagator::apply(std::span<const double> in, std::span<double> out, SpectralWorkspace& ws) const {
    if (in.size() != multipliers_.size() || out.size() != in.size() || ws.size() != in.size()) {
        throw std::invalid_argument("semigroup input does not match grid");
    }
    if (tau_ == 0.0) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    const bool clamp = nonnegative_finite(in);
    const double input_sup = clamp ? sup_norm(in) : 0.0;

    auto a = ws.primary();
    auto b = ws.secondary();
    std::copy(in.begin(), in.end(), a.begin());
    transform_->execute(a.data(), b.data());
    for (std::size_t k = 0; k < b.size(); ++k) b[k] *= multipliers_[k];
    transform_->execute(b.data(), a.data());
    copy_with_clamp(a, out, clamp, input_sup);
}

ImplicitSolver::ImplicitSolver(const HeatOperator& op, double tau)
    : grid_(op.grid()), tau_(tau), transform_(op.transform()) {
    if (tau < 0.0) throw std::invalid_argument("implicit step must be nonnegative");
    const std::size_t n = grid_.points_per_axis();
    const double r = tau * static_cast<double>(grid_.subdivisions()) * grid_.subdivisions();
    if (grid_.dimension() == 1) {
        // Tridiagonal system with diagonal 1 + 2r and off-diagonals -r.
        const double diag = 1.0 + 2.0 * r;
        off_diagonal_ = -r;
        modified_upper_.resize(n);
        inverse_pivot_.resize(n);
        double prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pivot = diag - off_diagonal_ * prev;
            inverse_pivot_[i] = 1.0 / pivot;
            prev = off_diagonal_ * inverse_pivot_[i];
            modified_upper_[i] = prev;
        }
        return;
    }
    const auto mu = op.axis_eigenvalues();
    const double scale = 1.0 / transform_->normalisation();
    spectral_inverse_.resize(n * n);
    for (std::size_t k0 = 0; k0 < n; ++k0)
        for (std::size_t k1 = 0; k1 < n; ++k1)
            spectral_inverse_[k0 * n + k1] = scale / (1.0 - tau * (mu[k0] + mu[k1]));
}

void ImplicitSolver::solve(std::span<const double> rhs, std::span<double> out, SpectralWorkspace& ws) const {
    if (rhs.size() != grid_.size() || out.size() != rhs.size()) {
        throw std::invalid_argument("implicit solve input does not match grid");
    }
    if (grid_.dimension() == 1) {
        const std::size_t n = rhs.size();
        auto d = ws.primary();
        double prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            prev = (rhs[i] - off_diagonal_ * prev) * inverse_pivot_[i];
            d[i] = prev;
        }
        double next = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            next = d[i] - modified_upper_[i] * next;
            out[i] = next;
        }
        return;
    }
    auto a = ws.primary();
    auto b = ws.secondary();
    std::copy(rhs.begin(), rhs.end(), a.begin());
    transform_->execute(a.data(), b.data());
    for (std::size_t k = 0; k < b.size(); ++k) b[k] *= spectral_inverse_[k];
    transform_->execute(b.data(), a.data());
    std::copy(a.begin(), a.end(), out.begin());
}

}  // namespace spde
