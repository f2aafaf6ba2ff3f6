#pragma once

#include "spde/mesh.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace spde {

namespace detail {
class SineTransform;
struct AlignedFree {
    void operator()(double* p) const noexcept;
};
using AlignedBuffer = std::unique_ptr<double[], AlignedFree>;
}  // namespace detail

/// Raised when the semigroup maps a nonnegative field to one with an entry
/// below the roundoff threshold -1e-12 * sup_norm(input).
class PositivityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major

    double operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
};

/// Scratch buffers for the sine transforms. One per thread; not shareable.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(const Grid& grid);

    std::span<double> primary() noexcept { return {a_.get(), size_}; }
    std::span<double> secondary() noexcept { return {b_.get(), size_}; }
    std::size_t size() const noexcept { return size_; }

private:
    std::size_t size_;
    detail::AlignedBuffer a_;
    detail::AlignedBuffer b_;
};

/// The scaled Dirichlet Laplacian N^2 D^N on a Grid (Kronecker sum in 2D).
///
/// Per-axis eigenpairs are closed form: mu_k = -4 N^2 sin^2(k pi / (2N)) with
/// orthonormal eigenvectors sqrt(2h) sin(k pi n h), k = 1..N-1. The semigroup
/// and the 2D implicit solve are diagonalised in that basis through a fast
/// type-I discrete sine transform. Immutable and shareable across threads.
class HeatOperator {
public:
    explicit HeatOperator(Grid grid);

    const Grid& grid() const noexcept { return grid_; }

    /// mu_k for k = 1..N-1, stored at index k-1.
    std::span<const double> axis_eigenvalues() const noexcept { return eigenvalues_; }

    /// Orthonormal discrete sine mode (k0, k1 are 1-based; k1 ignored in 1D).
    GridField sine_mode(std::size_t k0, std::size_t k1 = 1) const;
    /// Eigenvalue of sine_mode(k0, k1).
    double mode_eigenvalue(std::size_t k0, std::size_t k1 = 1) const;

    void apply_laplacian(std::span<const double> v, std::span<double> out) const;
    GridField apply_laplacian(const GridField& v) const;

    /// exp(tau N^2 D^N) v. tau = 0 returns v; tau < 0 throws.
    GridField apply_semigroup(double tau, const GridField& v) const;

    /// x with (I - tau N^2 D^N) x = b.
    GridField solve_implicit(double tau, const GridField& b) const;

    /// Explicit N^2 D^N; only for (N-1)^d <= 4096.
    DenseMatrix dense_matrix() const;

    const std::shared_ptr<const detail::SineTransform>& transform() const noexcept { return transform_; }

private:
    void check_grid(const GridField& v) const;

    Grid grid_;
    std::vector<double> eigenvalues_;
    std::shared_ptr<const detail::SineTransform> transform_;
};

/// exp(tau N^2 D^N) with the spectral multipliers precomputed for one tau.
///
/// When the input is entrywise >= 0, outputs in (-1e-12 * sup_norm(input), 0)
/// are set to 0 and anything lower raises PositivityViolation.
class SemigroupPropagator {
public:
    SemigroupPropagator(const HeatOperator& op, double tau);

    double tau() const noexcept { return tau_; }
    const Grid& grid() const noexcept { return grid_; }

    /// `in` and `out` may alias.
    void apply(std::span<const double> in, std::span<double> out, SpectralWorkspace& ws) const;

private:
    Grid grid_;
    double tau_;
    std::vector<double> multipliers_;  // exp(tau * mu) / normalisation, per spectral index
    std::shared_ptr<const detail::SineTransform> transform_;
};

/// Factorised (I - tau N^2 D^N)^{-1}: Thomas elimination in 1D, spectral in 2D.
class ImplicitSolver {
public:
    ImplicitSolver(const HeatOperator& op, double tau);

    double tau() const noexcept { return tau_; }

    /// `rhs` and `out` may alias.
    void solve(std::span<const double> rhs, std::span<double> out, SpectralWorkspace& ws) const;

private:
    Grid grid_;
    double tau_;
    double off_diagonal_ = 0.0;
    std::vector<double> modified_upper_;  // Thomas c'_i
    std::vector<double> inverse_pivot_;   // 1 / (b - a c'_{i-1})
    std::vector<double> spectral_inverse_;
    std::shared_ptr<const detail::SineTransform> transform_;
};

}  // namespace spde
