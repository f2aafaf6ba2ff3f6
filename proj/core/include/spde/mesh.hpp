#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace spde {

/// Uniform grid on (0,1)^d with mesh size h = 1/N per axis.
///
/// Only interior points x_n = n*h, 1 <= n <= N-1, are stored. Boundary
/// values are homogeneous Dirichlet and never materialised. For d = 2 the
/// storage is row-major: index = i0 * (N-1) + i1, axis 1 fastest.
class Grid {
public:
    Grid(int dimension, int subdivisions);

    int dimension() const noexcept { return dimension_; }
    int subdivisions() const noexcept { return subdivisions_; }
    double mesh_size() const noexcept { return 1.0 / subdivisions_; }
    std::size_t points_per_axis() const noexcept { return static_cast<std::size_t>(subdivisions_ - 1); }
    std::size_t size() const noexcept;

    /// Coordinate of interior index i (0-based) along one axis: (i+1)*h.
    double axis_coordinate(std::size_t i) const noexcept { return static_cast<double>(i + 1) * mesh_size(); }

    bool operator==(const Grid&) const = default;

private:
    int dimension_;
    int subdivisions_;
};

/// Values of a grid function on the interior points. Immutable once built.
class GridField {
public:
    GridField(Grid grid, std::vector<double> values);

    static GridField zeros(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    GridField scaled(double c) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Max of |v| over interior points, 0 for an empty or zero field.
/// Returns NaN if any entry is NaN.
double sup_norm(std::span<const double> v) noexcept;
double sup_norm(const GridField& v) noexcept;

/// Smallest entry. Any non-finite entry makes the result NaN so that a
/// "min >= 0" test is false for corrupted fields.
double min_value(std::span<const double> v) noexcept;
double min_value(const GridField& v) noexcept;

enum class InitialShape { sine_1d, sine_product_2d, custom };

/// Deterministic initial value u_0 on [0,1]^d.
class InitialData {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    static InitialData sine_1d();
    static InitialData sine_product_2d();
    /// Default sine data for the given dimension.
    static InitialData sine(int dimension);
    static InitialData custom(std::string name, int dimension, Evaluator u0);

    InitialShape shape() const noexcept { return shape_; }
    int dimension() const noexcept { return dimension_; }
    const std::string& name() const noexcept { return name_; }
    double operator()(std::span<const double> x) const { return u0_(x); }

    /// Throws std::domain_error if |u_0| > 1e-12 at any boundary sample point.
    void check_boundary() const;

private:
    InitialData(InitialShape shape, std::string name, int dimension, Evaluator u0);

    InitialShape shape_;
    std::string name_;
    int dimension_;
    Evaluator u0_;
};

/// u_0 evaluated at every interior point. Rejects non-finite evaluator output
/// and data that does not vanish on the boundary.
GridField sample_initial(const InitialData& data, const Grid& grid);

}  // namespace spde
