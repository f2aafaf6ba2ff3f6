#include "spde/mesh.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spde {

Grid::Grid(int dimension, int subdivisions)
    : dimension_(dimension), subdivisions_(subdivisions) {
    if (dimension != 1 && dimension != 2) {
        throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(dimension));
    }
    if (subdivisions < 2) {
        throw std::invalid_argument("grid needs N >= 2 subdivisions, got " + std::to_string(subdivisions));
    }
}

std::size_t Grid::size() const noexcept {
    const std::size_t n = points_per_axis();
    return dimension_ == 1 ? n : n * n;
}

GridField::GridField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("field length " + std::to_string(values_.size()) +
                                    " does not match grid size " + std::to_string(grid_.size()));
    }
}

GridField GridField::zeros(const Grid& grid) {
    return GridField(grid, std::vector<double>(grid.size(), 0.0));
}

GridField GridField::scaled(double c) const {
    std::vector<double> out(values_);
    for (double& x : out) x *= c;
    return GridField(grid_, std::move(out));
}

double sup_norm(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double x : v) {
        if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
        m = std::max(m, std::abs(x));
    }
    return m;
}

double sup_norm(const GridField& v) noexcept { return sup_norm(v.values()); }

double min_value(std::span<const double> v) noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
        m = std::min(m, x);
    }
    return m;
}

double min_value(const GridField& v) noexcept { return min_value(v.values()); }

InitialData::InitialData(InitialShape shape, std::string name, int dimension, Evaluator u0)
    : shape_(shape), name_(std::move(name)), dimension_(dimension), u0_(std::move(u0)) {
    if (dimension != 1 && dimension != 2) {
        throw std::invalid_argument("initial data dimension must be 1 or 2");
    }
    if (!u0_) throw std::invalid_argument("initial data needs an evaluator");
}

InitialData InitialData::sine_1d() {
    return InitialData(InitialShape::sine_1d, "sin(pi x)", 1,
                       [](std::span<const double> x) { return std::sin(std::numbers::pi * x[0]); });
}

InitialData InitialData::sine_product_2d() {
    return InitialData(InitialShape::sine_product_2d, "sin(pi x1) sin(pi x2)", 2,
                       [](std::span<const double> x) {
                           return std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]);
                       });
}

InitialData InitialData::sine(int dimension) {
    return dimension == 2 ? sine_product_2d() : sine_1d();
}

InitialData InitialData::custom(std::string name, int dimension, Evaluator u0) {
    return InitialData(InitialShape::custom, std::move(name), dimension, std::move(u0));
}

void InitialData::check_boundary() const {
    constexpr int samples = 17;
    constexpr double tol = 1e-12;
    auto fail = [&](std::span<const double> x) {
        std::ostringstream msg;
        msg << "initial data '" << name_ << "' does not vanish on the boundary at (";
        for (std::size_t i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
        msg << ")";
        throw std::domain_error(msg.str());
    };
    if (dimension_ == 1) {
        for (double b : {0.0, 1.0}) {
            std::array<double, 1> x{b};
            if (std::abs(u0_(x)) > tol) fail(x);
        }
        return;
    }
    for (int k = 0; k < samples; ++k) {
        const double s = static_cast<double>(k) / (samples - 1);
        for (double b : {0.0, 1.0}) {
            std::array<double, 2> xa{b, s};
            std::array<double, 2> xb{s, b};
            if (std::abs(u0_(xa)) > tol) fail(xa);
            if (std::abs(u0_(xb)) > tol) fail(xb);
        }
    }
}

GridField sample_initial(const InitialData& data, const Grid& grid) {
    if (data.dimension() != grid.dimension()) {
        throw std::invalid_argument("initial data dimension does not match grid");
    }
    data.check_boundary();

    const std::size_t n = grid.points_per_axis();
    std::vector<double> values(grid.size());
    auto eval = [&](std::span<const double> x) {
        const double u = data(x);
        if (!std::isfinite(u)) {
            std::ostringstream msg;
            msg << "initial data '" << data.name() << "' is not finite at (";
            for (std::size_t i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
            msg << ")";
            throw std::domain_error(msg.str());
        }
        return u;
    };

    if (grid.dimension() == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            std::array<double, 1> x{grid.axis_coordinate(i)};
            values[i] = eval(x);
        }
    } else {
        for (std::size_t i0 = 0; i0 < n; ++i0) {
            for (std::size_t i1 = 0; i1 < n; ++i1) {
                std::array<double, 2> x{grid.axis_coordinate(i0), grid.axis_coordinate(i1)};
                values[i0 * n + i1] = eval(x);
            }
        }
    }
    return GridField(grid, std::move(values));
}

}  // namespace spde
