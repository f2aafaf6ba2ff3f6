#include "spde/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace spde;

TEST_SUITE("mesh") {

TEST_CASE("grid geometry") {
    const Grid g1(1, 8);
    CHECK(g1.points_per_axis() == 7);
    CHECK(g1.size() == 7);
    CHECK(g1.mesh_size() == 0.125);
    CHECK(g1.axis_coordinate(0) == 0.125);
    CHECK(g1.axis_coordinate(6) == 0.875);

    const Grid g2(2, 4);
    CHECK(g2.size() == 9);
    CHECK(g2.dimension() == 2);
    CHECK(Grid(2, 16).size() == 225);
}

TEST_CASE("grid rejects bad shapes") {
    CHECK_THROWS_AS(Grid(3, 8), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0, 8), std::invalid_argument);
    CHECK_THROWS_AS(Grid(1, 1), std::invalid_argument);
    CHECK_NOTHROW(Grid(1, 2));
}

TEST_CASE("field length is checked") {
    CHECK_THROWS_AS(GridField(Grid(1, 4), {1.0, 2.0}), std::invalid_argument);
    const GridField z = GridField::zeros(Grid(2, 4));
    CHECK(z.size() == 9);
    CHECK(sup_norm(z) == 0.0);
    const GridField v(Grid(1, 4), {1.0, -3.0, 2.0});
    CHECK(sup_norm(v.scaled(-2.0)) == 6.0);
    CHECK(v.scaled(-2.0)[1] == 6.0);
}

TEST_CASE("norms flag non-finite entries") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> a{1.0, -2.0, 0.5};
    CHECK(sup_norm(a) == 2.0);
    CHECK(min_value(a) == -2.0);
    a[2] = nan;
    CHECK(std::isnan(sup_norm(a)));
    CHECK(std::isnan(min_value(a)));
    a[2] = inf;
    CHECK(std::isinf(sup_norm(a)));
    CHECK(std::isnan(min_value(a)));
    CHECK_FALSE(min_value(a) >= 0.0);
    CHECK(sup_norm(std::vector<double>{}) == 0.0);
}

TEST_CASE("sine initial data") {
    const Grid g(1, 16);
    const auto u = sample_initial(InitialData::sine_1d(), g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(u[i] == doctest::Approx(std::sin(std::numbers::pi * g.axis_coordinate(i))).epsilon(1e-15));
        CHECK(u[i] > 0.0);
    }
    CHECK_NOTHROW(InitialData::sine_1d().check_boundary());
    CHECK_NOTHROW(InitialData::sine_product_2d().check_boundary());
    CHECK(InitialData::sine(2).shape() == InitialShape::sine_product_2d);
}

TEST_CASE("2D storage is row-major with axis 1 fastest") {
    const Grid g(2, 4);
    auto u0 = InitialData::custom("asym", 2, [](std::span<const double> x) {
        return x[0] * (1.0 - x[0]) * x[1] * x[1] * (1.0 - x[1]);
    });
    const auto u = sample_initial(u0, g);
    const std::size_t n = g.points_per_axis();
    for (std::size_t i0 = 0; i0 < n; ++i0) {
        for (std::size_t i1 = 0; i1 < n; ++i1) {
            const double x0 = g.axis_coordinate(i0), x1 = g.axis_coordinate(i1);
            CHECK(u[i0 * n + i1] == x0 * (1.0 - x0) * x1 * x1 * (1.0 - x1));
        }
    }
}

TEST_CASE("initial data validation") {
    auto off = InitialData::custom("cos", 1, [](std::span<const double> x) { return std::cos(x[0]); });
    CHECK_THROWS_AS(off.check_boundary(), std::domain_error);
    CHECK_THROWS(sample_initial(off, Grid(1, 8)));

    auto bad = InitialData::custom("nan", 1, [](std::span<const double> x) {
        return x[0] > 0.4 && x[0] < 0.6 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    });
    CHECK_THROWS_AS(sample_initial(bad, Grid(1, 8)), std::domain_error);

    CHECK_THROWS_AS(sample_initial(InitialData::sine_1d(), Grid(2, 8)), std::invalid_argument);
}

}
