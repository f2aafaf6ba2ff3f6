#include "spde/nonlinearity.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace spde;

namespace {

std::vector<double> probe_grid() {
    std::vector<double> v;
    for (double x = -20.0; x <= 20.0; x += 0.173) v.push_back(x);
    for (double x : {1e-15, -1e-15, 1e-9, -3e-7, 1e-3, -0.999, -0.9999999, -1.0, -1.5, 1e3, -1e3}) v.push_back(x);
    return v;
}

std::vector<Nonlinearity> catalogue(double lambda) {
    return {Nonlinearity::linear(lambda), Nonlinearity::rational(lambda), Nonlinearity::sine_plus(lambda),
            Nonlinearity::log1p(lambda), Nonlinearity::zero()};
}

}  // namespace

TEST_SUITE("nonlinearity") {

TEST_CASE("catalogue values") {
    CHECK(Nonlinearity::linear(2.5).g(2.0) == 5.0);
    CHECK(Nonlinearity::rational(2.5).g(1.0) == 1.25);
    CHECK(Nonlinearity::sine_plus(2.5).g(0.5) == doctest::Approx(2.5 * (std::sin(0.5) + 0.5)));
    CHECK(Nonlinearity::log1p(2.5).g(1.0) == doctest::Approx(2.5 * std::log(2.0)));
    CHECK(Nonlinearity::zero().g(7.0) == 0.0);
    for (const auto& nl : catalogue(2.5)) CHECK(nl.g(0.0) == 0.0);
}

TEST_CASE("f times v reproduces g") {
    for (const auto& nl : catalogue(2.5)) {
        for (double v : probe_grid()) {
            if (v == 0.0) continue;
            const double lhs = v * eval_f(nl, v);
            const double rhs = eval_g(nl, v);
            if (std::abs(v) < Nonlinearity::near_zero) {
                // below the cutoff f is frozen at g'(0)
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
            } else {
                CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), 1e-300));
            }
        }
    }
}

TEST_CASE("f at zero is the derivative") {
    CHECK(Nonlinearity::linear(1.5).f(0.0) == 1.5);
    CHECK(Nonlinearity::rational(1.5).f(0.0) == 1.5);
    CHECK(Nonlinearity::sine_plus(1.5).f(0.0) == 3.0);
    CHECK(Nonlinearity::log1p(1.5).f(0.0) == 1.5);
    CHECK(Nonlinearity::zero().f(0.0) == 0.0);
}

TEST_CASE("f is bounded by the Lipschitz constant") {
    for (const auto& nl : catalogue(2.5)) {
        for (double v : probe_grid()) CHECK(std::abs(nl.f(v)) <= nl.lipschitz() * (1.0 + 1e-15));
    }
    CHECK(Nonlinearity::sine_plus(2.5).lipschitz() == 5.0);
}

TEST_CASE("log1p is continued affinely below its pole") {
    const auto nl = Nonlinearity::log1p(1.0);
    const double v_star = -1.0 + Nonlinearity::log1p_domain_margin;
    CHECK(nl.g(v_star) == doctest::Approx(std::log(Nonlinearity::log1p_domain_margin)));
    const double slope = (nl.g(v_star - 1e-3) - nl.g(v_star - 2e-3)) / 1e-3;
    CHECK(slope == doctest::Approx(1.0 / Nonlinearity::log1p_domain_margin).epsilon(1e-6));
    CHECK(std::isfinite(nl.g(-5.0)));
}

TEST_CASE("tags round-trip") {
    for (auto k : {NonlinearityKind::linear, NonlinearityKind::rational, NonlinearityKind::sine_plus,
                   NonlinearityKind::log1p, NonlinearityKind::zero}) {
        CHECK(parse_nonlinearity(to_string(k)) == k);
    }
    CHECK(to_string(NonlinearityKind::sine_plus) == "sineplus");
    CHECK_FALSE(parse_nonlinearity("cubic").has_value());
    CHECK_FALSE(parse_nonlinearity("custom").has_value());
}

TEST_CASE("custom entries") {
    const auto tanh = Nonlinearity::custom("tanh", [](double v) { return std::tanh(v); }, 1.0, 1.0);
    CHECK(tanh.kind() == NonlinearityKind::custom);
    CHECK(tanh.name() == "tanh");
    CHECK(tanh.f(2.0) == doctest::Approx(std::tanh(2.0) / 2.0));
    CHECK(tanh.f(0.0) == 1.0);
    CHECK_THROWS_AS(Nonlinearity::custom("shift", [](double v) { return v + 1.0; }, 1.0, 1.0),
                    std::invalid_argument);
}

}
