#include "spde/noise_paths.hpp"
#include "spde/philox.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace spde;

TEST_SUITE("noise_paths") {

TEST_CASE("philox4x32-10 known-answer vectors") {
    using P = Philox4x32;
    CHECK(P::generate({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(P::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(P::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("paths are deterministic per (seed, index)") {
    const auto a = sample_path(1.0, 10, 42, 7);
    const auto b = sample_path(1.0, 10, 42, 7);
    REQUIRE(a.increments().size() == 1024);
    CHECK(std::equal(a.increments().begin(), a.increments().end(), b.increments().begin()));
    CHECK(a.seed().master_seed == 42);
    CHECK(a.seed().sample_index == 7);

    const auto c = sample_path(1.0, 10, 42, 8);
    const auto d = sample_path(1.0, 10, 43, 7);
    CHECK(increment_checksum(a.increments()) != increment_checksum(c.increments()));
    CHECK(increment_checksum(a.increments()) != increment_checksum(d.increments()));
    CHECK(standard_normal(42, 7, 3) == standard_normal(42, 7, 3));
}

TEST_CASE("increment statistics") {
    const int L = 16;
    const auto p = sample_path(1.0, L, 2024, 0);
    const double tau = std::ldexp(1.0, -L);
    double sum = 0.0, sq = 0.0;
    for (double x : p.increments()) {
        sum += x;
        sq += x * x;
    }
    const double n = static_cast<double>(p.increments().size());
    const double mean = sum / n;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(tau) / std::sqrt(n));
    const double var = sq / n - mean * mean;
    CHECK(std::abs(var / tau - 1.0) <= 0.05);
}

TEST_CASE("independent streams are uncorrelated") {
    const auto a = sample_path(1.0, 14, 9, 0);
    const auto b = sample_path(1.0, 14, 9, 1);
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.increments().size(); ++i) {
        ab += a.increments()[i] * b.increments()[i];
        aa += a.increments()[i] * a.increments()[i];
        bb += b.increments()[i] * b.increments()[i];
    }
    const double rho = ab / std::sqrt(aa * bb);
    CHECK(std::abs(rho) <= 4.0 / std::sqrt(16384.0));
}

TEST_CASE("increments sit on the 2^-40 lattice") {
    const auto p = sample_path(2.0, 12, 1, 1);
    for (double x : p.increments()) {
        const double scaled = std::ldexp(x, 40);
        CHECK(scaled == std::nearbyint(scaled));
    }
}

TEST_CASE("coarsening sums children") {
    const BrownianPath p(1.0, 2, {0.5, -0.25, 0.125, 1.0}, {});
    const auto c1 = p.coarsen(1);
    REQUIRE(c1.size() == 2);
    CHECK(c1[0] == 0.25);
    CHECK(c1[1] == 1.125);
    const auto c2 = p.coarsen(2);
    CHECK(std::equal(c2.begin(), c2.end(), p.increments().begin()));
    CHECK(p.coarsen(0).front() == p.endpoint());
    CHECK_THROWS_AS(p.coarsen(3), std::invalid_argument);
    CHECK_THROWS_AS(BrownianPath(1.0, 2, {0.1, 0.2}, {}), std::invalid_argument);
}

TEST_CASE("coarse partial sums match fine partial sums exactly") {
    const int L = 14;
    const auto p = sample_path(0.5, L, 77, 3);
    std::vector<double> fine_partial;
    double s = 0.0;
    for (double x : p.increments()) fine_partial.push_back(s += x);
    for (int j = 0; j <= L; ++j) {
        const auto c = coarsen(p, j);
        REQUIRE(c.size() == (std::size_t{1} << j));
        const std::size_t stride = std::size_t{1} << (L - j);
        double cs = 0.0;
        for (std::size_t m = 0; m < c.size(); ++m) {
            cs += c[m];
            CHECK(cs == fine_partial[(m + 1) * stride - 1]);
        }
        CHECK(cs == p.endpoint());
    }
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(sample_path(1.0, 25, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(sample_path(0.0, 4, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(sample_path(1e6, 4, 0, 0), std::invalid_argument);
    CHECK(sample_path(1.0, 0, 0, 0).increments().size() == 1);
    CHECK(sample_path(2.0, 3, 0, 0).finest_step() == 0.25);
}

}
