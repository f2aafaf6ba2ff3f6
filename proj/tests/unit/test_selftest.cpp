#include "spde/selftest.hpp"

#include <doctest.h>

using namespace spde;

TEST_SUITE("selftest") {

TEST_CASE("invariant suite passes") {
    const auto r = run_selftest();
    CHECK(r.checks.size() >= 10);
    for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
    CHECK(r.passed());
    CHECK(r.seconds < 30.0);
}

TEST_CASE("suite passes for other seeds") {
    for (std::uint64_t seed : {1u, 77u, 4096u}) CHECK(run_selftest(seed).passed());
}

TEST_CASE("passed requires every check") {
    SelftestReport r;
    r.checks = {{"a", true, ""}, {"b", false, "broken"}};
    CHECK_FALSE(r.passed());
}

}
