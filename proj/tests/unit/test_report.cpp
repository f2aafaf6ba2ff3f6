#include "spde/report.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace spde;

TEST_SUITE("report") {

TEST_CASE("shortest round-trip floats") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.5) == "2.5");
    CHECK(format_double(0.0625) == "0.0625");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("log-log slope") {
    std::vector<double> tau, err;
    for (int j = 4; j <= 10; ++j) {
        tau.push_back(std::ldexp(0.5, -j));
        err.push_back(3.0 * std::sqrt(tau.back()));
    }
    CHECK(fit_loglog_slope(tau, err) == doctest::Approx(0.5).epsilon(1e-12));
    err[2] = 0.0;
    err[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK(fit_loglog_slope(tau, err) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::isnan(fit_loglog_slope(std::vector<double>{0.1}, std::vector<double>{0.2})));
    CHECK_THROWS_AS(fit_loglog_slope(tau, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("census CSV schema") {
    ExperimentReport r;
    r.kind = ReportKind::census;
    r.metadata = {{"seed", "5"}};
    r.census.push_back({"LT", "rational", 2.5, 1, 256, 0.0625, 100, 100, 0, 0, 0});
    CHECK(to_csv(r) == "# seed=5\nintegrator,g,lambda,d,N,tau,samples,positive,diverged\n"
                       "LT,rational,2.5,1,256,0.0625,100,100,0\n");
}

TEST_CASE("convergence CSV with slope footers") {
    ExperimentReport r;
    r.kind = ReportKind::convergence;
    r.errors.push_back({"LT", "rational", 1.0, 1, 256, 4, 0.03125, 0.01, 150, 0});
    r.slopes.push_back({"LT", "rational", 1.0, 256, 0.5});
    CHECK(to_csv(r) == "integrator,g,lambda,d,N,level,tau,rms_sup_error\n"
                       "LT,rational,1,1,256,4,0.03125,0.01\n# slope:LT=0.5\n");
    r.slopes.push_back({"LT", "linear", 1.0, 256, 0.0});
    const auto csv = to_csv(r);
    CHECK(csv.find("# slope:LT[g=rational,lambda=1,N=256]=0.5\n") != std::string::npos);
    CHECK(csv.find("# slope:LT[g=linear,lambda=1,N=256]=0\n") != std::string::npos);
}

TEST_CASE("append keeps the first metadata") {
    ExperimentReport a, b;
    a.metadata = {{"seed", "1"}};
    b.metadata = {{"seed", "2"}};
    b.errors.resize(2);
    append(a, b);
    CHECK(a.errors.size() == 2);
    CHECK(a.metadata_value("seed") == "1");
    CHECK(a.metadata_value("missing").empty());
}

TEST_CASE("write_report writes CSV and summary") {
    spde::testing::TempDir dir("report");
    ExperimentReport r;
    r.kind = ReportKind::moments;
    r.moments.push_back({"LT", "rational", 1.0, 1, 256, 4, 0.03125, 1.7});
    r.wall_seconds = 1.25;
    write_report(r, dir / "m.csv");
    CHECK(spde::testing::slurp(dir / "m.csv") == to_csv(r));
    CHECK(spde::testing::slurp(dir / "m.csv.summary.txt").find("wall clock: 1.25 s") != std::string::npos);
    CHECK(to_csv(r).find("wall") == std::string::npos);

    const auto bad = dir.path() / "missing" / "x.csv";
    try {
        write_report(r, bad);
        FAIL("expected an I/O error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
    }
}

}
