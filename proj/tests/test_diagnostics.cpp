#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <fracbilin/diagnostics.hpp>
#include <fracbilin/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <set>
#include <string>

using namespace fracbilin;

namespace {

DiagnosticsReport run(Suite s, int n = 32, int steps = 32, std::uint64_t seed = 2024) {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {n, steps});
    return run_suite(c.spec, d, s, seed);
}

} // namespace

TEST_CASE("suite names round-trip through the parser") {
    for (Suite s : {Suite::None, Suite::MaxPrinciple, Suite::Estimates, Suite::Lipschitz,
                    Suite::Derivatives, Suite::Adjointness, Suite::All}) {
        CHECK(parse_suite(suite_name(s)) == s);
    }
    CHECK_THROWS_AS(parse_suite("bogus"), ParseError);
    CHECK_THROWS_AS(parse_suite(""), ParseError);
}

TEST_CASE("the empty suite produces an empty report") {
    DiagnosticsReport rep = run(Suite::None);
    CHECK(rep.entries.empty());
    CHECK(rep.n_pass == 0);
    CHECK(rep.n_fail == 0);
}

TEST_CASE("every named suite passes on the default case") {
    for (Suite s : {Suite::MaxPrinciple, Suite::Estimates, Suite::Lipschitz, Suite::Derivatives,
                    Suite::Adjointness}) {
        DiagnosticsReport rep = run(s);
        INFO(suite_name(s));
        CHECK(rep.n_fail == 0);
        CHECK(rep.n_pass > 0);
        CHECK(rep.n_pass == static_cast<int>(rep.entries.size()));
    }
}

TEST_CASE("the full suite is the union of the named ones") {
    DiagnosticsReport all = run(Suite::All);
    size_t total = 0;
    for (Suite s : {Suite::MaxPrinciple, Suite::Estimates, Suite::Lipschitz, Suite::Derivatives,
                    Suite::Adjointness})
        total += run(s).entries.size();
    CHECK(all.entries.size() == total);
    CHECK(all.n_fail == 0);
}

TEST_CASE("entries arrive sorted by name with populated fields") {
    DiagnosticsReport rep = run(Suite::All);
    REQUIRE(!rep.entries.empty());
    for (size_t i = 0; i + 1 < rep.entries.size(); ++i)
        CHECK(rep.entries[i].name <= rep.entries[i + 1].name);
    const std::set<std::string> anchors = {
        "d1", "e",  "f4",  "f3",   "f1",  "fc", "fc1", "d",  "1the", "t8", "d2", "r9", "fun",
        "le1", "le2", "lem1", "q3", "q5", "i",  "i1",  "i2", "i3",  "1z", "qo", "1d", "2d", "1i"};
    for (const auto& e : rep.entries) {
        CHECK(!e.name.empty());
        CHECK(anchors.count(e.anchor) == 1);
        CHECK(std::isfinite(e.margin));
    }
}

TEST_CASE("reports are bitwise deterministic for a fixed seed") {
    DiagnosticsReport a = run(Suite::All, 32, 32, 99);
    DiagnosticsReport b = run(Suite::All, 32, 32, 99);
    CHECK(report_json(a) == report_json(b));
    DiagnosticsReport c = run(Suite::All, 32, 32, 100);
    CHECK(report_json(a) != report_json(c));  // the seed is recorded in entries
}

TEST_CASE("json report parses and mirrors the summary counts") {
    DiagnosticsReport rep = run(Suite::Estimates);
    auto j = nlohmann::json::parse(report_json(rep));
    REQUIRE(j.contains("entries"));
    REQUIRE(j.contains("summary"));
    CHECK(j["summary"]["n_pass"].get<int>() == rep.n_pass);
    CHECK(j["summary"]["n_fail"].get<int>() == rep.n_fail);
    CHECK(j["entries"].size() == rep.entries.size());
    for (size_t i = 0; i < rep.entries.size(); ++i) {
        CHECK(j["entries"][i]["name"].get<std::string>() == rep.entries[i].name);
        CHECK(j["entries"][i]["pass"].get<bool>() == rep.entries[i].pass);
    }
}

TEST_CASE("table report carries one line per entry plus header and count") {
    DiagnosticsReport rep = run(Suite::MaxPrinciple);
    const std::string table = report_table(rep);
    const auto lines = std::count(table.begin(), table.end(), '\n');
    CHECK(lines == static_cast<long>(rep.entries.size()) + 2);
    CHECK(table.find("check") != std::string::npos);
    CHECK(table.find("pass") != std::string::npos);
}

TEST_CASE("a negative initial profile turns into failing entries, not throws") {
    auto c = support::default_case();
    ProblemSpec sp = c.spec;
    sp.y0.space.kind = SpaceFunc::Kind::Constant;
    sp.y0.space.value = -0.5;
    Discretization d = make_discretization(sp, {16, 16});
    DiagnosticsReport rep = run_suite(sp, d, Suite::MaxPrinciple, 7);
    CHECK(rep.n_fail >= 2);  // data nonnegativity and state nonnegativity
    bool found = false;
    for (const auto& e : rep.entries)
        if (e.name == "initial_data_nonnegative") {
            found = true;
            CHECK_FALSE(e.pass);
            CHECK(e.lhs < 0.0);
        }
    CHECK(found);
}

TEST_CASE("smooth admissible controls are admissible and grid-independent") {
    auto c = support::default_case();
    Grid g1 = make_grid(c.spec, 16);
    Grid g2 = make_grid(c.spec, 33);
    TimeGrid t1 = TimeGrid::make(1.0, 8);
    TimeGrid t2 = TimeGrid::make(1.0, 16);
    Rng r1(5), r2(5);
    ControlField a = smooth_admissible(c.spec, g1, t1, r1);
    ControlField b = smooth_admissible(c.spec, g2, t2, r2);
    for (int k = 0; k <= 8; ++k)
        for (int i = 0; i < 16; ++i)
            if (g1.omega_mask[i]) {
                CHECK(a(k, i) >= c.spec.m);
                CHECK(a(k, i) <= c.spec.M);
            }
    // same continuous field: nodes of g1 at even indices of g2 (16 -> 33
    // doubles h), time levels at even indices
    for (int k = 0; k <= 8; ++k)
        for (int i = 0; i < 16; ++i) {
            if (!g1.omega_mask[i] || !g2.omega_mask[2 * i + 1]) continue;
            CHECK(a(k, i) == doctest::Approx(b(2 * k, 2 * i + 1)).epsilon(1e-13));
        }
}

TEST_CASE("lipschitz probe is stable under refinement on the default case") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {24, 16});
    LipschitzReport rep = lipschitz_probe(c.spec, d, 6, 31);
    CHECK(rep.n_pairs == 6);
    REQUIRE(rep.ratios.size() == 6);
    for (double r : rep.ratios) {
        CHECK(std::isfinite(r));
        CHECK(r >= 0.0);
    }
    CHECK(rep.max_ratio == *std::max_element(rep.ratios.begin(), rep.ratios.end()));
    CHECK(rep.stable);
    CHECK(rep.max_ratio_fine <= 2.0 * rep.max_ratio);
    CHECK(rep.max_ratio <= 2.0 * rep.max_ratio_fine);
}

TEST_CASE("dense stacked operator blocks mirror the step matrices") {
    auto c = support::default_case();
    Discretization d = make_discretization(c.spec, {6, 3});
    Rng rng(13);
    ControlField v = random_control(c.spec, d.grid, d.tg, rng);
    StepEngine eng = make_engine(c.spec, d, v, 0.3);
    Eigen::MatrixXd L = dense_stacked_operator(eng);
    REQUIRE(L.rows() == 18);
    // diagonal blocks are the per-step implicit matrices
    for (int k = 1; k <= 3; ++k) {
        Eigen::MatrixXd blk = L.block(6 * (k - 1), 6 * (k - 1), 6, 6);
        CHECK((blk - eng.B[k - 1]).cwiseAbs().maxCoeff() == 0.0);
    }
    // first subdiagonal block: -I plus the dt^2-weighted kernel tap
    Eigen::MatrixXd sub = L.block(6, 0, 6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i != j) {
                CHECK(sub(i, j) == 0.0);
            } else {
                CHECK(sub(i, i) < 0.0);  // -1 + small positive kernel weight
                CHECK(sub(i, i) > -1.0);
            }
        }
}
