#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <refopt/fixtures.hpp>
#include <refopt/objectives.hpp>

#include "support.hpp"

using namespace refopt;
using testsupport::ModelBuilder;
using testsupport::msg;

namespace {

PerformanceIndices singleIndex(const std::string& kind, const std::string& id, double v) {
    PerformanceIndices p;
    if (kind == "tput")
        p.scenarioThroughput[id] = v;
    else if (kind == "rt")
        p.scenarioResponseTime[id] = v;
    else
        p.nodeUtilization[id] = v;
    return p;
}

// the worked distance example: weights 1.43 and 1.32 from degree ratios
// 43/100 and 32/100 over a shared hub with one hundred partners
ArchModel workedExampleModel() {
    ModelBuilder b;
    b.node("n0");
    b.comp("hub", 0.0);
    b.deploy("hub", "n0");
    b.comp("E1", 0.0);
    b.deploy("E1", "n0");
    b.comp("E2", 0.0);
    b.deploy("E2", "n0");
    std::vector<Message> msgs;
    for (int i = 0; i < 100; ++i) {
        const std::string p = "p" + std::to_string(i);
        b.comp(p, 0.0, {{"op_" + p, 0.01}});
        b.deploy(p, "n0");
        msgs.push_back(msg("hub", p, "op_" + p));
        if (i < 43) msgs.push_back(msg("E1", p, "op_" + p));
        if (i < 32) msgs.push_back(msg("E2", p, "op_" + p));
    }
    b.open("s", 1.0, 0.001, std::move(msgs));
    return b.build();
}

// all four action targets weigh exactly 1: zero-degree elements against a
// nonzero maximum of their kind
ArchModel unitWeightModel() {
    return ModelBuilder{}
        .node("N1")
        .node("N4")
        .node("N5")
        .comp("A", 0.0, {{"op_a", 0.1}})
        .comp("B", 0.0, {{"op_b", 0.1}})
        .comp("C", 0.0)
        .comp("D", 0.0, {{"op_d", 0.1}})
        .deploy("A", "N1")
        .deploy("B", "N1")
        .deploy("C", "N1")
        .deploy("D", "N4")
        .open("s", 1.0, 0.5, {msg("actor:u", "A", "op_a"), msg("A", "B", "op_b")})
        .build();
}

}  // namespace

TEST_CASE("perfQ unit values") {
    SECTION("identity is zero") {
        PerformanceIndices p = solveModel(cocomeFixture());
        CHECK(perfQ(p, p) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("single throughput index 100 -> 150") {
        auto i = singleIndex("tput", "s", 100.0);
        auto f = singleIndex("tput", "s", 150.0);
        CHECK(perfQ(i, f) == Catch::Approx(0.2).margin(1e-12));
    }
    SECTION("single response time 2.0 -> 1.0") {
        auto i = singleIndex("rt", "s", 2.0);
        auto f = singleIndex("rt", "s", 1.0);
        CHECK(perfQ(i, f) == Catch::Approx(1.0 / 3.0).margin(1e-12));
    }
    SECTION("utilization below the knee carries no correction") {
        auto i = singleIndex("util", "n", 0.4);
        auto f = singleIndex("util", "n", 0.6);
        CHECK(perfQ(i, f) == Catch::Approx(0.2).margin(1e-12));
    }
    SECTION("utilization above the knee is penalized, capped at 1") {
        auto i = singleIndex("util", "n", 0.4);
        auto f = singleIndex("util", "n", 0.9);
        CHECK(perfQ(i, f) == Catch::Approx((0.5 / 1.3) - 0.5).margin(1e-12));
        auto sat = singleIndex("util", "n", 1.0);
        CHECK(perfQ(i, sat) == Catch::Approx((0.6 / 1.4) - 1.0).margin(1e-12));
    }
    SECTION("index-set mismatch and degenerate pairs are errors") {
        auto i = singleIndex("tput", "s", 100.0);
        CHECK_THROWS_AS(perfQ(i, singleIndex("tput", "other", 1.0)), EvaluationError);
        CHECK_THROWS_AS(perfQ(singleIndex("util", "n", 0.0), singleIndex("util", "n", 0.0)),
                        EvaluationError);
    }
}

TEST_CASE("perfQ is antisymmetric without utilization correction") {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> u(0.05, 0.79);
    for (int t = 0; t < 50; ++t) {
        PerformanceIndices a, b;
        for (int k = 0; k < 5; ++k) {
            const std::string id = "i" + std::to_string(k);
            a.scenarioThroughput[id] = u(rng);
            b.scenarioThroughput[id] = u(rng);
            a.scenarioResponseTime[id] = u(rng);
            b.scenarioResponseTime[id] = u(rng);
            a.nodeUtilization[id] = u(rng);  // below the knee, no correction
            b.nodeUtilization[id] = u(rng);
        }
        CHECK(perfQ(a, b) == Catch::Approx(-perfQ(b, a)).margin(1e-12));
        CHECK(perfQ(a, b) >= -2.0);
        CHECK(perfQ(a, b) <= 1.0);
    }
}

TEST_CASE("archDistance reproduces the worked example exactly") {
    ArchModel m = workedExampleModel();
    REQUIRE(architecturalWeight(m, ElementRef::forComponent("E1")) == 1.43);
    REQUIRE(architecturalWeight(m, ElementRef::forComponent("E2")) == 1.32);

    RefactoringAction a1 = redeAction("E1");
    a1.brf = 1.23;
    RefactoringAction a2 = redeAction("E2");
    a2.brf = 2.3;
    const double d = archDistance(std::vector<RefactoringAction>{a1, a2}, m);
    CHECK(std::abs(d - 4.7949) <= 1e-12);
}

TEST_CASE("archDistance applies the per-kind costs") {
    ArchModel m = unitWeightModel();

    SECTION("single Clon with unit weight costs 1.23") {
        CHECK(archDistance(std::vector<RefactoringAction>{clonAction("N5")}, m) ==
              Catch::Approx(1.23).margin(1e-12));
    }
    SECTION("one action of each kind with unit weights") {
        std::vector<RefactoringAction> seq{
            mo2nAction("D", "op_d"),
            mo2cAction("op_d~mo2n1", "op_d", "C"),
            redeAction("D"),
            clonAction("N5"),
        };
        REQUIRE(isFeasible(seq, m));
        CHECK(archDistance(seq, m) == Catch::Approx(6.12).margin(1e-12));
        // with brf disabled the distance degenerates to the weight sum
        CHECK(archDistance(seq, m, false) == Catch::Approx(4.0).margin(1e-12));
    }
}

TEST_CASE("archDistance is additive over concatenation") {
    ArchModel m = ttbsFixture();
    std::mt19937_64 rng(606);
    for (int t = 0; t < 10; ++t) {
        RefactoringSequence seq = randomSequence(m, rng, 4);
        std::vector<RefactoringAction> head(seq.actions.begin(), seq.actions.begin() + 2);
        std::vector<RefactoringAction> tail(seq.actions.begin() + 2, seq.actions.end());
        ArchModel mid = applySequence(head, m);
        if (!isFeasible(tail, mid)) continue;  // tail may reference ids tagged 3,4
        CHECK(archDistance(seq.actions, m) ==
              Catch::Approx(archDistance(head, m) + archDistance(tail, mid)).margin(1e-9));
    }
}

TEST_CASE("evaluate assembles the objective vector") {
    ArchModel base = ttbsFixture();
    PerformanceIndices baseIndices = solveModel(base);
    EvalConfig config;

    SECTION("a Clon of an unused linked node changes nothing but the distance") {
        RefactoringSequence seq = makeSequence({clonAction("node_travel")}, base);
        ObjectiveVector v = evaluate(seq, base, baseIndices, config);
        CHECK(v.perfQ == Catch::Approx(0.0).margin(1e-9));
        CHECK(v.reliability == Catch::Approx(systemReliability(base)).margin(1e-12));
        CHECK(v.changes > 0.0);
    }
    SECTION("any feasible sequence has positive distance") {
        std::mt19937_64 rng(11);
        for (int t = 0; t < 20; ++t) {
            RefactoringSequence seq = randomSequence(base, rng, 4);
            CHECK(evaluate(seq, base, baseIndices, config).changes > 0.0);
        }
    }
    SECTION("disabled antipattern detection pins pas to zero") {
        EvalConfig off = config;
        off.fuzziness = 0.0;
        std::mt19937_64 rng(12);
        for (int t = 0; t < 10; ++t) {
            RefactoringSequence seq = randomSequence(base, rng, 4);
            CHECK(evaluate(seq, base, baseIndices, off).pas == 0.0);
        }
    }
}

TEST_CASE("dominance uses the canonical orientation") {
    ObjectiveVector better{0.3, 0.9, 1.0, 5.0};
    ObjectiveVector worse{0.1, 0.8, 2.0, 6.0};
    CHECK(dominates(better, worse));
    CHECK_FALSE(dominates(worse, better));
    CHECK_FALSE(dominates(better, better));  // equal vectors never dominate

    ObjectiveVector tradeoff{0.5, 0.7, 3.0, 4.0};
    CHECK_FALSE(dominates(better, tradeoff));
    CHECK_FALSE(dominates(tradeoff, better));
}
