#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include <refopt/fixtures.hpp>
#include <refopt/refactoring.hpp>

#include "support.hpp"

using namespace refopt;
using testsupport::ModelBuilder;
using testsupport::msg;

namespace {

// per-scenario multiset of (operation, repetitions, size): the behavior
// fingerprint every action must preserve
std::vector<std::vector<std::tuple<std::string, int, double>>> behaviorFingerprint(
    const ArchModel& m) {
    std::vector<std::vector<std::tuple<std::string, int, double>>> out;
    for (const auto& s : m.scenarios) {
        std::vector<std::tuple<std::string, int, double>> bag;
        for (const auto& msg : s.messages)
            bag.emplace_back(msg.operation, msg.repetitions, msg.size);
        std::sort(bag.begin(), bag.end());
        out.push_back(std::move(bag));
    }
    return out;
}

size_t totalOperations(const ArchModel& m) {
    size_t n = 0;
    for (const auto& c : m.components) n += c.operations.size();
    return n;
}

}  // namespace

TEST_CASE("preCondition produces the documented atoms") {
    ArchModel m = ttbsFixture();

    SECTION("Clon") {
        Condition pre = preCondition(clonAction("node_auth"), m);
        REQUIRE(pre.predicates.size() == 1);
        CHECK(pre.predicates[0] == Predicate::existsNode("node_auth"));
    }
    SECTION("MO2C") {
        Condition pre = preCondition(mo2cAction("user", "load_profile", "auth"), m);
        REQUIRE(pre.predicates.size() == 3);
        CHECK(pre.find(Predicate::existsOperation("user", "load_profile").key()));
        CHECK(pre.find(Predicate::existsComponent("auth").key()));
        const Predicate* notOwns = pre.find(Predicate::owns("auth", "load_profile").key());
        REQUIRE(notOwns);
        CHECK(notOwns->negated);
    }
    SECTION("dangling target") {
        CHECK_THROWS_AS(preCondition(redeAction("ghost"), m), UnresolvableTargetError);
        CHECK_THROWS_AS(preCondition(mo2nAction("user", "ghost_op"), m),
                        UnresolvableTargetError);
    }
}

TEST_CASE("Clon duplicates the node with its components, links, and annotations") {
    ArchModel m = ttbsFixture();
    ArchModel after = apply(clonAction("node_auth"), m, 1);

    CHECK(after.nodes.size() == m.nodes.size() + 1);
    const Node& clone = after.node("node_auth~clon1");
    CHECK(clone.multiplicity == m.node("node_auth").multiplicity);
    CHECK(clone.speedFactor == m.node("node_auth").speedFactor);

    // cloned component keeps theta and operations, and records its root
    const Component& authClone = after.component("auth~clon1");
    CHECK(authClone.failureProb == m.component("auth").failureProb);
    CHECK(authClone.operations == m.component("auth").operations);
    CHECK(authClone.replicaOf == "auth");
    CHECK(after.nodeOf("auth~clon1") == "node_auth~clon1");

    // link neighborhood mirrored
    for (const auto& l : m.links) {
        if (l.endpointA != "node_auth" && l.endpointB != "node_auth") continue;
        const std::string other = l.endpointA == "node_auth" ? l.endpointB : l.endpointA;
        const CommLink* mirrored = after.linkBetween("node_auth~clon1", other);
        REQUIRE(mirrored);
        CHECK(mirrored->failureProb == l.failureProb);
    }

    // thetas of pre-existing components untouched, input model untouched
    for (const auto& c : m.components)
        CHECK(after.component(c.id).failureProb == c.failureProb);
    CHECK(m.nodes.size() == 11);
}

TEST_CASE("MO2C transfers the operation and redirects its messages") {
    ArchModel m = ttbsFixture();
    ArchModel after = apply(mo2cAction("persistence", "store_record", "user"), m, 2);

    CHECK_FALSE(after.component("persistence").findOperation("store_record"));
    CHECK(after.component("user").findOperation("store_record"));
    CHECK(totalOperations(after) == totalOperations(m));
    for (const auto& s : after.scenarios)
        for (const auto& message : s.messages)
            if (message.operation == "store_record") CHECK(message.callee == "user");
    CHECK(behaviorFingerprint(after) == behaviorFingerprint(m));
}

TEST_CASE("MO2N splits the operation onto a fresh component and node") {
    ArchModel m = ttbsFixture();
    ArchModel after = apply(mo2nAction("auth", "verify_credentials"), m, 1);

    const Component& svc = after.component("verify_credentials~mo2n1");
    CHECK(svc.findOperation("verify_credentials"));
    CHECK(svc.failureProb == m.component("auth").failureProb);
    CHECK_FALSE(after.component("auth").findOperation("verify_credentials"));
    CHECK(totalOperations(after) == totalOperations(m));

    // the new node copies the host's parameters and links to the caller side
    const Node& freshNode = after.node("verify_credentials~mo2n1n");
    CHECK(freshNode.multiplicity == after.node("node_auth").multiplicity);
    CHECK(freshNode.speedFactor == after.node("node_auth").speedFactor);
    const CommLink* callerLink = after.linkBetween("verify_credentials~mo2n1n", "node_gateway");
    REQUIRE(callerLink);
    // psi copied from the gateway-auth link the traffic used to traverse
    CHECK(callerLink->failureProb ==
          m.linkBetween("node_gateway", "node_auth")->failureProb);

    for (const auto& s : after.scenarios)
        for (const auto& message : s.messages)
            if (message.operation == "verify_credentials")
                CHECK(message.callee == "verify_credentials~mo2n1");
    CHECK(behaviorFingerprint(after) == behaviorFingerprint(m));
}

TEST_CASE("ReDe moves the component to a new node with the old neighborhood") {
    ArchModel m = ttbsFixture();
    ArchModel after = apply(redeAction("user"), m, 3);

    const std::string fresh = "user~rede3";
    REQUIRE(after.findNode(fresh));
    CHECK(after.nodeOf("user") == fresh);

    // only `user` lives on the new node
    int deployed = 0;
    for (const auto& [comp, nodeId] : after.deployment)
        if (nodeId == fresh) ++deployed;
    CHECK(deployed == 1);

    // neighborhood of the new node equals the old node's
    std::set<std::string> oldNbrs, newNbrs;
    for (const auto& l : m.links) {
        if (l.endpointA == "node_user") oldNbrs.insert(l.endpointB);
        if (l.endpointB == "node_user") oldNbrs.insert(l.endpointA);
    }
    for (const auto& l : after.links) {
        if (l.endpointA == fresh) newNbrs.insert(l.endpointB);
        if (l.endpointB == fresh) newNbrs.insert(l.endpointA);
    }
    CHECK(newNbrs == oldNbrs);
    CHECK(behaviorFingerprint(after) == behaviorFingerprint(m));
}

TEST_CASE("composeConditions folds pre and post conditions") {
    ArchModel m = ttbsFixture();

    SECTION("single action is the identity fold") {
        std::vector<RefactoringAction> seq{clonAction("node_auth")};
        ComposedConditions cc = composeConditions(seq, m);
        CHECK(cc.pre == preCondition(seq[0], m));
        CHECK(cc.post.predicates == postCondition(seq[0], m, 1).predicates);
    }

    SECTION("a later pre discharged by an earlier post is excluded") {
        // MO2N moves verify_credentials to a fresh component; the follow-up
        // MO2C moves it from there, so its exists/owns atoms are discharged.
        std::vector<RefactoringAction> seq{
            mo2nAction("auth", "verify_credentials"),
            mo2cAction("verify_credentials~mo2n1", "verify_credentials", "user")};
        ComposedConditions cc = composeConditions(seq, m);
        CHECK_FALSE(cc.pre.find(
            Predicate::existsOperation("verify_credentials~mo2n1", "verify_credentials").key()));
        // the undischarged parts of the second pre remain
        CHECK(cc.pre.find(Predicate::existsComponent("user").key()));
        CHECK(holds(m, cc.pre));
        CHECK(isFeasible(seq, m));
    }

    SECTION("a pre clashing with an earlier post marks infeasibility") {
        // second move of the same operation out of its original owner
        std::vector<RefactoringAction> seq{
            mo2cAction("auth", "verify_credentials", "user"),
            mo2nAction("auth", "verify_credentials")};
        CHECK_THROWS_AS(composeConditions(seq, m), RefactoringError);
        CHECK_FALSE(isFeasible(seq, m));
    }

    SECTION("synthetic negated post contradiction") {
        Condition c;
        c.conjoin(Predicate::existsNode("x"));
        CHECK_THROWS_AS(c.conjoin(Predicate::existsNode("x").negate()),
                        InfeasibleSequenceError);
    }
}

TEST_CASE("isFeasible") {
    ArchModel m = ttbsFixture();

    SECTION("empty sequence is vacuously feasible") {
        CHECK(isFeasible(std::vector<RefactoringAction>{}, m));
    }
    SECTION("a sequence may target elements created by earlier actions") {
        std::vector<RefactoringAction> seq{mo2nAction("auth", "verify_credentials"),
                                           clonAction("verify_credentials~mo2n1n")};
        CHECK(isFeasible(seq, m));
        ArchModel after = applySequence(seq, m);
        CHECK(after.findNode("verify_credentials~mo2n1n~clon2"));
    }
    SECTION("nonexistent targets are infeasible") {
        CHECK_FALSE(isFeasible({clonAction("ghost_node")}, m));
    }
}

TEST_CASE("randomSequence yields feasible reproducible sequences") {
    ArchModel m = ttbsFixture();

    SECTION("length 1") {
        std::mt19937_64 rng(7);
        RefactoringSequence s = randomSequence(m, rng, 1);
        CHECK(s.actions.size() == 1);
        CHECK(isFeasible(s, m));
    }
    SECTION("same seed, same sequence") {
        std::mt19937_64 rngA(12345), rngB(12345);
        RefactoringSequence a = randomSequence(m, rngA, 4);
        RefactoringSequence b = randomSequence(m, rngB, 4);
        CHECK(a.actions == b.actions);
    }
    SECTION("MO2C is never drawn when no distinct destination exists") {
        ArchModel tiny = ModelBuilder{}
                             .node("n")
                             .comp("only", 0.0, {{"op", 0.1}})
                             .deploy("only", "n")
                             .open("s", 1.0, 0.5, {msg("actor:u", "only", "op")})
                             .build();
        CHECK(targetDomainSize(tiny, ActionKind::MO2C) == 0);
        std::mt19937_64 rng(99);
        for (int i = 0; i < 50; ++i) {
            RefactoringSequence s = randomSequence(tiny, rng, 1);
            CHECK(s.actions[0].kind != ActionKind::MO2C);
        }
    }
}

TEST_CASE("feasible sequences apply cleanly and preserve behavior") {
    std::mt19937_64 rng(20250810);
    for (const ArchModel& m : {ttbsFixture(), cocomeFixture()}) {
        auto baseline = behaviorFingerprint(m);
        for (int i = 0; i < 100; ++i) {
            RefactoringSequence seq = randomSequence(m, rng, 4);
            REQUIRE(isFeasible(seq, m));
            ArchModel after = applySequence(seq, m);  // must not throw
            CHECK(behaviorFingerprint(after) == baseline);
            CHECK(collectViolations(after).empty());
        }
    }
}

TEST_CASE("actions serialize to kind/target JSON") {
    std::vector<RefactoringAction> seq{clonAction("node_auth"),
                                       mo2nAction("auth", "verify_credentials"),
                                       mo2cAction("user", "load_profile", "auth"),
                                       redeAction("gateway")};
    Json j = toJson(seq);
    CHECK(j[0] == Json{{"kind", "Clon"}, {"target", "node_auth"}});
    CHECK(j[2] == Json{{"kind", "MO2C"}, {"target", "user/load_profile"}, {"dest", "auth"}});
    CHECK(actionsFromJson(j) == seq);
}
