// Shared test helpers: terse model construction and randomized model
// generation for property-style checks.
#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include <refopt/model.hpp>

namespace testsupport {

using namespace refopt;

inline Message msg(std::string caller, std::string callee, std::string op,
                   double size = 0.0, int rep = 1) {
    return Message{std::move(caller), std::move(callee), std::move(op), size, rep};
}

struct ModelBuilder {
    ArchModel m;

    ModelBuilder& comp(std::string id, double theta = 0.0,
                       std::vector<std::pair<std::string, double>> ops = {}) {
        Component c;
        c.id = std::move(id);
        c.failureProb = theta;
        for (auto& [opId, demand] : ops) c.operations.push_back({opId, demand});
        m.components.push_back(std::move(c));
        return *this;
    }
    ModelBuilder& node(std::string id, int mult = 1, double speed = 1.0) {
        m.nodes.push_back({std::move(id), mult, speed});
        return *this;
    }
    ModelBuilder& link(std::string id, std::string a, std::string b, double psi = 0.0) {
        m.links.push_back({std::move(id), std::move(a), std::move(b), psi});
        return *this;
    }
    ModelBuilder& deploy(const std::string& comp, const std::string& node) {
        m.deployment[comp] = node;
        return *this;
    }
    ModelBuilder& open(std::string id, double prob, double rate,
                       std::vector<Message> messages) {
        m.scenarios.push_back({std::move(id), prob, OpenWorkload{rate}, std::move(messages)});
        return *this;
    }
    ModelBuilder& closed(std::string id, double prob, int population, double think,
                         std::vector<Message> messages) {
        m.scenarios.push_back(
            {std::move(id), prob, ClosedWorkload{population, think}, std::move(messages)});
        return *this;
    }
    ArchModel build(bool check = true) {
        if (check) validate(m);
        return m;
    }
};

// Small random valid model; message sizes are integral so reliability can be
// cross-checked by per-unit failure sampling.
inline ArchModel randomModel(std::mt19937_64& rng, int maxComponents = 4,
                             int maxLinks = 3, int maxScenarios = 3) {
    auto uniformInt = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    auto uniformReal = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    ModelBuilder b;
    const int nComps = uniformInt(1, maxComponents);
    const int nNodes = uniformInt(1, 3);
    for (int i = 0; i < nNodes; ++i)
        b.node("n" + std::to_string(i), uniformInt(1, 2), uniformReal(0.5, 2.0));

    std::vector<std::vector<std::string>> opsOf(nComps);
    for (int i = 0; i < nComps; ++i) {
        std::vector<std::pair<std::string, double>> ops;
        const int nOps = uniformInt(1, 3);
        for (int k = 0; k < nOps; ++k) {
            std::string opId = "c" + std::to_string(i) + "_op" + std::to_string(k);
            ops.emplace_back(opId, uniformReal(0.05, 0.5));
            opsOf[i].push_back(opId);
        }
        b.comp("c" + std::to_string(i), uniformReal(0.0, 0.1), ops);
        b.deploy("c" + std::to_string(i), "n" + std::to_string(uniformInt(0, nNodes - 1)));
    }

    int linkCount = 0;
    for (int a = 0; a < nNodes && linkCount < maxLinks; ++a)
        for (int bn = a + 1; bn < nNodes && linkCount < maxLinks; ++bn)
            if (uniformInt(0, 1) == 1) {
                b.link("l" + std::to_string(linkCount), "n" + std::to_string(a),
                       "n" + std::to_string(bn), uniformReal(0.0, 0.05));
                ++linkCount;
            }

    const int nScen = uniformInt(1, maxScenarios);
    std::vector<double> weights(nScen);
    double sum = 0.0;
    for (auto& w : weights) {
        w = uniformReal(0.1, 1.0);
        sum += w;
    }
    for (int s = 0; s < nScen; ++s) {
        double prob = weights[s] / sum;
        if (s == nScen - 1) {
            prob = 1.0;
            for (int t = 0; t + 1 < nScen; ++t) prob -= weights[t] / sum;
        }
        std::vector<Message> msgs;
        const int nMsgs = uniformInt(1, 5);
        for (int k = 0; k < nMsgs; ++k) {
            const int calleeIdx = uniformInt(0, nComps - 1);
            const std::string callee = "c" + std::to_string(calleeIdx);
            const std::string op =
                opsOf[calleeIdx][uniformInt(0, static_cast<int>(opsOf[calleeIdx].size()) - 1)];
            std::string caller = uniformInt(0, 3) == 0
                                     ? "actor:user"
                                     : "c" + std::to_string(uniformInt(0, nComps - 1));
            msgs.push_back(msg(caller, callee, op, uniformInt(0, 3), uniformInt(1, 3)));
        }
        b.open("s" + std::to_string(s), prob, uniformReal(0.1, 1.0), std::move(msgs));
    }
    return b.build();
}

}  // namespace testsupport
