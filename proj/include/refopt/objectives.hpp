// The four-objective vector for a candidate refactoring sequence: perfQ and
// reliability (maximized), fuzzy antipattern count and architectural
// distance (minimized). Dominance always compares the canonical
// all-minimize orientation.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <refopt/antipatterns.hpp>
#include <refopt/lqn.hpp>
#include <refopt/model.hpp>
#include <refopt/refactoring.hpp>
#include <refopt/reliability.hpp>

namespace refopt {

struct ObjectiveVector {
    double perfQ = 0.0;        // maximize
    double reliability = 0.0;  // maximize, in [0,1]
    double pas = 0.0;          // minimize, >= 0
    double changes = 0.0;      // minimize, > 0

    bool operator==(const ObjectiveVector&) const = default;

    std::array<double, 4> canonical() const { return {-perfQ, -reliability, pas, changes}; }
};

inline bool dominates(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    bool strict = false;
    for (size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strict = true;
    }
    return strict;
}

inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    return dominates(a.canonical(), b.canonical());
}

struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mean normalized variation over the shared performance indices: +1 for
// throughput, -1 for response time, +1 for utilization with a correction
// that linearly penalizes post-refactoring utilizations above the knee
// (capped at -1). Both index sets must cover the initial model's
// identifiers and every compared pair must satisfy F+I > 0.
inline double perfQ(const PerformanceIndices& initial, const PerformanceIndices& refactored,
                    double utilizationKnee = 0.8) {
    double sum = 0.0;
    int count = 0;
    auto variation = [](double f, double i) {
        if (f + i <= 0.0)
            throw EvaluationError("perfQ: degenerate index pair (F+I = 0)");
        return (f - i) / (f + i);
    };
    auto lookup = [](const std::map<std::string, double>& values, const std::string& id) {
        auto it = values.find(id);
        if (it == values.end()) throw EvaluationError("perfQ: index-set mismatch at " + id);
        return it->second;
    };
    for (const auto& [id, i] : initial.scenarioThroughput) {
        sum += variation(lookup(refactored.scenarioThroughput, id), i);
        ++count;
    }
    for (const auto& [id, i] : initial.scenarioResponseTime) {
        sum += -variation(lookup(refactored.scenarioResponseTime, id), i);
        ++count;
    }
    for (const auto& [id, i] : initial.nodeUtilization) {
        const double f = lookup(refactored.nodeUtilization, id);
        const double overload =
            std::min(1.0, std::max(0.0, f - utilizationKnee) / (1.0 - utilizationKnee));
        sum += variation(f, i) - overload;
        ++count;
    }
    if (count == 0) throw EvaluationError("perfQ: empty index set");
    return sum / count;
}

// Sum of brf(action) * AW(target) with the model state advancing action by
// action. With brf disabled every action costs its target's weight alone.
inline double archDistance(const std::vector<RefactoringAction>& actions,
                           const ArchModel& model, bool brfEnabled = true) {
    double total = 0.0;
    ArchModel state = model;
    for (size_t i = 0; i < actions.size(); ++i) {
        const double brf = brfEnabled ? actions[i].brf : 1.0;
        total += brf * architecturalWeight(state, targetElement(actions[i]));
        state = apply(actions[i], state, static_cast<int>(i) + 1);
    }
    return total;
}

inline double archDistance(const RefactoringSequence& seq, const ArchModel& model,
                           bool brfEnabled = true) {
    return archDistance(seq.actions, model, brfEnabled);
}

struct EvalConfig {
    bool brfEnabled = true;
    double fuzziness = 0.95;  // 0 disables antipattern detection entirely
    bool pasCountMode = false;
    double utilizationKnee = 0.8;
    double solverTol = 1e-6;
    int solverMaxIter = 1000;
};

namespace detail {

// perfQ compares the initial model's index identifiers; nodes created by
// refactoring have no initial counterpart and idle-in-both indices carry no
// signal, so both are dropped before the strict comparison.
inline std::pair<PerformanceIndices, PerformanceIndices> comparableIndices(
    const PerformanceIndices& initial, const PerformanceIndices& refactored) {
    PerformanceIndices i, f;
    auto keep = [](const std::map<std::string, double>& from,
                   const std::map<std::string, double>& other, auto accept,
                   std::map<std::string, double>& intoA, std::map<std::string, double>& intoB) {
        for (const auto& [id, v] : from) {
            auto it = other.find(id);
            if (it == other.end() || !accept(v, it->second)) continue;
            intoA[id] = v;
            intoB[id] = it->second;
        }
    };
    auto positiveSum = [](double a, double b) { return a + b > 0.0; };
    keep(initial.scenarioThroughput, refactored.scenarioThroughput, positiveSum,
         i.scenarioThroughput, f.scenarioThroughput);
    keep(initial.scenarioResponseTime, refactored.scenarioResponseTime, positiveSum,
         i.scenarioResponseTime, f.scenarioResponseTime);
    keep(initial.nodeUtilization, refactored.nodeUtilization, positiveSum,
         i.nodeUtilization, f.nodeUtilization);
    return {std::move(i), std::move(f)};
}

}  // namespace detail

// Applies the sequence, solves the refactored model, and assembles the four
// objectives. Solver non-convergence surfaces as an EvaluationError so the
// caller can redraw the individual.
inline ObjectiveVector evaluate(const RefactoringSequence& seq, const ArchModel& baseModel,
                                const PerformanceIndices& baseIndices,
                                const EvalConfig& config) {
    const ArchModel refactored = applySequence(seq, baseModel);
    PerformanceIndices indices;
    try {
        indices = solveModel(refactored, config.solverTol, config.solverMaxIter);
    } catch (const LqnStructureError& e) {
        throw EvaluationError(e.what());
    }
    if (!indices.converged)
        throw EvaluationError("LQN solver did not converge within the iteration budget");

    ObjectiveVector v;
    auto [i, f] = detail::comparableIndices(baseIndices, indices);
    v.perfQ = perfQ(i, f, config.utilizationKnee);
    v.reliability = systemReliability(refactored);
    v.pas = config.fuzziness > 0.0
                ? pasObjective(detect(refactored, indices, config.fuzziness),
                               config.pasCountMode)
                : 0.0;
    v.changes = archDistance(seq, baseModel, config.brfEnabled);
    return v;
}

}  // namespace refopt
