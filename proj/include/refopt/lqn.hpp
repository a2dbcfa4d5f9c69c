// Layered queueing view of an architecture model and an approximate
// analytic solver. One processor per node, one task per component, one
// entry per operation; each scenario becomes a reference task issuing its
// message sequence as synchronous calls with mean calls = repetitions.
//
// The solver alternates queueing-delay estimation per processor (multi
// server correction via the square-root staffing exponent) with residence
// propagation up the per-scenario call DAGs. Open workloads follow
// operational laws; closed workloads run a multiclass Schweitzer fixed
// point. Saturated stations are clamped to utilization 1 and report the
// residence time at 0.999 so downstream objectives stay finite.
#pragma once

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <refopt/model.hpp>

namespace refopt {

struct LqnProcessor {
    std::string node;
    int multiplicity = 1;
    double speedFactor = 1.0;
};

struct LqnTask {
    std::string component;
    int processor = -1;
};

struct LqnEntry {
    std::string component;
    std::string operation;
    int task = -1;
    double demand = 0.0;  // host demand already divided by the node speed
};

// caller == kReferenceCaller models the scenario's reference task
inline constexpr int kReferenceCaller = -1;

struct LqnCall {
    int scenario = 0;
    int caller = kReferenceCaller;  // entry index
    int callee = 0;                 // entry index
    double meanCalls = 0.0;         // per invocation of the caller
};

struct LqnReferenceTask {
    std::string scenario;
    Workload workload;
};

struct LqnStructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LqnModel {
    std::vector<LqnProcessor> processors;
    std::vector<LqnTask> tasks;
    std::vector<LqnEntry> entries;
    std::vector<LqnCall> calls;
    std::vector<LqnReferenceTask> referenceTasks;

    int processorOf(int entry) const { return tasks[entries[entry].task].processor; }
};

struct PerformanceIndices {
    std::map<std::string, double> scenarioThroughput;   // req/s
    std::map<std::string, double> scenarioResponseTime; // s
    std::map<std::string, double> nodeUtilization;      // per-server, in [0,1]
    bool converged = true;
    bool saturated = false;
};

inline LqnModel toLqn(const ArchModel& m) {
    LqnModel lqn;
    std::map<std::string, int> processorIndex;
    for (const auto& n : m.nodes) {
        processorIndex[n.id] = static_cast<int>(lqn.processors.size());
        lqn.processors.push_back({n.id, n.multiplicity, n.speedFactor});
    }
    std::map<std::string, int> taskIndex;
    for (const auto& c : m.components) {
        taskIndex[c.id] = static_cast<int>(lqn.tasks.size());
        lqn.tasks.push_back({c.id, processorIndex.at(m.nodeOf(c.id))});
    }
    std::map<std::pair<std::string, std::string>, int> entryIndex;
    for (const auto& c : m.components) {
        const double speed = m.node(m.nodeOf(c.id)).speedFactor;
        for (const auto& op : c.operations) {
            entryIndex[{c.id, op.id}] = static_cast<int>(lqn.entries.size());
            lqn.entries.push_back({c.id, op.id, taskIndex.at(c.id), op.serviceDemand / speed});
        }
    }

    // The reference task issues the scenario's message sequence directly:
    // mean calls equal message repetitions, so entry visits stay coherent
    // with the invocation counts the reliability model uses. Calls to a
    // replicated service split evenly across the serving group.
    std::map<std::tuple<int, int, int>, double> aggregated;  // (scenario, caller, callee)
    for (size_t si = 0; si < m.scenarios.size(); ++si) {
        const Scenario& s = m.scenarios[si];
        lqn.referenceTasks.push_back({s.id, s.workload});
        for (const auto& msg : s.messages) {
            auto group = m.servingGroup(msg.callee, msg.operation);
            const double share = static_cast<double>(msg.repetitions) / group.size();
            for (const Component* member : group)
                aggregated[{static_cast<int>(si), kReferenceCaller,
                            entryIndex.at({member->id, msg.operation})}] += share;
        }
    }
    for (const auto& [key, mean] : aggregated)
        lqn.calls.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), mean});
    return lqn;
}

namespace detail {

// Per-scenario visit counts via topological propagation; throws on cycles.
inline std::vector<std::vector<double>> visitCounts(const LqnModel& lqn) {
    const size_t nScen = lqn.referenceTasks.size();
    const size_t nEntries = lqn.entries.size();
    std::vector<std::vector<double>> visits(nScen, std::vector<double>(nEntries, 0.0));
    for (size_t si = 0; si < nScen; ++si) {
        std::vector<std::vector<std::pair<int, double>>> out(nEntries);
        std::vector<int> indegree(nEntries, 0);
        for (const auto& call : lqn.calls) {
            if (call.scenario != static_cast<int>(si)) continue;
            if (call.caller == kReferenceCaller) {
                visits[si][call.callee] += call.meanCalls;
            } else {
                out[call.caller].emplace_back(call.callee, call.meanCalls);
                ++indegree[call.callee];
            }
        }
        std::vector<int> ready;
        for (size_t e = 0; e < nEntries; ++e)
            if (indegree[e] == 0) ready.push_back(static_cast<int>(e));
        size_t processed = 0;
        while (!ready.empty()) {
            const int e = ready.back();
            ready.pop_back();
            ++processed;
            for (const auto& [callee, mean] : out[e]) {
                visits[si][callee] += visits[si][e] * mean;
                if (--indegree[callee] == 0) ready.push_back(callee);
            }
        }
        if (processed != nEntries)
            throw LqnStructureError("cyclic call graph in scenario " +
                                    lqn.referenceTasks[si].scenario);
    }
    return visits;
}

// Sakasegawa's M/M/m waiting-time approximation, exact for m=1.
inline double multiServerWait(double meanService, double rho, int m) {
    if (rho <= 0.0 || meanService <= 0.0) return 0.0;
    const double exponent = std::sqrt(2.0 * (m + 1)) - 1.0;
    return meanService * std::pow(rho, exponent) / (m * (1.0 - rho));
}

}  // namespace detail

inline PerformanceIndices solve(const LqnModel& lqn, double tol = 1e-6, int maxIter = 1000) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve: tol must be > 0");
    if (maxIter < 1) throw std::invalid_argument("solve: maxIter must be >= 1");

    const size_t nScen = lqn.referenceTasks.size();
    const size_t nEntries = lqn.entries.size();
    const size_t nProcs = lqn.processors.size();
    const auto visits = detail::visitCounts(lqn);

    PerformanceIndices result;

    // per-scenario demand placed on each processor, one full scenario walk
    std::vector<std::vector<double>> demand(nScen, std::vector<double>(nProcs, 0.0));
    for (size_t si = 0; si < nScen; ++si)
        for (size_t e = 0; e < nEntries; ++e)
            demand[si][lqn.processorOf(static_cast<int>(e))] +=
                visits[si][e] * lqn.entries[e].demand;

    std::vector<double> openUtil(nProcs, 0.0);  // per-server, unclamped
    for (size_t si = 0; si < nScen; ++si)
        if (const auto* open = std::get_if<OpenWorkload>(&lqn.referenceTasks[si].workload))
            for (size_t p = 0; p < nProcs; ++p)
                openUtil[p] += open->arrivalRate * demand[si][p] / lqn.processors[p].multiplicity;

    // closed chains: multiclass Schweitzer with open-workload inflation
    std::vector<size_t> closedIdx;
    for (size_t si = 0; si < nScen; ++si)
        if (std::holds_alternative<ClosedWorkload>(lqn.referenceTasks[si].workload))
            closedIdx.push_back(si);
    std::vector<double> closedX(nScen, 0.0);
    std::vector<std::vector<double>> closedR(nScen, std::vector<double>(nProcs, 0.0));
    if (!closedIdx.empty()) {
        std::vector<std::vector<double>> queue(nScen, std::vector<double>(nProcs, 0.0));
        for (size_t si : closedIdx) {
            const auto& wl = std::get<ClosedWorkload>(lqn.referenceTasks[si].workload);
            double total = 0.0;
            for (size_t p = 0; p < nProcs; ++p) total += demand[si][p];
            for (size_t p = 0; p < nProcs; ++p)
                queue[si][p] = total > 0.0 ? wl.population * demand[si][p] / total : 0.0;
        }
        bool stable = false;
        for (int iter = 0; iter < maxIter && !stable; ++iter) {
            double maxChange = 0.0;
            for (size_t si : closedIdx) {
                const auto& wl = std::get<ClosedWorkload>(lqn.referenceTasks[si].workload);
                const double n = wl.population;
                double cycle = 0.0;
                for (size_t p = 0; p < nProcs; ++p) {
                    double others = 0.0;
                    for (size_t sj : closedIdx)
                        if (sj != si) others += queue[sj][p];
                    const double anticipated = (n - 1.0) / n * queue[si][p] + others;
                    const double inflated =
                        demand[si][p] / std::max(1.0 - openUtil[p], 1e-3);
                    closedR[si][p] =
                        inflated * (1.0 + anticipated / lqn.processors[p].multiplicity);
                    cycle += closedR[si][p];
                }
                closedX[si] = n / (wl.thinkTime + cycle);
                for (size_t p = 0; p < nProcs; ++p) {
                    const double q = closedX[si] * closedR[si][p];
                    maxChange = std::max(maxChange,
                                         std::abs(q - queue[si][p]) /
                                             std::max(std::abs(queue[si][p]), 1e-12));
                    queue[si][p] = q;
                }
            }
            stable = maxChange < tol;
            if (iter == maxIter - 1 && !stable) result.converged = false;
        }
    }

    // total per-server utilization and queueing delays
    std::vector<double> util(nProcs, 0.0);
    for (size_t p = 0; p < nProcs; ++p) {
        util[p] = openUtil[p];
        for (size_t si : closedIdx)
            util[p] += closedX[si] * demand[si][p] / lqn.processors[p].multiplicity;
        if (util[p] >= 1.0) result.saturated = true;
    }

    std::vector<double> entryX(nEntries, 0.0);
    for (size_t si = 0; si < nScen; ++si) {
        double rate = 0.0;
        if (const auto* open = std::get_if<OpenWorkload>(&lqn.referenceTasks[si].workload))
            rate = open->arrivalRate;
        else
            rate = closedX[si];
        for (size_t e = 0; e < nEntries; ++e) entryX[e] += rate * visits[si][e];
    }

    std::vector<double> wait(nProcs, 0.0);
    for (size_t p = 0; p < nProcs; ++p) {
        double flow = 0.0, work = 0.0;
        for (size_t e = 0; e < nEntries; ++e)
            if (lqn.processorOf(static_cast<int>(e)) == static_cast<int>(p)) {
                flow += entryX[e];
                work += entryX[e] * lqn.entries[e].demand;
            }
        if (flow <= 0.0) continue;
        const double meanService = work / flow;
        const double rho = std::min(util[p], 0.999);  // finite sentinel when saturated
        wait[p] = detail::multiServerWait(meanService, rho, lqn.processors[p].multiplicity);
    }

    // residence propagation up the call graph (reverse topological order via
    // memoized recursion on the per-scenario DAG)
    for (size_t si = 0; si < nScen; ++si) {
        std::vector<std::vector<std::pair<int, double>>> out(nEntries);
        std::vector<std::pair<int, double>> refCalls;
        for (const auto& call : lqn.calls) {
            if (call.scenario != static_cast<int>(si)) continue;
            if (call.caller == kReferenceCaller)
                refCalls.emplace_back(call.callee, call.meanCalls);
            else
                out[call.caller].emplace_back(call.callee, call.meanCalls);
        }
        std::vector<double> residence(nEntries, -1.0);
        auto entryResidence = [&](auto&& self, int e) -> double {
            if (residence[e] >= 0.0) return residence[e];
            double r = lqn.entries[e].demand + wait[lqn.processorOf(e)];
            for (const auto& [callee, mean] : out[e]) r += mean * self(self, callee);
            residence[e] = r;
            return r;
        };
        double response = 0.0;
        for (const auto& [callee, mean] : refCalls)
            response += mean * entryResidence(entryResidence, callee);

        const auto& ref = lqn.referenceTasks[si];
        if (const auto* open = std::get_if<OpenWorkload>(&ref.workload)) {
            result.scenarioResponseTime[ref.scenario] = response;
            // bottleneck-limited flow when saturated
            double worst = 0.0;
            for (size_t p = 0; p < nProcs; ++p)
                if (demand[si][p] > 0.0) worst = std::max(worst, util[p]);
            result.scenarioThroughput[ref.scenario] =
                worst >= 1.0 ? open->arrivalRate / worst : open->arrivalRate;
        } else {
            double cycle = 0.0;
            for (size_t p = 0; p < nProcs; ++p) cycle += closedR[si][p];
            result.scenarioResponseTime[ref.scenario] = cycle;
            result.scenarioThroughput[ref.scenario] = closedX[si];
        }
    }

    for (size_t p = 0; p < nProcs; ++p)
        result.nodeUtilization[lqn.processors[p].node] = std::min(util[p], 1.0);
    return result;
}

inline PerformanceIndices solveModel(const ArchModel& m, double tol = 1e-6,
                                     int maxIter = 1000) {
    return solve(toLqn(m), tol, maxIter);
}

// Line-oriented listing for manual inspection.
inline std::string dumpLqn(const LqnModel& lqn) {
    std::string out;
    for (const auto& p : lqn.processors)
        out += "processor " + p.node + " multiplicity=" + std::to_string(p.multiplicity) +
               " speed=" + std::to_string(p.speedFactor) + "\n";
    for (const auto& t : lqn.tasks)
        out += "task " + t.component + " on " + lqn.processors[t.processor].node + "\n";
    for (const auto& e : lqn.entries)
        out += "entry " + e.component + "/" + e.operation + " demand=" +
               std::to_string(e.demand) + "\n";
    for (const auto& r : lqn.referenceTasks) out += "reference " + r.scenario + "\n";
    for (const auto& c : lqn.calls) {
        const std::string caller =
            c.caller == kReferenceCaller
                ? "ref[" + lqn.referenceTasks[c.scenario].scenario + "]"
                : lqn.entries[c.caller].component + "/" + lqn.entries[c.caller].operation;
        out += "call " + caller + " -> " + lqn.entries[c.callee].component + "/" +
               lqn.entries[c.callee].operation + " x" + std::to_string(c.meanCalls) + "\n";
    }
    return out;
}

}  // namespace refopt
