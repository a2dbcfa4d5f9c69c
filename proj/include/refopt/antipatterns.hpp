// Fuzzy detection of the six performance antipatterns over a model and its
// solved performance indices. Each detector combines per-target literals by
// fuzzy AND (minimum); a literal's bounds are the min/max of its value
// across the whole system, so detection is relative to the model itself.
// A literal whose bounds coincide does not discriminate and is skipped;
// targets where every literal is degenerate are never reported, which keeps
// fully symmetric systems antipattern-free.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <refopt/lqn.hpp>
#include <refopt/model.hpp>

namespace refopt {

enum class AntipatternKind {
    PipeAndFilter,
    Blob,
    ConcurrentProcessingSystem,
    ExtensiveProcessing,
    EmptySemiTruck,
    TowerOfBabel,
};

inline const char* toString(AntipatternKind k) {
    switch (k) {
        case AntipatternKind::PipeAndFilter: return "PipeAndFilter";
        case AntipatternKind::Blob: return "Blob";
        case AntipatternKind::ConcurrentProcessingSystem: return "ConcurrentProcessingSystem";
        case AntipatternKind::ExtensiveProcessing: return "ExtensiveProcessing";
        case AntipatternKind::EmptySemiTruck: return "EmptySemiTruck";
        case AntipatternKind::TowerOfBabel: return "TowerOfBabel";
    }
    return "?";
}

struct LiteralRecord {
    double value = 0.0;
    double lb = 0.0;
    double ub = 0.0;
};

struct AntipatternOccurrence {
    AntipatternKind kind{};
    std::string target;  // element id, or "a|b" for pair targets
    double probability = 0.0;
    std::map<std::string, LiteralRecord> literals;
};

// 1 - (UB - literal)/(UB - LB), clamped to [0,1]; a degenerate spread
// (UB == LB) maps to 1.
inline double fuzzyValue(double literal, double lb, double ub) {
    if (lb > ub) throw std::invalid_argument("fuzzyValue: LB > UB");
    if (lb == ub) return 1.0;
    return std::clamp(1.0 - (ub - literal) / (ub - lb), 0.0, 1.0);
}

namespace detail {

struct LiteralColumn {
    std::string name;
    std::vector<double> values;  // one per target
};

// min/max bounds per literal, fuzzy-AND across non-degenerate literals,
// threshold at the configured fuzziness
inline void reportDetector(AntipatternKind kind, const std::vector<std::string>& targets,
                           const std::vector<LiteralColumn>& columns, double fuzziness,
                           std::vector<AntipatternOccurrence>& out) {
    if (targets.empty()) return;
    std::vector<std::pair<double, double>> bounds;
    for (const auto& col : columns) {
        double lo = col.values[0], hi = col.values[0];
        for (double v : col.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        bounds.emplace_back(lo, hi);
    }
    for (size_t t = 0; t < targets.size(); ++t) {
        double combined = 1.0;
        int discriminating = 0;
        for (size_t l = 0; l < columns.size(); ++l) {
            const auto& [lo, hi] = bounds[l];
            if (lo == hi) continue;  // non-discriminating literal
            ++discriminating;
            combined = std::min(combined, fuzzyValue(columns[l].values[t], lo, hi));
        }
        if (discriminating == 0 || combined < fuzziness) continue;
        AntipatternOccurrence occ;
        occ.kind = kind;
        occ.target = targets[t];
        occ.probability = combined;
        for (size_t l = 0; l < columns.size(); ++l)
            occ.literals[columns[l].name] = {columns[l].values[t], bounds[l].first,
                                             bounds[l].second};
        out.push_back(std::move(occ));
    }
}

inline double effectiveDemand(const ArchModel& m, const std::string& comp,
                              const std::string& op) {
    return m.component(comp).findOperation(op)->serviceDemand /
           m.node(m.nodeOf(comp)).speedFactor;
}

}  // namespace detail

inline std::vector<AntipatternOccurrence> detect(const ArchModel& m,
                                                 const PerformanceIndices& indices,
                                                 double fuzziness) {
    if (!(fuzziness > 0.0) || fuzziness > 1.0)
        throw std::invalid_argument("detect: fuzziness must be in (0,1]");

    std::vector<AntipatternOccurrence> out;

    // --- Blob: a component doing most of the work and most of the talking
    {
        std::vector<std::string> targets;
        detail::LiteralColumn msgCount{"messageCount", {}};
        detail::LiteralColumn nodeUtil{"nodeUtilization", {}};
        detail::LiteralColumn demandShare{"demandShare", {}};
        double totalDemand = 0.0;
        for (const auto& c : m.components)
            for (const auto& op : c.operations) totalDemand += op.serviceDemand;
        for (const auto& c : m.components) {
            targets.push_back(c.id);
            double count = 0.0;
            for (const auto& s : m.scenarios)
                for (const auto& msg : s.messages)
                    if (msg.caller == c.id || msg.callee == c.id) count += msg.repetitions;
            msgCount.values.push_back(count);
            nodeUtil.values.push_back(indices.nodeUtilization.at(m.nodeOf(c.id)));
            double own = 0.0;
            for (const auto& op : c.operations) own += op.serviceDemand;
            demandShare.values.push_back(totalDemand > 0.0 ? own / totalDemand : 0.0);
        }
        detail::reportDetector(AntipatternKind::Blob, targets,
                               {msgCount, nodeUtil, demandShare}, fuzziness, out);
    }

    // --- Concurrent Processing System: processing piles onto one node of a pair
    {
        std::vector<std::string> targets;
        detail::LiteralColumn maxUtil{"maxUtilization", {}};
        detail::LiteralColumn imbalance{"utilizationImbalance", {}};
        for (size_t i = 0; i < m.nodes.size(); ++i)
            for (size_t j = i + 1; j < m.nodes.size(); ++j) {
                const double ui = indices.nodeUtilization.at(m.nodes[i].id);
                const double uj = indices.nodeUtilization.at(m.nodes[j].id);
                targets.push_back(m.nodes[i].id + "|" + m.nodes[j].id);
                maxUtil.values.push_back(std::max(ui, uj));
                imbalance.values.push_back(std::abs(ui - uj));
            }
        detail::reportDetector(AntipatternKind::ConcurrentProcessingSystem, targets,
                               {maxUtil, imbalance}, fuzziness, out);
    }

    // --- Pipe and Filter: one slow stage dominates a scenario chain
    {
        std::vector<std::string> targets;
        detail::LiteralColumn chainShare{"chainDemandShare", {}};
        detail::LiteralColumn ownerUtil{"ownerNodeUtilization", {}};
        for (const auto& c : m.components)
            for (const auto& op : c.operations) {
                targets.push_back(c.id + "/" + op.id);
                double share = 0.0;
                for (const auto& s : m.scenarios) {
                    double total = 0.0, own = 0.0;
                    for (const auto& msg : s.messages) {
                        const double d =
                            detail::effectiveDemand(m, msg.callee, msg.operation) *
                            msg.repetitions;
                        total += d;
                        if (msg.callee == c.id && msg.operation == op.id) own += d;
                    }
                    if (total > 0.0) share = std::max(share, own / total);
                }
                chainShare.values.push_back(share);
                ownerUtil.values.push_back(indices.nodeUtilization.at(m.nodeOf(c.id)));
            }
        detail::reportDetector(AntipatternKind::PipeAndFilter, targets,
                               {chainShare, ownerUtil}, fuzziness, out);
    }

    // --- Extensive Processing: heavyweight operations dragging response time
    {
        std::vector<std::string> targets;
        detail::LiteralColumn maxDemand{"maxOperationDemand", {}};
        detail::LiteralColumn responseShare{"responseTimeShare", {}};
        for (const auto& c : m.components) {
            targets.push_back(c.id);
            double heaviest = 0.0;
            for (const auto& op : c.operations)
                heaviest = std::max(heaviest, op.serviceDemand);
            maxDemand.values.push_back(heaviest);
            double share = 0.0;
            for (const auto& s : m.scenarios) {
                double own = 0.0;
                for (const auto& msg : s.messages)
                    if (msg.callee == c.id)
                        own += detail::effectiveDemand(m, msg.callee, msg.operation) *
                               msg.repetitions;
                const double rt = indices.scenarioResponseTime.at(s.id);
                if (rt > 0.0) share = std::max(share, own / rt);
            }
            responseShare.values.push_back(share);
        }
        detail::reportDetector(AntipatternKind::ExtensiveProcessing, targets,
                               {maxDemand, responseShare}, fuzziness, out);
    }

    // --- pair-based detectors over components that exchange messages
    {
        std::map<std::pair<std::string, std::string>,
                 std::vector<const Message*>>
            exchanged;
        for (const auto& s : m.scenarios)
            for (const auto& msg : s.messages) {
                if (isActor(msg.caller)) continue;
                auto key = std::minmax(msg.caller, msg.callee);
                exchanged[key].push_back(&msg);
            }

        std::vector<std::string> targets;
        detail::LiteralColumn pairMsgs{"messageCount", {}};
        detail::LiteralColumn invMeanSize{"inverseMeanMessageSize", {}};
        detail::LiteralColumn traffic{"traffic", {}};
        detail::LiteralColumn sizeClasses{"messageSizeClasses", {}};
        for (const auto& [key, msgs] : exchanged) {
            targets.push_back(key.first + "|" + key.second);
            double reps = 0.0, units = 0.0;
            std::set<double> classes;
            for (const Message* msg : msgs) {
                reps += msg->repetitions;
                units += msg->size * msg->repetitions;
                classes.insert(msg->size);
            }
            pairMsgs.values.push_back(reps);
            invMeanSize.values.push_back(1.0 / (units / reps + 1e-9));
            traffic.values.push_back(units);
            sizeClasses.values.push_back(static_cast<double>(classes.size()));
        }
        detail::reportDetector(AntipatternKind::EmptySemiTruck, targets,
                               {pairMsgs, invMeanSize}, fuzziness, out);
        detail::reportDetector(AntipatternKind::TowerOfBabel, targets,
                               {traffic, sizeClasses}, fuzziness, out);
    }

    return out;
}

// Fuzzy-weighted antipattern count: the sum of occurrence probabilities.
// countOccurrences switches to a plain integer count.
inline double pasObjective(const std::vector<AntipatternOccurrence>& occurrences,
                           bool countOccurrences = false) {
    if (countOccurrences) return static_cast<double>(occurrences.size());
    double sum = 0.0;
    for (const auto& occ : occurrences) sum += occ.probability;
    return sum;
}

}  // namespace refopt
