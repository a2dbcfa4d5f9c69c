// NSGA-II over refactoring-sequence genotypes: fast non-dominated sorting,
// crowding distance, binary tournament, single-point crossover with
// feasibility repair, and simple mutation. One run owns its rng; a seeded
// run is bit-reproducible.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <refopt/objectives.hpp>
#include <refopt/refactoring.hpp>

namespace refopt {

struct Individual {
    RefactoringSequence genotype;
    ObjectiveVector objectives;
    int rank = 0;
    double crowding = 0.0;
};

struct GaConfig {
    int populationSize = 16;
    int maxEvolutions = 72;  // generations; each one evaluates populationSize offspring
    double pCrossover = 0.8;
    double pMutation = 0.2;
    int sequenceLength = 4;
    int independentRuns = 3;
    uint64_t seed = 1;
};

struct Problem {
    ArchModel model;
    PerformanceIndices baseIndices;
    EvalConfig eval;
};

struct ParetoFront {
    std::vector<Individual> individuals;  // mutually non-dominated
};

struct GaRunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- non-dominated sorting and crowding ----------------------------------------

inline std::vector<std::vector<size_t>> nonDominatedSort(std::vector<Individual>& pop) {
    const size_t n = pop.size();
    std::vector<std::array<double, 4>> canon(n);
    for (size_t i = 0; i < n; ++i) canon[i] = pop[i].objectives.canonical();

    std::vector<int> dominatedBy(n, 0);
    std::vector<std::vector<size_t>> dominatesList(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            if (dominates(canon[i], canon[j])) {
                dominatesList[i].push_back(j);
                ++dominatedBy[j];
            } else if (dominates(canon[j], canon[i])) {
                dominatesList[j].push_back(i);
                ++dominatedBy[i];
            }
        }

    std::vector<std::vector<size_t>> fronts;
    std::vector<size_t> current;
    for (size_t i = 0; i < n; ++i)
        if (dominatedBy[i] == 0) current.push_back(i);
    int rank = 0;
    while (!current.empty()) {
        for (size_t i : current) pop[i].rank = rank;
        fronts.push_back(current);
        std::vector<size_t> next;
        for (size_t i : current)
            for (size_t j : dominatesList[i])
                if (--dominatedBy[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        current = std::move(next);
        ++rank;
    }
    return fronts;
}

inline void assignCrowding(std::vector<Individual>& pop, const std::vector<size_t>& front) {
    const double inf = std::numeric_limits<double>::infinity();
    if (front.size() <= 2) {
        for (size_t i : front) pop[i].crowding = inf;
        return;
    }
    for (size_t i : front) pop[i].crowding = 0.0;
    for (size_t k = 0; k < 4; ++k) {
        std::vector<size_t> order(front);
        std::stable_sort(order.begin(), order.end(), [&pop, k](size_t a, size_t b) {
            return pop[a].objectives.canonical()[k] < pop[b].objectives.canonical()[k];
        });
        const double lo = pop[order.front()].objectives.canonical()[k];
        const double hi = pop[order.back()].objectives.canonical()[k];
        pop[order.front()].crowding = inf;
        pop[order.back()].crowding = inf;
        if (hi <= lo) continue;  // zero range contributes nothing
        for (size_t idx = 1; idx + 1 < order.size(); ++idx) {
            if (std::isinf(pop[order[idx]].crowding)) continue;
            const double prev = pop[order[idx - 1]].objectives.canonical()[k];
            const double next = pop[order[idx + 1]].objectives.canonical()[k];
            pop[order[idx]].crowding += (next - prev) / (hi - lo);
        }
    }
}

// Binary tournament on (rank, crowding); a tie keeps the first pick.
inline size_t tournamentSelect(const std::vector<Individual>& pop, std::mt19937_64& rng) {
    std::uniform_int_distribution<size_t> pick(0, pop.size() - 1);
    const size_t a = pick(rng);
    const size_t b = pick(rng);
    if (pop[b].rank < pop[a].rank) return b;
    if (pop[b].rank == pop[a].rank && pop[b].crowding > pop[a].crowding) return b;
    return a;
}

// --- variation operators ---------------------------------------------------------

// Walks the sequence action by action; every position whose action cannot
// apply is replaced by a freshly drawn one (up to the budget per position).
inline std::optional<RefactoringSequence> repairSequence(std::vector<RefactoringAction> actions,
                                                         const ArchModel& model,
                                                         std::mt19937_64& rng,
                                                         int retryBudget = kRetryBudget) {
    ArchModel state = model;
    for (size_t i = 0; i < actions.size(); ++i) {
        const int pos = static_cast<int>(i) + 1;
        bool placed = false;
        try {
            state = applyPlan(planAction(actions[i], state, pos), state);
            placed = true;
        } catch (const RefactoringError&) {
        }
        for (int attempt = 0; attempt < retryBudget && !placed; ++attempt) {
            auto candidate = randomAction(state, rng);
            if (!candidate) break;
            try {
                state = applyPlan(planAction(*candidate, state, pos), state);
                actions[i] = std::move(*candidate);
                placed = true;
            } catch (const RefactoringError&) {
            }
        }
        if (!placed) return std::nullopt;
    }
    return makeSequence(std::move(actions), model);
}

// Tails swapped at a uniform cut in 1..L-1; infeasible offspring repaired
// gene-wise, exhaustion falls back to the parent.
inline std::pair<RefactoringSequence, RefactoringSequence> singlePointCrossover(
    const RefactoringSequence& a, const RefactoringSequence& b, const ArchModel& model,
    std::mt19937_64& rng, int retryBudget = kRetryBudget) {
    if (a.size() != b.size()) throw std::invalid_argument("crossover: unequal lengths");
    const size_t length = a.size();
    if (length < 2) return {a, b};
    const size_t cut = std::uniform_int_distribution<size_t>(1, length - 1)(rng);

    auto splice = [cut](const RefactoringSequence& head, const RefactoringSequence& tail) {
        std::vector<RefactoringAction> genes(head.actions.begin(), head.actions.begin() + cut);
        genes.insert(genes.end(), tail.actions.begin() + cut, tail.actions.end());
        return genes;
    };
    auto childA = repairSequence(splice(a, b), model, rng, retryBudget);
    auto childB = repairSequence(splice(b, a), model, rng, retryBudget);
    return {childA ? std::move(*childA) : a, childB ? std::move(*childB) : b};
}

// With probability pMutation replaces one uniformly chosen position by a
// fresh feasible action (the suffix must stay feasible); exhaustion keeps
// the sequence unchanged.
inline RefactoringSequence simpleMutation(const RefactoringSequence& s, const ArchModel& model,
                                          std::mt19937_64& rng, double pMutation,
                                          int retryBudget = kRetryBudget) {
    if (s.actions.empty()) return s;
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= pMutation) return s;
    const size_t pos =
        std::uniform_int_distribution<size_t>(0, s.actions.size() - 1)(rng);

    ArchModel state = model;
    for (size_t i = 0; i < pos; ++i)
        state = apply(s.actions[i], state, static_cast<int>(i) + 1);

    for (int attempt = 0; attempt < retryBudget; ++attempt) {
        auto candidate = randomAction(state, rng);
        if (!candidate) break;
        std::vector<RefactoringAction> genes = s.actions;
        genes[pos] = *candidate;
        // the replacement must leave the tail applicable
        try {
            ArchModel walk = state;
            for (size_t i = pos; i < genes.size(); ++i)
                walk = apply(genes[i], walk, static_cast<int>(i) + 1);
            return makeSequence(std::move(genes), model);
        } catch (const RefactoringError&) {
        }
    }
    return s;
}

// --- the evolutionary loop -------------------------------------------------------

// One line per generation: generation, rank-0 size, best value per objective.
inline std::string progressLine(int generation, const std::vector<Individual>& pop) {
    double bestPerfQ = -std::numeric_limits<double>::infinity();
    double bestReliability = 0.0, bestPas = std::numeric_limits<double>::infinity(),
           bestChanges = std::numeric_limits<double>::infinity();
    size_t front0 = 0;
    for (const auto& ind : pop) {
        if (ind.rank != 0) continue;
        ++front0;
        bestPerfQ = std::max(bestPerfQ, ind.objectives.perfQ);
        bestReliability = std::max(bestReliability, ind.objectives.reliability);
        bestPas = std::min(bestPas, ind.objectives.pas);
        bestChanges = std::min(bestChanges, ind.objectives.changes);
    }
    std::ostringstream out;
    out << "generation=" << generation << " front=" << front0 << " best_perfq=" << bestPerfQ
        << " best_reliability=" << bestReliability << " best_pas=" << bestPas
        << " best_changes=" << bestChanges;
    return out.str();
}

using GenerationObserver = std::function<void(int generation, const std::vector<Individual>&)>;

inline constexpr int kEvaluationRetries = 25;

// Classic generational NSGA-II. Offspring failing evaluation (solver
// non-convergence) are redrawn once and then fall back to a parent copy,
// so a generation never exceeds 2x populationSize evaluations.
inline ParetoFront run(const Problem& problem, const GaConfig& cfg, std::mt19937_64& rng,
                       const GenerationObserver& observer = {}) {
    if (cfg.populationSize < 2 || cfg.maxEvolutions < 1 || cfg.sequenceLength < 1)
        throw std::invalid_argument("run: invalid GA configuration");

    auto freshIndividual = [&]() {
        for (int attempt = 0; attempt < kEvaluationRetries; ++attempt) {
            RefactoringSequence seq =
                randomSequence(problem.model, rng, cfg.sequenceLength);
            try {
                return Individual{seq,
                                  evaluate(seq, problem.model, problem.baseIndices,
                                           problem.eval),
                                  0, 0.0};
            } catch (const EvaluationError&) {
            }
        }
        throw GaRunError("run: could not evaluate a fresh individual after " +
                         std::to_string(kEvaluationRetries) + " attempts");
    };

    std::vector<Individual> pop;
    pop.reserve(cfg.populationSize);
    for (int i = 0; i < cfg.populationSize; ++i) pop.push_back(freshIndividual());
    for (const auto& front : nonDominatedSort(pop)) assignCrowding(pop, front);

    for (int gen = 1; gen <= cfg.maxEvolutions; ++gen) {
        std::vector<Individual> offspring;
        offspring.reserve(cfg.populationSize);
        while (static_cast<int>(offspring.size()) < cfg.populationSize) {
            const size_t ia = tournamentSelect(pop, rng);
            const size_t ib = tournamentSelect(pop, rng);
            RefactoringSequence childA = pop[ia].genotype;
            RefactoringSequence childB = pop[ib].genotype;
            if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.pCrossover)
                std::tie(childA, childB) =
                    singlePointCrossover(childA, childB, problem.model, rng);
            childA = simpleMutation(childA, problem.model, rng, cfg.pMutation);
            childB = simpleMutation(childB, problem.model, rng, cfg.pMutation);

            for (const auto* pair : {&childA, &childB}) {
                if (static_cast<int>(offspring.size()) >= cfg.populationSize) break;
                const size_t parent = pair == &childA ? ia : ib;
                try {
                    offspring.push_back({*pair,
                                         evaluate(*pair, problem.model, problem.baseIndices,
                                                  problem.eval),
                                         0, 0.0});
                } catch (const EvaluationError&) {
                    // failed evaluation burns budget: one redraw, then the parent
                    try {
                        offspring.push_back(freshIndividual());
                    } catch (const GaRunError&) {
                        offspring.push_back(pop[parent]);
                    }
                }
            }
        }

        std::vector<Individual> combined = std::move(pop);
        combined.insert(combined.end(), offspring.begin(), offspring.end());
        const auto fronts = nonDominatedSort(combined);
        for (const auto& front : fronts) assignCrowding(combined, front);

        pop.clear();
        pop.reserve(cfg.populationSize);
        for (const auto& front : fronts) {
            if (static_cast<int>(pop.size()) >= cfg.populationSize) break;
            std::vector<size_t> order(front);
            // boundary front: crowded-first, ties kept in insertion order
            std::stable_sort(order.begin(), order.end(), [&combined](size_t a, size_t b) {
                return combined[a].crowding > combined[b].crowding;
            });
            for (size_t idx : order) {
                if (static_cast<int>(pop.size()) >= cfg.populationSize) break;
                pop.push_back(combined[idx]);
            }
        }
        for (const auto& front : nonDominatedSort(pop)) assignCrowding(pop, front);
        if (observer) observer(gen, pop);
    }

    ParetoFront result;
    for (const auto& ind : pop) {
        if (ind.rank != 0) continue;
        bool duplicate = false;
        for (const auto& kept : result.individuals)
            if (kept.objectives == ind.objectives) duplicate = true;
        if (!duplicate) result.individuals.push_back(ind);
    }
    return result;
}

}  // namespace refopt
