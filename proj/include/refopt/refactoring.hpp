// The four refactoring actions (Clon, MO2N, MO2C, ReDe), their pre/post
// conditions, sequence feasibility by condition composition, and random
// sequence generation. Actions never mutate their input model; applying a
// sequence tags created elements with the action's position so that equal
// genotypes produce equal phenotypes.
#pragma once

#include <array>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <refopt/model.hpp>

namespace refopt {

enum class ActionKind { Clon, MO2N, MO2C, ReDe };

inline constexpr std::array<ActionKind, 4> kAllActionKinds = {
    ActionKind::Clon, ActionKind::MO2N, ActionKind::MO2C, ActionKind::ReDe};

inline const char* toString(ActionKind k) {
    switch (k) {
        case ActionKind::Clon: return "Clon";
        case ActionKind::MO2N: return "MO2N";
        case ActionKind::MO2C: return "MO2C";
        case ActionKind::ReDe: return "ReDe";
    }
    return "?";
}

inline std::optional<ActionKind> actionKindFromString(const std::string& s) {
    for (ActionKind k : kAllActionKinds)
        if (s == toString(k)) return k;
    return std::nullopt;
}

// Intrinsic per-action effort used by the architectural-distance objective.
inline double defaultBrf(ActionKind k) {
    switch (k) {
        case ActionKind::Clon: return 1.23;
        case ActionKind::MO2N: return 1.80;
        case ActionKind::MO2C: return 1.64;
        case ActionKind::ReDe: return 1.45;
    }
    return 1.0;
}

struct RefactoringAction {
    ActionKind kind{};
    std::string node;       // Clon: node to clone
    std::string component;  // MO2N/MO2C: operation owner; ReDe: component
    std::string operation;  // MO2N/MO2C: operation to move
    std::string dest;       // MO2C: destination component
    double brf = 1.0;

    bool operator==(const RefactoringAction&) const = default;
};

inline RefactoringAction clonAction(std::string node) {
    return {ActionKind::Clon, std::move(node), {}, {}, {}, defaultBrf(ActionKind::Clon)};
}
inline RefactoringAction mo2nAction(std::string component, std::string operation) {
    return {ActionKind::MO2N, {}, std::move(component), std::move(operation), {},
            defaultBrf(ActionKind::MO2N)};
}
inline RefactoringAction mo2cAction(std::string component, std::string operation,
                                    std::string dest) {
    return {ActionKind::MO2C, {},        std::move(component), std::move(operation),
            std::move(dest),  defaultBrf(ActionKind::MO2C)};
}
inline RefactoringAction redeAction(std::string component) {
    return {ActionKind::ReDe, {}, std::move(component), {}, {}, defaultBrf(ActionKind::ReDe)};
}

// Element a refactoring acts on, for architectural-weight lookup.
inline ElementRef targetElement(const RefactoringAction& a) {
    switch (a.kind) {
        case ActionKind::Clon: return ElementRef::forNode(a.node);
        case ActionKind::MO2N:
        case ActionKind::MO2C: return ElementRef::forOperation(a.component, a.operation);
        case ActionKind::ReDe: return ElementRef::forComponent(a.component);
    }
    throw std::logic_error("bad action kind");
}

// --- conditions ---------------------------------------------------------------

struct RefactoringError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnresolvableTargetError : RefactoringError {
    using RefactoringError::RefactoringError;
};
struct PreconditionError : RefactoringError {
    using RefactoringError::RefactoringError;
};
struct InfeasibleSequenceError : RefactoringError {
    using RefactoringError::RefactoringError;
};
struct ExhaustionError : RefactoringError {
    using RefactoringError::RefactoringError;
};

enum class PredicateKind { Exists, DeployedOn, Owns, Connected };

// Atomic structural predicate. Exists atoms carry a typed id ("node:n",
// "comp:c", "op:c/o") so ids of different kinds never alias.
struct Predicate {
    PredicateKind kind{};
    std::string a;
    std::string b;
    bool negated = false;

    bool operator==(const Predicate&) const = default;

    static Predicate existsNode(std::string n) {
        return {PredicateKind::Exists, "node:" + std::move(n), {}, false};
    }
    static Predicate existsComponent(std::string c) {
        return {PredicateKind::Exists, "comp:" + std::move(c), {}, false};
    }
    static Predicate existsOperation(const std::string& c, const std::string& o) {
        return {PredicateKind::Exists, "op:" + c + "/" + o, {}, false};
    }
    static Predicate deployedOn(std::string c, std::string n) {
        return {PredicateKind::DeployedOn, std::move(c), std::move(n), false};
    }
    static Predicate owns(std::string c, std::string o) {
        return {PredicateKind::Owns, std::move(c), std::move(o), false};
    }
    static Predicate connected(const std::string& n1, const std::string& n2) {
        auto [lo, hi] = std::minmax(n1, n2);
        return {PredicateKind::Connected, lo, hi, false};
    }

    Predicate negate() const {
        Predicate p = *this;
        p.negated = !p.negated;
        return p;
    }

    std::string key() const {
        return std::to_string(static_cast<int>(kind)) + "|" + a + "|" + b;
    }
};

struct Condition {
    std::vector<Predicate> predicates;

    bool operator==(const Condition&) const = default;

    const Predicate* find(const std::string& key) const {
        for (const auto& p : predicates)
            if (p.key() == key) return &p;
        return nullptr;
    }

    // Conjoins an atom; a positive/negative clash violates the condition
    // invariant and marks the sequence infeasible.
    void conjoin(const Predicate& p) {
        if (const Predicate* existing = find(p.key())) {
            if (existing->negated != p.negated)
                throw InfeasibleSequenceError("contradictory predicate: " + p.key());
            return;  // identical atom already present
        }
        predicates.push_back(p);
    }

    // Post-state accumulation: a later action's post replaces an earlier
    // atom with the same key (the model state after it wins).
    void supersede(const Predicate& p) {
        for (auto& existing : predicates)
            if (existing.key() == p.key()) {
                existing = p;
                return;
            }
        predicates.push_back(p);
    }
};

inline bool holds(const ArchModel& m, const Predicate& p) {
    bool value = false;
    switch (p.kind) {
        case PredicateKind::Exists: {
            if (p.a.rfind("node:", 0) == 0)
                value = m.findNode(p.a.substr(5)) != nullptr;
            else if (p.a.rfind("comp:", 0) == 0)
                value = m.findComponent(p.a.substr(5)) != nullptr;
            else if (p.a.rfind("op:", 0) == 0) {
                const std::string rest = p.a.substr(3);
                const size_t slash = rest.find('/');
                const Component* c =
                    slash == std::string::npos ? nullptr : m.findComponent(rest.substr(0, slash));
                value = c && c->findOperation(rest.substr(slash + 1));
            }
            break;
        }
        case PredicateKind::DeployedOn: {
            auto it = m.deployment.find(p.a);
            value = it != m.deployment.end() && it->second == p.b;
            break;
        }
        case PredicateKind::Owns: {
            const Component* c = m.findComponent(p.a);
            value = c && c->findOperation(p.b);
            break;
        }
        case PredicateKind::Connected:
            value = m.linkBetween(p.a, p.b) != nullptr;
            break;
    }
    return p.negated ? !value : value;
}

inline bool holds(const ArchModel& m, const Condition& c) {
    for (const auto& p : c.predicates)
        if (!holds(m, p)) return false;
    return true;
}

// --- pre/post conditions and application ---------------------------------------

inline Condition preCondition(const RefactoringAction& a, const ArchModel& m) {
    Condition pre;
    switch (a.kind) {
        case ActionKind::Clon: {
            if (!m.findNode(a.node))
                throw UnresolvableTargetError("Clon: unknown node " + a.node);
            pre.conjoin(Predicate::existsNode(a.node));
            break;
        }
        case ActionKind::MO2N: {
            const Component* c = m.findComponent(a.component);
            if (!c || !c->findOperation(a.operation))
                throw UnresolvableTargetError("MO2N: unknown operation " + a.component + "/" +
                                              a.operation);
            pre.conjoin(Predicate::existsOperation(a.component, a.operation));
            pre.conjoin(Predicate::owns(a.component, a.operation));
            break;
        }
        case ActionKind::MO2C: {
            const Component* c = m.findComponent(a.component);
            if (!c || !c->findOperation(a.operation))
                throw UnresolvableTargetError("MO2C: unknown operation " + a.component + "/" +
                                              a.operation);
            if (!m.findComponent(a.dest))
                throw UnresolvableTargetError("MO2C: unknown destination " + a.dest);
            pre.conjoin(Predicate::existsOperation(a.component, a.operation));
            pre.conjoin(Predicate::existsComponent(a.dest));
            pre.conjoin(Predicate::owns(a.dest, a.operation).negate());
            break;
        }
        case ActionKind::ReDe: {
            if (!m.findComponent(a.component))
                throw UnresolvableTargetError("ReDe: unknown component " + a.component);
            pre.conjoin(Predicate::existsComponent(a.component));
            break;
        }
    }
    return pre;
}

// Everything one application changes, with position-derived names for the
// created elements.
struct ActionPlan {
    std::vector<Node> newNodes;
    struct NewComponent {
        Component component;
        std::string deployOn;
    };
    std::vector<NewComponent> newComponents;
    std::vector<CommLink> newLinks;

    bool moveOperation = false;
    std::string fromComponent, operationId, toComponent;

    bool redeploy = false;
    std::string redeployComponent, fromNode, toNode;
};

namespace detail {

inline std::string freshId(const ArchModel& m, std::set<std::string>& taken, std::string id) {
    while (m.hasId(id) || taken.count(id)) id += "'";
    taken.insert(id);
    return id;
}

}  // namespace detail

inline ActionPlan planAction(const RefactoringAction& a, const ArchModel& m, int pos) {
    const Condition pre = preCondition(a, m);  // throws on unresolvable targets
    if (!holds(m, pre))
        throw PreconditionError(std::string(toString(a.kind)) + ": precondition violated");

    ActionPlan plan;
    std::set<std::string> taken;
    const std::string tag = std::to_string(pos);

    switch (a.kind) {
        case ActionKind::Clon: {
            const Node& orig = m.node(a.node);
            const std::string cloneId = detail::freshId(m, taken, a.node + "~clon" + tag);
            plan.newNodes.push_back({cloneId, orig.multiplicity, orig.speedFactor});
            for (const auto& l : m.links) {
                if (l.endpointA != a.node && l.endpointB != a.node) continue;
                const std::string& other = l.endpointA == a.node ? l.endpointB : l.endpointA;
                plan.newLinks.push_back({detail::freshId(m, taken, l.id + "~clon" + tag),
                                         cloneId, other, l.failureProb});
            }
            for (const auto& [compId, nodeId] : m.deployment) {
                if (nodeId != a.node) continue;
                Component clone = m.component(compId);
                clone.id = detail::freshId(m, taken, compId + "~clon" + tag);
                clone.replicaOf = m.replicaRoot(compId);
                plan.newComponents.push_back({std::move(clone), cloneId});
            }
            break;
        }
        case ActionKind::MO2N: {
            const std::string& oldNode = m.nodeOf(a.component);
            const Node& host = m.node(oldNode);
            const std::string base = a.operation + "~mo2n" + tag;
            const std::string newCompId = detail::freshId(m, taken, base);
            const std::string newNodeId = detail::freshId(m, taken, base + "n");
            plan.newNodes.push_back({newNodeId, host.multiplicity, host.speedFactor});
            Component svc;
            svc.id = newCompId;
            svc.failureProb = m.component(a.component).failureProb;
            plan.newComponents.push_back({std::move(svc), newNodeId});
            plan.moveOperation = true;
            plan.fromComponent = a.component;
            plan.operationId = a.operation;
            plan.toComponent = newCompId;
            // connect the new node to every caller-side node; a previously
            // co-located caller gets a fresh zero-failure link
            std::set<std::string> callerNodes;
            for (const auto& s : m.scenarios)
                for (const auto& msg : s.messages)
                    if (msg.callee == a.component && msg.operation == a.operation &&
                        !isActor(msg.caller))
                        callerNodes.insert(m.nodeOf(msg.caller));
            int li = 0;
            for (const auto& callerNode : callerNodes) {
                double psi = 0.0;
                if (const CommLink* l = m.linkBetween(callerNode, oldNode))
                    psi = l->failureProb;
                plan.newLinks.push_back(
                    {detail::freshId(m, taken, base + "l" + std::to_string(li++)), newNodeId,
                     callerNode, psi});
            }
            break;
        }
        case ActionKind::MO2C: {
            plan.moveOperation = true;
            plan.fromComponent = a.component;
            plan.operationId = a.operation;
            plan.toComponent = a.dest;
            break;
        }
        case ActionKind::ReDe: {
            const std::string& oldNode = m.nodeOf(a.component);
            const Node& host = m.node(oldNode);
            const std::string base = a.component + "~rede" + tag;
            const std::string newNodeId = detail::freshId(m, taken, base);
            plan.newNodes.push_back({newNodeId, host.multiplicity, host.speedFactor});
            int li = 0;
            for (const auto& l : m.links) {
                if (l.endpointA != oldNode && l.endpointB != oldNode) continue;
                const std::string& other = l.endpointA == oldNode ? l.endpointB : l.endpointA;
                plan.newLinks.push_back(
                    {detail::freshId(m, taken, base + "l" + std::to_string(li++)), newNodeId,
                     other, l.failureProb});
            }
            plan.redeploy = true;
            plan.redeployComponent = a.component;
            plan.fromNode = oldNode;
            plan.toNode = newNodeId;
            break;
        }
    }
    return plan;
}

inline ArchModel applyPlan(const ActionPlan& plan, const ArchModel& m) {
    ArchModel out = m;
    for (const auto& n : plan.newNodes) out.nodes.push_back(n);
    for (const auto& l : plan.newLinks) out.links.push_back(l);
    for (const auto& nc : plan.newComponents) {
        out.components.push_back(nc.component);
        out.deployment[nc.component.id] = nc.deployOn;
    }
    if (plan.moveOperation) {
        Component& from = out.mutableComponent(plan.fromComponent);
        auto it = std::find_if(from.operations.begin(), from.operations.end(),
                               [&plan](const Operation& op) { return op.id == plan.operationId; });
        Operation moved = *it;
        from.operations.erase(it);
        out.mutableComponent(plan.toComponent).operations.push_back(std::move(moved));
        for (auto& s : out.scenarios)
            for (auto& msg : s.messages)
                if (msg.callee == plan.fromComponent && msg.operation == plan.operationId)
                    msg.callee = plan.toComponent;
    }
    if (plan.redeploy) out.deployment[plan.redeployComponent] = plan.toNode;
    return out;
}

// Applies one action, returning a new model. `pos` is the action's position
// in its sequence and seeds the derived ids of created elements.
inline ArchModel apply(const RefactoringAction& a, const ArchModel& m, int pos = 1) {
    return applyPlan(planAction(a, m, pos), m);
}

namespace detail {

inline Condition renderPost(const ActionPlan& plan) {
    Condition post;
    for (const auto& n : plan.newNodes) post.supersede(Predicate::existsNode(n.id));
    for (const auto& l : plan.newLinks)
        post.supersede(Predicate::connected(l.endpointA, l.endpointB));
    for (const auto& nc : plan.newComponents) {
        post.supersede(Predicate::existsComponent(nc.component.id));
        post.supersede(Predicate::deployedOn(nc.component.id, nc.deployOn));
        for (const auto& op : nc.component.operations) {
            post.supersede(Predicate::owns(nc.component.id, op.id));
            post.supersede(Predicate::existsOperation(nc.component.id, op.id));
        }
    }
    if (plan.moveOperation) {
        post.supersede(Predicate::owns(plan.toComponent, plan.operationId));
        post.supersede(Predicate::existsOperation(plan.toComponent, plan.operationId));
        post.supersede(Predicate::owns(plan.fromComponent, plan.operationId).negate());
        post.supersede(Predicate::existsOperation(plan.fromComponent, plan.operationId).negate());
    }
    if (plan.redeploy) {
        post.supersede(Predicate::deployedOn(plan.redeployComponent, plan.toNode));
        post.supersede(Predicate::deployedOn(plan.redeployComponent, plan.fromNode).negate());
    }
    return post;
}

}  // namespace detail

inline Condition postCondition(const RefactoringAction& a, const ArchModel& m, int pos = 1) {
    return detail::renderPost(planAction(a, m, pos));
}

// --- sequence composition -------------------------------------------------------

struct ComposedConditions {
    Condition pre;
    Condition post;
};

// Folds the actions left to right: each action's pre atoms already granted
// by earlier posts are discharged, clashes with earlier posts mark the
// sequence infeasible, and the remaining atoms form the global pre. The
// global post is the accumulated post-state.
inline ComposedConditions composeConditions(const std::vector<RefactoringAction>& seq,
                                            const ArchModel& model) {
    if (seq.empty()) throw std::invalid_argument("composeConditions: empty sequence");
    ComposedConditions out;
    ArchModel state = model;
    for (size_t i = 0; i < seq.size(); ++i) {
        const int pos = static_cast<int>(i) + 1;
        const Condition pre = preCondition(seq[i], state);
        for (const auto& p : pre.predicates) {
            if (const Predicate* earlier = out.post.find(p.key())) {
                if (earlier->negated != p.negated)
                    throw InfeasibleSequenceError("pre of action " + std::to_string(pos) +
                                                  " contradicts an earlier post: " + p.key());
                continue;  // discharged by an earlier post
            }
            out.pre.conjoin(p);
        }
        const ActionPlan plan = planAction(seq[i], state, pos);
        for (const auto& q : detail::renderPost(plan).predicates) out.post.supersede(q);
        state = applyPlan(plan, state);
    }
    return out;
}

struct RefactoringSequence {
    std::vector<RefactoringAction> actions;
    Condition composedPre;
    Condition composedPost;

    bool operator==(const RefactoringSequence&) const = default;
    size_t size() const { return actions.size(); }
};

inline bool isFeasible(const std::vector<RefactoringAction>& actions, const ArchModel& model) {
    if (actions.empty()) return true;
    try {
        return holds(model, composeConditions(actions, model).pre);
    } catch (const RefactoringError&) {
        return false;
    }
}

inline bool isFeasible(const RefactoringSequence& seq, const ArchModel& model) {
    return isFeasible(seq.actions, model);
}

// Builds a sequence with its composed conditions; throws if infeasible.
inline RefactoringSequence makeSequence(std::vector<RefactoringAction> actions,
                                        const ArchModel& model) {
    RefactoringSequence s;
    s.actions = std::move(actions);
    if (!s.actions.empty()) {
        ComposedConditions cc = composeConditions(s.actions, model);
        if (!holds(model, cc.pre))
            throw PreconditionError("sequence precondition does not hold on the model");
        s.composedPre = std::move(cc.pre);
        s.composedPost = std::move(cc.post);
    }
    return s;
}

inline ArchModel applySequence(const std::vector<RefactoringAction>& actions,
                               const ArchModel& model) {
    ArchModel state = model;
    for (size_t i = 0; i < actions.size(); ++i)
        state = apply(actions[i], state, static_cast<int>(i) + 1);
    return state;
}

inline ArchModel applySequence(const RefactoringSequence& seq, const ArchModel& model) {
    return applySequence(seq.actions, model);
}

// --- target domains and random generation ----------------------------------------

inline std::vector<RefactoringAction> actionCandidates(const ArchModel& m, ActionKind kind) {
    std::vector<RefactoringAction> out;
    switch (kind) {
        case ActionKind::Clon:
            for (const auto& n : m.nodes) out.push_back(clonAction(n.id));
            break;
        case ActionKind::MO2N:
            for (const auto& c : m.components)
                for (const auto& op : c.operations) out.push_back(mo2nAction(c.id, op.id));
            break;
        case ActionKind::MO2C:
            for (const auto& c : m.components)
                for (const auto& op : c.operations)
                    for (const auto& d : m.components)
                        if (d.id != c.id && !d.findOperation(op.id))
                            out.push_back(mo2cAction(c.id, op.id, d.id));
            break;
        case ActionKind::ReDe:
            for (const auto& c : m.components) out.push_back(redeAction(c.id));
            break;
    }
    return out;
}

inline size_t targetDomainSize(const ArchModel& m, ActionKind kind) {
    switch (kind) {
        case ActionKind::Clon: return m.nodes.size();
        case ActionKind::ReDe: return m.components.size();
        case ActionKind::MO2N: {
            size_t n = 0;
            for (const auto& c : m.components) n += c.operations.size();
            return n;
        }
        case ActionKind::MO2C: {
            size_t n = 0;
            for (const auto& c : m.components)
                for (const auto& op : c.operations)
                    for (const auto& d : m.components)
                        if (d.id != c.id && !d.findOperation(op.id)) ++n;
            return n;
        }
    }
    return 0;
}

// Uniform draw: first over the kinds that have at least one valid target,
// then over that kind's targets. Empty optional when nothing is drawable.
inline std::optional<RefactoringAction> randomAction(const ArchModel& m, std::mt19937_64& rng) {
    std::vector<ActionKind> kinds;
    for (ActionKind k : kAllActionKinds)
        if (targetDomainSize(m, k) > 0) kinds.push_back(k);
    if (kinds.empty()) return std::nullopt;
    const ActionKind kind =
        kinds[std::uniform_int_distribution<size_t>(0, kinds.size() - 1)(rng)];
    auto candidates = actionCandidates(m, kind);
    return candidates[std::uniform_int_distribution<size_t>(0, candidates.size() - 1)(rng)];
}

inline constexpr int kRetryBudget = 100;  // redraws per sequence position

inline RefactoringSequence randomSequence(const ArchModel& model, std::mt19937_64& rng,
                                          int length, int retryBudget = kRetryBudget) {
    if (length < 1) throw std::invalid_argument("randomSequence: length must be >= 1");
    std::vector<RefactoringAction> actions;
    ArchModel state = model;
    for (int pos = 1; pos <= length; ++pos) {
        bool placed = false;
        for (int attempt = 0; attempt < retryBudget && !placed; ++attempt) {
            auto candidate = randomAction(state, rng);
            if (!candidate) break;
            try {
                ActionPlan plan = planAction(*candidate, state, pos);
                state = applyPlan(plan, state);
                actions.push_back(std::move(*candidate));
                placed = true;
            } catch (const RefactoringError&) {
                // infeasible draw: discard and redraw
            }
        }
        if (!placed)
            throw ExhaustionError("randomSequence: no feasible action at position " +
                                  std::to_string(pos) + " within " +
                                  std::to_string(retryBudget) + " draws");
    }
    return makeSequence(std::move(actions), model);
}

// --- serialization -----------------------------------------------------------------

inline Json toJson(const RefactoringAction& a) {
    Json j;
    j["kind"] = toString(a.kind);
    switch (a.kind) {
        case ActionKind::Clon: j["target"] = a.node; break;
        case ActionKind::MO2N: j["target"] = a.component + "/" + a.operation; break;
        case ActionKind::MO2C:
            j["target"] = a.component + "/" + a.operation;
            j["dest"] = a.dest;
            break;
        case ActionKind::ReDe: j["target"] = a.component; break;
    }
    return j;
}

inline Json toJson(const std::vector<RefactoringAction>& actions) {
    Json j = Json::array();
    for (const auto& a : actions) j.push_back(toJson(a));
    return j;
}

inline RefactoringAction actionFromJson(const Json& j) {
    const auto kind = actionKindFromString(j.at("kind").get<std::string>());
    if (!kind) throw ParseError("unknown action kind: " + j.at("kind").dump());
    const std::string target = j.at("target").get<std::string>();
    switch (*kind) {
        case ActionKind::Clon: return clonAction(target);
        case ActionKind::ReDe: return redeAction(target);
        case ActionKind::MO2N:
        case ActionKind::MO2C: {
            const size_t slash = target.find('/');
            if (slash == std::string::npos)
                throw ParseError("operation target must be component/operation: " + target);
            if (*kind == ActionKind::MO2N)
                return mo2nAction(target.substr(0, slash), target.substr(slash + 1));
            return mo2cAction(target.substr(0, slash), target.substr(slash + 1),
                              j.at("dest").get<std::string>());
        }
    }
    throw std::logic_error("bad action kind");
}

inline std::vector<RefactoringAction> actionsFromJson(const Json& j) {
    std::vector<RefactoringAction> out;
    for (const auto& item : j) out.push_back(actionFromJson(item));
    return out;
}

}  // namespace refopt
