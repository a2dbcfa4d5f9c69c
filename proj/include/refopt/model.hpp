// Three-view architecture model: static (components/operations), dynamic
// (scenarios of messages), platform (nodes/links/deployment). Models are
// immutable after load; refactoring works on explicit copies.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace refopt {

using Json = nlohmann::json;

// Callers with this prefix are external actors: they drive workload but are
// not components, have no deployment, and generate no link traffic.
inline constexpr std::string_view kActorPrefix = "actor:";

inline bool isActor(const std::string& caller) {
    return caller.rfind(kActorPrefix, 0) == 0;
}

struct Operation {
    std::string id;
    double serviceDemand = 0.0;  // host-seconds per invocation

    bool operator==(const Operation&) const = default;
};

struct Component {
    std::string id;
    double failureProb = 0.0;  // theta_i
    std::vector<Operation> operations;
    // Set on components created by node cloning: id of the original
    // component. Replicas share incoming traffic evenly (see lqn.hpp).
    std::string replicaOf;

    bool operator==(const Component&) const = default;

    const Operation* findOperation(const std::string& opId) const {
        for (const auto& op : operations)
            if (op.id == opId) return &op;
        return nullptr;
    }
};

struct Node {
    std::string id;
    int multiplicity = 1;      // processor count
    double speedFactor = 1.0;  // demand divisor

    bool operator==(const Node&) const = default;
};

struct CommLink {
    std::string id;
    std::string endpointA;  // unordered pair of node ids
    std::string endpointB;
    double failureProb = 0.0;  // psi_l

    bool operator==(const CommLink&) const = default;

    bool connects(const std::string& n1, const std::string& n2) const {
        return (endpointA == n1 && endpointB == n2) ||
               (endpointA == n2 && endpointB == n1);
    }
};

struct OpenWorkload {
    double arrivalRate = 0.0;  // req/s
    bool operator==(const OpenWorkload&) const = default;
};

struct ClosedWorkload {
    int population = 1;
    double thinkTime = 0.0;  // s
    bool operator==(const ClosedWorkload&) const = default;
};

using Workload = std::variant<OpenWorkload, ClosedWorkload>;

struct Message {
    std::string caller;  // component id or "actor:<name>"
    std::string callee;  // component id
    std::string operation;
    double size = 0.0;  // message-size units
    int repetitions = 1;

    bool operator==(const Message&) const = default;
};

struct Scenario {
    std::string id;
    double prob = 0.0;  // p_j
    Workload workload;
    std::vector<Message> messages;  // in call order

    bool operator==(const Scenario&) const = default;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    std::vector<std::string> violations;

    explicit ValidationError(std::vector<std::string> v)
        : std::runtime_error(joinAll(v)), violations(std::move(v)) {}

private:
    static std::string joinAll(const std::vector<std::string>& v) {
        std::string msg = "model validation failed:";
        for (const auto& s : v) msg += "\n  - " + s;
        return msg;
    }
};

struct UnknownElementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArchModel {
    std::vector<Component> components;
    std::vector<Node> nodes;
    std::vector<CommLink> links;
    std::vector<Scenario> scenarios;
    std::map<std::string, std::string> deployment;  // component id -> node id

    bool operator==(const ArchModel&) const = default;

    const Component* findComponent(const std::string& id) const {
        for (const auto& c : components)
            if (c.id == id) return &c;
        return nullptr;
    }
    const Node* findNode(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }
    const CommLink* findLink(const std::string& id) const {
        for (const auto& l : links)
            if (l.id == id) return &l;
        return nullptr;
    }
    const Scenario* findScenario(const std::string& id) const {
        for (const auto& s : scenarios)
            if (s.id == id) return &s;
        return nullptr;
    }

    const Component& component(const std::string& id) const {
        if (const auto* c = findComponent(id)) return *c;
        throw UnknownElementError("unknown component: " + id);
    }
    const Node& node(const std::string& id) const {
        if (const auto* n = findNode(id)) return *n;
        throw UnknownElementError("unknown node: " + id);
    }
    const CommLink& link(const std::string& id) const {
        if (const auto* l = findLink(id)) return *l;
        throw UnknownElementError("unknown link: " + id);
    }
    const Scenario& scenario(const std::string& id) const {
        if (const auto* s = findScenario(id)) return *s;
        throw UnknownElementError("unknown scenario: " + id);
    }

    Component& mutableComponent(const std::string& id) {
        for (auto& c : components)
            if (c.id == id) return c;
        throw UnknownElementError("unknown component: " + id);
    }

    const std::string& nodeOf(const std::string& componentId) const {
        auto it = deployment.find(componentId);
        if (it == deployment.end())
            throw UnknownElementError("component not deployed: " + componentId);
        return it->second;
    }

    const CommLink* linkBetween(const std::string& n1, const std::string& n2) const {
        for (const auto& l : links)
            if (l.connects(n1, n2)) return &l;
        return nullptr;
    }

    bool hasId(const std::string& id) const {
        return findComponent(id) || findNode(id) || findLink(id);
    }

    // Root of a replica chain; a component that is not a clone is its own root.
    const std::string& replicaRoot(const std::string& componentId) const {
        const Component* c = &component(componentId);
        size_t guard = components.size() + 1;
        while (!c->replicaOf.empty() && guard-- > 0) c = &component(c->replicaOf);
        return c->id;
    }

    // Components able to serve (callee, operation): the callee's replica
    // group members that still own the operation. Incoming traffic splits
    // evenly across them.
    std::vector<const Component*> servingGroup(const std::string& callee,
                                               const std::string& opId) const {
        const std::string& root = replicaRoot(callee);
        std::vector<const Component*> group;
        for (const auto& c : components)
            if (replicaRoot(c.id) == root && c.findOperation(opId)) group.push_back(&c);
        return group;
    }
};

// --- validation -------------------------------------------------------------

inline std::vector<std::string> collectViolations(const ArchModel& m) {
    std::vector<std::string> v;
    auto flag = [&v](const std::string& s) { v.push_back(s); };

    std::set<std::string> componentIds;
    for (const auto& c : m.components) {
        if (!componentIds.insert(c.id).second)
            flag("duplicate component id: " + c.id);
        if (isActor(c.id))
            flag("component id uses reserved actor prefix: " + c.id);
        if (c.failureProb < 0.0 || c.failureProb > 1.0)
            flag("component " + c.id + ": failureProb outside [0,1]");
        std::set<std::string> opIds;
        for (const auto& op : c.operations) {
            if (!opIds.insert(op.id).second)
                flag("component " + c.id + ": duplicate operation id " + op.id);
            if (!(op.serviceDemand > 0.0))
                flag("operation " + c.id + "/" + op.id + ": serviceDemand must be > 0");
        }
        if (!c.replicaOf.empty() && !m.findComponent(c.replicaOf))
            flag("component " + c.id + ": replicaOf references unknown component " + c.replicaOf);
    }

    std::set<std::string> nodeIds;
    for (const auto& n : m.nodes) {
        if (!nodeIds.insert(n.id).second) flag("duplicate node id: " + n.id);
        if (n.multiplicity < 1) flag("node " + n.id + ": multiplicity must be >= 1");
        if (!(n.speedFactor > 0.0)) flag("node " + n.id + ": speedFactor must be > 0");
    }

    std::set<std::string> linkIds;
    std::set<std::pair<std::string, std::string>> linkPairs;
    for (const auto& l : m.links) {
        if (!linkIds.insert(l.id).second) flag("duplicate link id: " + l.id);
        if (l.endpointA == l.endpointB)
            flag("link " + l.id + ": endpoints must be distinct");
        if (!nodeIds.count(l.endpointA))
            flag("link " + l.id + ": unknown endpoint " + l.endpointA);
        if (!nodeIds.count(l.endpointB))
            flag("link " + l.id + ": unknown endpoint " + l.endpointB);
        if (l.failureProb < 0.0 || l.failureProb > 1.0)
            flag("link " + l.id + ": failureProb outside [0,1]");
        auto pair = std::minmax(l.endpointA, l.endpointB);
        if (!linkPairs.insert(pair).second)
            flag("more than one link between nodes " + pair.first + " and " + pair.second);
    }

    for (const auto& c : m.components) {
        auto it = m.deployment.find(c.id);
        if (it == m.deployment.end())
            flag("component " + c.id + " is not deployed");
        else if (!nodeIds.count(it->second))
            flag("component " + c.id + " deployed on unknown node " + it->second);
    }
    for (const auto& [comp, nodeId] : m.deployment)
        if (!componentIds.count(comp))
            flag("deployment entry for unknown component " + comp);

    std::set<std::string> scenarioIds;
    double probSum = 0.0;
    for (const auto& s : m.scenarios) {
        if (!scenarioIds.insert(s.id).second) flag("duplicate scenario id: " + s.id);
        if (s.prob < 0.0 || s.prob > 1.0)
            flag("scenario " + s.id + ": prob outside [0,1]");
        probSum += s.prob;
        if (const auto* open = std::get_if<OpenWorkload>(&s.workload)) {
            if (!(open->arrivalRate > 0.0))
                flag("scenario " + s.id + ": arrivalRate must be > 0");
        } else {
            const auto& closed = std::get<ClosedWorkload>(s.workload);
            if (closed.population < 1)
                flag("scenario " + s.id + ": population must be >= 1");
            if (!(closed.thinkTime > 0.0))
                flag("scenario " + s.id + ": thinkTime must be > 0");
        }
        for (size_t i = 0; i < s.messages.size(); ++i) {
            const Message& msg = s.messages[i];
            const std::string where = "scenario " + s.id + " message #" + std::to_string(i);
            if (!isActor(msg.caller) && !componentIds.count(msg.caller))
                flag(where + ": unknown caller " + msg.caller);
            const Component* callee = m.findComponent(msg.callee);
            if (!callee)
                flag(where + ": unknown callee " + msg.callee);
            else if (!callee->findOperation(msg.operation))
                flag(where + ": callee " + msg.callee + " does not own operation " + msg.operation);
            if (msg.size < 0.0) flag(where + ": size must be >= 0");
            if (msg.repetitions < 1) flag(where + ": repetitions must be >= 1");
        }
    }
    if (!m.scenarios.empty() && std::abs(probSum - 1.0) > 1e-9)
        flag("scenario probabilities sum to " + std::to_string(probSum) + ", expected 1");

    return v;
}

inline void validate(const ArchModel& m) {
    auto v = collectViolations(m);
    if (!v.empty()) throw ValidationError(std::move(v));
}

// --- structural queries -----------------------------------------------------

// InvNr_ij: total repetitions of messages in the scenario whose callee is
// the component.
inline int invocationCount(const ArchModel& m, const std::string& scenarioId,
                           const std::string& componentId) {
    const Scenario& s = m.scenario(scenarioId);
    m.component(componentId);
    int total = 0;
    for (const auto& msg : s.messages)
        if (msg.callee == componentId) total += msg.repetitions;
    return total;
}

// MsgSize(l,j): size*repetitions of scenario messages crossing the link.
// A message to a replicated service splits evenly across the serving group;
// co-located caller/callee shares contribute nothing.
inline double messageTraffic(const ArchModel& m, const std::string& scenarioId,
                             const std::string& linkId) {
    const Scenario& s = m.scenario(scenarioId);
    const CommLink& l = m.link(linkId);
    double total = 0.0;
    for (const auto& msg : s.messages) {
        if (isActor(msg.caller)) continue;
        const std::string& callerNode = m.nodeOf(msg.caller);
        auto group = m.servingGroup(msg.callee, msg.operation);
        if (group.empty()) continue;
        const double share = 1.0 / static_cast<double>(group.size());
        for (const Component* member : group) {
            const std::string& calleeNode = m.nodeOf(member->id);
            if (calleeNode == callerNode) continue;
            if (l.connects(callerNode, calleeNode))
                total += msg.size * msg.repetitions * share;
        }
    }
    return total;
}

enum class ElementKind { Component, Node, Operation };

struct ElementRef {
    ElementKind kind;
    std::string id;         // component, node, or operation id
    std::string owner;      // owning component id (operations only)

    static ElementRef forComponent(std::string id) {
        return {ElementKind::Component, std::move(id), {}};
    }
    static ElementRef forNode(std::string id) {
        return {ElementKind::Node, std::move(id), {}};
    }
    static ElementRef forOperation(std::string owner, std::string id) {
        return {ElementKind::Operation, std::move(id), std::move(owner)};
    }
};

namespace detail {

inline int componentDegree(const ArchModel& m, const Component& c) {
    std::set<std::string> partners;
    for (const auto& s : m.scenarios)
        for (const auto& msg : s.messages) {
            if (msg.caller == c.id && msg.callee != c.id && !isActor(msg.callee))
                partners.insert(msg.callee);
            if (msg.callee == c.id && msg.caller != c.id && !isActor(msg.caller))
                partners.insert(msg.caller);
        }
    int linkCount = 0;
    auto depl = m.deployment.find(c.id);
    if (depl != m.deployment.end())
        for (const auto& l : m.links)
            if (l.endpointA == depl->second || l.endpointB == depl->second) ++linkCount;
    return static_cast<int>(partners.size()) + linkCount;
}

inline int nodeDegree(const ArchModel& m, const Node& n) {
    int deg = 0;
    for (const auto& l : m.links)
        if (l.endpointA == n.id || l.endpointB == n.id) ++deg;
    for (const auto& [comp, nodeId] : m.deployment)
        if (nodeId == n.id) ++deg;
    return deg;
}

inline int operationDegree(const ArchModel& m, const std::string& owner,
                           const std::string& opId) {
    std::set<std::string> callers;
    for (const auto& s : m.scenarios)
        for (const auto& msg : s.messages)
            if (msg.callee == owner && msg.operation == opId && !isActor(msg.caller))
                callers.insert(msg.caller);
    return static_cast<int>(callers.size());
}

}  // namespace detail

// AW(el) = 1 + deg(el)/maxdeg over elements of the same kind. Strictly
// positive as the distance objective requires; when every element of a kind
// has the same degree the ratio is taken as 1 and all weights are 2.
inline double architecturalWeight(const ArchModel& m, const ElementRef& el) {
    int deg = 0;
    int maxDeg = 0;
    switch (el.kind) {
        case ElementKind::Component: {
            deg = detail::componentDegree(m, m.component(el.id));
            for (const auto& c : m.components)
                maxDeg = std::max(maxDeg, detail::componentDegree(m, c));
            break;
        }
        case ElementKind::Node: {
            deg = detail::nodeDegree(m, m.node(el.id));
            for (const auto& n : m.nodes)
                maxDeg = std::max(maxDeg, detail::nodeDegree(m, n));
            break;
        }
        case ElementKind::Operation: {
            const Component& owner = m.component(el.owner);
            if (!owner.findOperation(el.id))
                throw UnknownElementError("unknown operation: " + el.owner + "/" + el.id);
            deg = detail::operationDegree(m, el.owner, el.id);
            for (const auto& c : m.components)
                for (const auto& op : c.operations)
                    maxDeg = std::max(maxDeg, detail::operationDegree(m, c.id, op.id));
            break;
        }
    }
    const double ratio = maxDeg > 0 ? static_cast<double>(deg) / maxDeg : 1.0;
    return 1.0 + ratio;
}

// --- JSON ingestion / rendering ----------------------------------------------

namespace detail {

inline const Json& requireField(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw ParseError(path + ": missing field '" + key + "'");
    return j.at(key);
}

inline double requireNumber(const Json& j, const char* key, const std::string& path) {
    const Json& f = requireField(j, key, path);
    if (!f.is_number())
        throw ParseError(path + "." + key + ": expected a number");
    return f.get<double>();
}

inline int requireInt(const Json& j, const char* key, const std::string& path) {
    const Json& f = requireField(j, key, path);
    if (!f.is_number_integer())
        throw ParseError(path + "." + key + ": expected an integer");
    return f.get<int>();
}

inline std::string requireString(const Json& j, const char* key, const std::string& path) {
    const Json& f = requireField(j, key, path);
    if (!f.is_string())
        throw ParseError(path + "." + key + ": expected a string");
    return f.get<std::string>();
}

}  // namespace detail

inline Json toJson(const ArchModel& m) {
    Json j;
    j["components"] = Json::array();
    for (const auto& c : m.components) {
        Json jc{{"id", c.id}, {"failureProb", c.failureProb}};
        jc["operations"] = Json::array();
        for (const auto& op : c.operations)
            jc["operations"].push_back({{"id", op.id}, {"serviceDemand", op.serviceDemand}});
        if (!c.replicaOf.empty()) jc["replicaOf"] = c.replicaOf;
        j["components"].push_back(std::move(jc));
    }
    j["nodes"] = Json::array();
    for (const auto& n : m.nodes)
        j["nodes"].push_back({{"id", n.id},
                              {"multiplicity", n.multiplicity},
                              {"speedFactor", n.speedFactor}});
    j["links"] = Json::array();
    for (const auto& l : m.links)
        j["links"].push_back({{"id", l.id},
                              {"endpoints", Json::array({l.endpointA, l.endpointB})},
                              {"failureProb", l.failureProb}});
    j["scenarios"] = Json::array();
    for (const auto& s : m.scenarios) {
        Json js{{"id", s.id}, {"prob", s.prob}};
        if (const auto* open = std::get_if<OpenWorkload>(&s.workload))
            js["workload"] = {{"kind", "open"}, {"arrivalRate", open->arrivalRate}};
        else {
            const auto& closed = std::get<ClosedWorkload>(s.workload);
            js["workload"] = {{"kind", "closed"},
                              {"population", closed.population},
                              {"thinkTime", closed.thinkTime}};
        }
        js["messages"] = Json::array();
        for (const auto& msg : s.messages)
            js["messages"].push_back({{"caller", msg.caller},
                                      {"callee", msg.callee},
                                      {"operation", msg.operation},
                                      {"size", msg.size},
                                      {"repetitions", msg.repetitions}});
        j["scenarios"].push_back(std::move(js));
    }
    j["deployment"] = Json::object();
    for (const auto& [comp, nodeId] : m.deployment) j["deployment"][comp] = nodeId;
    return j;
}

inline ArchModel fromJson(const Json& j) {
    using detail::requireField;
    using detail::requireInt;
    using detail::requireNumber;
    using detail::requireString;

    ArchModel m;
    const Json& comps = requireField(j, "components", "document");
    for (size_t i = 0; i < comps.size(); ++i) {
        const std::string path = "components[" + std::to_string(i) + "]";
        const Json& jc = comps.at(i);
        Component c;
        c.id = requireString(jc, "id", path);
        c.failureProb = requireNumber(jc, "failureProb", path);
        const Json& ops = requireField(jc, "operations", path);
        for (size_t k = 0; k < ops.size(); ++k) {
            const std::string opPath = path + ".operations[" + std::to_string(k) + "]";
            Operation op;
            op.id = requireString(ops.at(k), "id", opPath);
            op.serviceDemand = requireNumber(ops.at(k), "serviceDemand", opPath);
            c.operations.push_back(std::move(op));
        }
        if (jc.contains("replicaOf")) c.replicaOf = requireString(jc, "replicaOf", path);
        m.components.push_back(std::move(c));
    }

    const Json& nodes = requireField(j, "nodes", "document");
    for (size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "nodes[" + std::to_string(i) + "]";
        Node n;
        n.id = requireString(nodes.at(i), "id", path);
        n.multiplicity = requireInt(nodes.at(i), "multiplicity", path);
        n.speedFactor = requireNumber(nodes.at(i), "speedFactor", path);
        m.nodes.push_back(std::move(n));
    }

    const Json& links = requireField(j, "links", "document");
    for (size_t i = 0; i < links.size(); ++i) {
        const std::string path = "links[" + std::to_string(i) + "]";
        const Json& jl = links.at(i);
        CommLink l;
        l.id = requireString(jl, "id", path);
        const Json& eps = requireField(jl, "endpoints", path);
        if (!eps.is_array() || eps.size() != 2 || !eps.at(0).is_string() || !eps.at(1).is_string())
            throw ParseError(path + ".endpoints: expected a pair of node ids");
        l.endpointA = eps.at(0).get<std::string>();
        l.endpointB = eps.at(1).get<std::string>();
        l.failureProb = requireNumber(jl, "failureProb", path);
        m.links.push_back(std::move(l));
    }

    const Json& scenarios = requireField(j, "scenarios", "document");
    for (size_t i = 0; i < scenarios.size(); ++i) {
        const std::string path = "scenarios[" + std::to_string(i) + "]";
        const Json& js = scenarios.at(i);
        Scenario s;
        s.id = requireString(js, "id", path);
        s.prob = requireNumber(js, "prob", path);
        const Json& w = requireField(js, "workload", path);
        const std::string kind = requireString(w, "kind", path + ".workload");
        if (kind == "open") {
            s.workload = OpenWorkload{requireNumber(w, "arrivalRate", path + ".workload")};
        } else if (kind == "closed") {
            s.workload = ClosedWorkload{requireInt(w, "population", path + ".workload"),
                                        requireNumber(w, "thinkTime", path + ".workload")};
        } else {
            throw ParseError(path + ".workload.kind: expected 'open' or 'closed'");
        }
        const Json& msgs = requireField(js, "messages", path);
        for (size_t k = 0; k < msgs.size(); ++k) {
            const std::string mp = path + ".messages[" + std::to_string(k) + "]";
            const Json& jm = msgs.at(k);
            Message msg;
            msg.caller = requireString(jm, "caller", mp);
            msg.callee = requireString(jm, "callee", mp);
            msg.operation = requireString(jm, "operation", mp);
            msg.size = requireNumber(jm, "size", mp);
            msg.repetitions = requireInt(jm, "repetitions", mp);
            s.messages.push_back(std::move(msg));
        }
        m.scenarios.push_back(std::move(s));
    }

    const Json& depl = requireField(j, "deployment", "document");
    if (!depl.is_object()) throw ParseError("deployment: expected an object");
    for (const auto& [comp, nodeId] : depl.items()) {
        if (!nodeId.is_string())
            throw ParseError("deployment." + comp + ": expected a node id string");
        m.deployment[comp] = nodeId.get<std::string>();
    }
    return m;
}

// Parses and validates a model document. Parse errors carry a line locus;
// validation errors list every violated invariant.
inline ArchModel loadModel(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        size_t line = 1;
        for (size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ParseError("line " + std::to_string(line) + ": " + e.what());
    }
    ArchModel m = fromJson(j);
    validate(m);
    return m;
}

inline std::string renderModel(const ArchModel& m) { return toJson(m).dump(2) + "\n"; }

}  // namespace refopt
