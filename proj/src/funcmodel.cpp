#include "cruisesafe/funcmodel.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "cruisesafe/detail/json_util.hpp"

namespace cruisesafe::funcmodel {

using detail::json;
using detail::ordered_json;

namespace {

Level level_from_name(const std::string& name, const std::string& ctx) {
    if (name == "Vehicle") return Level::Vehicle;
    if (name == "System") return Level::System;
    if (name == "Subsystem") return Level::Subsystem;
    throw ParseError("unknown level '" + name + "' in " + ctx);
}

BlockRole role_from_name(const std::string& name, const std::string& ctx) {
    if (name == "Input") return BlockRole::Input;
    if (name == "Logic") return BlockRole::Logic;
    if (name == "Output") return BlockRole::Output;
    if (name == "External") return BlockRole::External;
    throw ParseError("unknown role '" + name + "' in " + ctx);
}

FlowKind flow_kind_from_name(const std::string& name, const std::string& ctx) {
    if (name == "Signal") return FlowKind::Signal;
    if (name == "Energy") return FlowKind::Energy;
    throw ParseError("unknown flow kind '" + name + "' in " + ctx);
}

LinkKind link_kind_from_name(const std::string& name, const std::string& ctx) {
    if (name == "Satisfies") return LinkKind::Satisfies;
    if (name == "DerivedFrom") return LinkKind::DerivedFrom;
    if (name == "Mitigates") return LinkKind::Mitigates;
    if (name == "Implements") return LinkKind::Implements;
    throw ParseError("unknown link kind '" + name + "' in " + ctx);
}

/// Structural checks shared by every load path: global id uniqueness,
/// reference resolution, forest-shaped requirement hierarchy, role rules.
void validate_structure(const FunctionalModel& m) {
    std::unordered_set<std::string> ids;
    auto declare = [&](const std::string& id) {
        if (id.empty()) {
            throw ParseError("empty id in model");
        }
        if (!ids.insert(id).second) {
            throw DuplicateId(id);
        }
    };
    for (const auto& r : m.requirements) declare(r.id);
    for (const auto& c : m.components) declare(c.id);
    for (const auto& f : m.flows) declare(f.id);

    std::unordered_set<std::string> req_ids;
    for (const auto& r : m.requirements) req_ids.insert(r.id);
    std::unordered_set<std::string> comp_ids;
    for (const auto& c : m.components) comp_ids.insert(c.id);
    std::unordered_set<std::string> flow_ids;
    for (const auto& f : m.flows) flow_ids.insert(f.id);

    for (const auto& r : m.requirements) {
        if (r.parent && !req_ids.count(*r.parent)) {
            throw DanglingReference(*r.parent);
        }
    }
    // Parent links must form a forest. Walking up from each node either
    // terminates at a root or revisits a node on the current chain.
    std::unordered_map<std::string, const Requirement*> by_id;
    for (const auto& r : m.requirements) by_id[r.id] = &r;
    for (const auto& r : m.requirements) {
        std::unordered_set<std::string> seen;
        const Requirement* cur = &r;
        while (cur->parent) {
            if (!seen.insert(cur->id).second) {
                throw ParseError("requirement parent links form a cycle at '" + r.id + "'");
            }
            cur = by_id.at(*cur->parent);
        }
        if (seen.count(cur->id)) {
            throw ParseError("requirement parent links form a cycle at '" + r.id + "'");
        }
    }

    for (const auto& c : m.components) {
        if (c.level == Level::Subsystem && c.block_role == BlockRole::External) {
            throw ParseError("component '" + c.id +
                             "': subsystem blocks must be Input, Logic or Output");
        }
        for (const auto& p : c.ports) {
            if (!flow_ids.count(p)) {
                throw DanglingReference(p);
            }
        }
    }

    for (const auto& f : m.flows) {
        if (f.source == f.sink) {
            throw ParseError("flow '" + f.id + "' connects a component to itself");
        }
        if (!comp_ids.count(f.source)) throw DanglingReference(f.source);
        if (!comp_ids.count(f.sink)) throw DanglingReference(f.sink);
    }

    std::set<std::tuple<std::string, std::string, LinkKind>> link_keys;
    for (const auto& l : m.links) {
        if (!ids.count(l.from_id)) throw DanglingReference(l.from_id);
        if (!ids.count(l.to_id)) throw DanglingReference(l.to_id);
        if (!link_keys.insert({l.from_id, l.to_id, l.kind}).second) {
            throw ParseError("duplicate link (" + l.from_id + ", " + l.to_id + ", " +
                             link_kind_name(l.kind) + ")");
        }
    }
}

FunctionalModel from_json(const json& doc, const std::string& origin) {
    if (!doc.is_object()) {
        throw ParseError(origin + ": model document must be a JSON object");
    }
    FunctionalModel m;
    m.name = detail::get_string_or(doc, "name", "");

    if (auto it = doc.find("functionalities"); it != doc.end()) {
        for (const auto& f : *it) {
            m.functionalities.push_back(f.get<std::string>());
        }
    }

    for (const auto& rj : detail::expect_array(doc, "requirements", origin)) {
        Requirement r;
        r.id = detail::expect_string(rj, "id", "requirement");
        r.text = detail::expect_string(rj, "text", "requirement '" + r.id + "'");
        if (auto it = rj.find("parent"); it != rj.end() && !it->is_null()) {
            r.parent = it->get<std::string>();
        }
        m.requirements.push_back(std::move(r));
    }

    for (const auto& cj : detail::expect_array(doc, "components", origin)) {
        Component c;
        c.id = detail::expect_string(cj, "id", "component");
        const std::string ctx = "component '" + c.id + "'";
        c.level = level_from_name(detail::expect_string(cj, "level", ctx), ctx);
        c.block_role = role_from_name(detail::expect_string(cj, "role", ctx), ctx);
        if (auto it = cj.find("ports"); it != cj.end()) {
            for (const auto& p : *it) {
                c.ports.push_back(p.get<std::string>());
            }
        }
        m.components.push_back(std::move(c));
    }

    for (const auto& fj : detail::expect_array(doc, "flows", origin)) {
        Flow f;
        f.id = detail::expect_string(fj, "id", "flow");
        const std::string ctx = "flow '" + f.id + "'";
        f.kind = flow_kind_from_name(detail::expect_string(fj, "kind", ctx), ctx);
        f.source = detail::expect_string(fj, "source", ctx);
        f.sink = detail::expect_string(fj, "sink", ctx);
        f.label = detail::get_string_or(fj, "label", "");
        m.flows.push_back(std::move(f));
    }

    for (const auto& lj : detail::expect_array(doc, "links", origin)) {
        TraceLink l;
        l.from_id = detail::expect_string(lj, "from", "link");
        l.to_id = detail::expect_string(lj, "to", "link");
        const std::string ctx = "link " + l.from_id + " -> " + l.to_id;
        l.kind = link_kind_from_name(detail::expect_string(lj, "kind", ctx), ctx);
        m.links.push_back(std::move(l));
    }

    validate_structure(m);
    return m;
}

}  // namespace

const Requirement* FunctionalModel::find_requirement(const std::string& id) const {
    for (const auto& r : requirements) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

const Component* FunctionalModel::find_component(const std::string& id) const {
    for (const auto& c : components) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

bool FunctionalModel::has_id(const std::string& id) const {
    if (find_requirement(id) || find_component(id)) return true;
    return std::any_of(flows.begin(), flows.end(), [&](const Flow& f) { return f.id == id; });
}

FunctionalModel load_model(const std::string& path) {
    return from_json(detail::load_json_file(path), path);
}

FunctionalModel load_model_from_string(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return from_json(doc, origin);
}

std::string serialize_model(const FunctionalModel& m) {
    ordered_json doc;
    doc["name"] = m.name;
    doc["functionalities"] = m.functionalities;
    doc["requirements"] = ordered_json::array();
    for (const auto& r : m.requirements) {
        ordered_json rj;
        rj["id"] = r.id;
        rj["text"] = r.text;
        if (r.parent) {
            rj["parent"] = *r.parent;
        }
        doc["requirements"].push_back(std::move(rj));
    }
    doc["components"] = ordered_json::array();
    for (const auto& c : m.components) {
        ordered_json cj;
        cj["id"] = c.id;
        cj["level"] = level_name(c.level);
        cj["role"] = role_name(c.block_role);
        cj["ports"] = c.ports;
        doc["components"].push_back(std::move(cj));
    }
    doc["flows"] = ordered_json::array();
    for (const auto& f : m.flows) {
        ordered_json fj;
        fj["id"] = f.id;
        fj["kind"] = flow_kind_name(f.kind);
        fj["source"] = f.source;
        fj["sink"] = f.sink;
        fj["label"] = f.label;
        doc["flows"].push_back(std::move(fj));
    }
    doc["links"] = ordered_json::array();
    for (const auto& l : m.links) {
        ordered_json lj;
        lj["from"] = l.from_id;
        lj["to"] = l.to_id;
        lj["kind"] = link_kind_name(l.kind);
        doc["links"].push_back(std::move(lj));
    }
    return doc.dump(2) + "\n";
}

std::vector<Violation> validate_traceability(const FunctionalModel& model) {
    std::unordered_set<std::string> req_ids;
    for (const auto& r : model.requirements) req_ids.insert(r.id);

    std::vector<Violation> violations;
    for (const auto& c : model.components) {
        if (c.block_role == BlockRole::External) {
            continue;
        }
        bool coupled = std::any_of(model.links.begin(), model.links.end(), [&](const TraceLink& l) {
            return l.kind == LinkKind::Satisfies && l.from_id == c.id && req_ids.count(l.to_id);
        });
        if (!coupled) {
            violations.push_back({c.id, "requirement-coupling",
                                  "component '" + c.id +
                                      "' has no Satisfies link to a requirement"});
        }
    }
    return violations;
}

std::vector<std::vector<std::string>> trace(const FunctionalModel& model, const std::string& id,
                                            Direction direction) {
    if (!model.has_id(id)) {
        throw UnknownId(id);
    }

    std::unordered_map<std::string, std::vector<std::string>> adjacency;
    for (const auto& l : model.links) {
        if (direction == Direction::Backward) {
            adjacency[l.from_id].push_back(l.to_id);
        } else {
            adjacency[l.to_id].push_back(l.from_id);
        }
    }

    // Every simple path with at least one edge is reported, not only the
    // maximal ones; this keeps Forward and Backward exact converses.
    std::vector<std::vector<std::string>> paths;
    std::vector<std::string> current{id};
    std::unordered_set<std::string> on_path{id};

    auto dfs = [&](auto&& self, const std::string& node) -> void {
        auto it = adjacency.find(node);
        if (it == adjacency.end()) {
            return;
        }
        for (const auto& next : it->second) {
            if (on_path.count(next)) {
                continue;
            }
            current.push_back(next);
            on_path.insert(next);
            paths.push_back(current);
            self(self, next);
            on_path.erase(next);
            current.pop_back();
        }
    };
    dfs(dfs, id);

    std::sort(paths.begin(), paths.end());
    return paths;
}

std::string level_name(Level level) {
    switch (level) {
        case Level::Vehicle: return "Vehicle";
        case Level::System: return "System";
        case Level::Subsystem: return "Subsystem";
    }
    return "?";
}

std::string role_name(BlockRole role) {
    switch (role) {
        case BlockRole::Input: return "Input";
        case BlockRole::Logic: return "Logic";
        case BlockRole::Output: return "Output";
        case BlockRole::External: return "External";
    }
    return "?";
}

std::string flow_kind_name(FlowKind kind) {
    return kind == FlowKind::Signal ? "Signal" : "Energy";
}

std::string link_kind_name(LinkKind kind) {
    switch (kind) {
        case LinkKind::Satisfies: return "Satisfies";
        case LinkKind::DerivedFrom: return "DerivedFrom";
        case LinkKind::Mitigates: return "Mitigates";
        case LinkKind::Implements: return "Implements";
    }
    return "?";
}

}  // namespace cruisesafe::funcmodel
