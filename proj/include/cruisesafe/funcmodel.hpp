#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cruisesafe/errors.hpp"

namespace cruisesafe::funcmodel {

enum class Level { Vehicle, System, Subsystem };

/// Input/Logic/Output classify subsystem blocks; External marks environment
/// systems (brakes, transmission, power supply) that are assumed to work
/// perfectly and are exempt from the requirement-coupling rule.
enum class BlockRole { Input, Logic, Output, External };

enum class FlowKind { Signal, Energy };

enum class LinkKind { Satisfies, DerivedFrom, Mitigates, Implements };

struct Requirement {
    std::string id;
    std::string text;
    std::optional<std::string> parent;

    bool operator==(const Requirement&) const = default;
};

struct Component {
    std::string id;
    Level level = Level::System;
    BlockRole block_role = BlockRole::Logic;
    std::vector<std::string> ports;  // flow ids attached to this block

    bool operator==(const Component&) const = default;
};

struct Flow {
    std::string id;
    FlowKind kind = FlowKind::Signal;
    std::string source;
    std::string sink;
    std::string label;

    bool operator==(const Flow&) const = default;
};

/// Directed trace edge. Links point from the downstream artifact toward the
/// artifact it satisfies or derives from, so following from -> to walks
/// toward requirements (the Backward direction of trace()).
struct TraceLink {
    std::string from_id;
    std::string to_id;
    LinkKind kind = LinkKind::Satisfies;

    bool operator==(const TraceLink&) const = default;
};

struct FunctionalModel {
    std::string name;
    std::vector<std::string> functionalities;
    std::vector<Requirement> requirements;
    std::vector<Component> components;
    std::vector<Flow> flows;
    std::vector<TraceLink> links;

    bool operator==(const FunctionalModel&) const = default;

    [[nodiscard]] const Requirement* find_requirement(const std::string& id) const;
    [[nodiscard]] const Component* find_component(const std::string& id) const;
    [[nodiscard]] bool has_id(const std::string& id) const;
};

/// Machine-readable validation finding.
struct Violation {
    std::string component_id;
    std::string rule;
    std::string message;

    bool operator==(const Violation&) const = default;
};

enum class Direction { Forward, Backward };

/// Loads and structurally validates a model file (see docs/model-schema.md).
/// Throws ParseError, DuplicateId, or DanglingReference.
FunctionalModel load_model(const std::string& path);

/// Same as load_model but from an in-memory document.
FunctionalModel load_model_from_string(const std::string& text, const std::string& origin = "<string>");

/// Serializes a model back to its file format. load(serialize(m)) == m.
std::string serialize_model(const FunctionalModel& model);

/// One violation per non-External component without a Satisfies link to a
/// requirement. Empty result means the model is fully traceable.
std::vector<Violation> validate_traceability(const FunctionalModel& model);

/// All simple paths (at least one link long) starting at `id`. Backward
/// follows links from -> to (toward requirements); Forward follows the
/// reverse edges. Paths are sorted lexicographically by their id sequence.
std::vector<std::vector<std::string>> trace(const FunctionalModel& model, const std::string& id,
                                            Direction direction);

std::string level_name(Level level);
std::string role_name(BlockRole role);
std::string flow_kind_name(FlowKind kind);
std::string link_kind_name(LinkKind kind);

}  // namespace cruisesafe::funcmodel
