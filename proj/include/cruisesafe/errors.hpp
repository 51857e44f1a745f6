#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cruisesafe {

/// Base class for all workbench errors. Carries a stable machine-readable
/// code next to the human-readable message so CLI output can be parsed.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

  private:
    std::string code_;
};

/// Malformed input file (bad JSON, missing field, out-of-range value).
class ParseError : public Error {
  public:
    explicit ParseError(const std::string& message) : Error("parse_error", message) {}
};

/// An id is declared more than once within one model.
class DuplicateId : public Error {
  public:
    explicit DuplicateId(const std::string& id)
        : Error("duplicate_id", "duplicate id: " + id), id_(id) {}
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

  private:
    std::string id_;
};

/// A reference names an id that is not declared anywhere in the model.
class DanglingReference : public Error {
  public:
    explicit DanglingReference(const std::string& id)
        : Error("dangling_reference", "unresolved reference: " + id), id_(id) {}
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

  private:
    std::string id_;
};

/// Query for an id that does not exist in the model.
class UnknownId : public Error {
  public:
    explicit UnknownId(const std::string& id)
        : Error("unknown_id", "unknown id: " + id), id_(id) {}
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

  private:
    std::string id_;
};

/// A (hazard, situation) pair has neither a rating nor a not-applicable mark.
class MissingRating : public Error {
  public:
    MissingRating(const std::string& hazard, const std::string& situation)
        : Error("missing_rating", "missing rating for (" + hazard + ", " + situation + ")") {}
};

/// A hazardous event's hazard is not covered by any safety-goal group.
class UngroupedHazard : public Error {
  public:
    explicit UngroupedHazard(const std::string& hazard)
        : Error("ungrouped_hazard", "hazard not assigned to any safety goal: " + hazard) {}
};

/// A safety goal group addresses zero hazardous events.
class EmptyGoalGroup : public Error {
  public:
    explicit EmptyGoalGroup(const std::string& goal_id)
        : Error("empty_goal_group", "safety goal addresses no hazardous event: " + goal_id) {}
};

/// Scenario invariant violated; names the offending field.
class InvalidScenario : public Error {
  public:
    InvalidScenario(const std::string& field, const std::string& message)
        : Error("invalid_scenario", "scenario field '" + field + "': " + message), field_(field) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Resume requested from Disengaged while no set speed is stored.
class ResumeWithoutMemory : public Error {
  public:
    ResumeWithoutMemory()
        : Error("resume_without_memory", "resume requested but no set speed is stored") {}
};

/// A fault-free calibration run failed its own settling check.
class CalibrationDiverged : public Error {
  public:
    explicit CalibrationDiverged(const std::string& message)
        : Error("calibration_diverged", message) {}
};

/// Monitor queried outside the calibrated grid.
class OutOfEnvelope : public Error {
  public:
    explicit OutOfEnvelope(const std::string& message) : Error("out_of_envelope", message) {}
};

/// Monitor table metadata does not match the active simulation parameters.
class TableMismatch : public Error {
  public:
    explicit TableMismatch(const std::string& field)
        : Error("monitor_table_mismatch",
                "monitor table calibrated with different '" + field + "'") {}
};

}  // namespace cruisesafe
