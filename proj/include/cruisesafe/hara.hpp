#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cruisesafe/ccstate.hpp"
#include "cruisesafe/errors.hpp"

namespace cruisesafe::hara {

/// Deviation keywords applied to a function to derive its malfunctions.
enum class Guideword {
    LossOfFunction,
    MoreThanIntended,
    LessThanIntended,
    WrongDirection,
    UnintendedActivation,
    FailureToUpdate,
};
inline constexpr std::array<Guideword, 6> kAllGuidewords = {
    Guideword::LossOfFunction,     Guideword::MoreThanIntended,
    Guideword::LessThanIntended,   Guideword::WrongDirection,
    Guideword::UnintendedActivation, Guideword::FailureToUpdate,
};

/// The six accident categories a cruise-control malfunction can cause.
enum class Hazard {
    UnintendedAcceleration,
    UnintendedDeceleration,
    UnintendedMovement,
    ReducedMovement,
    DangerousMovement,
    UnintendedReaction,
};
inline constexpr std::array<Hazard, 6> kAllHazards = {
    Hazard::UnintendedAcceleration, Hazard::UnintendedDeceleration,
    Hazard::UnintendedMovement,     Hazard::ReducedMovement,
    Hazard::DangerousMovement,      Hazard::UnintendedReaction,
};

enum class OperatingMode { MediumSpeed, HighSpeed, Cornering };

enum class Severity { S0, S1, S2, S3 };
enum class Exposure { E0, E1, E2, E3, E4 };
enum class Controllability { C0, C1, C2, C3 };

/// Integrity levels with total order QM < A < B < C < D.
enum class Asil { QM, A, B, C, D };

struct Malfunction {
    std::string id;
    int function_ref = 0;  // index into the functionality list
    Guideword guideword = Guideword::LossOfFunction;
    std::string description;

    bool operator==(const Malfunction&) const = default;
};

struct OperationalSituation {
    std::string id;
    OperatingMode operating = OperatingMode::MediumSpeed;
    std::string environment;  // e.g. dry-road, snow
    std::string traffic;      // e.g. highway, city

    bool operator==(const OperationalSituation&) const = default;
};

struct SecRating {
    Severity severity = Severity::S0;
    Exposure exposure = Exposure::E0;
    Controllability controllability = Controllability::C0;

    bool operator==(const SecRating&) const = default;
};

struct HazardousEvent {
    std::string id;
    Hazard hazard = Hazard::UnintendedAcceleration;
    OperationalSituation situation;
    SecRating rating;
    Asil asil = Asil::QM;
    std::string rationale;

    bool operator==(const HazardousEvent&) const = default;
};

struct SafetyGoal {
    std::string id;
    std::string text;
    Asil asil = Asil::QM;
    std::string safe_state;              // state-machine mode label, e.g. CC_Disengaged
    std::vector<std::string> addresses;  // hazardous event ids

    bool operator==(const SafetyGoal&) const = default;
};

/// The ISO 26262-3 ASIL determination table, shipped as a versioned data
/// fixture. All 80 (S, E, C) combinations must be present.
class AsilTable {
  public:
    static AsilTable load(const std::string& path);
    static AsilTable from_json_text(const std::string& text, const std::string& origin = "<string>");

    [[nodiscard]] Asil lookup(const SecRating& rating) const;

  private:
    std::array<std::array<std::array<Asil, 4>, 5>, 4> cells_{};  // [S][E][C]
};

/// Looks the rating up in the determination table. Any of S0/E0/C0 yields QM.
Asil asil_of(const SecRating& rating, const AsilTable& table);

/// One guideword applied to one functionality, optionally with an authored
/// failure description.
struct GuidewordApplication {
    int function_ref = 0;
    Guideword guideword = Guideword::LossOfFunction;
    std::string description;  // synthesized from the guideword when empty
};

/// One Malfunction per applicable (function, guideword) pair, ordered by
/// function index then guideword, with ids MF01, MF02, ...
std::vector<Malfunction> derive_malfunctions(const std::vector<std::string>& functionalities,
                                             const std::vector<GuidewordApplication>& applicability);

/// Rating entry for one (hazard, situation) cell of the hazardous-event
/// matrix. Cells can be explicitly marked not applicable.
struct RatingEntry {
    Hazard hazard = Hazard::UnintendedAcceleration;
    std::string situation_id;
    bool applicable = true;
    SecRating rating;
    std::string rationale;
};

/// One HazardousEvent per applicable (hazard, situation) pair, with the ASIL
/// populated from the table. Throws MissingRating when a pair is neither
/// rated nor marked not-applicable.
std::vector<HazardousEvent> enumerate_events(const std::vector<Hazard>& hazards,
                                             const std::vector<OperationalSituation>& situations,
                                             const std::vector<RatingEntry>& ratings,
                                             const AsilTable& table);

struct GoalGroup {
    std::string id;
    std::string text;
    std::vector<Hazard> hazards;
};

/// One goal per group carrying the maximum ASIL of its member events and the
/// shared safe state. Every event hazard must be grouped and every group must
/// address at least one event; the safe state must name a safe mode.
std::vector<SafetyGoal> rollup_safety_goals(const std::vector<HazardousEvent>& events,
                                            const std::vector<GoalGroup>& grouping,
                                            const std::string& safe_state);

/// The bundled HARA study: inputs plus declared expected goal ASILs.
struct HaraFixture {
    std::vector<std::string> functionalities;
    std::vector<GuidewordApplication> applicability;
    std::vector<Hazard> hazards;
    std::vector<OperationalSituation> situations;
    std::vector<RatingEntry> ratings;
    std::vector<GoalGroup> goals;
    std::string safe_state;
    std::vector<std::pair<std::string, Asil>> expected_asils;
    AsilTable table;
};

HaraFixture load_fixture(const std::string& path);

struct HaraResult {
    std::vector<Malfunction> malfunctions;
    std::vector<HazardousEvent> events;
    std::vector<SafetyGoal> goals;
};

/// Full pipeline over a fixture: malfunction derivation, hazardous-event
/// enumeration, safety-goal rollup.
HaraResult run(const HaraFixture& fixture);

std::string guideword_name(Guideword g);
std::string hazard_name(Hazard h);
std::string operating_mode_name(OperatingMode m);
std::string asil_name(Asil a);
std::string severity_name(Severity s);
std::string exposure_name(Exposure e);
std::string controllability_name(Controllability c);

std::optional<Guideword> guideword_from_name(const std::string& name);
std::optional<Hazard> hazard_from_name(const std::string& name);
std::optional<Asil> asil_from_name(const std::string& name);

}  // namespace cruisesafe::hara
