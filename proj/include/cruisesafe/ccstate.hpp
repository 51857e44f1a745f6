#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cruisesafe/errors.hpp"

namespace cruisesafe::ccstate {

/// Operating modes of the cruise control. Engaged is armed but not
/// controlling; actuator output is only possible in On. Disengaged and Off
/// are the safe modes (the actuator is released).
enum class Mode { Off, Engaged, On, Disengaged };

enum class EventKind {
    DriverOn,
    DriverCcOn,
    DriverOff,
    DriverStandby,
    BrakeSignal,
    ClutchSignal,
    DriverResume,
    VehicleOff,
};

enum class ActionKind {
    ActuatorSignalOn,
    ActuatorSignalOff,
    ClearMemory,
    NotifyDriver,
    None,
};

struct CcState {
    Mode mode = Mode::Off;
    /// Last speed set by the driver (m/s). Absent in Off, present in On.
    std::optional<double> stored_set_speed;

    bool operator==(const CcState&) const = default;
};

struct CcEvent {
    EventKind kind = EventKind::DriverOn;
    /// Target speed (m/s); only meaningful for DriverCcOn, where it must be
    /// strictly positive.
    double set_speed = 0.0;

    static CcEvent driver_cc_on(double speed) { return {EventKind::DriverCcOn, speed}; }
    static CcEvent of(EventKind kind) { return {kind, 0.0}; }
};

struct StepResult {
    CcState state;
    std::vector<ActionKind> actions;
};

/// Advances the state machine by one event.
///
/// Unlisted (state, event) pairs are self-loops emitting [None].
/// Throws ResumeWithoutMemory for (Disengaged, DriverResume) with no stored
/// set speed; the caller's state is unchanged in that case.
StepResult step(const CcState& state, const CcEvent& event);

/// True iff the mode releases the actuator (Disengaged or Off).
bool is_safe_state(const CcState& state);
bool is_safe_mode(Mode mode);

std::string mode_name(Mode mode);
std::string event_name(EventKind kind);
std::string action_name(ActionKind kind);

std::optional<Mode> mode_from_name(const std::string& name);
std::optional<EventKind> event_from_name(const std::string& name);

/// Maps a safe-state label as used in safety goals ("CC_Disengaged") onto a
/// state-machine mode. Accepts the plain mode name as well.
std::optional<Mode> mode_from_safe_state_name(const std::string& name);

/// Renders the full transition table (4 modes x 8 events) as CSV with header
/// `state,event,next_state,actions`; actions are joined with '|'. On and
/// Disengaged rows assume a stored set speed, which is how those modes are
/// reached in operation.
std::string export_transition_table();

}  // namespace cruisesafe::ccstate
