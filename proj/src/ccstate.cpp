#include "cruisesafe/ccstate.hpp"

#include <array>
#include <sstream>

namespace cruisesafe::ccstate {

namespace {

const std::array<EventKind, 8> kAllEvents = {
    EventKind::DriverOn,    EventKind::DriverCcOn,  EventKind::DriverOff,
    EventKind::DriverStandby, EventKind::BrakeSignal, EventKind::ClutchSignal,
    EventKind::DriverResume, EventKind::VehicleOff,
};

const std::array<Mode, 4> kAllModes = {Mode::Off, Mode::Engaged, Mode::On, Mode::Disengaged};

bool is_disengaging(EventKind kind) {
    return kind == EventKind::BrakeSignal || kind == EventKind::ClutchSignal ||
           kind == EventKind::DriverOff || kind == EventKind::DriverStandby;
}

}  // namespace

StepResult step(const CcState& state, const CcEvent& event) {
    // VehicleOff cuts power from any mode and erases the speed memory.
    if (event.kind == EventKind::VehicleOff) {
        std::vector<ActionKind> actions;
        if (state.mode == Mode::On) {
            actions.push_back(ActionKind::ActuatorSignalOff);
        }
        actions.push_back(ActionKind::ClearMemory);
        return {{Mode::Off, std::nullopt}, std::move(actions)};
    }

    switch (state.mode) {
        case Mode::Off:
            if (event.kind == EventKind::DriverOn) {
                return {{Mode::Engaged, state.stored_set_speed}, {ActionKind::None}};
            }
            break;

        case Mode::Engaged:
            if (event.kind == EventKind::DriverCcOn) {
                return {{Mode::On, event.set_speed},
                        {ActionKind::ActuatorSignalOn, ActionKind::NotifyDriver}};
            }
            // Fig. 4 reconstruction: the driver may switch the armed system
            // off again without ever engaging control.
            if (event.kind == EventKind::DriverOff) {
                return {{Mode::Off, std::nullopt}, {ActionKind::None}};
            }
            break;

        case Mode::On:
            if (is_disengaging(event.kind)) {
                return {{Mode::Disengaged, state.stored_set_speed},
                        {ActionKind::ActuatorSignalOff}};
            }
            break;

        case Mode::Disengaged:
            if (event.kind == EventKind::DriverResume) {
                if (!state.stored_set_speed.has_value()) {
                    throw ResumeWithoutMemory();
                }
                return {{Mode::On, state.stored_set_speed}, {ActionKind::ActuatorSignalOn}};
            }
            if (event.kind == EventKind::DriverCcOn) {
                return {{Mode::On, event.set_speed}, {ActionKind::ActuatorSignalOn}};
            }
            break;
    }

    // Self-loop for every pair the transition table does not list.
    return {state, {ActionKind::None}};
}

bool is_safe_mode(Mode mode) { return mode == Mode::Disengaged || mode == Mode::Off; }

bool is_safe_state(const CcState& state) { return is_safe_mode(state.mode); }

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::Off: return "Off";
        case Mode::Engaged: return "Engaged";
        case Mode::On: return "On";
        case Mode::Disengaged: return "Disengaged";
    }
    return "?";
}

std::string event_name(EventKind kind) {
    switch (kind) {
        case EventKind::DriverOn: return "DriverOn";
        case EventKind::DriverCcOn: return "DriverCcOn";
        case EventKind::DriverOff: return "DriverOff";
        case EventKind::DriverStandby: return "DriverStandby";
        case EventKind::BrakeSignal: return "BrakeSignal";
        case EventKind::ClutchSignal: return "ClutchSignal";
        case EventKind::DriverResume: return "DriverResume";
        case EventKind::VehicleOff: return "VehicleOff";
    }
    return "?";
}

std::string action_name(ActionKind kind) {
    switch (kind) {
        case ActionKind::ActuatorSignalOn: return "ActuatorSignalOn";
        case ActionKind::ActuatorSignalOff: return "ActuatorSignalOff";
        case ActionKind::ClearMemory: return "ClearMemory";
        case ActionKind::NotifyDriver: return "NotifyDriver";
        case ActionKind::None: return "None";
    }
    return "?";
}

std::optional<Mode> mode_from_name(const std::string& name) {
    for (Mode m : kAllModes) {
        if (mode_name(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

std::optional<EventKind> event_from_name(const std::string& name) {
    for (EventKind k : kAllEvents) {
        if (event_name(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<Mode> mode_from_safe_state_name(const std::string& name) {
    std::string plain = name;
    if (plain.rfind("CC_", 0) == 0) {
        plain = plain.substr(3);
    }
    return mode_from_name(plain);
}

std::string export_transition_table() {
    std::ostringstream out;
    out << "state,event,next_state,actions\n";
    for (Mode mode : kAllModes) {
        // Canonical memory content: On and Disengaged carry a stored speed.
        CcState state{mode, std::nullopt};
        if (mode == Mode::On || mode == Mode::Disengaged) {
            state.stored_set_speed = 25.0;
        }
        for (EventKind kind : kAllEvents) {
            CcEvent event{kind, kind == EventKind::DriverCcOn ? 25.0 : 0.0};
            StepResult result = step(state, event);
            out << mode_name(mode) << ',' << event_name(kind) << ','
                << mode_name(result.state.mode) << ',';
            for (std::size_t i = 0; i < result.actions.size(); ++i) {
                if (i > 0) {
                    out << '|';
                }
                out << action_name(result.actions[i]);
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace cruisesafe::ccstate
