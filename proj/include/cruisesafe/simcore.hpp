#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cruisesafe/ccstate.hpp"
#include "cruisesafe/errors.hpp"

namespace cruisesafe::safemon {
struct MonitorTable;  // full definition in safemon.hpp
}

namespace cruisesafe::simcore {

/// Longitudinal point-mass plant. drag_area_coeff is the lumped 0.5*rho*Cd*A
/// term (kg/m), so drag force = drag_area_coeff * v^2.
struct PlantParams {
    double mass = 1500.0;               // kg
    double max_traction_force = 4000.0; // N at full throttle
    double drag_area_coeff = 0.46;      // kg/m
    double rolling_coeff = 0.01;        // dimensionless
    double gravity = 9.81;              // m/s^2

    bool operator==(const PlantParams&) const = default;
};

/// PI speed controller with output clamped to [0, 1] and anti-windup clamp
/// on the integrator state.
struct ControllerParams {
    double kp = 0.12;
    double ki = 0.02;
    double output_min = 0.0;
    double output_max = 1.0;
    double integrator_min = -50.0;
    double integrator_max = 50.0;

    bool operator==(const ControllerParams&) const = default;
};

enum class FaultTarget { SpeedFeedback, DriverInterface, ActuatorCommand };

struct OffsetFault { double value = 0.0; };
struct GainFault { double factor = 1.0; };
struct StuckAtFault { double value = 0.0; };
struct DropoutFault {};
struct DelayFault { int steps = 1; };
struct IntermittentFault { double probability = 0.0; std::uint32_t seed = 0; };

using FaultKind = std::variant<OffsetFault, GainFault, StuckAtFault, DropoutFault, DelayFault,
                               IntermittentFault>;

/// One fault entry point: a transformation of a model signal inside a time
/// window. Offset adds, Gain multiplies, StuckAt forces the payload value,
/// Dropout holds the last sample seen before the window opened, Delay replays
/// a lagged sample, Intermittent drops individual samples with the seeded
/// per-step probability. Multiple faults on one target compose in
/// declaration order.
struct FaultSpec {
    FaultTarget target = FaultTarget::SpeedFeedback;
    FaultKind kind = OffsetFault{};
    double t_start = 0.0;
    double t_end = 0.0;
};

/// One timed driver-interface event for the state machine.
struct ScriptEvent {
    double t = 0.0;
    ccstate::CcEvent event;
};

/// Accelerator-pedal level from time t onward (piecewise constant).
struct PedalSetting {
    double t = 0.0;
    double value = 0.0;
};

struct Scenario {
    std::string id;
    double dt = 0.01;        // s
    double duration = 120.0; // s
    double initial_speed = 0.0;
    PlantParams plant;
    ControllerParams controller;
    std::vector<ScriptEvent> events;
    std::vector<PedalSetting> pedal;
    std::vector<FaultSpec> faults;
    bool monitor_enabled = false;
    std::optional<std::string> monitor_table_path;
    /// Authored metadata: the hazard this scenario's fault models, used by
    /// the campaign report to name the goals a successful detection protects.
    std::optional<std::string> expected_hazard;
};

struct TraceRow {
    double t = 0.0;
    double v_actual = 0.0;
    double v_measured = 0.0;
    double v_set = 0.0;
    double throttle_cc = 0.0;
    double throttle_driver = 0.0;
    ccstate::Mode cc_mode = ccstate::Mode::Off;
    bool fault_active = false;
    bool monitor_error = false;

    bool operator==(const TraceRow&) const = default;
};

struct Trace {
    std::vector<TraceRow> rows;
    /// Step indices at which a script event was applied; lets the classifier
    /// tell commanded mode changes from spontaneous ones.
    std::vector<std::size_t> script_event_steps;

    bool operator==(const Trace&) const = default;
};

/// One explicit-Euler step of the plant:
/// v' = max(0, v + dt * (throttle*F_max - drag*v^2 - c_rr*m*g) / m).
double plant_step(double v, double throttle, const PlantParams& p, double dt);

/// Equilibrium throttle that holds speed v on the default flat road.
double equilibrium_throttle(double v, const PlantParams& p);

/// One PI update. Returns the clamped throttle and the new integrator state.
struct ControllerOutput {
    double throttle = 0.0;
    double integrator = 0.0;
};
ControllerOutput controller_step(double v_measured, double v_set, double integrator,
                                 const ControllerParams& c, double dt);

/// The three corruptible model signals of one step.
struct SignalBundle {
    double speed_feedback = 0.0;
    double driver_set_speed = 0.0;
    double actuator_command = 0.0;
};

/// Per-fault runtime memory (latched values, delay history, RNG stream).
/// Create once per simulation with make_fault_states and pass to every
/// apply_faults call.
struct FaultState {
    bool was_active = false;
    double latched = 0.0;
    std::vector<double> history;  // input samples for Delay
    std::uint64_t rng = 0;        // xorshift state for Intermittent
    double held = 0.0;            // last input sample for Dropout/Intermittent
    bool has_held = false;
};

std::vector<FaultState> make_fault_states(const std::vector<FaultSpec>& faults);

bool fault_window_active(const FaultSpec& fault, double t);

/// Applies every active fault to its target signal, composing in declaration
/// order. `states` must parallel `faults`.
SignalBundle apply_faults(const SignalBundle& signals, const std::vector<FaultSpec>& faults,
                          std::vector<FaultState>& states, double t);

/// Runs the fixed-step closed-loop simulation: plant, PI controller, state
/// machine, fault injection, and (when enabled) the safety monitor. The
/// result is deterministic for a given scenario, including fault seeds.
///
/// When the scenario enables the monitor and no table is passed, one is
/// calibrated on the fly over the default 15..35 m/s envelope using the
/// scenario's own plant/controller parameters.
Trace simulate(const Scenario& scenario, const safemon::MonitorTable* table = nullptr);

/// Checks every scenario invariant; throws InvalidScenario naming the field.
void validate_scenario(const Scenario& scenario);

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text, const std::string& origin = "<string>");

/// CSV export with the fixed header
/// t,v_actual,v_measured,v_set,throttle_cc,throttle_driver,cc_mode,fault_active,monitor_error
/// and floating values at 12 significant digits.
std::string trace_to_csv(const Trace& trace);
void write_trace_csv(const Trace& trace, const std::string& path);
Trace trace_from_csv(const std::string& path);

std::string fault_target_name(FaultTarget target);

}  // namespace cruisesafe::simcore
