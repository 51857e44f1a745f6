#pragma once

#include <string>
#include <vector>

#include "cruisesafe/ccstate.hpp"
#include "cruisesafe/errors.hpp"
#include "cruisesafe/simcore.hpp"

namespace cruisesafe::safemon {

/// Speed envelope the monitor is calibrated for: bin centers at
/// v_min, v_min + bin_width, ..., v_max for both the initial speed and the
/// set speed.
struct Envelope {
    double v_min = 15.0;
    double v_max = 35.0;
    double bin_width = 5.0;

    bool operator==(const Envelope&) const = default;

    [[nodiscard]] std::vector<double> centers() const;
};

struct CalibrationConfig {
    Envelope envelope;
    double dt = 0.01;
    double profile_duration = 90.0;  // calibrated horizon per cell (s)
    double settle_tolerance = 0.25;  // fault-free settling check (m/s)
    double abs_tol_rate = 0.02;      // 1/s
    double abs_tol_level = 0.02;     // throttle fraction
    double rel_tol = 0.2;
    int debounce_steps = 20;
    simcore::PlantParams plant;
    simcore::ControllerParams controller;
};

/// Expected actuation for one (initial speed, set speed) cell: the throttle
/// trajectory observed in a fault-free run, sampled every dt from the moment
/// of engagement. Rates are the first differences of the levels.
struct MonitorCell {
    double v0 = 0.0;
    double v_set = 0.0;
    std::vector<double> levels;
};

/// Calibrated lookup table of expected actuation against time since
/// engagement. Immutable after calibration; beyond the calibrated horizon
/// the final (settled) sample applies.
struct MonitorTable {
    Envelope envelope;
    double dt = 0.01;
    double profile_duration = 90.0;
    double abs_tol_rate = 0.02;
    double abs_tol_level = 0.02;
    double rel_tol = 0.2;
    int debounce_steps = 20;
    simcore::PlantParams plant;
    simcore::ControllerParams controller;
    std::vector<MonitorCell> cells;

    [[nodiscard]] const MonitorCell& cell(double v0, double v_set) const;  // throws OutOfEnvelope
    [[nodiscard]] bool in_envelope(double v0, double v_set) const;

    /// Expected throttle level and rate at the given time since engagement.
    struct Expectation {
        double level = 0.0;
        double rate = 0.0;
    };
    [[nodiscard]] Expectation expected(const MonitorCell& cell, double t_since_engagement) const;
};

struct MonitorState {
    bool latched_error = false;
    int consecutive_deviation_steps = 0;
    double last_throttle = 0.0;
};

struct MonitorContext {
    double v0 = 0.0;       // speed at engagement
    double v_set = 0.0;    // stored set speed
    double t_since_engagement = 0.0;
    bool driver_override = false;  // throttle_driver > throttle_cc
};

/// Runs one fault-free simulation per grid cell and records the actuation
/// profiles. Throws CalibrationDiverged when a run misses its settling check.
MonitorTable calibrate(const CalibrationConfig& config);

/// Compares the observed actuation against the table entry for the context.
/// A step deviates when either the throttle level or its rate leaves the
/// tolerance band; after debounce_steps consecutive deviations the error
/// latches. Driver-override steps are not monitored. A context outside the
/// calibrated grid is an immediate error. Returns true when the error is
/// latched.
bool monitor_step(MonitorState& state, double observed_level, double observed_rate,
                  const MonitorContext& context, const MonitorTable& table);

/// Clears the latch; only a fresh driver engagement may call this.
void reset_on_reengagement(MonitorState& state);

/// Forces the safe state: with an active error and mode On the cruise
/// control is disengaged and the actuator released; otherwise identity.
ccstate::StepResult enforce_safe_state(bool error, const ccstate::CcState& cc);

/// Serialization with embedded calibration metadata.
std::string table_to_json(const MonitorTable& table);
void save_table(const MonitorTable& table, const std::string& path);
MonitorTable load_table(const std::string& path);

/// Refuses tables whose metadata differs from the parameters the simulation
/// is about to use. Throws TableMismatch naming the first differing field.
void require_metadata_match(const MonitorTable& table, const simcore::PlantParams& plant,
                            const simcore::ControllerParams& controller, double dt);

}  // namespace cruisesafe::safemon
