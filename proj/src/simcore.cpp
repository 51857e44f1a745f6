#include "cruisesafe/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cruisesafe/detail/json_util.hpp"
#include "cruisesafe/safemon.hpp"

namespace cruisesafe::simcore {

using detail::json;

namespace {

constexpr double kTimeEps = 1e-9;

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

/// xorshift64*; keeps the Intermittent fault stream identical across
/// platforms, which std::uniform_real_distribution would not.
std::uint64_t xorshift_next(std::uint64_t& s) {
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    return s * 0x2545F4914F6CDD1DULL;
}

double uniform01(std::uint64_t& s) {
    return static_cast<double>(xorshift_next(s) >> 11) * (1.0 / 9007199254740992.0);
}

double* target_signal(SignalBundle& bundle, FaultTarget target) {
    switch (target) {
        case FaultTarget::SpeedFeedback: return &bundle.speed_feedback;
        case FaultTarget::DriverInterface: return &bundle.driver_set_speed;
        case FaultTarget::ActuatorCommand: return &bundle.actuator_command;
    }
    return nullptr;
}

FaultTarget fault_target_from_name(const std::string& name, const std::string& ctx) {
    if (name == "SpeedFeedback") return FaultTarget::SpeedFeedback;
    if (name == "DriverInterface") return FaultTarget::DriverInterface;
    if (name == "ActuatorCommand") return FaultTarget::ActuatorCommand;
    throw ParseError("unknown fault target '" + name + "' in " + ctx);
}

FaultKind fault_kind_from_json(const json& fj, const std::string& ctx) {
    const std::string kind = detail::expect_string(fj, "kind", ctx);
    if (kind == "Offset") return OffsetFault{detail::expect_number(fj, "value", ctx)};
    if (kind == "Gain") return GainFault{detail::expect_number(fj, "factor", ctx)};
    if (kind == "StuckAt") return StuckAtFault{detail::expect_number(fj, "value", ctx)};
    if (kind == "Dropout") return DropoutFault{};
    if (kind == "Delay") {
        return DelayFault{static_cast<int>(detail::expect_number(fj, "steps", ctx))};
    }
    if (kind == "Intermittent") {
        return IntermittentFault{
            detail::expect_number(fj, "probability", ctx),
            static_cast<std::uint32_t>(detail::expect_number(fj, "seed", ctx))};
    }
    throw ParseError("unknown fault kind '" + kind + "' in " + ctx);
}

std::string fault_kind_name(const FaultKind& kind) {
    if (std::holds_alternative<OffsetFault>(kind)) return "Offset";
    if (std::holds_alternative<GainFault>(kind)) return "Gain";
    if (std::holds_alternative<StuckAtFault>(kind)) return "StuckAt";
    if (std::holds_alternative<DropoutFault>(kind)) return "Dropout";
    if (std::holds_alternative<DelayFault>(kind)) return "Delay";
    return "Intermittent";
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

double plant_step(double v, double throttle, const PlantParams& p, double dt) {
    const double traction = throttle * p.max_traction_force;
    const double drag = p.drag_area_coeff * v * v;
    const double rolling = p.rolling_coeff * p.mass * p.gravity;
    const double v_next = v + dt * (traction - drag - rolling) / p.mass;
    return std::max(0.0, v_next);
}

double equilibrium_throttle(double v, const PlantParams& p) {
    return (p.drag_area_coeff * v * v + p.rolling_coeff * p.mass * p.gravity) /
           p.max_traction_force;
}

ControllerOutput controller_step(double v_measured, double v_set, double integrator,
                                 const ControllerParams& c, double dt) {
    const double error = v_set - v_measured;
    const double integ = clamp(integrator + error * dt, c.integrator_min, c.integrator_max);
    const double throttle = clamp(c.kp * error + c.ki * integ, c.output_min, c.output_max);
    return {throttle, integ};
}

std::vector<FaultState> make_fault_states(const std::vector<FaultSpec>& faults) {
    std::vector<FaultState> states(faults.size());
    for (std::size_t i = 0; i < faults.size(); ++i) {
        if (const auto* im = std::get_if<IntermittentFault>(&faults[i].kind)) {
            // Non-zero odd-mixed seed so xorshift never sticks at zero.
            states[i].rng = (static_cast<std::uint64_t>(im->seed) << 1) | 1ULL;
            states[i].rng *= 0x9E3779B97F4A7C15ULL;
            if (states[i].rng == 0) states[i].rng = 1;
        }
    }
    return states;
}

bool fault_window_active(const FaultSpec& fault, double t) {
    return t >= fault.t_start - kTimeEps && t <= fault.t_end + kTimeEps;
}

namespace {

/// Applies the subset of faults selected by `take`; each fault's state must
/// be advanced exactly once per time step across all calls for that step.
template <typename Pred>
SignalBundle apply_faults_filtered(const SignalBundle& signals, const std::vector<FaultSpec>& faults,
                                   std::vector<FaultState>& states, double t, Pred take) {
    SignalBundle out = signals;
    for (std::size_t i = 0; i < faults.size(); ++i) {
        const FaultSpec& f = faults[i];
        if (!take(f)) {
            continue;
        }
        FaultState& st = states[i];
        double* sig = target_signal(out, f.target);
        const double input = *sig;  // post-preceding-faults value this step

        const bool active = fault_window_active(f, t);
        if (!active) {
            st.was_active = false;
            st.held = input;
            st.has_held = true;
            if (std::holds_alternative<DelayFault>(f.kind)) {
                st.history.push_back(input);
            }
            continue;
        }

        if (!st.was_active) {
            st.was_active = true;
            st.latched = st.has_held ? st.held : input;
        }

        if (const auto* offset = std::get_if<OffsetFault>(&f.kind)) {
            *sig = input + offset->value;
        } else if (const auto* gain = std::get_if<GainFault>(&f.kind)) {
            *sig = input * gain->factor;
        } else if (const auto* stuck = std::get_if<StuckAtFault>(&f.kind)) {
            *sig = stuck->value;
        } else if (std::holds_alternative<DropoutFault>(f.kind)) {
            *sig = st.latched;
        } else if (const auto* delay = std::get_if<DelayFault>(&f.kind)) {
            st.history.push_back(input);
            const int lag = std::max(0, delay->steps);
            const std::size_t n = st.history.size();
            const std::size_t idx = n > static_cast<std::size_t>(lag) ? n - 1 - lag : 0;
            *sig = st.history.empty() ? input : st.history[idx];
        } else if (const auto* im = std::get_if<IntermittentFault>(&f.kind)) {
            const double u = uniform01(st.rng);
            if (u < im->probability) {
                *sig = st.has_held ? st.held : input;  // glitch: sample dropped
            } else {
                st.held = input;
                st.has_held = true;
            }
        }
    }
    return out;
}

void validate_scenario(const Scenario& sc) {
    if (!(sc.dt > 0.0)) throw InvalidScenario("dt", "must be > 0");
    if (!(sc.duration >= sc.dt)) throw InvalidScenario("duration", "must be >= dt");
    if (!(sc.initial_speed >= 0.0)) throw InvalidScenario("initial_speed", "must be >= 0");
    if (!(sc.plant.mass >= 100.0)) throw InvalidScenario("plant.mass", "must be >= 100");
    if (!(sc.plant.max_traction_force > 0.0)) {
        throw InvalidScenario("plant.max_traction_force", "must be > 0");
    }
    if (!(sc.plant.drag_area_coeff > 0.0)) {
        throw InvalidScenario("plant.drag_area_coeff", "must be > 0");
    }
    if (!(sc.plant.rolling_coeff > 0.0)) {
        throw InvalidScenario("plant.rolling_coeff", "must be > 0");
    }
    if (!(sc.plant.gravity > 0.0)) throw InvalidScenario("plant.gravity", "must be > 0");
    if (sc.controller.kp < 0.0) throw InvalidScenario("controller.kp", "must be >= 0");
    if (sc.controller.ki < 0.0) throw InvalidScenario("controller.ki", "must be >= 0");
    if (!(sc.controller.output_min < sc.controller.output_max)) {
        throw InvalidScenario("controller.output_min", "limits must be well-ordered");
    }
    if (!(sc.controller.integrator_min < sc.controller.integrator_max)) {
        throw InvalidScenario("controller.integrator_min", "clamp bounds must be well-ordered");
    }
    for (const auto& ev : sc.events) {
        if (ev.t < 0.0 || ev.t > sc.duration + kTimeEps) {
            throw InvalidScenario("events", "event time outside [0, duration]");
        }
        if (ev.event.kind == ccstate::EventKind::DriverCcOn && !(ev.event.set_speed > 0.0)) {
            throw InvalidScenario("events", "DriverCcOn must carry a strictly positive set speed");
        }
    }
    for (const auto& p : sc.pedal) {
        if (p.value < 0.0 || p.value > 1.0) {
            throw InvalidScenario("pedal", "pedal level must be in [0, 1]");
        }
    }
    for (const auto& f : sc.faults) {
        if (f.t_start > f.t_end) {
            throw InvalidScenario("faults", "fault window start exceeds end");
        }
        if (f.t_start < -kTimeEps || f.t_end > sc.duration + kTimeEps) {
            throw InvalidScenario("faults", "fault window outside scenario duration");
        }
        if (const auto* im = std::get_if<IntermittentFault>(&f.kind)) {
            if (im->probability < 0.0 || im->probability > 1.0) {
                throw InvalidScenario("faults", "intermittent probability must be in [0, 1]");
            }
        }
    }
}

Trace simulate(const Scenario& sc, const safemon::MonitorTable* table) {
    validate_scenario(sc);

    safemon::MonitorTable local_table;
    if (sc.monitor_enabled && table == nullptr) {
        safemon::CalibrationConfig cfg;
        cfg.dt = sc.dt;
        cfg.plant = sc.plant;
        cfg.controller = sc.controller;
        local_table = safemon::calibrate(cfg);
        table = &local_table;
    }
    if (sc.monitor_enabled) {
        safemon::require_metadata_match(*table, sc.plant, sc.controller, sc.dt);
    }

    const std::size_t steps = static_cast<std::size_t>(std::floor(sc.duration / sc.dt + kTimeEps));

    Trace trace;
    trace.rows.reserve(steps + 1);

    double v_actual = sc.initial_speed;
    double integrator = 0.0;
    ccstate::CcState cc;
    std::vector<FaultState> fault_states = make_fault_states(sc.faults);
    safemon::MonitorState monitor;

    // Monitoring context, valid from the first engagement on.
    bool engaged_once = false;
    std::size_t engagement_step = 0;
    double engagement_v0 = 0.0;

    std::size_t next_event = 0;
    std::size_t next_pedal = 0;
    double pedal_level = 0.0;

    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * sc.dt;

        // Script events due by this step, in script order.
        bool event_applied = false;
        while (next_event < sc.events.size() && sc.events[next_event].t <= t + kTimeEps) {
            const ccstate::CcEvent& ev = sc.events[next_event].event;
            if (ev.kind == ccstate::EventKind::DriverCcOn) {
                safemon::reset_on_reengagement(monitor);
            }
            const bool was_on = cc.mode == ccstate::Mode::On;
            try {
                auto result = ccstate::step(cc, ev);
                cc = result.state;
            } catch (const ResumeWithoutMemory&) {
                // Misuse is rejected; the state machine stays put.
            }
            if (!was_on && cc.mode == ccstate::Mode::On) {
                engaged_once = true;
                engagement_step = k;
                engagement_v0 = v_actual;
                integrator = 0.0;
            }
            event_applied = true;
            ++next_event;
        }
        if (event_applied) {
            trace.script_event_steps.push_back(k);
        }

        while (next_pedal < sc.pedal.size() && sc.pedal[next_pedal].t <= t + kTimeEps) {
            pedal_level = sc.pedal[next_pedal].value;
            ++next_pedal;
        }
        const double throttle_driver = pedal_level;

        // Signal path with fault entry points: speed feedback and driver
        // set-speed are corrupted before the controller, the actuator
        // command after it.
        SignalBundle signals;
        signals.speed_feedback = v_actual;
        signals.driver_set_speed = cc.stored_set_speed.value_or(0.0);
        const bool controlling = cc.mode == ccstate::Mode::On && !monitor.latched_error;
        double raw_throttle = 0.0;
        if (controlling) {
            SignalBundle pre = apply_faults(signals, sc.faults, fault_states, t);
            auto out =
                controller_step(pre.speed_feedback, pre.driver_set_speed, integrator, sc.controller,
                                sc.dt);
            raw_throttle = out.throttle;
            integrator = out.integrator;
            signals = pre;
        } else {
            integrator = 0.0;
            SignalBundle pre = apply_faults(signals, sc.faults, fault_states, t);
            signals = pre;
        }
        signals.actuator_command = controlling ? raw_throttle : 0.0;

        // Actuator-command faults act downstream of the mode gate, so a
        // stuck or spurious command can move the vehicle outside On.
        {
            SignalBundle gated = signals;
            std::vector<FaultSpec> actuator_faults;
            std::vector<FaultState*> actuator_states;
            for (std::size_t i = 0; i < sc.faults.size(); ++i) {
                if (sc.faults[i].target == FaultTarget::ActuatorCommand) {
                    actuator_faults.push_back(sc.faults[i]);
                    actuator_states.push_back(&fault_states[i]);
                }
            }
            // Apply in declaration order against the gated command.
            for (std::size_t i = 0; i < actuator_faults.size(); ++i) {
                std::vector<FaultSpec> one{actuator_faults[i]};
                std::vector<FaultState> tmp{*actuator_states[i]};
                gated = apply_faults(gated, one, tmp, t);
                *actuator_states[i] = tmp[0];
            }
            signals.actuator_command = gated.actuator_command;
        }

        double throttle_cc = clamp(signals.actuator_command, 0.0, 1.0);
        if (monitor.latched_error) {
            throttle_cc = 0.0;  // throttle path stays cut until re-engagement
        }

        // Safety monitor on the commanded cruise-control throttle.
        if (sc.monitor_enabled && cc.mode == ccstate::Mode::On && !monitor.latched_error &&
            engaged_once) {
            safemon::MonitorContext ctx;
            ctx.v0 = engagement_v0;
            ctx.v_set = cc.stored_set_speed.value_or(0.0);
            ctx.t_since_engagement = static_cast<double>(k - engagement_step) * sc.dt;
            ctx.driver_override = throttle_driver > throttle_cc;
            const double observed_rate = (throttle_cc - monitor.last_throttle) / sc.dt;
            const bool error = safemon::monitor_step(monitor, throttle_cc, observed_rate, ctx,
                                                     *table);
            if (error) {
                auto forced = safemon::enforce_safe_state(true, cc);
                cc = forced.state;
                throttle_cc = 0.0;
            }
        }
        monitor.last_throttle = throttle_cc;

        bool fault_active = false;
        for (const auto& f : sc.faults) {
            fault_active = fault_active || fault_window_active(f, t);
        }

        TraceRow row;
        row.t = t;
        row.v_actual = v_actual;
        row.v_measured = signals.speed_feedback;
        row.v_set = cc.stored_set_speed.value_or(0.0);
        row.throttle_cc = throttle_cc;
        row.throttle_driver = throttle_driver;
        row.cc_mode = cc.mode;
        row.fault_active = fault_active;
        row.monitor_error = monitor.latched_error;
        trace.rows.push_back(row);

        // Driver accelerator override: the plant sees the larger demand.
        const double throttle_plant = std::max(throttle_cc, throttle_driver);
        v_actual = plant_step(v_actual, throttle_plant, sc.plant, sc.dt);
    }

    return trace;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    Scenario sc = scenario_from_json_text(text.str(), path);
    if (sc.monitor_table_path && !sc.monitor_table_path->empty() &&
        sc.monitor_table_path->front() != '/') {
        sc.monitor_table_path = detail::join_path(detail::dir_of(path), *sc.monitor_table_path);
    }
    return sc;
}

Scenario scenario_from_json_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }

    Scenario sc;
    sc.id = detail::expect_string(doc, "id", origin);
    sc.dt = detail::get_number_or(doc, "dt", sc.dt);
    sc.duration = detail::expect_number(doc, "duration", origin);
    sc.initial_speed = detail::expect_number(doc, "initial_speed", origin);

    if (auto it = doc.find("plant"); it != doc.end()) {
        const json& p = *it;
        sc.plant.mass = detail::get_number_or(p, "mass", sc.plant.mass);
        sc.plant.max_traction_force =
            detail::get_number_or(p, "max_traction_force", sc.plant.max_traction_force);
        sc.plant.drag_area_coeff =
            detail::get_number_or(p, "drag_area_coeff", sc.plant.drag_area_coeff);
        sc.plant.rolling_coeff = detail::get_number_or(p, "rolling_coeff", sc.plant.rolling_coeff);
        sc.plant.gravity = detail::get_number_or(p, "gravity", sc.plant.gravity);
    }
    if (auto it = doc.find("controller"); it != doc.end()) {
        const json& c = *it;
        sc.controller.kp = detail::get_number_or(c, "kp", sc.controller.kp);
        sc.controller.ki = detail::get_number_or(c, "ki", sc.controller.ki);
        sc.controller.output_min = detail::get_number_or(c, "output_min", sc.controller.output_min);
        sc.controller.output_max = detail::get_number_or(c, "output_max", sc.controller.output_max);
        sc.controller.integrator_min =
            detail::get_number_or(c, "integrator_min", sc.controller.integrator_min);
        sc.controller.integrator_max =
            detail::get_number_or(c, "integrator_max", sc.controller.integrator_max);
    }

    if (auto it = doc.find("events"); it != doc.end()) {
        for (const auto& ej : *it) {
            ScriptEvent ev;
            ev.t = detail::expect_number(ej, "t", "event");
            const std::string name = detail::expect_string(ej, "event", "event");
            auto kind = ccstate::event_from_name(name);
            if (!kind) {
                throw ParseError("unknown event '" + name + "' in " + origin);
            }
            ev.event.kind = *kind;
            if (*kind == ccstate::EventKind::DriverCcOn) {
                ev.event.set_speed = detail::expect_number(ej, "set_speed", "event");
            }
            sc.events.push_back(ev);
        }
    }
    if (auto it = doc.find("pedal"); it != doc.end()) {
        for (const auto& pj : *it) {
            sc.pedal.push_back(
                {detail::expect_number(pj, "t", "pedal"), detail::expect_number(pj, "value", "pedal")});
        }
    }
    if (auto it = doc.find("faults"); it != doc.end()) {
        for (const auto& fj : *it) {
            FaultSpec f;
            const std::string ctx = "fault in " + origin;
            f.target = fault_target_from_name(detail::expect_string(fj, "target", ctx), ctx);
            f.kind = fault_kind_from_json(fj, ctx);
            const json& window = detail::expect_array(fj, "window", ctx);
            if (window.size() != 2) {
                throw ParseError("fault window must be [t_start, t_end] in " + origin);
            }
            f.t_start = window[0].get<double>();
            f.t_end = window[1].get<double>();
            sc.faults.push_back(std::move(f));
        }
    }
    sc.monitor_enabled = detail::get_bool_or(doc, "monitor_enabled", false);
    if (auto it = doc.find("monitor_table"); it != doc.end() && !it->is_null()) {
        sc.monitor_table_path = it->get<std::string>();
    }
    if (auto it = doc.find("expected_hazard"); it != doc.end() && !it->is_null()) {
        sc.expected_hazard = it->get<std::string>();
    }

    validate_scenario(sc);
    return sc;
}

std::string trace_to_csv(const Trace& trace) {
    std::ostringstream out;
    out << "t,v_actual,v_measured,v_set,throttle_cc,throttle_driver,cc_mode,fault_active,"
           "monitor_error\n";
    for (const auto& r : trace.rows) {
        out << fmt_double(r.t) << ',' << fmt_double(r.v_actual) << ',' << fmt_double(r.v_measured)
            << ',' << fmt_double(r.v_set) << ',' << fmt_double(r.throttle_cc) << ','
            << fmt_double(r.throttle_driver) << ',' << ccstate::mode_name(r.cc_mode) << ','
            << (r.fault_active ? 1 : 0) << ',' << (r.monitor_error ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("io_error", "cannot write file: " + path);
    }
    out << trace_to_csv(trace);
}

Trace trace_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) ||
        line != "t,v_actual,v_measured,v_set,throttle_cc,throttle_driver,cc_mode,fault_active,"
                "monitor_error") {
        throw ParseError(path + ": unexpected trace header");
    }
    Trace trace;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 9) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 9 fields");
        }
        TraceRow r;
        try {
            r.t = std::stod(fields[0]);
            r.v_actual = std::stod(fields[1]);
            r.v_measured = std::stod(fields[2]);
            r.v_set = std::stod(fields[3]);
            r.throttle_cc = std::stod(fields[4]);
            r.throttle_driver = std::stod(fields[5]);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed number");
        }
        auto mode = ccstate::mode_from_name(fields[6]);
        if (!mode) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": unknown mode " + fields[6]);
        }
        r.cc_mode = *mode;
        r.fault_active = fields[7] == "1";
        r.monitor_error = fields[8] == "1";
        trace.rows.push_back(r);
    }
    return trace;
}

std::string fault_target_name(FaultTarget target) {
    switch (target) {
        case FaultTarget::SpeedFeedback: return "SpeedFeedback";
        case FaultTarget::DriverInterface: return "DriverInterface";
        case FaultTarget::ActuatorCommand: return "ActuatorCommand";
    }
    return "?";
}

}  // namespace cruisesafe::simcore
