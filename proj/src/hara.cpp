#include "cruisesafe/hara.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cruisesafe/detail/json_util.hpp"

namespace cruisesafe::hara {

using detail::json;

namespace {

std::string pad2(std::size_t n) {
    std::ostringstream out;
    if (n < 10) out << '0';
    out << n;
    return out.str();
}

Severity severity_from_name(const std::string& s, const std::string& ctx) {
    for (int i = 0; i <= 3; ++i) {
        if (s == "S" + std::to_string(i)) return static_cast<Severity>(i);
    }
    throw ParseError("invalid severity '" + s + "' in " + ctx);
}

Exposure exposure_from_name(const std::string& s, const std::string& ctx) {
    for (int i = 0; i <= 4; ++i) {
        if (s == "E" + std::to_string(i)) return static_cast<Exposure>(i);
    }
    throw ParseError("invalid exposure '" + s + "' in " + ctx);
}

Controllability controllability_from_name(const std::string& s, const std::string& ctx) {
    for (int i = 0; i <= 3; ++i) {
        if (s == "C" + std::to_string(i)) return static_cast<Controllability>(i);
    }
    throw ParseError("invalid controllability '" + s + "' in " + ctx);
}

OperatingMode operating_mode_from_name(const std::string& s, const std::string& ctx) {
    if (s == "MediumSpeed") return OperatingMode::MediumSpeed;
    if (s == "HighSpeed") return OperatingMode::HighSpeed;
    if (s == "Cornering") return OperatingMode::Cornering;
    throw ParseError("invalid operating mode '" + s + "' in " + ctx);
}

/// Default failure description when the fixture does not author one.
std::string guideword_phrase(Guideword g) {
    switch (g) {
        case Guideword::LossOfFunction: return "loss of function";
        case Guideword::MoreThanIntended: return "more function than intended";
        case Guideword::LessThanIntended: return "less function than intended";
        case Guideword::WrongDirection: return "wrong direction of function";
        case Guideword::UnintendedActivation: return "unintended activation of function";
        case Guideword::FailureToUpdate: return "failure of function to update as intended";
    }
    return "?";
}

}  // namespace

AsilTable AsilTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return from_json_text(text.str(), path);
}

AsilTable AsilTable::from_json_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    AsilTable table;
    const json& entries = detail::expect_array(doc, "entries", origin);
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& e : entries) {
        const std::string ctx = "asil table entry";
        int s = static_cast<int>(severity_from_name(detail::expect_string(e, "s", ctx), ctx));
        int x = static_cast<int>(exposure_from_name(detail::expect_string(e, "e", ctx), ctx));
        int c = static_cast<int>(
            controllability_from_name(detail::expect_string(e, "c", ctx), ctx));
        auto asil = asil_from_name(detail::expect_string(e, "asil", ctx));
        if (!asil) {
            throw ParseError("invalid asil value in " + origin);
        }
        if (!seen.insert({s, x, c}).second) {
            throw ParseError("duplicate determination entry in " + origin);
        }
        table.cells_[s][x][c] = *asil;
    }
    if (seen.size() != 4u * 5u * 4u) {
        throw ParseError(origin + ": determination table must contain all 80 S/E/C combinations");
    }
    return table;
}

Asil AsilTable::lookup(const SecRating& r) const {
    return cells_[static_cast<int>(r.severity)][static_cast<int>(r.exposure)]
                 [static_cast<int>(r.controllability)];
}

Asil asil_of(const SecRating& rating, const AsilTable& table) { return table.lookup(rating); }

std::vector<Malfunction> derive_malfunctions(const std::vector<std::string>& functionalities,
                                             const std::vector<GuidewordApplication>& applicability) {
    std::set<std::pair<int, int>> seen;
    for (const auto& a : applicability) {
        if (a.function_ref < 0 || a.function_ref >= static_cast<int>(functionalities.size())) {
            throw UnknownId("functionality #" + std::to_string(a.function_ref));
        }
        if (!seen.insert({a.function_ref, static_cast<int>(a.guideword)}).second) {
            throw DuplicateId("malfunction (" + functionalities[a.function_ref] + ", " +
                              guideword_name(a.guideword) + ")");
        }
    }

    std::vector<GuidewordApplication> ordered = applicability;
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        return std::tie(a.function_ref, a.guideword) < std::tie(b.function_ref, b.guideword);
    });

    std::vector<Malfunction> out;
    out.reserve(ordered.size());
    for (const auto& a : ordered) {
        Malfunction m;
        m.id = "MF" + pad2(out.size() + 1);
        m.function_ref = a.function_ref;
        m.guideword = a.guideword;
        m.description = a.description.empty()
                            ? "'" + functionalities[a.function_ref] + "' exhibits " +
                                  guideword_phrase(a.guideword)
                            : a.description;
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<HazardousEvent> enumerate_events(const std::vector<Hazard>& hazards,
                                             const std::vector<OperationalSituation>& situations,
                                             const std::vector<RatingEntry>& ratings,
                                             const AsilTable& table) {
    std::vector<HazardousEvent> out;
    for (const Hazard h : hazards) {
        for (const auto& sit : situations) {
            const RatingEntry* entry = nullptr;
            for (const auto& r : ratings) {
                if (r.hazard == h && r.situation_id == sit.id) {
                    entry = &r;
                    break;
                }
            }
            if (entry == nullptr) {
                throw MissingRating(hazard_name(h), sit.id);
            }
            if (!entry->applicable) {
                continue;
            }
            HazardousEvent e;
            e.id = "HE" + pad2(out.size() + 1);
            e.hazard = h;
            e.situation = sit;
            e.rating = entry->rating;
            e.asil = asil_of(entry->rating, table);
            e.rationale = entry->rationale;
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<SafetyGoal> rollup_safety_goals(const std::vector<HazardousEvent>& events,
                                            const std::vector<GoalGroup>& grouping,
                                            const std::string& safe_state) {
    auto safe_mode = ccstate::mode_from_safe_state_name(safe_state);
    if (!safe_mode || !ccstate::is_safe_mode(*safe_mode)) {
        throw ParseError("safe state '" + safe_state + "' does not name a safe mode");
    }

    for (const auto& e : events) {
        bool grouped = std::any_of(grouping.begin(), grouping.end(), [&](const GoalGroup& g) {
            return std::find(g.hazards.begin(), g.hazards.end(), e.hazard) != g.hazards.end();
        });
        if (!grouped) {
            throw UngroupedHazard(hazard_name(e.hazard));
        }
    }

    std::vector<SafetyGoal> goals;
    for (const auto& g : grouping) {
        SafetyGoal goal;
        goal.id = g.id;
        goal.text = g.text;
        goal.safe_state = safe_state;
        goal.asil = Asil::QM;
        bool any = false;
        for (const auto& e : events) {
            if (std::find(g.hazards.begin(), g.hazards.end(), e.hazard) == g.hazards.end()) {
                continue;
            }
            goal.addresses.push_back(e.id);
            goal.asil = std::max(goal.asil, e.asil);
            any = true;
        }
        if (!any) {
            throw EmptyGoalGroup(g.id);
        }
        goals.push_back(std::move(goal));
    }
    return goals;
}

HaraFixture load_fixture(const std::string& path) {
    const json doc = detail::load_json_file(path);
    HaraFixture fx;

    fx.table = AsilTable::load(
        detail::join_path(detail::dir_of(path), detail::expect_string(doc, "asil_table", path)));

    for (const auto& f : detail::expect_array(doc, "functionalities", path)) {
        fx.functionalities.push_back(f.get<std::string>());
    }

    for (const auto& mj : detail::expect_array(doc, "malfunctions", path)) {
        GuidewordApplication app;
        app.function_ref = static_cast<int>(detail::expect_number(mj, "function", "malfunction"));
        auto gw = guideword_from_name(detail::expect_string(mj, "guideword", "malfunction"));
        if (!gw) {
            throw ParseError("invalid guideword in " + path);
        }
        app.guideword = *gw;
        app.description = detail::get_string_or(mj, "description", "");
        fx.applicability.push_back(std::move(app));
    }

    for (const auto& hj : detail::expect_array(doc, "hazards", path)) {
        auto h = hazard_from_name(hj.get<std::string>());
        if (!h) {
            throw ParseError("invalid hazard '" + hj.get<std::string>() + "' in " + path);
        }
        fx.hazards.push_back(*h);
    }

    for (const auto& sj : detail::expect_array(doc, "situations", path)) {
        OperationalSituation s;
        s.id = detail::expect_string(sj, "id", "situation");
        const std::string ctx = "situation '" + s.id + "'";
        s.operating = operating_mode_from_name(detail::expect_string(sj, "operating", ctx), ctx);
        s.environment = detail::get_string_or(sj, "environment", "");
        s.traffic = detail::get_string_or(sj, "traffic", "");
        fx.situations.push_back(std::move(s));
    }

    for (const auto& rj : detail::expect_array(doc, "ratings", path)) {
        RatingEntry r;
        const std::string ctx = "rating entry";
        auto h = hazard_from_name(detail::expect_string(rj, "hazard", ctx));
        if (!h) {
            throw ParseError("invalid hazard in rating entry of " + path);
        }
        r.hazard = *h;
        r.situation_id = detail::expect_string(rj, "situation", ctx);
        r.applicable = detail::get_bool_or(rj, "applicable", true);
        if (r.applicable) {
            r.rating.severity = severity_from_name(detail::expect_string(rj, "severity", ctx), ctx);
            r.rating.exposure = exposure_from_name(detail::expect_string(rj, "exposure", ctx), ctx);
            r.rating.controllability =
                controllability_from_name(detail::expect_string(rj, "controllability", ctx), ctx);
        }
        r.rationale = detail::get_string_or(rj, "rationale", "");
        fx.ratings.push_back(std::move(r));
    }

    for (const auto& gj : detail::expect_array(doc, "goals", path)) {
        GoalGroup g;
        g.id = detail::expect_string(gj, "id", "goal");
        g.text = detail::expect_string(gj, "text", "goal '" + g.id + "'");
        for (const auto& hj : detail::expect_array(gj, "hazards", "goal '" + g.id + "'")) {
            auto h = hazard_from_name(hj.get<std::string>());
            if (!h) {
                throw ParseError("invalid hazard in goal '" + g.id + "'");
            }
            g.hazards.push_back(*h);
        }
        fx.goals.push_back(std::move(g));
    }

    fx.safe_state = detail::expect_string(doc, "safe_state", path);

    if (auto it = doc.find("expected_asils"); it != doc.end()) {
        for (const auto& [goal_id, asil_j] : it->items()) {
            auto a = asil_from_name(asil_j.get<std::string>());
            if (!a) {
                throw ParseError("invalid expected asil for " + goal_id + " in " + path);
            }
            fx.expected_asils.emplace_back(goal_id, *a);
        }
    }
    return fx;
}

HaraResult run(const HaraFixture& fx) {
    HaraResult result;
    result.malfunctions = derive_malfunctions(fx.functionalities, fx.applicability);
    result.events = enumerate_events(fx.hazards, fx.situations, fx.ratings, fx.table);
    result.goals = rollup_safety_goals(result.events, fx.goals, fx.safe_state);
    return result;
}

std::string guideword_name(Guideword g) {
    switch (g) {
        case Guideword::LossOfFunction: return "LossOfFunction";
        case Guideword::MoreThanIntended: return "MoreThanIntended";
        case Guideword::LessThanIntended: return "LessThanIntended";
        case Guideword::WrongDirection: return "WrongDirection";
        case Guideword::UnintendedActivation: return "UnintendedActivation";
        case Guideword::FailureToUpdate: return "FailureToUpdate";
    }
    return "?";
}

std::string hazard_name(Hazard h) {
    switch (h) {
        case Hazard::UnintendedAcceleration: return "UnintendedAcceleration";
        case Hazard::UnintendedDeceleration: return "UnintendedDeceleration";
        case Hazard::UnintendedMovement: return "UnintendedMovement";
        case Hazard::ReducedMovement: return "ReducedMovement";
        case Hazard::DangerousMovement: return "DangerousMovement";
        case Hazard::UnintendedReaction: return "UnintendedReaction";
    }
    return "?";
}

std::string operating_mode_name(OperatingMode m) {
    switch (m) {
        case OperatingMode::MediumSpeed: return "MediumSpeed";
        case OperatingMode::HighSpeed: return "HighSpeed";
        case OperatingMode::Cornering: return "Cornering";
    }
    return "?";
}

std::string asil_name(Asil a) {
    switch (a) {
        case Asil::QM: return "QM";
        case Asil::A: return "A";
        case Asil::B: return "B";
        case Asil::C: return "C";
        case Asil::D: return "D";
    }
    return "?";
}

std::string severity_name(Severity s) { return "S" + std::to_string(static_cast<int>(s)); }
std::string exposure_name(Exposure e) { return "E" + std::to_string(static_cast<int>(e)); }
std::string controllability_name(Controllability c) {
    return "C" + std::to_string(static_cast<int>(c));
}

std::optional<Guideword> guideword_from_name(const std::string& name) {
    for (Guideword g : kAllGuidewords) {
        if (guideword_name(g) == name) return g;
    }
    return std::nullopt;
}

std::optional<Hazard> hazard_from_name(const std::string& name) {
    for (Hazard h : kAllHazards) {
        if (hazard_name(h) == name) return h;
    }
    return std::nullopt;
}

std::optional<Asil> asil_from_name(const std::string& name) {
    for (Asil a : {Asil::QM, Asil::A, Asil::B, Asil::C, Asil::D}) {
        if (asil_name(a) == name) return a;
    }
    return std::nullopt;
}

}  // namespace cruisesafe::hara
