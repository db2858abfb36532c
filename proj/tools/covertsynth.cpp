#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covertsynth/covertsynth.hpp"

namespace cs = covertsynth;

namespace {

// Exit codes shared by all subcommands: 0 success / attacker exists /
// attacker verified, 2 proven none / unverified / resilient, 3 resource cap
// hit, 1 malformed input or broken validity rules.
constexpr int kSuccess = 0;
constexpr int kNegative = 2;
constexpr int kIndeterminate = 3;
constexpr int kInputError = 1;

cs::Goal parse_goal(const std::string& s) {
    return s == "nonblocking" ? cs::Goal::nonblocking : cs::Goal::reachable;
}

cs::ElideMonitor parse_elide(const std::string& s) {
    if (s == "on") return cs::ElideMonitor::on;
    if (s == "off") return cs::ElideMonitor::off;
    return cs::ElideMonitor::automatic;
}

/// Resource caps, overridable through COVERTSYNTH_NODE_CAP: the game gets
/// the cap itself and the strategy search ten times as many steps.
cs::SynthesizeOptions options_from_env() {
    cs::SynthesizeOptions opts;
    if (const char* cap = std::getenv("COVERTSYNTH_NODE_CAP")) {
        unsigned long long v = 0;
        std::size_t pos = 0;
        try {
            v = std::stoull(cap, &pos);
        } catch (const std::exception&) {
            throw cs::ValidationError("COVERTSYNTH_NODE_CAP must be a positive integer");
        }
        if (pos != std::string(cap).size() || v == 0)
            throw cs::ValidationError("COVERTSYNTH_NODE_CAP must be a positive integer");
        opts.max_game_nodes = static_cast<std::size_t>(v);
        opts.max_search_nodes = static_cast<std::size_t>(v) * 10;
    }
    return opts;
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty())
        std::cout << text;
    else
        cs::write_text(out, text);
}

std::string validity_json(const cs::ValidityReport& r) {
    std::string out = "{\n  \"valid\": " + std::string(r.valid ? "true" : "false");
    if (r.violations.empty()) {
        out += ",\n  \"violations\": []\n}\n";
        return out;
    }
    out += ",\n  \"violations\": [\n";
    for (std::size_t i = 0; i < r.violations.size(); ++i) {
        const auto& v = r.violations[i];
        out += "    {\"state\": " + cs::json_quote(v.state) +
               ", \"event\": " + cs::json_quote(v.event) +
               ", \"kind\": " + cs::json_quote(v.kind) + "}";
        out += i + 1 < r.violations.size() ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
    return out;
}

std::string bipartite_json(const cs::BipartiteSupervisor& bt) {
    std::vector<std::string> lines = cs::automaton_json_lines(bt.automaton);
    nlohmann::json kinds = nlohmann::json::object();
    for (const auto& [state, kind] : bt.kinds) kinds[state] = cs::to_string(kind);
    lines.push_back("  \"state_kinds\": " + kinds.dump());
    return cs::wrap_json_object(lines);
}

std::string transformed_json(const cs::TransformedPlant& tp) {
    std::vector<std::string> lines = cs::automaton_json_lines(tp.automaton);
    lines.push_back("  \"bad\": " + cs::json_string_array(tp.bad));
    nlohmann::json roles = nlohmann::json::object();
    for (const auto& [state, role] : tp.roles) {
        nlohmann::json r;
        r["plant"] = role.plant;
        r["supervisor"] = role.supervisor;
        r["supervisor_halted"] = role.supervisor_halted;
        if (role.monitor)
            r["monitor"] = std::vector<std::string>(role.monitor->begin(), role.monitor->end());
        else
            r["monitor"] = nullptr;
        r["damage"] = role.damage;
        roles[state] = r;
    }
    lines.push_back("  \"component_roles\": " + roles.dump());
    lines.push_back(std::string("  \"eavesdrop\": ") + (tp.eavesdrop ? "true" : "false"));
    lines.push_back(std::string("  \"monitor_elided\": ") +
                    (tp.monitor_elided ? "true" : "false"));
    if (tp.elision)
        lines.push_back("  \"elision\": " + cs::json_quote(cs::to_string(*tp.elision)));
    return cs::wrap_json_object(lines);
}

std::string resilience_json(const cs::ResilienceResult& r,
                            const std::optional<std::string>& attacker_file) {
    const char* verdict = r.verdict == cs::Verdict::exists ? "vulnerable"
                          : r.verdict == cs::Verdict::none ? "resilient"
                                                           : "indeterminate";
    std::string out = "{\n";
    out += "  \"verdict\": " + cs::json_quote(verdict) + ",\n";
    out += "  \"goal\": " + cs::json_quote(cs::to_string(r.report.goal)) + ",\n";
    out += std::string("  \"eavesdrop\": ") + (r.report.eavesdrop ? "true" : "false") + ",\n";
    out += "  \"elision\": " +
           cs::json_quote(r.report.elision ? cs::to_string(*r.report.elision) : "off") + ",\n";
    out += "  \"sizes\": {\n";
    out += "    \"plant\": " + std::to_string(r.report.sizes.plant) + ",\n";
    out += "    \"transformed\": " + std::to_string(r.report.sizes.transformed) + ",\n";
    out += "    \"game_nodes\": " + std::to_string(r.report.sizes.game_nodes) + "\n";
    out += "  },\n";
    out += "  \"attacker_file\": " +
           (attacker_file ? cs::json_quote(*attacker_file) : std::string("null")) + "\n";
    out += "}\n";
    return out;
}

std::string verification_json(cs::Goal goal, bool eavesdrop, const cs::CovertCheck& cov,
                              bool damaging) {
    const bool verified = cov.covert && damaging;
    std::string out = "{\n";
    out += "  \"verdict\": " + cs::json_quote(verified ? "verified" : "unverified") + ",\n";
    out += "  \"goal\": " + cs::json_quote(cs::to_string(goal)) + ",\n";
    out += std::string("  \"eavesdrop\": ") + (eavesdrop ? "true" : "false") + ",\n";
    out += std::string("  \"covert\": ") + (cov.covert ? "true" : "false") + ",\n";
    out += std::string("  \"damage\": ") + (damaging ? "true" : "false");
    if (!cov.covert) {
        out += ",\n  \"witness\": " + cs::json_string_array(cov.witness);
    }
    out += "\n}\n";
    return out;
}

int exit_code(cs::Verdict v) {
    switch (v) {
        case cs::Verdict::exists: return kSuccess;
        case cs::Verdict::none: return kNegative;
        case cs::Verdict::indeterminate: return kIndeterminate;
    }
    return kIndeterminate;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthesis and verification of covert actuator attackers "
                 "against supervised discrete-event systems"};
    app.require_subcommand(1);
    int rc = kSuccess;

    // validate: automaton well-formedness, optionally role rules
    std::string v_file, v_constraint, v_as;
    bool v_eavesdrop = false;
    auto* validate = app.add_subcommand("validate", "check an automaton file, optionally "
                                                    "against supervisor or attacker rules");
    validate->add_option("automaton", v_file, "automaton JSON file")->required();
    validate->add_option("--constraint", v_constraint, "constraint JSON file");
    validate->add_option("--as", v_as, "role rules to apply")
        ->check(CLI::IsMember({"supervisor", "attacker"}));
    validate->add_flag("--eavesdrop", v_eavesdrop, "attacker also handles command events");
    validate->callback([&]() {
        const cs::Automaton a = cs::load_automaton(v_file);
        if (v_constraint.empty()) {
            std::cout << "{\n  \"valid\": true,\n  \"violations\": []\n}\n";
            return;
        }
        const cs::Constraints c = cs::load_constraints(v_constraint);
        cs::ValidityReport report;
        if (v_as == "supervisor") {
            cs::check_control_constraint(c.cc, a.alphabet());
            report = cs::validate_supervisor(a, c.cc);
        } else if (v_as == "attacker") {
            report = cs::validate_attacker(a, c.ac, v_eavesdrop);
        } else {
            cs::check_control_constraint(c.cc, a.alphabet());
            cs::check_attack_constraint(c.ac, c.cc, a.alphabet());
            report.valid = true;
        }
        std::cout << validity_json(report);
        if (!report.valid) rc = kNegative;
    });

    // compose: synchronous product of two or more automata
    std::vector<std::string> c_files;
    std::string c_out, c_name{"P"};
    auto* compose = app.add_subcommand("compose", "synchronous product of automata");
    compose->add_option("automata", c_files, "two or more automaton JSON files")->required();
    compose->add_option("--name", c_name, "name of the composed automaton");
    compose->add_option("--out", c_out, "output file (stdout when absent)");
    compose->callback([&]() {
        if (c_files.size() < 2)
            throw cs::ValidationError("compose needs at least two automaton files");
        std::vector<cs::Automaton> autos;
        for (const auto& f : c_files) autos.push_back(cs::load_automaton(f));
        std::vector<const cs::Automaton*> ptrs;
        for (const auto& a : autos) ptrs.push_back(&a);
        emit(cs::serialize_automaton(cs::compose_many(ptrs, c_name).automaton), c_out);
    });

    // observe: belief automaton under a visible sub-alphabet
    std::string o_file, o_constraint, o_out;
    std::vector<std::string> o_visible;
    auto* observe = app.add_subcommand("observe", "belief automaton over the visible events");
    observe->add_option("automaton", o_file, "automaton JSON file")->required();
    observe->add_option("--visible", o_visible, "visible events")->delimiter(',');
    observe->add_option("--constraint", o_constraint,
                        "constraint JSON file; its observable set is used");
    observe->add_option("--out", o_out, "output file (stdout when absent)");
    observe->callback([&]() {
        const cs::Automaton a = cs::load_automaton(o_file);
        cs::EventSet visible(o_visible.begin(), o_visible.end());
        if (!o_constraint.empty())
            visible = cs::load_constraints(o_constraint).cc.observable;
        emit(cs::serialize_automaton(cs::observer(a, visible)), o_out);
    });

    // attacked-sup: the supervisor under enablement attacks
    std::string as_file, as_constraint, as_out;
    auto* attacked =
        app.add_subcommand("attacked-sup", "supervisor with attackable events forced enabled");
    attacked->add_option("supervisor", as_file, "supervisor JSON file")->required();
    attacked->add_option("--constraint", as_constraint, "constraint JSON file")->required();
    attacked->add_option("--out", as_out, "output file (stdout when absent)");
    attacked->callback([&]() {
        const cs::Automaton s = cs::load_automaton(as_file);
        const cs::Constraints c = cs::load_constraints(as_constraint);
        emit(cs::serialize_automaton(cs::build_attacked_supervisor(s, c.cc, c.ac).automaton),
             as_out);
    });

    // bipartize: command/reaction split with reified control commands
    std::string b_file, b_constraint, b_out;
    bool b_attacked = false;
    auto* bipartize =
        app.add_subcommand("bipartize", "split supervisor states into command and "
                                        "reaction states with explicit command events");
    bipartize->add_option("supervisor", b_file, "supervisor JSON file")->required();
    bipartize->add_option("--constraint", b_constraint, "constraint JSON file")->required();
    bipartize->add_flag("--attacked", b_attacked, "apply the enablement attack as well");
    bipartize->add_option("--out", b_out, "output file (stdout when absent)");
    bipartize->callback([&]() {
        const cs::Automaton s = cs::load_automaton(b_file);
        const cs::Constraints c = cs::load_constraints(b_constraint);
        const cs::BipartiteSupervisor bt =
            b_attacked ? cs::bipartize_attacked(s, c.cc, c.ac) : cs::bipartize(s, c.cc);
        emit(bipartite_json(bt), b_out);
    });

    // transform: the plant the attacker-synthesis game is played on
    std::string t_plant, t_sup, t_damage, t_constraint, t_out, t_elide{"auto"};
    bool t_eavesdrop = false;
    auto* transform = app.add_subcommand(
        "transform", "compose plant, attacked supervisor, monitor and damage "
                     "automaton into the synthesis plant");
    transform->add_option("plant", t_plant, "plant JSON file")->required();
    transform->add_option("supervisor", t_sup, "supervisor JSON file")->required();
    transform->add_option("damage", t_damage, "damage automaton JSON file")->required();
    transform->add_option("--constraint", t_constraint, "constraint JSON file")->required();
    transform->add_flag("--eavesdrop", t_eavesdrop, "attacker sees control commands");
    transform->add_option("--elide-monitor", t_elide, "drop the monitor component when sound")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    transform->add_option("--out", t_out, "output file (stdout when absent)");
    transform->callback([&]() {
        const cs::Automaton g = cs::load_automaton(t_plant);
        const cs::Automaton s = cs::load_automaton(t_sup);
        const cs::Automaton h = cs::load_automaton(t_damage);
        const cs::Constraints c = cs::load_constraints(t_constraint);
        const cs::TransformedPlant tp = cs::build_transformed_plant(
            g, s, h, c.cc, c.ac, t_eavesdrop, parse_elide(t_elide));
        emit(transformed_json(tp), t_out);
    });

    // synth: full synthesis pipeline
    std::string sy_plant, sy_sup, sy_damage, sy_constraint, sy_goal{"reachable"},
        sy_elide{"auto"}, sy_out{"attacker.json"};
    bool sy_eavesdrop = false;
    auto* synth = app.add_subcommand("synth", "synthesize a covert damage-inflicting attacker");
    synth->add_option("plant", sy_plant, "plant JSON file")->required();
    synth->add_option("supervisor", sy_sup, "supervisor JSON file")->required();
    synth->add_option("damage", sy_damage, "damage automaton JSON file")->required();
    synth->add_option("--constraint", sy_constraint, "constraint JSON file")->required();
    synth->add_option("--goal", sy_goal, "damage goal")
        ->check(CLI::IsMember({"reachable", "nonblocking"}));
    synth->add_flag("--eavesdrop", sy_eavesdrop, "attacker sees control commands");
    synth->add_option("--elide-monitor", sy_elide, "drop the monitor component when sound")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    synth->add_option("--out", sy_out, "attacker output file");
    synth->callback([&]() {
        const cs::Automaton g = cs::load_automaton(sy_plant);
        const cs::Automaton s = cs::load_automaton(sy_sup);
        const cs::Automaton h = cs::load_automaton(sy_damage);
        const cs::Constraints c = cs::load_constraints(sy_constraint);
        const cs::SynthesisResult r =
            cs::synthesize(g, s, h, c.cc, c.ac, parse_goal(sy_goal), sy_eavesdrop,
                           parse_elide(sy_elide), options_from_env());
        std::optional<std::string> attacker_file;
        if (r.attacker && !sy_out.empty()) {
            cs::write_text(sy_out, cs::serialize_automaton(*r.attacker));
            attacker_file = sy_out;
        }
        std::cout << cs::serialize_report(r.report, attacker_file);
        rc = exit_code(r.report.verdict);
    });

    // verify: definition-level checks of a given attacker
    std::string vf_plant, vf_sup, vf_damage, vf_constraint, vf_attacker, vf_goal{"reachable"};
    bool vf_eavesdrop = false;
    auto* verify = app.add_subcommand("verify", "check covertness and damage of an attacker");
    verify->add_option("plant", vf_plant, "plant JSON file")->required();
    verify->add_option("supervisor", vf_sup, "supervisor JSON file")->required();
    verify->add_option("damage", vf_damage, "damage automaton JSON file")->required();
    verify->add_option("--constraint", vf_constraint, "constraint JSON file")->required();
    verify->add_option("--attacker", vf_attacker, "attacker JSON file")->required();
    verify->add_option("--goal", vf_goal, "damage goal")
        ->check(CLI::IsMember({"reachable", "nonblocking"}));
    verify->add_flag("--eavesdrop", vf_eavesdrop, "attacker sees control commands");
    verify->callback([&]() {
        const cs::Automaton g = cs::load_automaton(vf_plant);
        const cs::Automaton s = cs::load_automaton(vf_sup);
        const cs::Automaton h = cs::load_automaton(vf_damage);
        const cs::Automaton a = cs::load_automaton(vf_attacker);
        const cs::Constraints c = cs::load_constraints(vf_constraint);
        const cs::Goal goal = parse_goal(vf_goal);
        const cs::CovertCheck cov =
            cs::check_covert(g, s, a, h, c.cc, c.ac, vf_eavesdrop);
        const bool damaging =
            goal == cs::Goal::reachable
                ? cs::check_damage_reachable(g, s, a, h, c.cc, c.ac, vf_eavesdrop)
                : cs::check_damage_nonblocking(g, s, a, h, c.cc, c.ac, vf_eavesdrop);
        std::cout << verification_json(goal, vf_eavesdrop, cov, damaging);
        if (!(cov.covert && damaging)) rc = kNegative;
    });

    // resilient: no covert attacker exists for the chosen goal
    std::string r_plant, r_sup, r_damage, r_constraint, r_goal{"reachable"}, r_out;
    bool r_eavesdrop = false;
    auto* resilient =
        app.add_subcommand("resilient", "decide whether any covert attacker exists");
    resilient->add_option("plant", r_plant, "plant JSON file")->required();
    resilient->add_option("supervisor", r_sup, "supervisor JSON file")->required();
    resilient->add_option("damage", r_damage, "damage automaton JSON file")->required();
    resilient->add_option("--constraint", r_constraint, "constraint JSON file")->required();
    resilient->add_option("--goal", r_goal, "damage goal")
        ->check(CLI::IsMember({"reachable", "nonblocking"}));
    resilient->add_flag("--eavesdrop", r_eavesdrop, "attacker sees control commands");
    resilient->add_option("--out", r_out, "write the attacker here when vulnerable");
    resilient->callback([&]() {
        const cs::Automaton g = cs::load_automaton(r_plant);
        const cs::Automaton s = cs::load_automaton(r_sup);
        const cs::Automaton h = cs::load_automaton(r_damage);
        const cs::Constraints c = cs::load_constraints(r_constraint);
        const cs::ResilienceResult r =
            cs::verify_resilience(g, s, h, c.cc, c.ac, parse_goal(r_goal), r_eavesdrop,
                                  options_from_env());
        std::optional<std::string> attacker_file;
        if (r.attacker && !r_out.empty()) {
            cs::write_text(r_out, cs::serialize_automaton(*r.attacker));
            attacker_file = r_out;
        }
        std::cout << resilience_json(r, attacker_file);
        rc = exit_code(r.verdict);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    } catch (const cs::ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIndeterminate;
    } catch (const cs::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const cs::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return rc;
}
