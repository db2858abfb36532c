// Acceptance gate for the attacker-synthesis pipeline.  Each numbered
// criterion prints exactly one line, "pass" with its evidence counts or
// "FAIL" with the first counterexample; the process exits nonzero if any
// criterion fails.  Everything is seeded, so a run is reproducible.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "covertsynth/covertsynth.hpp"
#include "support/fixtures.hpp"
#include "support/random_instances.hpp"

namespace cs = covertsynth;
namespace fs = std::filesystem;
using testsupport::RandomInstance;
using testsupport::Rng;

namespace {

struct Criterion {
    std::string label;
    bool pass = true;
    std::string note;

    void fail(const std::string& why) {
        if (pass) {
            pass = false;
            note = why;
        }
    }
};

int finish(std::vector<Criterion>& cs_) {
    int rc = 0;
    for (std::size_t i = 0; i < cs_.size(); ++i) {
        const auto& c = cs_[i];
        std::cout << "criterion " << (i + 1) << " (" << c.label << "): "
                  << (c.pass ? "pass" : "FAIL") << (c.note.empty() ? "" : " — " + c.note)
                  << "\n";
        if (!c.pass) rc = 1;
    }
    return rc;
}

std::string describe(const RandomInstance& inst, cs::Goal goal, bool eavesdrop) {
    std::ostringstream os;
    os << "goal=" << cs::to_string(goal) << " eavesdrop=" << (eavesdrop ? "true" : "false")
       << " |Q|=" << inst.g.states().size() << " |X|=" << inst.s.states().size()
       << " |W|=" << inst.h.states().size() << " Sigma={";
    bool first = true;
    for (const auto& e : inst.g.alphabet()) {
        if (!first) os << ",";
        os << e;
        first = false;
    }
    os << "} attackable={";
    first = true;
    for (const auto& e : inst.ac.attackable) {
        if (!first) os << ",";
        os << e;
        first = false;
    }
    os << "}";
    return os.str();
}

/// Does the attacker avoid every bad state of this transformed plant and
/// meet the goal on their product?  Used to cross-check attackers from the
/// elided pipeline against the full plant and vice versa.
bool attacker_ok_on(const cs::Automaton& a, const cs::TransformedPlant& tp, cs::Goal goal) {
    const cs::Automaton prod = cs::product(a, tp.automaton);
    for (const auto& st : prod.states()) {
        const auto parts = cs::split_tuple_name(st);
        if (parts.size() == 2 && tp.bad.count(parts[1])) return false;
    }
    return goal == cs::Goal::reachable ? cs::marked_nonempty(prod)
                                       : cs::is_nonblocking(prod).nonblocking;
}

cs::Automaton universal_attacker(const cs::EventSet& alphabet) {
    cs::TransitionMap t;
    for (const auto& e : alphabet) t[{"y0", e}] = "y0";
    return {"A", alphabet, {"y0"}, "y0", {"y0"}, std::move(t)};
}

// Wall-clock accounting, reported on stderr for budget tuning.  begin()
// closes the previous phase, so sequential code only needs begin() calls.
struct Phases {
    std::vector<std::pair<std::string, double>> totals;
    std::string current;
    std::chrono::steady_clock::time_point start;

    void begin(const std::string& name) {
        end();
        current = name;
        start = std::chrono::steady_clock::now();
    }
    void end() {
        if (current.empty()) return;
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (auto& [name, total] : totals)
            if (name == current) {
                total += s;
                current.clear();
                return;
            }
        totals.emplace_back(current, s);
        current.clear();
    }
    void dump() const {
        std::cerr << "# timings (s):";
        for (const auto& [name, total] : totals)
            std::cerr << ' ' << name << '=' << std::fixed << std::setprecision(1) << total;
        std::cerr << '\n';
    }
};

struct VerdictPair {
    std::optional<bool> plain;     // exists under eavesdrop = false
    std::optional<bool> eavesdrop; // exists under eavesdrop = true
};

} // namespace

int main() {
    std::vector<Criterion> crit(8);
    crit[0].label = "oracle equivalence, >=200 random instances";
    crit[1].label = "soundness of every synthesized attacker";
    crit[2].label = "nonblocking damage implies reachable damage";
    crit[3].label = "monitor elision on the no-unobservable-attack class";
    crit[4].label = "command-split quotient and command-blind equivalence";
    crit[5].label = "eavesdropping never loses attacks";
    crit[6].label = "CLI byte determinism on all fixtures";
    crit[7].label = "observation memory falsifier on micro instances";
    Criterion& c1 = crit[0];
    Criterion& c2 = crit[1];
    Criterion& c3 = crit[2];
    Criterion& c4 = crit[3];
    Criterion& c5 = crit[4];
    Criterion& c6 = crit[5];
    Criterion& c7 = crit[6];
    Criterion& c8 = crit[7];

    const std::vector<std::string> toys{"toy1", "toy2", "toy3", "toy4", "toy5"};
    Phases phases;
    cs::SynthesizeOptions opts;
    opts.max_game_nodes = 50000;
    opts.max_search_nodes = 15000;
    cs::BruteForceLimits oracle_limits;
    oracle_limits.max_candidates = 20000;

    // ---- criteria 2 and 3 on the fixtures -------------------------------
    std::size_t attackers_checked = 0, nonblocking_checked = 0;
    phases.begin("fixtures");
    for (const auto& toy : toys) {
        const auto inst = fixtures::load(toy);
        for (bool eave : {false, true}) {
            for (cs::Goal goal : {cs::Goal::reachable, cs::Goal::nonblocking}) {
                const cs::SynthesisResult r =
                    cs::synthesize(inst.g, inst.s, inst.h, inst.c.cc, inst.c.ac, goal, eave,
                                   cs::ElideMonitor::off, opts);
                if (!r.attacker) continue;
                attackers_checked++;
                const bool covert =
                    cs::check_covert(inst.g, inst.s, *r.attacker, inst.h, inst.c.cc,
                                     inst.c.ac, eave)
                        .covert;
                const bool damaging =
                    goal == cs::Goal::reachable
                        ? cs::check_damage_reachable(inst.g, inst.s, *r.attacker, inst.h,
                                                     inst.c.cc, inst.c.ac, eave)
                        : cs::check_damage_nonblocking(inst.g, inst.s, *r.attacker, inst.h,
                                                       inst.c.cc, inst.c.ac, eave);
                if (!covert || !damaging)
                    c2.fail("fixture " + toy + " attacker fails the definition checks");
                if (goal == cs::Goal::nonblocking) {
                    nonblocking_checked++;
                    if (!cs::check_damage_reachable(inst.g, inst.s, *r.attacker, inst.h,
                                                    inst.c.cc, inst.c.ac, eave))
                        c3.fail("fixture " + toy + " nonblocking attacker not reachable");
                }
            }
        }
    }

    // ---- criteria 1-6 on the random stream ------------------------------
    Rng rng(0xACCE55);
    const std::size_t want_instances = 220;
    const std::size_t max_draws = 2500;
    std::size_t drawn = 0, counted = 0, comparisons = 0, indeterminate = 0;
    std::size_t th3_runs = 0;
    std::size_t quotients = 0, blind_pairs = 0, monotone_pairs = 0;

    while (counted < want_instances && drawn < max_draws) {
        const RandomInstance inst = testsupport::random_instance(rng);
        drawn++;
        bool instance_compared = false;

        // Merging each command/reaction pair of the attacked command-split
        // supervisor must recover the attacked supervisor.
        phases.begin("quotient");
        if (quotients < 60) {
            const cs::Automaton merged =
                cs::merge_command_states(cs::bipartize_attacked(inst.s, inst.cc, inst.ac));
            const cs::Automaton sa =
                cs::build_attacked_supervisor(inst.s, inst.cc, inst.ac).automaton;
            if (!cs::isomorphic(cs::reachable_part(merged), cs::reachable_part(sa)))
                c5.fail("command-split quotient differs from the attacked supervisor: " +
                        describe(inst, cs::Goal::reachable, false));
            quotients++;
        }

        VerdictPair seen[2]; // per goal: reachable = 0, nonblocking = 1
        for (bool eave : {false, true}) {
            for (cs::Goal goal : {cs::Goal::reachable, cs::Goal::nonblocking}) {
                cs::SynthesisResult r;
                phases.begin("synth");
                try {
                    r = cs::synthesize(inst.g, inst.s, inst.h, inst.cc, inst.ac, goal, eave,
                                       cs::ElideMonitor::off, opts);
                } catch (const cs::ResourceLimitError&) {
                    indeterminate++;
                    continue;
                }
                auto& slot = goal == cs::Goal::reachable ? seen[0] : seen[1];
                if (r.report.verdict == cs::Verdict::indeterminate) {
                    indeterminate++;
                } else {
                    (eave ? slot.eavesdrop : slot.plain) =
                        r.report.verdict == cs::Verdict::exists;
                }

                // criterion 1: verdict against the exhaustive oracle
                if (r.report.verdict != cs::Verdict::indeterminate) {
                    phases.begin("oracle");
                    try {
                        const bool oracle = cs::brute_force_exists(inst.g, inst.s, inst.h,
                                                                   inst.cc, inst.ac, goal,
                                                                   eave, oracle_limits);
                        comparisons++;
                        instance_compared = true;
                        if ((r.report.verdict == cs::Verdict::exists) != oracle)
                            c1.fail("verdict " +
                                    std::string(cs::to_string(r.report.verdict)) +
                                    " vs oracle " + (oracle ? "exists" : "none") + ": " +
                                    describe(inst, goal, eave));
                    } catch (const cs::ResourceLimitError&) {
                        // not enumerable; nothing to compare
                    }
                }

                // criteria 2 and 3: every attacker must survive the checkers
                if (r.attacker) {
                    phases.begin("checkers");
                    attackers_checked++;
                    const bool covert = cs::check_covert(inst.g, inst.s, *r.attacker, inst.h,
                                                         inst.cc, inst.ac, eave)
                                            .covert;
                    const bool damaging =
                        goal == cs::Goal::reachable
                            ? cs::check_damage_reachable(inst.g, inst.s, *r.attacker, inst.h,
                                                         inst.cc, inst.ac, eave)
                            : cs::check_damage_nonblocking(inst.g, inst.s, *r.attacker,
                                                           inst.h, inst.cc, inst.ac, eave);
                    if (!covert || !damaging)
                        c2.fail("synthesized attacker fails the definition checks: " +
                                describe(inst, goal, eave));
                    if (goal == cs::Goal::nonblocking) {
                        nonblocking_checked++;
                        if (!cs::check_damage_reachable(inst.g, inst.s, *r.attacker, inst.h,
                                                        inst.cc, inst.ac, eave))
                            c3.fail("nonblocking attacker without reachable damage: " +
                                    describe(inst, goal, eave));
                    }
                }

                // criterion 4: when no attackable event is unobservable, the
                // monitor can be dropped without changing anything
                const bool th3 =
                    cs::set_intersection(inst.cc.unobservable(inst.g.alphabet()),
                                         inst.ac.attackable)
                        .empty();
                if (th3 && th3_runs < 300) {
                    phases.begin("elision");
                    try {
                        const cs::SynthesisResult e =
                            cs::synthesize(inst.g, inst.s, inst.h, inst.cc, inst.ac, goal,
                                           eave, cs::ElideMonitor::on, opts);
                        if (r.report.verdict != cs::Verdict::indeterminate &&
                            e.report.verdict != cs::Verdict::indeterminate) {
                            th3_runs++;
                            if (r.report.verdict != e.report.verdict)
                                c4.fail("elided verdict " +
                                        std::string(cs::to_string(e.report.verdict)) +
                                        " vs full " + cs::to_string(r.report.verdict) +
                                        ": " + describe(inst, goal, eave));
                            const cs::TransformedPlant full = cs::build_transformed_plant(
                                inst.g, inst.s, inst.h, inst.cc, inst.ac, eave,
                                cs::ElideMonitor::off);
                            const cs::TransformedPlant elided = cs::build_transformed_plant(
                                inst.g, inst.s, inst.h, inst.cc, inst.ac, eave,
                                cs::ElideMonitor::on);
                            if (r.attacker && !attacker_ok_on(*r.attacker, elided, goal))
                                c4.fail("full-pipeline attacker fails on the elided plant: " +
                                        describe(inst, goal, eave));
                            if (e.attacker && !attacker_ok_on(*e.attacker, full, goal))
                                c4.fail("elided-pipeline attacker fails on the full plant: " +
                                        describe(inst, goal, eave));
                            if (!eave) {
                                const std::size_t bound = inst.g.states().size() *
                                                          (inst.s.states().size() + 1) *
                                                          (inst.h.states().size() + 1);
                                if (elided.automaton.states().size() > bound)
                                    c4.fail("elided plant has " +
                                            std::to_string(elided.automaton.states().size()) +
                                            " states, over the product bound " +
                                            std::to_string(bound) + ": " +
                                            describe(inst, goal, eave));
                            }
                        }
                    } catch (const cs::ResourceLimitError&) {
                    }
                }

                // criterion 5, part two: eavesdropping with commands made
                // invisible decides exactly like the command-free pipeline
                if (eave && blind_pairs < 120) {
                    phases.begin("blind");
                    cs::SynthesizeOptions blind = opts;
                    blind.gamma_visible = false;
                    try {
                        const cs::SynthesisResult b =
                            cs::synthesize(inst.g, inst.s, inst.h, inst.cc, inst.ac, goal,
                                           true, cs::ElideMonitor::off, blind);
                        const auto& slot2 = goal == cs::Goal::reachable ? seen[0] : seen[1];
                        if (b.report.verdict != cs::Verdict::indeterminate &&
                            slot2.plain.has_value()) {
                            blind_pairs++;
                            if ((b.report.verdict == cs::Verdict::exists) != *slot2.plain)
                                c5.fail("command-blind verdict " +
                                        std::string(cs::to_string(b.report.verdict)) +
                                        " differs from the command-free pipeline: " +
                                        describe(inst, goal, true));
                        }
                    } catch (const cs::ResourceLimitError&) {
                    }
                }
            }
        }
        // criterion 6: an eavesdropping attacker can mimic a deaf one
        for (int gi = 0; gi < 2; ++gi) {
            const auto& slot = seen[gi];
            const cs::Goal goal = gi == 0 ? cs::Goal::reachable : cs::Goal::nonblocking;
            if (slot.plain.has_value() && slot.eavesdrop.has_value()) {
                monotone_pairs++;
                if (*slot.plain && !*slot.eavesdrop)
                    c6.fail("attack exists without eavesdropping but not with it: " +
                            describe(inst, goal, false));
            }
        }
        if (instance_compared) counted++;
    }
    if (counted < 200)
        c1.fail("only " + std::to_string(counted) + " of the required 200 instances were "
                "enumerable (drew " + std::to_string(drawn) + ")");
    c1.note = c1.pass ? std::to_string(counted) + " instances, " +
                            std::to_string(comparisons) + " verdict comparisons, " +
                            std::to_string(indeterminate) + " capped runs skipped"
                      : c1.note;
    if (c2.pass) c2.note = std::to_string(attackers_checked) + " attackers checked";
    if (c3.pass) c3.note = std::to_string(nonblocking_checked) + " nonblocking attackers";
    if (c4.pass) c4.note = std::to_string(th3_runs) + " elided-vs-full runs";
    if (c5.pass)
        c5.note = std::to_string(quotients) + " quotients, " + std::to_string(blind_pairs) +
                  " command-blind pairs";
    if (c6.pass) c6.note = std::to_string(monotone_pairs) + " verdict pairs";

    // The command-split quotient check again, on the fixtures.
    phases.begin("fixtures");
    for (const auto& toy : toys) {
        const auto inst = fixtures::load(toy);
        const cs::Automaton merged =
            cs::merge_command_states(cs::bipartize_attacked(inst.s, inst.c.cc, inst.c.ac));
        const cs::Automaton sa =
            cs::build_attacked_supervisor(inst.s, inst.c.cc, inst.c.ac).automaton;
        if (!cs::isomorphic(cs::reachable_part(merged), cs::reachable_part(sa)))
            c5.fail("command-split quotient differs on fixture " + toy);
    }

    // ---- criterion 7: the CLI is byte-deterministic ---------------------
    phases.begin("cli");
    const char* cli = std::getenv("COVERTSYNTH_CLI");
    if (!cli) {
        c7.fail("COVERTSYNTH_CLI is not set");
    } else {
        const fs::path base = fs::temp_directory_path() / "covertsynth-acceptance";
        std::error_code ec;
        fs::remove_all(base, ec);
        std::size_t files_compared = 0;
        for (int run = 1; run <= 2 && c7.pass; ++run) {
            for (const auto& toy : toys) {
                const fs::path dir = base / ("run" + std::to_string(run)) / toy;
                fs::create_directories(dir);
                const fs::path fd = fixtures::dir() / toy;
                const std::string p = (fd / "plant.json").string();
                const std::string s = (fd / "supervisor.json").string();
                const std::string h = (fd / "damage.json").string();
                const std::string c = (fd / "constraint.json").string();
                const auto inst = fixtures::load(toy);
                cs::write_text(dir / "universal.json",
                               cs::serialize_automaton(universal_attacker(inst.g.alphabet())));
                const std::vector<std::pair<std::string, std::string>> cmds{
                    {"validate_plant", "validate " + p},
                    {"validate_sup", "validate " + s + " --constraint " + c +
                                         " --as supervisor"},
                    {"validate_att", "validate universal.json --constraint " + c +
                                         " --as attacker"},
                    {"compose", "compose " + p + " " + s + " --out compose.json"},
                    {"observe", "observe " + p + " --constraint " + c + " --out observe.json"},
                    {"attacked_sup",
                     "attacked-sup " + s + " --constraint " + c + " --out attacked.json"},
                    {"bipartize", "bipartize " + s + " --constraint " + c +
                                      " --attacked --out bipartite.json"},
                    {"transform", "transform " + p + " " + s + " " + h + " --constraint " +
                                      c + " --out transform.json"},
                    {"synth_reach", "synth " + p + " " + s + " " + h + " --constraint " + c +
                                        " --goal reachable --out attacker_r.json"},
                    {"synth_nonblocking", "synth " + p + " " + s + " " + h +
                                              " --constraint " + c +
                                              " --goal nonblocking --out attacker_n.json"},
                    {"verify", "verify " + p + " " + s + " " + h + " --constraint " + c +
                                   " --attacker universal.json --goal reachable"},
                    {"resilient", "resilient " + p + " " + s + " " + h + " --constraint " +
                                      c + " --goal nonblocking --out attacker_v.json"},
                };
                for (const auto& [name, args] : cmds) {
                    const std::string cmd = "cd " + dir.string() + " && " + cli + " " + args +
                                            " > " + name + ".stdout 2> " + name + ".stderr";
                    const int status = std::system(cmd.c_str());
                    if (status == -1 || WEXITSTATUS(status) == 1) {
                        c7.fail("command '" + name + "' on " + toy + " reported an input "
                                "error");
                        break;
                    }
                }
                if (!c7.pass) break;
            }
        }
        if (c7.pass) {
            for (const auto& toy : toys) {
                const fs::path d1 = base / "run1" / toy;
                const fs::path d2 = base / "run2" / toy;
                std::vector<fs::path> entries;
                for (const auto& e : fs::directory_iterator(d1)) entries.push_back(e.path());
                std::sort(entries.begin(), entries.end());
                for (const auto& f : entries) {
                    if (f.extension() == ".stderr") continue; // timings may go there
                    const fs::path twin = d2 / f.filename();
                    if (!fs::exists(twin)) {
                        c7.fail(toy + "/" + f.filename().string() + " missing in rerun");
                        break;
                    }
                    if (cs::read_text(f) != cs::read_text(twin)) {
                        c7.fail(toy + "/" + f.filename().string() + " differs between runs");
                        break;
                    }
                    files_compared++;
                }
                if (!c7.pass) break;
            }
        }
        if (c7.pass) c7.note = std::to_string(files_compared) + " files byte-identical";
        fs::remove_all(base, ec);
    }

    // ---- criterion 8: search for a history-dependent advantage ----------
    phases.begin("falsifier");
    {
        Rng mrng(0xFA151F1);
        cs::BruteForceLimits limits;
        limits.max_game_nodes = 40;
        limits.max_candidates = 4000;
        std::size_t probes = 0, skipped = 0;
        for (int i = 0; i < 60; ++i) {
            const RandomInstance inst = testsupport::random_micro_instance(mrng);
            for (cs::Goal goal : {cs::Goal::reachable, cs::Goal::nonblocking}) {
                try {
                    const bool positional = cs::brute_force_exists(
                        inst.g, inst.s, inst.h, inst.cc, inst.ac, goal, false, limits);
                    for (std::size_t window : {1, 2}) {
                        const bool remembered = cs::history_oracle_exists(
                            inst.g, inst.s, inst.h, inst.cc, inst.ac, goal, false, window,
                            limits);
                        probes++;
                        if (remembered != positional)
                            c8.fail("window " + std::to_string(window) + " strategies " +
                                    (remembered ? "win" : "lose") +
                                    " where positional ones " +
                                    (positional ? "win" : "lose") + ": " +
                                    describe(inst, goal, false));
                    }
                } catch (const cs::ResourceLimitError&) {
                    skipped++;
                }
            }
        }
        if (c8.pass)
            c8.note = std::to_string(probes) + " probes, " + std::to_string(skipped) +
                      " skipped, no memory advantage found";
    }

    phases.end();
    phases.dump();
    return finish(crit);
}
