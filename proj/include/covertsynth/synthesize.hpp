#pragma once

// Attacker synthesis on the pruned information game.
//
// A positional strategy picks one surviving decision per control node.  For
// the damage-reachable goal a breadth-first search finds the closest
// decision whose closure already contains a marked transformed-plant state;
// for the damage-nonblocking goal an exact backtracking search enumerates
// strategies in canonical order and accepts the first whose induced closed
// loop is nonblocking.  Strategies are then materialized as plain automata
// that pass the attacker validity rules.

#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "covertsynth/attack.hpp"
#include "covertsynth/automaton.hpp"
#include "covertsynth/constraints.hpp"
#include "covertsynth/errors.hpp"
#include "covertsynth/game.hpp"
#include "covertsynth/json_io.hpp"
#include "covertsynth/names.hpp"

namespace covertsynth {

/// A positional attacker strategy, self-contained enough to be exported as
/// an automaton: the decision and the observation successors per control
/// node, over the transformed plant's event universe.
struct AttackerStrategy {
    std::map<std::string, ControlDecision> choice;
    std::map<std::string, std::map<std::string, std::string>> moves;
    std::string initial;
    EventSet alphabet;
    EventSet visible;
};

namespace detail {

inline AttackerStrategy make_strategy(const InformationGame& game,
                                      const std::map<std::string, std::size_t>& assignment,
                                      const EventSet& alphabet) {
    AttackerStrategy st;
    st.initial = game.initial;
    st.alphabet = alphabet;
    st.visible = game.visible;
    for (const auto& [node, idx] : assignment) {
        st.choice[node] = game.decisions[idx];
        st.moves[node] = game.nodes.at(node).edges[idx]->moves;
    }
    return st;
}

inline AttackerStrategy restrict_to_reachable(AttackerStrategy st) {
    std::set<std::string> keep{st.initial};
    std::queue<std::string> todo;
    todo.push(st.initial);
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        for (const auto& [e, succ] : st.moves.at(cur))
            if (keep.insert(succ).second) todo.push(succ);
    }
    std::erase_if(st.choice, [&](const auto& kv) { return !keep.count(kv.first); });
    std::erase_if(st.moves, [&](const auto& kv) { return !keep.count(kv.first); });
    return st;
}

/// Strategy -> automaton with states y0, y1, ... in breadth-first order.
/// Disabled attackable events stay undefined; enabled invisible events
/// self-loop; enabled visible events follow the observation edge when one
/// exists, otherwise self-loop if the event is unattackable (it must stay
/// defined) and stay undefined if attackable.
inline Automaton attacker_automaton(const AttackerStrategy& st, const EventSet& attackable) {
    std::map<std::string, std::string> rename;
    std::vector<std::string> order;
    rename[st.initial] = "y0";
    order.push_back(st.initial);
    std::queue<std::string> todo;
    todo.push(st.initial);
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        for (const auto& [e, succ] : st.moves.at(cur))
            if (!rename.count(succ)) {
                rename[succ] = "y" + std::to_string(rename.size());
                order.push_back(succ);
                todo.push(succ);
            }
    }
    StateSet states;
    for (const auto& [node, y] : rename) states.insert(y);
    TransitionMap transitions;
    for (const auto& node : order) {
        const std::string& y = rename.at(node);
        const EventSet& enabled = st.choice.at(node).enabled;
        const auto& moves = st.moves.at(node);
        for (const auto& e : st.alphabet) {
            if (!enabled.count(e)) continue; // disabled, necessarily attackable
            if (!st.visible.count(e)) {
                transitions[{y, e}] = y;
                continue;
            }
            auto mit = moves.find(e);
            if (mit != moves.end())
                transitions[{y, e}] = rename.at(mit->second);
            else if (!attackable.count(e))
                transitions[{y, e}] = y; // never executable here, but must stay defined
        }
    }
    StateSet marked = states;
    return {"A", st.alphabet, std::move(states), "y0", std::move(marked),
            std::move(transitions)};
}

} // namespace detail

/// Search the safe game for a decision whose observation closure contains a
/// marked transformed-plant state.  Returns a strategy following the
/// shortest witness path and taking the canonical-first surviving decision
/// everywhere else, or nothing when no marked belief is reachable.
inline std::optional<AttackerStrategy> check_damage_reachable_exists(
    const InformationGame& safe_game, const TransformedPlant& tp) {
    if (!safe_game.nodes.count(safe_game.initial)) return std::nullopt;
    const StateSet& marked = tp.automaton.marked();

    std::map<std::string, std::tuple<std::string, std::size_t, std::string>> parent;
    std::set<std::string> seen{safe_game.initial};
    std::queue<std::string> todo;
    todo.push(safe_game.initial);
    std::optional<std::pair<std::string, std::size_t>> goal;
    while (!todo.empty() && !goal) {
        const std::string cur = todo.front();
        todo.pop();
        const GameNode& node = safe_game.nodes.at(cur);
        for (std::size_t d = 0; d < node.edges.size() && !goal; ++d) {
            if (!node.edges[d]) continue;
            if (!set_intersection(node.edges[d]->closure, marked).empty())
                goal = std::pair{cur, d};
        }
        if (goal) break;
        for (std::size_t d = 0; d < node.edges.size(); ++d) {
            if (!node.edges[d]) continue;
            for (const auto& [e, succ] : node.edges[d]->moves)
                if (seen.insert(succ).second) {
                    parent[succ] = {cur, d, e};
                    todo.push(succ);
                }
        }
    }
    if (!goal) return std::nullopt;

    std::map<std::string, std::size_t> assignment;
    for (const auto& [name, node] : safe_game.nodes)
        for (std::size_t d = 0; d < node.edges.size(); ++d)
            if (node.edges[d]) {
                assignment[name] = d;
                break;
            }
    assignment[goal->first] = goal->second;
    std::string walk = goal->first;
    while (parent.count(walk)) {
        const auto& [prev, d, e] = parent.at(walk);
        assignment[prev] = d;
        walk = prev;
    }
    return detail::restrict_to_reachable(
        detail::make_strategy(safe_game, assignment, tp.automaton.alphabet()));
}

namespace detail {

struct NonblockingSearch {
    const InformationGame& game;
    const TransformedPlant& tp;
    std::size_t cap;
    std::size_t steps = 0;
    std::set<std::string> tested;
    std::map<std::string, std::size_t> assignment;

    /// First control node, in breadth-first order from the initial node
    /// under the partial assignment, that has no decision yet.
    std::optional<std::string> open_node() const {
        std::set<std::string> seen{game.initial};
        std::queue<std::string> todo;
        todo.push(game.initial);
        while (!todo.empty()) {
            const std::string cur = todo.front();
            todo.pop();
            auto it = assignment.find(cur);
            if (it == assignment.end()) return cur;
            for (const auto& [e, succ] : game.nodes.at(cur).edges[it->second]->moves)
                if (seen.insert(succ).second) todo.push(succ);
        }
        return std::nullopt;
    }

    std::optional<AttackerStrategy> run() {
        if (++steps > cap)
            throw ResourceLimitError("nonblocking strategy search exceeded the cap of " +
                                     std::to_string(cap) + " steps");
        const auto open = open_node();
        if (!open) {
            AttackerStrategy st = restrict_to_reachable(
                make_strategy(game, assignment, tp.automaton.alphabet()));
            std::string key;
            for (const auto& [node, dec] : st.choice)
                key += node + "=" + make_belief_name(dec.enabled) + ";";
            if (tested.insert(key).second) {
                const Automaton a = attacker_automaton(st, game.attackable);
                if (is_nonblocking(product(a, tp.automaton)).nonblocking) return st;
            }
            return std::nullopt;
        }
        const GameNode& node = game.nodes.at(*open);
        for (std::size_t d = 0; d < node.edges.size(); ++d) {
            if (!node.edges[d]) continue;
            assignment[*open] = d;
            if (auto found = run()) return found;
        }
        assignment.erase(*open);
        return std::nullopt;
    }
};

} // namespace detail

/// Exact backtracking over positional strategies on the safe game, accepting
/// the first (in canonical order) whose closed loop with the transformed
/// plant is nonblocking.  Distinct reachable assignments are evaluated once.
inline std::optional<AttackerStrategy> check_damage_nonblocking_exists(
    const InformationGame& safe_game, const TransformedPlant& tp,
    std::size_t max_search_nodes = 10000000) {
    if (!safe_game.nodes.count(safe_game.initial)) return std::nullopt;
    detail::NonblockingSearch search{safe_game, tp, max_search_nodes, 0, {}, {}};
    return search.run();
}

/// Materialize a strategy as a plain automaton over the transformed plant's
/// events.  The result passes the attacker validity rules.
inline Automaton extract_attacker(const AttackerStrategy& strategy,
                                  const AttackConstraint& ac, bool eavesdrop) {
    if (!eavesdrop)
        for (const auto& e : strategy.alphabet)
            if (is_gamma_event_name(e))
                throw ValidationError("command event '" + e +
                                      "' requires the eavesdropping mode");
    return detail::attacker_automaton(strategy, ac.attackable);
}

enum class Goal { reachable, nonblocking };

inline const char* to_string(Goal g) {
    return g == Goal::reachable ? "reachable" : "nonblocking";
}

enum class Verdict { exists, none, indeterminate };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::exists: return "exists";
        case Verdict::none: return "none";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

struct SynthesisSizes {
    std::size_t plant = 0;
    std::size_t transformed = 0;
    std::size_t game_nodes = 0;
};

struct SynthesisReport {
    Verdict verdict = Verdict::none;
    Goal goal = Goal::reachable;
    bool eavesdrop = false;
    std::optional<ElisionVerdict> elision; // absent when elision was not considered
    SynthesisSizes sizes;
};

struct SynthesisResult {
    std::optional<Automaton> attacker;
    SynthesisReport report;
};

struct SynthesizeOptions {
    std::size_t max_game_nodes = 1000000;
    std::size_t max_search_nodes = 10000000;
    bool gamma_visible = true;
};

/// The full pipeline: transform, build the game, prune for covertness, run
/// the goal check, extract the attacker.  Resource caps turn into the
/// explicit indeterminate verdict, never into a silent "none".
inline SynthesisResult synthesize(const Automaton& g, const Automaton& s, const Automaton& h,
                                  const ControlConstraint& cc, const AttackConstraint& ac,
                                  Goal goal, bool eavesdrop, ElideMonitor elide,
                                  const SynthesizeOptions& options = {}) {
    SynthesisResult result;
    result.report.goal = goal;
    result.report.eavesdrop = eavesdrop;

    const TransformedPlant tp = build_transformed_plant(g, s, h, cc, ac, eavesdrop, elide);
    result.report.elision = tp.elision;
    result.report.sizes.plant = g.states().size();
    result.report.sizes.transformed = tp.automaton.states().size();
    try {
        GameOptions gopts;
        gopts.max_game_nodes = options.max_game_nodes;
        gopts.gamma_visible = options.gamma_visible;
        const InformationGame game = build_game(tp, ac, gopts);
        result.report.sizes.game_nodes = game.nodes.size();
        const InformationGame safe = prune_safety(game, tp);
        const std::optional<AttackerStrategy> strategy =
            goal == Goal::reachable
                ? check_damage_reachable_exists(safe, tp)
                : check_damage_nonblocking_exists(safe, tp, options.max_search_nodes);
        if (strategy) {
            result.attacker = extract_attacker(*strategy, ac, eavesdrop);
            result.report.verdict = Verdict::exists;
        } else {
            result.report.verdict = Verdict::none;
        }
    } catch (const ResourceLimitError&) {
        result.report.verdict = Verdict::indeterminate;
    }
    return result;
}

inline std::string serialize_report(const SynthesisReport& report,
                                    const std::optional<std::string>& attacker_file) {
    std::string out = "{\n";
    out += "  \"verdict\": " + json_quote(to_string(report.verdict)) + ",\n";
    out += "  \"goal\": " + json_quote(to_string(report.goal)) + ",\n";
    out += std::string("  \"eavesdrop\": ") + (report.eavesdrop ? "true" : "false") + ",\n";
    out += "  \"elision\": " +
           json_quote(report.elision ? to_string(*report.elision) : "off") + ",\n";
    out += "  \"sizes\": {\n";
    out += "    \"plant\": " + std::to_string(report.sizes.plant) + ",\n";
    out += "    \"transformed\": " + std::to_string(report.sizes.transformed) + ",\n";
    out += "    \"game_nodes\": " + std::to_string(report.sizes.game_nodes) + "\n";
    out += "  },\n";
    out += "  \"attacker_file\": " +
           (attacker_file ? json_quote(*attacker_file) : std::string("null")) + "\n";
    out += "}\n";
    return out;
}

} // namespace covertsynth
