#pragma once

// The attacker's information game over a transformed plant.
//
// The attacker only sees some events and only toggles the attackable ones,
// so it plays a two-phase game on beliefs: at a control node (a set of
// plant states it considers possible) it picks a decision (which attackable
// events to let through); the belief then closes up under enabled-but-
// invisible events (the observation node), and each visible enabled event
// that is actually executable moves it to the next control node.  Safety
// pruning removes every decision that could brush a bad state, leaving a
// game in which any remaining decision assignment keeps the attacker
// covert.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "covertsynth/attack.hpp"
#include "covertsynth/automaton.hpp"
#include "covertsynth/constraints.hpp"
#include "covertsynth/errors.hpp"
#include "covertsynth/names.hpp"

namespace covertsynth {

/// One control decision of the attacker: the set of events currently let
/// through.  Decisions differ only on the attackable events; everything
/// else is enabled in every decision.
struct ControlDecision {
    EventSet enabled;
};

/// All 2^|attackable| decisions over the given event universe, canonically
/// ordered: larger enabled sets first, ties broken lexicographically.
/// Command events are never attackable, so they are enabled throughout.
inline std::vector<ControlDecision> enumerate_decisions(const AttackConstraint& ac,
                                                        bool eavesdrop,
                                                        const EventSet& alphabet) {
    for (const auto& e : ac.attackable)
        if (!alphabet.count(e))
            throw ValidationError("attackable event '" + e + "' not in the alphabet");
    if (!eavesdrop)
        for (const auto& e : alphabet)
            if (is_gamma_event_name(e))
                throw ValidationError("command event '" + e +
                                      "' requires the eavesdropping mode");

    const EventSet base = set_difference(alphabet, ac.attackable);
    const std::vector<std::string> attackable(ac.attackable.begin(), ac.attackable.end());
    std::vector<ControlDecision> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << attackable.size()); ++mask) {
        EventSet enabled = base;
        for (std::size_t i = 0; i < attackable.size(); ++i)
            if (mask & (std::size_t{1} << i)) enabled.insert(attackable[i]);
        out.push_back({std::move(enabled)});
    }
    std::sort(out.begin(), out.end(), [](const ControlDecision& a, const ControlDecision& b) {
        if (a.enabled.size() != b.enabled.size()) return a.enabled.size() > b.enabled.size();
        return a.enabled < b.enabled;
    });
    return out;
}

/// Where a decision leads before the attacker sees anything: the closure of
/// the belief under enabled-but-invisible events, plus one observation edge
/// per visible enabled event executable somewhere in the closure.
struct ObservationNode {
    StateSet closure;
    std::map<std::string, std::string> moves; // visible event -> successor node name
};

struct GameNode {
    StateSet belief;
    /// Aligned with InformationGame::decisions; nullopt once pruned away.
    std::vector<std::optional<ObservationNode>> edges;
};

struct InformationGame {
    std::vector<ControlDecision> decisions; // canonical order, shared by every node
    std::map<std::string, GameNode> nodes;  // keyed by the encoded belief
    std::string initial;
    EventSet visible;
    EventSet invisible;
    EventSet attackable;
};

struct GameOptions {
    std::size_t max_game_nodes = 1000000;
    /// Testing knob: with false, command events are treated as invisible to
    /// the attacker even in eavesdropping mode, which must collapse the
    /// game's power to the non-eavesdropping one.
    bool gamma_visible = true;
};

inline InformationGame build_game(const TransformedPlant& tp, const AttackConstraint& ac,
                                  const GameOptions& options = {}) {
    InformationGame game;
    game.attackable = ac.attackable;
    game.visible = ac.attacker_observable;
    if (tp.eavesdrop && options.gamma_visible)
        game.visible = set_union(game.visible, tp.gamma_events);
    game.invisible = set_difference(tp.automaton.alphabet(), game.visible);
    game.decisions = enumerate_decisions(ac, tp.eavesdrop, tp.automaton.alphabet());

    const StateSet init_belief{tp.automaton.initial()};
    game.initial = make_belief_name(init_belief);
    game.nodes.emplace(game.initial, GameNode{init_belief, {}});
    std::queue<std::string> todo;
    todo.push(game.initial);
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        GameNode& node = game.nodes.at(cur);
        node.edges.reserve(game.decisions.size());
        for (const auto& decision : game.decisions) {
            ObservationNode obs;
            obs.closure =
                unobservable_reach(tp.automaton,
                                   set_intersection(game.invisible, decision.enabled),
                                   node.belief);
            for (const auto& e : set_intersection(game.visible, decision.enabled)) {
                StateSet image;
                for (const auto& z : obs.closure) {
                    auto t = tp.automaton.step(z, e);
                    if (t) image.insert(*t);
                }
                if (image.empty()) continue;
                const std::string succ = make_belief_name(image);
                obs.moves.emplace(e, succ);
                if (!game.nodes.count(succ)) {
                    if (game.nodes.size() >= options.max_game_nodes)
                        throw ResourceLimitError(
                            "information game exceeded the node cap of " +
                            std::to_string(options.max_game_nodes));
                    game.nodes.emplace(succ, GameNode{std::move(image), {}});
                    todo.push(succ);
                }
            }
            node.edges.push_back(std::move(obs));
        }
    }
    return game;
}

/// Greatest fixpoint of safety: delete every decision edge whose closure
/// touches a bad state or whose observation successors left the game,
/// delete nodes with no decisions left, repeat; finally keep only what the
/// initial node can still reach.  In the result, ANY assignment of
/// surviving decisions keeps the closed loop away from tp.bad.
inline InformationGame prune_safety(const InformationGame& game, const TransformedPlant& tp) {
    InformationGame out = game;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [name, node] : out.nodes) {
            for (auto& edge : node.edges) {
                if (!edge) continue;
                bool unsafe = !set_intersection(edge->closure, tp.bad).empty();
                if (!unsafe)
                    for (const auto& [e, succ] : edge->moves)
                        if (!out.nodes.count(succ)) {
                            unsafe = true;
                            break;
                        }
                if (unsafe) {
                    edge.reset();
                    changed = true;
                }
            }
        }
        for (auto it = out.nodes.begin(); it != out.nodes.end();) {
            bool any = false;
            for (const auto& edge : it->second.edges)
                if (edge) {
                    any = true;
                    break;
                }
            if (!any) {
                it = out.nodes.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }

    if (!out.nodes.count(out.initial)) {
        out.nodes.clear();
        return out;
    }
    StateSet reachable{out.initial};
    std::queue<std::string> todo;
    todo.push(out.initial);
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        for (const auto& edge : out.nodes.at(cur).edges) {
            if (!edge) continue;
            for (const auto& [e, succ] : edge->moves)
                if (reachable.insert(succ).second) todo.push(succ);
        }
    }
    for (auto it = out.nodes.begin(); it != out.nodes.end();)
        it = reachable.count(it->first) ? std::next(it) : out.nodes.erase(it);
    return out;
}

} // namespace covertsynth
