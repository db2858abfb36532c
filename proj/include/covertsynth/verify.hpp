#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "covertsynth/synthesize.hpp"

namespace covertsynth {

/// Outcome of the covertness check.  When the attacker can be exposed, the
/// witness holds a shortest event sequence of the closed loop that ends in a
/// detected state without damage (command events included when eavesdropping).
struct CovertCheck {
    bool covert = true;
    std::vector<std::string> witness;
};

namespace detail {

/// The closed loop of plant, attacked supervisor, monitor, attacker and
/// completed damage automaton, with the detected-without-damage states.
struct AttackedLoop {
    Composition comp;
    StateSet bad;
};

inline AttackedLoop attacked_loop(const Automaton& g, const Automaton& s, const Automaton& a,
                                  const Automaton& h, const ControlConstraint& cc,
                                  const AttackConstraint& ac, bool eavesdrop) {
    require_valid_supervisor(s, cc);
    check_attack_constraint(ac, cc, g.alphabet());
    require_same_alphabet(g, s, "supervisor");
    require_same_alphabet(g, h, "damage automaton");

    const EventSet expected =
        eavesdrop ? set_union(g.alphabet(), gamma_alphabet(s)) : g.alphabet();
    if (a.alphabet() != expected)
        throw ValidationError("attacker '" + a.name() +
                              "' must range over the plant alphabet" +
                              std::string(eavesdrop ? " plus the command events" : ""));
    const ValidityReport vr = validate_attacker(a, ac, eavesdrop);
    if (!vr.valid)
        throw ValidationError("attacker '" + a.name() + "' breaks the attack rules at state '" +
                              vr.violations.front().state + "' on event '" +
                              vr.violations.front().event + "' (" +
                              vr.violations.front().kind + ")");

    const Automaton gm = all_marked(g);
    Automaton sup;
    std::string halt;
    if (eavesdrop) {
        BipartiteSupervisor bt = bipartize_attacked(s, cc, ac);
        halt = bt.halt_state;
        sup = std::move(bt.automaton);
    } else {
        AttackedSupervisor sa = build_attacked_supervisor(s, cc, ac);
        halt = sa.halt_state;
        sup = std::move(sa.automaton);
    }
    const Automaton monitor = build_monitor(g, s, cc);
    const Automaton am = all_marked(a);
    const Automaton hc = complete_with_sink(h);

    AttackedLoop out;
    out.comp = compose_many({&gm, &sup, &monitor, &am, &hc}, "V");
    const std::string dead = make_belief_name({});
    for (const auto& [state, parts] : out.comp.parts) {
        const bool detected = parts[1] == halt || parts[2] == dead;
        if (detected && !h.marked().count(parts[4])) out.bad.insert(state);
    }
    return out;
}

} // namespace detail

/// Definition-level covertness: no run of the closed loop may reach a
/// detected state unless damage was already inflicted.
inline CovertCheck check_covert(const Automaton& g, const Automaton& s, const Automaton& a,
                                const Automaton& h, const ControlConstraint& cc,
                                const AttackConstraint& ac, bool eavesdrop) {
    const detail::AttackedLoop loop = detail::attacked_loop(g, s, a, h, cc, ac, eavesdrop);
    CovertCheck out;
    if (loop.bad.empty()) return out;
    out.covert = false;

    const Automaton& v = loop.comp.automaton;
    std::map<std::string, std::pair<std::string, std::string>> parent;
    std::set<std::string> seen{v.initial()};
    std::deque<std::string> todo{v.initial()};
    std::string hit;
    if (loop.bad.count(v.initial())) {
        return out; // exposed before any event; the empty witness
    }
    while (!todo.empty() && hit.empty()) {
        const std::string cur = todo.front();
        todo.pop_front();
        for (const auto& e : v.enabled_events(cur)) {
            const std::string succ = *v.step(cur, e);
            if (!seen.insert(succ).second) continue;
            parent[succ] = {cur, e};
            if (loop.bad.count(succ)) {
                hit = succ;
                break;
            }
            todo.push_back(succ);
        }
    }
    for (std::string at = hit; parent.count(at);) {
        auto& [prev, e] = parent.at(at);
        out.witness.push_back(e);
        at = prev;
    }
    std::reverse(out.witness.begin(), out.witness.end());
    return out;
}

/// Definition-level nonblocking damage: every run of the closed loop can be
/// extended to inflict damage.
inline bool check_damage_nonblocking(const Automaton& g, const Automaton& s,
                                     const Automaton& a, const Automaton& h,
                                     const ControlConstraint& cc, const AttackConstraint& ac,
                                     bool eavesdrop) {
    return is_nonblocking(detail::attacked_loop(g, s, a, h, cc, ac, eavesdrop).comp.automaton)
        .nonblocking;
}

/// Definition-level reachable damage: some run of the closed loop inflicts
/// damage.
inline bool check_damage_reachable(const Automaton& g, const Automaton& s, const Automaton& a,
                                   const Automaton& h, const ControlConstraint& cc,
                                   const AttackConstraint& ac, bool eavesdrop) {
    return marked_nonempty(detail::attacked_loop(g, s, a, h, cc, ac, eavesdrop).comp.automaton);
}

/// Resilience of the supervised system: vulnerable (the verdict "exists",
/// with the attacker in hand), resilient ("none"), or indeterminate when a
/// resource cap was hit.
struct ResilienceResult {
    Verdict verdict = Verdict::none;
    std::optional<Automaton> attacker;
    SynthesisReport report;
};

inline ResilienceResult verify_resilience(const Automaton& g, const Automaton& s,
                                          const Automaton& h, const ControlConstraint& cc,
                                          const AttackConstraint& ac, Goal goal,
                                          bool eavesdrop,
                                          const SynthesizeOptions& options = {}) {
    SynthesisResult r =
        synthesize(g, s, h, cc, ac, goal, eavesdrop, ElideMonitor::automatic, options);
    return {r.report.verdict, std::move(r.attacker), r.report};
}

/// Caps for the exhaustive oracle below.  Exceeding any of them raises
/// ResourceLimitError so that "too big to enumerate" can never be mistaken
/// for "no attacker exists".
struct BruteForceLimits {
    std::size_t max_game_nodes = 12;
    std::size_t max_decisions = 16;
    std::size_t max_candidates = 100000;
};

namespace detail {

/// Odometer over every decision assignment on `game`, judged purely by the
/// definition-level checkers.  Restriction to the self-reachable part makes
/// many assignments coincide; each distinct restricted strategy runs once.
inline bool any_strategy_passes(const InformationGame& game, const TransformedPlant& tp,
                                const Automaton& g, const Automaton& s, const Automaton& h,
                                const ControlConstraint& cc, const AttackConstraint& ac,
                                Goal goal, bool eavesdrop, std::size_t max_candidates) {
    const std::size_t dcount = game.decisions.size();
    std::size_t candidates = 1;
    for (std::size_t i = 0; i < game.nodes.size(); ++i) {
        if (candidates > max_candidates / dcount)
            throw ResourceLimitError("brute force would enumerate more than " +
                                     std::to_string(max_candidates) + " strategies");
        candidates *= dcount;
    }

    std::vector<std::string> names;
    for (const auto& [name, node] : game.nodes) names.push_back(name);
    std::vector<std::size_t> idx(names.size(), 0);
    std::set<std::string> tested;
    while (true) {
        std::map<std::string, std::size_t> assignment;
        for (std::size_t i = 0; i < names.size(); ++i) assignment[names[i]] = idx[i];
        const AttackerStrategy st = restrict_to_reachable(
            make_strategy(game, assignment, tp.automaton.alphabet()));
        std::string key;
        for (const auto& [node, dec] : st.choice)
            key += node + "=" + make_belief_name(dec.enabled) + ";";
        if (tested.insert(key).second) {
            const Automaton cand = extract_attacker(st, ac, eavesdrop);
            if (check_covert(g, s, cand, h, cc, ac, eavesdrop).covert) {
                const bool damaging =
                    goal == Goal::reachable
                        ? check_damage_reachable(g, s, cand, h, cc, ac, eavesdrop)
                        : check_damage_nonblocking(g, s, cand, h, cc, ac, eavesdrop);
                if (damaging) return true;
            }
        }
        std::size_t i = 0;
        for (; i < idx.size(); ++i) {
            if (++idx[i] < dcount) break;
            idx[i] = 0;
        }
        if (i == idx.size()) return false;
    }
}

inline InformationGame unpruned_game(const TransformedPlant& tp, const AttackConstraint& ac,
                                     const BruteForceLimits& limits) {
    GameOptions gopts;
    gopts.max_game_nodes = limits.max_game_nodes;
    InformationGame game = build_game(tp, ac, gopts);
    if (game.decisions.size() > limits.max_decisions)
        throw ResourceLimitError("brute force faces " + std::to_string(game.decisions.size()) +
                                 " control decisions, over the cap of " +
                                 std::to_string(limits.max_decisions));
    return game;
}

} // namespace detail

/// Exhaustive existence check: enumerate every positional strategy on the
/// unpruned information game and accept iff some induced attacker passes the
/// definition-level checks.  Deliberately independent of the pruning and
/// search machinery; meant as an oracle for small instances.
inline bool brute_force_exists(const Automaton& g, const Automaton& s, const Automaton& h,
                               const ControlConstraint& cc, const AttackConstraint& ac,
                               Goal goal, bool eavesdrop,
                               const BruteForceLimits& limits = {}) {
    const TransformedPlant tp =
        build_transformed_plant(g, s, h, cc, ac, eavesdrop, ElideMonitor::off);
    const InformationGame game = detail::unpruned_game(tp, ac, limits);
    return detail::any_strategy_passes(game, tp, g, s, h, cc, ac, goal, eavesdrop,
                                       limits.max_candidates);
}

/// Like brute_force_exists, but the strategy may additionally condition on
/// the last `window` observed events, not just the current game node.  With
/// window = 0 this is exactly the positional oracle.  A falsification aid
/// for the open question whether finite observation memory ever beats
/// positional strategies; any instance where this differs from
/// brute_force_exists deserves a loud report.
inline bool history_oracle_exists(const Automaton& g, const Automaton& s, const Automaton& h,
                                  const ControlConstraint& cc, const AttackConstraint& ac,
                                  Goal goal, bool eavesdrop, std::size_t window,
                                  const BruteForceLimits& limits = {}) {
    const TransformedPlant tp =
        build_transformed_plant(g, s, h, cc, ac, eavesdrop, ElideMonitor::off);
    const InformationGame base = detail::unpruned_game(tp, ac, limits);

    const auto wname = [](const std::string& b, const std::vector<std::string>& win) {
        std::string out = b + "|";
        for (std::size_t i = 0; i < win.size(); ++i) {
            if (i) out += ".";
            out += win[i];
        }
        return out;
    };

    InformationGame wg;
    wg.decisions = base.decisions;
    wg.visible = base.visible;
    wg.invisible = base.invisible;
    wg.attackable = base.attackable;
    wg.initial = wname(base.initial, {});

    std::map<std::string, std::pair<std::string, std::vector<std::string>>> pending{
        {wg.initial, {base.initial, {}}}};
    std::deque<std::string> todo{wg.initial};
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop_front();
        const auto [b, win] = pending.at(cur);
        const GameNode& src = base.nodes.at(b);
        GameNode node;
        node.belief = src.belief;
        node.edges.resize(src.edges.size());
        for (std::size_t d = 0; d < src.edges.size(); ++d) {
            ObservationNode edge;
            edge.closure = src.edges[d]->closure;
            for (const auto& [e, succ] : src.edges[d]->moves) {
                std::vector<std::string> w2 = win;
                w2.push_back(e);
                while (w2.size() > window) w2.erase(w2.begin());
                const std::string sn = wname(succ, w2);
                edge.moves[e] = sn;
                if (!pending.count(sn)) {
                    if (pending.size() >= limits.max_game_nodes)
                        throw ResourceLimitError(
                            "history unfolding exceeded the cap of " +
                            std::to_string(limits.max_game_nodes) + " nodes");
                    pending[sn] = {succ, w2};
                    todo.push_back(sn);
                }
            }
            node.edges[d] = std::move(edge);
        }
        wg.nodes[cur] = std::move(node);
    }
    return detail::any_strategy_passes(wg, tp, g, s, h, cc, ac, goal, eavesdrop,
                                       limits.max_candidates);
}

} // namespace covertsynth
