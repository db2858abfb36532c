#pragma once

// Attack-model constructions.
//
// An actuator attacker can flip the enablement of events it may tamper with.
// Feeding such attacks through a fixed supervisor yields the attacked
// supervisor S^A: disabled-but-attackable events become silent self-loops
// (when the supervisor cannot see them) or edges into a fresh halting state
// (when it can, modelling the supervisor shutting down on an inconsistent
// observation).  Composing the plant, S^A, the supervisor's own belief
// monitor, and a completed damage automaton gives the transformed plant on
// which covert-attacker synthesis becomes a partial-observation safety /
// nonblocking synthesis problem.  The monitor component can often be elided;
// `monitor_elidable` decides when that is sound.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covertsynth/automaton.hpp"
#include "covertsynth/bipartite.hpp"
#include "covertsynth/constraints.hpp"
#include "covertsynth/errors.hpp"
#include "covertsynth/names.hpp"

namespace covertsynth {

namespace detail {

inline void require_valid_supervisor(const Automaton& s, const ControlConstraint& cc) {
    const ValidityReport report = validate_supervisor(s, cc);
    if (!report.valid) {
        const Violation& v = report.violations.front();
        throw ValidationError("invalid supervisor: " + v.kind + " for event '" + v.event +
                              "' at state '" + v.state + "'");
    }
}

inline void require_same_alphabet(const Automaton& g, const Automaton& other,
                                  const std::string& what) {
    if (other.alphabet() != g.alphabet())
        throw ValidationError(what + " alphabet differs from the plant alphabet");
}

} // namespace detail

/// A supervisor with the attacker's enablement edits applied, plus the name
/// of the fresh halting state (unreachable if nothing routes to it).
struct AttackedSupervisor {
    Automaton automaton;
    std::string halt_state;
};

/// Apply the two enablement-attack rules to a valid supervisor: an
/// attackable event the supervisor left undefined becomes a self-loop if the
/// supervisor cannot observe it, and an edge into a fresh halting state if
/// it can.  The halting state has no outgoing transitions.  Every state,
/// including the halting one, is marked: S^A never constrains marking on its
/// own, that is the damage component's job.
inline AttackedSupervisor build_attacked_supervisor(const Automaton& s,
                                                    const ControlConstraint& cc,
                                                    const AttackConstraint& ac) {
    check_attack_constraint(ac, cc, s.alphabet());
    detail::require_valid_supervisor(s, cc);

    const std::string halt = fresh_state_name(s.states(), "halt");
    StateSet states = s.states();
    states.insert(halt);
    TransitionMap transitions = s.transitions();
    for (const auto& x : s.states())
        for (const auto& e : ac.attackable)
            if (!s.defined(x, e))
                transitions[{x, e}] = cc.observable.count(e) ? halt : x;
    Automaton out{s.name() + "^A", s.alphabet(), states, s.initial(), states,
                  std::move(transitions)};
    return {std::move(out), halt};
}

/// The supervisor's belief about the closed loop: the observer of
/// supervisor||plant under the supervisor's observable events.  Belief
/// states are sets of (supervisor state, plant state) pairs; the empty
/// belief is the state "the supervisor has seen something impossible".
inline Automaton build_monitor(const Automaton& g, const Automaton& s,
                               const ControlConstraint& cc) {
    detail::require_same_alphabet(g, s, "supervisor");
    detail::require_valid_supervisor(s, cc);
    const Automaton obs = observer(product(s, g), cc.observable);
    return {"M", obs.alphabet(), obs.states(), obs.initial(), obs.marked(),
            obs.transitions()};
}

/// Extend the damage marking to every state from which damage is reachable
/// via uncontrollable events only.  Once the attacker has steered the loop
/// there, nobody can prevent the remaining suffix, so such states already
/// count as damage.
inline Automaton relax_damage_for_uncontrollables(const Automaton& h,
                                                  const ControlConstraint& cc) {
    check_control_constraint(cc, h.alphabet());
    const EventSet uncontrollable = cc.uncontrollable(h.alphabet());

    std::map<std::string, std::vector<std::string>> reverse;
    for (const auto& [key, dst] : h.transitions())
        if (uncontrollable.count(key.second)) reverse[dst].push_back(key.first);

    StateSet marked = h.marked();
    std::vector<std::string> frontier(marked.begin(), marked.end());
    while (!frontier.empty()) {
        const std::string w = frontier.back();
        frontier.pop_back();
        auto it = reverse.find(w);
        if (it == reverse.end()) continue;
        for (const auto& src : it->second)
            if (marked.insert(src).second) frontier.push_back(src);
    }
    return {h.name(), h.alphabet(), h.states(), h.initial(), std::move(marked),
            h.transitions()};
}

enum class ElisionVerdict { by_theorem3, by_situation2, not_elidable };

inline const char* to_string(ElisionVerdict v) {
    switch (v) {
        case ElisionVerdict::by_theorem3: return "by_theorem3";
        case ElisionVerdict::by_situation2: return "by_situation2";
        case ElisionVerdict::not_elidable: return "not_elidable";
    }
    return "not_elidable";
}

enum class ElideMonitor { automatic, on, off };

/// Where each component of a transformed-plant state came from.
struct StateRole {
    std::string plant;
    std::string supervisor; // attacked-supervisor state; a bipartite one when eavesdropping
    std::string damage;
    bool supervisor_halted = false;
    std::optional<StateSet> monitor; // belief members; absent when the monitor was elided
};

struct TransformedPlant {
    Automaton automaton;
    StateSet bad; // detected (halted or empty belief) without damage
    std::map<std::string, StateRole> roles;
    bool eavesdrop = false;
    bool monitor_elided = false;
    std::optional<ElisionVerdict> elision; // absent when elision was not considered
    EventSet gamma_events;                 // command events; empty unless eavesdropping
    std::string halt_state;                // halting state of the supervisor component
};

inline TransformedPlant build_transformed_plant(const Automaton& g, const Automaton& s,
                                                const Automaton& h,
                                                const ControlConstraint& cc,
                                                const AttackConstraint& ac, bool eavesdrop,
                                                ElideMonitor elide);

/// Decide whether the monitor component adds any detection power.  The
/// syntactic fast path: if no attackable event is unobservable, every attack
/// is caught by the supervisor component itself.  Otherwise check on the
/// full product whether the belief can ever empty out under an event the
/// plant estimate cannot execute; if it never can, the monitor is still
/// redundant (the product-level condition).
inline ElisionVerdict monitor_elidable(const Automaton& g, const Automaton& s,
                                       const Automaton& h, const ControlConstraint& cc,
                                       const AttackConstraint& ac, bool eavesdrop = false) {
    check_attack_constraint(ac, cc, g.alphabet());
    const EventSet hidden_attackable =
        set_intersection(cc.unobservable(g.alphabet()), ac.attackable);
    if (hidden_attackable.empty()) return ElisionVerdict::by_theorem3;

    const TransformedPlant full =
        build_transformed_plant(g, s, h, cc, ac, eavesdrop, ElideMonitor::off);
    for (const auto& [state, role] : full.roles) {
        if (role.monitor->empty()) continue;
        StateSet image;
        for (const auto& pair : *role.monitor) image.insert(split_tuple_name(pair)[1]);
        for (const auto& e : cc.observable) {
            if (!full.automaton.defined(state, e)) continue;
            bool estimate_moves = false;
            for (const auto& q : image)
                if (g.defined(q, e)) { estimate_moves = true; break; }
            if (!estimate_moves) return ElisionVerdict::not_elidable;
        }
    }
    return ElisionVerdict::by_situation2;
}

/// Compose plant, attacked supervisor (bipartite when eavesdropping), the
/// supervisor's belief monitor (unless elided) and the completed damage
/// automaton.  A state is marked iff its damage component is marked; it is
/// bad iff the attack has been detected there (supervisor halted, or belief
/// empty) without damage having been inflicted.
inline TransformedPlant build_transformed_plant(const Automaton& g, const Automaton& s,
                                                const Automaton& h,
                                                const ControlConstraint& cc,
                                                const AttackConstraint& ac, bool eavesdrop,
                                                ElideMonitor elide) {
    detail::require_same_alphabet(g, s, "supervisor");
    detail::require_same_alphabet(g, h, "damage");
    check_attack_constraint(ac, cc, g.alphabet());
    detail::require_valid_supervisor(s, cc);

    TransformedPlant tp;
    tp.eavesdrop = eavesdrop;
    if (elide != ElideMonitor::off) {
        const ElisionVerdict verdict = monitor_elidable(g, s, h, cc, ac, eavesdrop);
        tp.elision = verdict;
        if (verdict == ElisionVerdict::not_elidable) {
            if (elide == ElideMonitor::on)
                throw ValidationError(
                    "monitor elision was forced but is unsound for this instance");
        } else {
            tp.monitor_elided = true;
        }
    }

    // Supervisor component: S^A, or BT(S)^A when the attacker eavesdrops on
    // control commands.
    Automaton sup;
    std::map<std::string, std::string> base_of; // supervisor component state -> S state
    if (eavesdrop) {
        BipartiteSupervisor bta = bipartize_attacked(s, cc, ac);
        tp.halt_state = bta.halt_state;
        tp.gamma_events = gamma_alphabet(s);
        base_of = std::move(bta.base_of);
        sup = std::move(bta.automaton);
    } else {
        AttackedSupervisor sa = build_attacked_supervisor(s, cc, ac);
        tp.halt_state = sa.halt_state;
        for (const auto& x : sa.automaton.states()) base_of[x] = x;
        sup = std::move(sa.automaton);
    }

    const Automaton gm = all_marked(g);
    const Automaton hc = complete_with_sink(h);
    std::vector<const Automaton*> parts{&gm, &sup, &hc};
    Automaton monitor;
    if (!tp.monitor_elided) {
        monitor = build_monitor(g, s, cc);
        parts = {&gm, &sup, &monitor, &hc};
    }
    Composition comp = compose_many(parts, "P");

    const StateSet damage_marked = h.marked();
    for (const auto& [state, components] : comp.parts) {
        StateRole role;
        role.plant = components[0];
        role.supervisor = components[1];
        role.damage = components.back();
        role.supervisor_halted = role.supervisor == tp.halt_state;
        if (!tp.monitor_elided) role.monitor = belief_members(components[2]);

        // Supervisor self-knowledge: every nonempty belief is about exactly
        // the supervisor state we are composed with.
        if (role.monitor && !role.monitor->empty()) {
            StateSet dom;
            for (const auto& pair : *role.monitor) dom.insert(split_tuple_name(pair)[0]);
            if (dom != StateSet{base_of.at(role.supervisor)})
                throw std::logic_error(
                    "transformed plant: belief domain out of sync at state " + state);
        }

        const bool detected =
            role.supervisor_halted || (role.monitor && role.monitor->empty());
        if (detected && !damage_marked.count(role.damage)) tp.bad.insert(state);
        tp.roles.emplace(state, std::move(role));
    }
    tp.automaton = std::move(comp.automaton);
    return tp;
}

} // namespace covertsynth
