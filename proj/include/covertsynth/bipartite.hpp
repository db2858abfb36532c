#pragma once

// Supervisor bipartization: make the control command itself an event.
//
// Every supervisor state x is split into a command state (which emits the
// enabled-event set of x, encoded as the single event "CMD{...}") and a
// reaction state (which reacts to plant events as x did).  Observable
// events lead from a reaction state to the successor's command state (a
// fresh command is issued); unobservable events keep the supervisor in the
// same reaction state (self-loops, by supervisor observability).  An
// attacker that can see the command events thereby eavesdrops on the
// supervisor's decisions.

#include <map>
#include <string>

#include "covertsynth/automaton.hpp"
#include "covertsynth/constraints.hpp"
#include "covertsynth/errors.hpp"
#include "covertsynth/names.hpp"

namespace covertsynth {

enum class StateKind { command, reaction, halt };

inline const char* to_string(StateKind k) {
    switch (k) {
        case StateKind::command: return "command";
        case StateKind::reaction: return "reaction";
        case StateKind::halt: return "halt";
    }
    return "?";
}

struct BipartiteSupervisor {
    Automaton automaton;
    std::map<std::string, StateKind> kinds;
    /// command state -> its reaction twin
    std::map<std::string, std::string> reaction_of;
    /// any state -> the underlying supervisor state (halt maps to itself)
    std::map<std::string, std::string> base_of;
    /// name of the halting state; empty for plain (unattacked) bipartizations
    std::string halt_state;
};

/// The distinct command events of a supervisor, one per distinct
/// enabled-event set.  Rejects inputs whose own alphabet already uses the
/// reserved "CMD" prefix.
inline EventSet gamma_alphabet(const Automaton& s) {
    for (const auto& e : s.alphabet())
        if (e.compare(0, 3, "CMD") == 0)
            throw ValidationError(s.name() + ": event '" + e +
                                  "' collides with the reserved command-event prefix");
    EventSet out;
    for (const auto& x : s.states()) out.insert(make_gamma_event(s.enabled_events(x)));
    return out;
}

namespace detail {

/// Suffix for command-state names that collides with no input state.
inline std::string command_suffix(const StateSet& states) {
    std::string suffix = "_com";
    for (;;) {
        bool clash = false;
        for (const auto& x : states)
            if (states.count(x + suffix)) { clash = true; break; }
        if (!clash) return suffix;
        suffix += "_";
    }
}

} // namespace detail

/// Split every supervisor state into a command/reaction pair.
inline BipartiteSupervisor bipartize(const Automaton& s, const ControlConstraint& cc) {
    const auto validity = validate_supervisor(s, cc);
    if (!validity.valid)
        throw ValidationError(s.name() + ": not a valid supervisor for this constraint");
    const EventSet gamma = gamma_alphabet(s); // also rejects reserved-prefix clashes
    const EventSet unobservable = cc.unobservable(s.alphabet());
    const std::string suffix = detail::command_suffix(s.states());

    BipartiteSupervisor out;
    StateSet states;
    TransitionMap transitions;
    for (const auto& x : s.states()) {
        const std::string com = x + suffix;
        states.insert(x);
        states.insert(com);
        out.kinds[x] = StateKind::reaction;
        out.kinds[com] = StateKind::command;
        out.reaction_of[com] = x;
        out.base_of[x] = x;
        out.base_of[com] = x;
        transitions[{com, make_gamma_event(s.enabled_events(x))}] = x;
        for (const auto& e : s.enabled_events(x)) {
            const std::string dst = *s.step(x, e);
            if (unobservable.count(e))
                transitions[{x, e}] = dst; // == x by supervisor observability
            else
                transitions[{x, e}] = dst + suffix;
        }
    }
    StateSet marked = states;
    out.automaton = {"BT(" + s.name() + ")", set_union(s.alphabet(), gamma), std::move(states),
                     s.initial() + suffix, std::move(marked), std::move(transitions)};
    return out;
}

/// Lay the enablement-attack edges over the bipartization: at reaction
/// states, a disabled attackable event becomes a silent self-loop when the
/// supervisor cannot see it, and an edge into a fresh dead halting state
/// when it can.  Command states are never modified.
inline BipartiteSupervisor bipartize_attacked(const Automaton& s, const ControlConstraint& cc,
                                              const AttackConstraint& ac) {
    check_attack_constraint(ac, cc, s.alphabet());
    BipartiteSupervisor out = bipartize(s, cc);

    const std::string halt = fresh_state_name(out.automaton.states(), "halt");
    StateSet states = out.automaton.states();
    states.insert(halt);
    out.kinds[halt] = StateKind::halt;
    out.base_of[halt] = halt;
    out.halt_state = halt;

    const EventSet unobservable_attackable =
        set_intersection(cc.unobservable(s.alphabet()), ac.attackable);
    const EventSet observable_attackable =
        set_intersection(set_intersection(cc.observable, s.alphabet()), ac.attackable);

    TransitionMap transitions = out.automaton.transitions();
    for (const auto& x : s.states()) {
        for (const auto& e : unobservable_attackable)
            if (!s.defined(x, e)) transitions[{x, e}] = x;
        for (const auto& e : observable_attackable)
            if (!s.defined(x, e)) transitions[{x, e}] = halt;
    }
    StateSet marked = states;
    out.automaton = {"BTA(" + s.name() + ")", out.automaton.alphabet(), std::move(states),
                     out.automaton.initial(), std::move(marked), std::move(transitions)};
    return out;
}

/// Quotient that merges every command state into its reaction twin and
/// drops the command events.  For an attacker that cannot see commands the
/// two are equivalent, and the quotient of the attacked bipartization is
/// isomorphic to the plain attacked supervisor.
inline Automaton merge_command_states(const BipartiteSupervisor& bt) {
    EventSet alphabet;
    for (const auto& e : bt.automaton.alphabet())
        if (!is_gamma_event_name(e)) alphabet.insert(e);

    StateSet states;
    for (const auto& [state, kind] : bt.kinds)
        if (kind != StateKind::command) states.insert(state);

    TransitionMap transitions;
    for (const auto& [key, dst] : bt.automaton.transitions()) {
        if (is_gamma_event_name(key.second)) continue; // command edges vanish
        auto it = bt.reaction_of.find(dst);
        transitions[key] = it == bt.reaction_of.end() ? dst : it->second;
    }
    const std::string initial = bt.reaction_of.at(bt.automaton.initial());
    StateSet marked = states;
    return {"merged(" + bt.automaton.name() + ")", std::move(alphabet), std::move(states),
            initial, std::move(marked), std::move(transitions)};
}

} // namespace covertsynth
