#pragma once

// Control and attack constraints, and the validity checks for supervisors
// and attackers.
//
// A supervisor must define every uncontrollable event at every state
// (it cannot disable them) and may react to unobservable events only with
// self-loops (it cannot see them).  An attacker is the same kind of object
// with "uncontrollable" replaced by "unattackable" and "unobservable" by
// "invisible to the attacker"; when the attacker eavesdrops on control
// commands, the command events are always visible to it.

#include <set>
#include <string>
#include <vector>

#include "covertsynth/automaton.hpp"
#include "covertsynth/errors.hpp"
#include "covertsynth/names.hpp"

namespace covertsynth {

struct ControlConstraint {
    EventSet controllable;
    EventSet observable;

    EventSet uncontrollable(const EventSet& alphabet) const {
        return set_difference(alphabet, controllable);
    }
    EventSet unobservable(const EventSet& alphabet) const {
        return set_difference(alphabet, observable);
    }
};

struct AttackConstraint {
    EventSet attackable;
    EventSet attacker_observable;
};

/// controllable and observable must be drawn from the given alphabet.
inline void check_control_constraint(const ControlConstraint& cc, const EventSet& alphabet) {
    for (const auto& e : cc.controllable)
        if (!alphabet.count(e))
            throw ValidationError("controllable event '" + e + "' not in the alphabet");
    for (const auto& e : cc.observable)
        if (!alphabet.count(e))
            throw ValidationError("observable event '" + e + "' not in the alphabet");
}

/// The attacker may only tamper with controllable events and only observe
/// observable events.
inline void check_attack_constraint(const AttackConstraint& ac, const ControlConstraint& cc,
                                    const EventSet& alphabet) {
    check_control_constraint(cc, alphabet);
    for (const auto& e : ac.attackable)
        if (!cc.controllable.count(e))
            throw ValidationError("attackable event '" + e + "' is not controllable");
    for (const auto& e : ac.attacker_observable)
        if (!cc.observable.count(e))
            throw ValidationError("attacker-observable event '" + e + "' is not observable");
}

struct Violation {
    std::string state;
    std::string event;
    std::string kind; // "uncontrollable_undefined" | "unobservable_moves" etc.
};

struct ValidityReport {
    bool valid = true;
    std::vector<Violation> violations;
};

/// A supervisor is valid iff every state defines every uncontrollable event
/// and every defined unobservable event is a self-loop.
inline ValidityReport validate_supervisor(const Automaton& s, const ControlConstraint& cc) {
    check_control_constraint(cc, s.alphabet());
    ValidityReport report;
    const EventSet uncontrollable = cc.uncontrollable(s.alphabet());
    const EventSet unobservable = cc.unobservable(s.alphabet());
    for (const auto& x : s.states()) {
        for (const auto& e : uncontrollable)
            if (!s.defined(x, e)) {
                report.valid = false;
                report.violations.push_back({x, e, "uncontrollable_undefined"});
            }
        for (const auto& e : unobservable) {
            auto t = s.step(x, e);
            if (t && *t != x) {
                report.valid = false;
                report.violations.push_back({x, e, "unobservable_moves"});
            }
        }
    }
    return report;
}

/// An attacker is valid iff every state defines every unattackable event
/// and every defined attacker-invisible event is a self-loop.  Command
/// events (only present when eavesdropping) are never attackable and are
/// always visible to an eavesdropping attacker.
inline ValidityReport validate_attacker(const Automaton& a, const AttackConstraint& ac,
                                        bool eavesdrop) {
    for (const auto& e : ac.attackable)
        if (!a.has_event(e))
            throw ValidationError("attackable event '" + e + "' not in the alphabet");
    for (const auto& e : ac.attacker_observable)
        if (!a.has_event(e))
            throw ValidationError("attacker-observable event '" + e + "' not in the alphabet");

    ValidityReport report;
    for (const auto& y : a.states()) {
        for (const auto& e : a.alphabet()) {
            const bool gamma = is_gamma_event_name(e);
            const bool attackable = ac.attackable.count(e) > 0;
            const bool visible = ac.attacker_observable.count(e) > 0 || (eavesdrop && gamma);
            if (!attackable && !a.defined(y, e)) {
                report.valid = false;
                report.violations.push_back({y, e, "unattackable_undefined"});
            }
            if (!visible) {
                auto t = a.step(y, e);
                if (t && *t != y) {
                    report.valid = false;
                    report.violations.push_back({y, e, "invisible_moves"});
                }
            }
        }
    }
    return report;
}

} // namespace covertsynth
