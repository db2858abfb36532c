#pragma once

// Deterministic partial finite automata over named states and events, plus
// the handful of constructions everything else is built from: synchronous
// products, hidden-event closures, the belief observer, reachability and
// nonblocking analysis.
//
// All values are immutable after construction and every operation is a pure
// function.  Wherever an order of traversal is observable (state discovery,
// emitted names, witnesses) the sorted name order is used, so identical
// inputs give byte-identical outputs.

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "covertsynth/errors.hpp"
#include "covertsynth/names.hpp"

namespace covertsynth {

using EventSet = std::set<std::string>;
using StateSet = std::set<std::string>;

/// (source state, event) -> destination state.  A std::map keyed on the
/// pair keeps transitions unique per (source, event) and canonically sorted.
using TransitionMap = std::map<std::pair<std::string, std::string>, std::string>;

inline EventSet set_union(const EventSet& a, const EventSet& b) {
    EventSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

inline EventSet set_difference(const EventSet& a, const EventSet& b) {
    EventSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
    return out;
}

inline EventSet set_intersection(const EventSet& a, const EventSet& b) {
    EventSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.end()));
    return out;
}

class Automaton {
public:
    Automaton() = default;

    Automaton(std::string name, EventSet alphabet, StateSet states, std::string initial,
              StateSet marked, TransitionMap transitions)
        : name_(std::move(name)),
          alphabet_(std::move(alphabet)),
          states_(std::move(states)),
          initial_(std::move(initial)),
          marked_(std::move(marked)),
          transitions_(std::move(transitions)) {
        check();
    }

    const std::string& name() const { return name_; }
    const EventSet& alphabet() const { return alphabet_; }
    const StateSet& states() const { return states_; }
    const std::string& initial() const { return initial_; }
    const StateSet& marked() const { return marked_; }
    const TransitionMap& transitions() const { return transitions_; }

    bool has_event(const std::string& e) const { return alphabet_.count(e) > 0; }
    bool has_state(const std::string& s) const { return states_.count(s) > 0; }
    bool is_marked(const std::string& s) const { return marked_.count(s) > 0; }

    bool defined(const std::string& s, const std::string& e) const {
        return transitions_.count({s, e}) > 0;
    }

    std::optional<std::string> step(const std::string& s, const std::string& e) const {
        auto it = transitions_.find({s, e});
        if (it == transitions_.end()) return std::nullopt;
        return it->second;
    }

    EventSet enabled_events(const std::string& s) const {
        EventSet out;
        for (auto it = transitions_.lower_bound({s, std::string()});
             it != transitions_.end() && it->first.first == s; ++it)
            out.insert(it->first.second);
        return out;
    }

private:
    void check() const {
        if (name_.empty()) throw ValidationError("automaton name must be non-empty");
        if (states_.empty()) throw ValidationError(name_ + ": no states");
        for (const auto& e : alphabet_)
            if (!is_valid_event_name(e))
                throw ValidationError(name_ + ": invalid event name '" + e + "'");
        for (const auto& s : states_)
            if (!is_valid_state_name(s))
                throw ValidationError(name_ + ": invalid state name '" + s + "'");
        if (!states_.count(initial_))
            throw ValidationError(name_ + ": initial state '" + initial_ + "' not declared");
        for (const auto& m : marked_)
            if (!states_.count(m))
                throw ValidationError(name_ + ": marked state '" + m + "' not declared");
        for (const auto& [key, dst] : transitions_) {
            if (!states_.count(key.first) || !states_.count(dst))
                throw ValidationError(name_ + ": transition endpoint not declared: " +
                                      key.first + " -" + key.second + "-> " + dst);
            if (!alphabet_.count(key.second))
                throw ValidationError(name_ + ": transition event not declared: '" +
                                      key.second + "'");
        }
    }

    std::string name_{"automaton"};
    EventSet alphabet_;
    StateSet states_{"q0"};
    std::string initial_{"q0"};
    StateSet marked_;
    TransitionMap transitions_;
};

/// First of base, base_1, base_2, ... that is not already taken.
inline std::string fresh_state_name(const StateSet& taken, const std::string& base) {
    if (!taken.count(base)) return base;
    for (int i = 1;; ++i) {
        std::string cand = base + "_" + std::to_string(i);
        if (!taken.count(cand)) return cand;
    }
}

/// Copy with every state marked.
inline Automaton all_marked(const Automaton& a) {
    return {a.name(), a.alphabet(), a.states(), a.initial(), a.states(), a.transitions()};
}

/// Synchronous product, reachable part only.  Shared events synchronize,
/// events private to one side move that side alone.  A pair is marked iff
/// both components are marked.
inline Automaton product(const Automaton& l, const Automaton& r) {
    const EventSet alphabet = set_union(l.alphabet(), r.alphabet());
    StateSet states, marked;
    TransitionMap transitions;
    std::map<std::string, std::pair<std::string, std::string>> parts;

    const std::string init = make_tuple_name({l.initial(), r.initial()});
    parts[init] = {l.initial(), r.initial()};
    states.insert(init);
    std::queue<std::string> todo;
    todo.push(init);
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        const auto [pl, pr] = parts[cur];
        if (l.is_marked(pl) && r.is_marked(pr)) marked.insert(cur);
        for (const auto& e : alphabet) {
            std::string nl = pl, nr = pr;
            if (l.has_event(e)) {
                auto t = l.step(pl, e);
                if (!t) continue;
                nl = *t;
            }
            if (r.has_event(e)) {
                auto t = r.step(pr, e);
                if (!t) continue;
                nr = *t;
            }
            const std::string dst = make_tuple_name({nl, nr});
            transitions[{cur, e}] = dst;
            if (states.insert(dst).second) {
                parts[dst] = {nl, nr};
                todo.push(dst);
            }
        }
    }
    return {"(" + l.name() + "||" + r.name() + ")", alphabet, std::move(states), init,
            std::move(marked), std::move(transitions)};
}

/// N-ary synchronous composition with the per-state decomposition kept.
/// Same rule as product: an event fires iff every component that owns it
/// can move; components not owning it stay put.
struct Composition {
    Automaton automaton;
    /// composite state name -> component state names, in component order
    std::map<std::string, std::vector<std::string>> parts;
};

inline Composition compose_many(const std::vector<const Automaton*>& comps,
                                const std::string& name) {
    if (comps.size() < 2) throw ValidationError("compose_many needs at least two components");
    EventSet alphabet;
    for (const auto* c : comps) alphabet = set_union(alphabet, c->alphabet());

    Composition out;
    StateSet states, marked;
    TransitionMap transitions;

    std::vector<std::string> init_parts;
    for (const auto* c : comps) init_parts.push_back(c->initial());
    const std::string init = make_tuple_name(init_parts);
    out.parts[init] = init_parts;
    states.insert(init);
    std::queue<std::string> todo;
    todo.push(init);
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        const auto& cur_parts = out.parts[cur];
        bool every_marked = true;
        for (size_t i = 0; i < comps.size(); ++i)
            if (!comps[i]->is_marked(cur_parts[i])) { every_marked = false; break; }
        if (every_marked) marked.insert(cur);
        for (const auto& e : alphabet) {
            std::vector<std::string> next = cur_parts;
            bool enabled = true;
            for (size_t i = 0; i < comps.size() && enabled; ++i) {
                if (!comps[i]->has_event(e)) continue;
                auto t = comps[i]->step(cur_parts[i], e);
                if (!t) enabled = false;
                else next[i] = *t;
            }
            if (!enabled) continue;
            const std::string dst = make_tuple_name(next);
            transitions[{cur, e}] = dst;
            if (states.insert(dst).second) {
                out.parts[dst] = next;
                todo.push(dst);
            }
        }
    }
    out.automaton = {name, std::move(alphabet), std::move(states), init,
                     std::move(marked), std::move(transitions)};
    return out;
}

/// States reachable from `from` via events in `hidden` only.  Always a
/// superset of `from`.
inline StateSet unobservable_reach(const Automaton& a, const EventSet& hidden,
                                   const StateSet& from) {
    for (const auto& e : hidden)
        if (!a.has_event(e))
            throw ValidationError(a.name() + ": unknown event '" + e + "'");
    for (const auto& s : from)
        if (!a.has_state(s))
            throw ValidationError(a.name() + ": unknown state '" + s + "'");
    StateSet closure = from;
    std::queue<std::string> todo;
    for (const auto& s : from) todo.push(s);
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        for (const auto& e : hidden) {
            auto t = a.step(cur, e);
            if (t && closure.insert(*t).second) todo.push(*t);
        }
    }
    return closure;
}

/// Belief automaton over the FULL alphabet of `a`: belief states are
/// hidden-closure-closed state sets; visible events move the belief (into
/// the dedicated dead belief "{}" when nothing can move, which has no
/// outgoing transitions); invisible events self-loop.  All states marked;
/// only reachable beliefs are materialized.
inline Automaton observer(const Automaton& a, const EventSet& visible) {
    for (const auto& e : visible)
        if (!a.has_event(e))
            throw ValidationError(a.name() + ": unknown event '" + e + "'");
    const EventSet hidden = set_difference(a.alphabet(), visible);
    const std::string dead = "{}";

    std::map<std::string, StateSet> members;
    StateSet states;
    TransitionMap transitions;

    const StateSet init_set = unobservable_reach(a, hidden, {a.initial()});
    const std::string init = make_belief_name(init_set);
    members[init] = init_set;
    states.insert(init);
    std::queue<std::string> todo;
    todo.push(init);
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        if (cur == dead) continue; // no transitions out of the dead belief
        const StateSet& cur_set = members[cur];
        for (const auto& e : a.alphabet()) {
            if (!visible.count(e)) {
                transitions[{cur, e}] = cur;
                continue;
            }
            StateSet moved;
            for (const auto& s : cur_set) {
                auto t = a.step(s, e);
                if (t) moved.insert(*t);
            }
            std::string dst;
            if (moved.empty()) {
                dst = dead;
            } else {
                StateSet closed = unobservable_reach(a, hidden, moved);
                dst = make_belief_name(closed);
                if (!members.count(dst)) members[dst] = std::move(closed);
            }
            transitions[{cur, e}] = dst;
            if (states.insert(dst).second) todo.push(dst);
        }
    }
    StateSet marked = states;
    return {"obs(" + a.name() + ")", a.alphabet(), std::move(states), init,
            std::move(marked), std::move(transitions)};
}

inline StateSet reachable_states(const Automaton& a) {
    StateSet seen{a.initial()};
    std::queue<std::string> todo;
    todo.push(a.initial());
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        for (const auto& e : a.enabled_events(cur)) {
            const std::string dst = *a.step(cur, e);
            if (seen.insert(dst).second) todo.push(dst);
        }
    }
    return seen;
}

/// Drop states unreachable from the initial state; language-preserving.
inline Automaton reachable_part(const Automaton& a) {
    const StateSet keep = reachable_states(a);
    StateSet marked;
    for (const auto& m : a.marked())
        if (keep.count(m)) marked.insert(m);
    TransitionMap transitions;
    for (const auto& [key, dst] : a.transitions())
        if (keep.count(key.first)) transitions[key] = dst;
    return {a.name(), a.alphabet(), keep, a.initial(), std::move(marked),
            std::move(transitions)};
}

struct NonblockingCheck {
    bool nonblocking = false;
    /// A reachable state that cannot reach any marked state, when blocking.
    std::optional<std::string> blocking_state;
};

/// True iff every reachable state can reach a marked state.
inline NonblockingCheck is_nonblocking(const Automaton& a) {
    const StateSet reach = reachable_states(a);
    std::map<std::string, StateSet> rev;
    for (const auto& [key, dst] : a.transitions())
        if (reach.count(key.first)) rev[dst].insert(key.first);

    StateSet coreach;
    std::queue<std::string> todo;
    for (const auto& m : a.marked())
        if (reach.count(m)) {
            coreach.insert(m);
            todo.push(m);
        }
    while (!todo.empty()) {
        const std::string cur = todo.front();
        todo.pop();
        for (const auto& src : rev[cur])
            if (coreach.insert(src).second) todo.push(src);
    }
    for (const auto& s : reach)
        if (!coreach.count(s)) return {false, s};
    return {true, std::nullopt};
}

/// True iff some marked state is reachable (the marked language is nonempty).
inline bool marked_nonempty(const Automaton& a) {
    for (const auto& s : reachable_states(a))
        if (a.is_marked(s)) return true;
    return false;
}

/// Make the transition function total by routing every undefined
/// (state, event) pair to a fresh unmarked sink.  Already-complete
/// automata are returned unchanged.
inline Automaton complete_with_sink(const Automaton& a) {
    bool complete = true;
    for (const auto& s : a.states()) {
        for (const auto& e : a.alphabet())
            if (!a.defined(s, e)) { complete = false; break; }
        if (!complete) break;
    }
    if (complete) return a;

    const std::string sink = fresh_state_name(a.states(), "sink");
    StateSet states = a.states();
    states.insert(sink);
    TransitionMap transitions = a.transitions();
    for (const auto& s : states)
        for (const auto& e : a.alphabet())
            if (!transitions.count({s, e})) transitions[{s, e}] = sink;
    return {a.name(), a.alphabet(), std::move(states), a.initial(), a.marked(),
            std::move(transitions)};
}

/// Erase events not in `visible`, order-preserving.
inline std::vector<std::string> project_string(const std::vector<std::string>& s,
                                               const EventSet& visible) {
    std::vector<std::string> out;
    for (const auto& e : s)
        if (visible.count(e)) out.push_back(e);
    return out;
}

/// Isomorphism of the reachable parts of two deterministic automata:
/// alphabets equal, and the unique transition-respecting bijection from
/// initial to initial exists and preserves marking.
inline bool isomorphic(const Automaton& a, const Automaton& b) {
    if (a.alphabet() != b.alphabet()) return false;
    std::map<std::string, std::string> fwd, bwd;
    std::queue<std::pair<std::string, std::string>> todo;
    fwd[a.initial()] = b.initial();
    bwd[b.initial()] = a.initial();
    todo.push({a.initial(), b.initial()});
    while (!todo.empty()) {
        auto [sa, sb] = todo.front();
        todo.pop();
        if (a.is_marked(sa) != b.is_marked(sb)) return false;
        if (a.enabled_events(sa) != b.enabled_events(sb)) return false;
        for (const auto& e : a.enabled_events(sa)) {
            const std::string da = *a.step(sa, e);
            const std::string db = *b.step(sb, e);
            auto fit = fwd.find(da);
            auto bit = bwd.find(db);
            if (fit == fwd.end() && bit == bwd.end()) {
                fwd[da] = db;
                bwd[db] = da;
                todo.push({da, db});
            } else if (fit == fwd.end() || bit == bwd.end() || fit->second != db ||
                       bit->second != da) {
                return false;
            }
        }
    }
    return true;
}

} // namespace covertsynth
