#pragma once

// Loads the shipped fixture instances (fixtures/toy1 ... toy5).

#include <filesystem>
#include <string>

#include "covertsynth/automaton.hpp"
#include "covertsynth/json_io.hpp"

#ifndef COVERTSYNTH_FIXTURE_DIR
#error "COVERTSYNTH_FIXTURE_DIR must be defined by the build"
#endif

namespace fixtures {

using covertsynth::Automaton;
using covertsynth::Constraints;

inline std::filesystem::path dir() { return COVERTSYNTH_FIXTURE_DIR; }

struct Instance {
    Automaton g;
    Automaton s;
    Automaton h;
    Constraints c;
};

inline Instance load(const std::string& toy) {
    const auto base = dir() / toy;
    return {covertsynth::load_automaton(base / "plant.json"),
            covertsynth::load_automaton(base / "supervisor.json"),
            covertsynth::load_automaton(base / "damage.json"),
            covertsynth::load_constraints(base / "constraint.json")};
}

/// In-code twin of fixtures/toy1, used to check that the files and the
/// tests stay in sync.
inline Instance toy1_in_code() {
    using covertsynth::EventSet;
    using covertsynth::StateSet;
    using covertsynth::TransitionMap;
    Instance t;
    t.g = Automaton{"G", EventSet{"a", "b"}, StateSet{"q0", "q1", "q2"}, "q0",
                    StateSet{"q0", "q1", "q2"},
                    TransitionMap{{{"q0", "a"}, "q1"}, {{"q1", "b"}, "q2"}}};
    t.s = Automaton{"S", EventSet{"a", "b"}, StateSet{"x0", "x1"}, "x0",
                    StateSet{"x0", "x1"}, TransitionMap{{{"x0", "a"}, "x1"}}};
    t.h = Automaton{"H", EventSet{"a", "b"}, StateSet{"w0", "w1", "w2"}, "w0",
                    StateSet{"w2"},
                    TransitionMap{{{"w0", "a"}, "w1"}, {{"w1", "b"}, "w2"}}};
    t.c.cc.controllable = {"a", "b"};
    t.c.cc.observable = {"a", "b"};
    t.c.ac.attackable = {"b"};
    t.c.ac.attacker_observable = {"a", "b"};
    return t;
}

} // namespace fixtures
