#pragma once

// JSON reading and writing.
//
// Reading accepts any JSON formatting (nlohmann does the parsing; unknown
// keys are ignored so files with sidecar keys load as plain automata).
// Writing is done by a small canonical emitter: keys in a fixed order,
// arrays sorted, two-space indent, one transition per line, trailing
// newline — so identical values always serialize to identical bytes.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "covertsynth/automaton.hpp"
#include "covertsynth/constraints.hpp"
#include "covertsynth/errors.hpp"

namespace covertsynth {

inline std::string json_quote(const std::string& s) { return nlohmann::json(s).dump(); }

template <typename Container>
inline std::string json_string_array(const Container& xs) {
    std::string out = "[";
    bool first = true;
    for (const auto& x : xs) {
        if (!first) out += ", ";
        out += json_quote(x);
        first = false;
    }
    out += "]";
    return out;
}

/// The six automaton fields as "  \"key\": value" lines, no commas.
inline std::vector<std::string> automaton_json_lines(const Automaton& a) {
    std::vector<std::string> lines;
    lines.push_back("  \"name\": " + json_quote(a.name()));
    lines.push_back("  \"alphabet\": " + json_string_array(a.alphabet()));
    lines.push_back("  \"states\": " + json_string_array(a.states()));
    lines.push_back("  \"initial\": " + json_quote(a.initial()));
    lines.push_back("  \"marked\": " + json_string_array(a.marked()));
    if (a.transitions().empty()) {
        lines.push_back("  \"transitions\": []");
    } else {
        std::string block = "  \"transitions\": [\n";
        bool first = true;
        for (const auto& [key, dst] : a.transitions()) {
            if (!first) block += ",\n";
            block += "    [" + json_quote(key.first) + ", " + json_quote(key.second) + ", " +
                     json_quote(dst) + "]";
            first = false;
        }
        block += "\n  ]";
        lines.push_back(block);
    }
    return lines;
}

inline std::string wrap_json_object(const std::vector<std::string>& lines) {
    std::string out = "{\n";
    for (size_t i = 0; i < lines.size(); ++i) {
        out += lines[i];
        if (i + 1 < lines.size()) out += ",";
        out += "\n";
    }
    out += "}\n";
    return out;
}

inline std::string serialize_automaton(const Automaton& a) {
    return wrap_json_object(automaton_json_lines(a));
}

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key,
                                         const std::string& what) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(what + ": missing key \"" + key + "\"");
    return *it;
}

inline std::string require_string(const nlohmann::json& j, const std::string& what) {
    if (!j.is_string()) throw ParseError(what + ": expected a string");
    return j.get<std::string>();
}

inline std::set<std::string> require_string_set(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array of strings");
    std::set<std::string> out;
    for (const auto& x : j) out.insert(require_string(x, what));
    return out;
}

} // namespace detail

inline Automaton automaton_from_json(const nlohmann::json& j,
                                     const std::string& what = "automaton") {
    using detail::require_key;
    using detail::require_string;
    using detail::require_string_set;
    if (!j.is_object()) throw ParseError(what + ": expected a JSON object");
    const std::string name = require_string(require_key(j, "name", what), what + ".name");
    const EventSet alphabet = require_string_set(require_key(j, "alphabet", what), what + ".alphabet");
    const StateSet states = require_string_set(require_key(j, "states", what), what + ".states");
    const std::string initial = require_string(require_key(j, "initial", what), what + ".initial");
    const StateSet marked = require_string_set(require_key(j, "marked", what), what + ".marked");

    const auto& jt = require_key(j, "transitions", what);
    if (!jt.is_array()) throw ParseError(what + ".transitions: expected an array");
    TransitionMap transitions;
    for (const auto& triple : jt) {
        if (!triple.is_array() || triple.size() != 3)
            throw ParseError(what + ".transitions: expected [src, event, dst] triples");
        const std::string src = require_string(triple[0], what + ".transitions");
        const std::string event = require_string(triple[1], what + ".transitions");
        const std::string dst = require_string(triple[2], what + ".transitions");
        if (!transitions.emplace(std::make_pair(src, event), dst).second)
            throw ParseError(what + ": duplicate transition for (" + src + ", " + event + ")");
    }
    try {
        return {name, alphabet, states, initial, marked, transitions};
    } catch (const ValidationError& e) {
        throw ParseError(what + ": " + e.what());
    }
}

struct Constraints {
    ControlConstraint cc;
    AttackConstraint ac;
};

inline Constraints constraints_from_json(const nlohmann::json& j,
                                         const std::string& what = "constraint") {
    using detail::require_key;
    using detail::require_string_set;
    if (!j.is_object()) throw ParseError(what + ": expected a JSON object");
    Constraints out;
    out.cc.controllable = require_string_set(require_key(j, "controllable", what), what);
    out.cc.observable = require_string_set(require_key(j, "observable", what), what);
    out.ac.attackable = require_string_set(require_key(j, "attackable", what), what);
    out.ac.attacker_observable =
        require_string_set(require_key(j, "attacker_observable", what), what);
    return out;
}

inline std::string serialize_constraints(const Constraints& c) {
    std::vector<std::string> lines;
    lines.push_back("  \"controllable\": " + json_string_array(c.cc.controllable));
    lines.push_back("  \"observable\": " + json_string_array(c.cc.observable));
    lines.push_back("  \"attackable\": " + json_string_array(c.ac.attackable));
    lines.push_back("  \"attacker_observable\": " + json_string_array(c.ac.attacker_observable));
    return wrap_json_object(lines);
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ParseError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write " + p.string());
    out << text;
    if (!out) throw ParseError("write failed for " + p.string());
}

inline nlohmann::json parse_json_file(const std::filesystem::path& p) {
    try {
        return nlohmann::json::parse(read_text(p));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(p.string() + ": " + e.what());
    }
}

inline Automaton load_automaton(const std::filesystem::path& p) {
    return automaton_from_json(parse_json_file(p), p.string());
}

inline Constraints load_constraints(const std::filesystem::path& p) {
    return constraints_from_json(parse_json_file(p), p.string());
}

} // namespace covertsynth
