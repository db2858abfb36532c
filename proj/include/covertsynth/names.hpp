#pragma once

// Canonical identifier grammar.
//
// Plain ("atomic") state and event names may use any printable characters
// except the structural ones: ',' '{' '}' '(' ')' and whitespace.  Derived
// objects get canonical composite names built from their parts:
//
//   tuple name    (p1,p2,...,pk)   k >= 2, product / composition states
//   belief name   {s1,s2,...}      member names sorted ascending; "{}" is
//                                  the dedicated empty-estimate state
//   command event CMD{e1,e2,...}   member events sorted ascending; encodes
//                                  an enabled-event set as one event
//
// The encodings are injective on canonical names, so equality of derived
// objects is plain string equality, and serialized files are byte-stable.
// The "CMD" prefix is reserved for command events; plain event names must
// not start with it.

#include <set>
#include <string>
#include <vector>

#include "covertsynth/errors.hpp"

namespace covertsynth {

inline bool is_name_atom(const std::string& s) {
    if (s.empty()) return false;
    for (unsigned char c : s) {
        if (c <= 0x20 || c == 0x7f) return false;
        if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') return false;
    }
    return true;
}

/// Split "a,b,(c,d)" at top-level commas, respecting nesting depth.
/// Returns empty vector for the empty string.
inline std::vector<std::string> split_composite(const std::string& inner) {
    std::vector<std::string> parts;
    if (inner.empty()) return parts;
    int depth = 0;
    std::string cur;
    for (char c : inner) {
        if (c == '(' || c == '{') depth++;
        if (c == ')' || c == '}') depth--;
        if (c == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

inline bool is_gamma_event_name(const std::string& s) {
    if (s.size() < 5 || s.compare(0, 4, "CMD{") != 0 || s.back() != '}') return false;
    const std::string inner = s.substr(4, s.size() - 5);
    if (inner.empty()) return true; // "CMD{}" encodes the empty command
    const auto parts = split_composite(inner);
    for (size_t i = 0; i < parts.size(); ++i) {
        if (!is_name_atom(parts[i])) return false;
        if (parts[i].compare(0, 3, "CMD") == 0) return false;
        if (i > 0 && !(parts[i - 1] < parts[i])) return false;
    }
    return true;
}

inline bool is_valid_state_name(const std::string& s) {
    if (is_name_atom(s)) return true;
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
        const auto parts = split_composite(s.substr(1, s.size() - 2));
        if (parts.size() < 2) return false;
        for (const auto& p : parts)
            if (!is_valid_state_name(p)) return false;
        return true;
    }
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
        const auto parts = split_composite(s.substr(1, s.size() - 2));
        for (size_t i = 0; i < parts.size(); ++i) {
            if (!is_valid_state_name(parts[i])) return false;
            if (i > 0 && !(parts[i - 1] < parts[i])) return false;
        }
        return true;
    }
    return false;
}

inline bool is_valid_event_name(const std::string& s) {
    if (is_gamma_event_name(s)) return true;
    return is_name_atom(s) && s.compare(0, 3, "CMD") != 0;
}

inline std::string make_tuple_name(const std::vector<std::string>& parts) {
    std::string out = "(";
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += parts[i];
    }
    out += ')';
    return out;
}

inline std::vector<std::string> split_tuple_name(const std::string& name) {
    if (name.size() < 2 || name.front() != '(' || name.back() != ')')
        throw ValidationError("not a composite state name: " + name);
    return split_composite(name.substr(1, name.size() - 2));
}

inline std::string make_belief_name(const std::set<std::string>& members) {
    std::string out = "{";
    bool first = true;
    for (const auto& m : members) {
        if (!first) out += ',';
        out += m;
        first = false;
    }
    out += '}';
    return out;
}

inline std::set<std::string> belief_members(const std::string& name) {
    if (name.size() < 2 || name.front() != '{' || name.back() != '}')
        throw ValidationError("not a belief state name: " + name);
    const auto parts = split_composite(name.substr(1, name.size() - 2));
    return {parts.begin(), parts.end()};
}

inline std::string make_gamma_event(const std::set<std::string>& events) {
    std::string out = "CMD{";
    bool first = true;
    for (const auto& e : events) {
        if (!first) out += ',';
        out += e;
        first = false;
    }
    out += '}';
    return out;
}

inline std::set<std::string> gamma_members(const std::string& name) {
    if (!is_gamma_event_name(name))
        throw ValidationError("not a command event name: " + name);
    const auto parts = split_composite(name.substr(4, name.size() - 5));
    return {parts.begin(), parts.end()};
}

} // namespace covertsynth
