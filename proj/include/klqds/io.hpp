#pragma once

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "klqds/alphabet.hpp"
#include "klqds/error.hpp"
#include "klqds/nfa.hpp"
#include "klqds/qds.hpp"

namespace klqds {

namespace detail {

struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
};

// Non-empty lines with comments stripped.
inline std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> out;
    std::string raw;
    std::size_t no = 0;
    while (std::getline(in, raw)) {
        ++no;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        auto toks = split_ws(raw);
        if (!toks.empty()) out.push_back({no, std::move(toks)});
    }
    return out;
}

[[noreturn]] inline void fail(std::size_t line, const std::string& msg) {
    throw InputError("line " + std::to_string(line) + ": " + msg);
}

inline std::size_t parse_count(const Line& l, const std::string& tok) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) fail(l.number, "expected a non-negative integer, got '" + tok + "'");
    return v;
}

inline std::vector<std::string> rest(const Line& l) { return {l.tokens.begin() + 1, l.tokens.end()}; }

inline void expect_type(const std::vector<Line>& lines, const std::string& type) {
    if (lines.empty()) throw InputError("empty input");
    const auto& l = lines.front();
    if (l.tokens[0] != "@type" || l.tokens.size() != 2) fail(l.number, "expected '@type " + type + "'");
    if (l.tokens[1] != type) fail(l.number, "expected type '" + type + "', found '" + l.tokens[1] + "'");
}

// Wraps name lookups so unknown names report the line.
template <class F>
auto at_line(const Line& l, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InputError& e) {
        fail(l.number, e.what());
    }
}

} // namespace detail

/// "nfa", "qds", or nullopt when the first directive is not @type.
inline std::optional<std::string> detect_type(const std::string& text) {
    std::istringstream in(text);
    auto lines = detail::tokenize(in);
    if (lines.empty() || lines[0].tokens[0] != "@type" || lines[0].tokens.size() != 2) return std::nullopt;
    return lines[0].tokens[1];
}

inline Nfa parse_nfa(std::istream& in) {
    const auto lines = detail::tokenize(in);
    detail::expect_type(lines, "nfa");
    std::optional<NfaBuilder> b;
    std::optional<Alphabet> alphabet;
    bool have_states = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const auto& head = l.tokens[0];
        if (head == "@alphabet") {
            if (alphabet) detail::fail(l.number, "duplicate @alphabet");
            alphabet = detail::at_line(l, [&] { return Alphabet(detail::rest(l)); });
            for (const auto& s : alphabet->symbols())
                if (s[0] == '@') detail::fail(l.number, "symbol '" + s + "' may not start with '@'");
            b.emplace(*alphabet);
        } else if (head == "@states") {
            if (!b) detail::fail(l.number, "@states before @alphabet");
            if (have_states) detail::fail(l.number, "duplicate @states");
            have_states = true;
            for (const auto& s : detail::rest(l)) {
                if (s[0] == '@') detail::fail(l.number, "state '" + s + "' may not start with '@'");
                detail::at_line(l, [&] { return b->add_state(s); });
            }
        } else if (head == "@initial" || head == "@final") {
            if (!have_states) detail::fail(l.number, head + " before @states");
            for (const auto& s : detail::rest(l)) {
                const auto q = detail::at_line(l, [&] { return b->existing(s); });
                head == "@initial" ? b->add_initial(q) : b->add_final(q);
            }
        } else if (head[0] == '@') {
            detail::fail(l.number, "unknown directive '" + head + "'");
        } else {
            if (!have_states) detail::fail(l.number, "transition before @states");
            if (l.tokens.size() != 3) detail::fail(l.number, "expected 'source symbol target'");
            detail::at_line(l, [&] {
                b->add_transition(l.tokens[0], l.tokens[1], l.tokens[2]);
                return 0;
            });
        }
    }
    if (!b) throw InputError("missing @alphabet");
    if (!have_states) throw InputError("missing @states");
    return b->build();
}

inline Nfa parse_nfa(const std::string& text) {
    std::istringstream in(text);
    return parse_nfa(in);
}

inline void write_nfa(std::ostream& out, const Nfa& a) {
    auto list = [&](const char* head, const auto& ids) {
        out << head;
        for (auto q : ids) out << ' ' << a.state_name(q);
        out << '\n';
    };
    out << "@type nfa\n@alphabet";
    for (const auto& s : a.alphabet().symbols()) out << ' ' << s;
    out << "\n@states";
    for (const auto& s : a.state_names()) out << ' ' << s;
    out << '\n';
    list("@initial", a.initials());
    list("@final", a.finals());
    for (const auto& t : a.transitions())
        out << a.state_name(t.src) << ' ' << a.alphabet().name(t.symbol) << ' ' << a.state_name(t.dst) << '\n';
}

inline std::string to_string(const Nfa& a) {
    std::ostringstream out;
    write_nfa(out, a);
    return out.str();
}

inline Qds parse_qds(std::istream& in) {
    const auto lines = detail::tokenize(in);
    detail::expect_type(lines, "qds");
    std::optional<Alphabet> alphabet;
    std::optional<QdsBuilder> b;
    std::vector<bool> layer_seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const auto& head = l.tokens[0];
        auto need_layers = [&] {
            if (!b) detail::fail(l.number, head + " before @layers");
        };
        if (head == "@alphabet") {
            if (alphabet) detail::fail(l.number, "duplicate @alphabet");
            alphabet = detail::at_line(l, [&] { return Alphabet(detail::rest(l)); });
            for (const auto& s : alphabet->symbols())
                if (s[0] == '@') detail::fail(l.number, "symbol '" + s + "' may not start with '@'");
        } else if (head == "@layers") {
            if (!alphabet) detail::fail(l.number, "@layers before @alphabet");
            if (b) detail::fail(l.number, "duplicate @layers");
            if (l.tokens.size() != 2) detail::fail(l.number, "expected '@layers m'");
            const auto m = detail::parse_count(l, l.tokens[1]);
            b.emplace(detail::at_line(l, [&] { return QdsBuilder(*alphabet, m); }));
            layer_seen.assign(m + 1, false);
        } else if (head == "@layer") {
            need_layers();
            if (l.tokens.size() < 2) detail::fail(l.number, "expected '@layer j states...'");
            const auto j = detail::parse_count(l, l.tokens[1]);
            if (j < 1 || j >= layer_seen.size()) detail::fail(l.number, "layer index " + l.tokens[1] + " out of range");
            if (layer_seen[j]) detail::fail(l.number, "duplicate @layer " + l.tokens[1]);
            layer_seen[j] = true;
            for (std::size_t t = 2; t < l.tokens.size(); ++t) {
                if (l.tokens[t][0] == '@') detail::fail(l.number, "state '" + l.tokens[t] + "' may not start with '@'");
                if (l.tokens[t] == "_") detail::fail(l.number, "'_' is reserved for the undefined target");
                detail::at_line(l, [&] {
                    b->add_state(l.tokens[t], j);
                    return 0;
                });
            }
        } else if (head == "@initial") {
            need_layers();
            if (l.tokens.size() != 2) detail::fail(l.number, "expected exactly one initial state");
            if (!b->has_state(l.tokens[1])) detail::fail(l.number, "undeclared state '" + l.tokens[1] + "'");
            b->set_initial(l.tokens[1]);
        } else if (head == "@final") {
            need_layers();
            for (const auto& s : detail::rest(l)) {
                if (!b->has_state(s)) detail::fail(l.number, "undeclared state '" + s + "'");
                b->add_final(s);
            }
        } else if (head == "@gamma") {
            need_layers();
            if (l.tokens.size() != 4) detail::fail(l.number, "expected '@gamma source target|_ shift'");
            if (!b->has_state(l.tokens[1])) detail::fail(l.number, "undeclared state '" + l.tokens[1] + "'");
            std::optional<std::string> target;
            if (l.tokens[2] != "_") {
                if (!b->has_state(l.tokens[2])) detail::fail(l.number, "undeclared state '" + l.tokens[2] + "'");
                target = l.tokens[2];
            }
            const auto shift = detail::parse_count(l, l.tokens[3]);
            b->set_gamma(l.tokens[1], target, static_cast<std::uint32_t>(shift));
        } else if (head[0] == '@') {
            detail::fail(l.number, "unknown directive '" + head + "'");
        } else {
            need_layers();
            if (l.tokens.size() != 3) detail::fail(l.number, "expected 'source symbol target'");
            for (auto t : {0, 2})
                if (!b->has_state(l.tokens[static_cast<std::size_t>(t)]))
                    detail::fail(l.number, "undeclared state '" + l.tokens[static_cast<std::size_t>(t)] + "'");
            detail::at_line(l, [&] {
                b->add_delta(l.tokens[0], std::string_view(l.tokens[1]), l.tokens[2]);
                return 0;
            });
        }
    }
    if (!b) throw InputError("missing @layers");
    return b->build();
}

inline Qds parse_qds(const std::string& text) {
    std::istringstream in(text);
    return parse_qds(in);
}

inline void write_qds(std::ostream& out, const Qds& s) {
    out << "@type qds\n@alphabet";
    for (const auto& a : s.alphabet().symbols()) out << ' ' << a;
    out << "\n@layers " << s.m() << '\n';
    for (std::size_t j = 1; j <= s.m(); ++j) {
        out << "@layer " << j;
        for (auto q : s.layer_states(j)) out << ' ' << s.state_name(q);
        out << '\n';
    }
    out << "@initial " << s.state_name(s.initial()) << "\n@final";
    for (auto q : s.finals()) out << ' ' << s.state_name(q);
    out << '\n';
    for (StateId q = 0; q < s.num_states(); ++q)
        for (SymbolId a = 0; a < s.alphabet().size(); ++a)
            if (auto r = s.delta(q, a); r != kBottom)
                out << s.state_name(q) << ' ' << s.alphabet().name(a) << ' ' << s.state_name(r) << '\n';
    for (auto q : s.layer_states(s.m())) {
        const auto g = s.gamma(q);
        out << "@gamma " << s.state_name(q) << ' ' << (g.target == kBottom ? std::string("_") : s.state_name(g.target)) << ' '
            << g.shift << '\n';
    }
}

inline std::string to_string(const Qds& s) {
    std::ostringstream out;
    write_qds(out, s);
    return out.str();
}

} // namespace klqds
