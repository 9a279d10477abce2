#pragma once

#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "klqds/nfa.hpp"
#include "klqds/path_dfa.hpp"
#include "klqds/qds.hpp"

namespace klqds {

namespace detail {

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

inline void dot_state(std::ostream& out, const std::string& id, const std::string& label, bool final) {
    out << "  " << id << " [label=" << dot_quote(label) << ", shape=" << (final ? "doublecircle" : "circle") << "];\n";
}

// One edge per (src,dst); labels comma-joined in insertion order.
class EdgeGroups {
  public:
    void add(std::size_t src, std::size_t dst, const std::string& label) {
        auto [it, fresh] = index_.emplace(std::make_pair(src, dst), groups_.size());
        if (fresh) groups_.push_back({src, dst, {}});
        auto& g = groups_[it->second];
        g.label += (g.label.empty() ? "" : ",") + label;
    }
    template <class F>
    void for_each(F&& f) const {
        for (const auto& g : groups_) f(g.src, g.dst, g.label);
    }

  private:
    struct Group {
        std::size_t src, dst;
        std::string label;
    };
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index_;
    std::vector<Group> groups_;
};

inline void dot_start_arrows(std::ostream& out, const std::vector<std::size_t>& initials) {
    for (auto q : initials) {
        out << "  __start" << q << " [shape=point];\n";
        out << "  __start" << q << " -> s" << q << ";\n";
    }
}

} // namespace detail

inline void write_dot(std::ostream& out, const Nfa& a) {
    out << "digraph nfa {\n  rankdir=LR;\n";
    for (StateId q = 0; q < a.num_states(); ++q) detail::dot_state(out, "s" + std::to_string(q), a.state_name(q), a.is_final(q));
    detail::dot_start_arrows(out, {a.initials().begin(), a.initials().end()});
    detail::EdgeGroups g;
    for (const auto& t : a.transitions()) g.add(t.src, t.dst, a.alphabet().name(t.symbol));
    g.for_each([&](std::size_t s, std::size_t d, const std::string& l) {
        out << "  s" << s << " -> s" << d << " [label=" << detail::dot_quote(l) << "];\n";
    });
    out << "}\n";
}

/// Layers become same-rank clusters; γ edges are dashed and carry the shift.
inline void write_dot(std::ostream& out, const Qds& s) {
    out << "digraph qds {\n  rankdir=LR;\n";
    for (std::size_t j = 1; j <= s.m(); ++j) {
        out << "  subgraph cluster_layer" << j << " {\n    label=\"layer " << j << "\";\n";
        for (auto q : s.layer_states(j)) {
            out << "  ";
            detail::dot_state(out, "s" + std::to_string(q), s.state_name(q), s.is_final(q));
        }
        out << "  }\n";
    }
    detail::dot_start_arrows(out, {s.initial()});
    detail::EdgeGroups g;
    for (StateId q = 0; q < s.num_states(); ++q)
        for (SymbolId a = 0; a < s.alphabet().size(); ++a)
            if (auto r = s.delta(q, a); r != kBottom) g.add(q, r, s.alphabet().name(a));
    g.for_each([&](std::size_t src, std::size_t d, const std::string& l) {
        out << "  s" << src << " -> s" << d << " [label=" << detail::dot_quote(l) << "];\n";
    });
    for (auto q : s.layer_states(s.m())) {
        const auto gm = s.gamma(q);
        if (gm.target == kBottom) continue;
        out << "  s" << q << " -> s" << gm.target << " [style=dashed, label=\"" << gm.shift << "\"];\n";
    }
    out << "}\n";
}

/// Shift edges are dashed and labelled `#l`.
inline void write_dot(std::ostream& out, const Qds& s, const PathDfa& d) {
    out << "digraph pathdfa {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < d.states.size(); ++i)
        detail::dot_state(out, "s" + std::to_string(i), path_dfa_state_name(s, d.states[i]), d.final[i]);
    detail::dot_start_arrows(out, {0});
    detail::EdgeGroups plain;
    for (const auto& e : d.transitions) {
        if (d.is_shift(e.symbol))
            out << "  s" << e.src << " -> s" << e.dst << " [style=dashed, label=\"#" << d.shift_of(e.symbol) << "\"];\n";
        else
            plain.add(e.src, e.dst, s.alphabet().name(e.symbol));
    }
    plain.for_each([&](std::size_t src, std::size_t dst, const std::string& l) {
        out << "  s" << src << " -> s" << dst << " [label=" << detail::dot_quote(l) << "];\n";
    });
    out << "}\n";
}

template <class... T>
std::string to_dot(const T&... x) {
    std::ostringstream out;
    write_dot(out, x...);
    return out.str();
}

} // namespace klqds
