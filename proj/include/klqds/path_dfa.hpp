#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "klqds/nfa.hpp"
#include "klqds/qds.hpp"

namespace klqds {

/// (p, u, v): u is what was read since the last shift, v the overlap still
/// owed by the last shift.
struct PathDfaState {
    StateId base = kBottom;
    Word u;
    Word v;

    auto operator<=>(const PathDfaState&) const = default;
};

namespace detail {

inline bool is_prefix(const Word& p, const Word& w) {
    return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

inline bool is_proper_prefix(const Word& p, const Word& w) { return p.size() < w.size() && is_prefix(p, w); }

inline Word drop_front(const Word& w, std::size_t l) {
    if (l >= w.size()) return {};
    return Word(w.begin() + static_cast<std::ptrdiff_t>(l), w.end());
}

} // namespace detail

/// Accessible part of the path-DFA. The extended alphabet numbers Σ first
/// (0..|Σ|-1), then shift l as |Σ| + l - 1.
struct PathDfa {
    std::size_t sigma = 0;
    std::size_t m = 0;
    std::vector<PathDfaState> states;  // states[0] = (i, ε, ε)
    std::vector<bool> final;
    struct Edge {
        std::size_t src;
        std::uint32_t symbol;
        std::size_t dst;
        auto operator<=>(const Edge&) const = default;
    };
    std::vector<Edge> transitions;

    bool is_shift(std::uint32_t x) const { return x >= sigma; }
    std::uint32_t shift_of(std::uint32_t x) const { return x - static_cast<std::uint32_t>(sigma) + 1; }
    std::uint32_t shift_symbol(std::uint32_t l) const { return static_cast<std::uint32_t>(sigma) + l - 1; }
};

inline PathDfa build_path_dfa(const Qds& s) {
    PathDfa d;
    d.sigma = s.alphabet().size();
    d.m = s.m();
    std::map<PathDfaState, std::size_t> index;
    auto intern = [&](PathDfaState st) {
        auto [it, fresh] = index.emplace(st, d.states.size());
        if (fresh) d.states.push_back(std::move(st));
        return it->second;
    };
    intern({s.initial(), {}, {}});
    for (std::size_t cur = 0; cur < d.states.size(); ++cur) {
        const auto st = d.states[cur];  // copy: d.states may grow
        if (!s.is_top(st.base)) {
            for (SymbolId a = 0; a < d.sigma; ++a) {
                const auto r = s.delta(st.base, a);
                if (r == kBottom) continue;
                Word ua = st.u;
                ua.push_back(a);
                if (!(detail::is_prefix(ua, st.v) || detail::is_prefix(st.v, st.u))) continue;
                d.transitions.push_back({cur, a, intern({r, std::move(ua), st.v})});
            }
        } else {
            const auto g = s.gamma(st.base);
            if (g.target == kBottom) continue;
            d.transitions.push_back({cur, d.shift_symbol(g.shift), intern({g.target, {}, detail::drop_front(st.u, g.shift)})});
        }
    }
    d.final.resize(d.states.size());
    for (std::size_t i = 0; i < d.states.size(); ++i)
        d.final[i] = s.is_final(d.states[i].base) && detail::is_proper_prefix(d.states[i].v, d.states[i].u);
    return d;
}

inline std::string path_dfa_state_name(const Qds& s, const PathDfaState& st) {
    return "(" + s.state_name(st.base) + "," + word_token(s.alphabet(), st.u) + "," + word_token(s.alphabet(), st.v) + ")";
}

/// The path-DFA as an automaton over Σ ∪ {#1..#m}.
inline Nfa path_dfa_automaton(const Qds& s, const PathDfa& d) {
    std::vector<std::string> symbols = s.alphabet().symbols();
    for (std::size_t l = 1; l <= d.m; ++l) symbols.push_back("#" + std::to_string(l));
    std::vector<std::string> names;
    std::vector<StateId> finals;
    for (std::size_t i = 0; i < d.states.size(); ++i) {
        names.push_back(path_dfa_state_name(s, d.states[i]));
        if (d.final[i]) finals.push_back(static_cast<StateId>(i));
    }
    std::vector<Transition> ts;
    for (const auto& e : d.transitions) ts.push_back({static_cast<StateId>(e.src), e.symbol, static_cast<StateId>(e.dst)});
    return Nfa(Alphabet(std::move(symbols)), std::move(names), {0}, std::move(finals), std::move(ts));
}

struct UsefulReport {
    StateSet useful_states;
    std::vector<std::vector<bool>> useful_delta;  // [q][a]
    std::vector<bool> useful_gamma;               // [q], top layer only
    StateSet useful_finalities;
};

/// Path-DFA states that are accessible (all of them) and coaccessible.
inline std::vector<bool> useful_path_states(const PathDfa& d) {
    const auto n = d.states.size();
    std::vector<std::vector<std::size_t>> rev(n);
    for (const auto& e : d.transitions) rev[e.dst].push_back(e.src);
    std::vector<bool> co(n, false);
    std::deque<std::size_t> todo;
    for (std::size_t i = 0; i < n; ++i)
        if (d.final[i]) {
            co[i] = true;
            todo.push_back(i);
        }
    while (!todo.empty()) {
        const auto x = todo.front();
        todo.pop_front();
        for (auto p : rev[x])
            if (!co[p]) {
                co[p] = true;
                todo.push_back(p);
            }
    }
    return co;
}

/// Lifts path-DFA usefulness to states, edges and finalities. The initial
/// state is always kept; its finality is kept iff it is final, since the
/// empty path is successful on its own and the path-DFA never marks
/// (i, ε, ε) final.
inline UsefulReport compute_useful(const Qds& s) {
    const auto d = build_path_dfa(s);
    const auto useful = useful_path_states(d);
    UsefulReport r;
    r.useful_states = StateSet(s.num_states());
    r.useful_finalities = StateSet(s.num_states());
    r.useful_delta.assign(s.num_states(), std::vector<bool>(s.alphabet().size(), false));
    r.useful_gamma.assign(s.num_states(), false);
    r.useful_states.insert(s.initial());
    if (s.is_final(s.initial())) r.useful_finalities.insert(s.initial());
    for (std::size_t i = 0; i < d.states.size(); ++i) {
        if (!useful[i]) continue;
        r.useful_states.insert(d.states[i].base);
        if (d.final[i]) r.useful_finalities.insert(d.states[i].base);
    }
    for (const auto& e : d.transitions) {
        if (!useful[e.src] || !useful[e.dst]) continue;
        const auto p = d.states[e.src].base;
        if (d.is_shift(e.symbol))
            r.useful_gamma[p] = true;
        else
            r.useful_delta[p][e.symbol] = true;
    }
    return r;
}

/// Keeps useful states, edges and finalities. A kept top-layer state whose
/// γ edge is useless gets γ = (⊥, same shift).
inline Qds trim_qds(const Qds& s) {
    const auto r = compute_useful(s);
    std::vector<bool> fin(s.num_states());
    for (StateId q = 0; q < s.num_states(); ++q) fin[q] = r.useful_finalities.contains(q);
    return restrict_qds(
        s, r.useful_states, fin, [&](StateId q, SymbolId a) { return r.useful_delta[q][a]; },
        [&](StateId q) {
            auto g = s.gamma(q);
            if (!r.useful_gamma[q]) g.target = kBottom;
            return g;
        });
}

/// Some successful path of S visiting p, read off the path-DFA.
inline std::optional<QdsPath> successful_path_through(const Qds& s, StateId p) {
    const auto d = build_path_dfa(s);
    const auto useful = useful_path_states(d);
    const auto n = d.states.size();
    if (p == s.initial() && s.is_final(p)) return QdsPath{p, {}};

    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t e = 0; e < d.transitions.size(); ++e) out[d.transitions[e].src].push_back(e);

    // BFS over path-DFA edges; returns edge indices from `from` to a state satisfying goal
    auto bfs = [&](std::size_t from, auto goal) -> std::optional<std::vector<std::size_t>> {
        std::vector<std::optional<std::size_t>> via(n);
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> todo{from};
        seen[from] = true;
        while (!todo.empty()) {
            const auto x = todo.front();
            todo.pop_front();
            if (goal(x)) {
                std::vector<std::size_t> path;
                for (auto y = x; y != from; y = d.transitions[*via[y]].src) path.push_back(*via[y]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            for (auto e : out[x]) {
                const auto y = d.transitions[e].dst;
                if (!seen[y] && useful[y]) {
                    seen[y] = true;
                    via[y] = e;
                    todo.push_back(y);
                }
            }
        }
        return std::nullopt;
    };

    if (!useful[0]) return std::nullopt;
    auto head = bfs(0, [&](std::size_t x) { return d.states[x].base == p; });
    if (!head) return std::nullopt;
    const auto mid = head->empty() ? std::size_t{0} : d.transitions[head->back()].dst;
    auto tail = bfs(mid, [&](std::size_t x) { return static_cast<bool>(d.final[x]); });
    if (!tail) return std::nullopt;

    QdsPath path{s.initial(), {}};
    for (auto* part : {&*head, &*tail})
        for (auto e : *part) {
            const auto& t = d.transitions[e];
            const auto lbl = d.is_shift(t.symbol) ? EdgeLabel::shift_by(d.shift_of(t.symbol)) : EdgeLabel::symbol(t.symbol);
            path.edges.push_back({d.states[t.src].base, lbl, d.states[t.dst].base});
        }
    return path;
}

} // namespace klqds
