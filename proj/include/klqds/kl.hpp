#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "klqds/error.hpp"
#include "klqds/nfa.hpp"

namespace klqds {

struct PairState {
    StateId first;
    StateId second;

    bool is_diagonal() const { return first == second; }
    auto operator<=>(const PairState&) const = default;
};

/// Accessible part of A × A from (i, i).
struct SquareAutomaton {
    std::vector<PairState> states;  // BFS order, states[0] = (i, i)
    std::map<PairState, std::size_t> index;
    struct Edge {
        std::size_t src;
        SymbolId symbol;
        std::size_t dst;
        auto operator<=>(const Edge&) const = default;
    };
    std::vector<Edge> transitions;

    std::string name(const Nfa& a, std::size_t s) const {
        return "(" + a.state_name(states[s].first) + "," + a.state_name(states[s].second) + ")";
    }
};

inline SquareAutomaton square_automaton(const Nfa& a) {
    require_single_initial(a);
    SquareAutomaton sq;
    const auto i = a.initials().front();
    auto intern = [&](PairState p) {
        auto [it, fresh] = sq.index.emplace(p, sq.states.size());
        if (fresh) sq.states.push_back(p);
        return it->second;
    };
    intern({i, i});
    for (std::size_t cur = 0; cur < sq.states.size(); ++cur) {
        const auto [p, q] = sq.states[cur];
        for (SymbolId s = 0; s < a.alphabet().size(); ++s)
            for (auto r1 : a.successors(p, s))
                for (auto r2 : a.successors(q, s)) sq.transitions.push_back({cur, s, intern({r1, r2})});
    }
    return sq;
}

struct KlPair {
    std::size_t k;
    std::size_t l;
    auto operator<=>(const KlPair&) const = default;
};

struct KlReport {
    bool exists = false;
    std::optional<KlPair> witness_pair;
    /// Non-diagonal cycle p0 -s0-> p1 -s1-> ... -> p0 (closing edge implied
    /// by the last symbol).
    std::vector<PairState> certificate;
    std::vector<SymbolId> certificate_symbols;
    /// Longest chain of non-diagonal pair states, when acyclic.
    std::size_t longest_chain = 0;
};

/// Acyclicity of the non-diagonal part of the accessible square automaton.
/// On success the witness is (H+1, H+1) with H the number of vertices on a
/// longest non-diagonal chain: two runs that disagree at every position
/// of a window would trace H+1 off-diagonal pairs.
inline KlReport exists_kl(const Nfa& a) {
    require_single_initial(a);
    require_accessible(a);
    const auto sq = square_automaton(a);
    const auto n = sq.states.size();
    std::vector<std::vector<std::pair<SymbolId, std::size_t>>> out(n);
    for (const auto& e : sq.transitions)
        if (!sq.states[e.src].is_diagonal() && !sq.states[e.dst].is_diagonal())
            out[e.src].emplace_back(e.symbol, e.dst);

    KlReport rep;
    // iterative DFS, colors 0 white / 1 grey / 2 black
    std::vector<int> color(n, 0);
    std::vector<std::size_t> depth(n, 0);  // longest chain starting here, in vertices
    std::vector<std::size_t> parent(n, 0);
    std::vector<SymbolId> parent_sym(n, 0);
    for (std::size_t root = 0; root < n; ++root) {
        if (color[root] != 0 || sq.states[root].is_diagonal()) continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [v, it] = stack.back();
            if (it < out[v].size()) {
                const auto [sym, w] = out[v][it++];
                if (color[w] == 1) {
                    // back edge v -> w closes a cycle w ... v
                    std::vector<PairState> cyc;
                    std::vector<SymbolId> syms;
                    for (auto x = v; x != w; x = parent[x]) {
                        cyc.push_back(sq.states[x]);
                        syms.push_back(parent_sym[x]);
                    }
                    cyc.push_back(sq.states[w]);
                    std::reverse(cyc.begin(), cyc.end());
                    std::reverse(syms.begin(), syms.end());
                    syms.push_back(sym);
                    rep.certificate = std::move(cyc);
                    rep.certificate_symbols = std::move(syms);
                    return rep;
                }
                if (color[w] == 0) {
                    color[w] = 1;
                    parent[w] = v;
                    parent_sym[w] = sym;
                    stack.emplace_back(w, 0);
                }
            } else {
                std::size_t best = 0;
                for (const auto& [s, w] : out[v]) best = std::max(best, depth[w]);
                depth[v] = best + 1;
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    rep.exists = true;
    for (std::size_t v = 0; v < n; ++v) rep.longest_chain = std::max(rep.longest_chain, depth[v]);
    rep.witness_pair = KlPair{rep.longest_chain + 1, rep.longest_chain + 1};
    return rep;
}

namespace detail {

inline void check_kl_args(const Nfa& a, std::size_t k, std::size_t l) {
    if (l < 1 || l > k) throw PreconditionError("need 1 <= l <= k (got k=" + std::to_string(k) + ", l=" + std::to_string(l) + ")");
    require_single_initial(a);
}

// live[i] = states of S_i = δ(q, w[1..i]) that can still read w[i+1..k]
inline std::vector<StateSet> live_sets(const Nfa& a, StateId q, const Word& w) {
    const auto k = w.size();
    std::vector<StateSet> fwd(k + 1);
    fwd[0] = StateSet::singleton(a.num_states(), q);
    for (std::size_t i = 0; i < k; ++i) fwd[i + 1] = a.step(fwd[i], w[i]);
    StateSet back = StateSet::full(a.num_states());
    std::vector<StateSet> live(k + 1);
    for (std::size_t i = k + 1; i-- > 0;) {
        live[i] = fwd[i] & back;
        if (i > 0) back = a.pre(back, w[i - 1]);
    }
    return live;
}

} // namespace detail

struct KlViolation {
    StateId state;
    Word word;
};

/// First (q, w) in state order, then lexicographic word order, for which no
/// i in [1..l] leaves at most one live successor.
inline std::optional<KlViolation> kl_violation(const Nfa& a, std::size_t k, std::size_t l) {
    detail::check_kl_args(a, k, l);
    const auto sigma = a.alphabet().size();
    const auto nq = a.num_states();
    Word w(k, 0);
    std::vector<StateSet> prefix(k + 1);

    std::function<bool(std::size_t)> dfs = [&](std::size_t d) -> bool {
        const auto& cur = prefix[d];
        if (d > 0) {
            if (cur.empty()) return false;
            if (d <= l && cur.size() <= 1) return false;
        }
        if (d == k) {
            StateSet back = StateSet::full(nq);
            bool ok = false;
            for (std::size_t i = k; i >= 1; --i) {
                if (i <= l && (prefix[i] & back).size() <= 1) {
                    ok = true;
                    break;
                }
                back = a.pre(back, w[i - 1]);
            }
            return !ok;
        }
        for (SymbolId s = 0; s < sigma; ++s) {
            w[d] = s;
            prefix[d + 1] = a.step(cur, s);
            if (dfs(d + 1)) return true;
        }
        return false;
    };

    for (StateId q = 0; q < nq; ++q) {
        prefix[0] = StateSet::singleton(nq, q);
        if (dfs(0)) return KlViolation{q, w};
    }
    return std::nullopt;
}

inline bool is_kl_unambiguous(const Nfa& a, std::size_t k, std::size_t l) { return !kl_violation(a, k, l); }

/// Checked through common futures of sibling targets: q1 != q2 in δ(q, a)
/// conflict iff both read a shared word of length k-1.
inline bool is_k_lookahead_deterministic(const Nfa& a, std::size_t k) {
    if (k < 1) throw PreconditionError("k must be at least 1");
    require_single_initial(a);
    const auto n = a.num_states();
    const auto sigma = a.alphabet().size();
    // common[p1 * n + p2]: p1 and p2 read a common word of the current length
    std::vector<char> common(n * n, 1);
    for (std::size_t t = 1; t < k; ++t) {
        std::vector<char> next(n * n, 0);
        for (StateId p1 = 0; p1 < n; ++p1)
            for (StateId p2 = p1; p2 < n; ++p2) {
                bool hit = false;
                for (SymbolId s = 0; s < sigma && !hit; ++s)
                    for (auto r1 : a.successors(p1, s)) {
                        for (auto r2 : a.successors(p2, s))
                            if (common[r1 * n + r2]) {
                                hit = true;
                                break;
                            }
                        if (hit) break;
                    }
                next[p1 * n + p2] = next[p2 * n + p1] = hit ? 1 : 0;
            }
        common = std::move(next);
    }
    for (StateId q = 0; q < n; ++q)
        for (SymbolId s = 0; s < sigma; ++s) {
            auto succ = a.successors(q, s);
            for (std::size_t x = 0; x < succ.size(); ++x)
                for (std::size_t y = x + 1; y < succ.size(); ++y)
                    if (common[succ[x] * n + succ[y]]) return false;
        }
    return true;
}

inline constexpr StateId kNoState = static_cast<StateId>(-1);

struct StepEntry {
    std::size_t index = 0;
    StateId successor = kNoState;  // kNoState stands for ⊥

    bool has_successor() const { return successor != kNoState; }
    auto operator<=>(const StepEntry&) const = default;
};

/// Largest j <= l whose live set has at most one element, and that element.
inline StepEntry step(const Nfa& a, std::size_t k, std::size_t l, StateId q, const Word& w) {
    detail::check_kl_args(a, k, l);
    if (w.size() != k) throw InputError("window word must have length " + std::to_string(k));
    a.alphabet().require_word(w);
    if (q >= a.num_states()) throw InputError("state index out of range");
    const auto live = detail::live_sets(a, q, w);
    for (std::size_t j = l; j >= 1; --j) {
        if (live[j].size() <= 1) return {j, live[j].first().value_or(kNoState)};
    }
    throw PreconditionError("no step index for state '" + a.state_name(q) + "' and word '" + a.alphabet().format(w) +
                            "': automaton is not (" + std::to_string(k) + "," + std::to_string(l) + ")-unambiguous");
}

struct StepTable {
    std::size_t k = 0;
    std::size_t l = 0;
    std::size_t num_words = 0;          // |Σ|^k
    std::vector<StepEntry> entries;     // row q * num_words + rank(w)

    const StepEntry& at(StateId q, std::size_t word_rank) const { return entries.at(q * num_words + word_rank); }
};

/// Rank of w among Σ^|w| in lexicographic order.
inline std::size_t word_rank(const Word& w, std::size_t sigma) {
    std::size_t r = 0;
    for (auto s : w) r = r * sigma + s;
    return r;
}

inline StepTable step_table(const Nfa& a, std::size_t k, std::size_t l) {
    detail::check_kl_args(a, k, l);
    StepTable t;
    t.k = k;
    t.l = l;
    t.num_words = 1;
    for (std::size_t i = 0; i < k; ++i) t.num_words *= a.alphabet().size();
    t.entries.reserve(a.num_states() * t.num_words);
    for (StateId q = 0; q < a.num_states(); ++q)
        for_each_word(a.alphabet().size(), k, [&](const Word& w) { t.entries.push_back(step(a, k, l, q, w)); });
    return t;
}

inline std::size_t default_kmax(const Nfa& a) {
    const auto n = a.num_states();
    return n * (n > 0 ? n - 1 : 0) + 1;
}

/// Smallest (k, l) in lexicographic order with k <= k_max. The square
/// automaton answers "none" early, but only for accessible automata.
inline std::optional<KlPair> find_minimal_kl(const Nfa& a, std::size_t k_max) {
    if (a.initials().size() == 1 && is_accessible(a) && !exists_kl(a).exists) return std::nullopt;
    for (std::size_t k = 1; k <= k_max; ++k)
        for (std::size_t l = 1; l <= k; ++l)
            if (is_kl_unambiguous(a, k, l)) return KlPair{k, l};
    return std::nullopt;
}

} // namespace klqds
