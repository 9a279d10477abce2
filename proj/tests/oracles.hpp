#pragma once
// Reference implementations used only by tests. Each one follows the
// textbook definition with plain containers and shares no algorithmic code
// with the library; only the data accessors of Nfa / Qds are used.

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "klqds/klqds.hpp"

namespace oracle {

using klqds::Nfa;
using klqds::Qds;
using klqds::StateId;
using klqds::SymbolId;
using klqds::Word;
using States = std::set<StateId>;

inline States nfa_step(const Nfa& a, const States& from, SymbolId s) {
    States out;
    for (const auto& t : a.transitions())
        if (t.symbol == s && from.count(t.src)) out.insert(t.dst);
    return out;
}

inline States nfa_reach(const Nfa& a, States from, const Word& w, std::size_t begin = 0, std::size_t end = SIZE_MAX) {
    end = std::min(end, w.size());
    for (auto i = begin; i < end; ++i) from = nfa_step(a, from, w[i]);
    return from;
}

inline bool nfa_accepts(const Nfa& a, const Word& w) {
    const States init(a.initials().begin(), a.initials().end());
    for (auto q : nfa_reach(a, init, w))
        if (a.is_final(q)) return true;
    return false;
}

/// Literal unambiguity condition for one (q, w).
inline bool kl_holds_at(const Nfa& a, std::size_t l, StateId q, const Word& w) {
    const auto k = w.size();
    for (std::size_t i = 1; i <= l; ++i) {
        std::size_t live = 0;
        for (auto p : nfa_reach(a, {q}, w, 0, i))
            if (!nfa_reach(a, {p}, w, i, k).empty()) ++live;
        if (live <= 1) return true;
    }
    return false;
}

/// Definition over all q and all w of length k. A branch is cut once the
/// reachable set at some depth <= l has at most one state: the condition
/// then holds for every extension.
inline bool kl_holds(const Nfa& a, std::size_t k, std::size_t l) {
    const auto sigma = a.alphabet().size();
    for (StateId q = 0; q < a.num_states(); ++q) {
        Word w;
        std::function<bool(const States&)> rec = [&](const States& cur) -> bool {
            if (!w.empty() && w.size() <= l && cur.size() <= 1) return true;
            if (w.size() == k) return kl_holds_at(a, l, q, w);
            for (SymbolId s = 0; s < sigma; ++s) {
                w.push_back(s);
                const bool ok = rec(nfa_step(a, cur, s));
                w.pop_back();
                if (!ok) return false;
            }
            return true;
        };
        if (!rec({q})) return false;
    }
    return true;
}

/// Words of length n readable from p.
inline std::set<Word> futures(const Nfa& a, StateId p, std::size_t n) {
    std::set<Word> out;
    klqds::for_each_word(a.alphabet().size(), n, [&](const Word& v) {
        if (!nfa_reach(a, {p}, v).empty()) out.insert(v);
    });
    return out;
}

/// Pairwise disjointness of a·F_{k-1}(q') over distinct targets q'.
inline bool lookahead_holds(const Nfa& a, std::size_t k) {
    for (StateId q = 0; q < a.num_states(); ++q) {
        std::vector<std::pair<SymbolId, StateId>> outs;
        for (const auto& t : a.transitions())
            if (t.src == q) outs.emplace_back(t.symbol, t.dst);
        for (std::size_t i = 0; i < outs.size(); ++i)
            for (std::size_t j = i + 1; j < outs.size(); ++j) {
                if (outs[i].second == outs[j].second || outs[i].first != outs[j].first) continue;
                const auto f1 = futures(a, outs[i].second, k - 1);
                const auto f2 = futures(a, outs[j].second, k - 1);
                for (const auto& v : f1)
                    if (f2.count(v)) return false;
            }
    }
    return true;
}

/// Smallest k <= k_max with (k,k) holding; (k,l) implies (k,k), so this
/// decides existence of any pair with k <= k_max.
inline std::optional<std::size_t> exists_by_search(const Nfa& a, std::size_t k_max) {
    for (std::size_t k = 1; k <= k_max; ++k)
        if (kl_holds(a, k, k)) return k;
    return std::nullopt;
}

/// Lexicographically smallest (k, l) by brute force.
inline std::optional<std::pair<std::size_t, std::size_t>> minimal_pair(const Nfa& a, std::size_t k_max) {
    for (std::size_t k = 1; k <= k_max; ++k)
        for (std::size_t l = 1; l <= k; ++l)
            if (kl_holds(a, k, l)) return std::make_pair(k, l);
    return std::nullopt;
}

/// Extended transition function by its recursive definition.
inline StateId qds_delta_word(const Qds& s, StateId q, Word w) {
    const auto m = s.m();
    while (true) {
        if (w.size() <= m - 1) {
            for (auto a : w) {
                if (q == klqds::kBottom) return q;
                q = s.delta(q, a);
            }
            return q;
        }
        StateId r = q;
        for (std::size_t i = 0; i < m - 1 && r != klqds::kBottom; ++i) r = s.delta(r, w[i]);
        if (r == klqds::kBottom) return r;
        const auto g = s.gamma(r);
        if (g.target == klqds::kBottom) return klqds::kBottom;
        q = g.target;
        w.erase(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(g.shift, w.size())));
    }
}

inline bool qds_accepts(const Qds& s, const Word& w) {
    const auto q = qds_delta_word(s, s.initial(), w);
    return q != klqds::kBottom && s.is_final(q);
}

inline bool lk_member(const Word& w, std::size_t k) { return w.size() > k && w[w.size() - 1 - k] == 0; }

/// Components touched by the run on an accepted word.
struct Components {
    std::set<StateId> states;
    std::set<std::pair<StateId, SymbolId>> delta;
    std::set<StateId> gamma;
    std::set<StateId> finals;
};

inline void add_run(const Qds& s, const Word& w, Components& c) {
    if (!qds_accepts(s, w)) return;
    const auto m = s.m();
    StateId q = s.initial();
    std::size_t pos = 0;
    c.states.insert(q);
    auto walk = [&](StateId from, std::size_t b, std::size_t e) {
        for (auto i = b; i < e; ++i) {
            c.delta.insert({from, w[i]});
            from = s.delta(from, w[i]);
            c.states.insert(from);
        }
        return from;
    };
    while (w.size() - pos > m - 1) {
        const auto r = walk(q, pos, pos + m - 1);
        c.gamma.insert(r);
        q = s.gamma(r).target;
        c.states.insert(q);
        pos += s.gamma(r).shift;
    }
    c.finals.insert(walk(q, pos, w.size()));
}

/// Random structure with every shift in [1, m-1] and partial δ / γ.
inline Qds random_qds(std::uint64_t seed, std::size_t m, std::size_t sigma, std::size_t max_per_layer, double density,
                      double final_prob, double bottom_prob) {
    std::mt19937_64 rng(seed);
    auto unit = [&] { return klqds::detail::unit_draw(rng); };
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(unit() * static_cast<double>(n)); };
    std::vector<std::string> symbols;
    for (std::size_t i = 0; i < sigma; ++i) symbols.push_back(std::string(1, static_cast<char>('a' + i)));
    klqds::QdsBuilder b(klqds::Alphabet(symbols), m);
    std::vector<std::vector<std::string>> layers(m + 1);
    int next = 1;
    for (std::size_t j = 1; j <= m; ++j) {
        const auto n = 1 + pick(max_per_layer);
        for (std::size_t i = 0; i < n; ++i) {
            layers[j].push_back(std::to_string(next++));
            b.add_state(layers[j].back(), j);
            if (unit() < final_prob) b.add_final(layers[j].back());
        }
    }
    b.set_initial(layers[1].front());
    for (std::size_t j = 1; j < m; ++j)
        for (const auto& q : layers[j])
            for (std::size_t a = 0; a < sigma; ++a)
                if (unit() < density) b.add_delta(q, static_cast<SymbolId>(a), layers[j + 1][pick(layers[j + 1].size())]);
    for (const auto& q : layers[m]) {
        std::optional<std::string> target;
        if (unit() >= bottom_prob) target = layers[1][pick(layers[1].size())];
        b.set_gamma(q, target, static_cast<std::uint32_t>(1 + pick(m - 1)));
    }
    return b.build();
}

/// Random partial DFA over states "0".."n-1".
inline Nfa random_dfa(std::uint64_t seed, std::size_t n, std::size_t sigma, double density, double final_prob) {
    std::mt19937_64 rng(seed);
    auto unit = [&] { return klqds::detail::unit_draw(rng); };
    std::vector<std::string> symbols;
    for (std::size_t i = 0; i < sigma; ++i) symbols.push_back(std::string(1, static_cast<char>('a' + i)));
    klqds::NfaBuilder b{klqds::Alphabet(symbols)};
    for (std::size_t q = 0; q < n; ++q) b.add_state(std::to_string(q));
    b.add_initial(0);
    for (std::size_t q = 0; q < n; ++q) {
        if (unit() < final_prob) b.add_final(static_cast<StateId>(q));
        for (std::size_t a = 0; a < sigma; ++a)
            if (unit() < density)
                b.add_transition(static_cast<StateId>(q), static_cast<SymbolId>(a),
                                 static_cast<StateId>(static_cast<std::size_t>(unit() * static_cast<double>(n))));
    }
    return b.build();
}

inline std::string data_path(const std::string& name) { return std::string(KLQDS_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& name) {
    std::ifstream f(data_path(name));
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

inline Nfa load_nfa(const std::string& name) { return klqds::parse_nfa(read_file(name)); }
inline Qds load_qds(const std::string& name) { return klqds::parse_qds(read_file(name)); }

} // namespace oracle
