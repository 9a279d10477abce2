#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "klqds/error.hpp"
#include "klqds/nfa.hpp"

namespace klqds {

/// An Nfa known to be deterministic (one initial state, at most one
/// successor per state and symbol). Partial by default.
class Dfa {
public:
    Dfa() = default;

    explicit Dfa(Nfa a) : nfa_(std::move(a)) {
        if (!is_deterministic(nfa_)) throw PreconditionError("automaton is not deterministic");
    }

    const Nfa& nfa() const { return nfa_; }
    const Alphabet& alphabet() const { return nfa_.alphabet(); }
    std::size_t num_states() const { return nfa_.num_states(); }
    StateId initial() const { return nfa_.initials().front(); }
    bool is_final(StateId q) const { return nfa_.is_final(q); }
    const std::string& state_name(StateId q) const { return nfa_.state_name(q); }

    std::optional<StateId> next(StateId q, SymbolId a) const {
        auto s = nfa_.successors(q, a);
        if (s.empty()) return std::nullopt;
        return s.front();
    }

    std::optional<StateId> run(const Word& w) const {
        nfa_.alphabet().require_word(w);
        std::optional<StateId> q = initial();
        for (auto a : w) {
            q = next(*q, a);
            if (!q) return std::nullopt;
        }
        return q;
    }

    bool accepts(const Word& w) const {
        auto q = run(w);
        return q && is_final(*q);
    }

    bool is_complete() const {
        for (StateId q = 0; q < num_states(); ++q)
            for (SymbolId a = 0; a < alphabet().size(); ++a)
                if (!next(q, a)) return false;
        return true;
    }

    /// State count of the completed automaton: one extra sink when partial.
    std::size_t complete_size() const { return num_states() + (is_complete() ? 0 : 1); }

    bool operator==(const Dfa& o) const { return nfa_ == o.nfa_; }

private:
    Nfa nfa_;
};

inline std::string subset_name(const Nfa& a, const StateSet& s) {
    std::string out = "{";
    bool first = true;
    s.for_each([&](StateId q) {
        if (!first) out += ',';
        out += a.state_name(q);
        first = false;
    });
    return out + "}";
}

/// Accessible part of the subset construction. The empty subset is left
/// out, so the result is partial wherever the input blocks.
inline Dfa determinize(const Nfa& a) {
    const auto sigma = a.alphabet().size();
    std::unordered_map<StateSet, StateId> id;
    std::vector<StateSet> subsets;
    std::vector<Transition> ts;
    auto intern = [&](const StateSet& s) {
        auto [it, fresh] = id.emplace(s, static_cast<StateId>(subsets.size()));
        if (fresh) subsets.push_back(s);
        return it->second;
    };
    const auto start = a.initial_set();
    if (start.empty()) {
        // no initial state: the empty language, one non-final state
        return Dfa(Nfa(a.alphabet(), {"{}"}, {0}, {}, {}));
    }
    intern(start);
    for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
        for (SymbolId s = 0; s < sigma; ++s) {
            auto nxt = a.step(subsets[cur], s);
            if (nxt.empty()) continue;
            const auto dst = intern(nxt);
            ts.push_back({static_cast<StateId>(cur), s, dst});
        }
    }
    std::vector<std::string> names;
    std::vector<StateId> finals;
    const auto f = a.final_set();
    for (std::size_t q = 0; q < subsets.size(); ++q) {
        names.push_back(subset_name(a, subsets[q]));
        if (subsets[q].intersects(f)) finals.push_back(static_cast<StateId>(q));
    }
    return Dfa(Nfa(a.alphabet(), std::move(names), {0}, std::move(finals), std::move(ts)));
}

/// Hopcroft minimization on the completed automaton. The sink class and
/// every other dead class are dropped afterwards (except the initial one),
/// so the result is the minimal DFA minus its sink. States are renamed
/// "0", "1", ... in breadth-first order from the initial state.
inline Dfa minimize_dfa(const Dfa& d) {
    const auto sigma = d.alphabet().size();
    const auto n = d.num_states() + 1;  // + sink
    const auto sink = static_cast<StateId>(n - 1);
    std::vector<StateId> delta(n * sigma, sink);
    for (StateId q = 0; q + 1 < n; ++q)
        for (SymbolId a = 0; a < sigma; ++a)
            if (auto r = d.next(q, a)) delta[q * sigma + a] = *r;

    // inverse transitions
    std::vector<std::vector<StateId>> inv(n * sigma);
    for (StateId q = 0; q < n; ++q)
        for (SymbolId a = 0; a < sigma; ++a) inv[delta[q * sigma + a] * sigma + a].push_back(q);

    std::vector<std::vector<StateId>> blocks;
    std::vector<std::size_t> block_of(n);
    {
        std::vector<StateId> fin, non;
        for (StateId q = 0; q < n; ++q) (q != sink && d.is_final(q) ? fin : non).push_back(q);
        for (auto* b : {&fin, &non})
            if (!b->empty()) {
                for (auto q : *b) block_of[q] = blocks.size();
                blocks.push_back(std::move(*b));
            }
    }
    std::deque<std::pair<std::size_t, SymbolId>> work;
    std::vector<std::vector<bool>> in_work;
    auto push = [&](std::size_t b, SymbolId a) {
        if (in_work.size() <= b) in_work.resize(b + 1, std::vector<bool>(sigma, false));
        if (!in_work[b][a]) {
            in_work[b][a] = true;
            work.emplace_back(b, a);
        }
    };
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (SymbolId a = 0; a < sigma; ++a) push(b, a);

    std::vector<std::size_t> marks(n, 0);
    std::vector<char> marked(n, 0);
    while (!work.empty()) {
        auto [splitter, a] = work.front();
        work.pop_front();
        in_work[splitter][a] = false;
        std::vector<StateId> pre;
        for (auto r : blocks[splitter])
            for (auto q : inv[r * sigma + a]) pre.push_back(q);
        std::vector<std::size_t> touched;
        for (auto q : pre) {
            if (marked[q]) continue;
            marked[q] = 1;
            const auto b = block_of[q];
            if (marks[b]++ == 0) touched.push_back(b);
        }
        for (auto b : touched) {
            if (marks[b] < blocks[b].size()) {
                std::vector<StateId> in, out;
                for (auto q : blocks[b]) (marked[q] ? in : out).push_back(q);
                const auto nb = blocks.size();
                blocks[b] = std::move(out);
                blocks.push_back(std::move(in));
                for (auto q : blocks[nb]) block_of[q] = nb;
                for (SymbolId c = 0; c < sigma; ++c) {
                    if (in_work.size() > b && in_work[b][c]) {
                        push(nb, c);
                    } else {
                        push(blocks[nb].size() <= blocks[b].size() ? nb : b, c);
                    }
                }
            }
            marks[b] = 0;
        }
        for (auto q : pre) marked[q] = 0;
    }

    // dead blocks: no path to a final block
    const auto nb = blocks.size();
    std::vector<bool> live(nb, false);
    std::vector<std::vector<std::size_t>> rev(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const auto q = blocks[b].front();
        for (SymbolId a = 0; a < sigma; ++a) rev[block_of[delta[q * sigma + a]]].push_back(b);
    }
    std::deque<std::size_t> todo;
    for (std::size_t b = 0; b < nb; ++b) {
        const auto q = blocks[b].front();
        if (q != sink && d.is_final(q)) {
            live[b] = true;
            todo.push_back(b);
        }
    }
    while (!todo.empty()) {
        auto b = todo.front();
        todo.pop_front();
        for (auto p : rev[b])
            if (!live[p]) {
                live[p] = true;
                todo.push_back(p);
            }
    }
    const auto init_block = block_of[d.initial()];
    live[init_block] = true;

    // BFS renumbering
    std::vector<StateId> order(nb, static_cast<StateId>(-1));
    std::vector<std::size_t> seq{init_block};
    order[init_block] = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto q = blocks[seq[i]].front();
        for (SymbolId a = 0; a < sigma; ++a) {
            const auto t = block_of[delta[q * sigma + a]];
            if (!live[t] || order[t] != static_cast<StateId>(-1)) continue;
            order[t] = static_cast<StateId>(seq.size());
            seq.push_back(t);
        }
    }
    std::vector<std::string> names;
    std::vector<StateId> finals;
    std::vector<Transition> ts;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        names.push_back(std::to_string(i));
        const auto q = blocks[seq[i]].front();
        if (q != sink && d.is_final(q)) finals.push_back(static_cast<StateId>(i));
        for (SymbolId a = 0; a < sigma; ++a) {
            const auto t = block_of[delta[q * sigma + a]];
            if (live[t] && order[t] != static_cast<StateId>(-1))
                ts.push_back({static_cast<StateId>(i), a, order[t]});
        }
    }
    return Dfa(Nfa(d.alphabet(), std::move(names), {0}, std::move(finals), std::move(ts)));
}

} // namespace klqds
