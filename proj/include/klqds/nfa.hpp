#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "klqds/alphabet.hpp"
#include "klqds/error.hpp"
#include "klqds/state_set.hpp"

namespace klqds {

struct Transition {
    StateId src;
    SymbolId symbol;
    StateId dst;

    auto operator<=>(const Transition&) const = default;
};

/// Nondeterministic finite automaton (Σ, Q, I, F, δ) with opaque string
/// state names. Immutable once built; partial transition relations are the
/// norm.
class Nfa {
public:
    Nfa() = default;

    Nfa(Alphabet alphabet, std::vector<std::string> states, std::vector<StateId> initials,
        std::vector<StateId> finals, std::vector<Transition> transitions)
        : alphabet_(std::move(alphabet)), names_(std::move(states)), initials_(std::move(initials)),
          finals_(std::move(finals)), transitions_(std::move(transitions)) {
        const auto n = names_.size();
        for (std::size_t q = 0; q < n; ++q) {
            const auto& s = names_[q];
            if (s.empty() || detail::has_space(s)) throw InputError("invalid state name '" + s + "'");
            if (!index_.emplace(s, static_cast<StateId>(q)).second) throw InputError("duplicate state '" + s + "'");
        }
        auto normalize = [n](std::vector<StateId>& v, const char* what) {
            for (auto q : v)
                if (q >= n) throw InputError(std::string(what) + " state index out of range");
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        normalize(initials_, "initial");
        normalize(finals_, "final");
        for (const auto& t : transitions_) {
            if (t.src >= n || t.dst >= n) throw InputError("transition endpoint out of range");
            if (t.symbol >= alphabet_.size()) throw InputError("transition symbol out of range");
        }
        std::sort(transitions_.begin(), transitions_.end());
        transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());

        succ_.assign(n * alphabet_.size(), {});
        for (const auto& t : transitions_) succ_[t.src * alphabet_.size() + t.symbol].push_back(t.dst);
        is_final_.assign(n, false);
        for (auto f : finals_) is_final_[f] = true;
    }

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t num_states() const { return names_.size(); }
    const std::vector<std::string>& state_names() const { return names_; }
    const std::string& state_name(StateId q) const { return names_.at(q); }

    std::optional<StateId> find_state(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    StateId state_id(std::string_view name) const {
        if (auto q = find_state(name)) return *q;
        throw InputError("unknown state '" + std::string(name) + "'");
    }

    const std::vector<StateId>& initials() const { return initials_; }
    const std::vector<StateId>& finals() const { return finals_; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    bool is_final(StateId q) const { return is_final_.at(q); }
    bool is_initial(StateId q) const { return std::binary_search(initials_.begin(), initials_.end(), q); }

    StateSet empty_set() const { return StateSet(num_states()); }
    StateSet set_of(std::span<const StateId> qs) const {
        StateSet s(num_states());
        for (auto q : qs) s.insert(q);
        return s;
    }
    StateSet initial_set() const { return set_of(initials_); }
    StateSet final_set() const { return set_of(finals_); }

    std::span<const StateId> successors(StateId q, SymbolId a) const {
        return succ_[q * alphabet_.size() + a];
    }

    /// δ(P, a)
    StateSet step(const StateSet& from, SymbolId a) const {
        StateSet out(num_states());
        from.for_each([&](StateId q) {
            for (auto r : successors(q, a)) out.insert(r);
        });
        return out;
    }

    /// {q | δ(q, a) ∩ target ≠ ∅}
    StateSet pre(const StateSet& target, SymbolId a) const {
        StateSet out(num_states());
        for (StateId q = 0; q < num_states(); ++q)
            for (auto r : successors(q, a))
                if (target.contains(r)) {
                    out.insert(q);
                    break;
                }
        return out;
    }

    bool operator==(const Nfa& o) const {
        return alphabet_ == o.alphabet_ && names_ == o.names_ && initials_ == o.initials_ &&
               finals_ == o.finals_ && transitions_ == o.transitions_;
    }

private:
    Alphabet alphabet_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, StateId> index_;
    std::vector<StateId> initials_;
    std::vector<StateId> finals_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<StateId>> succ_;
    std::vector<bool> is_final_;
};

/// Name-based incremental construction of an Nfa.
class NfaBuilder {
public:
    explicit NfaBuilder(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

    StateId add_state(std::string name) {
        if (index_.count(name) != 0) throw InputError("duplicate state '" + name + "'");
        const auto id = static_cast<StateId>(names_.size());
        index_.emplace(name, id);
        names_.push_back(std::move(name));
        return id;
    }

    /// Returns the existing id or declares the state.
    StateId state(std::string_view name) {
        auto it = index_.find(std::string(name));
        if (it != index_.end()) return it->second;
        return add_state(std::string(name));
    }

    StateId existing(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) throw InputError("undeclared state '" + std::string(name) + "'");
        return it->second;
    }

    void add_initial(StateId q) { initials_.push_back(q); }
    void add_final(StateId q) { finals_.push_back(q); }
    void add_transition(StateId src, SymbolId a, StateId dst) { transitions_.push_back({src, a, dst}); }
    void add_transition(std::string_view src, std::string_view a, std::string_view dst) {
        add_transition(existing(src), alphabet_.id(a), existing(dst));
    }

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t num_states() const { return names_.size(); }

    Nfa build() const { return Nfa(alphabet_, names_, initials_, finals_, transitions_); }

private:
    Alphabet alphabet_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, StateId> index_;
    std::vector<StateId> initials_;
    std::vector<StateId> finals_;
    std::vector<Transition> transitions_;
};

/// Extended transition function δ(P, w); δ(P, ε) = P.
inline StateSet delta_word(const Nfa& a, const StateSet& from, const Word& w) {
    a.alphabet().require_word(w);
    if (from.universe() != a.num_states()) throw InputError("state set does not belong to this automaton");
    StateSet cur = from;
    for (auto s : w) cur = a.step(cur, s);
    return cur;
}

inline bool nfa_membership(const Nfa& a, const Word& w) {
    return delta_word(a, a.initial_set(), w).intersects(a.final_set());
}

inline StateSet accessible_states(const Nfa& a) {
    StateSet seen = a.initial_set();
    std::deque<StateId> todo(a.initials().begin(), a.initials().end());
    while (!todo.empty()) {
        const auto q = todo.front();
        todo.pop_front();
        for (SymbolId s = 0; s < a.alphabet().size(); ++s)
            for (auto r : a.successors(q, s))
                if (!seen.contains(r)) {
                    seen.insert(r);
                    todo.push_back(r);
                }
    }
    return seen;
}

inline StateSet coaccessible_states(const Nfa& a) {
    const auto n = a.num_states();
    std::vector<std::vector<StateId>> rev(n);
    for (const auto& t : a.transitions()) rev[t.dst].push_back(t.src);
    StateSet seen = a.final_set();
    std::deque<StateId> todo(a.finals().begin(), a.finals().end());
    while (!todo.empty()) {
        const auto q = todo.front();
        todo.pop_front();
        for (auto p : rev[q])
            if (!seen.contains(p)) {
                seen.insert(p);
                todo.push_back(p);
            }
    }
    return seen;
}

/// Sub-automaton on the kept states, preserving their relative order.
inline Nfa restrict_to(const Nfa& a, const StateSet& keep) {
    std::vector<StateId> remap(a.num_states(), static_cast<StateId>(-1));
    std::vector<std::string> names;
    for (StateId q = 0; q < a.num_states(); ++q)
        if (keep.contains(q)) {
            remap[q] = static_cast<StateId>(names.size());
            names.push_back(a.state_name(q));
        }
    auto map_all = [&](const std::vector<StateId>& v) {
        std::vector<StateId> out;
        for (auto q : v)
            if (keep.contains(q)) out.push_back(remap[q]);
        return out;
    };
    std::vector<Transition> ts;
    for (const auto& t : a.transitions())
        if (keep.contains(t.src) && keep.contains(t.dst)) ts.push_back({remap[t.src], t.symbol, remap[t.dst]});
    return Nfa(a.alphabet(), std::move(names), map_all(a.initials()), map_all(a.finals()), std::move(ts));
}

inline Nfa accessible_part(const Nfa& a) { return restrict_to(a, accessible_states(a)); }

/// Keeps the accessible and coaccessible states. The result may be empty.
inline Nfa trim_nfa(const Nfa& a) { return restrict_to(a, accessible_states(a) & coaccessible_states(a)); }

inline bool is_accessible(const Nfa& a) { return accessible_states(a).size() == a.num_states(); }

inline bool is_deterministic(const Nfa& a) {
    if (a.initials().size() != 1) return false;
    for (StateId q = 0; q < a.num_states(); ++q)
        for (SymbolId s = 0; s < a.alphabet().size(); ++s)
            if (a.successors(q, s).size() > 1) return false;
    return true;
}

inline void require_single_initial(const Nfa& a) {
    if (a.initials().size() != 1)
        throw PreconditionError("automaton must have exactly one initial state (has " +
                                std::to_string(a.initials().size()) + ")");
}

inline void require_accessible(const Nfa& a) {
    if (!is_accessible(a)) throw PreconditionError("automaton has inaccessible states; restrict it to its accessible part first");
}

namespace detail {

// Platform-independent uniform draw in [0, 1).
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::string symbol_name(std::size_t i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "s" + std::to_string(i);
}

} // namespace detail

/// Seeded random automaton over states "0".."n-1" and symbols a, b, c, ...
/// with initial state "0". Each of the n²·|Σ| possible transitions is drawn
/// independently with probability `density`.
inline Nfa random_nfa(std::uint64_t seed, std::size_t n, std::size_t alphabet_size, double density,
                      double final_prob) {
    if (n == 0) throw InputError("random_nfa needs at least one state");
    if (alphabet_size == 0) throw InputError("random_nfa needs a non-empty alphabet");
    std::mt19937_64 rng(seed);
    std::vector<std::string> symbols;
    for (std::size_t i = 0; i < alphabet_size; ++i) symbols.push_back(detail::symbol_name(i));
    std::vector<std::string> names;
    for (std::size_t q = 0; q < n; ++q) names.push_back(std::to_string(q));
    std::vector<StateId> finals;
    for (std::size_t q = 0; q < n; ++q)
        if (detail::unit_draw(rng) < final_prob) finals.push_back(static_cast<StateId>(q));
    std::vector<Transition> ts;
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t s = 0; s < alphabet_size; ++s)
            for (std::size_t r = 0; r < n; ++r)
                if (detail::unit_draw(rng) < density)
                    ts.push_back({static_cast<StateId>(q), static_cast<SymbolId>(s), static_cast<StateId>(r)});
    return Nfa(Alphabet(std::move(symbols)), std::move(names), {0}, std::move(finals), std::move(ts));
}

} // namespace klqds
