#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klqds/error.hpp"
#include "klqds/qds.hpp"

namespace klqds {

/// Per-layer partition of the states of a structure. Class ids are
/// canonical: numbered by first occurrence in state order, so two equal
/// partitions have equal `class_of` vectors.
struct LayeredPartition {
    std::vector<std::uint32_t> class_of;           // state -> class
    std::vector<std::vector<StateId>> classes;     // class -> members, increasing
    std::vector<std::size_t> class_layer;          // class -> 1-based layer
    std::size_t steps = 0;                         // refinement index reached

    std::size_t num_classes() const { return classes.size(); }
    bool same(StateId a, StateId b) const { return class_of.at(a) == class_of.at(b); }
    bool operator==(const LayeredPartition& o) const { return class_of == o.class_of; }
};

namespace detail {

// Canonical numbering from arbitrary per-state keys. States on different
// layers never share a class.
template <class Key>
LayeredPartition partition_from_keys(const Qds& s, const std::vector<Key>& key) {
    LayeredPartition p;
    p.class_of.resize(s.num_states());
    std::map<std::pair<std::size_t, Key>, std::uint32_t> ids;
    for (StateId q = 0; q < s.num_states(); ++q) {
        auto [it, fresh] = ids.emplace(std::make_pair(s.layer(q), key[q]), static_cast<std::uint32_t>(p.classes.size()));
        if (fresh) {
            p.classes.emplace_back();
            p.class_layer.push_back(s.layer(q));
        }
        p.class_of[q] = it->second;
        p.classes[it->second].push_back(q);
    }
    return p;
}

inline long class_or_bottom(const LayeredPartition& p, StateId q) {
    return q == kBottom ? -1L : static_cast<long>(p.class_of[q]);
}

} // namespace detail

inline LayeredPartition identity_partition(const Qds& s) {
    std::vector<StateId> key(s.num_states());
    for (StateId q = 0; q < s.num_states(); ++q) key[q] = q;
    return detail::partition_from_keys(s, key);
}

/// Partition given by lists of state names. Unlisted states become
/// singletons. Throws when a class spans layers or names repeat.
inline LayeredPartition partition_from_names(const Qds& s, const std::vector<std::vector<std::string>>& groups) {
    std::vector<long> key(s.num_states(), -1);
    long next = 0;
    for (const auto& g : groups) {
        std::optional<std::size_t> layer;
        for (const auto& name : g) {
            const auto q = s.state_id(name);
            if (key[q] != -1) throw InputError("state '" + name + "' listed twice");
            if (layer && *layer != s.layer(q)) throw InputError("class spans layers at state '" + name + "'");
            layer = s.layer(q);
            key[q] = next;
        }
        ++next;
    }
    for (StateId q = 0; q < s.num_states(); ++q)
        if (key[q] == -1) key[q] = next++;
    return detail::partition_from_keys(s, key);
}

/// One refinement step: ≡_j from ≡_{j-1} (or ≡_0 when prev is empty).
inline LayeredPartition refine_step(const Qds& s, const LayeredPartition* prev) {
    const auto m = s.m();
    const auto sigma = s.alphabet().size();
    // key: (finality, successor classes...) ; top: (shift, finality, target class)
    std::vector<std::vector<long>> key(s.num_states());
    std::vector<long> cls(s.num_states(), 0);

    for (auto q : s.layer_states(m)) {
        const auto g = s.gamma(q);
        key[q] = {static_cast<long>(g.shift), s.is_final(q) ? 1L : 0L};
        if (prev) key[q].push_back(detail::class_or_bottom(*prev, g.target));
    }
    auto number_layer = [&](std::size_t j) {
        std::map<std::vector<long>, long> ids;
        for (auto q : s.layer_states(j)) cls[q] = ids.emplace(key[q], static_cast<long>(ids.size())).first->second;
    };
    number_layer(m);
    for (std::size_t j = m - 1; j >= 1; --j) {
        for (auto q : s.layer_states(j)) {
            key[q] = {j == 1 ? 0L : (s.is_final(q) ? 1L : 0L)};
            for (SymbolId a = 0; a < sigma; ++a) {
                const auto r = s.delta(q, a);
                key[q].push_back(r == kBottom ? -1L : cls[r]);
            }
        }
        number_layer(j);
    }
    auto p = detail::partition_from_keys(s, cls);
    p.steps = prev ? prev->steps + 1 : 0;
    return p;
}

/// ≡_0, ≡_1, ..., ≡_n where n is the first index with ≡_n = ≡_{n+1}.
inline std::vector<LayeredPartition> equiv_chain(const Qds& s) {
    std::vector<LayeredPartition> chain{refine_step(s, nullptr)};
    while (true) {
        auto next = refine_step(s, &chain.back());
        if (next == chain.back()) break;
        chain.push_back(std::move(next));
    }
    return chain;
}

inline LayeredPartition equiv_fixpoint(const Qds& s) { return equiv_chain(s).back(); }

/// True iff every class of `fine` lies inside a class of `coarse`.
inline bool refines(const LayeredPartition& fine, const LayeredPartition& coarse) {
    for (const auto& c : fine.classes)
        for (auto q : c)
            if (coarse.class_of.at(q) != coarse.class_of.at(c.front())) return false;
    return true;
}

struct InvarianceViolation {
    StateId q;
    StateId q2;
    std::optional<SymbolId> symbol;  // nullopt: the γ condition failed
};

inline void require_layered(const Qds& s, const LayeredPartition& p) {
    if (p.class_of.size() != s.num_states()) throw InputError("partition does not cover the structure");
    for (const auto& c : p.classes)
        for (auto q : c)
            if (s.layer(q) != s.layer(c.front()))
                throw InputError("class spans layers: '" + s.state_name(c.front()) + "' and '" + s.state_name(q) + "'");
}

/// Both right-invariance conditions, checked against each class's first member.
inline std::optional<InvarianceViolation> right_invariance_violation(const Qds& s, const LayeredPartition& p) {
    require_layered(s, p);
    auto same = [&](StateId x, StateId y) {
        if (x == kBottom || y == kBottom) return x == y;
        return p.same(x, y);
    };
    for (const auto& c : p.classes) {
        const auto rep = c.front();
        for (auto q : c) {
            if (q == rep) continue;
            if (s.is_top(rep)) {
                const auto g1 = s.gamma(rep), g2 = s.gamma(q);
                if (g1.shift != g2.shift || !same(g1.target, g2.target)) return InvarianceViolation{rep, q, std::nullopt};
            } else {
                for (SymbolId a = 0; a < s.alphabet().size(); ++a)
                    if (!same(s.delta(rep, a), s.delta(q, a))) return InvarianceViolation{rep, q, a};
            }
        }
    }
    return std::nullopt;
}

inline bool verify_right_invariant(const Qds& s, const LayeredPartition& p) { return !right_invariance_violation(s, p); }

/// Two states of layer >= 2 in one class that disagree on finality.
inline std::optional<std::pair<StateId, StateId>> finality_violation(const Qds& s, const LayeredPartition& p) {
    for (const auto& c : p.classes) {
        if (s.layer(c.front()) == 1) continue;
        for (auto q : c)
            if (s.is_final(q) != s.is_final(c.front())) return std::make_pair(c.front(), q);
    }
    return std::nullopt;
}

struct QuotientMap {
    std::vector<StateId> representative;        // state -> least-named member of its class
    std::vector<std::vector<StateId>> members;  // class -> members
    std::vector<std::string> class_names;       // class -> "{a,b,...}"
};

inline QuotientMap quotient_map(const Qds& s, const LayeredPartition& p) {
    QuotientMap qm;
    qm.representative.resize(s.num_states());
    for (const auto& c : p.classes) {
        auto byname = c;
        std::sort(byname.begin(), byname.end(), [&](StateId x, StateId y) { return s.state_name(x) < s.state_name(y); });
        std::string name = "{";
        for (std::size_t i = 0; i < byname.size(); ++i) name += (i ? "," : "") + s.state_name(byname[i]);
        name += "}";
        for (auto q : c) qm.representative[q] = byname.front();
        qm.members.push_back(c);
        qm.class_names.push_back(std::move(name));
    }
    return qm;
}

inline std::string describe(const Qds& s, const InvarianceViolation& v) {
    std::string what = v.symbol ? "successors on '" + s.alphabet().name(*v.symbol) + "'" : std::string("gamma");
    return "'" + s.state_name(v.q) + "' and '" + s.state_name(v.q2) + "' are merged but their " + what + " differ";
}

/// S/∼. Finals: classes beyond layer 1 that meet F, plus [i] when i is final.
inline Qds quotient(const Qds& s, const LayeredPartition& p) {
    if (auto v = right_invariance_violation(s, p)) throw PreconditionError("partition is not right invariant: " + describe(s, *v));
    if (auto f = finality_violation(s, p))
        throw PreconditionError("partition mixes final and non-final states '" + s.state_name(f->first) + "' and '" +
                                s.state_name(f->second) + "'");
    const auto qm = quotient_map(s, p);
    QdsBuilder b(s.alphabet(), s.m());
    for (std::size_t c = 0; c < p.num_classes(); ++c) b.add_state(qm.class_names[c], p.class_layer[c]);
    const auto init_class = p.class_of[s.initial()];
    b.set_initial(qm.class_names[init_class]);
    for (std::size_t c = 0; c < p.num_classes(); ++c) {
        const auto& mem = p.classes[c];
        const bool fin = p.class_layer[c] == 1 ? (c == init_class && s.is_final(s.initial()))
                                               : std::any_of(mem.begin(), mem.end(), [&](StateId q) { return s.is_final(q); });
        if (fin) b.add_final(qm.class_names[c]);
        const auto rep = qm.representative[mem.front()];
        if (s.is_top(rep)) {
            const auto g = s.gamma(rep);
            b.set_gamma(qm.class_names[c],
                        g.target == kBottom ? std::nullopt : std::optional<std::string>(qm.class_names[p.class_of[g.target]]),
                        g.shift);
        } else {
            for (SymbolId a = 0; a < s.alphabet().size(); ++a) {
                const auto r = s.delta(rep, a);
                if (r != kBottom) b.add_delta(qm.class_names[c], a, qm.class_names[p.class_of[r]]);
            }
        }
    }
    return b.build();
}

} // namespace klqds
