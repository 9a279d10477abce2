#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "klqds/alphabet.hpp"
#include "klqds/error.hpp"
#include "klqds/state_set.hpp"

namespace klqds {

/// ⊥: the undefined target of δ and γ. Not a state.
inline constexpr StateId kBottom = static_cast<StateId>(-1);

struct Gamma {
    StateId target = kBottom;
    std::uint32_t shift = 1;

    bool operator==(const Gamma&) const = default;
};

class QdsBuilder;

/// Layered structure Q_1..Q_m with a partial layer-advancing δ and a total
/// shifting γ on Q_m. State ids are grouped by layer.
class Qds {
public:
    Qds() = default;

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t m() const { return m_; }
    std::size_t window() const { return m_ - 1; }
    std::size_t num_states() const { return names_.size(); }
    const std::string& state_name(StateId q) const { return names_.at(q); }
    const std::vector<std::string>& state_names() const { return names_; }

    std::optional<StateId> find_state(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    StateId state_id(std::string_view name) const {
        if (auto q = find_state(name)) return *q;
        throw InputError("unknown state '" + std::string(name) + "'");
    }

    /// 1-based layer of q.
    std::size_t layer(StateId q) const { return layer_.at(q); }
    const std::vector<StateId>& layer_states(std::size_t j) const { return layers_.at(j - 1); }
    bool is_top(StateId q) const { return q != kBottom && layer_[q] == m_; }

    StateId initial() const { return initial_; }
    bool is_final(StateId q) const { return q != kBottom && final_[q]; }
    std::vector<StateId> finals() const {
        std::vector<StateId> out;
        for (StateId q = 0; q < num_states(); ++q)
            if (final_[q]) out.push_back(q);
        return out;
    }

    /// ⊥-absorbing.
    StateId delta(StateId q, SymbolId a) const {
        if (q == kBottom) return kBottom;
        return delta_[q * alphabet_.size() + a];
    }

    /// γ(⊥) = (⊥, 1); only meaningful on Q_m otherwise.
    Gamma gamma(StateId q) const {
        if (q == kBottom) return {};
        return gamma_[q];
    }

    /// δ(q, w[from, to)) with ⊥ absorption.
    StateId delta_word(StateId q, const Word& w, std::size_t from, std::size_t to) const {
        for (auto i = from; i < to && q != kBottom; ++i) q = delta(q, w[i]);
        return q;
    }

    std::size_t num_delta_edges() const {
        return static_cast<std::size_t>(std::count_if(delta_.begin(), delta_.end(), [](StateId t) { return t != kBottom; }));
    }

    bool operator==(const Qds& o) const {
        return alphabet_ == o.alphabet_ && m_ == o.m_ && names_ == o.names_ && layer_ == o.layer_ &&
               initial_ == o.initial_ && final_ == o.final_ && delta_ == o.delta_ && gamma_ == o.gamma_;
    }

private:
    friend class QdsBuilder;

    Alphabet alphabet_;
    std::size_t m_ = 0;
    std::vector<std::string> names_;
    std::unordered_map<std::string, StateId> index_;
    std::vector<std::size_t> layer_;
    std::vector<std::vector<StateId>> layers_;
    StateId initial_ = kBottom;
    std::vector<bool> final_;
    std::vector<StateId> delta_;
    std::vector<Gamma> gamma_;
};

/// Name-based construction. build() validates every structural invariant
/// and renumbers states layer by layer, keeping declaration order inside a
/// layer.
class QdsBuilder {
public:
    QdsBuilder(Alphabet alphabet, std::size_t m) : alphabet_(std::move(alphabet)), m_(m) {
        if (m < 2) throw InputError("a QDS needs at least 2 layers");
    }

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t m() const { return m_; }

    void add_state(const std::string& name, std::size_t layer) {
        if (name.empty() || detail::has_space(name)) throw InputError("invalid state name '" + name + "'");
        if (layer < 1 || layer > m_) throw InputError("layer " + std::to_string(layer) + " out of range for state '" + name + "'");
        if (!index_.emplace(name, names_.size()).second) throw InputError("duplicate state '" + name + "'");
        names_.push_back(name);
        layer_.push_back(layer);
    }

    bool has_state(std::string_view name) const { return index_.count(std::string(name)) != 0; }

    void set_initial(std::string_view q) { initial_ = std::string(q); }
    void add_final(std::string_view q) { finals_.emplace_back(q); }
    void add_delta(std::string_view src, std::string_view a, std::string_view dst) {
        delta_.push_back({std::string(src), alphabet_.id(a), std::string(dst)});
    }
    void add_delta(std::string_view src, SymbolId a, std::string_view dst) {
        if (a >= alphabet_.size()) throw InputError("symbol index outside the alphabet");
        delta_.push_back({std::string(src), a, std::string(dst)});
    }
    /// target nullopt stands for ⊥
    void set_gamma(std::string_view src, std::optional<std::string> target, std::uint32_t shift) {
        gamma_.push_back({std::string(src), std::move(target), shift});
    }

    Qds build() const {
        Qds s;
        s.alphabet_ = alphabet_;
        s.m_ = m_;
        const auto n = names_.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return layer_[x] < layer_[y]; });
        s.layers_.assign(m_, {});
        for (auto old : order) {
            const auto id = static_cast<StateId>(s.names_.size());
            s.index_.emplace(names_[old], id);
            s.names_.push_back(names_[old]);
            s.layer_.push_back(layer_[old]);
            s.layers_[layer_[old] - 1].push_back(id);
        }
        auto id_of = [&](const std::string& name, const char* what) {
            auto it = s.index_.find(name);
            if (it == s.index_.end()) throw InputError(std::string(what) + ": undeclared state '" + name + "'");
            return it->second;
        };
        if (!initial_) throw InputError("missing initial state");
        s.initial_ = id_of(*initial_, "initial");
        if (s.layer_[s.initial_] != 1) throw InputError("initial state '" + *initial_ + "' is not in layer 1");
        s.final_.assign(n, false);
        for (const auto& f : finals_) s.final_[id_of(f, "final")] = true;

        const auto sigma = alphabet_.size();
        s.delta_.assign(n * sigma, kBottom);
        for (const auto& [src, a, dst] : delta_) {
            const auto p = id_of(src, "transition");
            const auto q = id_of(dst, "transition");
            if (s.layer_[p] == m_) throw InputError("transition from top-layer state '" + src + "'");
            if (s.layer_[q] != s.layer_[p] + 1)
                throw InputError("transition " + src + " " + alphabet_.name(a) + " " + dst + " does not advance exactly one layer");
            auto& slot = s.delta_[p * sigma + a];
            if (slot != kBottom && slot != q)
                throw InputError("nondeterministic transition from '" + src + "' on '" + alphabet_.name(a) + "'");
            slot = q;
        }

        s.gamma_.assign(n, Gamma{});
        std::vector<bool> has_gamma(n, false);
        for (const auto& [src, target, shift] : gamma_) {
            const auto p = id_of(src, "gamma");
            if (s.layer_[p] != m_) throw InputError("gamma on non-top-layer state '" + src + "'");
            if (has_gamma[p]) throw InputError("duplicate gamma for '" + src + "'");
            if (shift < 1 || shift > m_) throw InputError("gamma shift " + std::to_string(shift) + " outside [1.." + std::to_string(m_) + "]");
            Gamma g{kBottom, shift};
            if (target) {
                g.target = id_of(*target, "gamma");
                if (s.layer_[g.target] != 1) throw InputError("gamma target '" + *target + "' is not in layer 1");
            }
            s.gamma_[p] = g;
            has_gamma[p] = true;
        }
        for (auto q : s.layers_[m_ - 1])
            if (!has_gamma[q]) throw InputError("missing gamma for top-layer state '" + s.names_[q] + "'");
        return s;
    }

private:
    struct DeltaLine {
        std::string src;
        SymbolId symbol;
        std::string dst;
    };
    struct GammaLine {
        std::string src;
        std::optional<std::string> target;
        std::uint32_t shift;
    };

    Alphabet alphabet_;
    std::size_t m_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> layer_;
    std::optional<std::string> initial_;
    std::vector<std::string> finals_;
    std::vector<DeltaLine> delta_;
    std::vector<GammaLine> gamma_;
};

/// Rebuilds S on a subset of its states. `gamma_of` maps each kept top state
/// to its new γ; targets must be kept (or ⊥).
template <class GammaFn, class DeltaKeep>
Qds restrict_qds(const Qds& s, const StateSet& keep, const std::vector<bool>& finals, DeltaKeep&& keep_delta,
                 GammaFn&& gamma_of) {
    QdsBuilder b(s.alphabet(), s.m());
    for (StateId q = 0; q < s.num_states(); ++q)
        if (keep.contains(q)) b.add_state(s.state_name(q), s.layer(q));
    b.set_initial(s.state_name(s.initial()));
    for (StateId q = 0; q < s.num_states(); ++q) {
        if (!keep.contains(q)) continue;
        if (finals[q]) b.add_final(s.state_name(q));
        for (SymbolId a = 0; a < s.alphabet().size(); ++a) {
            const auto r = s.delta(q, a);
            if (r != kBottom && keep.contains(r) && keep_delta(q, a)) b.add_delta(s.state_name(q), a, s.state_name(r));
        }
        if (s.is_top(q)) {
            const Gamma g = gamma_of(q);
            b.set_gamma(s.state_name(q),
                        g.target == kBottom ? std::nullopt : std::optional<std::string>(s.state_name(g.target)), g.shift);
        }
    }
    return b.build();
}

namespace detail {
inline void require_layer1(const Qds& s, StateId q) {
    if (q == kBottom || q >= s.num_states() || s.layer(q) != 1)
        throw PreconditionError("extended delta needs a layer-1 state");
}
} // namespace detail

/// Δ(q, w), following the three-case recursive definition literally.
inline StateId extended_delta(const Qds& s, StateId q, const Word& w, std::size_t from = 0) {
    if (from == 0) {
        detail::require_layer1(s, q);
        s.alphabet().require_word(w);
    }
    const auto m = s.m();
    const auto rest = w.size() - from;
    if (rest <= m - 1) return s.delta_word(q, w, from, w.size());
    const auto r = s.delta_word(q, w, from, from + m - 1);
    const auto g = s.gamma(r);
    if (r == kBottom || g.target == kBottom) return kBottom;
    return extended_delta(s, g.target, w, from + g.shift);
}

struct TraceStep {
    std::size_t position = 0;  // window start offset into w
    StateId state_before = kBottom;
    Word consumed;
    StateId reached = kBottom;  // δ(state_before, consumed)
    std::optional<std::uint32_t> shift;
    StateId shift_target = kBottom;
};

struct RunTrace {
    std::vector<TraceStep> steps;
    StateId terminal = kBottom;
};

struct MembershipResult {
    bool accepted = false;
    StateId terminal = kBottom;
    std::size_t shifts = 0;
    std::size_t reads = 0;
};

/// Windowed membership test, iterative with constant working state. Every
/// δ lookup counts as one read; the count stops at the first ⊥.
inline MembershipResult qds_membership(const Qds& s, const Word& w, RunTrace* trace = nullptr) {
    s.alphabet().require_word(w);
    const auto k = s.window();
    MembershipResult res;
    auto read = [&](StateId c, std::size_t from, std::size_t to) {
        for (auto i = from; i < to && c != kBottom; ++i) {
            c = s.delta(c, w[i]);
            ++res.reads;
        }
        return c;
    };
    auto record = [&](std::size_t pos, StateId before, std::size_t to, StateId reached) -> TraceStep* {
        if (!trace) return nullptr;
        trace->steps.push_back({pos, before, Word(w.begin() + static_cast<std::ptrdiff_t>(pos), w.begin() + static_cast<std::ptrdiff_t>(to)), reached, std::nullopt, kBottom});
        return &trace->steps.back();
    };

    if (w.size() <= k) {
        const auto c = read(s.initial(), 0, w.size());
        record(0, s.initial(), w.size(), c);
        res.terminal = c;
    } else {
        StateId c = s.initial();
        std::size_t pos = 0;
        while (w.size() - pos > k && c != kBottom) {
            const auto r = read(c, pos, pos + k);
            const auto g = s.gamma(r);
            if (auto* st = record(pos, c, pos + k, r); st && r != kBottom) {
                st->shift = g.shift;
                st->shift_target = g.target;
            }
            if (r != kBottom) ++res.shifts;
            c = g.target;
            pos += g.shift;
        }
        if (c != kBottom) {
            const auto before = c;
            c = read(c, pos, w.size());
            record(pos, before, w.size(), c);
        }
        res.terminal = c;
    }
    res.accepted = s.is_final(res.terminal);
    if (trace) trace->terminal = res.terminal;
    return res;
}

/// An edge label: a symbol of Σ or a shift length.
struct EdgeLabel {
    bool is_shift = false;
    std::uint32_t value = 0;  // SymbolId or shift

    static EdgeLabel symbol(SymbolId a) { return {false, a}; }
    static EdgeLabel shift_by(std::uint32_t l) { return {true, l}; }
    bool operator==(const EdgeLabel&) const = default;
};

struct QdsEdge {
    StateId src;
    EdgeLabel label;
    StateId dst;
    bool operator==(const QdsEdge&) const = default;
};

struct QdsPath {
    StateId start = kBottom;
    std::vector<QdsEdge> edges;

    StateId end() const { return edges.empty() ? start : edges.back().dst; }
};

struct PathAnalysis {
    bool shiftable = false;
    bool successful = false;
    std::optional<Word> label;
};

inline bool is_edge_of(const Qds& s, const QdsEdge& e) {
    if (e.src == kBottom || e.src >= s.num_states()) return false;
    if (!e.label.is_shift) return e.label.value < s.alphabet().size() && s.delta(e.src, e.label.value) == e.dst && e.dst != kBottom;
    if (!s.is_top(e.src)) return false;
    const auto g = s.gamma(e.src);
    return g.target != kBottom && g.target == e.dst && g.shift == e.label.value;
}

inline void validate_path(const Qds& s, const QdsPath& p) {
    if (p.start == kBottom || p.start >= s.num_states()) throw InputError("path start is not a state");
    StateId cur = p.start;
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        const auto& e = p.edges[i];
        if (e.src != cur) throw InputError("path is disconnected at edge " + std::to_string(i + 1));
        if (!is_edge_of(s, e)) throw InputError("edge " + std::to_string(i + 1) + " is not an edge of the structure");
        cur = e.dst;
    }
}

/// Shiftability and label, with edge positions numbered from 1. A γ edge at
/// position j with shift l needs m-1-l edges before it, m-l edges after it,
/// and the m-1-l edges on each side of it to carry equal labels. The label
/// drops each γ edge together with the m-1-l re-read edges that follow.
inline PathAnalysis analyze_path(const Qds& s, const QdsPath& p) {
    validate_path(s, p);
    const auto m = static_cast<long>(s.m());
    const auto n = static_cast<long>(p.edges.size());
    auto x = [&](long j) -> const EdgeLabel& { return p.edges[static_cast<std::size_t>(j - 1)].label; };
    PathAnalysis r;
    r.shiftable = true;
    std::vector<bool> hidden(static_cast<std::size_t>(n) + 1, false);
    for (long j = 1; j <= n; ++j) {
        if (!x(j).is_shift) continue;
        const long l = x(j).value;
        if (!(m - 1 - l < j) || !(j + m - l <= n)) {
            r.shiftable = false;
            break;
        }
        const long len = m - 1 - l;
        for (long t = 0; t < len; ++t)
            if (!(x(j - len + t) == x(j + 1 + t))) {
                r.shiftable = false;
                break;
            }
        if (!r.shiftable) break;
        for (long t = j; t <= j + len; ++t) hidden[static_cast<std::size_t>(t)] = true;
    }
    if (!r.shiftable) return r;
    Word label;
    for (long j = 1; j <= n; ++j) {
        if (hidden[static_cast<std::size_t>(j)]) continue;
        if (x(j).is_shift) return r;  // shift m: the skipped symbol has no name, label undefined
        label.push_back(x(j).value);
    }
    r.label = std::move(label);
    r.successful = p.start == s.initial() && s.is_final(p.end());
    return r;
}

struct QdsStats {
    std::size_t m = 0;
    std::vector<std::size_t> layer_sizes;
    std::size_t total_states = 0;
    std::size_t delta_edges = 0;
    std::optional<std::uint32_t> min_shift;  // s; none when Q_m is empty
    std::size_t bottom_gammas = 0;
    std::size_t finals = 0;
};

inline QdsStats qds_stats(const Qds& s) {
    QdsStats st;
    st.m = s.m();
    for (std::size_t j = 1; j <= s.m(); ++j) st.layer_sizes.push_back(s.layer_states(j).size());
    st.total_states = s.num_states();
    st.delta_edges = s.num_delta_edges();
    for (auto q : s.layer_states(s.m())) {
        const auto g = s.gamma(q);
        if (!st.min_shift || g.shift < *st.min_shift) st.min_shift = g.shift;
        if (g.target == kBottom) ++st.bottom_gammas;
    }
    st.finals = s.finals().size();
    return st;
}

/// Upper bound on δ lookups performed by qds_membership on a word of length n.
inline std::size_t read_bound(const Qds& s, std::size_t n) {
    const auto st = qds_stats(s);
    const std::size_t sh = st.min_shift.value_or(1);
    const auto k = s.window();
    return k * ((n + sh - 1) / sh) + k;
}

/// Non-fatal oddities of a structure that parsed correctly.
inline std::vector<std::string> lint(const Qds& s) {
    std::vector<std::string> out;
    for (auto q : s.layer_states(s.m())) {
        const auto g = s.gamma(q);
        if (g.shift == s.m())
            out.push_back("gamma of '" + s.state_name(q) + "' shifts by m=" + std::to_string(s.m()) +
                          ": the symbol after the window is skipped without being read");
    }
    for (std::size_t j = 1; j <= s.m(); ++j)
        if (s.layer_states(j).empty()) out.push_back("layer " + std::to_string(j) + " is empty");
    return out;
}

/// States graph-reachable from the initial state through δ and non-⊥ γ.
inline StateSet reachable_states(const Qds& s) {
    StateSet seen(s.num_states());
    seen.insert(s.initial());
    std::deque<StateId> todo{s.initial()};
    auto visit = [&](StateId r) {
        if (r != kBottom && !seen.contains(r)) {
            seen.insert(r);
            todo.push_back(r);
        }
    };
    while (!todo.empty()) {
        const auto q = todo.front();
        todo.pop_front();
        for (SymbolId a = 0; a < s.alphabet().size(); ++a) visit(s.delta(q, a));
        if (s.is_top(q)) visit(s.gamma(q).target);
    }
    return seen;
}

inline Qds prune_unreachable(const Qds& s) {
    const auto keep = reachable_states(s);
    std::vector<bool> fin(s.num_states());
    for (StateId q = 0; q < s.num_states(); ++q) fin[q] = s.is_final(q);
    return restrict_qds(
        s, keep, fin, [](StateId, SymbolId) { return true; }, [&](StateId q) { return s.gamma(q); });
}

} // namespace klqds
