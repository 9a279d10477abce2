#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "klqds/dfa.hpp"
#include "klqds/error.hpp"
#include "klqds/nfa.hpp"
#include "klqds/path_dfa.hpp"
#include "klqds/qds.hpp"
#include "klqds/reduce.hpp"

namespace klqds {

/// k+2 states for {a,b}* a {a,b}^k.
inline Nfa gen_lk_nfa(long k) {
    if (k < 0) throw InputError("k must be non-negative");
    const auto kk = static_cast<std::size_t>(k);
    NfaBuilder b(Alphabet({"a", "b"}));
    for (std::size_t q = 0; q <= kk + 1; ++q) b.add_state(std::to_string(q));
    b.add_initial(0);
    b.add_final(static_cast<StateId>(kk + 1));
    b.add_transition(0, 0, 0);
    b.add_transition(0, 1, 0);
    b.add_transition(0, 0, 1);
    for (std::size_t j = 1; j <= kk; ++j)
        for (SymbolId x = 0; x < 2; ++x) b.add_transition(static_cast<StateId>(j), x, static_cast<StateId>(j + 1));
    return b.build();
}

/// Direct membership predicate for L_k.
inline bool in_lk(const Word& w, std::size_t k) { return w.size() >= k + 1 && w[w.size() - k - 1] == 0; }

namespace detail {
inline std::string sk_name(std::size_t n, std::size_t j, bool primed) {
    return "(" + std::to_string(n) + "," + std::to_string(j) + ")" + (primed ? "'" : "");
}
} // namespace detail

/// The hand-built structure S_k for L_k: layers 1..k+3, 2(k+1)^2 + k + 3 states.
/// Both copies of the layer-(k+2) states advance to the shared last layer.
inline Qds gen_sk_qds(long k) {
    if (k < 0) throw InputError("k must be non-negative");
    const auto K = static_cast<std::size_t>(k);
    using detail::sk_name;
    QdsBuilder b(Alphabet({"a", "b"}), K + 3);
    b.add_state(sk_name(1, 1, false), 1);
    for (std::size_t j = 2; j <= K + 2; ++j) {
        for (std::size_t n = 1; n <= K + 1; ++n) b.add_state(sk_name(n, j, false), j);
        for (std::size_t n = 1; n <= K + 1; ++n) b.add_state(sk_name(n, j, true), j);
    }
    for (std::size_t n = 1; n <= K + 2; ++n) b.add_state(sk_name(n, K + 3, false), K + 3);
    b.set_initial(sk_name(1, 1, false));
    for (std::size_t n = 1; n <= K + 1; ++n) b.add_final(sk_name(n, K + 2, false));
    b.add_final(sk_name(1, K + 3, false));

    b.add_delta(sk_name(1, 1, false), "a", sk_name(1, 2, false));
    b.add_delta(sk_name(1, 1, false), "b", sk_name(1, 2, true));
    for (bool pr : {false, true}) {
        for (std::size_t j2 = 2; j2 <= K + 1; ++j2)
            for (std::size_t j1 = 1; j1 + 2 <= j2; ++j1)
                for (auto x : {"a", "b"}) b.add_delta(sk_name(j1, j2, pr), x, sk_name(j1, j2 + 1, pr));
        for (std::size_t j1 = 1; j1 <= K; ++j1) {
            b.add_delta(sk_name(j1, j1 + 1, pr), "a", sk_name(j1, j1 + 2, pr));
            b.add_delta(sk_name(j1, j1 + 1, pr), "b", sk_name(j1 + 1, j1 + 2, pr));
        }
        for (std::size_t j1 = 1; j1 <= K; ++j1)
            for (auto x : {"a", "b"}) b.add_delta(sk_name(j1, K + 2, pr), x, sk_name(j1, K + 3, false));
        b.add_delta(sk_name(K + 1, K + 2, pr), "a", sk_name(K + 1, K + 3, false));
        b.add_delta(sk_name(K + 1, K + 2, pr), "b", sk_name(K + 2, K + 3, false));
    }
    for (std::size_t j = 1; j <= K + 2; ++j)
        b.set_gamma(sk_name(j, K + 3, false), sk_name(1, 1, false), static_cast<std::uint32_t>(j));
    return b.build();
}

inline std::size_t sk_size_formula(std::size_t k) { return 2 * (k + 1) * (k + 1) + k + 3; }

/// Uniform random word over an alphabet, drawn from the shared portable source.
inline Word random_word(std::mt19937_64& rng, std::size_t sigma, std::size_t len) {
    Word w(len);
    for (auto& s : w) s = static_cast<SymbolId>(detail::unit_draw(rng) * static_cast<double>(sigma));
    return w;
}

struct GapRow {
    std::size_t k = 0;
    std::size_t nfa_states = 0;
    std::size_t sk_states = 0;
    std::size_t dfa_states = 0;
    std::size_t sk_after_trim = 0;
    std::size_t sk_after_reduce = 0;
    double membership_reads_per_symbol = 0.0;
};

struct GapReport {
    std::vector<GapRow> rows;
    std::optional<std::size_t> crossover;  // first k with sk_states < dfa_states
};

/// Measured sizes per k. DFA sizes exclude the completion sink. Reads per
/// symbol are averaged over 1000 random words of length 10(k+2).
inline GapRow gap_row(std::size_t k, std::uint64_t seed) {
    GapRow r;
    r.k = k;
    const auto nfa = gen_lk_nfa(static_cast<long>(k));
    const auto sk = gen_sk_qds(static_cast<long>(k));
    r.nfa_states = nfa.num_states();
    r.sk_states = sk.num_states();
    r.dfa_states = minimize_dfa(determinize(nfa)).num_states();
    const auto trimmed = trim_qds(sk);
    r.sk_after_trim = trimmed.num_states();
    r.sk_after_reduce = quotient(trimmed, equiv_fixpoint(trimmed)).num_states();
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (k + 1)));
    const std::size_t len = 10 * (k + 2);
    std::size_t reads = 0;
    for (int i = 0; i < 1000; ++i) reads += qds_membership(sk, random_word(rng, 2, len)).reads;
    r.membership_reads_per_symbol = static_cast<double>(reads) / (1000.0 * static_cast<double>(len));
    return r;
}

inline GapReport gap_report(std::size_t k_max, std::uint64_t seed) {
    GapReport rep;
    for (std::size_t k = 0; k <= k_max; ++k) {
        rep.rows.push_back(gap_row(k, seed));
        if (!rep.crossover && rep.rows.back().sk_states < rep.rows.back().dfa_states) rep.crossover = k;
    }
    return rep;
}

} // namespace klqds
