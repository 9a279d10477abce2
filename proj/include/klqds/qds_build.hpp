#pragma once

#include <string>
#include <vector>

#include "klqds/dfa.hpp"
#include "klqds/kl.hpp"
#include "klqds/nfa.hpp"
#include "klqds/qds.hpp"

namespace klqds {

inline std::string pair_state_name(const std::string& q, const Alphabet& alphabet, const Word& w) {
    return q + "|" + word_token(alphabet, w);
}

/// Structure over pairs (q, w), |w| = j-1 on layer j, for a
/// (k,l)-unambiguous automaton. Unpruned: every pair is present.
inline Qds build_qds(const Nfa& a, std::size_t k, std::size_t l) {
    const auto table = step_table(a, k, l);  // throws with the offending (q, w)
    const auto& sigma = a.alphabet();
    QdsBuilder b(sigma, k + 1);
    for (std::size_t len = 0; len <= k; ++len)
        for (StateId q = 0; q < a.num_states(); ++q)
            for_each_word(sigma.size(), len, [&](const Word& w) {
                const auto name = pair_state_name(a.state_name(q), sigma, w);
                b.add_state(name, len + 1);
                if (delta_word(a, StateSet::singleton(a.num_states(), q), w).intersects(a.final_set())) b.add_final(name);
                if (len < k) {
                    Word wa = w;
                    wa.push_back(0);
                    for (SymbolId s = 0; s < sigma.size(); ++s) {
                        wa.back() = s;
                        b.add_delta(name, s, pair_state_name(a.state_name(q), sigma, wa));
                    }
                } else {
                    const auto& e = table.at(q, word_rank(w, sigma.size()));
                    std::optional<std::string> target;
                    if (e.has_successor()) target = pair_state_name(a.state_name(e.successor), sigma, {});
                    b.set_gamma(name, target, static_cast<std::uint32_t>(e.index));
                }
            });
    b.set_initial(pair_state_name(a.state_name(a.initials().front()), sigma, {}));
    return b.build();
}

/// |Q| · (|Σ|^(k+1) - 1) / (|Σ| - 1), or |Q| · (k+1) for a unary alphabet.
inline std::size_t build_qds_size(std::size_t states, std::size_t sigma, std::size_t k) {
    std::size_t per = 0, pw = 1;
    for (std::size_t j = 0; j <= k; ++j) {
        per += pw;
        pw *= sigma;
    }
    return states * per;
}

/// Window-1 structure: (q,1) on layer 1, (q,2) on layer 2, γ((q,2)) = ((q,1), 1).
inline Qds dfa_to_qds(const Dfa& d) {
    const auto& n = d.nfa();
    QdsBuilder b(d.alphabet(), 2);
    auto low = [&](StateId q) { return n.state_name(q) + "|1"; };
    auto high = [&](StateId q) { return n.state_name(q) + "|2"; };
    for (StateId q = 0; q < d.num_states(); ++q) b.add_state(low(q), 1);
    for (StateId q = 0; q < d.num_states(); ++q) b.add_state(high(q), 2);
    b.set_initial(low(d.initial()));
    for (StateId q = 0; q < d.num_states(); ++q) {
        if (d.is_final(q)) {
            b.add_final(low(q));
            b.add_final(high(q));
        }
        for (SymbolId a = 0; a < d.alphabet().size(); ++a)
            if (auto r = d.next(q, a)) b.add_delta(low(q), a, high(*r));
        b.set_gamma(high(q), low(q), 1);
    }
    return b.build();
}

inline Qds dfa_to_qds(const Nfa& a) { return dfa_to_qds(Dfa(a)); }

} // namespace klqds
