#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace klqds;

namespace {

Nfa loop_pair() {
    return parse_nfa(R"(@type nfa
@alphabet a
@states 0 1 2
@initial 0
@final 1
0 a 1
0 a 2
1 a 1
2 a 2
)");
}

// Largest j <= l whose live set has at most one state, from the definition.
std::pair<std::size_t, std::optional<StateId>> step_by_definition(const Nfa& a, std::size_t l, StateId q, const Word& w) {
    std::size_t best = 0;
    std::optional<StateId> succ;
    for (std::size_t j = 1; j <= l; ++j) {
        std::vector<StateId> live;
        for (auto p : oracle::nfa_reach(a, {q}, w, 0, j))
            if (!oracle::nfa_reach(a, {p}, w, j, w.size()).empty()) live.push_back(p);
        if (live.size() <= 1) {
            best = j;
            succ = live.empty() ? std::nullopt : std::optional<StateId>(live.front());
        }
    }
    return {best, succ};
}

} // namespace

TEST_CASE("square automaton") {
    const auto a = oracle::load_nfa("sigma_a_sigma.nfa");
    const auto sq = square_automaton(a);
    const auto one = a.state_id("1"), two = a.state_id("2");
    CHECK(sq.index.count(PairState{one, two}) == 1);
    bool edge = false;
    for (const auto& e : sq.transitions)
        edge |= sq.states[e.src] == PairState{one, one} && e.symbol == 0 && sq.states[e.dst] == PairState{one, two};
    CHECK(edge);

    const auto d = determinize(a).nfa();
    for (const auto& p : square_automaton(d).states) CHECK(p.is_diagonal());

    const auto empty = parse_nfa("@type nfa\n@alphabet a\n@states 0 1\n@initial 0\n");
    CHECK(square_automaton(empty).states.size() == 1);
    CHECK_THROWS_AS(square_automaton(parse_nfa("@type nfa\n@alphabet a\n@states 0 1\n@initial 0 1\n")), PreconditionError);
}

TEST_CASE("exists_kl on the worked example and on a looping pair") {
    const auto nine = oracle::load_nfa("nine_state.nfa");
    const auto r = exists_kl(nine);
    CHECK(r.exists);
    REQUIRE(r.witness_pair);
    CHECK(is_kl_unambiguous(nine, r.witness_pair->k, r.witness_pair->l));

    const auto bad = loop_pair();
    const auto n = exists_kl(bad);
    CHECK_FALSE(n.exists);
    REQUIRE_FALSE(n.certificate.empty());
    // replay the certificate under the product rule
    for (std::size_t i = 0; i < n.certificate.size(); ++i) {
        const auto& p = n.certificate[i];
        const auto& nxt = n.certificate[(i + 1) % n.certificate.size()];
        CHECK_FALSE(p.is_diagonal());
        const auto s = n.certificate_symbols[i];
        const auto a1 = bad.successors(p.first, s);
        const auto a2 = bad.successors(p.second, s);
        CHECK(std::find(a1.begin(), a1.end(), nxt.first) != a1.end());
        CHECK(std::find(a2.begin(), a2.end(), nxt.second) != a2.end());
    }
    const auto pair12 = PairState{bad.state_id("1"), bad.state_id("2")};
    const auto pair21 = PairState{bad.state_id("2"), bad.state_id("1")};
    CHECK((n.certificate.front() == pair12 || n.certificate.front() == pair21));
}

TEST_CASE("deterministic automata are (1,1)-unambiguous") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = oracle::random_dfa(seed, 4, 2, 0.7, 0.5);
        CHECK(exists_kl(accessible_part(d)).exists);
        CHECK(is_kl_unambiguous(d, 1, 1));
        CHECK(find_minimal_kl(d, 3) == KlPair{1, 1});
        CHECK(is_k_lookahead_deterministic(d, 1));
    }
}

TEST_CASE("checks on the nine-state example") {
    const auto a = oracle::load_nfa("nine_state.nfa");
    CHECK_FALSE(is_kl_unambiguous(a, 3, 3));
    CHECK_FALSE(is_kl_unambiguous(a, 4, 2));
    CHECK(is_kl_unambiguous(a, 4, 3));
    CHECK(is_kl_unambiguous(a, 4, 4));
    for (std::size_t k = 1; k <= 8; ++k) CHECK_FALSE(is_k_lookahead_deterministic(a, k));
    CHECK(find_minimal_kl(a, 6) == KlPair{4, 3});
    CHECK_FALSE(find_minimal_kl(a, 3).has_value());
    CHECK_FALSE(find_minimal_kl(loop_pair(), 6).has_value());
}

TEST_CASE("argument validation") {
    const auto a = oracle::load_nfa("sigma_a_sigma.nfa");
    CHECK_THROWS_AS(is_kl_unambiguous(a, 2, 3), PreconditionError);
    CHECK_THROWS_AS(is_kl_unambiguous(a, 2, 0), PreconditionError);
    CHECK_THROWS_AS(is_k_lookahead_deterministic(a, 0), PreconditionError);
    CHECK_THROWS_AS(step(a, 3, 3, 0, Word{0, 1}), InputError);
    const auto nine = oracle::load_nfa("nine_state.nfa");
    CHECK_THROWS_AS(step_table(nine, 3, 3), PreconditionError);
}

TEST_CASE("step values on the second-to-last automaton") {
    const auto a = oracle::load_nfa("sigma_a_sigma.nfa");
    const auto& s = a.alphabet();
    const auto one = a.state_id("1");
    CHECK(is_kl_unambiguous(a, 3, 1));
    CHECK(is_k_lookahead_deterministic(a, 3));
    auto entry = [&](std::size_t l, const char* w) { return step(a, 3, l, one, s.parse_word(w)); };
    CHECK(entry(3, "baa").index == 1);
    CHECK(entry(3, "baa").successor == one);
    CHECK(entry(3, "aba").index == 2);
    CHECK(entry(3, "aba").successor == one);
    CHECK(entry(3, "bbb").index == 3);
    CHECK(entry(3, "bbb").successor == one);
    for_each_word(2, 3, [&](const Word& w) {
        const auto e = step(a, 3, 1, one, w);
        CHECK(e.index == 1);
        CHECK(e.successor == one);
    });

    const auto t = step_table(a, 3, 3);
    CHECK(t.entries.size() == 24);
    for (StateId q = 0; q < 3; ++q) {
        std::size_t rank = 0;
        for_each_word(2, 3, [&](const Word& w) {
            const auto& e = t.at(q, rank++);
            const auto [idx, succ] = step_by_definition(a, 3, q, w);
            CHECK(e.index == idx);
            CHECK(e.has_successor() == succ.has_value());
            if (succ) CHECK(e.successor == *succ);
            if (e.has_successor()) CHECK(e.successor == one);
        });
    }
}

TEST_CASE("kl checks agree with the literal definition on random automata") {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const auto a = random_nfa(seed * 31 + 7, 2 + seed % 4, 1 + seed % 2, 0.3, 0.4);
        for (std::size_t k = 1; k <= 4; ++k) {
            for (std::size_t l = 1; l <= k; ++l) {
                const bool lib = is_kl_unambiguous(a, k, l);
                REQUIRE(lib == oracle::kl_holds(a, k, l));
                if (lib && l < k) CHECK(is_kl_unambiguous(a, k, l + 1));
            }
            REQUIRE(is_k_lookahead_deterministic(a, k) == oracle::lookahead_holds(a, k));
        }
    }
}

TEST_CASE("existence agrees with bounded search on small automata") {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const auto a = accessible_part(random_nfa(seed + 5000, 2 + seed % 3, 1 + seed % 2, 0.35, 0.4));
        const auto n = a.num_states();
        const auto r = exists_kl(a);
        const auto found = oracle::exists_by_search(a, n * (n - 1) + 1);
        REQUIRE(r.exists == found.has_value());
        if (r.exists) CHECK(oracle::kl_holds(a, r.witness_pair->k, r.witness_pair->l));
        const auto mine = find_minimal_kl(a, default_kmax(a));
        const auto ref = oracle::minimal_pair(a, default_kmax(a));
        CHECK(mine.has_value() == ref.has_value());
        if (mine && ref) CHECK((mine->k == ref->first && mine->l == ref->second));
    }
}

TEST_CASE("existence requires an accessible automaton") {
    const auto a = parse_nfa("@type nfa\n@alphabet a\n@states 0 1 2\n@initial 0\n@final 2\n1 a 2\n1 a 1\n2 a 1\n");
    CHECK_FALSE(is_accessible(a));
    CHECK_THROWS_AS(exists_kl(a), PreconditionError);
    CHECK(exists_kl(accessible_part(a)).exists);
    // the bounded search still answers from the definition
    CHECK(find_minimal_kl(a, 4).has_value() == oracle::minimal_pair(a, 4).has_value());
    CHECK_FALSE(find_minimal_kl(a, 4).has_value());  // states 1 and 2 stay ambiguous
}
