#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace klqds;

namespace {

QdsPath path_of(const Qds& s, const std::vector<std::tuple<const char*, std::string, const char*>>& edges) {
    QdsPath p{s.state_id(std::get<0>(edges.front())), {}};
    for (const auto& [src, lbl, dst] : edges) {
        const auto label = std::isdigit(static_cast<unsigned char>(lbl[0])) ? EdgeLabel::shift_by(static_cast<std::uint32_t>(std::stoul(lbl)))
                                                                              : EdgeLabel::symbol(s.alphabet().id(lbl));
        p.edges.push_back({s.state_id(src), label, s.state_id(dst)});
    }
    return p;
}

// Path followed by the run on w, rebuilt from the trace.
QdsPath run_path(const Qds& s, const Word& w) {
    RunTrace t;
    qds_membership(s, w, &t);
    QdsPath p{s.initial(), {}};
    for (const auto& st : t.steps) {
        StateId c = st.state_before;
        for (auto a : st.consumed) {
            const auto r = s.delta(c, a);
            p.edges.push_back({c, EdgeLabel::symbol(a), r});
            c = r;
        }
        if (st.shift) p.edges.push_back({c, EdgeLabel::shift_by(*st.shift), st.shift_target});
    }
    return p;
}

} // namespace

TEST_CASE("structure builder rejects malformed input") {
    const Alphabet ab({"a", "b"});
    auto base = [&] {
        QdsBuilder b(ab, 2);
        b.add_state("1", 1);
        b.add_state("2", 2);
        b.set_initial("1");
        b.set_gamma("2", std::string("1"), 1);
        return b;
    };
    CHECK_NOTHROW(base().build());
    {
        auto b = base();
        b.add_delta("1", "a", "1");
        CHECK_THROWS_AS(b.build(), InputError);
    }
    {
        auto b = base();
        b.add_delta("1", "a", "2");
        b.add_state("3", 2);
        b.set_gamma("3", std::nullopt, 2);
        b.add_delta("1", "a", "3");
        CHECK_THROWS_AS(b.build(), InputError);
    }
    {
        auto b = base();
        b.set_gamma("2", std::string("1"), 1);
        CHECK_THROWS_AS(b.build(), InputError);
    }
    {
        QdsBuilder b(ab, 2);
        b.add_state("1", 1);
        b.add_state("2", 2);
        b.set_initial("1");
        CHECK_THROWS_AS(b.build(), InputError);  // missing gamma
        b.set_gamma("2", std::string("1"), 3);
        CHECK_THROWS_AS(b.build(), InputError);  // shift out of range
    }
    CHECK_THROWS_AS(QdsBuilder(ab, 1), InputError);
    CHECK_THROWS_AS(parse_qds("@type qds\n@alphabet a\n@layers 2\n@layer 1 x\n@layer 2 y\n@initial y\n@gamma y x 1\n"), InputError);
}

TEST_CASE("membership trace on the eight-state structure") {
    const auto s = oracle::load_qds("window3.qds");
    CHECK(s.m() == 3);
    CHECK(s.num_states() == 8);
    RunTrace t;
    const auto r = qds_membership(s, s.alphabet().parse_word("bbbaabab"), &t);
    CHECK(r.accepted);
    CHECK(s.state_name(r.terminal) == "7");
    CHECK(r.shifts == 4);
    CHECK(r.reads == 9);
    REQUIRE(t.steps.size() == 5);
    const std::vector<std::pair<std::string, std::string>> expect{{"1", "5"}, {"1", "5"}, {"1", "4"}, {"6", "8"}, {"6", "7"}};
    const std::vector<std::size_t> pos{0, 2, 4, 5, 7};
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(s.state_name(t.steps[i].state_before) == expect[i].first);
        CHECK(s.state_name(t.steps[i].reached) == expect[i].second);
        CHECK(t.steps[i].position == pos[i]);
    }
    CHECK(extended_delta(s, s.initial(), s.alphabet().parse_word("bbbaabab")) == s.state_id("7"));
}

TEST_CASE("short words use delta directly and blocked runs reject") {
    const auto s = oracle::load_qds("window3.qds");
    const auto& A = s.alphabet();
    CHECK(qds_membership(s, A.parse_word("a")).accepted);
    CHECK_FALSE(qds_membership(s, A.parse_word("")).accepted);
    const auto r = qds_membership(s, A.parse_word("bbbb"));
    CHECK_FALSE(r.accepted);
    for_each_word_upto(2, 10, [&](const Word& w) {
        const auto m = qds_membership(s, w);
        REQUIRE(m.accepted == oracle::qds_accepts(s, w));
        REQUIRE(m.terminal == oracle::qds_delta_word(s, s.initial(), w));
        REQUIRE(extended_delta(s, s.initial(), w) == m.terminal);
        REQUIRE(m.reads <= read_bound(s, w.size()));
    });
}

TEST_CASE("shiftable paths and labels on the eight-state structure") {
    const auto s = oracle::load_qds("window3.qds");
    const auto p = path_of(s, {{"1", "a", "2"}, {"2", "b", "4"}, {"4", "1", "6"}, {"6", "b", "7"}, {"7", "a", "8"}, {"8", "2", "6"}, {"6", "b", "7"}});
    const auto r = analyze_path(s, p);
    CHECK(r.shiftable);
    REQUIRE(r.label);
    CHECK(s.alphabet().format(*r.label) == "abab");
    CHECK(oracle::qds_delta_word(s, s.initial(), *r.label) == s.state_id("7"));
    CHECK(r.successful);

    // overlap mismatch: after (4,1,6) the re-read symbol must be b
    const auto bad = path_of(s, {{"1", "a", "2"}, {"2", "b", "4"}, {"4", "1", "6"}, {"6", "a", "7"}, {"7", "a", "8"}});
    CHECK_FALSE(analyze_path(s, bad).shiftable);
    // not enough symbols after the shift
    const auto early = path_of(s, {{"1", "a", "2"}, {"2", "b", "4"}, {"4", "1", "6"}});
    CHECK_FALSE(analyze_path(s, early).shiftable);
    CHECK(analyze_path(s, QdsPath{s.initial(), {}}).shiftable);

    auto broken = p;
    broken.edges[1].dst = s.state_id("5");
    CHECK_THROWS_AS(analyze_path(s, broken), InputError);
}

TEST_CASE("runs label shiftable paths and shiftable paths are runs") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto m = 2 + seed % 3;
        const auto s = oracle::random_qds(seed, m, 2, 3, 0.8, 0.5, 0.1);
        for_each_word_upto(2, 7, [&](const Word& w) {
            const auto end = oracle::qds_delta_word(s, s.initial(), w);
            if (end == kBottom) return;
            const auto p = run_path(s, w);
            const auto r = analyze_path(s, p);
            REQUIRE(r.shiftable);
            REQUIRE(r.label == w);
            REQUIRE(p.end() == end);
        });
        // every shiftable path up to 8 edges from the initial state
        std::function<void(QdsPath&)> grow = [&](QdsPath& p) {
            const auto r = analyze_path(s, p);
            if (r.shiftable && r.label) REQUIRE(oracle::qds_delta_word(s, p.start, *r.label) == p.end());
            if (p.edges.size() == 8) return;
            const auto q = p.end();
            if (s.is_top(q)) {
                const auto g = s.gamma(q);
                if (g.target == kBottom) return;
                p.edges.push_back({q, EdgeLabel::shift_by(g.shift), g.target});
                grow(p);
                p.edges.pop_back();
                return;
            }
            for (SymbolId a = 0; a < 2; ++a)
                if (auto d = s.delta(q, a); d != kBottom) {
                    p.edges.push_back({q, EdgeLabel::symbol(a), d});
                    grow(p);
                    p.edges.pop_back();
                }
        };
        QdsPath start{s.initial(), {}};
        grow(start);
    }
}

TEST_CASE("stats, lint and reachability") {
    const auto s = oracle::load_qds("window3.qds");
    const auto st = qds_stats(s);
    CHECK(st.layer_sizes == std::vector<std::size_t>{2, 3, 3});
    CHECK(st.delta_edges == 9);
    CHECK(st.min_shift == 1u);
    CHECK(st.finals == 2);
    CHECK(lint(s).empty());
    CHECK(read_bound(s, 8) == 2 * 8 + 2);
    CHECK(reachable_states(s).size() == 8);
    const auto lintme = parse_qds("@type qds\n@alphabet a\n@layers 2\n@layer 1 x\n@layer 2 y\n@initial x\nx a y\n@gamma y x 2\n");
    CHECK(lint(lintme).size() == 1);
}

TEST_CASE("qds text format round-trips") {
    for (const auto* f : {"window3.qds", "to_trim.qds", "not_trimmed.qds", "not_trimmed.expected.qds", "s.qds", "s_prime.qds",
                          "s_prime.expected.qds", "embed.expected.qds"}) {
        const auto s = oracle::load_qds(f);
        CHECK(parse_qds(to_string(s)) == s);
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = oracle::random_qds(seed, 3, 2, 3, 0.6, 0.5, 0.3);
        CHECK(parse_qds(to_string(s)) == s);
    }
    const auto dot = to_dot(oracle::load_qds("window3.qds"));
    CHECK(dot.find("style=dashed, label=\"2\"") != std::string::npos);
}

TEST_CASE("construction from the second-to-last automaton") {
    const auto a = oracle::load_nfa("sigma_a_sigma.nfa");
    const auto s = build_qds(a, 3, 3);
    CHECK(s.num_states() == 45);
    CHECK(build_qds_size(3, 2, 3) == 45);
    const auto pruned = prune_unreachable(s);
    CHECK(pruned.num_states() == 15);
    std::vector<std::uint32_t> shifts;
    for_each_word(2, 3, [&](const Word& w) { shifts.push_back(s.gamma(s.state_id(pair_state_name("1", a.alphabet(), w))).shift); });
    CHECK(shifts == std::vector<std::uint32_t>{1, 1, 2, 3, 1, 1, 2, 3});
    for_each_word_upto(2, 8, [&](const Word& w) {
        const bool expect = oracle::nfa_accepts(a, w);
        REQUIRE(qds_membership(s, w).accepted == expect);
        REQUIRE(qds_membership(pruned, w).accepted == expect);
    });
}

TEST_CASE("construction fails fast without a step index") {
    const auto a = oracle::load_nfa("nine_state.nfa");
    try {
        build_qds(a, 3, 3);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("no step index for state") != std::string::npos);
    }
    const auto s = build_qds(a, 4, 3);
    CHECK(s.num_states() == build_qds_size(9, 3, 4));
    for_each_word_upto(3, 7, [&](const Word& w) { REQUIRE(qds_membership(s, w).accepted == oracle::nfa_accepts(a, w)); });
}

TEST_CASE("window-1 embedding of a deterministic automaton") {
    const auto d = oracle::load_nfa("embed.dfa.nfa");
    const auto s = dfa_to_qds(d);
    CHECK(s == oracle::load_qds("embed.expected.qds"));
    for_each_word_upto(2, 8, [&](const Word& w) { REQUIRE(qds_membership(s, w).accepted == oracle::nfa_accepts(d, w)); });
    CHECK_THROWS_AS(dfa_to_qds(oracle::load_nfa("sigma_a_sigma.nfa")), PreconditionError);
}
