#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "klqds/klqds.hpp"

namespace klqds::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240601;

namespace detail {

struct Context {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    bool porcelain = false;
    std::uint64_t seed = kDefaultSeed;
};

inline std::string slurp(const std::string& path, std::istream& in) {
    std::ostringstream buf;
    if (path == "-") {
        buf << in.rdbuf();
        return buf.str();
    }
    std::ifstream f(path);
    if (!f) throw InputError("cannot open '" + path + "'");
    buf << f.rdbuf();
    return buf.str();
}

inline Nfa load_nfa(const Context& c, const std::string& path) { return parse_nfa(slurp(path, c.in)); }
inline Qds load_qds(const Context& c, const std::string& path) { return parse_qds(slurp(path, c.in)); }

inline std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) throw InputError("invalid seed '" + text + "'");
    return v;
}

inline std::string state_or_bottom(const Qds& s, StateId q) { return q == kBottom ? "_" : s.state_name(q); }

inline std::string spaced(const Alphabet& a, const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) out += (i && !a.single_char() ? " " : "") + a.name(w[i]);
    return out;
}

inline void write_trace(std::ostream& o, const Qds& s, const Word& w, const RunTrace& t, bool porcelain) {
    const auto& a = s.alphabet();
    if (porcelain) {
        o << "step\tposition\tstate\twindow\treached\tshift\ttarget\n";
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            const auto& st = t.steps[i];
            o << i + 1 << '\t' << st.position << '\t' << state_or_bottom(s, st.state_before) << '\t' << word_token(a, st.consumed) << '\t'
              << state_or_bottom(s, st.reached) << '\t' << (st.shift ? std::to_string(*st.shift) : "_") << '\t'
              << (st.shift ? state_or_bottom(s, st.shift_target) : "_") << '\n';
        }
        return;
    }
    std::vector<std::string> rows, notes;
    for (const auto& st : t.steps) {
        const Word before(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(st.position));
        const auto end = st.position + st.consumed.size();
        const Word after(w.begin() + static_cast<std::ptrdiff_t>(end), w.end());
        rows.push_back(spaced(a, before) + "[" + spaced(a, st.consumed) + "]" + spaced(a, after));
        std::string note = "delta(" + s.state_name(st.state_before) + "," + word_token(a, st.consumed) + ")=" + state_or_bottom(s, st.reached);
        if (st.shift)
            note += "  gamma(" + s.state_name(st.reached) + ")=(" + state_or_bottom(s, st.shift_target) + "," + std::to_string(*st.shift) + ")";
        notes.push_back(std::move(note));
    }
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.size());
    for (std::size_t i = 0; i < rows.size(); ++i) o << std::left << std::setw(static_cast<int>(width + 3)) << rows[i] << notes[i] << '\n';
    if (t.terminal == kBottom)
        o << "blocked: REJECT\n";
    else
        o << s.state_name(t.terminal) << (s.is_final(t.terminal) ? " in F: ACCEPT\n" : " not in F: REJECT\n");
}

inline void write_removed_report(std::ostream& o, const Qds& s, const UsefulReport& r) {
    o << "kind\tsource\tlabel\ttarget\n";
    for (StateId q = 0; q < s.num_states(); ++q)
        if (!r.useful_states.contains(q)) o << "state\t" << s.state_name(q) << "\t_\t_\n";
    for (StateId q = 0; q < s.num_states(); ++q)
        for (SymbolId a = 0; a < s.alphabet().size(); ++a)
            if (auto d = s.delta(q, a); d != kBottom && !r.useful_delta[q][a])
                o << "delta\t" << s.state_name(q) << '\t' << s.alphabet().name(a) << '\t' << s.state_name(d) << '\n';
    for (auto q : s.layer_states(s.m()))
        if (auto g = s.gamma(q); g.target != kBottom && !r.useful_gamma[q])
            o << "gamma\t" << s.state_name(q) << '\t' << g.shift << '\t' << s.state_name(g.target) << '\n';
    for (auto q : s.finals())
        if (!r.useful_finalities.contains(q)) o << "final\t" << s.state_name(q) << "\t_\t_\n";
}

inline std::string join_names(const Qds& s, const std::vector<StateId>& qs, char sep) {
    std::string out;
    for (std::size_t i = 0; i < qs.size(); ++i) out += (i ? std::string(1, sep) : "") + s.state_name(qs[i]);
    return out;
}

inline std::string cycle_text(const Nfa& a, const KlReport& r) {
    std::string out;
    auto pair = [&](const PairState& p) { return "(" + a.state_name(p.first) + "," + a.state_name(p.second) + ")"; };
    for (std::size_t i = 0; i < r.certificate.size(); ++i)
        out += pair(r.certificate[i]) + " -" + a.alphabet().name(r.certificate_symbols[i]) + "-> ";
    return out + pair(r.certificate.front());
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << text;
}

} // namespace detail

/// Runs one command line (without the program name). Returns the exit code:
/// 0 success, 1 negative answer, 2 input or precondition error.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Window-based recognizers for (k,l)-unambiguous automata", "klqds"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> out_path;
    std::optional<std::string> seed_text;
    bool porcelain = false;
    app.add_option("--out,-o", out_path, "Write results to this file instead of standard output");
    app.add_option("--seed", seed_text, "Seed for all randomness (default: $KLQDS_SEED or a fixed constant)");
    app.add_flag("--porcelain", porcelain, "Machine-readable output only");

    // Handlers run after parsing; they write to `o` and return an exit code.
    std::function<int(detail::Context&, std::ostream&)> handler;
    std::string input;
    auto file_arg = [&](CLI::App* sub) { sub->add_option("input", input, "Input file, or - for standard input")->required(); };
    std::size_t k = 0, l = 0, kmax = 0;
    std::optional<std::size_t> k_opt, l_opt, kmax_opt;

    auto* c_exists = app.add_subcommand("exists", "Decide whether some (k,l) pair makes the NFA unambiguous");
    file_arg(c_exists);
    c_exists->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto a = detail::load_nfa(c, input);
            const auto r = exists_kl(a);
            if (r.exists) {
                o << "EXISTS witness=(" << r.witness_pair->k << "," << r.witness_pair->l << ")\n";
                return 0;
            }
            o << "NONE cycle=" << detail::cycle_text(a, r) << '\n';
            return 1;
        };
    });

    auto* c_check = app.add_subcommand("check", "Check (k,l)-unambiguity directly");
    c_check->add_option("--k", k, "Window length")->required();
    c_check->add_option("--l", l, "Disambiguation prefix bound")->required();
    file_arg(c_check);
    c_check->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto a = detail::load_nfa(c, input);
            if (auto v = kl_violation(a, k, l)) {
                o << "AMBIGUOUS witness=" << pair_state_name(a.state_name(v->state), a.alphabet(), v->word) << '\n';
                return 1;
            }
            o << "UNAMBIGUOUS(" << k << "," << l << ")\n";
            return 0;
        };
    });

    auto* c_min = app.add_subcommand("minimal", "Smallest (k,l) pair, k first");
    c_min->add_option("--kmax", kmax_opt, "Largest k to try (default |Q|(|Q|-1)+1)");
    file_arg(c_min);
    c_min->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto a = detail::load_nfa(c, input);
            const auto bound = kmax_opt.value_or(default_kmax(a));
            if (a.initials().size() == 1 && is_accessible(a) && !exists_kl(a).exists) {
                o << "NONE no pair exists\n";
                return 1;
            }
            if (auto p = find_minimal_kl(a, bound)) {
                o << "MINIMAL(" << p->k << "," << p->l << ")\n";
                return 0;
            }
            o << "NONE search exhausted at kmax=" << bound << '\n';
            return 1;
        };
    });

    auto* c_steps = app.add_subcommand("steptable", "Tabulate step index and successor for every state and window word");
    c_steps->add_option("--k", k)->required();
    c_steps->add_option("--l", l)->required();
    file_arg(c_steps);
    c_steps->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto a = detail::load_nfa(c, input);
            const auto t = step_table(a, k, l);
            o << "state\tword\tindex\tsuccessor\n";
            for (StateId q = 0; q < a.num_states(); ++q) {
                std::size_t rank = 0;
                for_each_word(a.alphabet().size(), k, [&](const Word& w) {
                    const auto& e = t.at(q, rank++);
                    o << a.state_name(q) << '\t' << word_token(a.alphabet(), w) << '\t' << e.index << '\t'
                      << (e.has_successor() ? a.state_name(e.successor) : "_") << '\n';
                });
            }
            return 0;
        };
    });

    auto* c_look = app.add_subcommand("lookahead", "Check k-lookahead determinism");
    c_look->add_option("--k", k)->required();
    file_arg(c_look);
    c_look->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto a = detail::load_nfa(c, input);
            if (is_k_lookahead_deterministic(a, k)) {
                o << "LOOKAHEAD(" << k << ")\n";
                return 0;
            }
            o << "NOT-LOOKAHEAD(" << k << ")\n";
            return 1;
        };
    });

    bool prune = false;
    auto* c_build = app.add_subcommand("build-qds", "Compile a (k,l)-unambiguous NFA into a structure");
    c_build->add_option("--k", k_opt, "Window length (default: the minimal pair)");
    c_build->add_option("--l", l_opt);
    c_build->add_flag("--prune", prune, "Drop states unreachable from the initial state");
    file_arg(c_build);
    c_build->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto a = detail::load_nfa(c, input);
            if (k_opt.has_value() != l_opt.has_value()) throw InputError("give both --k and --l, or neither");
            KlPair p{};
            if (k_opt) {
                p = {*k_opt, *l_opt};
            } else if (auto found = find_minimal_kl(a, default_kmax(a))) {
                p = *found;
            } else {
                throw PreconditionError("no (k,l) pair found for this automaton");
            }
            auto s = build_qds(a, p.k, p.l);
            if (prune) s = prune_unreachable(s);
            write_qds(o, s);
            return 0;
        };
    });

    std::string word;
    bool trace = false;
    auto* c_member = app.add_subcommand("member", "Windowed membership test");
    c_member->add_option("--word", word, "Input word; whitespace-separated when symbols are longer than one character")->required();
    c_member->add_flag("--trace", trace, "Show every window position");
    file_arg(c_member);
    c_member->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto s = detail::load_qds(c, input);
            const auto w = s.alphabet().parse_word(word);
            RunTrace t;
            const auto r = qds_membership(s, w, trace ? &t : nullptr);
            if (trace) detail::write_trace(o, s, w, t, c.porcelain);
            o << (r.accepted ? "ACCEPT" : "REJECT") << " state=" << detail::state_or_bottom(s, r.terminal) << " shifts=" << r.shifts
              << " reads=" << r.reads << '\n';
            return r.accepted ? 0 : 1;
        };
    });

    std::optional<std::string> report_path;
    auto* c_trim = app.add_subcommand("trim", "Remove useless states, edges and finalities");
    c_trim->add_option("--report", report_path,
                       "Also write a TSV of removed components to this file (- for standard output; the structure then goes only to --out)");
    file_arg(c_trim);
    c_trim->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto s = detail::load_qds(c, input);
            const auto t = trim_qds(s);
            if (report_path) {
                std::ostringstream rep;
                detail::write_removed_report(rep, s, compute_useful(s));
                if (*report_path == "-") {
                    c.out << rep.str();
                    if (&o != &c.out) write_qds(o, t);
                    return 0;
                }
                detail::write_file(*report_path, rep.str());
            }
            write_qds(o, t);
            return 0;
        };
    });

    bool as_dot = false, list_states = false;
    auto* c_path = app.add_subcommand("pathdfa", "Accessible part of the path automaton");
    c_path->add_flag("--dot", as_dot, "Graphviz output");
    c_path->add_flag("--states", list_states, "List states instead of transitions");
    file_arg(c_path);
    c_path->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto s = detail::load_qds(c, input);
            const auto d = build_path_dfa(s);
            if (as_dot) {
                write_dot(o, s, d);
                return 0;
            }
            const auto useful = useful_path_states(d);
            if (list_states) {
                o << "state\tfinal\tuseful\n";
                for (std::size_t i = 0; i < d.states.size(); ++i)
                    o << path_dfa_state_name(s, d.states[i]) << '\t' << (d.final[i] ? 1 : 0) << '\t' << (useful[i] ? 1 : 0) << '\n';
                return 0;
            }
            o << "source\tlabel\ttarget\n";
            for (const auto& e : d.transitions)
                o << path_dfa_state_name(s, d.states[e.src]) << '\t'
                  << (d.is_shift(e.symbol) ? "#" + std::to_string(d.shift_of(e.symbol)) : s.alphabet().name(e.symbol)) << '\t'
                  << path_dfa_state_name(s, d.states[e.dst]) << '\n';
            return 0;
        };
    });

    bool classes = false, chain = false;
    auto* c_reduce = app.add_subcommand("reduce", "Quotient by the coarsest computed right-invariant equivalence");
    c_reduce->add_flag("--classes", classes, "Emit the classes as TSV instead of the quotient");
    c_reduce->add_flag("--chain", chain, "Emit the class count of every refinement step as TSV");
    file_arg(c_reduce);
    c_reduce->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto s = detail::load_qds(c, input);
            const auto ch = equiv_chain(s);
            if (chain) {
                o << "step\tclasses\n";
                for (const auto& p : ch) o << p.steps << '\t' << p.num_classes() << '\n';
                return 0;
            }
            const auto& p = ch.back();
            if (classes) {
                o << "class_id\tlayer\tmembers\n";
                for (std::size_t i = 0; i < p.num_classes(); ++i)
                    o << i << '\t' << p.class_layer[i] << '\t' << detail::join_names(s, p.classes[i], ',') << '\n';
                return 0;
            }
            write_qds(o, quotient(s, p));
            return 0;
        };
    });

    auto* c_embed = app.add_subcommand("dfa2qds", "Window-1 structure of a deterministic automaton");
    file_arg(c_embed);
    c_embed->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            write_qds(o, dfa_to_qds(Dfa(detail::load_nfa(c, input))));
            return 0;
        };
    });

    auto* c_det = app.add_subcommand("determinize", "Subset construction (accessible part, no empty subset)");
    file_arg(c_det);
    c_det->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            write_nfa(o, determinize(detail::load_nfa(c, input)).nfa());
            return 0;
        };
    });

    auto* c_minimize = app.add_subcommand("minimize", "Minimal DFA without the sink; nondeterministic input is determinized first");
    file_arg(c_minimize);
    c_minimize->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto a = detail::load_nfa(c, input);
            const auto d = is_deterministic(a) && a.initials().size() == 1 ? Dfa(a) : determinize(a);
            write_nfa(o, minimize_dfa(d).nfa());
            return 0;
        };
    });

    std::optional<std::size_t> emit;
    std::optional<std::string> csv_path;
    std::string emit_dir = ".";
    auto* c_family = app.add_subcommand("family", "Size gap between S_k and the minimal DFA of L_k");
    c_family->add_option("--kmax", kmax, "Largest k in the report")->default_val(8);
    c_family->add_option("--csv", csv_path, "Write the CSV to this file");
    c_family->add_option("--emit", emit, "Write the NFA, minimal DFA and S_k for this k instead");
    c_family->add_option("--dir", emit_dir, "Directory for --emit")->default_val(".");
    c_family->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            if (emit) {
                namespace fs = std::filesystem;
                const auto kk = static_cast<long>(*emit);
                const auto nfa = gen_lk_nfa(kk);
                const fs::path dir(emit_dir);
                std::error_code ec;
                fs::create_directories(dir, ec);
                const std::vector<std::pair<fs::path, std::string>> files{
                    {dir / ("L" + std::to_string(kk) + ".nfa"), to_string(nfa)},
                    {dir / ("L" + std::to_string(kk) + ".min.nfa"), to_string(minimize_dfa(determinize(nfa)).nfa())},
                    {dir / ("S" + std::to_string(kk) + ".qds"), to_string(gen_sk_qds(kk))}};
                for (const auto& [path, text] : files) {
                    detail::write_file(path.string(), text);
                    o << path.string() << '\n';
                }
                return 0;
            }
            const auto rep = gap_report(kmax, c.seed);
            std::ostringstream csv;
            csv << "k,nfa_states,sk_states,dfa_states,sk_after_trim,sk_after_reduce,membership_reads_per_symbol\n";
            for (const auto& r : rep.rows)
                csv << r.k << ',' << r.nfa_states << ',' << r.sk_states << ',' << r.dfa_states << ',' << r.sk_after_trim << ','
                    << r.sk_after_reduce << ',' << std::fixed << std::setprecision(4) << r.membership_reads_per_symbol << '\n';
            if (csv_path)
                detail::write_file(*csv_path, csv.str());
            else
                o << csv.str();
            if (!c.porcelain) {
                if (rep.crossover)
                    c.err << "note: S_k is smaller than the minimal DFA from k=" << *rep.crossover << '\n';
                else
                    c.err << "note: no crossover up to k=" << kmax << '\n';
            }
            return 0;
        };
    });

    auto* c_stats = app.add_subcommand("stats", "Size statistics of an NFA or a structure");
    file_arg(c_stats);
    c_stats->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto text = detail::slurp(input, c.in);
            const auto type = detect_type(text);
            o << "key\tvalue\n";
            if (type == "qds") {
                const auto s = parse_qds(text);
                const auto st = qds_stats(s);
                o << "type\tqds\nm\t" << st.m << "\nstates\t" << st.total_states << "\nlayer_sizes\t";
                for (std::size_t j = 0; j < st.layer_sizes.size(); ++j) o << (j ? "," : "") << st.layer_sizes[j];
                o << "\ndelta_edges\t" << st.delta_edges << "\nmin_shift\t" << (st.min_shift ? std::to_string(*st.min_shift) : "_")
                  << "\nbottom_gammas\t" << st.bottom_gammas << "\nfinals\t" << st.finals << '\n';
                for (const auto& w : lint(s)) c.err << "warning: " << w << '\n';
                return 0;
            }
            const auto a = parse_nfa(text);
            o << "type\tnfa\nstates\t" << a.num_states() << "\ntransitions\t" << a.transitions().size() << "\ninitials\t"
              << a.initials().size() << "\nfinals\t" << a.finals().size() << "\ndeterministic\t" << (is_deterministic(a) ? 1 : 0) << '\n';
            return 0;
        };
    });

    auto* c_dot = app.add_subcommand("dot", "Graphviz export of an NFA or a structure");
    file_arg(c_dot);
    c_dot->callback([&] {
        handler = [&](detail::Context& c, std::ostream& o) {
            const auto text = detail::slurp(input, c.in);
            if (detect_type(text) == "qds")
                write_dot(o, parse_qds(text));
            else
                write_dot(o, parse_nfa(text));
            return 0;
        };
    });

    std::vector<const char*> argv{"klqds"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << " (usage: klqds <subcommand> [options] <input>; see klqds --help)\n";
        return 2;
    }

    try {
        detail::Context ctx{in, out, err};
        ctx.porcelain = porcelain;
        if (seed_text)
            ctx.seed = detail::parse_seed(*seed_text);
        else if (const char* env = std::getenv("KLQDS_SEED"); env && *env)
            ctx.seed = detail::parse_seed(env);
        std::ostringstream buffered;
        const int code = handler(ctx, out_path ? static_cast<std::ostream&>(buffered) : out);
        if (out_path) detail::write_file(*out_path, buffered.str());
        return code;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (auto& ch : msg)
            if (ch == '\n') ch = ' ';
        err << "error: " << msg << '\n';
        return 2;
    }
}

} // namespace klqds::cli
