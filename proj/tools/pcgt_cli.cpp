// Command-line surface: exact decision procedures for the Baumslag-Solitar
// group BS(1,2) and the Baumslag group, power-circuit file operations, and
// the Monte-Carlo experiment runners.
//
// Exit codes: 0 yes/success, 1 no (only with --exit-code), 2 error,
// 3 budget exceeded.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pcgt/estimate.hpp"

using json = nlohmann::json;
using namespace pcgt;

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitError = 2;
constexpr int kExitBudget = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Decision inputs are inline words or @file references.
Word load_word(const std::string& arg, bool allow_stable) {
    if (!arg.empty() && arg[0] == '@') return parse_word(slurp(arg.substr(1)), allow_stable);
    return parse_word(arg, allow_stable);
}

std::string dyadic_str(const Dyadic& d) {
    if (d.is_integer()) return d.to_integer().get_str();
    mpz_class den = 1;
    den <<= -d.exponent();
    return d.mantissa().get_str() + "/" + den.get_str();
}

std::string witness_text(const BetaFactorization& w) {
    ReducedCircuit& c = *w.circuit;
    std::ostringstream out;
    out << "beta-signature:";
    if (w.factors.empty()) out << " (empty)";
    for (const auto& f : w.factors) out << ' ' << (f.bar ? '-' : '+');
    out << '\n';
    std::vector<RawMarking> ms;
    auto push = [&](const std::string& name, const Marking& m) {
        ms.push_back(to_raw_marking(c, m, name));
    };
    push("g0_K", w.head.k);
    push("g0_S", w.head.s);
    push("g0_L", w.head.l);
    for (std::size_t i = 0; i < w.factors.size(); ++i) {
        std::string base = "g" + std::to_string(i + 1) + "_";
        push(base + "K", w.factors[i].gamma.k);
        push(base + "S", w.factors[i].gamma.s);
        push(base + "L", w.factors[i].gamma.l);
    }
    out << serialize(to_raw(c), ms);
    return out.str();
}

struct DecideOptions {
    std::string x, y;
    bool want_witness = false;
    bool as_json = false;
    bool exit_code = false;
    std::uint64_t budget_bits = 1u << 20;
    std::uint64_t seed = 0;
};

int finish_decision(const DecideOptions& o, const std::string& cmd, Decision decision,
                    const std::string& path, const std::string& witness) {
    const char* answer = decision == Decision::Yes  ? "yes"
                         : decision == Decision::No ? "no"
                                                    : "budget-exceeded";
    if (o.as_json) {
        json j;
        j["command"] = cmd;
        j["x"] = o.x;
        j["y"] = o.y;
        j["answer"] = answer;
        if (!path.empty()) j["path"] = path;
        if (!witness.empty()) j["witness"] = witness;
        j["budget_bits"] = o.budget_bits;
        j["seed"] = o.seed;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "# budget-bits=" << o.budget_bits << " seed=" << o.seed << "\n";
        std::cout << "answer: " << answer << "\n";
        if (!path.empty()) std::cout << "path: " << path << "\n";
        if (!witness.empty()) std::cout << "witness:\n" << witness;
    }
    if (decision == Decision::BudgetExceeded) return kExitBudget;
    if (!o.exit_code) return kExitYes;
    return decision == Decision::Yes ? kExitYes : kExitNo;
}

int run_wp(const DecideOptions& o) {
    Word x = load_word(o.x, true);
    Word y = load_word(o.y, true);
    bool eq = word_problem(x, y);
    return finish_decision(o, "wp", eq ? Decision::Yes : Decision::No, "", "");
}

int run_conj(const DecideOptions& o) {
    Word x = load_word(o.x, true);
    Word y = load_word(o.y, true);
    ConjugacyAnswer r = conj_bg(x, y, BigIntBudget(o.budget_bits));
    std::string witness;
    if (o.want_witness && r.decision == Decision::Yes && r.witness) {
        // re-verify before printing; a failing witness is a hard error
        auto xf = beta_factorize(x, r.witness->circuit);
        auto yf = beta_factorize(y, r.witness->circuit);
        auto lhs = bf_concat(bf_concat(*r.witness, xf), bf_invert(*r.witness));
        if (!word_problem(lhs, yf)) throw std::runtime_error("witness failed to verify");
        witness = witness_text(*r.witness);
    }
    return finish_decision(o, "conj", r.decision, conj_path_name(r.path), witness);
}

int run_bs_conj(const DecideOptions& o) {
    BSElement f = eval_word(load_word(o.x, false));
    BSElement g = eval_word(load_word(o.y, false));
    BsConjugacy r = conj_bs12(f, g);
    std::string witness;
    if (o.want_witness && r.decision == Decision::Yes) {
        if (!(bs_conjugate(r.witness, f) == g))
            throw std::runtime_error("witness failed to verify");
        witness = "(" + dyadic_str(r.witness.r) + ", " + std::to_string(r.witness.m) + ")\n";
    }
    return finish_decision(o, "bs-conj", r.decision, "", witness);
}

// ------------------------------------------------------------------ pc

struct PcContext {
    ReducedCircuit circuit;
    std::vector<std::pair<std::string, Marking>> markings;

    const Marking& get(const std::string& name) const {
        for (auto& [n, m] : markings)
            if (n == name) return m;
        throw std::runtime_error("no marking named '" + name + "'");
    }
};

PcContext load_pc(const std::string& path) {
    auto [raw, raw_ms] = parse_circuit(slurp(path));
    auto ri = reduce(raw, raw_ms);
    PcContext ctx;
    ctx.circuit = std::move(ri.circuit);
    for (std::size_t i = 0; i < raw_ms.size(); ++i)
        ctx.markings.push_back({raw_ms[i].name, ri.markings[i]});
    return ctx;
}

void print_pc(PcContext& ctx) {
    std::vector<RawMarking> ms;
    for (auto& [name, m] : ctx.markings)
        ms.push_back(to_raw_marking(ctx.circuit, m, name));
    std::cout << serialize(to_raw(ctx.circuit), ms);
}

int run_pc(const std::string& op, const std::string& file,
           const std::vector<std::string>& names, std::uint64_t budget_bits) {
    BigIntBudget budget(budget_bits);
    auto need = [&](std::size_t n) {
        if (names.size() != n)
            throw std::runtime_error("operation '" + op + "' expects " + std::to_string(n) +
                                     " marking name(s)");
    };
    if (op == "validate") {
        try {
            parse_circuit(slurp(file));
            std::cout << "valid\n";
        } catch (const StructureError&) {
            throw;
        } catch (const CircuitError& e) {
            std::cout << "invalid: " << e.what() << "\n";
        }
        return kExitYes;
    }
    PcContext ctx = load_pc(file);
    ReducedCircuit& c = ctx.circuit;
    if (op == "eval") {
        need(1);
        auto v = c.evaluate(ctx.get(names[0]), budget);
        if (!v) {
            std::cout << "budget-exceeded\n";
            return kExitBudget;
        }
        std::cout << v->get_str() << "\n";
    } else if (op == "cmp") {
        need(2);
        int r = c.compare(ctx.get(names[0]), ctx.get(names[1]));
        std::cout << (r < 0 ? "less" : r > 0 ? "greater" : "equal") << "\n";
    } else if (op == "add") {
        need(2);
        ctx.markings.push_back({"SUM", c.add(ctx.get(names[0]), ctx.get(names[1]))});
        print_pc(ctx);
    } else if (op == "mulpow2") {
        need(2);
        ctx.markings.push_back({"PROD", c.mul_pow2(ctx.get(names[0]), ctx.get(names[1]))});
        print_pc(ctx);
    } else if (op == "odd") {
        need(1);
        auto dec = c.decompose_odd(ctx.get(names[0]));
        ctx.markings.push_back({"X", dec.x});
        ctx.markings.push_back({"U", dec.u});
        print_pc(ctx);
    } else if (op == "divides") {
        need(2);
        auto r = c.divides(ctx.get(names[0]), ctx.get(names[1]), budget);
        if (!r) {
            std::cout << "budget-exceeded\n";
            return kExitBudget;
        }
        std::cout << (*r ? "true" : "false") << "\n";
    } else if (op == "reduce") {
        print_pc(ctx);
    } else {
        throw std::runtime_error("unknown pc operation '" + op + "'");
    }
    return kExitYes;
}

// ------------------------------------------------------------ experiments

std::vector<unsigned> parse_list(const std::string& csv) {
    std::vector<unsigned> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(static_cast<unsigned>(std::stoul(item)));
    return out;
}

struct ExperimentOptions {
    unsigned n_min = 2, n_max = 4;
    std::uint64_t samples = 0; // 0: per-kind default
    std::uint64_t seed = 0;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string group = "bg";
    std::string list;
    std::string out_path;
};

int run_experiment(const std::string& kind, const ExperimentOptions& o) {
    std::ostringstream csv;
    csv << csv_header() << "\n";
    bool all_ok = true;
    auto summarize = [&](const ExperimentReport& r, bool ok, const std::string& what) {
        std::cout << (ok ? "PASS " : "FAIL ") << what << " estimate=" << r.estimate
                  << " ci=[" << r.ci_low << "," << r.ci_high << "] bound=" << r.bound << "\n";
        all_ok = all_ok && ok;
    };

    if (kind == "fig1") {
        std::uint64_t samples = o.samples ? o.samples : 10000000;
        ExperimentReport prev;
        bool have_prev = false;
        for (unsigned n = o.n_min; n <= o.n_max; ++n) {
            auto r = estimate_in_h(Measure::mu_m(2 * n), samples, o.seed, o.workers);
            csv << csv_row(r) << "\n";
            summarize(r, r.ci_high < r.bound, "fig1 n=" + std::to_string(n) + " decay-bound");
            if (have_prev) {
                bool sep = r.ci_high < prev.ci_low;
                summarize(r, sep, "fig1 n=" + std::to_string(n) + " strictly-below-previous");
            }
            prev = r;
            have_prev = true;
        }
    } else if (kind == "pairing") {
        std::uint64_t samples = o.samples ? o.samples : 1000000;
        for (unsigned n = o.n_min; n <= o.n_max; ++n) {
            auto reports = estimate_pairing_bounds(n, samples, o.seed, o.workers);
            for (auto& pr : reports) {
                csv << csv_row(pr.match) << "\n" << csv_row(pr.successful) << "\n";
                double sigma_m = std::sqrt(pr.match.bound * (1 - pr.match.bound) /
                                           double(pr.match.samples));
                bool ok_m = pr.match.estimate <= pr.match.bound + 3 * sigma_m;
                summarize(pr.match, ok_m, "pairing match " + pr.d.brackets);
                bool ok_s = true;
                if (pr.successful.samples > 0) {
                    double sigma_s =
                        std::sqrt(pr.successful.bound * (1 - pr.successful.bound) /
                                  double(pr.successful.samples));
                    ok_s = pr.successful.estimate <= pr.successful.bound + 3 * sigma_s;
                }
                summarize(pr.successful, ok_s, "pairing success " + pr.d.brackets);
            }
        }
    } else if (kind == "backbase") {
        std::uint64_t samples = o.samples ? o.samples : 1000000;
        HnnKind g = o.group == "z2"     ? HnnKind::Z2
                    : o.group == "bs12" ? HnnKind::Bs12OverZ
                                        : HnnKind::Bg;
        if (o.group != "z2" && o.group != "bs12" && o.group != "bg")
            throw std::runtime_error("unknown group '" + o.group + "'");
        if (g == HnnKind::Bg) {
            std::vector<unsigned> ms = parse_list(o.list.empty() ? "50,100,200" : o.list);
            for (unsigned m : ms) {
                auto r = estimate_back_to_base_conditional(g, m, samples, o.seed, o.workers);
                csv << csv_row(r) << "\n";
                summarize(r, r.estimate <= r.bound, "backbase bg m=" + std::to_string(m));
            }
        } else {
            std::vector<unsigned> ns = parse_list(o.list.empty() ? "100,400,1600" : o.list);
            for (unsigned n : ns) {
                auto r = estimate_back_to_base(g, n, samples, o.seed, o.workers);
                csv << csv_row(r) << "\n";
                summarize(r, r.estimate > 0, "backbase " + o.group + " n=" + std::to_string(n));
            }
        }
    } else {
        throw std::runtime_error("unknown experiment '" + kind + "'");
    }

    if (o.out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(o.out_path, std::ios::binary);
        f << csv.str();
        std::cout << "# csv written to " << o.out_path << "\n";
    }
    return all_ok ? kExitYes : kExitNo;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact arithmetic and decision procedures for BS(1,2) and the Baumslag group"};
    app.require_subcommand(1);

    DecideOptions dec;
    auto add_decide_flags = [&](CLI::App* cmd, bool witness_flag) {
        cmd->add_option("x", dec.x, "first word (or @file)")->required();
        cmd->add_option("y", dec.y, "second word (or @file)")->required();
        cmd->add_flag("--json", dec.as_json, "machine-readable report");
        cmd->add_flag("--exit-code", dec.exit_code, "exit 0 on yes, 1 on no");
        cmd->add_option("--budget", dec.budget_bits, "bit budget for expansions");
        if (witness_flag) cmd->add_flag("--witness", dec.want_witness, "print a conjugator");
    };

    auto* wp = app.add_subcommand("wp", "word problem in the Baumslag group");
    add_decide_flags(wp, false);
    auto* conj = app.add_subcommand("conj", "conjugacy in the Baumslag group");
    add_decide_flags(conj, true);
    auto* bs = app.add_subcommand("bs-conj", "conjugacy in BS(1,2)");
    add_decide_flags(bs, true);

    std::string pc_op, pc_file;
    std::vector<std::string> pc_names;
    std::uint64_t pc_budget = 1u << 20;
    auto* pc = app.add_subcommand("pc", "power-circuit file operations");
    pc->add_option("op", pc_op, "validate|eval|add|cmp|mulpow2|odd|divides|reduce")->required();
    pc->add_option("file", pc_file, "circuit file in pc v1 format")->required();
    pc->add_option("markings", pc_names, "marking names for the operation");
    pc->add_option("--budget", pc_budget, "bit budget for expansions");

    unsigned blowup_n = 0;
    auto* blow = app.add_subcommand("blowup", "emit the n-th tower word");
    blow->add_option("n", blowup_n, "index (word length 2^{n+2}-3)")->required();

    std::string div_file, div_m = "M", div_s = "S";
    std::uint64_t div_budget = 1u << 20;
    auto* divcase = app.add_subcommand("divcase", "division-to-conjugacy word pair");
    divcase->add_option("file", div_file, "circuit file in pc v1 format")->required();
    divcase->add_option("m", div_m, "marking name for the divisor")->required();
    divcase->add_option("s", div_s, "marking name for the dividend exponent")->required();
    divcase->add_option("--budget", div_budget, "bit budget for the conjugacy test");

    ExperimentOptions eo;
    std::string exp_kind;
    auto* exp = app.add_subcommand("experiment", "Monte-Carlo experiment runners");
    exp->add_option("kind", exp_kind, "fig1|pairing|backbase")->required();
    exp->add_option("--n-min", eo.n_min, "smallest n");
    exp->add_option("--n-max", eo.n_max, "largest n");
    exp->add_option("--samples", eo.samples, "samples per data point");
    exp->add_option("--seed", eo.seed, "base seed");
    exp->add_option("--workers", eo.workers, "worker threads");
    exp->add_option("--group", eo.group, "z2|bs12|bg (backbase only)");
    exp->add_option("--list", eo.list, "comma list of n (or m) values for backbase");
    exp->add_option("--out", eo.out_path, "write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
        if (*wp) return run_wp(dec);
        if (*conj) return run_conj(dec);
        if (*bs) return run_bs_conj(dec);
        if (*pc) return run_pc(pc_op, pc_file, pc_names, pc_budget);
        if (*blow) {
            std::cout << word_to_string(blowup_word(blowup_n)) << "\n";
            return kExitYes;
        }
        if (*divcase) {
            PcContext ctx = load_pc(div_file);
            auto [x, y] = division_to_conjugacy(ctx.circuit, ctx.get(div_m), ctx.get(div_s));
            std::cout << "x: " << word_to_string(x) << "\n";
            std::cout << "y: " << word_to_string(y) << "\n";
            auto r = conj_bg(x, y, BigIntBudget(div_budget));
            if (r.decision == Decision::BudgetExceeded) {
                std::cout << "answer: budget-exceeded\n";
                return kExitBudget;
            }
            std::cout << "answer: " << (r.decision == Decision::Yes ? "yes" : "no") << "\n";
            return kExitYes;
        }
        if (*exp) return run_experiment(exp_kind, eo);
        return kExitError;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
