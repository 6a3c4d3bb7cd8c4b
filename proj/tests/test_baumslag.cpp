#include <doctest.h>

#include "pcgt/baumslag.hpp"
#include "pcgt/rng.hpp"

using namespace pcgt;

namespace {

const BigIntBudget kBig(1u << 20);

BetaFactorization parse_bf(const std::string& s, std::shared_ptr<ReducedCircuit> c = nullptr) {
    return beta_factorize(parse_word(s, true), std::move(c));
}

// no factor b gamma b^-1 with gamma in <a> and no b^-1 gamma b with gamma in <t>
bool admits_no_pinch(const BetaFactorization& z) {
    ReducedCircuit& c = *z.circuit;
    for (std::size_t i = 0; i + 1 < z.factors.size(); ++i) {
        if (z.factors[i].bar == z.factors[i + 1].bar) continue;
        if (!z.factors[i].bar && pc_in_a_subgroup(c, z.factors[i].gamma)) return false;
        if (z.factors[i].bar && pc_in_t_subgroup(c, z.factors[i].gamma)) return false;
    }
    return true;
}

Word random_word(Rng& rng, std::size_t len) {
    static const char letters[] = {'a', 'A', 't', 'T', 'b', 'B'};
    Word w;
    for (std::size_t i = 0; i < len; ++i) w.push_back(letters[rng.below(6)]);
    return w;
}

} // namespace

TEST_CASE("beta factorization splits at stable letters") {
    auto f = parse_bf("b a B");
    CHECK(f.beta_length() == 2);
    CHECK(pc_is_identity(*f.circuit, f.head));
    CHECK_FALSE(f.factors[0].bar);
    CHECK(f.factors[1].bar);
    CHECK(pc_equal(*f.circuit, f.factors[0].gamma,
                   pc_from_element(*f.circuit, BSElement{Dyadic(1, 0), 0})));

    auto g = parse_bf("a t");
    CHECK(g.beta_length() == 0);
    CHECK(pc_equal(*g.circuit, g.head, pc_from_element(*g.circuit, BSElement{Dyadic(1, 0), 1})));

    auto e = parse_bf("");
    CHECK(e.beta_length() == 0);
    CHECK(pc_is_identity(*e.circuit, e.head));
}

TEST_CASE("britton reduction: pinch rules") {
    auto check_reduces_to = [&](const std::string& in, const BSElement& want) {
        auto f = britton_reduce(parse_bf(in));
        REQUIRE(f.beta_length() == 0);
        CHECK(pc_equal(*f.circuit, f.head, pc_from_element(*f.circuit, want)));
    };
    check_reduces_to("b a B", BSElement{Dyadic(0, 0), 1});   // t
    check_reduces_to("B t b", BSElement{Dyadic(1, 0), 0});   // a
    check_reduces_to("b a a B", BSElement{Dyadic(0, 0), 2}); // t^2
    check_reduces_to("b B", bs_identity());

    // non-pinchable stays put
    auto f = britton_reduce(parse_bf("b t B"));
    CHECK(f.beta_length() == 2);
    CHECK(admits_no_pinch(f));
}

TEST_CASE("britton reduction output admits no pinch (random words)") {
    Rng rng(21, 1);
    for (int i = 0; i < 300; ++i) {
        auto f = britton_reduce(parse_bf(word_to_string(random_word(rng, 24))));
        CHECK(admits_no_pinch(f));
    }
}

TEST_CASE("cyclic reduction") {
    auto c = make_circuit();
    auto f = parse_bf("b t b t", c); // already cyclically reduced
    auto cr = cyclically_reduce(f);
    CHECK(cr.reduced.beta_length() == 2);
    CHECK(bf_is_identity(cr.conjugator));

    // b t B is britton-reduced but not cyclically reduced: conjugate to t
    auto h = cyclically_reduce(parse_bf("b t B"));
    CHECK(h.reduced.beta_length() == 0);
    CHECK(pc_equal(*h.reduced.circuit, h.reduced.head,
                   pc_from_element(*h.reduced.circuit, BSElement{Dyadic(0, 0), 1})));

    // freely reducible word drops to the base group
    auto g = cyclically_reduce(parse_bf("B b a"));
    CHECK(g.reduced.beta_length() == 0);
    CHECK(pc_equal(*g.reduced.circuit, g.reduced.head,
                   pc_from_element(*g.reduced.circuit, BSElement{Dyadic(1, 0), 0})));

    // conjugator verification: u z u^-1 == reduced
    auto c2 = make_circuit();
    auto z = parse_bf("a b t B A", c2);
    auto cr2 = cyclically_reduce(z);
    auto lhs = bf_concat(bf_concat(cr2.conjugator, z), bf_invert(cr2.conjugator));
    CHECK(word_problem(lhs, cr2.reduced));
    // and the reduced form is cyclically reduced: its square is reduced
    auto sq = britton_reduce(bf_concat(cr2.reduced, cr2.reduced));
    CHECK(sq.beta_length() == 2 * cr2.reduced.beta_length());
}

TEST_CASE("cyclic reduction conjugator on random words") {
    Rng rng(22, 2);
    for (int i = 0; i < 120; ++i) {
        auto z = parse_bf(word_to_string(random_word(rng, 18)));
        auto cr = cyclically_reduce(z);
        auto lhs = bf_concat(bf_concat(cr.conjugator, z), bf_invert(cr.conjugator));
        CHECK(word_problem(lhs, cr.reduced));
        if (!cr.reduced.factors.empty()) {
            auto sq = britton_reduce(bf_concat(cr.reduced, cr.reduced));
            CHECK(sq.beta_length() == 2 * cr.reduced.beta_length());
        }
    }
}

TEST_CASE("word problem basics") {
    CHECK(word_problem(parse_word("b a B", true), parse_word("t", true)));
    CHECK_FALSE(word_problem(parse_word("a", true), parse_word("t", true)));
    CHECK(word_problem(parse_word("b b t a T B a b t A T B B", true),
                       parse_word("t t t t", true)));
    CHECK(word_problem(blowup_word(2), parse_word("t t t t", true)));
}

TEST_CASE("word problem: insert-pinch invariance") {
    Rng rng(23, 3);
    for (int i = 0; i < 80; ++i) {
        Word w = random_word(rng, 16);
        // insert (b a^e B) t^-e at a random position; the insert is trivial
        long e = static_cast<long>(rng.below(7)) - 3;
        Word ins;
        ins.push_back('b');
        for (long k = 0; k < std::labs(e); ++k) ins.push_back(e >= 0 ? 'a' : 'A');
        ins.push_back('B');
        for (long k = 0; k < std::labs(e); ++k) ins.push_back(e >= 0 ? 'T' : 't');
        std::size_t pos = rng.below(w.size() + 1);
        Word w2(w.begin(), w.begin() + pos);
        w2.insert(w2.end(), ins.begin(), ins.end());
        w2.insert(w2.end(), w.begin() + pos, w.end());
        CHECK(word_problem(w, w2));
    }
}

TEST_CASE("beta signature is independent of the reduction route") {
    Rng rng(24, 4);
    for (int i = 0; i < 60; ++i) {
        Word w = random_word(rng, 20);
        auto c = make_circuit();
        auto direct = britton_reduce(beta_factorize(w, c));
        // another route: multiply by u u^-1 first, then reduce
        Word u = random_word(rng, 8);
        auto detour = bf_concat(beta_factorize(w, c),
                                bf_concat(beta_factorize(u, c),
                                          bf_invert(beta_factorize(u, c))));
        auto reduced = britton_reduce(detour);
        CHECK(beta_signature(direct) == beta_signature(reduced));
    }
}

TEST_CASE("blowup words evaluate to tower exponents") {
    CHECK(word_to_string(blowup_word(0)) == "t");
    CHECK(word_to_string(blowup_word(1)) == "btaTB");
    for (unsigned n = 0; n <= 8; ++n)
        CHECK(blowup_word(n).size() == (std::size_t{1} << (n + 2)) - 3);

    for (unsigned n = 0; n <= 6; ++n) {
        auto c = make_circuit();
        auto xf = beta_factorize(blowup_word(n), c);
        auto tf = bf_from_triple(c, pc_t_power(*c, tower_marking(*c, n + 1)));
        CHECK(word_problem(xf, tf));
        auto wrong = bf_from_triple(
            c, pc_t_power(*c, c->add(tower_marking(*c, n + 1), c->unit())));
        CHECK_FALSE(word_problem(xf, wrong));
    }
    CHECK_THROWS_AS(blowup_word(30, 1u << 20), std::invalid_argument);
}

TEST_CASE("britton reduction keeps the circuit linear in the input") {
    // tower words: exponential word length collapses onto a linear chain
    for (unsigned n = 4; n <= 9; ++n) {
        auto c = make_circuit();
        auto f = beta_factorize(blowup_word(n), c);
        std::size_t before = c->node_count();
        auto r = britton_reduce(f);
        CHECK(r.beta_length() == 0);
        CHECK(c->node_count() <= before + n + 2);
    }
    // random words: growth bounded linearly by the factor count
    Rng rng(63, 1);
    for (int i = 0; i < 200; ++i) {
        Word w = random_word(rng, 60);
        auto c = make_circuit();
        auto f = beta_factorize(w, c);
        std::size_t before = c->node_count();
        britton_reduce(f);
        CHECK(c->node_count() <= before + 4 * w.size());
    }
}

TEST_CASE("conjugate_by") {
    Word x = parse_word("b a B t", true);
    auto direct = conjugate_by(parse_word("", true), x);
    CHECK(word_problem(direct, beta_factorize(x, direct.circuit)));

    Word z = parse_word("a b", true);
    auto conj = conjugate_by(z, x);
    // x and its conjugate are conjugate but not equal here
    CHECK_FALSE(word_problem(conj, beta_factorize(x, conj.circuit)));
    CHECK(conj_bg(beta_factorize(x, conj.circuit), conj, kBig).decision == Decision::Yes);

    // inverse actions compose to the identity action
    auto inner = conjugate_by(invert_word(z), x);
    auto zf = beta_factorize(z, inner.circuit);
    auto outer = britton_reduce(bf_concat(bf_concat(zf, inner), bf_invert(zf)));
    CHECK(word_problem(outer, beta_factorize(x, inner.circuit)));
}

TEST_CASE("division-to-conjugacy preconditions") {
    ReducedCircuit c;
    CHECK_THROWS_AS(division_to_conjugacy(c, Marking{}, c.unit()), std::invalid_argument);
    CHECK_THROWS_AS(division_to_conjugacy(c, c.constant(-2), c.unit()), std::invalid_argument);
}

TEST_CASE("conjugacy core: examples") {
    auto c = make_circuit();
    auto x = cyclically_reduce(parse_bf("B a t", c)).reduced;
    auto y = cyclically_reduce(parse_bf("B A A t t", c)).reduced;
    auto r = conj_bg_core(x, y);
    REQUIRE(r.decision == Decision::Yes);
    CHECK(r.path == ConjPath::BtSingle);
    auto lhs = bf_concat(bf_concat(*r.witness, x), bf_invert(*r.witness));
    CHECK(word_problem(lhs, y));

    auto rr = conj_bg_core(x, x);
    CHECK(rr.decision == Decision::Yes);

    auto y2 = cyclically_reduce(parse_bf("B a a t", c)).reduced;
    CHECK(conj_bg_core(x, y2).decision == Decision::No);
}

TEST_CASE("conjugacy dispatcher: base-group paths") {
    auto yes = conj_bg(parse_word("a", true), parse_word("a a", true), kBig);
    CHECK(yes.decision == Decision::Yes);
    CHECK(yes.path == ConjPath::HDirect);

    auto verdi = conj_bg(parse_word("t t t", true), parse_word("t t t t t t", true), kBig);
    CHECK(verdi.decision == Decision::Yes);
    CHECK(verdi.path == ConjPath::HPower);

    auto no = conj_bg(parse_word("t t t", true), parse_word("t t t t t", true), kBig);
    CHECK(no.decision == Decision::No);

    auto id = conj_bg(parse_word("", true), parse_word("b B", true), kBig);
    CHECK(id.decision == Decision::Yes);

    auto id_no = conj_bg(parse_word("", true), parse_word("a", true), kBig);
    CHECK(id_no.decision == Decision::No);
}

TEST_CASE("conjugacy dispatcher: random conjugates answer yes") {
    Rng rng(25, 5);
    for (int i = 0; i < 60; ++i) {
        Word x = random_word(rng, 1 + rng.below(20));
        Word z = random_word(rng, rng.below(8));
        Word zxz = z;
        zxz.insert(zxz.end(), x.begin(), x.end());
        Word zi = invert_word(z);
        zxz.insert(zxz.end(), zi.begin(), zi.end());
        auto r = conj_bg(x, zxz, kBig);
        REQUIRE(r.decision == Decision::Yes);
    }
}

TEST_CASE("conjugacy dispatcher: symmetry and transpositions") {
    Rng rng(26, 6);
    for (int i = 0; i < 40; ++i) {
        Word x = random_word(rng, 1 + rng.below(14));
        Word y = random_word(rng, 1 + rng.below(14));
        auto d1 = conj_bg(x, y, kBig);
        auto d2 = conj_bg(y, x, kBig);
        CHECK(d1.decision == d2.decision);
    }
    for (int i = 0; i < 10; ++i) {
        Word x = random_word(rng, 2 + rng.below(12));
        for (std::size_t cut = 1; cut < x.size(); ++cut) {
            Word rot(x.begin() + cut, x.end());
            rot.insert(rot.end(), x.begin(), x.begin() + cut);
            auto r = conj_bg(x, rot, kBig);
            REQUIRE(r.decision == Decision::Yes);
        }
    }
}

TEST_CASE("no-answers survive bounded conjugator enumeration") {
    // all conjugators up to length 3
    static const char L[] = {'a', 'A', 't', 'T', 'b', 'B'};
    std::vector<Word> conjugators = {{}};
    std::size_t lo = 0;
    for (int len = 1; len <= 3; ++len) {
        std::size_t hi = conjugators.size();
        for (std::size_t i = lo; i < hi; ++i)
            for (char c : L) {
                Word e = conjugators[i];
                e.push_back(c);
                conjugators.push_back(e);
            }
        lo = hi;
    }

    auto check_no = [&](const Word& x, const Word& y) {
        auto circ = make_circuit();
        auto yf = beta_factorize(y, circ);
        for (auto& z : conjugators) {
            Word zxz = z;
            zxz.insert(zxz.end(), x.begin(), x.end());
            Word zi = invert_word(z);
            zxz.insert(zxz.end(), zi.begin(), zi.end());
            if (word_problem(beta_factorize(zxz, circ), yf)) return false;
        }
        return true;
    };

    // the distinct-class pair with matching signatures
    CHECK(conj_bg(parse_word("B a t", true), parse_word("B a a t", true), kBig).decision ==
          Decision::No);
    CHECK(check_no(parse_word("B a t", true), parse_word("B a a t", true)));

    Rng rng(27, 7);
    int nos = 0;
    for (int i = 0; i < 200 && nos < 25; ++i) {
        Word x = random_word(rng, 1 + rng.below(6));
        Word y = random_word(rng, 1 + rng.below(6));
        auto r = conj_bg(x, y, kBig);
        if (r.decision != Decision::No) continue;
        ++nos;
        CHECK(check_no(x, y));
    }
    CHECK(nos > 0);
}

TEST_CASE("division reduces to conjugacy") {
    for (long m = 1; m <= 6; ++m) {
        for (long s = 1; s <= 6; ++s) {
            ReducedCircuit c;
            Marking mm = c.constant(m);
            Marking sm = c.constant(s);
            auto [x, y] = division_to_conjugacy(c, mm, sm);
            auto r = conj_bg(x, y, kBig);
            CHECK(r.decision == (s % m == 0 ? Decision::Yes : Decision::No));
        }
    }
}
