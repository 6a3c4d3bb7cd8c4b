#include <doctest.h>

#include "pcgt/power_circuit.hpp"
#include "support.hpp"

using namespace pcgt;
using pcgt::testing::marking_value;
using pcgt::testing::random_circuit;
using pcgt::testing::random_marking;

namespace {

const BigIntBudget kBig(1u << 20);
const BigIntBudget kSmall(4096);

struct Inst {
    ReducedCircuit c;
    std::vector<Marking> m;
};

Inst reduced(const RawCircuit& raw, const std::vector<RawMarking>& ms) {
    auto ri = reduce(raw, ms);
    return {std::move(ri.circuit), std::move(ri.markings)};
}

Inst merged(std::initializer_list<std::pair<const RawCircuit*, const RawMarking*>> parts) {
    std::vector<const RawCircuit*> cs;
    for (auto& [c, m] : parts) cs.push_back(c);
    std::vector<std::uint32_t> offsets;
    RawCircuit all = merge(cs, offsets);
    std::vector<RawMarking> ms;
    std::size_t idx = 0;
    for (auto& [c, m] : parts) {
        RawMarking shifted = *m;
        for (auto& [q, s] : shifted.digits) q += offsets[idx];
        ms.push_back(shifted);
        ++idx;
    }
    return reduced(all, ms);
}

} // namespace

namespace {
mpz_class random_value(Rng& rng, unsigned bits) {
    mpz_class v = 0;
    for (unsigned b = 0; b < bits; b += 64) v = (v << 64) + rng.next();
    v >>= (64 - bits % 64) % 64;
    return v;
}
} // namespace

TEST_CASE("validate: basic shapes") {
    RawCircuit leaf;
    leaf.add_node();
    CHECK(validate(leaf, {}));

    // arc P -> Q with sign -1: successor value -1 is negative
    RawCircuit neg;
    neg.add_node();
    neg.add_node({{0, -1}});
    CHECK_FALSE(validate(neg, {}));

    auto [chain, chain_m] = tower(4);
    CHECK(validate(chain, {chain_m}));

    RawCircuit dangling;
    dangling.add_node({{7, 1}});
    CHECK_THROWS_AS(validate(dangling, {}), StructureError);

    RawCircuit cyc;
    cyc.add_node({{1, 1}});
    cyc.add_node({{0, 1}});
    CHECK_FALSE(validate(cyc, {}));
}

TEST_CASE("evaluate: chains and budget") {
    auto [raw, m] = tower(5);
    Inst in = reduced(raw, {m});
    auto v = in.c.evaluate(in.m[0], kBig);
    REQUIRE(v);
    CHECK(*v == 65536);

    CHECK(*in.c.evaluate(Marking{}, kBig) == 0);

    auto [raw30, m30] = tower(30);
    Inst in30 = reduced(raw30, {m30});
    CHECK_FALSE(in30.c.evaluate(in30.m[0], kSmall));
}

TEST_CASE("tower: realizes tow(n) with max(n,1) nodes") {
    // tow: 0, 1, 2, 4, 16, 65536, ...
    long expected[] = {0, 1, 2, 4, 16, 65536};
    for (unsigned n = 0; n <= 5; ++n) {
        auto [raw, m] = tower(n);
        CHECK(raw.size() == std::max(n, 1u));
        Inst in = reduced(raw, {m});
        CHECK(*in.c.evaluate(in.m[0], kBig) == expected[n]);
    }
    // tow(6) = 2^65536 without expansion: cross-check against from_int
    auto [t6, t6m] = tower(6);
    mpz_class big = 1;
    big <<= 65536;
    auto [f, fm] = from_int(big);
    Inst in = merged({{&t6, &t6m}, {&f, &fm}});
    CHECK(in.c.compare(in.m[0], in.m[1]) == 0);
}

TEST_CASE("from_int: binary basis") {
    auto [z, zm] = from_int(0);
    CHECK(zm.digits.empty());

    auto [f, fm] = from_int(-5);
    Inst in = reduced(f, {fm});
    CHECK(*in.c.evaluate(in.m[0], kBig) == -5);

    mpz_class p100 = 1;
    p100 <<= 100;
    auto [g, gm] = from_int(p100);
    CHECK(g.size() <= 101);
    Inst in2 = reduced(g, {gm});
    CHECK(*in2.c.evaluate(in2.m[0], kBig) == p100);
}

TEST_CASE("reduce: canonical form preserves evaluation") {
    // two duplicate leaves, marking +1 on each
    RawCircuit dup;
    dup.add_node();
    dup.add_node();
    RawMarking m;
    m.name = "M";
    m.digits = {{0, 1}, {1, 1}};
    Inst in = reduced(dup, {m});
    CHECK(*in.c.evaluate(in.m[0], kBig) == 2);

    auto [raw12, m12] = from_int(12);
    Inst in12 = reduced(raw12, {m12});
    CHECK(*in12.c.evaluate(in12.m[0], kBig) == 12);

    auto [t4, t4m] = tower(4);
    Inst in4 = reduced(t4, {t4m});
    CHECK(in4.c.node_count() == 4);
}

TEST_CASE("compare: no expansion needed") {
    auto [t5, t5m] = tower(5);
    auto [f, fm] = from_int(65535);
    Inst in = merged({{&t5, &t5m}, {&f, &fm}});
    CHECK(in.c.compare(in.m[0], in.m[1]) > 0);
    CHECK(in.c.compare(in.m[0], in.m[0]) == 0);

    auto [a, am] = from_int(-3);
    auto [b, bm] = from_int(2);
    Inst in2 = merged({{&a, &am}, {&b, &bm}});
    CHECK(in2.c.compare(in2.m[0], in2.m[1]) < 0);
}

TEST_CASE("add: examples") {
    auto [a, am] = from_int(3);
    auto [b, bm] = from_int(5);
    Inst in = merged({{&a, &am}, {&b, &bm}});
    Marking sum = in.c.add(in.m[0], in.m[1]);
    CHECK(*in.c.evaluate(sum, kBig) == 8);

    auto [t4, t4m] = tower(4);
    Inst in4 = reduced(t4, {t4m});
    Marking zero = in4.c.sub(in4.m[0], in4.m[0]);
    CHECK(in4.c.sign(zero) == 0);
}

TEST_CASE("mul_pow2: examples") {
    auto [a, am] = from_int(3);
    auto [b, bm] = from_int(5);
    Inst in = merged({{&a, &am}, {&b, &bm}});
    Marking prod = in.c.mul_pow2(in.m[0], in.m[1]);
    CHECK(*in.c.evaluate(prod, kBig) == 40);

    Marking ident = in.c.mul_pow2(Marking{}, in.m[1]);
    CHECK(in.c.compare(ident, in.m[1]) == 0);

    // 2^{tow(4)} * 1 has the value of tower(5)
    auto [t4, t4m] = tower(4);
    auto [t5, t5m] = tower(5);
    Inst in2 = merged({{&t4, &t4m}, {&t5, &t5m}});
    Marking shifted = in2.c.mul_pow2(in2.m[0], in2.c.unit());
    CHECK(in2.c.compare(shifted, in2.m[1]) == 0);

    auto [n, nm] = from_int(-1);
    Inst in3 = reduced(n, {nm});
    CHECK_THROWS_AS(in3.c.mul_pow2(in3.m[0], in3.c.unit()), CircuitError);
}

TEST_CASE("decompose_odd: examples") {
    auto check = [&](long value, long want_x, long want_u) {
        auto [raw, m] = from_int(value);
        Inst in = reduced(raw, {m});
        auto dec = in.c.decompose_odd(in.m[0]);
        CHECK(*in.c.evaluate(dec.x, kBig) == want_x);
        CHECK(*in.c.evaluate(dec.u, kBig) == want_u);
        // recomposition
        Marking back = in.c.mul_pow2(dec.x, dec.u);
        CHECK(in.c.compare(back, in.m[0]) == 0);
    };
    check(12, 2, 3);
    check(-8, 3, -1);

    ReducedCircuit c;
    auto dec = c.decompose_odd(Marking{});
    CHECK(dec.x.empty());
    CHECK(dec.u.empty());
}

TEST_CASE("divides: examples and budget cutoff") {
    auto [a, am] = from_int(3);
    auto [b, bm] = from_int(12);
    Inst in = merged({{&a, &am}, {&b, &bm}});
    CHECK(*in.c.divides(in.m[0], in.m[1], kSmall) == true);

    auto [x, xm] = from_int(2);
    auto [y, ym] = from_int(3);
    Inst in2 = merged({{&x, &xm}, {&y, &ym}});
    CHECK(*in2.c.divides(in2.m[0], in2.m[1], kSmall) == false);

    auto [t20, t20m] = tower(20);
    auto [s, sm] = from_int(6);
    Inst in3 = merged({{&t20, &t20m}, {&s, &sm}});
    CHECK_FALSE(in3.c.divides(in3.m[0], in3.m[1], kSmall)); // budget exceeded

    ReducedCircuit c;
    CHECK_THROWS_AS(c.divides(Marking{}, c.unit(), kSmall), CircuitError);
}

TEST_CASE("merge: disjoint union") {
    auto [a, am] = from_int(3);
    std::vector<std::uint32_t> off;
    RawCircuit one = merge({&a}, off);
    CHECK(one.size() == a.size());

    auto [b, bm] = from_int(5);
    RawCircuit both = merge({&a, &b}, off);
    CHECK(both.size() == a.size() + b.size());
}

TEST_CASE("property: operations agree with integer arithmetic") {
    Rng rng(2024, 1);
    int checked = 0;
    for (int iter = 0; iter < 400; ++iter) {
        auto rc = random_circuit(rng, 8, 600);
        RawMarking m1 = random_marking(rng, rc, "M1");
        RawMarking m2 = random_marking(rng, rc, "M2");
        mpz_class v1 = marking_value(rc, m1);
        mpz_class v2 = marking_value(rc, m2);
        Inst in = reduced(rc.raw, {m1, m2});
        ReducedCircuit& c = in.c;

        // reduction preserved evaluation
        REQUIRE(*c.evaluate(in.m[0], kBig) == v1);
        REQUIRE(*c.evaluate(in.m[1], kBig) == v2);

        // sign of a marking = sign of its top node
        int sgn1 = v1 == 0 ? 0 : (v1 > 0 ? 1 : -1);
        REQUIRE(c.sign(in.m[0]) == sgn1);

        // comparison
        int cc = c.compare(in.m[0], in.m[1]);
        REQUIRE(cc == (v1 == v2 ? 0 : (v1 < v2 ? -1 : 1)));

        // addition / subtraction
        REQUIRE(*c.evaluate(c.add(in.m[0], in.m[1]), kBig) == v1 + v2);
        REQUIRE(*c.evaluate(c.sub(in.m[0], in.m[1]), kBig) == v1 - v2);

        // 2^{v1} * v2 when v1 >= 0 and small enough to verify
        if (v1 >= 0 && v1 <= 512) {
            mpz_class want = v2 << v1.get_ui();
            REQUIRE(*c.evaluate(c.mul_pow2(in.m[0], in.m[1]), kBig) == want);
        }

        // odd decomposition
        auto dec = c.decompose_odd(in.m[0]);
        if (v1 == 0) {
            REQUIRE(dec.x.empty());
            REQUIRE(dec.u.empty());
        } else {
            mpz_class odd = v1;
            unsigned long tz = mpz_scan1(odd.get_mpz_t(), 0);
            odd >>= tz;
            REQUIRE(*c.evaluate(dec.x, kBig) == tz);
            REQUIRE(*c.evaluate(dec.u, kBig) == odd);
            REQUIRE(c.compare(c.mul_pow2(dec.x, dec.u), in.m[0]) == 0);
        }

        // divisibility
        if (v1 != 0) {
            bool want = mpz_divisible_p(v2.get_mpz_t(), v1.get_mpz_t()) != 0;
            REQUIRE(*c.divides(in.m[0], in.m[1], kBig) == want);
        }
        ++checked;
    }
    CHECK(checked == 400);
}

TEST_CASE("property: reduction growth and quadratic work envelope") {
    // reduce adds at most the guaranteed leaf plus carry nodes
    Rng rng(61, 2);
    for (int i = 0; i < 500; ++i) {
        auto rc = random_circuit(rng, 10, 600);
        RawMarking m = random_marking(rng, rc, "M");
        auto ri = reduce(rc.raw, {m});
        CHECK(ri.circuit.node_count() <= 2 * rc.raw.size() + 2);
    }

    // node-touch work of one addition stays quadratic in the circuit size
    for (unsigned bits : {256u, 1024u, 4096u}) {
        Rng r2(62, bits);
        mpz_class v1 = random_value(r2, bits), v2 = random_value(r2, bits);
        auto [a, am] = from_int(v1);
        auto [b, bm] = from_int(v2);
        std::vector<const RawCircuit*> cs = {&a, &b};
        std::vector<std::uint32_t> off;
        RawCircuit all = merge(cs, off);
        RawMarking m2 = bm;
        for (auto& [q, s] : m2.digits) q += off[1];
        auto ri = reduce(all, {am, m2});
        double n = double(ri.circuit.node_count());
        ri.circuit.reset_work();
        Marking sum = ri.circuit.add(ri.markings[0], ri.markings[1]);
        CHECK(double(ri.circuit.work()) <= n * n);
        BigIntBudget budget(8192);
        CHECK(*ri.circuit.evaluate(sum, budget) == v1 + v2);
    }
}

TEST_CASE("property: random pair addition below 2^4096") {
    Rng rng(99, 7);
    for (int iter = 0; iter < 1000; ++iter) {
        // random values up to 4096 bits
        unsigned bits1 = 1 + static_cast<unsigned>(rng.below(4095));
        unsigned bits2 = 1 + static_cast<unsigned>(rng.below(4095));
        mpz_class v1 = 0, v2 = 0;
        for (unsigned b = 0; b < bits1; b += 64) v1 = (v1 << 64) + rng.next();
        for (unsigned b = 0; b < bits2; b += 64) v2 = (v2 << 64) + rng.next();
        v1 >>= (64 - bits1 % 64) % 64;
        v2 >>= (64 - bits2 % 64) % 64;
        if (rng.coin()) v1 = -v1;
        if (rng.coin()) v2 = -v2;

        auto [a, am] = from_int(v1);
        auto [b, bm] = from_int(v2);
        Inst in = merged({{&a, &am}, {&b, &bm}});
        Marking sum = in.c.add(in.m[0], in.m[1]);
        BigIntBudget budget(8192);
        REQUIRE(*in.c.evaluate(sum, budget) == v1 + v2);
    }
}
