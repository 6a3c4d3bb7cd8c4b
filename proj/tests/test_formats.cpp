#include <doctest.h>

#include "pcgt/power_circuit.hpp"

using namespace pcgt;

TEST_CASE("pc text round-trip preserves values") {
    auto [raw, m] = tower(4);
    std::string text = serialize(raw, {m});
    auto [raw2, ms2] = parse_circuit(text);
    REQUIRE(ms2.size() == 1);
    auto a = reduce(raw, {m});
    auto b = reduce(raw2, {ms2[0]});
    BigIntBudget budget(1u << 20);
    CHECK(*a.circuit.evaluate(a.markings[0], budget) ==
          *b.circuit.evaluate(b.markings[0], budget));
}

TEST_CASE("pc parser rejects bad input with line numbers") {
    CHECK_THROWS_WITH_AS(parse_circuit("pc v1\nnode x: +y\n"),
                         doctest::Contains("line 2"), StructureError);
    // two-cycle
    CHECK_THROWS_AS(parse_circuit("pc v1\nnode x: +y\nnode y: +x\n"), CircuitError);
    // marking on undeclared node
    CHECK_THROWS_AS(parse_circuit("pc v1\nnode x:\nmarking M: +zz\n"), StructureError);
    // unknown directive
    CHECK_THROWS_AS(parse_circuit("pc v1\nfrobnicate\n"), StructureError);
    // missing header
    CHECK_THROWS_AS(parse_circuit("node x:\n"), StructureError);
    // negative successor value
    CHECK_THROWS_AS(parse_circuit("pc v1\nnode x:\nnode y: -x\n"), CircuitError);
}

TEST_CASE("pc parser accepts comments and signs") {
    auto [raw, ms] = parse_circuit(
        "pc v1\n"
        "# a three-node circuit\n"
        "node one:\n"
        "node two: +one\n"
        "node four: +two # = 2^2\n"
        "marking M: +four -one\n");
    CHECK(raw.size() == 3);
    REQUIRE(ms.size() == 1);
    auto r = reduce(raw, ms);
    BigIntBudget budget(1u << 20);
    CHECK(*r.circuit.evaluate(r.markings[0], budget) == 3);
}
