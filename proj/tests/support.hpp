#pragma once

#include <gmpxx.h>

#include "pcgt/power_circuit.hpp"
#include "pcgt/rng.hpp"

namespace pcgt::testing {

// Random valid circuit with <= max_nodes nodes whose node values stay below
// 2^max_exp, together with exact node values for oracle checks.
struct RandomCircuit {
    RawCircuit raw;
    std::vector<mpz_class> values; // value of node i
};

inline RandomCircuit random_circuit(Rng& rng, unsigned max_nodes, long max_exp = 4095) {
    RandomCircuit out;
    unsigned n = 1 + static_cast<unsigned>(rng.below(max_nodes));
    out.raw.add_node();
    out.values.push_back(1);
    for (unsigned i = 1; i < n; ++i) {
        std::vector<std::pair<std::uint32_t, std::int8_t>> succ;
        mpz_class e = 0;
        for (int attempt = 0; attempt < 24; ++attempt) {
            succ.clear();
            e = 0;
            for (std::uint32_t j = 0; j < i; ++j) {
                std::uint64_t roll = rng.below(3);
                if (roll == 0) continue;
                std::int8_t s = roll == 1 ? 1 : -1;
                succ.push_back({j, s});
                e += s * out.values[j];
            }
            if (e >= 0 && e <= max_exp) break;
            succ.clear();
            e = 0; // fall back to a duplicate leaf
        }
        out.raw.add_node(std::move(succ));
        mpz_class v = 1;
        v <<= e.get_ui();
        out.values.push_back(v);
    }
    return out;
}

inline RawMarking random_marking(Rng& rng, const RandomCircuit& rc, const char* name) {
    RawMarking m;
    m.name = name;
    for (std::uint32_t j = 0; j < rc.raw.size(); ++j) {
        std::uint64_t roll = rng.below(3);
        if (roll == 0) continue;
        m.digits.push_back({j, roll == 1 ? std::int8_t{1} : std::int8_t{-1}});
    }
    return m;
}

inline mpz_class marking_value(const RandomCircuit& rc, const RawMarking& m) {
    mpz_class out = 0;
    for (auto [j, s] : m.digits) out += s * rc.values[j];
    return out;
}

} // namespace pcgt::testing
