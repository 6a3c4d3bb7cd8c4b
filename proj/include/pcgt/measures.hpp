#pragma once

#include <cstdint>
#include <vector>

#include "pcgt/rng.hpp"

namespace pcgt {

// Word distributions used by the experiments.  Letters are walk codes:
// 0,1 the stable pair, then base generators in inverse pairs (inv = xor 1).
//
//  UniformDeltaN(n):   n independent uniform letters over Delta.
//  ReducedUniform(n):  uniform non-backtracking walk of length n (first
//                      letter uniform, each next uniform over the |Delta|-1
//                      letters that do not cancel).
//  MuM(m):             starts with the stable letter or its inverse (1/2
//                      each), continues non-backtracking with the uniform
//                      rule, and stops right before the (m+1)-th stable
//                      letter would be emitted.
//  UniformDeltaMuM(m): uniform letters (backtracking allowed), stopping
//                      right before the (m+1)-th stable letter.
enum class MeasureKind { UniformDeltaN, ReducedUniform, MuM, UniformDeltaMuM };

struct Measure {
    MeasureKind kind = MeasureKind::UniformDeltaN;
    unsigned param = 1; // n or m

    static Measure uniform_delta_n(unsigned n) { return {MeasureKind::UniformDeltaN, n}; }
    static Measure reduced_uniform(unsigned n) { return {MeasureKind::ReducedUniform, n}; }
    static Measure mu_m(unsigned m) { return {MeasureKind::MuM, m}; }
    static Measure uniform_mu_m(unsigned m) { return {MeasureKind::UniformDeltaMuM, m}; }
};

void sample_letters(const Measure& measure, std::size_t delta_size, Rng& rng,
                    std::vector<std::uint8_t>& out);

// Distribution over base-generator words that stops with probability
// 2/|Delta| at each step and otherwise emits a uniform base letter.
void sample_mu_sigma(std::size_t delta_size, Rng& rng, std::vector<std::uint8_t>& out);

} // namespace pcgt
