#pragma once

#include <span>
#include <string>
#include <vector>

#include "pcgt/hnn.hpp"

namespace pcgt {

// Balanced bracket word of length 2n with its matching-pair table.
struct DyckWord {
    std::string brackets;        // '(' and ')'
    std::vector<int> match;      // match[i] = index paired with i
    int adjacent_pairs = 0;      // positions i with brackets[i..i+1] == "()"

    unsigned half_length() const { return static_cast<unsigned>(brackets.size() / 2); }
};

DyckWord make_dyck(const std::string& brackets);

// All Dyck words of length 2n; n is capped at 12 (Catalan(12) = 208012).
std::vector<DyckWord> enumerate_dyck(unsigned n);

// Stable-letter signs of a letter word: 0 for b, 1 for b-bar.
std::vector<std::uint8_t> beta_signs(std::span<const std::uint8_t> letters);

// The pairing conditions: adjacent bracket pairs must sit on b b-bar, and
// every matching pair must carry opposite stable letters.
bool dyck_matches(std::span<const std::uint8_t> letters, const DyckWord& d);

// 1 when the bracket word also describes a successful Britton reduction of
// the word into the base group (innermost pairs first).
bool dyck_successful(std::span<const std::uint8_t> letters, const DyckWord& d);

} // namespace pcgt
