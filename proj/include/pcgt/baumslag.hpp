#pragma once

#include <memory>
#include <optional>

#include "pcgt/bs12.hpp"

namespace pcgt {

// gamma_0 beta_1 gamma_1 ... beta_k gamma_k with beta in {b, b-bar} and the
// gamma segments held as triples on a shared circuit.  All factorizations
// combined by an operation must live on the same circuit.
struct BetaFactor {
    bool bar = false; // true: b^-1
    PCTriple gamma;
};

struct BetaFactorization {
    std::shared_ptr<ReducedCircuit> circuit;
    PCTriple head; // gamma_0
    std::vector<BetaFactor> factors;
    bool britton_reduced = false;

    std::size_t beta_length() const { return factors.size(); }
};

std::shared_ptr<ReducedCircuit> make_circuit();

BetaFactorization bf_identity(std::shared_ptr<ReducedCircuit> c);
BetaFactorization bf_from_triple(std::shared_ptr<ReducedCircuit> c, PCTriple g);
BetaFactorization beta_factorize(const Word& w, std::shared_ptr<ReducedCircuit> c = nullptr);
BetaFactorization bf_concat(const BetaFactorization& x, const BetaFactorization& y);
BetaFactorization bf_invert(const BetaFactorization& x);
std::vector<int> beta_signature(const BetaFactorization& x); // +1 / -1 per factor

BetaFactorization britton_reduce(BetaFactorization z);

struct CyclicReduction {
    BetaFactorization reduced;    // beta_length > 0 implies head == 1
    BetaFactorization conjugator; // u with u z u^-1 == reduced
};
CyclicReduction cyclically_reduce(const BetaFactorization& z);

bool bf_is_identity(const BetaFactorization& x);
bool word_problem(const BetaFactorization& x, const BetaFactorization& y);
bool word_problem(const Word& x, const Word& y);

// w_0 = t, w_{n+1} = b w_n a w_n^-1 b^-1; length 2^{n+2} - 3.
Word blowup_word(unsigned n, std::size_t cap = std::size_t{1} << 24);

// Britton-reduced form of z x z^-1.
BetaFactorization conjugate_by(const Word& z, const Word& x);

enum class ConjPath {
    Trivial,  // settled by identity / length checks
    BtSingle, // beta-length 1, single candidate exponent
    BtPlus,   // second stable sign +1, odd-normalization exponent
    BtMinus,  // second stable sign -1, forced exponent
    HDirect,  // conjugate already inside the base group
    HPower,   // both classes meet the cyclic subgroups: m = 2^k q test
    HRigid,   // not conjugate into the cyclic subgroups: base-group answer is final
};
const char* conj_path_name(ConjPath p);

struct ConjugacyAnswer {
    Decision decision = Decision::No;
    ConjPath path = ConjPath::Trivial;
    std::optional<BetaFactorization> witness; // z with z x z^-1 = y
    std::uint64_t work = 0;
};

// pre: x, y cyclically Britton-reduced on the same circuit, |x|_beta > 0.
ConjugacyAnswer conj_bg_core(const BetaFactorization& x, const BetaFactorization& y);

// Total dispatcher; budget applies only to the base-group tests reachable
// when both inputs are conjugate into the base group.
ConjugacyAnswer conj_bg(const Word& x, const Word& y, const BigIntBudget& budget);
ConjugacyAnswer conj_bg(const BetaFactorization& x, const BetaFactorization& y,
                        const BigIntBudget& budget);

// Words x = t^m and y = a^{2^s-1} t^m built from circuit markings, so that
// x ~ y iff m divides s.  pre: value(m) >= 1, value(s) >= 1.
std::pair<Word, Word> division_to_conjugacy(const ReducedCircuit& c, const Marking& m,
                                            const Marking& s,
                                            std::size_t cap = std::size_t{1} << 24);

} // namespace pcgt
