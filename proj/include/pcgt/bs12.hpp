#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcgt/power_circuit.hpp"

namespace pcgt {

class WordParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Dyadic fraction mant * 2^exp in normal form: mant odd, or mant = 0 with
// exp = 0.  Equality is therefore syntactic.
class Dyadic {
  public:
    Dyadic() = default;
    Dyadic(mpz_class mant, long exp);
    static Dyadic integer(mpz_class v) { return Dyadic(std::move(v), 0); }

    const mpz_class& mantissa() const { return mant_; }
    long exponent() const { return exp_; }
    bool is_zero() const { return mant_ == 0; }
    bool is_integer() const { return mant_ == 0 || exp_ >= 0; }
    mpz_class to_integer() const; // pre: is_integer()
    Dyadic times_pow2(long k) const;

    friend Dyadic operator+(const Dyadic&, const Dyadic&);
    friend Dyadic operator-(const Dyadic&, const Dyadic&);
    friend Dyadic operator-(const Dyadic&);
    friend bool operator==(const Dyadic&, const Dyadic&) = default;

  private:
    mpz_class mant_ = 0;
    long exp_ = 0;
};

// Element (r, m) of Z[1/2] x| Z with (r,m)(s,q) = (r + 2^m s, m+q).
struct BSElement {
    Dyadic r;
    long m = 0;
    friend bool operator==(const BSElement&, const BSElement&) = default;
};

BSElement bs_identity();
BSElement bs_mul(const BSElement& g, const BSElement& h);
BSElement bs_inv(const BSElement& g);
BSElement bs_conjugate(const BSElement& z, const BSElement& g); // z g z^-1

// Words over a,A,t,T (b,B rejected here); supports exponent shorthand a^-3.
using Word = std::vector<char>;
Word parse_word(const std::string& text, bool allow_stable_letter);
std::string word_to_string(const Word& w);
Word invert_word(const Word& w);
BSElement eval_word(const Word& w);

// ------------------------------------------------------------ triples

// [u, v, w] denotes the element (2^u * v, u + w).  Normal form: v odd, or
// v = 0 and u = 0.
struct Triple {
    long u = 0;
    mpz_class v = 0;
    long w = 0;
};
Triple normalize_triple(const Triple& t);
BSElement triple_to_element(const Triple& t);
Triple triple_from_element(const BSElement& g);

// Same triple over a shared reduced circuit: markings K, S, L.
struct PCTriple {
    Marking k, s, l;
};

PCTriple pc_identity();
PCTriple pc_normalize(ReducedCircuit& c, const PCTriple& t);
PCTriple pc_from_element(ReducedCircuit& c, const BSElement& g);
std::optional<BSElement> pc_to_element(const ReducedCircuit& c, const PCTriple& t,
                                       const BigIntBudget& budget);
PCTriple pc_mul(ReducedCircuit& c, const PCTriple& a, const PCTriple& b);
PCTriple pc_inv(ReducedCircuit& c, const PCTriple& a);
bool pc_equal(ReducedCircuit& c, const PCTriple& a, const PCTriple& b);
bool pc_is_identity(ReducedCircuit& c, const PCTriple& a);
Marking pc_m_component(ReducedCircuit& c, const PCTriple& a); // k + l
PCTriple pc_t_power(ReducedCircuit& c, const Marking& e);     // (0, e)
PCTriple pc_a_power(ReducedCircuit& c, const Marking& e);     // (e, 0)
bool pc_in_a_subgroup(ReducedCircuit& c, const PCTriple& a);  // member of a^Z
bool pc_in_t_subgroup(ReducedCircuit& c, const PCTriple& a);  // member of t^Z
// pre: pc_in_a_subgroup; the exponent r with a = (r, 0) as one marking
Marking pc_a_exponent(ReducedCircuit& c, const PCTriple& a);

// ------------------------------------------------------------ conjugacy

enum class Decision { Yes, No, BudgetExceeded };

struct BsConjugacy {
    Decision decision = Decision::No;
    BSElement witness; // z with z f z^-1 = g when decision == Yes
};

// Exact conjugacy in BS(1,2); witness is verified before returning.
BsConjugacy conj_bs12(const BSElement& f, const BSElement& g);

struct PcBsConjugacy {
    Decision decision = Decision::No;
    PCTriple witness;
};

// Power-circuit variant: structural work stays on the circuit; only the
// modular residue scan expands integers, guarded by the budget.
PcBsConjugacy conj_bs12_pc(ReducedCircuit& c, const PCTriple& f, const PCTriple& g,
                           const BigIntBudget& budget);

} // namespace pcgt
