#pragma once

#include <memory>
#include <optional>
#include <span>

#include "pcgt/baumslag.hpp"
#include "pcgt/rng.hpp"

namespace pcgt {

// Letter codes for walks: 0 = stable letter, 1 = its inverse, then the base
// generators in inverse pairs (so inv(l) == l ^ 1).  For the Baumslag group
// 2,3,4,5 = a, a^-1, t, t^-1.
std::vector<std::uint8_t> encode_bg_letters(const Word& w);
Word decode_bg_letters(std::span<const std::uint8_t> letters);

// Base-group element of BS(1,2) as (num * 2^ex, m), kept in machine words.
// Operations return nullopt when a value leaves the guarded range.
struct FastH {
    long long num = 0;
    long long ex = 0;
    long long m = 0;
};
std::optional<FastH> fasth_add_scaled(FastH g, long long s, long long e); // r += s*2^e
std::optional<FastH> fasth_letter(FastH g, std::uint8_t letter);          // g * letter
std::optional<FastH> fasth_mul(FastH g, const FastH& h);
bool fasth_in_a(const FastH& g); // member of <a>
bool fasth_in_t(const FastH& g); // member of <t>
std::optional<FastH> fasth_phi(const FastH& g);     // a^k -> t^k
std::optional<FastH> fasth_phi_inv(const FastH& g); // t^k -> a^k
bool fasth_is_identity(const FastH& g);

// ---------------------------------------------------------------------
// Pluggable HNN instance over a base group H with subgroups A, B and an
// isomorphism phi: A -> B realized by the stable letter.
// ---------------------------------------------------------------------

struct BigElem; // instance-specific arbitrary-precision part

class HElem {
  public:
    FastH fast;
    std::unique_ptr<BigElem> big;

    HElem() = default;
    HElem(const HElem& o);
    HElem(HElem&&) noexcept = default;
    HElem& operator=(const HElem& o);
    HElem& operator=(HElem&&) noexcept = default;
    ~HElem();
};

enum class HnnKind { Z2, Bs12OverZ, Bg };

class HnnInstance {
  public:
    virtual ~HnnInstance() = default;
    virtual HnnKind kind() const = 0;
    virtual const char* name() const = 0;
    virtual std::size_t sigma_size() const = 0; // |Sigma|, inverse-closed
    std::size_t delta_size() const { return sigma_size() + 2; }

    virtual HElem identity() const = 0;
    virtual bool is_identity(const HElem& g) const = 0;
    // g <- g * (letter); letter in [2, delta); false on range overflow
    virtual bool apply_sigma(HElem& g, std::uint8_t letter) const = 0;
    virtual bool multiply(HElem& g, const HElem& h) const = 0;
    virtual std::optional<bool> in_A(const HElem& g) const = 0;
    virtual std::optional<bool> in_B(const HElem& g) const = 0;
    virtual bool phi(HElem& g) const = 0;     // pre: in_A
    virtual bool phi_inv(HElem& g) const = 0; // pre: in_B
};

std::unique_ptr<HnnInstance> make_instance(HnnKind kind);
const HnnInstance& builtin_instance(HnnKind kind);

// Stack-based online Britton reduction of the letter sequence.
struct WalkOutcome {
    bool overflow = false;
    bool in_h = false;                // final stack empty
    std::vector<std::int8_t> y;      // +-1 per stable letter (if recorded)
    std::vector<std::uint32_t> x;    // reduced beta-length after each stable letter
};

WalkOutcome hnn_walk(const HnnInstance& inst, std::span<const std::uint8_t> letters,
                     bool record);

// Exact variant for the Baumslag instance, backed by power circuits.
WalkOutcome bg_walk_exact(std::span<const std::uint8_t> letters, bool record);

// Walk on uniform letters; falls back to the exact walk on overflow.
WalkOutcome hnn_walk_trace(const HnnInstance& inst, std::size_t steps, Rng& rng);

// Full Britton-reduction membership test for a word over a,A,t,T,b,B.
bool in_h(const Word& w);
bool in_h_letters(std::span<const std::uint8_t> letters);

} // namespace pcgt
