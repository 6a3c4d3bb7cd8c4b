#include "pcgt/bs12.hpp"

#include <cassert>
#include <cctype>
#include <sstream>

namespace pcgt {

namespace {
constexpr long kMaxExplicitShift = 1L << 26;

void check_shift(long k) {
    if (k > kMaxExplicitShift || k < -kMaxExplicitShift)
        throw CircuitError("explicit dyadic arithmetic out of range");
}
} // namespace

// ----------------------------------------------------------------- Dyadic

Dyadic::Dyadic(mpz_class mant, long exp) : mant_(std::move(mant)), exp_(exp) {
    if (mant_ == 0) {
        exp_ = 0;
        return;
    }
    unsigned long tz = mpz_scan1(mant_.get_mpz_t(), 0);
    if (tz > 0) {
        mant_ >>= tz;
        exp_ += static_cast<long>(tz);
    }
}

mpz_class Dyadic::to_integer() const {
    assert(is_integer());
    mpz_class out = mant_;
    check_shift(exp_);
    out <<= exp_;
    return out;
}

Dyadic Dyadic::times_pow2(long k) const {
    if (mant_ == 0) return {};
    return Dyadic(mant_, exp_ + k);
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    long e = std::min(a.exp_, b.exp_);
    check_shift(a.exp_ - e);
    check_shift(b.exp_ - e);
    mpz_class m = (a.mant_ << (a.exp_ - e)) + (b.mant_ << (b.exp_ - e));
    return Dyadic(std::move(m), e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator-(const Dyadic& a) {
    Dyadic out = a;
    out.mant_ = -out.mant_;
    return out;
}

// ---------------------------------------------------------------- BSElement

BSElement bs_identity() { return {}; }

BSElement bs_mul(const BSElement& g, const BSElement& h) {
    return {g.r + h.r.times_pow2(g.m), g.m + h.m};
}

BSElement bs_inv(const BSElement& g) {
    return {(-g.r).times_pow2(-g.m), -g.m};
}

BSElement bs_conjugate(const BSElement& z, const BSElement& g) {
    return bs_mul(bs_mul(z, g), bs_inv(z));
}

// -------------------------------------------------------------------- words

Word parse_word(const std::string& text, bool allow_stable_letter) {
    Word out;
    std::size_t i = 0;
    auto fail = [&](const std::string& what) {
        throw WordParseError(what + " at position " + std::to_string(i));
    };
    while (i < text.size()) {
        char ch = text[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        bool stable = ch == 'b' || ch == 'B';
        bool known = ch == 'a' || ch == 'A' || ch == 't' || ch == 'T' || stable;
        if (!known) fail(std::string("unexpected letter '") + ch + "'");
        if (stable && !allow_stable_letter) fail(std::string("letter '") + ch + "' not allowed");
        ++i;
        long exp = 1;
        if (i < text.size() && text[i] == '^') {
            ++i;
            bool negativ = false;
            if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
                negativ = text[i] == '-';
                ++i;
            }
            if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                fail("malformed exponent");
            long v = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                v = v * 10 + (text[i] - '0');
                if (v > (1L << 24)) fail("exponent too large");
                ++i;
            }
            exp = negativ ? -v : v;
        }
        char inv = std::isupper(static_cast<unsigned char>(ch))
                       ? static_cast<char>(std::tolower(ch))
                       : static_cast<char>(std::toupper(ch));
        char use = exp >= 0 ? ch : inv;
        for (long k = 0; k < (exp >= 0 ? exp : -exp); ++k) out.push_back(use);
    }
    return out;
}

std::string word_to_string(const Word& w) { return std::string(w.begin(), w.end()); }

Word invert_word(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        char ch = *it;
        out.push_back(std::isupper(static_cast<unsigned char>(ch))
                          ? static_cast<char>(std::tolower(ch))
                          : static_cast<char>(std::toupper(ch)));
    }
    return out;
}

BSElement eval_word(const Word& w) {
    BSElement g = bs_identity();
    for (char ch : w) {
        switch (ch) {
        case 'a': g.r = g.r + Dyadic::integer(1).times_pow2(g.m); break;
        case 'A': g.r = g.r - Dyadic::integer(1).times_pow2(g.m); break;
        case 't': g.m += 1; break;
        case 'T': g.m -= 1; break;
        default: throw WordParseError(std::string("letter '") + ch + "' is not in BS(1,2)");
        }
    }
    return g;
}

// ------------------------------------------------------------------ triples

Triple normalize_triple(const Triple& t) {
    if (t.v == 0) return {0, 0, t.u + t.w};
    unsigned long tz = mpz_scan1(t.v.get_mpz_t(), 0);
    Triple out;
    out.u = t.u + static_cast<long>(tz);
    out.v = t.v >> tz;
    out.w = t.w - static_cast<long>(tz);
    return out;
}

BSElement triple_to_element(const Triple& t) {
    return {Dyadic(t.v, t.u), t.u + t.w};
}

Triple triple_from_element(const BSElement& g) {
    return {g.r.exponent(), g.r.mantissa(), g.m - g.r.exponent()};
}

PCTriple pc_identity() { return {}; }

PCTriple pc_normalize(ReducedCircuit& c, const PCTriple& t) {
    if (c.is_zero(t.s)) return {Marking{}, Marking{}, c.add(t.k, t.l)};
    auto dec = c.decompose_odd(t.s);
    PCTriple out;
    out.k = c.add(t.k, dec.x);
    out.s = dec.u;
    out.l = c.sub(t.l, dec.x);
    return out;
}

PCTriple pc_from_element(ReducedCircuit& c, const BSElement& g) {
    PCTriple t;
    t.k = c.embed(g.r.exponent());
    t.s = c.embed(g.r.mantissa());
    t.l = c.embed(mpz_class(g.m) - g.r.exponent());
    if (g.r.is_zero()) t.k.clear();
    return t;
}

std::optional<BSElement> pc_to_element(const ReducedCircuit& c, const PCTriple& t,
                                       const BigIntBudget& budget) {
    auto u = c.evaluate(t.k, budget);
    auto v = c.evaluate(t.s, budget);
    auto w = c.evaluate(t.l, budget);
    if (!u || !v || !w) return std::nullopt;
    if (!u->fits_slong_p() || !w->fits_slong_p()) return std::nullopt;
    long uu = u->get_si();
    return BSElement{Dyadic(*v, uu), uu + w->get_si()};
}

// (2^{u1} v1, m1) * (2^{u2} v2, m2) = (2^c (2^{u1-c} v1 + 2^{m1+u2-c} v2), m1+m2)
// with c chosen so both shifts are nonnegative.
PCTriple pc_mul(ReducedCircuit& c, const PCTriple& a, const PCTriple& b) {
    if (c.is_zero(a.s) && c.is_zero(b.s))
        return pc_normalize(c, {Marking{}, Marking{}, c.add(c.add(a.k, a.l), c.add(b.k, b.l))});
    Marking m_total = c.add(pc_m_component(c, a), pc_m_component(c, b));
    if (c.is_zero(a.s)) {
        // (0, m1) * g: r = 2^{m1 + u2} v2
        Marking shift = c.add(pc_m_component(c, a), b.k);
        PCTriple out{shift, b.s, c.sub(m_total, shift)};
        return pc_normalize(c, out);
    }
    if (c.is_zero(b.s)) {
        PCTriple out{a.k, a.s, c.sub(m_total, a.k)};
        return pc_normalize(c, out);
    }
    Marking e1 = a.k;
    Marking e2 = c.add(pc_m_component(c, a), b.k);
    const Marking& low = c.compare(e1, e2) <= 0 ? e1 : e2;
    Marking d1 = c.sub(e1, low);
    Marking d2 = c.sub(e2, low);
    Marking sum = c.add(c.mul_pow2(d1, a.s), c.mul_pow2(d2, b.s));
    PCTriple out{low, sum, c.sub(m_total, low)};
    return pc_normalize(c, out);
}

PCTriple pc_inv(ReducedCircuit& c, const PCTriple& a) {
    PCTriple out{negate(a.l), negate(a.s), negate(a.k)};
    return pc_normalize(c, out);
}

Marking pc_m_component(ReducedCircuit& c, const PCTriple& a) { return c.add(a.k, a.l); }

bool pc_equal(ReducedCircuit& c, const PCTriple& a, const PCTriple& b) {
    PCTriple na = pc_normalize(c, a);
    PCTriple nb = pc_normalize(c, b);
    if (c.compare(na.s, nb.s) != 0) return false;
    if (!c.is_zero(na.s) && c.compare(na.k, nb.k) != 0) return false;
    return c.compare(pc_m_component(c, na), pc_m_component(c, nb)) == 0;
}

bool pc_is_identity(ReducedCircuit& c, const PCTriple& a) {
    return c.is_zero(a.s) && c.is_zero(pc_m_component(c, a));
}

PCTriple pc_t_power(ReducedCircuit& c, const Marking& e) {
    (void)c;
    return {Marking{}, Marking{}, e};
}

PCTriple pc_a_power(ReducedCircuit& c, const Marking& e) {
    if (c.is_zero(e)) return pc_identity();
    auto dec = c.decompose_odd(e);
    return {dec.x, dec.u, negate(dec.x)};
}

bool pc_in_a_subgroup(ReducedCircuit& c, const PCTriple& a) {
    PCTriple n = pc_normalize(c, a);
    if (c.sign(pc_m_component(c, n)) != 0) return false;
    return c.is_zero(n.s) || c.sign(n.k) >= 0; // r integral: odd part shifted left
}

bool pc_in_t_subgroup(ReducedCircuit& c, const PCTriple& a) {
    return c.is_zero(a.s);
}

Marking pc_a_exponent(ReducedCircuit& c, const PCTriple& a) {
    PCTriple n = pc_normalize(c, a);
    if (c.is_zero(n.s)) return Marking{};
    return c.mul_pow2(n.k, n.s);
}

// ---------------------------------------------------------------- conjugacy

namespace {

// Core of the decision for integral r, s and m >= 1:
//   (r,m) ~ (s,m)  iff  r 2^k == s  (mod 2^m - 1)  for some 0 <= k < m,
// and then z = (x, k) with x = (r 2^k - s) / (2^m - 1) conjugates.
struct FridaResult {
    bool found = false;
    long k = 0;
    mpz_class x;
};

FridaResult frida_scan(const mpz_class& r, const mpz_class& s, long m) {
    if (m > kMaxExplicitShift) throw CircuitError("modulus too large for residue scan");
    FridaResult out;
    mpz_class mod = (mpz_class(1) << m) - 1;
    mpz_class cur = r % mod;
    mpz_class target = s % mod;
    if (cur < 0) cur += mod;
    if (target < 0) target += mod;
    for (long k = 0; k < m; ++k) {
        if (cur == target) {
            out.found = true;
            out.k = k;
            out.x = ((r << k) - s) / mod;
            return out;
        }
        cur <<= 1;
        if (cur >= mod) cur -= mod;
    }
    return out;
}

} // namespace

BsConjugacy conj_bs12(const BSElement& f, const BSElement& g) {
    if (f.m != g.m) return {Decision::No, {}};
    long m = f.m;

    if (m < 0) {
        // (r,m) ~ (s,m) iff (-r,-m) ~ (-s,-m); pull the witness back through
        // (r,m)^-1 = t^{-m} (-r,-m) t^{m}.
        BSElement f2{-f.r, -m}, g2{-g.r, -m};
        BsConjugacy sub = conj_bs12(f2, g2);
        if (sub.decision != Decision::Yes) return sub;
        BSElement t_mu{Dyadic{}, -m};
        BSElement z = bs_mul(bs_mul(t_mu, sub.witness), bs_inv(t_mu));
        if (!(bs_conjugate(z, f) == g)) throw CircuitError("conjugacy witness failed to verify");
        return {Decision::Yes, z};
    }

    if (m == 0) {
        if (f.r.is_zero() != g.r.is_zero()) return {Decision::No, {}};
        if (f.r.is_zero()) return {Decision::Yes, bs_identity()};
        if (f.r.mantissa() != g.r.mantissa()) return {Decision::No, {}};
        long k = g.r.exponent() - f.r.exponent();
        BSElement z{Dyadic{}, k};
        if (!(bs_conjugate(z, f) == g)) throw CircuitError("conjugacy witness failed to verify");
        return {Decision::Yes, z};
    }

    // Conjugating by t^j maps (r,m) to (2^j r, m); pick the least j making
    // both coordinates integral.
    long j = std::max({0L, -f.r.exponent(), -g.r.exponent()});
    mpz_class r = f.r.times_pow2(j).to_integer();
    mpz_class s = g.r.times_pow2(j).to_integer();

    FridaResult fr = frida_scan(r, s, m);
    if (!fr.found) return {Decision::No, {}};
    BSElement z2{Dyadic(fr.x, 0), fr.k};
    BSElement t_j{Dyadic{}, j};
    // z2 conjugates (2^j r, m) to (2^j s, m); conjugate back.
    BSElement z = bs_mul(bs_mul(bs_inv(t_j), z2), t_j);
    if (!(bs_conjugate(z, f) == g)) throw CircuitError("conjugacy witness failed to verify");
    return {Decision::Yes, z};
}

PcBsConjugacy conj_bs12_pc(ReducedCircuit& c, const PCTriple& f_in, const PCTriple& g_in,
                           const BigIntBudget& budget) {
    PCTriple f = pc_normalize(c, f_in);
    PCTriple g = pc_normalize(c, g_in);
    if (pc_equal(c, f, g)) return {Decision::Yes, pc_identity()};
    Marking mf = pc_m_component(c, f);
    Marking mg = pc_m_component(c, g);
    if (c.compare(mf, mg) != 0) return {Decision::No, {}};

    int msign = c.sign(mf);
    if (msign < 0) {
        auto flip = [&](const PCTriple& t) {
            // (r, m) -> (-r, -m) in triple coordinates
            PCTriple out{t.k, negate(t.s), negate(c.add(c.add(t.k, t.k), t.l))};
            return pc_normalize(c, out);
        };
        PcBsConjugacy sub = conj_bs12_pc(c, flip(f), flip(g), budget);
        if (sub.decision != Decision::Yes) return sub;
        PCTriple t_mu = pc_t_power(c, negate(mf));
        PCTriple z = pc_mul(c, pc_mul(c, t_mu, sub.witness), pc_inv(c, t_mu));
        return {Decision::Yes, z};
    }

    if (msign == 0) {
        if (c.is_zero(f.s) != c.is_zero(g.s)) return {Decision::No, {}};
        if (c.is_zero(f.s)) return {Decision::Yes, pc_identity()};
        if (c.compare(f.s, g.s) != 0) return {Decision::No, {}};
        Marking k = c.sub(g.k, f.k);
        return {Decision::Yes, pc_t_power(c, k)};
    }

    // m == 1 answers yes with x = r - s, without any expansion.
    if (c.compare(mf, c.unit()) == 0) {
        Marking j;
        int sk_f = c.is_zero(f.s) ? 0 : c.sign(f.k);
        int sk_g = c.is_zero(g.s) ? 0 : c.sign(g.k);
        if (sk_f < 0 || sk_g < 0) {
            const Marking& lo = (sk_f < 0 && (sk_g >= 0 || c.compare(f.k, g.k) <= 0)) ? f.k : g.k;
            j = negate(lo);
        }
        Marking rj = c.is_zero(f.s) ? Marking{} : c.mul_pow2(c.add(j, f.k), f.s);
        Marking sj = c.is_zero(g.s) ? Marking{} : c.mul_pow2(c.add(j, g.k), g.s);
        PCTriple z2 = pc_a_power(c, c.sub(rj, sj));
        PCTriple t_j = pc_t_power(c, j);
        PCTriple z = pc_mul(c, pc_mul(c, pc_inv(c, t_j), z2), t_j);
        return {Decision::Yes, z};
    }

    // General m >= 2: expand m, r, s within budget and run the residue scan.
    auto mv = c.evaluate(mf, budget);
    if (!mv || !mv->fits_slong_p()) return {Decision::BudgetExceeded, {}};
    long m = mv->get_si();

    Marking j;
    {
        int sk_f = c.is_zero(f.s) ? 0 : c.sign(f.k);
        int sk_g = c.is_zero(g.s) ? 0 : c.sign(g.k);
        if (sk_f < 0 || sk_g < 0) {
            const Marking& lo = (sk_f < 0 && (sk_g >= 0 || c.compare(f.k, g.k) <= 0)) ? f.k : g.k;
            j = negate(lo);
        }
    }
    Marking rj = c.is_zero(f.s) ? Marking{} : c.mul_pow2(c.add(j, f.k), f.s);
    Marking sj = c.is_zero(g.s) ? Marking{} : c.mul_pow2(c.add(j, g.k), g.s);
    auto rv = c.evaluate(rj, budget);
    auto sv = c.evaluate(sj, budget);
    if (!rv || !sv) return {Decision::BudgetExceeded, {}};

    FridaResult fr = frida_scan(*rv, *sv, m);
    if (!fr.found) return {Decision::No, {}};
    PCTriple z2 = pc_mul(c, pc_a_power(c, c.embed(fr.x)),
                         pc_t_power(c, c.constant(fr.k)));
    PCTriple t_j = pc_t_power(c, j);
    PCTriple z = pc_mul(c, pc_mul(c, pc_inv(c, t_j), z2), t_j);
    return {Decision::Yes, z};
}

} // namespace pcgt
