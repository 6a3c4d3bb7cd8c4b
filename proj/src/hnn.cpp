#include "pcgt/hnn.hpp"

#include <cassert>

namespace pcgt {

namespace {
constexpr long long kNumGuard = 1LL << 61;
constexpr long long kExpGuard = 1LL << 61;
constexpr std::size_t kBigBitGuard = std::size_t{1} << 20;
constexpr long kBigExpGuard = 1L << 48;
} // namespace

std::vector<std::uint8_t> encode_bg_letters(const Word& w) {
    std::vector<std::uint8_t> out;
    out.reserve(w.size());
    for (char ch : w) {
        switch (ch) {
        case 'b': out.push_back(0); break;
        case 'B': out.push_back(1); break;
        case 'a': out.push_back(2); break;
        case 'A': out.push_back(3); break;
        case 't': out.push_back(4); break;
        case 'T': out.push_back(5); break;
        default: throw WordParseError(std::string("unknown letter '") + ch + "'");
        }
    }
    return out;
}

Word decode_bg_letters(std::span<const std::uint8_t> letters) {
    static constexpr char kMap[6] = {'b', 'B', 'a', 'A', 't', 'T'};
    Word out;
    out.reserve(letters.size());
    for (auto l : letters) out.push_back(kMap[l]);
    return out;
}

// ------------------------------------------------------------------ FastH

std::optional<FastH> fasth_add_scaled(FastH g, long long s, long long e) {
    if (s == 0) return g;
    if (g.num == 0) {
        g.num = s;
        g.ex = e;
        return g;
    }
    long long lo = std::min(g.ex, e);
    long long d1 = g.ex - lo, d2 = e - lo;
    if (d1 > 61 || d2 > 61) return std::nullopt;
    long long n1, n2, sum;
    if (__builtin_mul_overflow(g.num, 1LL << d1, &n1)) return std::nullopt;
    if (__builtin_mul_overflow(s, 1LL << d2, &n2)) return std::nullopt;
    if (__builtin_add_overflow(n1, n2, &sum)) return std::nullopt;
    if (sum > kNumGuard || sum < -kNumGuard) return std::nullopt;
    g.num = sum;
    g.ex = sum == 0 ? 0 : lo;
    if (g.num == 0) g.ex = 0;
    return g;
}

std::optional<FastH> fasth_letter(FastH g, std::uint8_t letter) {
    switch (letter) {
    case 2: return fasth_add_scaled(g, 1, g.m);
    case 3: return fasth_add_scaled(g, -1, g.m);
    case 4:
        if (g.m >= kExpGuard) return std::nullopt;
        g.m += 1;
        return g;
    case 5:
        if (g.m <= -kExpGuard) return std::nullopt;
        g.m -= 1;
        return g;
    default: return std::nullopt;
    }
}

std::optional<FastH> fasth_mul(FastH g, const FastH& h) {
    long long m;
    if (__builtin_add_overflow(g.m, h.m, &m) || m > kExpGuard || m < -kExpGuard)
        return std::nullopt;
    long long e;
    if (h.num != 0) {
        if (__builtin_add_overflow(g.m, h.ex, &e)) return std::nullopt;
        auto r = fasth_add_scaled(g, h.num, e);
        if (!r) return std::nullopt;
        g = *r;
    }
    g.m = m;
    return g;
}

bool fasth_in_a(const FastH& g) {
    if (g.m != 0) return false;
    if (g.num == 0) return true;
    if (g.ex >= 0) return true;
    unsigned long long mag = g.num < 0 ? -static_cast<unsigned long long>(g.num)
                                       : static_cast<unsigned long long>(g.num);
    return __builtin_ctzll(mag) >= -g.ex;
}

bool fasth_in_t(const FastH& g) { return g.num == 0; }

std::optional<FastH> fasth_phi(const FastH& g) {
    assert(fasth_in_a(g));
    FastH out;
    long long k = g.num;
    long long e = g.ex;
    if (g.num == 0) return out;
    if (e < 0) {
        k >>= -e;
        e = 0;
    }
    if (e > 61) return std::nullopt;
    if (__builtin_mul_overflow(k, 1LL << e, &k)) return std::nullopt;
    if (k > kExpGuard || k < -kExpGuard) return std::nullopt;
    out.m = k;
    return out;
}

std::optional<FastH> fasth_phi_inv(const FastH& g) {
    assert(fasth_in_t(g));
    FastH out;
    if (g.m > kNumGuard || g.m < -kNumGuard) return std::nullopt;
    out.num = g.m;
    out.ex = 0;
    if (out.num == 0) out.ex = 0;
    return out;
}

bool fasth_is_identity(const FastH& g) { return g.num == 0 && g.m == 0; }

// ------------------------------------------------------------------ HElem

// Arbitrary-precision variant of the same (num * 2^ex, m) element.
struct BigElem {
    mpz_class num;
    mpz_class ex;
    mpz_class m;
};

HElem::HElem(const HElem& o)
    : fast(o.fast), big(o.big ? std::make_unique<BigElem>(*o.big) : nullptr) {}

HElem& HElem::operator=(const HElem& o) {
    fast = o.fast;
    big = o.big ? std::make_unique<BigElem>(*o.big) : nullptr;
    return *this;
}

HElem::~HElem() = default;

namespace {

BigElem to_big(const FastH& f) {
    BigElem out;
    out.num = static_cast<long>(f.num);
    out.ex = static_cast<long>(f.ex);
    out.m = static_cast<long>(f.m);
    return out;
}

bool big_guard(const BigElem& g) {
    if (g.num != 0 && mpz_sizeinbase(g.num.get_mpz_t(), 2) > kBigBitGuard) return false;
    if (abs(g.ex) > kBigExpGuard || abs(g.m) > kBigExpGuard) return false;
    return true;
}

// r += s * 2^e
bool big_add_scaled(BigElem& g, const mpz_class& s, const mpz_class& e) {
    if (s == 0) return true;
    if (g.num == 0) {
        g.num = s;
        g.ex = e;
        return big_guard(g);
    }
    mpz_class lo = g.ex < e ? g.ex : e;
    mpz_class d1 = g.ex - lo, d2 = e - lo;
    if (d1 > static_cast<long>(kBigBitGuard) || d2 > static_cast<long>(kBigBitGuard))
        return false;
    mpz_class n1 = g.num << d1.get_ui();
    mpz_class n2 = s << d2.get_ui();
    g.num = n1 + n2;
    g.ex = lo;
    if (g.num == 0) g.ex = 0;
    return big_guard(g);
}

bool big_mul(BigElem& g, const BigElem& h) {
    mpz_class m = g.m + h.m;
    if (h.num != 0 && !big_add_scaled(g, h.num, g.m + h.ex)) return false;
    g.m = m;
    return big_guard(g);
}

bool big_in_a(const BigElem& g) {
    if (g.m != 0) return false;
    if (g.num == 0) return true;
    if (g.ex >= 0) return true;
    mpz_class mag = abs(g.num);
    return mpz_scan1(mag.get_mpz_t(), 0) >= g.ex * -1;
}

bool big_in_t(const BigElem& g) { return g.num == 0; }

bool big_phi(BigElem& g) {
    if (g.num == 0) return true;
    mpz_class k = g.num;
    if (g.ex > 0) {
        if (g.ex > static_cast<long>(kBigBitGuard)) return false;
        k <<= g.ex.get_ui();
    } else if (g.ex < 0) {
        mpz_class sh = -g.ex;
        if (sh > static_cast<long>(kBigBitGuard)) return false;
        k >>= sh.get_ui();
    }
    g.num = 0;
    g.ex = 0;
    g.m = k;
    return big_guard(g);
}

bool big_phi_inv(BigElem& g) {
    g.num = g.m;
    g.ex = 0;
    g.m = 0;
    if (g.num == 0) g.ex = 0;
    return big_guard(g);
}

// -------------------------------------------------------------- instances

class BgInstance final : public HnnInstance {
  public:
    HnnKind kind() const override { return HnnKind::Bg; }
    const char* name() const override { return "bg"; }
    std::size_t sigma_size() const override { return 4; } // a, a^-1, t, t^-1

    HElem identity() const override { return {}; }

    bool is_identity(const HElem& g) const override {
        if (g.big) return g.big->num == 0 && g.big->m == 0;
        return fasth_is_identity(g.fast);
    }

    static bool promote(HElem& g) {
        if (!g.big) g.big = std::make_unique<BigElem>(to_big(g.fast));
        return true;
    }

    bool apply_sigma(HElem& g, std::uint8_t letter) const override {
        if (!g.big) {
            auto r = fasth_letter(g.fast, letter);
            if (r) {
                g.fast = *r;
                return true;
            }
            promote(g);
        }
        BigElem& b = *g.big;
        switch (letter) {
        case 2: return big_add_scaled(b, 1, b.m);
        case 3: return big_add_scaled(b, -1, b.m);
        case 4: b.m += 1; return big_guard(b);
        case 5: b.m -= 1; return big_guard(b);
        default: return false;
        }
    }

    bool multiply(HElem& g, const HElem& h) const override {
        if (!g.big && !h.big) {
            auto r = fasth_mul(g.fast, h.fast);
            if (r) {
                g.fast = *r;
                return true;
            }
        }
        promote(g);
        BigElem hb = h.big ? *h.big : to_big(h.fast);
        return big_mul(*g.big, hb);
    }

    std::optional<bool> in_A(const HElem& g) const override {
        return g.big ? big_in_a(*g.big) : fasth_in_a(g.fast);
    }

    std::optional<bool> in_B(const HElem& g) const override {
        return g.big ? big_in_t(*g.big) : fasth_in_t(g.fast);
    }

    bool phi(HElem& g) const override {
        if (!g.big) {
            auto r = fasth_phi(g.fast);
            if (r) {
                g.fast = *r;
                return true;
            }
            promote(g);
        }
        return big_phi(*g.big);
    }

    bool phi_inv(HElem& g) const override {
        if (!g.big) {
            auto r = fasth_phi_inv(g.fast);
            if (r) {
                g.fast = *r;
                return true;
            }
            promote(g);
        }
        return big_phi_inv(*g.big);
    }
};

// H = Z with A = B = H and phi the identity; the extension is Z x Z.
class Z2Instance final : public HnnInstance {
  public:
    HnnKind kind() const override { return HnnKind::Z2; }
    const char* name() const override { return "z2"; }
    std::size_t sigma_size() const override { return 2; }

    HElem identity() const override { return {}; }
    bool is_identity(const HElem& g) const override { return g.fast.num == 0; }

    bool apply_sigma(HElem& g, std::uint8_t letter) const override {
        g.fast.num += letter == 2 ? 1 : -1;
        return true;
    }
    bool multiply(HElem& g, const HElem& h) const override {
        g.fast.num += h.fast.num;
        return true;
    }
    std::optional<bool> in_A(const HElem&) const override { return true; }
    std::optional<bool> in_B(const HElem&) const override { return true; }
    bool phi(HElem&) const override { return true; }
    bool phi_inv(HElem&) const override { return true; }
};

// H = Z = <a>, A = H, B = 2Z, phi(k) = 2k: the extension is BS(1,2) with
// the stable letter acting as t.
class Bs12OverZInstance final : public HnnInstance {
  public:
    HnnKind kind() const override { return HnnKind::Bs12OverZ; }
    const char* name() const override { return "bs12"; }
    std::size_t sigma_size() const override { return 2; }

    HElem identity() const override { return {}; }
    bool is_identity(const HElem& g) const override {
        return g.big ? g.big->num == 0 : g.fast.num == 0;
    }

    static void promote(HElem& g) {
        if (!g.big) {
            g.big = std::make_unique<BigElem>();
            g.big->num = static_cast<long>(g.fast.num);
        }
    }

    bool apply_sigma(HElem& g, std::uint8_t letter) const override {
        long long d = letter == 2 ? 1 : -1;
        if (!g.big) {
            if (__builtin_add_overflow(g.fast.num, d, &g.fast.num)) {
                g.fast.num -= d; // undo wrapped add before promoting
                promote(g);
            } else {
                return true;
            }
        }
        g.big->num += static_cast<long>(d);
        return big_guard(*g.big);
    }

    bool multiply(HElem& g, const HElem& h) const override {
        if (!g.big && !h.big) {
            long long s;
            if (!__builtin_add_overflow(g.fast.num, h.fast.num, &s)) {
                g.fast.num = s;
                return true;
            }
        }
        promote(g);
        g.big->num += h.big ? h.big->num : mpz_class(static_cast<long>(h.fast.num));
        return big_guard(*g.big);
    }

    std::optional<bool> in_A(const HElem&) const override { return true; }
    std::optional<bool> in_B(const HElem& g) const override {
        if (g.big) return mpz_even_p(g.big->num.get_mpz_t()) != 0;
        return (g.fast.num & 1) == 0;
    }
    bool phi(HElem& g) const override {
        if (!g.big) {
            if (g.fast.num <= kNumGuard / 2 && g.fast.num >= -kNumGuard / 2) {
                g.fast.num *= 2;
                return true;
            }
            promote(g);
        }
        g.big->num *= 2;
        return big_guard(*g.big);
    }
    bool phi_inv(HElem& g) const override {
        if (!g.big) {
            g.fast.num /= 2;
            return true;
        }
        g.big->num /= 2;
        return true;
    }
};

} // namespace

std::unique_ptr<HnnInstance> make_instance(HnnKind kind) {
    switch (kind) {
    case HnnKind::Z2: return std::make_unique<Z2Instance>();
    case HnnKind::Bs12OverZ: return std::make_unique<Bs12OverZInstance>();
    case HnnKind::Bg: return std::make_unique<BgInstance>();
    }
    throw std::logic_error("unknown instance kind");
}

const HnnInstance& builtin_instance(HnnKind kind) {
    static const Z2Instance z2;
    static const Bs12OverZInstance bs;
    static const BgInstance bg;
    switch (kind) {
    case HnnKind::Z2: return z2;
    case HnnKind::Bs12OverZ: return bs;
    case HnnKind::Bg: return bg;
    }
    throw std::logic_error("unknown instance kind");
}

WalkOutcome hnn_walk(const HnnInstance& inst, std::span<const std::uint8_t> letters,
                     bool record) {
    WalkOutcome out;
    std::vector<std::pair<bool, HElem>> stack;
    HElem cur = inst.identity();
    for (auto letter : letters) {
        if (letter >= 2) {
            if (!inst.apply_sigma(cur, letter)) {
                out.overflow = true;
                return out;
            }
            continue;
        }
        bool bar = letter == 1;
        bool pinched = false;
        if (!stack.empty() && stack.back().first != bar) {
            auto member = stack.back().first ? inst.in_B(cur) : inst.in_A(cur);
            if (!member) {
                out.overflow = true;
                return out;
            }
            if (*member) {
                bool ok = stack.back().first ? inst.phi_inv(cur) : inst.phi(cur);
                if (!ok) {
                    out.overflow = true;
                    return out;
                }
                HElem merged = std::move(stack.back().second);
                stack.pop_back();
                if (!inst.multiply(merged, cur)) {
                    out.overflow = true;
                    return out;
                }
                cur = std::move(merged);
                pinched = true;
            }
        }
        if (!pinched) {
            stack.push_back({bar, std::move(cur)});
            cur = inst.identity();
        }
        if (record) {
            out.y.push_back(pinched ? -1 : 1);
            out.x.push_back(static_cast<std::uint32_t>(stack.size()));
        }
    }
    out.in_h = stack.empty();
    return out;
}

WalkOutcome bg_walk_exact(std::span<const std::uint8_t> letters, bool record) {
    WalkOutcome out;
    auto circ = make_circuit();
    ReducedCircuit& c = *circ;
    std::vector<std::pair<bool, PCTriple>> stack;
    PCTriple cur = pc_identity();
    auto letter_triple = [&](std::uint8_t letter) -> PCTriple {
        switch (letter) {
        case 2: return pc_a_power(c, c.unit());
        case 3: return pc_a_power(c, negate(c.unit()));
        case 4: return pc_t_power(c, c.unit());
        default: return pc_t_power(c, negate(c.unit()));
        }
    };
    for (auto letter : letters) {
        if (letter >= 2) {
            cur = pc_mul(c, cur, letter_triple(letter));
            continue;
        }
        bool bar = letter == 1;
        bool pinched = false;
        if (!stack.empty() && stack.back().first != bar) {
            if (!stack.back().first) { // b cur b^-1
                if (pc_in_a_subgroup(c, cur)) {
                    cur = pc_mul(c, stack.back().second,
                                 pc_t_power(c, pc_a_exponent(c, cur)));
                    stack.pop_back();
                    pinched = true;
                }
            } else {
                if (pc_in_t_subgroup(c, cur)) {
                    cur = pc_mul(c, stack.back().second,
                                 pc_a_power(c, pc_m_component(c, cur)));
                    stack.pop_back();
                    pinched = true;
                }
            }
        }
        if (!pinched) {
            stack.push_back({bar, cur});
            cur = pc_identity();
        }
        if (record) {
            out.y.push_back(pinched ? -1 : 1);
            out.x.push_back(static_cast<std::uint32_t>(stack.size()));
        }
    }
    out.in_h = stack.empty();
    return out;
}

WalkOutcome hnn_walk_trace(const HnnInstance& inst, std::size_t steps, Rng& rng) {
    std::vector<std::uint8_t> letters(steps);
    for (auto& l : letters) l = static_cast<std::uint8_t>(rng.below(inst.delta_size()));
    WalkOutcome out = hnn_walk(inst, letters, true);
    if (out.overflow && inst.kind() == HnnKind::Bg) return bg_walk_exact(letters, true);
    return out;
}

bool in_h_letters(std::span<const std::uint8_t> letters) {
    WalkOutcome out = hnn_walk(builtin_instance(HnnKind::Bg), letters, false);
    if (!out.overflow) return out.in_h;
    return bg_walk_exact(letters, false).in_h;
}

bool in_h(const Word& w) {
    auto letters = encode_bg_letters(w);
    return in_h_letters(letters);
}

} // namespace pcgt
