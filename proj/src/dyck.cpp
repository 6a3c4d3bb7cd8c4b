#include "pcgt/dyck.hpp"

#include <stdexcept>

namespace pcgt {

DyckWord make_dyck(const std::string& brackets) {
    DyckWord d;
    d.brackets = brackets;
    d.match.assign(brackets.size(), -1);
    std::vector<int> stack;
    for (int i = 0; i < static_cast<int>(brackets.size()); ++i) {
        char ch = brackets[i];
        if (ch == '(') {
            stack.push_back(i);
        } else if (ch == ')') {
            if (stack.empty()) throw std::invalid_argument("unbalanced bracket word");
            d.match[i] = stack.back();
            d.match[stack.back()] = i;
            stack.pop_back();
        } else {
            throw std::invalid_argument("bracket word must use '(' and ')'");
        }
    }
    if (!stack.empty()) throw std::invalid_argument("unbalanced bracket word");
    for (std::size_t i = 0; i + 1 < brackets.size(); ++i)
        if (brackets[i] == '(' && brackets[i + 1] == ')') ++d.adjacent_pairs;
    return d;
}

std::vector<DyckWord> enumerate_dyck(unsigned n) {
    if (n > 12) throw std::invalid_argument("dyck enumeration capped at n = 12");
    std::vector<DyckWord> out;
    std::string cur;
    auto rec = [&](auto&& self, unsigned open, unsigned close) -> void {
        if (cur.size() == 2 * n) {
            out.push_back(make_dyck(cur));
            return;
        }
        if (open < n) {
            cur.push_back('(');
            self(self, open + 1, close);
            cur.pop_back();
        }
        if (close < open) {
            cur.push_back(')');
            self(self, open, close + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

std::vector<std::uint8_t> beta_signs(std::span<const std::uint8_t> letters) {
    std::vector<std::uint8_t> out;
    for (auto l : letters)
        if (l < 2) out.push_back(l);
    return out;
}

bool dyck_matches(std::span<const std::uint8_t> letters, const DyckWord& d) {
    std::vector<std::uint8_t> betas = beta_signs(letters);
    if (betas.size() != d.brackets.size())
        throw std::invalid_argument("stable-letter count does not match bracket length");
    const std::size_t len = betas.size();
    for (std::size_t i = 0; i + 1 < len; ++i) {
        bool adj = d.brackets[i] == '(' && d.brackets[i + 1] == ')';
        bool bb = betas[i] == 0 && betas[i + 1] == 1;
        if (adj != bb) return false;
    }
    for (std::size_t i = 0; i < len; ++i) {
        if (d.brackets[i] != '(') continue;
        if (betas[d.match[i]] != (betas[i] ^ 1)) return false;
    }
    return true;
}

namespace {

// Execute the Britton reduction described by the bracket word, innermost
// pairs first.  Failure of a pinch membership test is a definite 0; range
// overflow in the fast arithmetic is reported separately so the caller can
// retry exactly.
struct FastPolicy {
    using Elem = FastH;
    bool overflow = false;
    Elem identity() const { return {}; }
    bool mul(Elem& g, const Elem& h) {
        auto r = fasth_mul(g, h);
        if (!r) return false;
        g = *r;
        return true;
    }
    bool letter(Elem& g, std::uint8_t l) {
        auto r = fasth_letter(g, l);
        if (!r) return false;
        g = *r;
        return true;
    }
    bool in_a(const Elem& g, bool& res) {
        res = fasth_in_a(g);
        return true;
    }
    bool in_t(const Elem& g, bool& res) {
        res = fasth_in_t(g);
        return true;
    }
    bool phi(Elem& g) {
        auto r = fasth_phi(g);
        if (!r) return false;
        g = *r;
        return true;
    }
    bool phi_inv(Elem& g) {
        auto r = fasth_phi_inv(g);
        if (!r) return false;
        g = *r;
        return true;
    }
};

struct ExactPolicy {
    std::shared_ptr<ReducedCircuit> circ = make_circuit();
    using Elem = PCTriple;
    Elem identity() const { return pc_identity(); }
    bool mul(Elem& g, const Elem& h) {
        g = pc_mul(*circ, g, h);
        return true;
    }
    bool letter(Elem& g, std::uint8_t l) {
        ReducedCircuit& c = *circ;
        switch (l) {
        case 2: g = pc_mul(c, g, pc_a_power(c, c.unit())); break;
        case 3: g = pc_mul(c, g, pc_a_power(c, negate(c.unit()))); break;
        case 4: g = pc_mul(c, g, pc_t_power(c, c.unit())); break;
        default: g = pc_mul(c, g, pc_t_power(c, negate(c.unit()))); break;
        }
        return true;
    }
    bool in_a(const Elem& g, bool& res) {
        res = pc_in_a_subgroup(*circ, g);
        return true;
    }
    bool in_t(const Elem& g, bool& res) {
        res = pc_in_t_subgroup(*circ, g);
        return true;
    }
    bool phi(Elem& g) {
        g = pc_t_power(*circ, pc_a_exponent(*circ, g));
        return true;
    }
    bool phi_inv(Elem& g) {
        g = pc_a_power(*circ, pc_m_component(*circ, g));
        return true;
    }
};

enum class RunResult { Success, PinchFailed, Overflow };

template <class Policy>
RunResult run_reduction(Policy& P, std::span<const std::uint8_t> letters, const DyckWord& d) {
    std::vector<std::size_t> bpos;
    for (std::size_t i = 0; i < letters.size(); ++i)
        if (letters[i] < 2) bpos.push_back(i);

    using Elem = typename Policy::Elem;
    bool pinch_failed = false;
    bool overflowed = false;

    auto eval_base = [&](std::size_t from, std::size_t to, Elem& acc) -> bool {
        for (std::size_t i = from; i < to; ++i)
            if (!P.letter(acc, letters[i])) return false;
        return true;
    };

    // returns the value of the pinched pair [lo, hi] of beta indices
    auto rec = [&](auto&& self, int lo, int hi, Elem& out) -> bool {
        Elem inner = P.identity();
        std::size_t pos = bpos[lo] + 1;
        int k = lo + 1;
        while (k < hi) {
            if (!eval_base(pos, bpos[k], inner)) return false;
            Elem child;
            if (!self(self, k, d.match[k], child)) return false;
            if (pinch_failed) return true;
            if (!P.mul(inner, child)) return false;
            pos = bpos[d.match[k]] + 1;
            k = d.match[k] + 1;
        }
        if (!eval_base(pos, bpos[hi], inner)) return false;
        bool member = false;
        if (letters[bpos[lo]] == 0) { // b inner b^-1
            if (!P.in_a(inner, member)) return false;
            if (!member) {
                pinch_failed = true;
                return true;
            }
            if (!P.phi(inner)) return false;
        } else {
            if (!P.in_t(inner, member)) return false;
            if (!member) {
                pinch_failed = true;
                return true;
            }
            if (!P.phi_inv(inner)) return false;
        }
        out = std::move(inner);
        return true;
    };

    Elem acc = P.identity();
    std::size_t pos = 0;
    int k = 0;
    const int total = static_cast<int>(bpos.size());
    while (k < total) {
        if (!eval_base(pos, bpos[k], acc)) {
            overflowed = true;
            break;
        }
        Elem child;
        if (!rec(rec, k, d.match[k], child)) {
            overflowed = true;
            break;
        }
        if (pinch_failed) break;
        if (!P.mul(acc, child)) {
            overflowed = true;
            break;
        }
        pos = bpos[d.match[k]] + 1;
        k = d.match[k] + 1;
    }
    if (overflowed) return RunResult::Overflow;
    if (pinch_failed) return RunResult::PinchFailed;
    return RunResult::Success;
}

} // namespace

bool dyck_successful(std::span<const std::uint8_t> letters, const DyckWord& d) {
    if (!dyck_matches(letters, d)) return false;
    FastPolicy fast;
    RunResult r = run_reduction(fast, letters, d);
    if (r == RunResult::Overflow) {
        ExactPolicy exact;
        r = run_reduction(exact, letters, d);
    }
    return r == RunResult::Success;
}

} // namespace pcgt
