#include "pcgt/baumslag.hpp"

#include <algorithm>
#include <cassert>

namespace pcgt {

std::shared_ptr<ReducedCircuit> make_circuit() { return std::make_shared<ReducedCircuit>(); }

BetaFactorization bf_identity(std::shared_ptr<ReducedCircuit> c) {
    BetaFactorization out;
    out.circuit = std::move(c);
    out.head = pc_identity();
    out.britton_reduced = true;
    return out;
}

BetaFactorization bf_from_triple(std::shared_ptr<ReducedCircuit> c, PCTriple g) {
    BetaFactorization out;
    out.circuit = std::move(c);
    out.head = std::move(g);
    out.britton_reduced = true;
    return out;
}

BetaFactorization beta_factorize(const Word& w, std::shared_ptr<ReducedCircuit> c) {
    if (!c) c = make_circuit();
    BetaFactorization out;
    out.circuit = c;
    Word segment;
    bool have_factor = false;
    auto flush = [&](PCTriple& slot) {
        slot = pc_from_element(*c, eval_word(segment));
        segment.clear();
    };
    out.head = pc_identity();
    for (char ch : w) {
        if (ch == 'b' || ch == 'B') {
            PCTriple seg = pc_from_element(*c, eval_word(segment));
            segment.clear();
            if (!have_factor) {
                out.head = seg;
                have_factor = true;
            } else {
                out.factors.back().gamma = seg;
            }
            out.factors.push_back({ch == 'B', pc_identity()});
            have_factor = true;
        } else {
            segment.push_back(ch);
        }
    }
    if (!out.factors.empty())
        flush(out.factors.back().gamma);
    else
        flush(out.head);
    return out;
}

BetaFactorization bf_concat(const BetaFactorization& x, const BetaFactorization& y) {
    assert(x.circuit == y.circuit);
    ReducedCircuit& c = *x.circuit;
    BetaFactorization out = x;
    out.britton_reduced = false;
    if (out.factors.empty()) {
        out.head = pc_mul(c, out.head, y.head);
    } else {
        out.factors.back().gamma = pc_mul(c, out.factors.back().gamma, y.head);
    }
    out.factors.insert(out.factors.end(), y.factors.begin(), y.factors.end());
    return out;
}

BetaFactorization bf_invert(const BetaFactorization& x) {
    ReducedCircuit& c = *x.circuit;
    BetaFactorization out;
    out.circuit = x.circuit;
    if (x.factors.empty()) {
        out.head = pc_inv(c, x.head);
        out.britton_reduced = x.britton_reduced;
        return out;
    }
    out.head = pc_inv(c, x.factors.back().gamma);
    for (std::size_t i = x.factors.size(); i-- > 0;) {
        const PCTriple& left = i == 0 ? x.head : x.factors[i - 1].gamma;
        out.factors.push_back({!x.factors[i].bar, pc_inv(c, left)});
    }
    out.britton_reduced = x.britton_reduced; // pinches are symmetric under inversion
    return out;
}

std::vector<int> beta_signature(const BetaFactorization& x) {
    std::vector<int> out;
    out.reserve(x.factors.size());
    for (const auto& f : x.factors) out.push_back(f.bar ? -1 : 1);
    return out;
}

// Single left-to-right pass with a stack; a factor b gamma b^-1 with
// gamma = a^e collapses to t^e and b^-1 gamma b with gamma = t^e to a^e.
BetaFactorization britton_reduce(BetaFactorization z) {
    if (z.britton_reduced) return z;
    ReducedCircuit& c = *z.circuit;
    std::vector<BetaFactor> stack;
    PCTriple cur = z.head;
    for (auto& f : z.factors) {
        bool pinched = false;
        if (!stack.empty() && stack.back().bar != f.bar) {
            if (!stack.back().bar) { // b cur b^-1 with cur in <a>
                if (pc_in_a_subgroup(c, cur)) {
                    Marking e = pc_a_exponent(c, cur);
                    cur = pc_mul(c, stack.back().gamma, pc_t_power(c, e));
                    stack.pop_back();
                    pinched = true;
                }
            } else { // b^-1 cur b with cur in <t>
                if (pc_in_t_subgroup(c, cur)) {
                    Marking e = pc_m_component(c, cur);
                    cur = pc_mul(c, stack.back().gamma, pc_a_power(c, e));
                    stack.pop_back();
                    pinched = true;
                }
            }
        }
        if (!pinched) {
            stack.push_back({f.bar, cur});
            cur = pc_identity();
        }
        cur = pc_mul(c, cur, f.gamma);
    }
    BetaFactorization out;
    out.circuit = z.circuit;
    if (stack.empty()) {
        out.head = cur;
    } else {
        out.head = stack.front().gamma;
        for (std::size_t i = 0; i < stack.size(); ++i) {
            PCTriple seg = (i + 1 < stack.size()) ? stack[i + 1].gamma : cur;
            out.factors.push_back({stack[i].bar, seg});
        }
    }
    out.britton_reduced = true;
    return out;
}

namespace {

// Does the factor beta_k gamma beta_1 pinch?  (the seam of z z)
bool seam_pinch(ReducedCircuit& c, const BetaFactorization& z) {
    const auto& last = z.factors.back();
    const auto& first = z.factors.front();
    if (last.bar == first.bar) return false;
    if (!last.bar) return pc_in_a_subgroup(c, last.gamma);
    return pc_in_t_subgroup(c, last.gamma);
}

} // namespace

CyclicReduction cyclically_reduce(const BetaFactorization& z_in) {
    ReducedCircuit& c = *z_in.circuit;
    BetaFactorization z = britton_reduce(z_in);
    BetaFactorization conj = bf_identity(z_in.circuit);
    for (;;) {
        if (z.factors.empty()) return {z, conj};
        // fold gamma_0 into the tail: z ~ gamma_0^-1 z gamma_0
        if (!pc_is_identity(c, z.head)) {
            PCTriple g0 = z.head;
            conj = bf_concat(bf_from_triple(z.circuit, pc_inv(c, g0)), conj);
            z.head = pc_identity();
            z.factors.back().gamma = pc_mul(c, z.factors.back().gamma, g0);
        }
        if (!seam_pinch(c, z)) return {z, conj};
        // Rotate the leading beta_1 gamma_1 to the back; the seam pinch
        // becomes internal, so the next reduction drops the beta-length.
        BetaFactorization prefix = bf_identity(z.circuit);
        prefix.factors.push_back(z.factors.front());
        conj = bf_concat(bf_invert(prefix), conj);
        BetaFactorization rotated = bf_identity(z.circuit);
        rotated.factors.assign(z.factors.begin() + 1, z.factors.end());
        rotated.factors.push_back(z.factors.front());
        rotated.britton_reduced = false;
        z = britton_reduce(rotated);
    }
}

bool bf_is_identity(const BetaFactorization& x) {
    BetaFactorization r = britton_reduce(x);
    if (!r.factors.empty()) return false;
    return pc_is_identity(*r.circuit, r.head);
}

bool word_problem(const BetaFactorization& x, const BetaFactorization& y) {
    return bf_is_identity(bf_concat(x, bf_invert(y)));
}

bool word_problem(const Word& x, const Word& y) {
    auto c = make_circuit();
    return word_problem(beta_factorize(x, c), beta_factorize(y, c));
}

Word blowup_word(unsigned n, std::size_t cap) {
    // |w_n| = 2^{n+2} - 3
    if (n >= 62 || (std::size_t{1} << (n + 2)) - 3 > cap)
        throw std::invalid_argument("blowup word exceeds configured cap");
    Word w = {'t'};
    for (unsigned i = 0; i < n; ++i) {
        Word next;
        next.reserve(w.size() * 2 + 3);
        next.push_back('b');
        next.insert(next.end(), w.begin(), w.end());
        next.push_back('a');
        Word inv = invert_word(w);
        next.insert(next.end(), inv.begin(), inv.end());
        next.push_back('B');
        w = std::move(next);
    }
    return w;
}

BetaFactorization conjugate_by(const Word& z, const Word& x) {
    auto c = make_circuit();
    BetaFactorization zf = beta_factorize(z, c);
    BetaFactorization xf = beta_factorize(x, c);
    return britton_reduce(bf_concat(bf_concat(zf, xf), bf_invert(zf)));
}

const char* conj_path_name(ConjPath p) {
    switch (p) {
    case ConjPath::Trivial: return "trivial";
    case ConjPath::BtSingle: return "bt-single";
    case ConjPath::BtPlus: return "bt-plus";
    case ConjPath::BtMinus: return "bt-minus";
    case ConjPath::HDirect: return "h-direct";
    case ConjPath::HPower: return "h-power";
    case ConjPath::HRigid: return "h-rigid";
    }
    return "?";
}

namespace {

// rotated = prefix^-1 * x * prefix where prefix = first i factors of x
// (head of x must be trivial).
BetaFactorization transpose(const BetaFactorization& x, std::size_t i,
                            BetaFactorization& prefix_out) {
    BetaFactorization prefix = bf_identity(x.circuit);
    prefix.factors.assign(x.factors.begin(), x.factors.begin() + i);
    BetaFactorization rot = bf_identity(x.circuit);
    rot.factors.assign(x.factors.begin() + i, x.factors.end());
    rot.factors.insert(rot.factors.end(), x.factors.begin(), x.factors.begin() + i);
    prefix_out = prefix;
    return rot;
}

BetaFactorization conj_by_a_power(const BetaFactorization& x, const Marking& k) {
    ReducedCircuit& c = *x.circuit;
    PCTriple ak = pc_a_power(c, k);
    BetaFactorization out = x;
    out.britton_reduced = false;
    out.head = pc_mul(c, ak, out.head);
    if (out.factors.empty()) {
        out.head = pc_mul(c, out.head, pc_inv(c, ak));
    } else {
        out.factors.back().gamma = pc_mul(c, out.factors.back().gamma, pc_inv(c, ak));
    }
    return out;
}

} // namespace

namespace {

// Rotate a nontrivial head into the last factor: returns f' = u f u^-1 with
// trivial head, accumulating u into the given pre-conjugator (A <- u * A).
BetaFactorization fold_head(BetaFactorization f, BetaFactorization& pre) {
    ReducedCircuit& c = *f.circuit;
    if (f.factors.empty() || pc_is_identity(c, f.head)) return f;
    PCTriple g0 = f.head;
    pre = bf_concat(bf_from_triple(f.circuit, pc_inv(c, g0)), pre);
    f.head = pc_identity();
    f.factors.back().gamma = pc_mul(c, f.factors.back().gamma, g0);
    return f;
}

} // namespace

ConjugacyAnswer conj_bg_core(const BetaFactorization& x_in, const BetaFactorization& y_in) {
    assert(x_in.circuit == y_in.circuit);
    ReducedCircuit& c = *x_in.circuit;
    std::uint64_t work0 = c.work();
    ConjugacyAnswer out;

    const std::size_t n = x_in.beta_length();
    assert(n > 0);
    if (y_in.beta_length() != n) {
        out.decision = Decision::No;
        out.path = ConjPath::Trivial;
        out.work = c.work() - work0;
        return out;
    }

    BetaFactorization x = x_in, y = y_in;
    // Pre-conjugators: ax * x_in^(+-1) * ax^-1 equals the working x (and
    // likewise for y); the final witness is assembled from them.
    BetaFactorization ax = bf_identity(x.circuit);
    BetaFactorization ay = bf_identity(x.circuit);
    bool all_plus = std::none_of(x.factors.begin(), x.factors.end(),
                                 [](const BetaFactor& f) { return f.bar; });
    if (all_plus) { // replace the pair by inverses; a witness transfers as-is
        x = bf_invert(x);
        y = bf_invert(y);
    }
    x = fold_head(std::move(x), ax);
    y = fold_head(std::move(y), ay);

    std::size_t start = 0;
    while (start < n && !x.factors[start].bar) ++start;
    BetaFactorization px;
    BetaFactorization xr = transpose(x, start, px);
    ax = bf_concat(bf_invert(px), ax);
    std::vector<int> sig = beta_signature(xr);

    ConjPath path = n == 1 ? ConjPath::BtSingle
                           : (!xr.factors[1].bar ? ConjPath::BtPlus : ConjPath::BtMinus);
    const PCTriple& g1x = xr.factors[0].gamma;

    for (std::size_t i = 0; i < n; ++i) {
        BetaFactorization py;
        BetaFactorization yr = transpose(y, i, py);
        if (beta_signature(yr) != sig) continue;
        const PCTriple& g1y = yr.factors[0].gamma;

        Marking k1, k2;
        switch (path) {
        case ConjPath::BtSingle:
            // a^k x = y a^k forces k = q - m
            k1 = c.sub(pc_m_component(c, g1y), pc_m_component(c, g1x));
            break;
        case ConjPath::BtPlus:
            // unique exponents making the leading coordinates odd integers
            k1 = negate(pc_normalize(c, g1x).k);
            k2 = negate(pc_normalize(c, g1y).k);
            break;
        case ConjPath::BtMinus:
            k1 = negate(pc_m_component(c, g1x));
            k2 = negate(pc_m_component(c, g1y));
            break;
        default: break;
        }

        BetaFactorization u = conj_by_a_power(xr, k1);
        BetaFactorization v = conj_by_a_power(yr, k2);
        if (!word_problem(u, v)) continue;

        // w xr w^-1 = yr with w = a^{k1-k2}; pull back through the
        // pre-conjugators: z = ay_i^-1 w ax with z x^(+-1) z^-1 = y^(+-1),
        // and a witness for the inverted pair also works for the originals.
        BetaFactorization ayi = bf_concat(bf_invert(py), ay);
        BetaFactorization w =
            bf_from_triple(x.circuit, pc_a_power(c, c.sub(k1, k2)));
        BetaFactorization z = britton_reduce(
            bf_concat(bf_concat(bf_invert(ayi), w), ax));
        out.decision = Decision::Yes;
        out.path = path;
        out.witness = z;
        out.work = c.work() - work0;
        return out;
    }
    out.decision = Decision::No;
    out.path = path;
    out.work = c.work() - work0;
    return out;
}

ConjugacyAnswer conj_bg(const BetaFactorization& x_in, const BetaFactorization& y_in,
                        const BigIntBudget& budget) {
    assert(x_in.circuit == y_in.circuit);
    auto circ = x_in.circuit;
    ReducedCircuit& c = *circ;
    std::uint64_t work0 = c.work();
    ConjugacyAnswer out;

    CyclicReduction cx = cyclically_reduce(x_in);
    CyclicReduction cy = cyclically_reduce(y_in);

    auto finish_with_witness = [&](ConjugacyAnswer ans, const BetaFactorization& w_hat) {
        // w_hat x_hat w_hat^-1 = y_hat; pull back through both cyclic reductions.
        BetaFactorization z = britton_reduce(
            bf_concat(bf_concat(bf_invert(cy.conjugator), w_hat), cx.conjugator));
        ans.witness = z;
        if (!word_problem(bf_concat(bf_concat(z, x_in), bf_invert(z)), y_in))
            throw CircuitError("conjugacy witness failed to verify");
        return ans;
    };

    if (!cx.reduced.factors.empty() || !cy.reduced.factors.empty()) {
        if (cx.reduced.factors.size() != cy.reduced.factors.size()) {
            out.decision = Decision::No;
            out.path = ConjPath::Trivial;
            out.work = c.work() - work0;
            return out;
        }
        ConjugacyAnswer core = conj_bg_core(cx.reduced, cy.reduced);
        core.work = c.work() - work0;
        if (core.decision == Decision::Yes) return finish_with_witness(core, *core.witness);
        return core;
    }

    // Both conjugate into the base group.
    PCTriple f = pc_normalize(c, cx.reduced.head);
    PCTriple g = pc_normalize(c, cy.reduced.head);
    bool f_id = pc_is_identity(c, f), g_id = pc_is_identity(c, g);
    if (f_id || g_id) {
        out.decision = (f_id && g_id) ? Decision::Yes : Decision::No;
        out.path = ConjPath::Trivial;
        if (out.decision == Decision::Yes) return finish_with_witness(out, bf_identity(circ));
        out.work = c.work() - work0;
        return out;
    }

    // Direct base-group test first (covers t-exponent zero as well).
    PcBsConjugacy direct = conj_bs12_pc(c, f, g, budget);
    if (direct.decision == Decision::BudgetExceeded) {
        out.decision = Decision::BudgetExceeded;
        out.path = ConjPath::HDirect;
        out.work = c.work() - work0;
        return out;
    }
    if (direct.decision == Decision::Yes) {
        out.decision = Decision::Yes;
        out.path = ConjPath::HDirect;
        return finish_with_witness(out, bf_from_triple(circ, direct.witness));
    }

    // Conjugate by t^j so the coordinate is integral, then lift a^r to t^r
    // when the t-exponent vanishes.  T tracks: T x_hat T^-1 = current.
    bool lifted = false;
    auto lift = [&](PCTriple h, BetaFactorization& T) {
        if (!c.is_zero(h.k) && c.sign(h.k) < 0) {
            Marking j = negate(h.k);
            PCTriple tj = pc_t_power(c, j);
            T = bf_concat(bf_from_triple(circ, tj), T);
            h = pc_mul(c, pc_mul(c, tj, h), pc_inv(c, tj));
        }
        if (c.sign(pc_m_component(c, h)) == 0) {
            BetaFactorization bfac = bf_identity(circ);
            bfac.factors.push_back({false, pc_identity()});
            T = bf_concat(bfac, T);
            Marking r = pc_a_exponent(c, h);
            h = pc_t_power(c, r);
            lifted = true;
        }
        return h;
    };
    BetaFactorization tf = bf_identity(circ), tg = bf_identity(circ);
    PCTriple f3 = lift(f, tf);
    PCTriple g3 = lift(g, tg);

    if (lifted) { // one side may only meet the other after its lift
        PcBsConjugacy direct1 = conj_bs12_pc(c, f3, g3, budget);
        if (direct1.decision == Decision::BudgetExceeded) {
            out.decision = Decision::BudgetExceeded;
            out.path = ConjPath::HDirect;
            out.work = c.work() - work0;
            return out;
        }
        if (direct1.decision == Decision::Yes) {
            out.decision = Decision::Yes;
            out.path = ConjPath::HDirect;
            BetaFactorization w = bf_concat(
                bf_concat(bf_invert(tg), bf_from_triple(circ, direct1.witness)), tf);
            return finish_with_witness(out, w);
        }
    }

    Marking mf = pc_m_component(c, f3);
    Marking mg = pc_m_component(c, g3);
    PcBsConjugacy back_f = conj_bs12_pc(c, f3, pc_t_power(c, mf), budget);
    if (back_f.decision == Decision::BudgetExceeded) {
        out.decision = Decision::BudgetExceeded;
        out.path = ConjPath::HRigid;
        out.work = c.work() - work0;
        return out;
    }
    if (back_f.decision == Decision::No) {
        out.decision = Decision::No; // rigidity: the base-group answer is final
        out.path = ConjPath::HRigid;
        out.work = c.work() - work0;
        return out;
    }
    PcBsConjugacy back_g = conj_bs12_pc(c, g3, pc_t_power(c, mg), budget);
    if (back_g.decision == Decision::BudgetExceeded) {
        out.decision = Decision::BudgetExceeded;
        out.path = ConjPath::HRigid;
        out.work = c.work() - work0;
        return out;
    }
    if (back_g.decision == Decision::No) {
        out.decision = Decision::No;
        out.path = ConjPath::HRigid;
        out.work = c.work() - work0;
        return out;
    }

    // t^m ~ t^q iff m = 2^k q for some integer k: equal odd parts.
    auto dm = c.decompose_odd(mf);
    auto dq = c.decompose_odd(mg);
    if (c.compare(dm.u, dq.u) != 0) {
        out.decision = Decision::No;
        out.path = ConjPath::HPower;
        out.work = c.work() - work0;
        return out;
    }
    out.decision = Decision::Yes;
    out.path = ConjPath::HPower;
    // witness: t^m = (b t^k b^-1) t^q (b t^k b^-1)^-1 with k = val(m) - val(q)
    Marking kk = c.sub(dm.x, dq.x);
    BetaFactorization wv = bf_identity(circ);
    wv.factors.push_back({false, pc_t_power(c, kk)});
    wv.factors.push_back({true, pc_identity()});
    // z = B^-1 w_v^-1 A with A x A^-1 = t^m, B y B^-1 = t^q
    // A = h_a tf, B = h_b tg where h_a conjugates f3 to t^m.
    BetaFactorization A = bf_concat(bf_from_triple(circ, back_f.witness), tf);
    BetaFactorization B = bf_concat(bf_from_triple(circ, back_g.witness), tg);
    BetaFactorization w = bf_concat(bf_concat(bf_invert(B), bf_invert(wv)), A);
    return finish_with_witness(out, w);
}

ConjugacyAnswer conj_bg(const Word& x, const Word& y, const BigIntBudget& budget) {
    auto c = make_circuit();
    return conj_bg(beta_factorize(x, c), beta_factorize(y, c), budget);
}

std::pair<Word, Word> division_to_conjugacy(const ReducedCircuit& c, const Marking& m,
                                            const Marking& s, std::size_t cap) {
    if (c.sign(m) <= 0 || c.sign(s) <= 0)
        throw std::invalid_argument("division-to-conjugacy needs positive values");
    // word(P) with t^{value(P)} = word(P): t^{2^e} = b t^e a t^-e b^-1.
    std::vector<std::optional<Word>> memo(c.node_count() + 1024);
    std::size_t total = 0;
    auto bump = [&](std::size_t n) {
        total += n;
        if (total > cap) throw std::invalid_argument("division-to-conjugacy word exceeds cap");
    };
    auto word_for_marking = [&](const Marking& mk, auto&& word_for_node) -> Word {
        Word out;
        for (auto [p, sg] : mk.digits()) {
            Word wp = word_for_node(p);
            if (sg < 0) wp = invert_word(wp);
            bump(wp.size());
            out.insert(out.end(), wp.begin(), wp.end());
        }
        return out;
    };
    auto word_for_node = [&](NodeId p, auto&& self) -> Word {
        if (memo.size() <= p) memo.resize(p + 1);
        if (memo[p]) return *memo[p];
        const Marking& lam = c.lambda(p);
        Word inner = word_for_marking(lam, [&](NodeId q) { return self(q, self); });
        Word out;
        if (inner.empty()) {
            out = {'t'}; // leaf: t^1
        } else {
            out.push_back('b');
            out.insert(out.end(), inner.begin(), inner.end());
            out.push_back('a');
            Word inv = invert_word(inner);
            out.insert(out.end(), inv.begin(), inv.end());
            out.push_back('B');
        }
        bump(out.size());
        memo[p] = out;
        return out;
    };
    auto node_word = [&](NodeId p) { return word_for_node(p, word_for_node); };

    Word x = word_for_marking(m, node_word); // = t^{value(m)}
    Word ws = word_for_marking(s, node_word);
    // y = a^{2^s - 1} t^m = (t^s a t^-s) a^-1 t^m
    Word y;
    y.insert(y.end(), ws.begin(), ws.end());
    y.push_back('a');
    Word wsi = invert_word(ws);
    y.insert(y.end(), wsi.begin(), wsi.end());
    y.push_back('A');
    y.insert(y.end(), x.begin(), x.end());
    bump(y.size());
    return {std::move(x), std::move(y)};
}

} // namespace pcgt
