#include "pcgt/power_circuit.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace pcgt {

namespace {
int sgn(long long v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }
} // namespace

// ---------------------------------------------------------------- Marking

int Marking::sign_at(NodeId p) const {
    auto it = std::lower_bound(digits_.begin(), digits_.end(), p,
                               [](const auto& d, NodeId q) { return d.first < q; });
    return (it != digits_.end() && it->first == p) ? it->second : 0;
}

void Marking::set(NodeId p, int sign) {
    assert(sign >= -1 && sign <= 1);
    auto it = std::lower_bound(digits_.begin(), digits_.end(), p,
                               [](const auto& d, NodeId q) { return d.first < q; });
    if (it != digits_.end() && it->first == p) {
        if (sign == 0)
            digits_.erase(it);
        else
            it->second = static_cast<std::int8_t>(sign);
    } else if (sign != 0) {
        digits_.insert(it, {p, static_cast<std::int8_t>(sign)});
    }
}

Marking negate(Marking m) {
    // Marking stores digits by value; flipping in place is fine.
    Marking out = std::move(m);
    auto digits = out.digits();
    Marking flipped;
    for (auto [p, s] : digits) flipped.set(p, -s);
    return flipped;
}

// --------------------------------------------------------- ReducedCircuit

ReducedCircuit::ReducedCircuit() {
    pool_.push_back(Node{Marking{}});
    order_.push_back(0);
    rank_.push_back(0);
    dbl_.push_back(0);
    leaf_ = 0;
}

int ReducedCircuit::sign(const Marking& m) const {
    int best_sign = 0;
    std::uint32_t best_rank = 0;
    for (auto [p, s] : m.digits()) {
        ++work_;
        if (best_sign == 0 || rank_[p] > best_rank) {
            best_rank = rank_[p];
            best_sign = s;
        }
    }
    return best_sign;
}

ReducedCircuit::DigitVec ReducedCircuit::digit_diff(const Marking& a, const Marking* b) const {
    DigitVec out;
    out.reserve(a.size() + (b ? b->size() : 0));
    for (auto [p, s] : a.digits()) out.push_back({rank_[p], s});
    if (b)
        for (auto [p, s] : b->digits()) out.push_back({rank_[p], -s});
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    DigitVec merged;
    for (auto [r, d] : out) {
        if (!merged.empty() && merged.back().first == r)
            merged.back().second += d;
        else
            merged.push_back({r, d});
    }
    std::erase_if(merged, [](const auto& e) { return e.second == 0; });
    return merged;
}

// Sign of sum(digits[i] * value(order_[rank_i])) + leaf_extra, decided from
// the top of the order without expanding values.  Works for |digit| <= 2 and
// |leaf_extra| <= 1: below any rank r the remainder is bounded in magnitude
// by 2*(value(r)-1)+1 < 2*value(r), so a running top-part of absolute value
// >= 2 (in units of value(r)) settles the sign; across a gap that is not a
// single doubling the unit ratio is >= 4 and a nonzero top-part settles it
// as well.
int ReducedCircuit::scan_sign(DigitVec digits, int leaf_extra) const {
    if (leaf_extra != 0) {
        if (!digits.empty() && digits.back().first == 0)
            digits.back().second += leaf_extra;
        else
            digits.push_back({0, leaf_extra});
        std::erase_if(digits, [](const auto& e) { return e.second == 0; });
    }
    if (digits.empty()) return 0;
    const std::uint32_t r_stop = digits.back().first;
    int T = 0;
    std::size_t idx = 0;
    std::uint32_t r = digits.front().first;
    for (;;) {
        ++work_;
        if (idx < digits.size() && digits[idx].first == r) T += digits[idx++].second;
        if (r == r_stop) return sgn(T);
        if (T == 0) {
            r = digits[idx].first; // next relevant rank; value ratio irrelevant at 0
            continue;
        }
        if (T <= -2 || T >= 2) return sgn(T);
        if (!dbl_[r - 1]) return sgn(T); // ratio >= 4 dominates everything below
        T *= 2;
        --r;
    }
}

int ReducedCircuit::compare(const Marking& a, const Marking& b) const {
    return scan_sign(digit_diff(a, &b), 0);
}

bool ReducedCircuit::equals_plus_one(const Marking& a, const Marking& b) const {
    return scan_sign(digit_diff(a, &b), -1) == 0;
}

int ReducedCircuit::compare_node_values(NodeId p, NodeId q) const {
    if (p == q) return 0;
    return compare(pool_[p].lambda, pool_[q].lambda);
}

Marking ReducedCircuit::unit() const {
    Marking m;
    m.set(leaf_, 1);
    return m;
}

Marking ReducedCircuit::singleton(NodeId p, int sign) const {
    Marking m;
    m.set(p, sign);
    return m;
}

NodeId ReducedCircuit::insert_node(Marking lambda, std::uint32_t pos) {
    assert(pos >= 1); // nothing is smaller than the leaf
    // Neighbour flags are computed before touching the order so that the
    // scans only ever see a consistent structure.
    bool flag_left = equals_plus_one(lambda, pool_[order_[pos - 1]].lambda);
    bool flag_right = pos < order_.size() &&
                      equals_plus_one(pool_[order_[pos]].lambda, lambda);
    NodeId id = static_cast<NodeId>(pool_.size());
    pool_.push_back(Node{std::move(lambda)});
    order_.insert(order_.begin() + pos, id);
    rank_.push_back(0);
    for (std::size_t i = pos; i < order_.size(); ++i) rank_[order_[i]] = static_cast<std::uint32_t>(i);
    dbl_.insert(dbl_.begin() + pos, flag_right ? 1 : 0);
    dbl_[pos - 1] = flag_left ? 1 : 0;
    work_ += order_.size() - pos;
    return id;
}

NodeId ReducedCircuit::find_or_create(const Marking& lambda) {
    std::uint32_t lo = 0, hi = static_cast<std::uint32_t>(order_.size());
    while (lo < hi) {
        std::uint32_t mid = (lo + hi) / 2;
        int c = compare(lambda, pool_[order_[mid]].lambda);
        if (c == 0) return order_[mid];
        if (c < 0)
            hi = mid;
        else
            lo = mid + 1;
    }
    return insert_node(lambda, lo);
}

NodeId ReducedCircuit::double_node(NodeId p) {
    std::uint32_t pos = rank_[p];
    if (pos + 1 < order_.size() && dbl_[pos]) return order_[pos + 1];
    std::map<NodeId, int> dm;
    for (auto [q, s] : pool_[p].lambda.digits()) dm[q] += s;
    dm[leaf_] += 1;
    Marking lam = normalize(std::move(dm)); // may insert nodes strictly below 2*value(p)
    pos = rank_[p];
    if (pos + 1 < order_.size() && dbl_[pos]) return order_[pos + 1];
    return insert_node(std::move(lam), pos + 1);
}

// Resolve digits outside {-1,0,+1} by carrying into doubled nodes.  The sum
// of absolute digit values drops with every carry, so this terminates.
Marking ReducedCircuit::normalize(std::map<NodeId, int> digits) {
    for (;;) {
        NodeId worst = kNoNode;
        std::uint32_t worst_rank = 0;
        for (auto& [p, d] : digits) {
            ++work_;
            if (d >= 2 || d <= -2) {
                if (worst == kNoNode || rank_[p] < worst_rank) {
                    worst = p;
                    worst_rank = rank_[p];
                }
            }
        }
        if (worst == kNoNode) break;
        int d = digits[worst];
        int rem = d % 2;
        int carry = d / 2;
        digits[worst] = rem;
        NodeId up = double_node(worst); // may shift ranks; map keys are stable ids
        digits[up] += carry;
    }
    Marking out;
    for (auto& [p, d] : digits)
        if (d != 0) out.set(p, d);
    return out;
}

Marking ReducedCircuit::make_marking(const std::vector<std::pair<NodeId, int>>& digits) {
    std::map<NodeId, int> dm;
    for (auto [p, d] : digits) dm[p] += d;
    return normalize(std::move(dm));
}

Marking ReducedCircuit::add(const Marking& a, const Marking& b) {
    std::map<NodeId, int> dm;
    for (auto [p, s] : a.digits()) dm[p] += s;
    for (auto [p, s] : b.digits()) dm[p] += s;
    return normalize(std::move(dm));
}

Marking ReducedCircuit::sub(const Marking& a, const Marking& b) {
    std::map<NodeId, int> dm;
    for (auto [p, s] : a.digits()) dm[p] += s;
    for (auto [p, s] : b.digits()) dm[p] -= s;
    return normalize(std::move(dm));
}

Marking ReducedCircuit::mul_pow2(const Marking& e, const Marking& m) {
    if (sign(e) < 0) throw CircuitError("mul_pow2: negative exponent");
    std::vector<std::pair<NodeId, int>> shifted;
    shifted.reserve(m.size());
    for (auto [p, s] : m.digits()) {
        std::map<NodeId, int> dm;
        for (auto [q, t] : pool_[p].lambda.digits()) dm[q] += t;
        for (auto [q, t] : e.digits()) dm[q] += t;
        Marking lam = normalize(std::move(dm));
        shifted.push_back({find_or_create(lam), s});
    }
    Marking out;
    for (auto [q, s] : shifted) out.set(q, s);
    return out;
}

ReducedCircuit::OddDecomposition ReducedCircuit::decompose_odd(const Marking& m) {
    if (m.empty()) return {Marking{}, Marking{}};
    NodeId low = kNoNode;
    for (auto [p, s] : m.digits())
        if (low == kNoNode || rank_[p] < rank_[low]) low = p;
    Marking x = pool_[low].lambda;
    Marking neg_x = negate(x);
    std::vector<std::pair<NodeId, int>> shifted;
    for (auto [p, s] : m.digits()) {
        std::map<NodeId, int> dm;
        for (auto [q, t] : pool_[p].lambda.digits()) dm[q] += t;
        for (auto [q, t] : neg_x.digits()) dm[q] += t;
        Marking lam = normalize(std::move(dm));
        shifted.push_back({find_or_create(lam), s});
    }
    Marking u;
    for (auto [q, s] : shifted) u.set(q, s);
    return {std::move(x), std::move(u)};
}

void ReducedCircuit::ensure_chain(std::size_t bits) {
    NodeId cur = leaf_;
    for (std::size_t i = 0; i < bits; ++i) cur = double_node(cur);
}

Marking ReducedCircuit::constant(long v) {
    return embed(mpz_class(v));
}

Marking ReducedCircuit::embed(const mpz_class& v) {
    if (v == 0) return Marking{};
    mpz_class a = abs(v);
    int s = v > 0 ? 1 : -1;
    std::size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
    ensure_chain(bits - 1);
    Marking out;
    NodeId cur = leaf_;
    for (std::size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(a.get_mpz_t(), i)) out.set(cur, s);
        if (i + 1 < bits) cur = order_[rank_[cur] + 1]; // chain guaranteed by ensure_chain
    }
    return out;
}

std::optional<mpz_class> ReducedCircuit::evaluate(const Marking& m, const BigIntBudget& budget) const {
    std::unordered_map<NodeId, mpz_class> value;
    // Iterative DFS over successor arcs; the graph is acyclic by construction.
    std::vector<std::pair<NodeId, bool>> stack;
    auto need = [&](NodeId p) {
        if (!value.count(p)) stack.push_back({p, false});
    };
    for (auto [p, s] : m.digits()) need(p);
    while (!stack.empty()) {
        auto [p, expanded] = stack.back();
        stack.pop_back();
        if (value.count(p)) continue;
        if (!expanded) {
            stack.push_back({p, true});
            for (auto [q, s] : pool_[p].lambda.digits()) need(q);
            continue;
        }
        mpz_class e = 0;
        for (auto [q, s] : pool_[p].lambda.digits()) e += s * value.at(q);
        ++work_;
        if (e < 0) throw CircuitError("node with negative successor value");
        if (mpz_cmp_ui(e.get_mpz_t(), 0) != 0 &&
            mpz_sizeinbase(e.get_mpz_t(), 2) > 64) return std::nullopt;
        unsigned long bits = e.get_ui();
        if (bits > budget.max_bits) return std::nullopt;
        mpz_class v = 1;
        v <<= bits;
        value.emplace(p, std::move(v));
    }
    mpz_class out = 0;
    for (auto [p, s] : m.digits()) out += s * value.at(p);
    return out;
}

std::optional<bool> ReducedCircuit::divides(const Marking& d, const Marking& n,
                                            const BigIntBudget& budget) const {
    if (sign(d) == 0) throw CircuitError("divides: zero divisor");
    auto dv = evaluate(d, budget);
    if (!dv) return std::nullopt;
    auto nv = evaluate(n, budget);
    if (!nv) return std::nullopt;
    return mpz_divisible_p(nv->get_mpz_t(), dv->get_mpz_t()) != 0;
}

// ------------------------------------------------------------ RawCircuit

std::uint32_t RawCircuit::add_node(std::vector<std::pair<std::uint32_t, std::int8_t>> succ,
                                   std::string name) {
    lambda.push_back(std::move(succ));
    names.push_back(std::move(name));
    return static_cast<std::uint32_t>(lambda.size() - 1);
}

ReducedInstance reduce(const RawCircuit& c, const std::vector<RawMarking>& markings) {
    const std::size_t n = c.size();
    for (const auto& lam : c.lambda)
        for (auto [q, s] : lam)
            if (q >= n) throw StructureError("successor refers to unknown node");
    for (const auto& m : markings)
        for (auto [q, s] : m.digits)
            if (q >= n) throw StructureError("marking refers to unknown node");

    // Topological order over the dependency DAG (node after its successors).
    std::vector<std::uint32_t> deg(n, 0);
    std::vector<std::vector<std::uint32_t>> users(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t d = 0;
        for (auto [q, s] : c.lambda[i]) {
            if (s == 0) continue;
            ++d;
            users[q].push_back(i);
        }
        deg[i] = d;
    }
    std::deque<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < n; ++i)
        if (deg[i] == 0) ready.push_back(i);
    std::vector<std::uint32_t> topo;
    topo.reserve(n);
    while (!ready.empty()) {
        std::uint32_t i = ready.front();
        ready.pop_front();
        topo.push_back(i);
        for (auto u : users[i])
            if (--deg[u] == 0) ready.push_back(u);
    }
    if (topo.size() != n) throw CircuitError("circuit has a cycle");

    ReducedInstance out;
    out.node_map.assign(n, kNoNode);
    for (auto i : topo) {
        std::vector<std::pair<NodeId, int>> dm;
        for (auto [q, s] : c.lambda[i])
            if (s != 0) dm.push_back({out.node_map[q], s});
        Marking lam = out.circuit.make_marking(dm);
        if (out.circuit.sign(lam) < 0)
            throw CircuitError("node with negative successor value");
        out.node_map[i] = out.circuit.find_or_create(lam);
    }
    for (const auto& m : markings) {
        std::vector<std::pair<NodeId, int>> dm;
        for (auto [q, s] : m.digits) dm.push_back({out.node_map[q], s});
        out.markings.push_back(out.circuit.make_marking(dm));
    }
    return out;
}

bool validate(const RawCircuit& c, const std::vector<RawMarking>& markings) {
    try {
        reduce(c, markings);
        return true;
    } catch (const StructureError&) {
        throw;
    } catch (const CircuitError&) {
        return false;
    }
}

RawCircuit merge(const std::vector<const RawCircuit*>& parts, std::vector<std::uint32_t>& offsets) {
    RawCircuit out;
    offsets.clear();
    for (const auto* part : parts) {
        std::uint32_t off = static_cast<std::uint32_t>(out.size());
        offsets.push_back(off);
        for (std::size_t i = 0; i < part->size(); ++i) {
            auto succ = part->lambda[i];
            for (auto& [q, s] : succ) q += off;
            out.lambda.push_back(std::move(succ));
            out.names.push_back({});
        }
    }
    return out;
}

std::pair<RawCircuit, RawMarking> from_int(const mpz_class& v) {
    RawCircuit c;
    RawMarking m;
    m.name = "M";
    c.add_node(); // value 1
    if (v == 0) return {std::move(c), std::move(m)};
    mpz_class a = abs(v);
    std::int8_t s = v > 0 ? 1 : -1;
    std::size_t bits = mpz_sizeinbase(a.get_mpz_t(), 2);
    for (std::uint32_t i = 1; i < bits; ++i) {
        // node of value 2^i: successor marking is the binary notation of i
        std::vector<std::pair<std::uint32_t, std::int8_t>> succ;
        for (std::uint32_t b = 0; (1u << b) <= i; ++b)
            if (i & (1u << b)) succ.push_back({b, 1});
        c.add_node(std::move(succ));
    }
    for (std::uint32_t i = 0; i < bits; ++i)
        if (mpz_tstbit(a.get_mpz_t(), i)) m.digits.push_back({i, s});
    return {std::move(c), std::move(m)};
}

std::pair<RawCircuit, RawMarking> tower(unsigned n) {
    RawCircuit c;
    RawMarking m;
    m.name = "M";
    unsigned count = std::max(n, 1u);
    c.add_node();
    for (unsigned i = 1; i < count; ++i)
        c.add_node({{static_cast<std::uint32_t>(i - 1), 1}});
    if (n >= 1) m.digits.push_back({count - 1, 1});
    return {std::move(c), std::move(m)};
}

RawCircuit to_raw(const ReducedCircuit& c) {
    RawCircuit out;
    for (std::size_t i = 0; i < c.node_count(); ++i) {
        std::vector<std::pair<std::uint32_t, std::int8_t>> succ;
        for (auto [q, s] : c.lambda(c.node_at(i)).digits()) succ.push_back({c.rank_of(q), s});
        std::sort(succ.begin(), succ.end());
        out.add_node(std::move(succ), "n" + std::to_string(i));
    }
    return out;
}

RawMarking to_raw_marking(const ReducedCircuit& c, const Marking& m, std::string name) {
    RawMarking out;
    out.name = std::move(name);
    for (auto [q, s] : m.digits()) out.digits.push_back({c.rank_of(q), s});
    std::sort(out.digits.begin(), out.digits.end());
    return out;
}

Marking tower_marking(ReducedCircuit& c, unsigned n) {
    Marking m;
    for (unsigned i = 0; i < n; ++i) m = c.singleton(c.find_or_create(m), 1);
    return m;
}

// --------------------------------------------------------- text format

namespace {

std::string node_label(const RawCircuit& c, std::size_t i) {
    if (i < c.names.size() && !c.names[i].empty()) return c.names[i];
    return "n" + std::to_string(i);
}

bool valid_id(const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
    return true;
}

} // namespace

std::string serialize(const RawCircuit& c, const std::vector<RawMarking>& markings) {
    std::ostringstream out;
    out << "pc v1\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        out << "node " << node_label(c, i) << ":";
        for (auto [q, s] : c.lambda[i]) out << ' ' << (s > 0 ? '+' : '-') << node_label(c, q);
        out << '\n';
    }
    for (const auto& m : markings) {
        out << "marking " << (m.name.empty() ? "M" : m.name) << ":";
        for (auto [q, s] : m.digits) out << ' ' << (s > 0 ? '+' : '-') << node_label(c, q);
        out << '\n';
    }
    return out.str();
}

std::pair<RawCircuit, std::vector<RawMarking>> parse_circuit(const std::string& text) {
    RawCircuit c;
    std::vector<RawMarking> markings;
    std::unordered_map<std::string, std::uint32_t> ids;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) -> void {
        throw StructureError("line " + std::to_string(lineno) + ": " + what);
    };

    bool saw_header = false;
    // Pass 1: declare nodes so forward references inside successor lists work.
    {
        std::istringstream first(text);
        int ln = 0;
        while (std::getline(first, line)) {
            ++ln;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string word;
            if (!(ls >> word)) continue;
            if (word == "node") {
                std::string name;
                ls >> name;
                if (!name.empty() && name.back() == ':') name.pop_back();
                if (!valid_id(name))
                    throw StructureError("line " + std::to_string(ln) + ": bad node id");
                if (ids.count(name))
                    throw StructureError("line " + std::to_string(ln) + ": duplicate node id");
                ids[name] = c.add_node({}, name);
            }
        }
    }

    auto parse_signed_list = [&](std::istringstream& ls,
                                 std::vector<std::pair<std::uint32_t, std::int8_t>>& out) {
        std::string tok;
        while (ls >> tok) {
            if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-')) fail("expected signed id");
            std::string name = tok.substr(1);
            if (!valid_id(name)) fail("bad id '" + name + "'");
            auto it = ids.find(name);
            if (it == ids.end()) fail("reference to undeclared node '" + name + "'");
            out.push_back({it->second, tok[0] == '+' ? std::int8_t{1} : std::int8_t{-1}});
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (!saw_header) {
            std::string ver;
            ls >> ver;
            if (word != "pc" || ver != "v1") fail("expected 'pc v1' header");
            saw_header = true;
            continue;
        }
        if (word == "node") {
            std::string name;
            ls >> name;
            if (!name.empty() && name.back() == ':') name.pop_back();
            std::vector<std::pair<std::uint32_t, std::int8_t>> succ;
            parse_signed_list(ls, succ);
            // merge duplicate targets; opposite signs cancel
            std::map<std::uint32_t, int> dm;
            for (auto [q, s] : succ) dm[q] += s;
            succ.clear();
            for (auto [q, d] : dm) {
                if (d == 0) continue;
                if (d < -1 || d > 1) fail("node digit out of range for '" + name + "'");
                succ.push_back({q, static_cast<std::int8_t>(d)});
            }
            c.lambda[ids[name]] = std::move(succ);
        } else if (word == "marking") {
            std::string name;
            ls >> name;
            if (!name.empty() && name.back() == ':') name.pop_back();
            if (!valid_id(name)) fail("bad marking name");
            RawMarking m;
            m.name = name;
            parse_signed_list(ls, m.digits);
            std::map<std::uint32_t, int> dm;
            for (auto [q, s] : m.digits) dm[q] += s;
            m.digits.clear();
            for (auto [q, d] : dm) {
                if (d == 0) continue;
                if (d < -1 || d > 1) fail("marking digit out of range in '" + name + "'");
                m.digits.push_back({q, static_cast<std::int8_t>(d)});
            }
            markings.push_back(std::move(m));
        } else {
            fail("unknown directive '" + word + "'");
        }
    }
    if (!saw_header) throw StructureError("line 1: expected 'pc v1' header");

    // Acyclicity and integrality are part of the format contract.
    reduce(c, markings);
    return {std::move(c), std::move(markings)};
}

} // namespace pcgt
