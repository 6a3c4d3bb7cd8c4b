#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace pcgt {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = ~NodeId{0};

// Bit-length cap for any integer a budgeted operation is allowed to expand.
// Guards against the non-elementary blow-up of tower-valued markings.
struct BigIntBudget {
    std::uint64_t max_bits = 1u << 20;
    BigIntBudget() = default;
    explicit BigIntBudget(std::uint64_t bits) : max_bits(bits) {
        if (bits < 64) throw std::invalid_argument("budget below 64 bits");
    }
};

class CircuitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Structural problem in the input (dangling reference, bad format).
class StructureError : public CircuitError {
  public:
    using CircuitError::CircuitError;
};

// Signed node set M : nodes -> {-1,0,+1}, stored sparsely and sorted by id.
// A marking is tied to the circuit whose nodes it references.
class Marking {
  public:
    Marking() = default;

    int sign_at(NodeId p) const;
    void set(NodeId p, int sign); // sign in {-1,0,+1}; 0 erases
    bool empty() const { return digits_.empty(); }
    std::size_t size() const { return digits_.size(); }
    void clear() { digits_.clear(); }

    const std::vector<std::pair<NodeId, std::int8_t>>& digits() const { return digits_; }

    friend bool operator==(const Marking&, const Marking&) = default;

  private:
    std::vector<std::pair<NodeId, std::int8_t>> digits_;
};

Marking negate(Marking m);

// A power circuit kept in reduced form: node values are pairwise distinct
// powers of two, maintained in a strictly increasing order together with
// flags telling whether two order-neighbours differ by exactly one doubling.
// That order plus the flags is what lets sign/compare run without ever
// expanding a value.  Nodes are append-only; operations may extend the
// circuit but never change or remove existing nodes, so markings created
// earlier stay valid.  A value-1 leaf is always present.
class ReducedCircuit {
  public:
    ReducedCircuit();

    std::size_t node_count() const { return order_.size(); }
    NodeId leaf() const { return leaf_; }
    const Marking& lambda(NodeId p) const { return pool_[p].lambda; }
    NodeId node_at(std::size_t rank) const { return order_[rank]; }
    std::uint32_t rank_of(NodeId p) const { return rank_[p]; }
    std::uint64_t work() const { return work_; }
    void reset_work() { work_ = 0; }

    // --- exact queries, never expand ---------------------------------
    int sign(const Marking& m) const;
    int compare(const Marking& a, const Marking& b) const; // -1,0,+1
    bool is_zero(const Marking& m) const { return sign(m) == 0; }
    // value(a) == value(b) + 1
    bool equals_plus_one(const Marking& a, const Marking& b) const;
    int compare_node_values(NodeId p, NodeId q) const;

    // --- marking constructors -----------------------------------------
    Marking unit() const; // evaluates to 1
    Marking singleton(NodeId p, int sign) const;
    Marking constant(long v);            // may create chain nodes
    Marking embed(const mpz_class& v);   // may create chain nodes

    // --- arithmetic (may extend the circuit) ---------------------------
    Marking add(const Marking& a, const Marking& b);
    Marking sub(const Marking& a, const Marking& b);
    // 2^{e} * m with e >= 0; throws CircuitError on negative exponent.
    Marking mul_pow2(const Marking& e, const Marking& m);
    struct OddDecomposition {
        Marking x; // 2-adic valuation
        Marking u; // odd part (or empty when input is zero)
    };
    OddDecomposition decompose_odd(const Marking& m);

    // --- budgeted expansion -------------------------------------------
    std::optional<mpz_class> evaluate(const Marking& m, const BigIntBudget& budget) const;
    // does value(d) divide value(n)?  value(d) must be nonzero.
    std::optional<bool> divides(const Marking& d, const Marking& n, const BigIntBudget& budget) const;

    // Insert a node with the given successor marking (which must be a valid
    // marking on this circuit), or return the existing node of equal value.
    NodeId find_or_create(const Marking& lambda);

    // Proper marking from an arbitrary signed digit combination over nodes.
    Marking make_marking(const std::vector<std::pair<NodeId, int>>& digits);

  private:
    struct Node {
        Marking lambda;
    };

    std::vector<Node> pool_;
    std::vector<NodeId> order_;       // live nodes, ascending value
    std::vector<std::uint32_t> rank_; // node id -> position in order_
    std::vector<std::uint8_t> dbl_;   // dbl_[i]: value(order_[i+1]) == 2*value(order_[i])
    NodeId leaf_ = 0;
    mutable std::uint64_t work_ = 0;

    friend class CircuitBuilder;

    using DigitVec = std::vector<std::pair<std::uint32_t, int>>; // (rank, digit)

    DigitVec digit_diff(const Marking& a, const Marking* b) const;
    int scan_sign(DigitVec digits, int leaf_extra) const;
    Marking normalize(std::map<NodeId, int> digits);
    NodeId double_node(NodeId p);
    NodeId insert_node(Marking lambda, std::uint32_t pos);
    void ensure_chain(std::size_t bits);
};

// ---------------------------------------------------------------------
// Raw (unreduced) circuits: the exchange and construction format.
// ---------------------------------------------------------------------

struct RawCircuit {
    // lambda[i] = successor marking of node i over node indices.
    std::vector<std::vector<std::pair<std::uint32_t, std::int8_t>>> lambda;
    std::vector<std::string> names; // optional, same length as lambda

    std::size_t size() const { return lambda.size(); }
    std::uint32_t add_node(std::vector<std::pair<std::uint32_t, std::int8_t>> succ = {},
                           std::string name = {});
};

struct RawMarking {
    std::string name;
    std::vector<std::pair<std::uint32_t, std::int8_t>> digits;
};

struct ReducedInstance {
    ReducedCircuit circuit;
    std::vector<Marking> markings;
    std::vector<NodeId> node_map; // raw index -> reduced node
};

// Reduce to canonical form; throws CircuitError when the input is not a
// valid power circuit (cycle or a negative successor-marking value) and
// StructureError on dangling references.
ReducedInstance reduce(const RawCircuit& c, const std::vector<RawMarking>& markings);

// True iff the support digraph is acyclic and every node value is a positive
// power of two (equivalently every marking evaluates to an integer).
// Dangling references raise StructureError instead of returning false.
bool validate(const RawCircuit& c, const std::vector<RawMarking>& markings);

// Disjoint union; returns the reindexing offsets of each input circuit.
RawCircuit merge(const std::vector<const RawCircuit*>& parts, std::vector<std::uint32_t>& offsets);

// Binary-basis circuit for one integer (Example-style construction):
// nodes of value 2^0 .. 2^floor(log2 |v|) plus a marking evaluating to v.
std::pair<RawCircuit, RawMarking> from_int(const mpz_class& v);

// Chain circuit of max(n,1) nodes whose top realizes tow(n), where
// tow(0) = 0 and tow(i+1) = 2^tow(i); the marking evaluates to tow(n).
std::pair<RawCircuit, RawMarking> tower(unsigned n);

// The same value as a marking on an existing circuit.
Marking tower_marking(ReducedCircuit& c, unsigned n);

// Text format ("pc v1"):
//   pc v1
//   node <id>: <sign><id> ...
//   marking <name>: <sign><id> ...
// '#' starts a comment; ids match [A-Za-z0-9_]+; unknown directives and
// references to undeclared ids are errors (reported with line numbers).
std::string serialize(const RawCircuit& c, const std::vector<RawMarking>& markings);
std::pair<RawCircuit, std::vector<RawMarking>> parse_circuit(const std::string& text);

// Export a reduced circuit (value order becomes node order n0, n1, ...).
RawCircuit to_raw(const ReducedCircuit& c);
RawMarking to_raw_marking(const ReducedCircuit& c, const Marking& m, std::string name);

} // namespace pcgt
