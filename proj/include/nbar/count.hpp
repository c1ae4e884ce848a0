#ifndef NBAR_COUNT_HPP
#define NBAR_COUNT_HPP

#include <nbar/gf.hpp>
#include <nbar/graph.hpp>
#include <nbar/poly.hpp>

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace nbar {

enum class AmbientKind { Projective, Affine };

// A list of polynomials with an explicit ambient space.  Variables are
// 1..nvars; a variable may be absent from every polynomial (the ambient
// dimension is part of the data, not derived from supports).
struct PolySystem {
    AmbientKind ambient = AmbientKind::Projective;
    std::uint32_t nvars = 0;
    std::vector<SparsePoly> polys;

    void validate() const;  // var range; homogeneity when projective
    std::string key() const;
    std::uint64_t hash() const;  // FNV-1a of key()
};

// Renames the given variables (e.g. surviving edge ids) onto 1..n and
// builds a system over exactly those coordinates.
PolySystem make_system(std::vector<SparsePoly> polys, AmbientKind kind,
                       const std::vector<Var>& coords);

inline constexpr std::uint64_t kDefaultBudget = 1ull << 36;

// Shards partition the outermost variable's values: shard (i, t) takes
// the values v with v % t == i.
struct ShardSpec {
    std::uint64_t index = 0;
    std::uint64_t total = 1;
};

struct CountJob {
    PolySystem system;
    std::uint32_t p = 2;
    std::uint32_t k = 1;
    ShardSpec shard;
};

// Number of common zeros in F_q^nvars by exhaustive enumeration with
// per-prefix incremental evaluation (projective systems are counted on the
// affine cone).  Throws budget_error naming the required shard count when
// q^nvars / shard.total exceeds the budget.
std::uint64_t count_zeros(const PolySystem& sys, const Field& field,
                          ShardSpec shard = {}, std::uint64_t budget = kDefaultBudget);

// N(f_1,...,f_m) in F_q^n; requires affine ambient.
std::uint64_t count_affine(const PolySystem& sys, const Field& field,
                           ShardSpec shard = {}, std::uint64_t budget = kDefaultBudget);

// Points of P^{nvars-1} where some f_i != 0; requires a projective system.
// (q^n - N)/(q-1) with the division asserted; systems containing a unit
// constant count the whole space, systems of zero polynomials count 0.
std::uint64_t count_projective_complement(const PolySystem& sys, const Field& field,
                                          std::uint64_t budget = kDefaultBudget);

// Affine complement q^n - N.
std::uint64_t count_affine_complement(const PolySystem& sys, const Field& field,
                                      std::uint64_t budget = kDefaultBudget);

// Same values as the enumeration counters, via recursive elimination of
// variables that appear linearly, memoized on canonicalized mod-p systems;
// falls back to enumeration on blocks with no linear variable.
std::uint64_t count_zeros_multilinear(const PolySystem& sys, const Field& field,
                                      std::uint64_t budget = kDefaultBudget);
std::uint64_t count_complement_multilinear(const PolySystem& sys, const Field& field,
                                           std::uint64_t budget = kDefaultBudget);

// Reusable eliminating counter: the memo survives across calls, so minors
// shared between systems (e.g. a whole graph corpus) are counted once.
// One instance per thread; not synchronized.
class MultilinearCounter {
public:
    explicit MultilinearCounter(Field field, std::uint64_t budget = kDefaultBudget);
    ~MultilinearCounter();
    std::uint64_t zeros(const PolySystem& sys);
    std::uint64_t complement(const PolySystem& sys);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// (boundary at x_v = 0 in P^{n-2}, dehomogenization at x_v = 1 in F_q^{n-1});
// Nbar(input) = Nbar(boundary) + affine-complement(dehomogenized).
std::pair<PolySystem, PolySystem> affine_projective_swap(const PolySystem& sys, Var v);

struct C2Report {
    std::uint32_t c2 = 0;
    std::uint64_t nbar = 0;
    bool delta_route_checked = false;
};

// c2 = Nbar(Psi)/q^2 mod q, computed from the full count and, when a
// 3-valent vertex exists, cross-checked against Nbar(Psi_del3, Delta) mod q.
C2Report c2_invariant(const Multigraph& g, const Field& field);

struct Result4Row {
    std::uint64_t p = 0;
    std::uint64_t nbar = 0;
    std::uint64_t nbar_mod_p = 0;
    std::int64_t k = -1;     // -1: falsification record, no k in range works
    double ratio = 0.0;      // 7 k^2 / p
    bool pattern_ok = false; // k==0 exactly when p==7 or p = 3,5,6 mod 7
};

// For each odd prime p <= p_max: Nbar(f) over P^3(F_p), the k with
// 28 k^2 == Nbar (mod p), and the running ratio 7k^2/p.
std::vector<Result4Row> result4_scan(std::uint64_t p_max);

// direct per-point enumeration over P^3 (small-p oracle)
std::uint64_t quartic_nbar_direct(std::uint64_t p);
// chart-structured counter (quadratic-in-d root counting, kernel-backed)
std::uint64_t quartic_nbar(std::uint64_t p);

}  // namespace nbar

#endif
