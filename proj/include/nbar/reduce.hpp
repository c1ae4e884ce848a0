#ifndef NBAR_REDUCE_HPP
#define NBAR_REDUCE_HPP

#include <nbar/count.hpp>
#include <nbar/graphpoly.hpp>
#include <nbar/qpoly.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace nbar {

// Z[q] extended by unit indicators u_c = [gcd(c,q)=1] for squarefree c >= 2:
// value(q) = plain(q) + sum_c u_c(q) * units[c](q).
struct UCoeff {
    QPoly plain;
    std::map<Int, QPoly> units;

    static UCoeff zero() { return {}; }
    static UCoeff one();
    static UCoeff from(QPoly p);
    static UCoeff unit(const Int& c);  // the symbol u_rad(|c|)

    bool is_zero() const;
    UCoeff operator+(const UCoeff& o) const;
    UCoeff operator-(const UCoeff& o) const;
    UCoeff operator*(const UCoeff& o) const;
    UCoeff operator-() const;
    bool operator==(const UCoeff&) const = default;

    Int eval(const Field& field) const;
    std::string str() const;
};

// ---- expression state ---------------------------------------------------------

struct CountTerm {
    UCoeff coeff;
    PolySystem sys;
};

struct CountExpression {
    std::vector<CountTerm> terms;

    void merge();  // combine equal systems, drop zero coefficients
    // brute-force value: sum of coeff(q) * complement-count(sys) by
    // enumeration; the soundness oracle for every rewrite rule
    Int eval_enumerated(const Field& field, std::uint64_t budget = kDefaultBudget) const;
    Int eval_multilinear(const Field& field, std::uint64_t budget = kDefaultBudget) const;
};

// ---- spec-level rewrite rules ---------------------------------------------------

// Inclusion-exclusion on the factorization of polys[poly_idx] in terms[term_idx]:
// Nbar(f1 f2, R) = Nbar(f1, R) + Nbar(f2, R) - Nbar(f1, f2, R).
CountExpression expand_product(const CountExpression& e, std::size_t term_idx,
                               std::size_t poly_idx);

// Elimination of `var`, linear in polys[poly_idx] (three-term replacement).
CountExpression eliminate_linear(const CountExpression& e, std::size_t term_idx,
                                 std::size_t poly_idx, Var var);

// Coordinate rescaling x_i -> x_i g/h for i in I on an affine term.
CountExpression rescale(const CountExpression& e, std::size_t term_idx,
                        const std::vector<Var>& I, const SparsePoly& g,
                        const SparsePoly& h);

// First applicable of the degree-shortcut corollaries, hypothesis-checked:
// the five-term bilinear rule, the two-polynomial rule, the single-poly rule.
CountExpression cor_shortcuts(const CountExpression& e);

enum class Theorem1Mode { Vertex, VertexAlt, Triangle };

// Entry expression at a 3-valent vertex (optionally through a triangle).
CountExpression theorem1_entry(const Multigraph& g, Theorem1Mode mode);

// ---- denominator reduction -------------------------------------------------------

struct DenomReduction {
    int vars_remaining = 0;            // m of the reduced denominator
    SparsePoly psi;                    // constant polynomial when fully reduced
    int sign = 1;                      // Nbar(Psi)/q^2 == sign * Nbar(psi) mod q
    int edges_used = 0;
    Int exceptional = 1;               // primes dividing dropped integer contents
    bool complete = false;             // sequence exhausted or integer reached
};

DenomReduction denominator_reduce(const Multigraph& g, const std::vector<int>& sequence);

// ---- the reduction engine ---------------------------------------------------------

struct Residual {
    UCoeff coeff;
    PolySystem sys;
    std::string kind;  // "unit", "conic_sum_cross", "conic_sum_squares",
                       // "quartic_f", "general"
};

struct TraceStep {
    std::string rule;
    std::uint64_t sys_hash = 0;
    std::string note;
};

struct ReductionReport {
    QPoly resolved;
    std::vector<Residual> residuals;
    std::vector<TraceStep> trace;
    bool fully_resolved() const { return residuals.empty(); }
    // resolved(q) + sum coeff(q) * Nbar(residual) at the given field
    Int eval(const Field& field, std::uint64_t budget = kDefaultBudget) const;
};

class Reducer {
public:
    struct Options {
        int max_depth = 512;
        int rescale_budget = 4;
        bool enable_rescale = true;
        bool trace = true;
        // verify every rewrite numerically at these fields (soundness mode)
        std::vector<Field> verify_fields;
        std::uint64_t verify_budget = 1ull << 22;
    };

    Reducer();
    explicit Reducer(Options opt);

    // Full reduction of Nbar(sys) into resolved + residuals.
    ReductionReport reduce(const PolySystem& sys);

    const std::vector<TraceStep>& trace() const { return trace_; }
    void clear_cache() { memo_.clear(); }

private:
    struct Result {
        UCoeff resolved;
        std::vector<Residual> residuals;
    };

    Options opt_;
    std::unordered_map<std::string, Result> memo_;
    std::vector<TraceStep> trace_;

    Result reduce_sys(PolySystem sys, int depth, int rescale_left);
    Result reduce_term(const CountTerm& t, int depth, int rescale_left);
    Result combine(const std::vector<CountTerm>& children, int depth, int rescale_left);
    void record(const char* rule, const PolySystem& sys, const std::string& note);
    void verify_step(const CountTerm& parent, const std::vector<CountTerm>& children,
                     const char* rule) const;
    std::optional<Result> closed_form(const PolySystem& sys);
    std::optional<std::string> classify_residual(const PolySystem& sys) const;
};

// Greedy ordering maximizing (#completed vertices, #completed cycles) per
// prefix, ties by smallest edge id.
std::vector<int> edge_sequence_heuristic(const Multigraph& g);

// Method-1 driver: theorem entry when the graph allows it, then the rule loop.
ReductionReport run_method1(const Multigraph& g, const std::vector<int>& sequence_hint = {},
                            Reducer* reducer = nullptr);

// Certification helper: compare report.eval against an enumerated complement
// count of the original system.
bool certify_report(const ReductionReport& report, const PolySystem& original,
                    const Field& field, std::uint64_t budget = kDefaultBudget);

// Graph polynomial system over the graph's edge variables, ordered by the
// given sequence (defaults to ascending edge id).
PolySystem psi_system(const Multigraph& g, const std::vector<int>& sequence = {});

std::string grothendieck_render(const ReductionReport& report);

}  // namespace nbar

#endif
