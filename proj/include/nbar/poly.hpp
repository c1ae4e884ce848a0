#ifndef NBAR_POLY_HPP
#define NBAR_POLY_HPP

#include <nbar/errors.hpp>

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nbar {

using Int = mpz_class;
using Var = std::uint32_t;

// Exponent vector, sorted by variable id, no zero exponents stored.
struct Monomial {
    struct VarPow {
        Var var;
        std::uint32_t exp;
        bool operator==(const VarPow&) const = default;
    };
    std::vector<VarPow> vp;

    static Monomial one() { return {}; }
    static Monomial var(Var v, std::uint32_t e = 1);

    bool is_one() const { return vp.empty(); }
    std::uint32_t degree() const;
    std::uint32_t deg_in(Var v) const;
    bool contains(Var v) const { return deg_in(v) > 0; }

    Monomial mul(const Monomial& o) const;
    // removes v^deg_in(v) entirely
    Monomial without(Var v) const;
    // exact division; nullopt if any exponent would go negative
    std::optional<Monomial> div(const Monomial& o) const;
    Monomial pow(std::uint32_t k) const;

    bool operator==(const Monomial&) const = default;
    // lex order with x1 > x2 > ...; higher exponent on the earliest
    // differing variable wins
    static int cmp_lex(const Monomial& a, const Monomial& b);
};

// Sparse multivariate polynomial over Z.  Terms are kept sorted in
// descending lex order with nonzero coefficients; this canonical form
// backs equality, hashing and printing.
class SparsePoly {
public:
    using Term = std::pair<Monomial, Int>;

    SparsePoly() = default;
    explicit SparsePoly(Int c);
    static SparsePoly zero() { return SparsePoly(); }
    static SparsePoly constant(Int c) { return SparsePoly(std::move(c)); }
    static SparsePoly variable(Var v);
    static SparsePoly monomial(Monomial m, Int c);
    static SparsePoly from_terms(std::vector<Term> terms);  // unsorted ok

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // nonzero integer constant value if is_constant() and !is_zero()
    const Int& constant_value() const;
    std::size_t term_count() const { return terms_.size(); }

    std::uint32_t total_degree() const;
    std::uint32_t deg_in(Var v) const;
    bool contains(Var v) const { return deg_in(v) > 0; }
    bool is_homogeneous() const;
    bool is_multilinear() const;  // every exponent <= 1
    std::vector<Var> variables() const;

    const Term& leading() const;  // largest monomial in lex order

    SparsePoly operator-() const;
    SparsePoly operator+(const SparsePoly& o) const;
    SparsePoly operator-(const SparsePoly& o) const;
    SparsePoly operator*(const SparsePoly& o) const;
    SparsePoly& operator+=(const SparsePoly& o) { *this = *this + o; return *this; }
    SparsePoly& operator-=(const SparsePoly& o) { *this = *this - o; return *this; }
    SparsePoly& operator*=(const SparsePoly& o) { *this = *this * o; return *this; }
    SparsePoly mul_int(const Int& c) const;
    SparsePoly pow(std::uint32_t k) const;
    bool operator==(const SparsePoly&) const = default;

    // coefficient polynomial of v^d (v removed from the result)
    SparsePoly coeff_in(Var v, std::uint32_t d) const;
    SparsePoly subst_zero(Var v) const;      // v := 0
    SparsePoly subst_one(Var v) const;       // v := 1
    SparsePoly subst(Var v, const SparsePoly& value) const;
    SparsePoly rename(const std::map<Var, Var>& map) const;
    Int eval_int(const std::map<Var, Int>& point) const;

    // gcd of all coefficients, positive; 0 for the zero polynomial
    Int content() const;
    // leading coefficient sign; 0 for zero polynomial
    int sign() const;
    SparsePoly divexact_int(const Int& c) const;  // throws if not exact
    std::optional<SparsePoly> divexact(const SparsePoly& d) const;

    // canonical text: "3*x1^2*x2 - x3 + 1", descending lex
    std::string str() const;
    std::string str(const std::vector<std::string>& names) const;
    // stable bytes for hashing/memo keys
    void append_key(std::string& out) const;

    static int cmp(const SparsePoly& a, const SparsePoly& b);

private:
    std::vector<Term> terms_;
    void normalize();  // sort desc, merge, drop zeros
};

// root r with r^2 == p and positive leading coefficient, if one exists
std::optional<SparsePoly> poly_sqrt(const SparsePoly& p);

// p == r^k exactly?
std::optional<SparsePoly> poly_kth_root(const SparsePoly& p, std::uint32_t k);

// Parses "x1*x2 + 2*x3^2 - 1".  Variables are x<N> (id N); arbitrary
// identifiers get consecutive ids via/into `names` when provided.
SparsePoly parse_poly(const std::string& text);
SparsePoly parse_poly(const std::string& text, std::vector<std::string>& names);

}  // namespace nbar

#endif
