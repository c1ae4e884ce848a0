#ifndef NBAR_GF_HPP
#define NBAR_GF_HPP

#include <nbar/errors.hpp>

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

namespace nbar {

// F_{p^k} with the lexicographically smallest monic irreducible modulus.
// Elements are indices 0..q-1 encoding coefficient vectors in base p
// (constant term least significant).  Prime fields use residue arithmetic
// with a lazy inverse table for q <= 2^16; small extension fields
// (q <= 256) precompute full multiplication tables.
class FieldSpec {
public:
    static std::shared_ptr<const FieldSpec> make(std::uint32_t p, std::uint32_t k);
    // explicit modulus, coefficients mod p, length k+1, monic, irreducible
    static std::shared_ptr<const FieldSpec> make_with_modulus(
        std::uint32_t p, std::uint32_t k, std::vector<std::uint32_t> modulus);

    std::uint32_t p() const { return p_; }
    std::uint32_t k() const { return k_; }
    std::uint64_t q() const { return q_; }
    bool prime_field() const { return k_ == 1; }
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t neg(std::uint32_t a) const;
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t inv(std::uint32_t a) const;  // throws on 0
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;  // 0^0 == 1
    std::uint32_t from_int(std::int64_t v) const;
    std::uint32_t from_mpz(const mpz_class& v) const;

    // multiplicative order of a nonzero element
    std::uint64_t order(std::uint32_t a) const;

private:
    FieldSpec() = default;
    void build_tables();
    std::uint32_t mul_slow(std::uint32_t a, std::uint32_t b) const;

    std::uint32_t p_ = 0, k_ = 0;
    std::uint64_t q_ = 0;
    std::vector<std::uint32_t> modulus_;            // empty for prime fields
    std::vector<std::uint32_t> mul_table_;          // q*q when 2 < q <= 256, k > 1
    mutable std::vector<std::uint32_t> inv_table_;  // lazy, q <= 2^16
    mutable std::once_flag inv_once_;
};

using Field = std::shared_ptr<const FieldSpec>;

// Element bound to its field; hot loops use raw indices instead.
struct FieldElement {
    std::uint32_t idx = 0;
    Field field;

    FieldElement() = default;
    FieldElement(std::uint32_t i, Field f) : idx(i), field(std::move(f)) {}
    bool operator==(const FieldElement& o) const { return idx == o.idx; }
};

Field make_field(std::uint32_t p, std::uint32_t k);

bool is_prime_u64(std::uint64_t n);

// sum of x^e over all x in F_q: -1 if 0 < e == 0 mod (q-1), else 0 (0^0 := 1)
FieldElement power_sum(const Field& field, std::uint64_t e);

// 1 if gcd(z, q) == 1 else 0; this is N-bar(z) on P^0
int unit_indicator(const mpz_class& z, const Field& field);
int unit_indicator(std::int64_t z, const Field& field);

enum class ConicForm { sum_with_cross, sum_of_squares };  // a^2+ab+b^2, a^2+b^2

// Points of P^1(F_q) where the form does not vanish, counted by enumeration
// and cross-checked against the q - {1,0,-1} closed form (mod 3 for the
// first form, mod 4 for the second).
std::int64_t conic_count(ConicForm which, const Field& field);

}  // namespace nbar

#endif
