#ifndef NBAR_QPOLY_HPP
#define NBAR_QPOLY_HPP

#include <nbar/poly.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace nbar {

// Dense polynomial in q over Z.
struct QPoly {
    std::vector<Int> c;  // c[i] q^i, no trailing zeros

    static QPoly zero() { return {}; }
    static QPoly constant(Int v);
    static QPoly power(std::uint32_t k, Int coeff = 1);
    // q^{n-1} + ... + 1 (points of P^{n-1}); zero for n == 0
    static QPoly projective_space(std::uint32_t n);
    // (q-1)^a * q^b
    static QPoly torus(std::uint32_t a, std::uint32_t b);

    bool is_zero() const { return c.empty(); }
    int degree() const { return int(c.size()) - 1; }
    const Int& coeff(std::uint32_t i) const;
    void trim();

    QPoly operator+(const QPoly& o) const;
    QPoly operator-(const QPoly& o) const;
    QPoly operator*(const QPoly& o) const;
    QPoly operator-() const;
    bool operator==(const QPoly&) const = default;

    Int eval(const Int& q) const;
    std::string str(const std::string& var = "q") const;
};

Int radical(Int v);  // product of distinct prime factors of |v|

}  // namespace nbar

#endif
