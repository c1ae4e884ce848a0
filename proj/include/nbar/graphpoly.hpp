#ifndef NBAR_GRAPHPOLY_HPP
#define NBAR_GRAPHPOLY_HPP

#include <nbar/graph.hpp>
#include <nbar/poly.hpp>

#include <array>
#include <optional>
#include <vector>

namespace nbar {

// Kirchhoff polynomial: sum over spanning trees of the product of variables
// of edges NOT in the tree.  Computed by deletion/contraction; a loop
// contributes a bare x_e factor.  Variables are edge ids.  Isolated vertices
// are ignored; otherwise-disconnected input throws.
SparsePoly graph_polynomial(const Multigraph& g);

// 0 when the graph (isolated vertices aside) has no spanning tree.  The
// theorem-shaped identities need this convention for minors.
SparsePoly graph_polynomial_or_zero(const Multigraph& g);

// Sum over spanning trees of the product of edges IN the tree; computed from
// the explicit tree list, independently of graph_polynomial.
SparsePoly dual_polynomial(const Multigraph& g);

// Dodgson-type square root: with p = a*xe*xe' + b*xe + c*xe' + d,
// returns D with b*c - a*d == D^2 (so a*d - b*c == -D^2), leading
// coefficient positive.  Throws internal_error when no polynomial square
// root exists.
SparsePoly delta_pair(const SparsePoly& p, Var e, Var ep);
std::optional<SparsePoly> try_delta_pair(const SparsePoly& p, Var e, Var ep);

// The five minors at a 3-valent vertex and the half-difference Delta.
// Verifies integrality of Delta and the product identity
// psi_del3 * psi_con3 - psi_1 * psi_2 == -Delta^2 on construction.
struct VertexFaceDecomposition {
    std::array<int, 3> edges{};   // e1,e2,e3 at the vertex
    SparsePoly psi_del3;          // Gamma - e1e2e3
    SparsePoly psi_1;             // Gamma - e1 / e2e3
    SparsePoly psi_2;             // Gamma - e2 / e1e3
    SparsePoly psi_3;             // Gamma - e3 / e1e2
    SparsePoly psi_con3;          // Gamma / e1e2e3
    SparsePoly delta;             // (psi_1 + psi_2 - psi_3) / 2
};

VertexFaceDecomposition vertex_face_decomposition(const Multigraph& g, int vertex);
VertexFaceDecomposition vertex_face_decomposition(const Multigraph& g,
                                                  const std::array<int, 3>& edges);

// Partial factorization: content, monomial part, factors on disjoint
// variable sets, perfect powers, and quadratic splits certified by exact
// division.  Not a full irreducible factorization.
struct Factorization {
    int sign = 1;                     // +-1
    Int content = 1;                  // positive
    Monomial mono;                    // gcd monomial
    std::vector<SparsePoly> factors;  // primitive, positive leading coeff
    SparsePoly reassemble() const;
};

Factorization partial_factor(const SparsePoly& p);

// Flat view: [content (if != 1)] + [x^e per monomial variable] + factors.
std::vector<SparsePoly> partial_factor_list(const SparsePoly& p);

// The degree-4 surface polynomial in variables a,b,c,d = x1,x2,x3,x4.
SparsePoly quartic_f();

}  // namespace nbar

#endif
