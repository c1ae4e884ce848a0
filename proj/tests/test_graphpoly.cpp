#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nbar/graphpoly.hpp>

#include <map>
#include <random>

using namespace nbar;

namespace {
SparsePoly P(const std::string& s) { return parse_poly(s); }

// Psi(1/x) * prod x_e, computed by complementing each monomial in the
// full edge monomial
SparsePoly cremona_transform(const SparsePoly& psi, const Multigraph& g) {
    Monomial all;
    for (auto& e : g.edges) all = all.mul(Monomial::var(Var(e.id)));
    std::vector<SparsePoly::Term> t;
    for (auto& term : psi.terms()) t.push_back({*all.div(term.first), term.second});
    return SparsePoly::from_terms(std::move(t));
}
}  // namespace

TEST_CASE("graph polynomial basics") {
    CHECK(graph_polynomial(make_cycle(3)) == P("x1 + x2 + x3"));
    CHECK(graph_polynomial(make_path(4)) == P("1"));
    SparsePoly k4 = graph_polynomial(make_complete(4));
    CHECK(k4.term_count() == 16);
    CHECK(k4.total_degree() == 3);
    CHECK(k4.is_homogeneous());
    CHECK(k4.is_multilinear());
    for (auto& t : k4.terms()) CHECK(t.second == 1);

    Multigraph disc;
    disc.vertex_count = 4;
    disc.edges = {{0, 1, 1}, {2, 3, 2}};
    CHECK_THROWS_AS(graph_polynomial(disc), input_error);
    CHECK(graph_polynomial_or_zero(disc).is_zero());
}

TEST_CASE("loops contribute bare variables") {
    Multigraph g = make_cycle(3);
    g.edges.push_back({0, 0, 4});  // loop
    CHECK(graph_polynomial(g) == P("x1*x4 + x2*x4 + x3*x4"));
}

TEST_CASE("deletion-contraction identity at every non-loop edge") {
    for (auto& g : sampled_corpus(4, 9, 25, 31337)) {
        SparsePoly psi = graph_polynomial(g);
        for (auto& e : g.edges) {
            SparsePoly del = graph_polynomial_or_zero(delete_edges(g, {e.id}));
            SparsePoly con = graph_polynomial_or_zero(contract_edges(g, {e.id}));
            CHECK(psi == del * SparsePoly::variable(Var(e.id)) + con);
        }
    }
}

TEST_CASE("dual polynomial and the Cremona identity") {
    CHECK(dual_polynomial(make_cycle(3)) == P("x1*x2 + x1*x3 + x2*x3"));
    CHECK(dual_polynomial(make_path(2)) == P("x1*x2"));
    SparsePoly k4d = dual_polynomial(make_complete(4));
    CHECK(k4d.term_count() == 16);
    CHECK(k4d.total_degree() == 3);

    for (auto& g : sampled_corpus(4, 10, 30, 2222)) {
        SparsePoly psi = graph_polynomial(g);
        SparsePoly dual = dual_polynomial(g);
        CHECK(dual == cremona_transform(psi, g));
        CHECK(int(psi.total_degree()) == cycle_rank(g));
        CHECK(int(dual.total_degree()) == g.edge_count() - cycle_rank(g));
    }
}

TEST_CASE("delta_pair on C3") {
    SparsePoly psi = graph_polynomial(make_cycle(3));
    CHECK(delta_pair(psi, 1, 2) == P("1"));
    SparsePoly dual = dual_polynomial(make_cycle(3));
    CHECK(delta_pair(dual, 1, 2) == P("x3"));
}

TEST_CASE("delta_pair square certificate on K4") {
    SparsePoly psi = graph_polynomial(make_complete(4));
    for (Var e = 1; e <= 6; e++)
        for (Var f = e + 1; f <= 6; f++) {
            SparsePoly d = delta_pair(psi, e, f);
            SparsePoly p1 = psi.coeff_in(e, 1), p0 = psi.coeff_in(e, 0);
            SparsePoly a = p1.coeff_in(f, 1), b = p1.coeff_in(f, 0);
            SparsePoly c = p0.coeff_in(f, 1), dd = p0.coeff_in(f, 0);
            CHECK(a * dd - b * c == -(d * d));
            CHECK(d.sign() > 0);
        }
    CHECK_THROWS_AS(delta_pair(P("x1^2 + x2"), 1, 2), input_error);
    CHECK_THROWS_AS(delta_pair(P("x1*x2 + 2"), 1, 2), internal_error);  // bc-ad = -2
}

TEST_CASE("vertex face decomposition identities") {
    for (auto g : {make_complete(4), make_wheel(4)}) {
        auto probe = structural_probe(g);
        REQUIRE_FALSE(probe.three_valent_vertices.empty());
        for (auto& tv : probe.three_valent_vertices) {
            auto vfd = vertex_face_decomposition(g, tv.edges);
            // identity: Psi = del3*(x1x2+x1x3+x2x3) + sum psi_i x_i + con3
            Var x1 = Var(tv.edges[0]), x2 = Var(tv.edges[1]), x3 = Var(tv.edges[2]);
            SparsePoly elem = SparsePoly::variable(x1) * SparsePoly::variable(x2) +
                              SparsePoly::variable(x1) * SparsePoly::variable(x3) +
                              SparsePoly::variable(x2) * SparsePoly::variable(x3);
            SparsePoly rebuilt = vfd.psi_del3 * elem +
                                 vfd.psi_1 * SparsePoly::variable(x1) +
                                 vfd.psi_2 * SparsePoly::variable(x2) +
                                 vfd.psi_3 * SparsePoly::variable(x3) + vfd.psi_con3;
            CHECK(rebuilt == graph_polynomial(g));
            CHECK(vfd.psi_del3 * vfd.psi_con3 - vfd.psi_1 * vfd.psi_2 ==
                  -(vfd.delta * vfd.delta));
        }
    }
    // 4-cycle with a chord
    Multigraph g;
    g.vertex_count = 4;
    g.edges = {{0, 1, 1}, {1, 2, 2}, {2, 3, 3}, {3, 0, 4}, {0, 2, 5}};
    auto probe = structural_probe(g);
    REQUIRE_FALSE(probe.three_valent_vertices.empty());
    auto vfd = vertex_face_decomposition(g, probe.three_valent_vertices[0].edges);
    CHECK(vfd.psi_del3 * vfd.psi_con3 - vfd.psi_1 * vfd.psi_2 == -(vfd.delta * vfd.delta));
}

TEST_CASE("partial factor") {
    auto list = partial_factor_list(P("2*x1*x2 + 2*x1*x3"));
    REQUIRE(list.size() == 3);
    CHECK(list[0] == P("2"));
    CHECK(list[1] == P("x1"));
    CHECK(list[2] == P("x2 + x3"));

    auto disjoint = partial_factor_list(P("(x1+x2)*(x3+x4)"));
    REQUIRE(disjoint.size() == 2);
    CHECK(disjoint[0] * disjoint[1] == P("(x1+x2)*(x3+x4)"));

    auto stuck = partial_factor_list(P("x1^2 + x1*x2 + x2^2"));
    REQUIRE(stuck.size() == 1);
    CHECK(stuck[0] == P("x1^2 + x1*x2 + x2^2"));

    // perfect squares are recognized
    auto sq = partial_factor(P("(x1+x2)^2"));
    REQUIRE(sq.factors.size() == 2);
    CHECK(sq.factors[0] == P("x1 + x2"));
    CHECK(sq.factors[1] == P("x1 + x2"));

    // mixed-variable quadratic split via the discriminant
    auto quad = partial_factor(P("(x1 + x2 + x3)*(2*x1 + x3)"));
    CHECK(quad.factors.size() == 2);
    CHECK(quad.reassemble() == P("(x1 + x2 + x3)*(2*x1 + x3)"));
}

TEST_CASE("partial factor reassembles randomized products") {
    std::mt19937_64 rng(5);
    auto rnd = [&](int nvars) {
        std::vector<SparsePoly::Term> t;
        for (int i = 0; i < 3; i++) {
            Monomial m;
            for (Var v = 1; v <= Var(nvars); v++)
                if (rng() % 2) m = m.mul(Monomial::var(v));
            t.push_back({m, Int(long(rng() % 5) - 2)});
        }
        return SparsePoly::from_terms(std::move(t));
    };
    for (int trial = 0; trial < 100; trial++) {
        SparsePoly a = rnd(2), b = rnd(2);
        if (a.is_zero() || b.is_zero()) continue;
        std::map<Var, Var> shift{{1, 3}, {2, 4}};
        SparsePoly p = a * b.rename(shift);
        Factorization f = partial_factor(p);
        CHECK(f.reassemble() == p);
    }
}

TEST_CASE("quartic f") {
    SparsePoly f = quartic_f();
    CHECK(f.term_count() == 12);
    CHECK(f.total_degree() == 4);
    CHECK(f.is_homogeneous());
    Monomial abcd;
    for (Var v = 1; v <= 4; v++) abcd = abcd.mul(Monomial::var(v));
    bool found = false;
    for (auto& t : f.terms())
        if (t.first == abcd) {
            found = true;
            CHECK(t.second == 1);
        }
    CHECK(found);
}
