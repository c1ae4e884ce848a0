#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nbar/reduce.hpp>

#include <map>

using namespace nbar;

namespace {

PolySystem sys_of(std::vector<std::string> polys, std::uint32_t nvars, AmbientKind k) {
    PolySystem s;
    s.ambient = k;
    s.nvars = nvars;
    for (auto& p : polys) s.polys.push_back(parse_poly(p));
    return s;
}

CountExpression expr_of(PolySystem s) {
    CountExpression e;
    e.terms.push_back({UCoeff::one(), std::move(s)});
    return e;
}

void check_expr_equal(const CountExpression& a, const CountExpression& b,
                      std::initializer_list<std::uint32_t> primes) {
    for (std::uint32_t p : primes) {
        Field f = make_field(p, 1);
        CHECK(a.eval_enumerated(f) == b.eval_enumerated(f));
    }
}

std::uint64_t nbar_graph(const Multigraph& g, const Field& f) {
    return count_projective_complement(psi_system(g, {}), f);
}

}  // namespace

TEST_CASE("UCoeff ring") {
    UCoeff u2 = UCoeff::unit(Int(2));
    UCoeff u6 = UCoeff::unit(Int(12));  // radical 6
    UCoeff prod = u2 * u6;
    Field f5 = make_field(5, 1);
    Field f2 = make_field(2, 1);
    Field f3 = make_field(3, 1);
    CHECK(u2.eval(f5) == 1);
    CHECK(u2.eval(f2) == 0);
    CHECK(u6.eval(f3) == 0);
    CHECK(prod.eval(f5) == 1);
    CHECK(prod.eval(f2) == 0);
    CHECK(prod.eval(f3) == 0);
    UCoeff mix = UCoeff::from(QPoly::power(2)) + u2 * UCoeff::from(QPoly::power(1));
    CHECK(mix.eval(f5) == 30);  // 25 + 5
    CHECK(mix.eval(f2) == 4);
}

TEST_CASE("expand_product inclusion-exclusion") {
    // Nbar(x1*x2) in P^1: complement of the union of the two points
    CountExpression e = expr_of(sys_of({"x1*x2"}, 2, AmbientKind::Projective));
    CountExpression out = expand_product(e, 0, 0);
    check_expr_equal(e, out, {2, 3, 5});
    Field f2 = make_field(2, 1);
    CHECK(e.eval_enumerated(f2) == 1);  // only (1:1) avoids both axes

    // trivial factorization: unchanged up to the power strip
    CountExpression one = expr_of(sys_of({"x1 + x2"}, 2, AmbientKind::Projective));
    CHECK(expand_product(one, 0, 0).terms.size() == 1);

    // disjoint-variable product
    CountExpression dis = expr_of(sys_of({"(x1+x2)*(x3+x4)"}, 4, AmbientKind::Projective));
    check_expr_equal(dis, expand_product(dis, 0, 0), {2, 3, 5});
}

TEST_CASE("eliminate_linear on the dual C3 polynomial") {
    Multigraph c3 = make_cycle(3);
    PolySystem dual = make_system({dual_polynomial(c3)}, AmbientKind::Projective, {1, 2, 3});
    CountExpression e = expr_of(dual);
    CountExpression out = eliminate_linear(e, 0, 0, 1);
    check_expr_equal(e, out, {2, 3, 5});
    for (std::uint32_t p : {2, 3, 5, 7}) {
        Field f = make_field(p, 1);
        CHECK(out.eval_enumerated(f) == Int(std::uint64_t(p) * p));
    }
    // random multilinear eliminations stay sound
    CountExpression r =
        expr_of(sys_of({"x1*x2 + x2*x3 + x1*x3", "x1*x3 + x2*x3"}, 3,
                       AmbientKind::Projective));
    check_expr_equal(r, eliminate_linear(r, 0, 0, 1), {2, 3});
    check_expr_equal(r, eliminate_linear(r, 0, 1, 2), {2, 3});
}

TEST_CASE("rescale") {
    // identity rescaling is a no-op
    CountExpression e = expr_of(sys_of({"x1*x2 - 1"}, 2, AmbientKind::Affine));
    CountExpression same =
        rescale(e, 0, {1}, SparsePoly::constant(1), SparsePoly::constant(1));
    CHECK(same.terms.size() == e.terms.size());

    // x1 -> x1*x2 on x1*x2 - 1
    CountExpression out = rescale(e, 0, {1}, parse_poly("x2"), SparsePoly::constant(1));
    check_expr_equal(e, out, {2, 3, 5});

    // division route x1 -> x1/x2
    CountExpression out2 = rescale(e, 0, {1}, SparsePoly::constant(1), parse_poly("x2"));
    check_expr_equal(e, out2, {2, 3, 5});

    // the three-fold style rescaling shape: scale two variables by a
    // trivariate factor on a 5-variable affine system
    CountExpression tri = expr_of(sys_of(
        {"x1*x2*x3 + x1*x4 + x2*x5 + x3*x4*x5 + 1"}, 5, AmbientKind::Affine));
    SparsePoly factor = parse_poly("x3*x4 + x3 + x4");
    CountExpression out3 = rescale(tri, 0, {1, 2}, factor, SparsePoly::constant(1));
    check_expr_equal(tri, out3, {2, 3});

    // second shape from the three-fold simplification: x -> x (u+1)/u
    CountExpression out4 =
        rescale(tri, 0, {1}, parse_poly("x3 + 1"), parse_poly("x3"));
    check_expr_equal(tri, out4, {2, 3});

    CHECK_THROWS_AS(rescale(expr_of(sys_of({"x1"}, 1, AmbientKind::Projective)), 0, {1},
                            parse_poly("x1"), SparsePoly::constant(1)),
                    input_error);
}

TEST_CASE("cor shortcuts") {
    Multigraph c3 = make_cycle(3);
    // single-poly rule on the dual C3 polynomial reproduces q^2
    CountExpression e =
        expr_of(make_system({dual_polynomial(c3)}, AmbientKind::Projective, {1, 2, 3}));
    CountExpression out = cor_shortcuts(e);
    CHECK(out.terms.size() > 1);
    for (std::uint32_t p : {2, 3, 5}) {
        Field f = make_field(p, 1);
        CHECK(out.eval_enumerated(f) == Int(std::uint64_t(p) * p));
    }

    // bilinear five-term rule on Psi_K4
    CountExpression k4 = expr_of(psi_system(make_complete(4), {}));
    CountExpression out13 = cor_shortcuts(k4);
    CHECK(out13.terms.size() >= 4);
    check_expr_equal(k4, out13, {2, 3, 5});

    // degree hypothesis fails: linear pair stays untouched
    CountExpression lin =
        expr_of(sys_of({"x1 + x2", "x1 - x2"}, 2, AmbientKind::Projective));
    CHECK(cor_shortcuts(lin).terms.size() == lin.terms.size());
}

TEST_CASE("theorem1 entry modes on K4") {
    Multigraph k4 = make_complete(4);
    for (auto mode : {Theorem1Mode::Vertex, Theorem1Mode::VertexAlt, Theorem1Mode::Triangle}) {
        CountExpression e = theorem1_entry(k4, mode);
        for (std::uint32_t p : {2, 3, 5, 7}) {
            Field f = make_field(p, 1);
            CHECK(e.eval_enumerated(f) == Int(nbar_graph(k4, f)));
        }
    }
    CHECK_THROWS_AS(theorem1_entry(make_cycle(4), Theorem1Mode::Vertex), input_error);
}

TEST_CASE("theorem1 entry modes on larger fixtures") {
    std::vector<Multigraph> fixtures{make_wheel(4), make_complete_bipartite(3, 3)};
    // prism = C3 x K2
    Multigraph prism;
    prism.vertex_count = 6;
    prism.edges = {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}, {3, 4, 4}, {4, 5, 5},
                   {3, 5, 6}, {0, 3, 7}, {1, 4, 8}, {2, 5, 9}};
    fixtures.push_back(prism);
    for (auto& g : fixtures) {
        auto probe = structural_probe(g);
        for (auto mode : {Theorem1Mode::Vertex, Theorem1Mode::VertexAlt}) {
            CountExpression e = theorem1_entry(g, mode);
            for (std::uint32_t p : {2, 3}) {
                Field f = make_field(p, 1);
                CHECK(e.eval_enumerated(f) == Int(nbar_graph(g, f)));
            }
        }
        if (!probe.triangles_at_3valent.empty()) {
            CountExpression e = theorem1_entry(g, Theorem1Mode::Triangle);
            for (std::uint32_t p : {2, 3}) {
                Field f = make_field(p, 1);
                CHECK(e.eval_enumerated(f) == Int(nbar_graph(g, f)));
            }
        }
    }
}

TEST_CASE("edge sequence heuristic") {
    CHECK(edge_sequence_heuristic(make_cycle(3)) == std::vector<int>{1, 2, 3});
    auto k4seq = edge_sequence_heuristic(make_complete(4));
    // the first three edges meet in a vertex
    Multigraph k4 = make_complete(4);
    std::map<int, std::pair<int, int>> ends;
    for (auto& e : k4.edges) ends[e.id] = {e.a, e.b};
    std::map<int, int> count;
    for (int i = 0; i < 3; i++) {
        count[ends[k4seq[i]].first]++;
        count[ends[k4seq[i]].second]++;
    }
    bool shared = false;
    for (auto& [v, c] : count)
        if (c == 3) shared = true;
    CHECK(shared);
    // star graph: all scores tie, ids ascending
    Multigraph star;
    star.vertex_count = 5;
    star.edges = {{0, 1, 1}, {0, 2, 2}, {0, 3, 3}, {0, 4, 4}};
    CHECK(edge_sequence_heuristic(star) == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("soundness mode verifies every rewrite on small graphs") {
    Reducer::Options opt;
    opt.verify_fields = {make_field(2, 1), make_field(3, 1)};
    Reducer red(opt);
    for (auto g : {make_cycle(3), make_complete(4), make_wheel(4)}) {
        CHECK_NOTHROW(red.reduce(psi_system(g, edge_sequence_heuristic(g))));
    }
}

TEST_CASE("run_method1 on C3 gives q^2") {
    ReductionReport rep = run_method1(make_cycle(3));
    CHECK(rep.fully_resolved());
    CHECK(rep.resolved == QPoly::power(2));
}

TEST_CASE("run_method1 on K4 and W4, certified") {
    for (auto g : {make_complete(4), make_wheel(4)}) {
        ReductionReport rep = run_method1(g);
        CHECK(rep.fully_resolved());
        CHECK(rep.resolved.coeff(0) == 0);
        CHECK(rep.resolved.coeff(1) == 0);
        std::uint32_t n = std::uint32_t(g.edge_count());
        CHECK(rep.resolved.coeff(n - 1) == 1);
        CHECK(rep.resolved.coeff(n - 2) == 0);
        PolySystem sys = psi_system(g, {});
        for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
                 {2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
            Field f = make_field(p, k);
            CHECK(certify_report(rep, sys, f));
        }
    }
}

TEST_CASE("run_method1 handles cut vertices and non-simple graphs") {
    // two triangles sharing a vertex: Psi factors; expected q^5 - q^4
    Multigraph bowtie;
    bowtie.vertex_count = 5;
    bowtie.edges = {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}, {2, 3, 4}, {3, 4, 5}, {2, 4, 6}};
    ReductionReport rep = run_method1(bowtie);
    CHECK(rep.fully_resolved());
    QPoly expect = QPoly::power(5) - QPoly::power(4);
    CHECK(rep.resolved == expect);

    // double edge plus path (non-simple)
    Multigraph dbl;
    dbl.vertex_count = 3;
    dbl.edges = {{0, 1, 1}, {0, 1, 2}, {1, 2, 3}};
    ReductionReport rep2 = run_method1(dbl);
    CHECK(rep2.fully_resolved());
    PolySystem sys = psi_system(dbl, {});
    for (std::uint32_t p : {2, 3, 5}) {
        Field f = make_field(p, 1);
        CHECK(certify_report(rep2, sys, f));
    }
}

TEST_CASE("run_method1 leaves the quartic as a residual") {
    PolySystem sys;
    sys.ambient = AmbientKind::Projective;
    sys.nvars = 4;
    sys.polys.push_back(quartic_f());
    Reducer red;
    ReductionReport rep = red.reduce(sys);
    REQUIRE_FALSE(rep.fully_resolved());
    bool found = false;
    for (auto& r : rep.residuals)
        if (r.kind == "quartic_f") found = true;
    CHECK(found);
    // the report still evaluates exactly
    for (std::uint32_t p : {2, 3, 5}) {
        Field f = make_field(p, 1);
        CHECK(certify_report(rep, sys, f));
    }
}

TEST_CASE("unit constants produce N(2)-style residuals") {
    // x1 + x1 = 2 x1: content 2 must appear as a unit symbol, not be dropped
    PolySystem sys = sys_of({"2*x1"}, 2, AmbientKind::Projective);
    Reducer red;
    ReductionReport rep = red.reduce(sys);
    for (std::uint32_t p : {2, 3, 5}) {
        Field f = make_field(p, 1);
        CHECK(certify_report(rep, sys, f));
    }
    // the linear system {x1+x2, x1-x2} hides a 2 at p=2
    PolySystem lin = sys_of({"x1 + x2", "x1 - x2"}, 2, AmbientKind::Projective);
    ReductionReport rep2 = red.reduce(lin);
    for (std::uint32_t p : {2, 3, 5}) {
        Field f = make_field(p, 1);
        CHECK(certify_report(rep2, lin, f));
    }
}

TEST_CASE("denominator reduction") {
    Multigraph k4 = make_complete(4);
    auto seq = edge_sequence_heuristic(k4);
    DenomReduction dr = denominator_reduce(k4, seq);
    CHECK(dr.edges_used >= 5);
    CHECK(dr.exceptional == 1);
    // Eq. 20a: Nbar(Psi) = q^2 * (sign * Nbar(psi)) mod q^3
    for (std::uint32_t p : {2, 3}) {
        Field f = make_field(p, 1);
        std::uint64_t q = p;
        std::uint64_t nbar = nbar_graph(k4, f);
        std::uint64_t nbar_psi;
        if (dr.psi.is_constant()) {
            nbar_psi = dr.psi.is_zero()
                           ? 0
                           : std::uint64_t(unit_indicator(dr.psi.constant_value(), f));
        } else {
            auto vars = dr.psi.variables();
            PolySystem ps = make_system({dr.psi}, AmbientKind::Projective, vars);
            nbar_psi = count_projective_complement(ps, f);
        }
        std::int64_t c2 = (dr.sign * std::int64_t(nbar_psi % q)) % std::int64_t(q);
        if (c2 < 0) c2 += q;
        CHECK(nbar % (q * q * q) == (q * q * std::uint64_t(c2)) % (q * q * q));
    }
    CHECK_THROWS_AS(denominator_reduce(k4, std::vector<int>{1, 2, 3, 4}), input_error);

    // W4 is primitive-like (2 h1 = n) as well
    Multigraph w4 = make_wheel(4);
    auto seq2 = edge_sequence_heuristic(w4);
    // reorder so the first three edges surround a 3-valent vertex
    auto probe = structural_probe(w4);
    REQUIRE_FALSE(probe.three_valent_vertices.empty());
    std::vector<int> order(probe.three_valent_vertices[0].edges.begin(),
                           probe.three_valent_vertices[0].edges.end());
    for (auto& e : w4.edges)
        if (std::find(order.begin(), order.end(), e.id) == order.end())
            order.push_back(e.id);
    DenomReduction dr2 = denominator_reduce(w4, order);
    for (std::uint32_t p : {2, 3}) {
        Field f = make_field(p, 1);
        std::uint64_t q = p;
        std::uint64_t nbar = nbar_graph(w4, f);
        std::uint64_t nbar_psi;
        if (dr2.psi.is_constant()) {
            nbar_psi = dr2.psi.is_zero()
                           ? 0
                           : std::uint64_t(unit_indicator(dr2.psi.constant_value(), f));
        } else {
            auto vars = dr2.psi.variables();
            PolySystem ps = make_system({dr2.psi}, AmbientKind::Projective, vars);
            nbar_psi = count_projective_complement(ps, f);
        }
        std::int64_t c2 = (dr2.sign * std::int64_t(nbar_psi % q)) % std::int64_t(q);
        if (c2 < 0) c2 += q;
        CHECK(nbar % (q * q * q) == (q * q * std::uint64_t(c2)) % (q * q * q));
    }
}

TEST_CASE("reduction report JSON fields are consistent") {
    ReductionReport rep = run_method1(make_complete(4));
    CHECK_FALSE(rep.trace.empty());
    CHECK(grothendieck_render(rep).find("L") != std::string::npos);
}
