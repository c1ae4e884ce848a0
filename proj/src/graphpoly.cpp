#include <nbar/graphpoly.hpp>

#include <algorithm>
#include <map>

namespace nbar {

namespace {

SparsePoly psi_rec(const Multigraph& g) {
    // no spanning tree reaches a stranded vertex
    if (g.vertex_count > 1 && !g.connected()) return SparsePoly::zero();
    if (g.edges.empty()) return SparsePoly::constant(1);
    // loops factor out as bare variables
    for (int i = 0; i < g.edge_count(); i++) {
        if (g.edges[i].a == g.edges[i].b) {
            Multigraph h = g;
            int id = h.edges[i].id;
            h.edges.erase(h.edges.begin() + i);
            return psi_rec(h) * SparsePoly::variable(Var(id));
        }
    }
    const Edge e = g.edges[0];
    Multigraph del = g;
    del.edges.erase(del.edges.begin());
    Multigraph con = del;
    {
        int keep = std::min(e.a, e.b), gone = std::max(e.a, e.b);
        for (auto& f : con.edges) {
            if (f.a == gone) f.a = keep;
            if (f.b == gone) f.b = keep;
            if (f.a > gone) f.a--;
            if (f.b > gone) f.b--;
        }
        con.vertex_count--;
    }
    return psi_rec(del) * SparsePoly::variable(Var(e.id)) + psi_rec(con);
}

}  // namespace

SparsePoly graph_polynomial_or_zero(const Multigraph& g) {
    if (g.vertex_count > 1 && !g.connected()) return SparsePoly::zero();
    return psi_rec(g);
}

SparsePoly graph_polynomial(const Multigraph& g) {
    if (g.vertex_count > 1 && !g.connected())
        throw input_error("graph_polynomial: disconnected graph");
    return psi_rec(g);
}

SparsePoly dual_polynomial(const Multigraph& g) {
    Multigraph h = g;
    if (h.vertex_count > 1 && !h.connected())
        throw input_error("dual_polynomial: disconnected graph");
    if (h.edges.empty()) return SparsePoly::constant(1);
    SparsePoly out;
    std::vector<SparsePoly::Term> terms;
    for (auto& tree : spanning_trees(h)) {
        Monomial m;
        for (int id : tree) m = m.mul(Monomial::var(Var(id)));
        terms.push_back({std::move(m), Int(1)});
    }
    return SparsePoly::from_terms(std::move(terms));
}

std::optional<SparsePoly> try_delta_pair(const SparsePoly& p, Var e, Var ep) {
    if (p.deg_in(e) > 1 || p.deg_in(ep) > 1) return std::nullopt;
    SparsePoly p1 = p.coeff_in(e, 1), p0 = p.coeff_in(e, 0);
    SparsePoly a = p1.coeff_in(ep, 1), b = p1.coeff_in(ep, 0);
    SparsePoly c = p0.coeff_in(ep, 1), d = p0.coeff_in(ep, 0);
    return poly_sqrt(b * c - a * d);
}

SparsePoly delta_pair(const SparsePoly& p, Var e, Var ep) {
    if (p.deg_in(e) > 1 || p.deg_in(ep) > 1)
        throw input_error("delta_pair: polynomial not linear in the chosen variables");
    auto r = try_delta_pair(p, e, ep);
    if (!r)
        throw internal_error("delta_pair: b*c - a*d is not a perfect polynomial square");
    return *r;
}

VertexFaceDecomposition vertex_face_decomposition(const Multigraph& g, int vertex) {
    auto probe = structural_probe(g);
    for (auto& tv : probe.three_valent_vertices)
        if (tv.vertex == vertex) return vertex_face_decomposition(g, tv.edges);
    throw input_error("vertex_face_decomposition: vertex is not 3-valent");
}

VertexFaceDecomposition vertex_face_decomposition(const Multigraph& g,
                                                  const std::array<int, 3>& es) {
    int e1 = es[0], e2 = es[1], e3 = es[2];
    // the vertex the three edges meet in
    const Edge &a = g.edge_by_id(e1), &b = g.edge_by_id(e2), &c = g.edge_by_id(e3);
    int v = (a.a == b.a || a.a == b.b) ? a.a : a.b;
    if (!(b.a == v || b.b == v) || !(c.a == v || c.b == v))
        throw input_error("vertex_face_decomposition: edges do not share a vertex");
    VertexFaceDecomposition r;
    r.edges = es;
    r.psi_del3 =
        graph_polynomial_or_zero(delete_isolated_vertex(delete_edges(g, {e1, e2, e3}), v));
    r.psi_1 = graph_polynomial_or_zero(minor(g, {{e1}, {e2, e3}}));
    r.psi_2 = graph_polynomial_or_zero(minor(g, {{e2}, {e1, e3}}));
    r.psi_3 = graph_polynomial_or_zero(minor(g, {{e3}, {e1, e2}}));
    r.psi_con3 = graph_polynomial_or_zero(contract_edges(g, {e1, e2, e3}));
    SparsePoly twice = r.psi_1 + r.psi_2 - r.psi_3;
    try {
        r.delta = twice.divexact_int(2);
    } catch (const internal_error&) {
        throw internal_error("vertex_face_decomposition: Delta is not integral");
    }
    if (r.psi_del3 * r.psi_con3 - r.psi_1 * r.psi_2 != -(r.delta * r.delta))
        throw internal_error("vertex_face_decomposition: product identity failed");
    return r;
}

// ---- partial factorization --------------------------------------------------

namespace {

SparsePoly derivative(const SparsePoly& p, Var v) {
    std::vector<SparsePoly::Term> out;
    for (auto& t : p.terms()) {
        std::uint32_t e = t.first.deg_in(v);
        if (e == 0) continue;
        Monomial m = t.first.without(v);
        if (e > 1) m = m.mul(Monomial::var(v, e - 1));
        out.push_back({std::move(m), t.second * e});
    }
    return SparsePoly::from_terms(std::move(out));
}

Monomial restrict_to(const Monomial& m, const std::vector<char>& in_a, bool want_a) {
    Monomial r;
    for (auto& p : m.vp)
        if (bool(in_a[p.var]) == want_a) r.vp.push_back(p);
    return r;
}

// try p == f(A) * g(B) for the bipartition given by in_a; returns {f,g}
std::optional<std::pair<SparsePoly, SparsePoly>>
try_split(const SparsePoly& p, const std::vector<char>& in_a) {
    const auto& lead = p.leading();
    Monomial ma = restrict_to(lead.first, in_a, true);
    Monomial mb = restrict_to(lead.first, in_a, false);
    std::vector<SparsePoly::Term> ft, gt;
    for (auto& t : p.terms()) {
        if (restrict_to(t.first, in_a, true) == ma)
            ft.push_back({restrict_to(t.first, in_a, false), t.second});
        if (restrict_to(t.first, in_a, false) == mb)
            gt.push_back({restrict_to(t.first, in_a, true), t.second});
    }
    SparsePoly f = SparsePoly::from_terms(std::move(ft));   // in B vars
    SparsePoly g = SparsePoly::from_terms(std::move(gt));   // in A vars
    SparsePoly prod = f * g;
    SparsePoly scaled = p.mul_int(lead.second);
    if (prod == scaled) {
        // strip the duplicated constant
        Int cf = f.content();
        SparsePoly fp = f.divexact_int(f.sign() < 0 ? -cf : cf);
        auto rest = p.divexact(fp);
        if (rest) return std::make_pair(fp, *rest);
    }
    return std::nullopt;
}

void factor_primitive(const SparsePoly& p, std::vector<SparsePoly>& out);

// quadratic-in-v split via the discriminant square root
bool try_quadratic_split(const SparsePoly& p, std::vector<SparsePoly>& out) {
    for (Var v : p.variables()) {
        if (p.deg_in(v) != 2) continue;
        SparsePoly p2 = p.coeff_in(v, 2), p1 = p.coeff_in(v, 1), p0 = p.coeff_in(v, 0);
        auto s = poly_sqrt(p1 * p1 - p2 * p0 * SparsePoly::constant(4));
        if (!s) continue;
        SparsePoly x = SparsePoly::variable(v);
        for (int pick = 0; pick < 2; pick++) {
            SparsePoly u = p2.mul_int(2) * x + (pick ? p1 + *s : p1 - *s);
            if (u.is_zero()) continue;
            Int c = u.content();
            SparsePoly up = u.divexact_int(u.sign() < 0 ? -c : c);
            if (up.is_constant()) continue;
            auto rest = p.divexact(up);
            if (rest) {
                factor_primitive(up, out);
                factor_primitive(*rest, out);
                return true;
            }
        }
    }
    return false;
}

void factor_primitive(const SparsePoly& p, std::vector<SparsePoly>& out) {
    if (p.is_constant()) {
        if (!(p.is_zero() || p.constant_value() == 1))
            throw internal_error("factor_primitive: expected primitive input");
        return;
    }
    // perfect powers first
    for (std::uint32_t k : {2u, 3u}) {
        if (auto r = poly_kth_root(p, k)) {
            std::vector<SparsePoly> sub;
            factor_primitive(*r, sub);
            for (std::uint32_t i = 0; i < k; i++)
                for (auto& f : sub) out.push_back(f);
            return;
        }
    }
    auto vars = p.variables();
    if (vars.size() >= 2) {
        // entanglement graph: u ~ w unless p * p_uw == p_u * p_w
        Var maxv = vars.back();
        std::vector<int> parent(vars.size());
        for (std::size_t i = 0; i < vars.size(); i++) parent[i] = int(i);
        auto find = [&](int x) { while (parent[x] != x) x = parent[x] = parent[parent[x]]; return x; };
        std::map<Var, SparsePoly> dcache;
        for (Var v : vars) dcache.emplace(v, derivative(p, v));
        for (std::size_t i = 0; i < vars.size(); i++)
            for (std::size_t j = i + 1; j < vars.size(); j++) {
                if (find(int(i)) == find(int(j))) continue;
                SparsePoly puw = derivative(dcache.at(vars[i]), vars[j]);
                if (p * puw != dcache.at(vars[i]) * dcache.at(vars[j]))
                    parent[find(int(i))] = find(int(j));
            }
        int root0 = find(0);
        bool split_possible = false;
        for (std::size_t i = 1; i < vars.size(); i++)
            if (find(int(i)) != root0) split_possible = true;
        if (split_possible) {
            std::vector<char> in_a(maxv + 1, 0);
            for (std::size_t i = 0; i < vars.size(); i++)
                if (find(int(i)) == root0) in_a[vars[i]] = 1;
            if (auto fg = try_split(p, in_a)) {
                factor_primitive(fg->first, out);
                factor_primitive(fg->second, out);
                return;
            }
        }
    }
    if (try_quadratic_split(p, out)) return;
    out.push_back(p);
}

}  // namespace

SparsePoly Factorization::reassemble() const {
    SparsePoly r = SparsePoly::monomial(mono, content * sign);
    for (auto& f : factors) r = r * f;
    return r;
}

Factorization partial_factor(const SparsePoly& p) {
    Factorization r;
    if (p.is_zero()) {
        r.content = 0;
        return r;
    }
    r.sign = p.sign();
    r.content = p.content();
    SparsePoly q = p.divexact_int(r.sign < 0 ? -r.content : r.content);
    // monomial gcd
    if (!q.is_zero() && !q.terms().empty()) {
        Monomial g = q.terms()[0].first;
        for (auto& t : q.terms()) {
            Monomial ng;
            for (auto& vp : g.vp) {
                std::uint32_t e = std::min(vp.exp, t.first.deg_in(vp.var));
                if (e > 0) ng.vp.push_back({vp.var, e});
            }
            g = std::move(ng);
            if (g.is_one()) break;
        }
        if (!g.is_one()) {
            r.mono = g;
            std::vector<SparsePoly::Term> terms;
            for (auto& t : q.terms()) terms.push_back({*t.first.div(g), t.second});
            q = SparsePoly::from_terms(std::move(terms));
        }
    }
    if (!q.is_constant()) factor_primitive(q, r.factors);
    return r;
}

std::vector<SparsePoly> partial_factor_list(const SparsePoly& p) {
    Factorization f = partial_factor(p);
    std::vector<SparsePoly> out;
    Int c = f.content * f.sign;
    if (c != 1) out.push_back(SparsePoly::constant(c));
    for (auto& vp : f.mono.vp)
        out.push_back(SparsePoly::monomial(Monomial::var(vp.var, vp.exp), 1));
    for (auto& g : f.factors) out.push_back(g);
    return out;
}

SparsePoly quartic_f() {
    auto mono = [](std::initializer_list<std::pair<Var, std::uint32_t>> vps) {
        Monomial m;
        for (auto& [v, e] : vps) m = m.mul(Monomial::var(v, e));
        return m;
    };
    const Var a = 1, b = 2, c = 3, d = 4;
    std::vector<SparsePoly::Term> t;
    auto add = [&](std::initializer_list<std::pair<Var, std::uint32_t>> vps) {
        t.push_back({mono(vps), Int(1)});
    };
    add({{a, 2}, {b, 2}});
    add({{a, 2}, {b, 1}, {c, 1}});
    add({{a, 2}, {b, 1}, {d, 1}});
    add({{a, 2}, {c, 1}, {d, 1}});
    add({{a, 1}, {b, 2}, {c, 1}});
    add({{a, 1}, {b, 1}, {c, 2}});
    add({{a, 1}, {b, 1}, {c, 1}, {d, 1}});
    add({{a, 1}, {b, 1}, {d, 2}});
    add({{a, 1}, {c, 2}, {d, 1}});
    add({{a, 1}, {c, 1}, {d, 2}});
    add({{b, 1}, {c, 2}, {d, 1}});
    add({{c, 2}, {d, 2}});
    return SparsePoly::from_terms(std::move(t));
}

}  // namespace nbar
