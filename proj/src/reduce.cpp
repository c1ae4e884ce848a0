#include <nbar/reduce.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace nbar {

// ---- QPoly ---------------------------------------------------------------------

QPoly QPoly::constant(Int v) {
    QPoly r;
    if (v != 0) r.c.push_back(std::move(v));
    return r;
}

QPoly QPoly::power(std::uint32_t k, Int coeff) {
    QPoly r;
    if (coeff == 0) return r;
    r.c.assign(k + 1, Int(0));
    r.c[k] = std::move(coeff);
    return r;
}

QPoly QPoly::projective_space(std::uint32_t n) {
    QPoly r;
    r.c.assign(n, Int(1));
    return r;
}

QPoly QPoly::torus(std::uint32_t a, std::uint32_t b) {
    QPoly r = power(b);
    QPoly qm1;
    qm1.c = {Int(-1), Int(1)};
    for (std::uint32_t i = 0; i < a; i++) r = r * qm1;
    return r;
}

const Int& QPoly::coeff(std::uint32_t i) const {
    static const Int zero(0);
    return i < c.size() ? c[i] : zero;
}

void QPoly::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

QPoly QPoly::operator+(const QPoly& o) const {
    QPoly r;
    r.c.resize(std::max(c.size(), o.c.size()), Int(0));
    for (std::size_t i = 0; i < c.size(); i++) r.c[i] += c[i];
    for (std::size_t i = 0; i < o.c.size(); i++) r.c[i] += o.c[i];
    r.trim();
    return r;
}

QPoly QPoly::operator-(const QPoly& o) const { return *this + (-o); }

QPoly QPoly::operator-() const {
    QPoly r = *this;
    for (auto& v : r.c) v = -v;
    return r;
}

QPoly QPoly::operator*(const QPoly& o) const {
    QPoly r;
    if (c.empty() || o.c.empty()) return r;
    r.c.assign(c.size() + o.c.size() - 1, Int(0));
    for (std::size_t i = 0; i < c.size(); i++)
        for (std::size_t j = 0; j < o.c.size(); j++) r.c[i + j] += c[i] * o.c[j];
    r.trim();
    return r;
}

Int QPoly::eval(const Int& q) const {
    Int r = 0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * q + c[i];
    return r;
}

std::string QPoly::str(const std::string& var) const {
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c.size(); i-- > 0;) {
        if (c[i] == 0) continue;
        Int v = c[i];
        if (first) {
            if (v < 0) { os << "-"; v = -v; }
        } else {
            os << (v < 0 ? " - " : " + ");
            if (v < 0) v = -v;
        }
        first = false;
        if (i == 0 || v != 1) os << v.get_str();
        if (i > 0) {
            if (v != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

Int radical(Int v) {
    v = abs(v);
    if (v <= 1) return v;
    Int rad = 1, f = 2;
    while (f * f <= v) {
        if (v % f == 0) {
            rad *= f;
            while (v % f == 0) v /= f;
        }
        f += 1;
    }
    if (v > 1) rad *= v;
    return rad;
}

// ---- UCoeff ---------------------------------------------------------------------

UCoeff UCoeff::one() { return from(QPoly::constant(1)); }

UCoeff UCoeff::from(QPoly p) {
    UCoeff r;
    r.plain = std::move(p);
    return r;
}

UCoeff UCoeff::unit(const Int& c) {
    UCoeff r;
    Int rad = radical(c);
    if (rad <= 1)
        r.plain = QPoly::constant(rad == 1 ? 1 : 0);  // u_1 = 1, u_0 = 0
    else
        r.units[rad] = QPoly::constant(1);
    return r;
}

bool UCoeff::is_zero() const {
    if (!plain.is_zero()) return false;
    for (auto& [c, p] : units)
        if (!p.is_zero()) return false;
    return true;
}

UCoeff UCoeff::operator+(const UCoeff& o) const {
    UCoeff r = *this;
    r.plain = r.plain + o.plain;
    for (auto& [c, p] : o.units) {
        auto it = r.units.find(c);
        if (it == r.units.end()) r.units[c] = p;
        else it->second = it->second + p;
    }
    std::erase_if(r.units, [](auto& kv) { return kv.second.is_zero(); });
    return r;
}

UCoeff UCoeff::operator-() const {
    UCoeff r;
    r.plain = -plain;
    for (auto& [c, p] : units) r.units[c] = -p;
    return r;
}

UCoeff UCoeff::operator-(const UCoeff& o) const { return *this + (-o); }

UCoeff UCoeff::operator*(const UCoeff& o) const {
    UCoeff r;
    r.plain = plain * o.plain;
    auto add_unit = [&r](const Int& c, QPoly p) {
        if (p.is_zero()) return;
        auto it = r.units.find(c);
        if (it == r.units.end()) r.units[c] = std::move(p);
        else it->second = it->second + p;
    };
    for (auto& [c, p] : units) add_unit(c, p * o.plain);
    for (auto& [c, p] : o.units) add_unit(c, plain * p);
    for (auto& [c1, p1] : units)
        for (auto& [c2, p2] : o.units) {
            Int l = lcm(c1, c2);  // both squarefree
            add_unit(l, p1 * p2);
        }
    std::erase_if(r.units, [](auto& kv) { return kv.second.is_zero(); });
    return r;
}

Int UCoeff::eval(const Field& field) const {
    Int q(static_cast<unsigned long>(field->q()));
    Int r = plain.eval(q);
    for (auto& [c, p] : units)
        if (unit_indicator(c, field)) r += p.eval(q);
    return r;
}

std::string UCoeff::str() const {
    std::ostringstream os;
    os << plain.str();
    for (auto& [c, p] : units)
        os << " + u" << c.get_str() << "*(" << p.str() << ")";
    return os.str();
}

// ---- CountExpression ---------------------------------------------------------------

void CountExpression::merge() {
    std::map<std::string, CountTerm> acc;
    for (auto& t : terms) {
        std::string k = t.sys.key();
        auto it = acc.find(k);
        if (it == acc.end()) acc.emplace(std::move(k), t);
        else it->second.coeff = it->second.coeff + t.coeff;
    }
    terms.clear();
    for (auto& [k, t] : acc)
        if (!t.coeff.is_zero()) terms.push_back(std::move(t));
}

namespace {

std::uint64_t complement_count_enum(const PolySystem& sys, const Field& field,
                                    std::uint64_t budget) {
    if (sys.ambient == AmbientKind::Projective)
        return count_projective_complement(sys, field, budget);
    return count_affine_complement(sys, field, budget);
}

std::uint64_t complement_count_ml(const PolySystem& sys, const Field& field,
                                  std::uint64_t budget) {
    return count_complement_multilinear(sys, field, budget);
}

}  // namespace

Int CountExpression::eval_enumerated(const Field& field, std::uint64_t budget) const {
    Int total = 0;
    for (auto& t : terms)
        total += t.coeff.eval(field) *
                 Int(static_cast<unsigned long>(complement_count_enum(t.sys, field, budget)));
    return total;
}

Int CountExpression::eval_multilinear(const Field& field, std::uint64_t budget) const {
    Int total = 0;
    for (auto& t : terms)
        total += t.coeff.eval(field) *
                 Int(static_cast<unsigned long>(complement_count_ml(t.sys, field, budget)));
    return total;
}

// ---- shared rule constructions ------------------------------------------------------

namespace {

SparsePoly sign_normalized(const SparsePoly& f) { return f.sign() < 0 ? -f : f; }

PolySystem drop_var_system(const PolySystem& sys, Var x, std::vector<SparsePoly> polys) {
    std::map<Var, Var> remap;
    for (Var u = 1; u <= sys.nvars; u++)
        if (u != x) remap[u] = u < x ? u : u - 1;
    PolySystem out;
    out.ambient = sys.ambient;
    out.nvars = sys.nvars - 1;
    for (auto& f : polys) out.polys.push_back(f.rename(remap));
    return out;
}

// the three replacement terms of the linear-variable elimination rule
std::vector<CountTerm> eq7_children(const PolySystem& sys, std::size_t pi, Var x) {
    const SparsePoly& f = sys.polys[pi];
    if (f.deg_in(x) != 1)
        throw input_error("eliminate_linear: polynomial is not linear in the variable");
    SparsePoly g1 = f.coeff_in(x, 1);
    SparsePoly g0 = -f.coeff_in(x, 0);  // f = g1*x - g0
    std::vector<SparsePoly> others;
    for (std::size_t i = 0; i < sys.polys.size(); i++)
        if (i != pi) others.push_back(sys.polys[i]);

    std::vector<CountTerm> out;
    // term 1: {g1, g0} + untouched others, same ambient space
    {
        PolySystem s1 = sys;
        s1.polys = others;
        s1.polys.push_back(g1);
        s1.polys.push_back(g0);
        out.push_back({UCoeff::one(), std::move(s1)});
    }
    // terms 2,3 live one dimension down
    std::vector<SparsePoly> bars, hats;
    for (auto& h : others) {
        std::uint32_t k = h.deg_in(x);
        if (k == 0) {
            bars.push_back(h);
            hats.push_back(h);
            continue;
        }
        SparsePoly bar;
        for (std::uint32_t i = 0; i <= k; i++)
            bar += h.coeff_in(x, i) * g0.pow(i) * g1.pow(k - i);
        bars.push_back(std::move(bar));
        hats.push_back(h.coeff_in(x, k) * g0);
    }
    if (!others.empty())
        out.push_back({UCoeff::one(), drop_var_system(sys, x, bars)});
    {
        std::vector<SparsePoly> third = hats;
        third.push_back(g1);
        out.push_back({-UCoeff::one(), drop_var_system(sys, x, third)});
    }
    return out;
}

}  // namespace

CountExpression expand_product(const CountExpression& e, std::size_t term_idx,
                               std::size_t poly_idx) {
    if (term_idx >= e.terms.size()) throw input_error("expand_product: bad term index");
    const CountTerm& t = e.terms[term_idx];
    if (poly_idx >= t.sys.polys.size()) throw input_error("expand_product: bad poly index");
    Factorization fac = partial_factor(t.sys.polys[poly_idx]);
    std::vector<SparsePoly> pieces;
    if (fac.content > 1) pieces.push_back(SparsePoly::constant(fac.content));
    for (auto& vp : fac.mono.vp) pieces.push_back(SparsePoly::variable(vp.var));
    for (auto& f : fac.factors)
        if (std::find(pieces.begin(), pieces.end(), f) == pieces.end()) pieces.push_back(f);

    CountExpression out;
    for (std::size_t i = 0; i < e.terms.size(); i++)
        if (i != term_idx) out.terms.push_back(e.terms[i]);
    if (pieces.size() <= 1) {
        // nothing to expand beyond power/sign stripping
        CountTerm nt = t;
        if (pieces.size() == 1) nt.sys.polys[poly_idx] = pieces[0];
        out.terms.push_back(std::move(nt));
        out.merge();
        return out;
    }
    // split as first * rest and apply inclusion-exclusion once
    SparsePoly first = pieces[0];
    SparsePoly rest = SparsePoly::constant(1);
    for (std::size_t i = 1; i < pieces.size(); i++) rest = rest * pieces[i];
    auto with_poly = [&](std::initializer_list<SparsePoly> repl) {
        PolySystem s = t.sys;
        s.polys.erase(s.polys.begin() + poly_idx);
        for (auto& f : repl) s.polys.push_back(f);
        return s;
    };
    out.terms.push_back({t.coeff, with_poly({first})});
    out.terms.push_back({t.coeff, with_poly({rest})});
    out.terms.push_back({-t.coeff, with_poly({first, rest})});
    out.merge();
    return out;
}

CountExpression eliminate_linear(const CountExpression& e, std::size_t term_idx,
                                 std::size_t poly_idx, Var var) {
    if (term_idx >= e.terms.size()) throw input_error("eliminate_linear: bad term index");
    const CountTerm& t = e.terms[term_idx];
    if (poly_idx >= t.sys.polys.size())
        throw input_error("eliminate_linear: bad poly index");
    auto children = eq7_children(t.sys, poly_idx, var);
    CountExpression out;
    for (std::size_t i = 0; i < e.terms.size(); i++)
        if (i != term_idx) out.terms.push_back(e.terms[i]);
    for (auto& ch : children) out.terms.push_back({t.coeff * ch.coeff, std::move(ch.sys)});
    out.merge();
    return out;
}

CountExpression rescale(const CountExpression& e, std::size_t term_idx,
                        const std::vector<Var>& I, const SparsePoly& g,
                        const SparsePoly& h) {
    if (term_idx >= e.terms.size()) throw input_error("rescale: bad term index");
    const CountTerm& t = e.terms[term_idx];
    if (t.sys.ambient != AmbientKind::Affine)
        throw input_error("rescale: term must be affine (swap to affine space first)");
    if (g.is_zero() || h.is_zero()) throw input_error("rescale: zero scale factor");
    const SparsePoly one = SparsePoly::constant(1);
    if (g == one && h == one) return e;  // identity rescaling

    // x_i -> x_i g / h: clear denominators with h^(deg in I), then strip all
    // g and h factors; the remainder is f-tilde
    auto transform = [&](const SparsePoly& f) {
        std::uint32_t degI = 0;
        for (auto& term : f.terms()) {
            std::uint32_t d = 0;
            for (Var v : I) d += term.first.deg_in(v);
            degI = std::max(degI, d);
        }
        std::vector<SparsePoly::Term> acc;
        for (auto& term : f.terms()) {
            std::uint32_t d = 0;
            for (Var v : I) d += term.first.deg_in(v);
            // term * g^d * h^(degI - d)
            SparsePoly piece = SparsePoly::monomial(term.first, term.second) * g.pow(d) *
                               h.pow(degI - d);
            for (auto& pt : piece.terms()) acc.push_back(pt);
        }
        SparsePoly scaled = SparsePoly::from_terms(std::move(acc));
        for (;;) {
            if (!g.is_constant()) {
                if (auto q = scaled.divexact(g)) { scaled = *q; continue; }
            }
            if (!h.is_constant()) {
                if (auto q = scaled.divexact(h)) { scaled = *q; continue; }
            }
            break;
        }
        return scaled;
    };

    PolySystem tilde = t.sys;
    for (auto& f : tilde.polys) f = transform(f);
    SparsePoly gh = g * h;
    PolySystem with_gh = t.sys;
    with_gh.polys.push_back(gh);
    PolySystem tilde_gh = tilde;
    tilde_gh.polys.push_back(gh);

    CountExpression out;
    for (std::size_t i = 0; i < e.terms.size(); i++)
        if (i != term_idx) out.terms.push_back(e.terms[i]);
    out.terms.push_back({t.coeff, std::move(with_gh)});
    out.terms.push_back({t.coeff, std::move(tilde)});
    out.terms.push_back({-t.coeff, std::move(tilde_gh)});
    out.merge();
    return out;
}

namespace {

std::optional<std::vector<CountTerm>> cor11_children(const PolySystem& sys) {
    if (sys.ambient != AmbientKind::Projective || sys.polys.size() != 1) return std::nullopt;
    const SparsePoly& f = sys.polys[0];
    if (f.total_degree() <= 1) return std::nullopt;
    for (Var x : f.variables()) {
        if (f.deg_in(x) != 1) continue;
        SparsePoly f1 = f.coeff_in(x, 1), f0 = f.coeff_in(x, 0);
        std::vector<CountTerm> out;
        out.push_back({UCoeff::from(QPoly::power(1)), drop_var_system(sys, x, {f1, f0})});
        out.push_back({-UCoeff::one(), drop_var_system(sys, x, {f1})});
        return out;
    }
    return std::nullopt;
}

std::optional<std::vector<CountTerm>> cor12_children(const PolySystem& sys) {
    if (sys.ambient != AmbientKind::Projective || sys.polys.size() != 2) return std::nullopt;
    const SparsePoly &f = sys.polys[0], &g = sys.polys[1];
    if (f.total_degree() <= 1 || g.total_degree() <= 1) return std::nullopt;
    std::set<Var> vars;
    for (Var v : f.variables()) vars.insert(v);
    for (Var v : g.variables()) vars.insert(v);
    for (Var x : vars) {
        if (f.deg_in(x) != 1 || g.deg_in(x) != 1) continue;
        SparsePoly f11 = f.coeff_in(x, 1), f10 = f.coeff_in(x, 0);
        SparsePoly f21 = g.coeff_in(x, 1), f20 = g.coeff_in(x, 0);
        std::vector<CountTerm> out;
        out.push_back({UCoeff::from(QPoly::power(1)),
                       drop_var_system(sys, x, {f11, f10, f21, f20})});
        out.push_back({UCoeff::one(), drop_var_system(sys, x, {f11 * f20 - f10 * f21})});
        out.push_back({-UCoeff::one(), drop_var_system(sys, x, {f11, f21})});
        return out;
    }
    return std::nullopt;
}

std::optional<std::vector<CountTerm>> cor13_children(const PolySystem& sys) {
    if (sys.ambient != AmbientKind::Projective || sys.polys.size() != 1) return std::nullopt;
    const SparsePoly& f = sys.polys[0];
    if (f.total_degree() <= 2) return std::nullopt;
    auto vars = f.variables();
    for (std::size_t i = 0; i < vars.size(); i++)
        for (std::size_t j = i + 1; j < vars.size(); j++) {
            Var x = vars[i], y = vars[j];
            if (f.deg_in(x) != 1 || f.deg_in(y) != 1) continue;
            auto delta = try_delta_pair(f, x, y);
            if (!delta) continue;
            SparsePoly fx = f.coeff_in(x, 1), f0 = f.coeff_in(x, 0);
            SparsePoly f11 = fx.coeff_in(y, 1), f10 = fx.coeff_in(y, 0);
            SparsePoly f01 = f0.coeff_in(y, 1), f00 = f0.coeff_in(y, 0);
            // drop x then y (y shifts down when x < y)
            auto drop2 = [&](std::vector<SparsePoly> polys) {
                PolySystem s1 = drop_var_system(sys, x, std::move(polys));
                Var y2 = y > x ? y - 1 : y;
                return drop_var_system(s1, y2, s1.polys);
            };
            std::vector<CountTerm> out;
            out.push_back({UCoeff::from(QPoly::power(2)), drop2({f11, f10, f01, f00})});
            out.push_back({UCoeff::from(QPoly::power(1)), drop2({*delta})});
            out.push_back({-UCoeff::from(QPoly::power(1)), drop2({f11, f01})});
            out.push_back({-UCoeff::from(QPoly::power(1)), drop2({f11, f10})});
            out.push_back({UCoeff::one(), drop2({f11})});
            return out;
        }
    return std::nullopt;
}

}  // namespace

CountExpression cor_shortcuts(const CountExpression& e) {
    for (std::size_t ti = 0; ti < e.terms.size(); ti++) {
        const CountTerm& t = e.terms[ti];
        std::optional<std::vector<CountTerm>> repl = cor13_children(t.sys);
        if (!repl) repl = cor12_children(t.sys);
        if (!repl) repl = cor11_children(t.sys);
        if (!repl) continue;
        CountExpression out;
        for (std::size_t i = 0; i < e.terms.size(); i++)
            if (i != ti) out.terms.push_back(e.terms[i]);
        for (auto& ch : *repl) out.terms.push_back({t.coeff * ch.coeff, std::move(ch.sys)});
        out.merge();
        return out;
    }
    return e;
}

// ---- Theorem-1 entry ------------------------------------------------------------------

namespace {

std::vector<Var> coords_excluding(const Multigraph& g, std::initializer_list<int> gone,
                                  const std::vector<int>& order) {
    std::vector<Var> coords;
    auto excluded = [&](int id) {
        for (int e : gone)
            if (e == id) return true;
        return false;
    };
    if (!order.empty()) {
        for (int id : order)
            if (!excluded(id)) coords.push_back(Var(id));
    } else {
        std::vector<int> ids;
        for (auto& e : g.edges) ids.push_back(e.id);
        std::sort(ids.begin(), ids.end());
        for (int id : ids)
            if (!excluded(id)) coords.push_back(Var(id));
    }
    return coords;
}

CountExpression theorem1_vertex(const Multigraph& g, const std::array<int, 3>& es,
                                const std::vector<int>& order) {
    auto vfd = vertex_face_decomposition(g, es);
    int e1 = es[0], e2 = es[1], e3 = es[2];
    auto coords = coords_excluding(g, {e1, e2, e3}, order);
    CountExpression e;
    e.terms.push_back({UCoeff::from(QPoly::power(3)),
                       make_system({vfd.psi_del3, vfd.psi_1, vfd.psi_2, vfd.psi_con3},
                                   AmbientKind::Projective, coords)});
    e.terms.push_back({-UCoeff::from(QPoly::power(2)),
                       make_system({vfd.psi_del3, vfd.psi_1, vfd.psi_2},
                                   AmbientKind::Projective, coords)});
    return e;
}

CountExpression theorem1_vertex_alt(const Multigraph& g, const std::array<int, 3>& es,
                                    const std::vector<int>& order) {
    auto vfd = vertex_face_decomposition(g, es);
    int e1 = es[0], e2 = es[1], e3 = es[2];
    SparsePoly delta12 = vfd.psi_del3 * SparsePoly::variable(Var(e3)) + vfd.delta;
    SparsePoly psi_con_e3 = graph_polynomial_or_zero(contract_edges(g, {e3}));
    CountExpression e;
    e.terms.push_back({UCoeff::from(QPoly::power(1)),
                       make_system({psi_con_e3}, AmbientKind::Projective,
                                   coords_excluding(g, {e3}, order))});
    e.terms.push_back({UCoeff::from(QPoly::power(1)),
                       make_system({delta12}, AmbientKind::Projective,
                                   coords_excluding(g, {e1, e2}, order))});
    e.terms.push_back({-UCoeff::from(QPoly::power(2)),
                       make_system({vfd.delta}, AmbientKind::Projective,
                                   coords_excluding(g, {e1, e2, e3}, order))});
    return e;
}

CountExpression theorem1_triangle(const Multigraph& g, const TriangleAtVertex& tri,
                                  const std::vector<int>& order) {
    int e1 = tri.e1, e2 = tri.e2, e3 = tri.e3, e4 = tri.e4;
    // minors that strip all three vertex edges lose the bared vertex itself;
    // gv = Gamma - 123 with the vertex removed (e4 still present)
    Multigraph gv = delete_isolated_vertex(delete_edges(g, {e1, e2, e3}), tri.vertex);
    SparsePoly psi_123 = graph_polynomial_or_zero(gv);
    SparsePoly psi_123_4 = graph_polynomial_or_zero(contract_edges(gv, {e4}));
    SparsePoly psi_1234 = graph_polynomial_or_zero(delete_edges(gv, {e4}));
    SparsePoly psi_24_13 = graph_polynomial_or_zero(minor(g, {{e2, e4}, {e1, e3}}));
    SparsePoly psi_34_12 = graph_polynomial_or_zero(minor(g, {{e3, e4}, {e1, e2}}));
    SparsePoly twice = psi_123_4 + psi_24_13 - psi_34_12;
    SparsePoly delta_small;
    try {
        delta_small = twice.divexact_int(2);
    } catch (const internal_error&) {
        throw internal_error("theorem1_entry: triangle delta is not integral");
    }
    SparsePoly psi_2_134 = graph_polynomial_or_zero(minor(g, {{e2}, {e1, e3, e4}}));
    if (psi_1234 * psi_2_134 - psi_123_4 * psi_24_13 != -(delta_small * delta_small))
        throw internal_error("theorem1_entry: triangle square identity failed");

    SparsePoly psi_2_3 = graph_polynomial_or_zero(minor(g, {{e2}, {e3}}));
    SparsePoly psi_24_3 = graph_polynomial_or_zero(minor(g, {{e2, e4}, {e3}}));
    SparsePoly psi_2_34 = graph_polynomial_or_zero(minor(g, {{e2}, {e3, e4}}));

    QPoly q1 = QPoly::power(1);
    QPoly q2 = QPoly::power(2);
    QPoly qm1 = QPoly::power(1) - QPoly::constant(1);   // q-1
    QPoly qm2 = QPoly::power(1) - QPoly::constant(2);   // q-2

    CountExpression e;
    e.terms.push_back({UCoeff::from(q1 * qm2),
                       make_system({psi_2_3}, AmbientKind::Projective,
                                   coords_excluding(g, {e2, e3}, order))});
    e.terms.push_back({UCoeff::from(q1 * qm1),
                       make_system({psi_123}, AmbientKind::Projective,
                                   coords_excluding(g, {e1, e2, e3}, order))});
    e.terms.push_back({UCoeff::from(q1 * qm1),
                       make_system({psi_24_3}, AmbientKind::Projective,
                                   coords_excluding(g, {e2, e3, e4}, order))});
    e.terms.push_back({UCoeff::from(q2),
                       make_system({psi_2_34}, AmbientKind::Projective,
                                   coords_excluding(g, {e2, e3, e4}, order))});
    auto deep = coords_excluding(g, {e1, e2, e3, e4}, order);
    e.terms.push_back({UCoeff::from(q2),
                       make_system({psi_1234}, AmbientKind::Projective, deep)});
    e.terms.push_back({UCoeff::from(q2),
                       make_system({psi_123_4}, AmbientKind::Projective, deep)});
    e.terms.push_back({-UCoeff::from(q2),
                       make_system({psi_1234, delta_small}, AmbientKind::Projective, deep)});
    e.terms.push_back({-UCoeff::from(q2),
                       make_system({psi_123_4, delta_small}, AmbientKind::Projective, deep)});
    e.terms.push_back({-UCoeff::from(q2 * qm2),
                       make_system({delta_small}, AmbientKind::Projective, deep)});
    return e;
}

}  // namespace

CountExpression theorem1_entry(const Multigraph& g, Theorem1Mode mode) {
    auto probe = structural_probe(g);
    if (!probe.is_simple || !probe.vertex_connectivity_ge_2)
        throw input_error("theorem1_entry: graph must be simple with connectivity >= 2");
    if (mode == Theorem1Mode::Triangle) {
        if (probe.triangles_at_3valent.empty())
            throw input_error("theorem1_entry: no triangle at a 3-valent vertex");
        return theorem1_triangle(g, probe.triangles_at_3valent[0], {});
    }
    if (probe.three_valent_vertices.empty())
        throw input_error("theorem1_entry: no 3-valent vertex");
    const auto& tv = probe.three_valent_vertices[0];
    if (mode == Theorem1Mode::Vertex) return theorem1_vertex(g, tv.edges, {});
    return theorem1_vertex_alt(g, tv.edges, {});
}

// ---- denominator reduction ----------------------------------------------------------

DenomReduction denominator_reduce(const Multigraph& g, const std::vector<int>& sequence) {
    if (sequence.size() < 5)
        throw input_error("denominator_reduce: need at least 5 edges in the sequence");
    auto probe = structural_probe(g);
    if (!probe.is_simple || !probe.vertex_connectivity_ge_2)
        throw input_error("denominator_reduce: graph must be simple, 2-connected");
    std::array<int, 3> first3{sequence[0], sequence[1], sequence[2]};
    std::sort(first3.begin(), first3.end());
    const ThreeValentVertex* tv = nullptr;
    for (auto& cand : probe.three_valent_vertices)
        if (cand.edges == first3) tv = &cand;
    if (!tv)
        throw input_error(
            "denominator_reduce: first three edges must surround a 3-valent vertex");

    auto vfd = vertex_face_decomposition(g, first3);
    DenomReduction res;
    res.edges_used = 3;
    std::vector<SparsePoly> factors{sign_normalized(vfd.psi_del3),
                                    sign_normalized(vfd.delta)};
    int eliminated = 3;

    for (std::size_t si = 3; si < sequence.size(); si++) {
        Var x = Var(sequence[si]);
        if (factors.size() != 2) break;  // could not pair up previously
        SparsePoly &A = factors[0], &B = factors[1];
        if (A.deg_in(x) > 1 || B.deg_in(x) > 1) break;
        SparsePoly R = A.coeff_in(x, 1) * B.coeff_in(x, 0) -
                       A.coeff_in(x, 0) * B.coeff_in(x, 1);
        eliminated++;
        res.edges_used = int(si) + 1;
        if (R.is_zero()) {
            factors = {R};
            break;
        }
        Factorization fac = partial_factor(R);
        if (fac.content > 1) res.exceptional *= radical(fac.content);
        std::vector<SparsePoly> pieces;
        for (auto& vp : fac.mono.vp) pieces.push_back(SparsePoly::variable(vp.var));
        for (auto& f : fac.factors)
            if (std::find(pieces.begin(), pieces.end(), f) == pieces.end())
                pieces.push_back(f);
        if (pieces.empty()) {
            // reduced to an integer
            factors = {SparsePoly::constant(fac.content * fac.sign)};
            break;
        }
        if (pieces.size() == 1) {
            factors = {pieces[0]};
            break;  // irreducible by our factorizer: stop unless sequence done
        }
        if (pieces.size() > 2) {
            // regroup into two blocks; keep the last piece alone
            SparsePoly blockA = SparsePoly::constant(1);
            for (std::size_t i = 0; i + 1 < pieces.size(); i++) blockA = blockA * pieces[i];
            factors = {sign_normalized(blockA), sign_normalized(pieces.back())};
        } else {
            factors = {sign_normalized(pieces[0]), sign_normalized(pieces[1])};
        }
    }

    SparsePoly psi = SparsePoly::constant(1);
    for (auto& f : factors) psi = psi * f;
    res.psi = sign_normalized(psi);
    std::set<Var> vars;
    for (Var v : res.psi.variables()) vars.insert(v);
    res.vars_remaining = int(vars.size());
    res.complete = res.psi.is_constant() || res.edges_used == int(sequence.size());
    res.sign = res.psi.is_constant() ? -1 : (res.vars_remaining % 2 ? -1 : 1);
    return res;
}

// ---- the engine -----------------------------------------------------------------------

Reducer::Reducer() : Reducer(Options{}) {}

Reducer::Reducer(Options opt) : opt_(std::move(opt)) {}

void Reducer::record(const char* rule, const PolySystem& sys, const std::string& note) {
    if (!opt_.trace) return;
    trace_.push_back({rule, sys.hash(), note});
}

void Reducer::verify_step(const CountTerm& parent, const std::vector<CountTerm>& children,
                          const char* rule) const {
    for (auto& field : opt_.verify_fields) {
        CountExpression lhs, rhs;
        lhs.terms.push_back({UCoeff::one(), parent.sys});
        rhs.terms = children;
        Int l = lhs.eval_enumerated(field, opt_.verify_budget);
        Int r = rhs.eval_enumerated(field, opt_.verify_budget);
        if (l != r)
            throw internal_error(std::string("soundness check failed for rule ") + rule +
                                 " at q=" + std::to_string(field->q()));
    }
}

std::optional<std::string> Reducer::classify_residual(const PolySystem& sys) const {
    if (sys.polys.size() == 1 && sys.polys[0].is_constant()) return "unit";
    if (sys.ambient == AmbientKind::Projective && sys.polys.size() == 1 && sys.nvars == 2) {
        const SparsePoly conic3 = parse_poly("x1^2 + x1*x2 + x2^2");
        const SparsePoly conic4 = parse_poly("x1^2 + x2^2");
        if (sys.polys[0] == conic3) return "conic_sum_cross";
        if (sys.polys[0] == conic4) return "conic_sum_squares";
    }
    if (sys.ambient == AmbientKind::Projective && sys.polys.size() == 1 && sys.nvars == 4) {
        SparsePoly f = quartic_f();
        std::array<Var, 4> perm{1, 2, 3, 4};
        std::sort(perm.begin(), perm.end());
        do {
            std::map<Var, Var> m{{1, perm[0]}, {2, perm[1]}, {3, perm[2]}, {4, perm[3]}};
            if (sys.polys[0] == f.rename(m)) return "quartic_f";
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return std::nullopt;
}

std::optional<Reducer::Result> Reducer::closed_form(const PolySystem& sys) {
    // callers guarantee: no zero polys, no constants, every variable used
    if (sys.polys.size() != 1) return std::nullopt;
    const SparsePoly& f = sys.polys[0];
    if (f.term_count() == 1) {
        // monomial with unit coefficient: torus count
        if (abs(f.leading().second) != 1) return std::nullopt;
        std::uint32_t s = std::uint32_t(f.variables().size());
        Result r;
        if (sys.ambient == AmbientKind::Projective)
            r.resolved = UCoeff::from(QPoly::torus(s - 1, sys.nvars - s));
        else
            r.resolved = UCoeff::from(QPoly::torus(s, sys.nvars - s));
        return r;
    }
    if (f.total_degree() == 1 && f.content() == 1) {
        // primitive linear form: hyperplane complement
        Result r;
        if (sys.ambient == AmbientKind::Projective)
            r.resolved = UCoeff::from(QPoly::power(sys.nvars - 1));
        else
            r.resolved = UCoeff::from(QPoly::power(sys.nvars) -
                                      QPoly::power(sys.nvars - 1));
        return r;
    }
    return std::nullopt;
}

Reducer::Result Reducer::combine(const std::vector<CountTerm>& children, int depth,
                                 int rescale_left) {
    Result total;
    for (auto& ch : children) {
        Result sub = reduce_sys(ch.sys, depth + 1, rescale_left);
        total.resolved = total.resolved + ch.coeff * sub.resolved;
        for (auto& res : sub.residuals) {
            UCoeff c = ch.coeff * res.coeff;
            if (c.is_zero()) continue;
            bool merged = false;
            for (auto& mine : total.residuals)
                if (mine.kind == res.kind && mine.sys.key() == res.sys.key()) {
                    mine.coeff = mine.coeff + c;
                    merged = true;
                    break;
                }
            if (!merged) total.residuals.push_back({c, res.sys, res.kind});
        }
    }
    std::erase_if(total.residuals, [](const Residual& r) { return r.coeff.is_zero(); });
    return total;
}

Reducer::Result Reducer::reduce_term(const CountTerm& t, int depth, int rescale_left) {
    Result sub = reduce_sys(t.sys, depth, rescale_left);
    Result out;
    out.resolved = t.coeff * sub.resolved;
    for (auto& r : sub.residuals) out.residuals.push_back({t.coeff * r.coeff, r.sys, r.kind});
    return out;
}

namespace {

// memo/canonical key: shape-sort, first-occurrence rename, exact sort
std::string canonical_key(const PolySystem& sys) {
    auto shape_sig = [](const SparsePoly& f) {
        std::string s;
        s += std::to_string(f.term_count()) + ":";
        std::multiset<std::string> terms;
        for (auto& t : f.terms()) {
            std::multiset<std::uint32_t> exps;
            for (auto& vp : t.first.vp) exps.insert(vp.exp);
            std::string e = t.second.get_str() + "@";
            for (auto x : exps) e += std::to_string(x) + ",";
            terms.insert(e);
        }
        for (auto& t : terms) s += t + ";";
        return s;
    };
    std::vector<std::size_t> order(sys.polys.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::string> sigs;
    for (auto& f : sys.polys) sigs.push_back(shape_sig(f));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sigs[a] != sigs[b]) return sigs[a] < sigs[b];
        return SparsePoly::cmp(sys.polys[a], sys.polys[b]) < 0;
    });
    std::map<Var, Var> rename;
    Var next = 1;
    for (std::size_t i : order)
        for (auto& t : sys.polys[i].terms())
            for (auto& vp : t.first.vp)
                if (!rename.count(vp.var)) rename[vp.var] = next++;
    PolySystem canon;
    canon.ambient = sys.ambient;
    canon.nvars = sys.nvars;
    for (std::size_t i : order) canon.polys.push_back(sys.polys[i].rename(rename));
    std::sort(canon.polys.begin(), canon.polys.end(),
              [](const SparsePoly& a, const SparsePoly& b) {
                  return SparsePoly::cmp(a, b) < 0;
              });
    return canon.key();
}

}  // namespace

Reducer::Result Reducer::reduce_sys(PolySystem sys, int depth, int rescale_left) {
    if (depth > opt_.max_depth)
        throw internal_error("reduction depth limit exceeded");

    // drop zero polynomials, normalize signs, dedupe
    std::vector<SparsePoly> polys;
    for (auto& f : sys.polys) {
        if (f.is_zero()) continue;
        polys.push_back(sign_normalized(f));
    }
    std::sort(polys.begin(), polys.end(), [](const SparsePoly& a, const SparsePoly& b) {
        return SparsePoly::cmp(a, b) < 0;
    });
    polys.erase(std::unique(polys.begin(), polys.end()), polys.end());
    sys.polys = std::move(polys);

    if (sys.polys.empty()) return {};  // every polynomial vanished: empty complement

    // integer constants: u-split on gcd
    {
        Int cg = 0;
        std::vector<SparsePoly> rest;
        for (auto& f : sys.polys) {
            if (f.is_constant()) {
                Int a = abs(f.constant_value());
                mpz_gcd(cg.get_mpz_t(), cg.get_mpz_t(), a.get_mpz_t());
            } else {
                rest.push_back(f);
            }
        }
        if (cg == 1) {
            QPoly full = sys.ambient == AmbientKind::Projective
                             ? QPoly::projective_space(sys.nvars)
                             : QPoly::power(sys.nvars);
            record("full_space", sys, "unit constant");
            Result r;
            r.resolved = UCoeff::from(full);
            return r;
        }
        if (cg > 1) {
            record("unit_split", sys, "constant " + cg.get_str());
            PolySystem inner = sys;
            inner.polys = rest;
            Result sub = reduce_sys(inner, depth + 1, rescale_left);
            QPoly full = sys.ambient == AmbientKind::Projective
                             ? QPoly::projective_space(sys.nvars)
                             : QPoly::power(sys.nvars);
            UCoeff u = UCoeff::unit(cg);
            Result r;
            r.resolved = u * UCoeff::from(full) + (UCoeff::one() - u) * sub.resolved;
            for (auto& res : sub.residuals) {
                UCoeff c = (UCoeff::one() - u) * res.coeff;
                if (!c.is_zero()) r.residuals.push_back({c, res.sys, res.kind});
            }
            return r;
        }
    }

    // compact unused coordinates: Nbar gains a factor q per unused variable
    {
        std::set<Var> used;
        for (auto& f : sys.polys)
            for (Var v : f.variables()) used.insert(v);
        if (std::uint32_t(used.size()) < sys.nvars) {
            std::vector<Var> coords(used.begin(), used.end());
            std::vector<SparsePoly> fs = sys.polys;
            PolySystem inner = make_system(std::move(fs), sys.ambient, coords);
            std::uint32_t unused = sys.nvars - std::uint32_t(used.size());
            Result sub = reduce_sys(inner, depth + 1, rescale_left);
            UCoeff scale = UCoeff::from(QPoly::power(unused));
            Result r;
            r.resolved = scale * sub.resolved;
            for (auto& res : sub.residuals)
                r.residuals.push_back({scale * res.coeff, res.sys, res.kind});
            return r;
        }
    }

    if (auto cf = closed_form(sys)) {
        record("closed_form", sys, "");
        return *cf;
    }

    std::string key = canonical_key(sys);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    auto finish = [&](Result r) {
        memo_.emplace(std::move(key), r);
        return r;
    };

    // factor + expand: rewrite the first factorable polynomial
    for (std::size_t pi = 0; pi < sys.polys.size(); pi++) {
        const SparsePoly& f = sys.polys[pi];
        Factorization fac = partial_factor(f);
        std::vector<SparsePoly> pieces;
        if (fac.content > 1) pieces.push_back(SparsePoly::constant(fac.content));
        for (auto& vp : fac.mono.vp) pieces.push_back(SparsePoly::variable(vp.var));
        for (auto& gpart : fac.factors)
            if (std::find(pieces.begin(), pieces.end(), gpart) == pieces.end())
                pieces.push_back(gpart);
        if (pieces.empty()) continue;  // constant; handled above
        if (pieces.size() == 1) {
            if (pieces[0] == f) continue;  // nothing stripped
            PolySystem repl = sys;
            repl.polys[pi] = pieces[0];  // power/sign stripped, same zero set
            record("strip_power", sys, "");
            CountTerm parent{UCoeff::one(), sys};
            std::vector<CountTerm> children{{UCoeff::one(), repl}};
            if (!opt_.verify_fields.empty()) verify_step(parent, children, "strip_power");
            return finish(reduce_sys(repl, depth + 1, rescale_left));
        }
        SparsePoly first = pieces[0];
        SparsePoly restprod = SparsePoly::constant(1);
        for (std::size_t i = 1; i < pieces.size(); i++) restprod = restprod * pieces[i];
        auto with_poly = [&](std::initializer_list<SparsePoly> repl) {
            PolySystem s = sys;
            s.polys.erase(s.polys.begin() + pi);
            for (auto& x : repl) s.polys.push_back(x);
            return s;
        };
        std::vector<CountTerm> children{
            {UCoeff::one(), with_poly({first})},
            {UCoeff::one(), with_poly({restprod})},
            {-UCoeff::one(), with_poly({first, restprod})},
        };
        record("expand_product", sys, "");
        if (!opt_.verify_fields.empty())
            verify_step({UCoeff::one(), sys}, children, "expand_product");
        return finish(combine(children, depth, rescale_left));
    }

    // elimination: prefer a variable linear in every polynomial that sees it,
    // in ascending variable order; otherwise any (var, poly) linear pair
    {
        Var pick_var = 0;
        std::size_t pick_poly = SIZE_MAX;
        for (Var x = 1; x <= sys.nvars && pick_poly == SIZE_MAX; x++) {
            bool all_linear = true;
            bool appears = false;
            for (auto& f : sys.polys) {
                std::uint32_t d = f.deg_in(x);
                if (d > 1) all_linear = false;
                if (d >= 1) appears = true;
            }
            if (!appears || !all_linear) continue;
            std::size_t best = SIZE_MAX, best_terms = SIZE_MAX;
            for (std::size_t i = 0; i < sys.polys.size(); i++)
                if (sys.polys[i].deg_in(x) == 1 && sys.polys[i].term_count() < best_terms) {
                    best = i;
                    best_terms = sys.polys[i].term_count();
                }
            pick_var = x;
            pick_poly = best;
        }
        if (pick_poly == SIZE_MAX) {
            for (Var x = 1; x <= sys.nvars && pick_poly == SIZE_MAX; x++) {
                std::size_t best = SIZE_MAX, best_terms = SIZE_MAX;
                for (std::size_t i = 0; i < sys.polys.size(); i++)
                    if (sys.polys[i].deg_in(x) == 1 && sys.polys[i].term_count() < best_terms) {
                        best = i;
                        best_terms = sys.polys[i].term_count();
                    }
                if (best != SIZE_MAX) {
                    pick_var = x;
                    pick_poly = best;
                }
            }
        }
        if (pick_poly != SIZE_MAX) {
            auto children = eq7_children(sys, pick_poly, pick_var);
            record("eliminate", sys, "x" + std::to_string(pick_var));
            if (!opt_.verify_fields.empty())
                verify_step({UCoeff::one(), sys}, children, "eliminate");
            return finish(combine(children, depth, rescale_left));
        }
    }

    // stuck: closed-form classification first
    if (auto kind = classify_residual(sys)) {
        record("residual", sys, *kind);
        Result r;
        r.residuals.push_back({UCoeff::one(), sys, *kind});
        return finish(r);
    }

    // projective dead end: swap to affine space and retry there
    if (opt_.enable_rescale && rescale_left > 0 && sys.nvars >= 2) {
        if (sys.ambient == AmbientKind::Projective) {
            PolySystem proj = sys;
            CountExpression e;
            e.terms.push_back({UCoeff::one(), proj});
            // swap at the last variable
            auto [boundary, dehom] = affine_projective_swap(proj, Var(sys.nvars));
            std::vector<CountTerm> children{{UCoeff::one(), boundary},
                                            {UCoeff::one(), dehom}};
            record("swap_8b", sys, "x" + std::to_string(sys.nvars));
            if (!opt_.verify_fields.empty())
                verify_step({UCoeff::one(), sys}, children, "swap_8b");
            return finish(combine(children, depth, rescale_left - 1));
        }
        // affine: monomial rescaling patterns x_i -> x_i * x_j or x_i / x_j,
        // accepted when some transformed polynomial becomes linear in a variable
        for (Var i = 1; i <= sys.nvars; i++) {
            for (Var j = 1; j <= sys.nvars; j++) {
                if (i == j) continue;
                for (int mode = 0; mode < 2; mode++) {
                    SparsePoly g = mode == 0 ? SparsePoly::variable(j) : SparsePoly::constant(1);
                    SparsePoly h = mode == 0 ? SparsePoly::constant(1) : SparsePoly::variable(j);
                    CountExpression e;
                    e.terms.push_back({UCoeff::one(), sys});
                    CountExpression out = rescale(e, 0, {i}, g, h);
                    // find the pure-tilde term and check for a linear variable
                    bool improved = false;
                    for (auto& t : out.terms) {
                        if (t.sys.polys.size() != sys.polys.size()) continue;
                        for (auto& f : t.sys.polys)
                            for (Var v = 1; v <= t.sys.nvars; v++)
                                if (f.deg_in(v) == 1) improved = true;
                    }
                    if (!improved) continue;
                    record("rescale_8a", sys,
                           "x" + std::to_string(i) + (mode == 0 ? "*" : "/") + "x" +
                               std::to_string(j));
                    std::vector<CountTerm> children;
                    for (auto& t : out.terms) children.push_back(t);
                    if (!opt_.verify_fields.empty())
                        verify_step({UCoeff::one(), sys}, children, "rescale_8a");
                    return finish(combine(children, depth, rescale_left - 1));
                }
            }
        }
    }

    record("residual", sys, "general");
    Result r;
    r.residuals.push_back({UCoeff::one(), sys, "general"});
    return finish(r);
}

ReductionReport Reducer::reduce(const PolySystem& sys) {
    sys.validate();
    trace_.clear();
    Result res = reduce_sys(sys, 0, opt_.rescale_budget);
    ReductionReport rep;
    rep.resolved = res.resolved.plain;
    // unit parts of the resolved coefficient become constant-system residuals
    for (auto& [c, p] : res.resolved.units) {
        PolySystem cs;
        cs.ambient = AmbientKind::Projective;
        cs.nvars = 1;
        cs.polys.push_back(SparsePoly::constant(c));
        rep.residuals.push_back({UCoeff::from(p), std::move(cs), "unit"});
    }
    for (auto& r : res.residuals) rep.residuals.push_back(r);
    rep.trace = trace_;
    return rep;
}

Int ReductionReport::eval(const Field& field, std::uint64_t budget) const {
    Int q(static_cast<unsigned long>(field->q()));
    Int total = resolved.eval(q);
    for (auto& r : residuals)
        total += r.coeff.eval(field) *
                 Int(static_cast<unsigned long>(count_complement_multilinear(r.sys, field, budget)));
    return total;
}

// ---- method 1 driver --------------------------------------------------------------------

std::vector<int> edge_sequence_heuristic(const Multigraph& g) {
    std::vector<int> remaining;
    for (auto& e : g.edges) remaining.push_back(e.id);
    std::sort(remaining.begin(), remaining.end());
    std::vector<int> chosen;
    auto score = [&](const std::vector<int>& prefix) {
        std::set<int> pset(prefix.begin(), prefix.end());
        auto deg = g.degrees();
        std::vector<int> indeg(g.vertex_count, 0);
        std::set<int> touched;
        for (auto& e : g.edges)
            if (pset.count(e.id)) {
                indeg[e.a]++;
                indeg[e.b]++;
                touched.insert(e.a);
                touched.insert(e.b);
            }
        int complete = 0;
        for (int v = 0; v < g.vertex_count; v++)
            if (deg[v] > 0 && indeg[v] == deg[v]) complete++;
        // cycle rank of the prefix subgraph
        Multigraph sub;
        sub.vertex_count = g.vertex_count;
        for (auto& e : g.edges)
            if (pset.count(e.id)) sub.edges.push_back(e);
        int cycles = cycle_rank(sub);
        return std::pair<int, int>(complete, cycles);
    };
    while (!remaining.empty()) {
        int best = -1;
        std::pair<int, int> best_score{-1, -1};
        for (int cand : remaining) {
            auto prefix = chosen;
            prefix.push_back(cand);
            auto s = score(prefix);
            if (s > best_score) {
                best_score = s;
                best = cand;
            }
        }
        chosen.push_back(best);
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    }
    return chosen;
}

PolySystem psi_system(const Multigraph& g, const std::vector<int>& sequence) {
    SparsePoly psi = graph_polynomial(g);
    std::vector<int> order = sequence;
    if (order.empty()) {
        for (auto& e : g.edges) order.push_back(e.id);
        std::sort(order.begin(), order.end());
    }
    std::vector<Var> coords;
    for (int id : order) coords.push_back(Var(id));
    return make_system({psi}, AmbientKind::Projective, coords);
}

ReductionReport run_method1(const Multigraph& g, const std::vector<int>& sequence_hint,
                            Reducer* reducer) {
    if (!g.connected_ignoring_isolated())
        throw input_error("run_method1: disconnected graph");
    std::vector<int> seq = sequence_hint.empty() ? edge_sequence_heuristic(g) : sequence_hint;
    auto probe = structural_probe(g);

    Reducer local;
    Reducer& red = reducer ? *reducer : local;

    CountExpression entry;
    bool used_entry = false;
    if (probe.is_simple && probe.vertex_connectivity_ge_2 &&
        !probe.three_valent_vertices.empty() && g.edge_count() >= 4) {
        // pick the 3-valent vertex whose edges appear earliest in the sequence
        auto pos = [&](int id) {
            return std::find(seq.begin(), seq.end(), id) - seq.begin();
        };
        const ThreeValentVertex* best = nullptr;
        long best_pos = std::numeric_limits<long>::max();
        for (auto& tv : probe.three_valent_vertices) {
            long m = std::max({pos(tv.edges[0]), pos(tv.edges[1]), pos(tv.edges[2])});
            if (m < best_pos) {
                best_pos = m;
                best = &tv;
            }
        }
        entry = theorem1_vertex(g, best->edges, seq);
        used_entry = true;
    } else {
        entry.terms.push_back({UCoeff::one(), psi_system(g, seq)});
    }

    ReductionReport rep;
    UCoeff resolved;
    std::vector<Residual> residuals;
    for (auto& t : entry.terms) {
        ReductionReport sub = red.reduce(t.sys);
        // scale the sub-report by the entry coefficient
        resolved = resolved + t.coeff * UCoeff::from(sub.resolved);
        for (auto& r : sub.residuals) {
            UCoeff c = t.coeff * r.coeff;
            if (c.is_zero()) continue;
            bool merged = false;
            for (auto& mine : residuals)
                if (mine.kind == r.kind && mine.sys.key() == r.sys.key()) {
                    mine.coeff = mine.coeff + c;
                    merged = true;
                    break;
                }
            if (!merged) residuals.push_back({c, r.sys, r.kind});
        }
        for (auto& ts : sub.trace) rep.trace.push_back(ts);
    }
    std::erase_if(residuals, [](const Residual& r) { return r.coeff.is_zero(); });
    rep.resolved = resolved.plain;
    for (auto& [c, p] : resolved.units) {
        PolySystem cs;
        cs.ambient = AmbientKind::Projective;
        cs.nvars = 1;
        cs.polys.push_back(SparsePoly::constant(c));
        rep.residuals.push_back({UCoeff::from(p), std::move(cs), "unit"});
    }
    for (auto& r : residuals) rep.residuals.push_back(std::move(r));
    if (used_entry && rep.trace.empty()) rep.trace.push_back({"theorem1_vertex", 0, ""});
    return rep;
}

bool certify_report(const ReductionReport& report, const PolySystem& original,
                    const Field& field, std::uint64_t budget) {
    Int lhs = report.eval(field, budget);
    std::uint64_t rhs = original.ambient == AmbientKind::Projective
                            ? count_projective_complement(original, field, budget)
                            : count_affine_complement(original, field, budget);
    return lhs == Int(static_cast<unsigned long>(rhs));
}

std::string grothendieck_render(const ReductionReport& report) {
    std::ostringstream os;
    os << report.resolved.str("L");
    for (auto& r : report.residuals) {
        os << " + [";
        bool first = true;
        for (auto& f : r.sys.polys) {
            if (!first) os << ", ";
            os << f.str();
            first = false;
        }
        os << "]*(";
        os << r.coeff.plain.str("L");
        for (auto& [c, p] : r.coeff.units)
            os << " + u" << c.get_str() << "*(" << p.str("L") << ")";
        os << ")";
    }
    return os.str();
}

}  // namespace nbar
