#include <nbar/poly.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace nbar {

Monomial Monomial::var(Var v, std::uint32_t e) {
    Monomial m;
    if (e > 0) m.vp.push_back({v, e});
    return m;
}

std::uint32_t Monomial::degree() const {
    std::uint32_t d = 0;
    for (auto& p : vp) d += p.exp;
    return d;
}

std::uint32_t Monomial::deg_in(Var v) const {
    for (auto& p : vp)
        if (p.var == v) return p.exp;
    return 0;
}

Monomial Monomial::mul(const Monomial& o) const {
    Monomial r;
    r.vp.reserve(vp.size() + o.vp.size());
    std::size_t i = 0, j = 0;
    while (i < vp.size() && j < o.vp.size()) {
        if (vp[i].var < o.vp[j].var) r.vp.push_back(vp[i++]);
        else if (vp[i].var > o.vp[j].var) r.vp.push_back(o.vp[j++]);
        else {
            r.vp.push_back({vp[i].var, vp[i].exp + o.vp[j].exp});
            i++; j++;
        }
    }
    for (; i < vp.size(); i++) r.vp.push_back(vp[i]);
    for (; j < o.vp.size(); j++) r.vp.push_back(o.vp[j]);
    return r;
}

Monomial Monomial::without(Var v) const {
    Monomial r;
    r.vp.reserve(vp.size());
    for (auto& p : vp)
        if (p.var != v) r.vp.push_back(p);
    return r;
}

std::optional<Monomial> Monomial::div(const Monomial& o) const {
    Monomial r;
    std::size_t i = 0, j = 0;
    while (j < o.vp.size()) {
        if (i == vp.size()) return std::nullopt;
        if (vp[i].var < o.vp[j].var) { r.vp.push_back(vp[i++]); continue; }
        if (vp[i].var > o.vp[j].var) return std::nullopt;
        if (vp[i].exp < o.vp[j].exp) return std::nullopt;
        if (vp[i].exp > o.vp[j].exp) r.vp.push_back({vp[i].var, vp[i].exp - o.vp[j].exp});
        i++; j++;
    }
    for (; i < vp.size(); i++) r.vp.push_back(vp[i]);
    return r;
}

Monomial Monomial::pow(std::uint32_t k) const {
    Monomial r;
    if (k == 0) return r;
    r.vp = vp;
    for (auto& p : r.vp) p.exp *= k;
    return r;
}

int Monomial::cmp_lex(const Monomial& a, const Monomial& b) {
    std::size_t i = 0, j = 0;
    while (i < a.vp.size() && j < b.vp.size()) {
        if (a.vp[i].var < b.vp[j].var) return 1;   // a has the earlier var
        if (a.vp[i].var > b.vp[j].var) return -1;
        if (a.vp[i].exp != b.vp[j].exp) return a.vp[i].exp > b.vp[j].exp ? 1 : -1;
        i++; j++;
    }
    if (i < a.vp.size()) return 1;
    if (j < b.vp.size()) return -1;
    return 0;
}

SparsePoly::SparsePoly(Int c) {
    if (c != 0) terms_.push_back({Monomial::one(), std::move(c)});
}

SparsePoly SparsePoly::variable(Var v) {
    SparsePoly p;
    p.terms_.push_back({Monomial::var(v), Int(1)});
    return p;
}

SparsePoly SparsePoly::monomial(Monomial m, Int c) {
    SparsePoly p;
    if (c != 0) p.terms_.push_back({std::move(m), std::move(c)});
    return p;
}

SparsePoly SparsePoly::from_terms(std::vector<Term> terms) {
    SparsePoly p;
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
}

void SparsePoly::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
        return Monomial::cmp_lex(a.first, b.first) > 0;
    });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!out.empty() && out.back().first == t.first) out.back().second += t.second;
        else out.push_back(std::move(t));
    }
    std::erase_if(out, [](const Term& t) { return t.second == 0; });
    terms_ = std::move(out);
}

bool SparsePoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one());
}

const Int& SparsePoly::constant_value() const {
    if (terms_.size() != 1 || !terms_[0].first.is_one())
        throw internal_error("constant_value on non-constant polynomial");
    return terms_[0].second;
}

std::uint32_t SparsePoly::total_degree() const {
    std::uint32_t d = 0;
    for (auto& t : terms_) d = std::max(d, t.first.degree());
    return d;
}

std::uint32_t SparsePoly::deg_in(Var v) const {
    std::uint32_t d = 0;
    for (auto& t : terms_) d = std::max(d, t.first.deg_in(v));
    return d;
}

bool SparsePoly::is_homogeneous() const {
    if (terms_.empty()) return true;
    std::uint32_t d = terms_[0].first.degree();
    for (auto& t : terms_)
        if (t.first.degree() != d) return false;
    return true;
}

bool SparsePoly::is_multilinear() const {
    for (auto& t : terms_)
        for (auto& p : t.first.vp)
            if (p.exp > 1) return false;
    return true;
}

std::vector<Var> SparsePoly::variables() const {
    std::vector<Var> vs;
    for (auto& t : terms_)
        for (auto& p : t.first.vp) vs.push_back(p.var);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

const SparsePoly::Term& SparsePoly::leading() const {
    if (terms_.empty()) throw internal_error("leading term of zero polynomial");
    return terms_[0];
}

SparsePoly SparsePoly::operator-() const {
    SparsePoly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

SparsePoly SparsePoly::operator+(const SparsePoly& o) const {
    SparsePoly r;
    r.terms_.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() && j < o.terms_.size()) {
        int c = Monomial::cmp_lex(terms_[i].first, o.terms_[j].first);
        if (c > 0) r.terms_.push_back(terms_[i++]);
        else if (c < 0) r.terms_.push_back(o.terms_[j++]);
        else {
            Int s = terms_[i].second + o.terms_[j].second;
            if (s != 0) r.terms_.push_back({terms_[i].first, std::move(s)});
            i++; j++;
        }
    }
    for (; i < terms_.size(); i++) r.terms_.push_back(terms_[i]);
    for (; j < o.terms_.size(); j++) r.terms_.push_back(o.terms_[j]);
    return r;
}

SparsePoly SparsePoly::operator-(const SparsePoly& o) const { return *this + (-o); }

SparsePoly SparsePoly::operator*(const SparsePoly& o) const {
    if (is_zero() || o.is_zero()) return {};
    // map-accumulate; term counts stay modest in this codebase
    std::map<Monomial, Int, decltype([](const Monomial& a, const Monomial& b) {
        return Monomial::cmp_lex(a, b) > 0;
    })> acc;
    for (auto& a : terms_)
        for (auto& b : o.terms_) {
            Monomial m = a.first.mul(b.first);
            auto it = acc.find(m);
            if (it == acc.end()) acc.emplace(std::move(m), a.second * b.second);
            else it->second += a.second * b.second;
        }
    SparsePoly r;
    r.terms_.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (c != 0) r.terms_.push_back({m, c});
    return r;
}

SparsePoly SparsePoly::mul_int(const Int& c) const {
    if (c == 0) return {};
    SparsePoly r = *this;
    for (auto& t : r.terms_) t.second *= c;
    return r;
}

SparsePoly SparsePoly::pow(std::uint32_t k) const {
    SparsePoly r = SparsePoly::constant(1);
    SparsePoly b = *this;
    while (k) {
        if (k & 1) r = r * b;
        k >>= 1;
        if (k) b = b * b;
    }
    return r;
}

SparsePoly SparsePoly::coeff_in(Var v, std::uint32_t d) const {
    std::vector<Term> out;
    for (auto& t : terms_)
        if (t.first.deg_in(v) == d) out.push_back({t.first.without(v), t.second});
    return from_terms(std::move(out));
}

SparsePoly SparsePoly::subst_zero(Var v) const {
    std::vector<Term> out;
    for (auto& t : terms_)
        if (!t.first.contains(v)) out.push_back(t);
    return from_terms(std::move(out));
}

SparsePoly SparsePoly::subst_one(Var v) const {
    std::vector<Term> out;
    for (auto& t : terms_) out.push_back({t.first.without(v), t.second});
    return from_terms(std::move(out));
}

SparsePoly SparsePoly::subst(Var v, const SparsePoly& value) const {
    std::uint32_t dmax = deg_in(v);
    if (dmax == 0) return *this;
    // Horner in v
    SparsePoly r = coeff_in(v, dmax);
    for (std::uint32_t d = dmax; d-- > 0;) r = r * value + coeff_in(v, d);
    return r;
}

SparsePoly SparsePoly::rename(const std::map<Var, Var>& map) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
        Monomial m;
        m.vp.reserve(t.first.vp.size());
        for (auto& p : t.first.vp) {
            auto it = map.find(p.var);
            m.vp.push_back({it == map.end() ? p.var : it->second, p.exp});
        }
        std::sort(m.vp.begin(), m.vp.end(),
                  [](auto& a, auto& b) { return a.var < b.var; });
        out.push_back({std::move(m), t.second});
    }
    return from_terms(std::move(out));
}

Int SparsePoly::eval_int(const std::map<Var, Int>& point) const {
    Int total = 0;
    for (auto& t : terms_) {
        Int v = t.second;
        for (auto& p : t.first.vp) {
            auto it = point.find(p.var);
            if (it == point.end()) throw internal_error("eval_int: unbound variable");
            Int pw;
            mpz_pow_ui(pw.get_mpz_t(), it->second.get_mpz_t(), p.exp);
            v *= pw;
        }
        total += v;
    }
    return total;
}

Int SparsePoly::content() const {
    Int g = 0;
    for (auto& t : terms_) {
        Int a = abs(t.second);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

int SparsePoly::sign() const {
    if (terms_.empty()) return 0;
    return sgn(terms_[0].second);
}

SparsePoly SparsePoly::divexact_int(const Int& c) const {
    if (c == 0) throw internal_error("division by zero");
    SparsePoly r = *this;
    for (auto& t : r.terms_) {
        Int q, rem;
        mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), t.second.get_mpz_t(), c.get_mpz_t());
        if (rem != 0) throw internal_error("divexact_int: not divisible");
        t.second = std::move(q);
    }
    return r;
}

std::optional<SparsePoly> SparsePoly::divexact(const SparsePoly& d) const {
    if (d.is_zero()) return std::nullopt;
    SparsePoly rem = *this;
    std::vector<Term> quot;
    const Term& dl = d.leading();
    while (!rem.is_zero()) {
        const Term& rl = rem.leading();
        auto m = rl.first.div(dl.first);
        if (!m) return std::nullopt;
        Int q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rl.second.get_mpz_t(), dl.second.get_mpz_t());
        if (r != 0) return std::nullopt;
        SparsePoly piece = SparsePoly::monomial(*m, q);
        quot.push_back({*m, q});
        rem = rem - piece * d;
    }
    return from_terms(std::move(quot));
}

std::string SparsePoly::str() const { return str({}); }

std::string SparsePoly::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& t : terms_) {
        Int c = t.second;
        if (first) {
            if (c < 0) { os << "-"; c = -c; }
        } else {
            os << (c < 0 ? " - " : " + ");
            if (c < 0) c = -c;
        }
        first = false;
        bool coeff_shown = (c != 1) || t.first.is_one();
        if (coeff_shown) os << c.get_str();
        bool need_star = coeff_shown;
        for (auto& p : t.first.vp) {
            if (need_star) os << "*";
            need_star = true;
            if (p.var < names.size() && !names[p.var].empty()) os << names[p.var];
            else os << "x" << p.var;
            if (p.exp > 1) os << "^" << p.exp;
        }
    }
    return os.str();
}

void SparsePoly::append_key(std::string& out) const {
    auto put32 = [&out](std::uint32_t v) {
        for (int i = 0; i < 4; i++) out.push_back(char((v >> (8 * i)) & 0xff));
    };
    put32(std::uint32_t(terms_.size()));
    for (auto& t : terms_) {
        put32(std::uint32_t(t.first.vp.size()));
        for (auto& p : t.first.vp) { put32(p.var); put32(p.exp); }
        std::string c = t.second.get_str(16);
        put32(std::uint32_t(c.size()));
        out += c;
    }
}

int SparsePoly::cmp(const SparsePoly& a, const SparsePoly& b) {
    std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; i++) {
        int c = Monomial::cmp_lex(a.terms_[i].first, b.terms_[i].first);
        if (c != 0) return c;
        int s = ::cmp(a.terms_[i].second, b.terms_[i].second);
        if (s != 0) return s;
    }
    if (a.terms_.size() != b.terms_.size())
        return a.terms_.size() < b.terms_.size() ? -1 : 1;
    return 0;
}

// ---- roots ----------------------------------------------------------------

std::optional<SparsePoly> poly_sqrt(const SparsePoly& p) {
    if (p.is_zero()) return SparsePoly::zero();
    if (p.sign() < 0) return std::nullopt;
    if (p.is_constant()) {
        Int r, c = p.constant_value();
        if (mpz_perfect_square_p(c.get_mpz_t()) == 0) return std::nullopt;
        mpz_sqrt(r.get_mpz_t(), c.get_mpz_t());
        return SparsePoly::constant(r);
    }
    // recurse on the largest present variable: p = sum p_j v^j
    Var v = 0;
    for (Var u : p.variables()) v = std::max(v, u);
    std::uint32_t d = p.deg_in(v);
    if (d % 2 != 0) return std::nullopt;
    std::uint32_t hd = d / 2;
    auto top = poly_sqrt(p.coeff_in(v, d));
    if (!top) return std::nullopt;
    // r = sum_{m<=hd} r_m v^m with r_hd = sqrt(p_d); match coefficients of
    // v^(d-1) ... v^hd, solving 2*r_hd*r_m = p_(hd+m) - cross terms
    std::vector<SparsePoly> r(hd + 1);
    r[hd] = *top;
    SparsePoly two_top = top->mul_int(2);
    for (std::uint32_t m = hd; m-- > 0;) {
        SparsePoly rhs = p.coeff_in(v, hd + m);
        for (std::uint32_t i = m + 1; i < hd; i++) {
            std::uint32_t j = hd + m - i;
            if (j <= hd && j > m) rhs = rhs - r[i] * r[j];
        }
        auto q = rhs.divexact(two_top);
        if (!q) return std::nullopt;
        r[m] = *q;
    }
    SparsePoly root;
    for (std::uint32_t m = 0; m <= hd; m++)
        root = root + r[m] * SparsePoly::monomial(Monomial::var(v, m), 1);
    if (root * root == p) return root;
    return std::nullopt;
}

std::optional<SparsePoly> poly_kth_root(const SparsePoly& p, std::uint32_t k) {
    if (k == 0) return std::nullopt;
    if (k == 1) return p;
    if (k == 2) return poly_sqrt(p);
    if (k % 2 == 0) {
        auto h = poly_sqrt(p);
        if (!h) return std::nullopt;
        return poly_kth_root(*h, k / 2);
    }
    if (p.is_zero()) return SparsePoly::zero();
    // odd k: Newton-style on the largest variable, verified by powering
    if (p.is_constant()) {
        Int c = p.constant_value(), r;
        if (mpz_root(r.get_mpz_t(), c.get_mpz_t(), k) == 0) return std::nullopt;
        return SparsePoly::constant(r);
    }
    Var v = 0;
    for (Var u : p.variables()) v = std::max(v, u);
    std::uint32_t d = p.deg_in(v);
    if (d % k != 0) return std::nullopt;
    std::uint32_t hd = d / k;
    auto top = poly_kth_root(p.coeff_in(v, d), k);
    if (!top) return std::nullopt;
    std::vector<SparsePoly> r(hd + 1);
    r[hd] = *top;
    // match coefficient of v^(d-1)... determine r_m from the k*top^(k-1)*r_m term
    SparsePoly lead_fac = top->pow(k - 1).mul_int(Int(k));
    for (std::uint32_t m = hd; m-- > 0;) {
        // coefficient of v^((k-1)*hd + m) in r^k minus known contributions
        SparsePoly partial;
        for (std::uint32_t t = m + 1; t <= hd; t++) partial = partial + r[t] * SparsePoly::monomial(Monomial::var(v, t), 1);
        SparsePoly pk = partial.pow(k);
        SparsePoly rhs = p.coeff_in(v, (k - 1) * hd + m) - pk.coeff_in(v, (k - 1) * hd + m);
        auto q = rhs.divexact(lead_fac);
        if (!q) return std::nullopt;
        r[m] = *q;
    }
    SparsePoly root;
    for (std::uint32_t m = 0; m <= hd; m++)
        root = root + r[m] * SparsePoly::monomial(Monomial::var(v, m), 1);
    if (root.pow(k) == p) return root;
    return std::nullopt;
}

// ---- parser ---------------------------------------------------------------

namespace {

struct Parser {
    const std::string& s;
    std::size_t i = 0;
    std::vector<std::string>* names;

    void skip() { while (i < s.size() && std::isspace((unsigned char)s[i])) i++; }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) { i++; return true; }
        return false;
    }

    Var var_id(const std::string& name) {
        // "x<N>" maps straight to id N when no name table is in play
        if (!names) {
            if (name.size() >= 2 && name[0] == 'x') {
                bool digits = true;
                for (std::size_t k = 1; k < name.size(); k++)
                    if (!std::isdigit((unsigned char)name[k])) digits = false;
                if (digits) return Var(std::stoul(name.substr(1)));
            }
            throw input_error("unknown variable '" + name + "' (expect x<N>)");
        }
        for (std::size_t k = 0; k < names->size(); k++)
            if ((*names)[k] == name) return Var(k + 1);
        names->push_back(name);
        return Var(names->size());
    }

    SparsePoly parse() {
        SparsePoly r = parse_expr();
        skip();
        if (i != s.size()) throw input_error("trailing characters in polynomial");
        return r;
    }

    SparsePoly parse_expr() {
        SparsePoly r;
        bool neg = eat('-');
        r = parse_term();
        if (neg) r = -r;
        for (;;) {
            skip();
            if (eat('+')) r = r + parse_term();
            else if (eat('-')) r = r - parse_term();
            else break;
        }
        return r;
    }

    SparsePoly parse_term() {
        SparsePoly r = parse_factor();
        for (;;) {
            skip();
            if (eat('*')) r = r * parse_factor();
            else break;
        }
        return r;
    }

    SparsePoly parse_factor() {
        skip();
        if (i >= s.size()) throw input_error("unexpected end of polynomial");
        if (eat('(')) {
            SparsePoly r = parse_expr();
            if (!eat(')')) throw input_error("missing ')'");
            return maybe_pow(r);
        }
        if (std::isdigit((unsigned char)s[i])) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit((unsigned char)s[j])) j++;
            Int c(s.substr(i, j - i));
            i = j;
            return maybe_pow(SparsePoly::constant(c));
        }
        if (std::isalpha((unsigned char)s[i]) || s[i] == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) j++;
            std::string name = s.substr(i, j - i);
            i = j;
            return maybe_pow(SparsePoly::variable(var_id(name)));
        }
        throw input_error(std::string("unexpected character '") + s[i] + "' in polynomial");
    }

    SparsePoly maybe_pow(SparsePoly base) {
        skip();
        if (eat('^')) {
            skip();
            std::size_t j = i;
            while (j < s.size() && std::isdigit((unsigned char)s[j])) j++;
            if (j == i) throw input_error("missing exponent after '^'");
            unsigned long e = std::stoul(s.substr(i, j - i));
            i = j;
            return base.pow(std::uint32_t(e));
        }
        return base;
    }
};

}  // namespace

SparsePoly parse_poly(const std::string& text) {
    Parser p{text, 0, nullptr};
    return p.parse();
}

SparsePoly parse_poly(const std::string& text, std::vector<std::string>& names) {
    Parser p{text, 0, &names};
    return p.parse();
}

}  // namespace nbar
