#include <nbar/gf.hpp>

#include <algorithm>
#include <numeric>

namespace nbar {

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull}) {
        if (n % d == 0) return n == d;
    }
    // deterministic Miller-Rabin for 64-bit
    auto mulmod = [](std::uint64_t a, std::uint64_t b, std::uint64_t m) {
        return std::uint64_t((unsigned __int128)a * b % m);
    };
    auto powmod = [&](std::uint64_t a, std::uint64_t e, std::uint64_t m) {
        std::uint64_t r = 1;
        a %= m;
        while (e) {
            if (e & 1) r = mulmod(r, a, m);
            a = mulmod(a, a, m);
            e >>= 1;
        }
        return r;
    };
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; s++; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                            29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; i++) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

namespace {

// polynomial arithmetic over F_p for modulus search (coefficient vectors,
// degree = size-1, no leading zeros)
using PolyP = std::vector<std::uint32_t>;

void trim(PolyP& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

PolyP mulmod_poly(const PolyP& a, const PolyP& b, const PolyP& mod, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    PolyP r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); i++)
        for (std::size_t j = 0; j < b.size(); j++)
            r[i + j] = std::uint32_t((r[i + j] + std::uint64_t(a[i]) * b[j]) % p);
    // reduce by monic mod
    std::size_t k = mod.size() - 1;
    for (std::size_t i = r.size(); i-- > k;) {
        std::uint32_t c = r[i];
        if (c == 0) continue;
        r[i] = 0;
        for (std::size_t j = 0; j < k; j++) {
            std::uint64_t sub = std::uint64_t(c) * mod[j] % p;
            r[i - k + j] = std::uint32_t((r[i - k + j] + p - sub) % p);
        }
    }
    r.resize(std::min(r.size(), k));
    trim(r);
    return r;
}

PolyP powmod_poly(PolyP base, std::uint64_t e, const PolyP& mod, std::uint32_t p) {
    PolyP r = {1};
    while (e) {
        if (e & 1) r = mulmod_poly(r, base, mod, p);
        base = mulmod_poly(base, base, mod, p);
        e >>= 1;
    }
    return r;
}

PolyP gcd_poly(PolyP a, PolyP b, std::uint32_t p) {
    auto inv_mod_p = [&](std::uint32_t x) {
        std::int64_t t = 0, nt = 1, r = p, nr = x;
        while (nr) {
            std::int64_t qq = r / nr;
            std::swap(t -= qq * nt, nt);
            std::swap(r -= qq * nr, nr);
        }
        return std::uint32_t((t % p + p) % p);
    };
    trim(a); trim(b);
    while (!b.empty()) {
        // a mod b
        std::uint32_t lead_inv = inv_mod_p(b.back());
        while (a.size() >= b.size() && !a.empty()) {
            std::uint32_t c = std::uint32_t(std::uint64_t(a.back()) * lead_inv % p);
            if (c != 0) {
                std::size_t off = a.size() - b.size();
                for (std::size_t j = 0; j < b.size(); j++) {
                    std::uint64_t sub = std::uint64_t(c) * b[j] % p;
                    a[off + j] = std::uint32_t((a[off + j] + p - sub) % p);
                }
            }
            trim(a);
            if (a.size() < b.size()) break;
            if (!a.empty() && a.back() == 0) trim(a);
        }
        std::swap(a, b);
        trim(b);
    }
    return a;
}

bool irreducible(const PolyP& mod, std::uint32_t p) {
    std::uint32_t k = std::uint32_t(mod.size() - 1);
    if (k == 1) return true;
    // Rabin: x^(p^k) == x mod f, and gcd(x^(p^(k/r)) - x, f) == 1 for prime r|k
    PolyP x = {0, 1};
    auto xq = [&](std::uint32_t e) {
        std::uint64_t pe = 1;
        for (std::uint32_t i = 0; i < e; i++) pe *= p;
        return powmod_poly(x, pe, mod, p);
    };
    PolyP top = xq(k);
    trim(top);
    if (top != x) return false;
    for (std::uint32_t r = 2; r <= k; r++) {
        if (k % r != 0 || !is_prime_u64(r)) continue;
        PolyP sub = xq(k / r);
        // sub - x
        PolyP diff = sub;
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = std::uint32_t((diff[1] + p - 1) % p);
        trim(diff);
        PolyP g = gcd_poly(diff, mod, p);
        if (!(g.size() == 1)) return false;
    }
    return true;
}

}  // namespace

std::shared_ptr<const FieldSpec> FieldSpec::make(std::uint32_t p, std::uint32_t k) {
    if (!is_prime_u64(p)) throw input_error("make_field: p is not prime");
    if (k < 1) throw input_error("make_field: k must be >= 1");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < k; i++) {
        q *= p;
        if (q > (1ull << 32)) throw budget_error("make_field: q exceeds 2^32");
    }
    auto spec = std::shared_ptr<FieldSpec>(new FieldSpec());
    spec->p_ = p;
    spec->k_ = k;
    spec->q_ = q;
    if (k > 1) {
        // lexicographically smallest monic irreducible: scan the non-leading
        // coefficient vector as a base-p integer
        std::uint64_t qk = q;  // p^k values for the lower coefficients
        bool found = false;
        for (std::uint64_t v = 0; v < qk; v++) {
            PolyP mod(k + 1, 0);
            std::uint64_t t = v;
            for (std::uint32_t i = 0; i < k; i++) { mod[i] = std::uint32_t(t % p); t /= p; }
            mod[k] = 1;
            if (irreducible(mod, p)) {
                spec->modulus_ = std::move(mod);
                found = true;
                break;
            }
        }
        if (!found) throw internal_error("make_field: no irreducible modulus found");
    }
    spec->build_tables();
    return spec;
}

std::shared_ptr<const FieldSpec> FieldSpec::make_with_modulus(
    std::uint32_t p, std::uint32_t k, std::vector<std::uint32_t> modulus) {
    if (!is_prime_u64(p)) throw input_error("make_field: p is not prime");
    if (k < 2 || modulus.size() != k + 1 || modulus[k] != 1)
        throw input_error("make_field: modulus must be monic of degree k >= 2");
    for (auto& c : modulus) c %= p;
    if (!irreducible(modulus, p)) throw input_error("make_field: modulus is reducible");
    auto spec = std::shared_ptr<FieldSpec>(new FieldSpec());
    spec->p_ = p;
    spec->k_ = k;
    spec->q_ = 1;
    for (std::uint32_t i = 0; i < k; i++) spec->q_ *= p;
    spec->modulus_ = std::move(modulus);
    spec->build_tables();
    return spec;
}

void FieldSpec::build_tables() {
    if (k_ > 1 && q_ <= 256) {
        mul_table_.assign(std::size_t(q_) * q_, 0);
        for (std::uint32_t a = 0; a < q_; a++)
            for (std::uint32_t b = a; b < q_; b++) {
                std::uint32_t m = mul_slow(a, b);
                mul_table_[std::size_t(a) * q_ + b] = m;
                mul_table_[std::size_t(b) * q_ + a] = m;
            }
    }
}

std::uint32_t FieldSpec::add(std::uint32_t a, std::uint32_t b) const {
    if (prime_field()) {
        std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint32_t r = 0, mul = 1;
    for (std::uint32_t i = 0; i < k_; i++) {
        std::uint32_t da = a % p_, db = b % p_;
        a /= p_; b /= p_;
        std::uint32_t s = da + db;
        if (s >= p_) s -= p_;
        r += s * mul;
        mul *= p_;
    }
    return r;
}

std::uint32_t FieldSpec::sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }

std::uint32_t FieldSpec::neg(std::uint32_t a) const {
    if (prime_field()) return a == 0 ? 0 : p_ - a;
    std::uint32_t r = 0, mul = 1;
    for (std::uint32_t i = 0; i < k_; i++) {
        std::uint32_t d = a % p_;
        a /= p_;
        r += (d == 0 ? 0 : p_ - d) * mul;
        mul *= p_;
    }
    return r;
}

std::uint32_t FieldSpec::mul_slow(std::uint32_t a, std::uint32_t b) const {
    if (prime_field()) return std::uint32_t(std::uint64_t(a) * b % p_);
    PolyP pa(k_), pb(k_);
    std::uint32_t t = a;
    for (std::uint32_t i = 0; i < k_; i++) { pa[i] = t % p_; t /= p_; }
    t = b;
    for (std::uint32_t i = 0; i < k_; i++) { pb[i] = t % p_; t /= p_; }
    trim(pa); trim(pb);
    PolyP r = mulmod_poly(pa, pb, modulus_, p_);
    std::uint32_t out = 0, mul = 1;
    for (std::size_t i = 0; i < k_; i++) {
        out += (i < r.size() ? r[i] : 0) * mul;
        mul *= p_;
    }
    return out;
}

std::uint32_t FieldSpec::mul(std::uint32_t a, std::uint32_t b) const {
    if (prime_field()) return std::uint32_t(std::uint64_t(a) * b % p_);
    if (!mul_table_.empty()) return mul_table_[std::size_t(a) * q_ + b];
    return mul_slow(a, b);
}

std::uint32_t FieldSpec::pow(std::uint32_t a, std::uint64_t e) const {
    std::uint32_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

std::uint32_t FieldSpec::inv(std::uint32_t a) const {
    if (a == 0) throw internal_error("field inverse of zero");
    if (q_ <= (1u << 16)) {
        std::call_once(inv_once_, [this] {
            inv_table_.assign(q_, 0);
            for (std::uint32_t x = 1; x < q_; x++)
                if (inv_table_[x] == 0) {
                    std::uint32_t y = pow(x, q_ - 2);
                    inv_table_[x] = y;
                    inv_table_[y] = x;
                }
        });
        return inv_table_[a];
    }
    return pow(a, q_ - 2);
}

std::uint32_t FieldSpec::from_int(std::int64_t v) const {
    std::int64_t m = v % std::int64_t(p_);
    if (m < 0) m += p_;
    return std::uint32_t(m);
}

std::uint32_t FieldSpec::from_mpz(const mpz_class& v) const {
    mpz_class m = v % p_;
    if (m < 0) m += p_;
    return std::uint32_t(m.get_ui());
}

std::uint64_t FieldSpec::order(std::uint32_t a) const {
    if (a == 0) throw input_error("order of zero element");
    std::uint64_t n = q_ - 1;
    std::uint64_t ord = n;
    // strip prime factors of q-1 while the power stays 1
    std::uint64_t m = n;
    for (std::uint64_t f = 2; f * f <= m; f++) {
        while (m % f == 0) {
            m /= f;
            while (ord % f == 0 && pow(a, ord / f) == 1) ord /= f;
        }
    }
    if (m > 1)
        while (ord % m == 0 && pow(a, ord / m) == 1) ord /= m;
    return ord;
}

Field make_field(std::uint32_t p, std::uint32_t k) { return FieldSpec::make(p, k); }

FieldElement power_sum(const Field& field, std::uint64_t e) {
    std::uint64_t qm1 = field->q() - 1;
    std::uint32_t r = (e > 0 && e % qm1 == 0) ? field->neg(1) : 0;
    return FieldElement(r, field);
}

int unit_indicator(const mpz_class& z, const Field& field) {
    return mpz_divisible_ui_p(z.get_mpz_t(), field->p()) ? 0 : 1;
}

int unit_indicator(std::int64_t z, const Field& field) {
    std::int64_t m = z % std::int64_t(field->p());
    return m == 0 ? 0 : 1;
}

std::int64_t conic_count(ConicForm which, const Field& field) {
    const auto& F = *field;
    std::uint64_t q = F.q();
    auto value = [&](std::uint32_t a, std::uint32_t b) {
        std::uint32_t a2 = F.mul(a, a), b2 = F.mul(b, b);
        if (which == ConicForm::sum_with_cross) return F.add(F.add(a2, F.mul(a, b)), b2);
        return F.add(a2, b2);
    };
    std::int64_t n = 0;
    for (std::uint32_t b = 0; b < q; b++)
        if (value(1, b) != 0) n++;
    if (value(0, 1) != 0) n++;
    std::int64_t expect;
    if (which == ConicForm::sum_with_cross) {
        int r = int(q % 3);
        expect = std::int64_t(q) - (r == 1 ? 1 : r == 0 ? 0 : -1);
    } else {
        int r = int(q % 4);
        expect = std::int64_t(q) - (r == 1 ? 1 : (r == 0 || r == 2) ? 0 : -1);
    }
    if (n != expect) throw internal_error("conic_count: closed form mismatch");
    return n;
}

}  // namespace nbar
