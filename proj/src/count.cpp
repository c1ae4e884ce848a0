#include <nbar/count.hpp>

#include <nbar/graphpoly.hpp>
#include <nbar/kernels.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <map>
#include <set>
#include <unordered_map>

namespace nbar {

void PolySystem::validate() const {
    for (auto& f : polys) {
        for (Var v : f.variables())
            if (v < 1 || v > nvars)
                throw input_error("system variable out of range");
        if (ambient == AmbientKind::Projective && !f.is_homogeneous())
            throw input_error("projective system requires homogeneous polynomials");
    }
}

std::string PolySystem::key() const {
    std::string k;
    k.push_back(ambient == AmbientKind::Projective ? 'P' : 'A');
    for (int i = 0; i < 4; i++) k.push_back(char((nvars >> (8 * i)) & 0xff));
    auto sorted = polys;
    std::sort(sorted.begin(), sorted.end(),
              [](const SparsePoly& a, const SparsePoly& b) { return SparsePoly::cmp(a, b) < 0; });
    for (auto& f : sorted) f.append_key(k);
    return k;
}

std::uint64_t PolySystem::hash() const {
    std::string k = key();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : k) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

PolySystem make_system(std::vector<SparsePoly> polys, AmbientKind kind,
                       const std::vector<Var>& coords) {
    std::map<Var, Var> remap;
    for (std::size_t i = 0; i < coords.size(); i++) remap[coords[i]] = Var(i + 1);
    PolySystem sys;
    sys.ambient = kind;
    sys.nvars = std::uint32_t(coords.size());
    for (auto& f : polys) {
        for (Var v : f.variables())
            if (!remap.count(v))
                throw input_error("make_system: polynomial variable not among coordinates");
        sys.polys.push_back(f.rename(remap));
    }
    sys.validate();
    return sys;
}

// ---- exhaustive enumeration ---------------------------------------------------

namespace {

struct PrimeOps {
    std::uint32_t p;
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return std::uint32_t(std::uint64_t(a) * b % p);
    }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        std::uint32_t s = a + b;
        return s >= p ? s - p : s;
    }
};

struct FieldOps {
    const FieldSpec* f;
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return f->mul(a, b); }
    std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return f->add(a, b); }
};

// nested-coefficient evaluation plan for one polynomial; variables are
// assigned in the fixed order x1 (outer) .. xn (inner)
struct PolyPlan {
    struct Step {
        std::uint32_t parent;
        std::uint32_t exp;
    };
    std::vector<std::vector<Step>> steps;   // depth 0..n-2
    std::vector<std::uint32_t> slot_count;  // depth 0..n-1
    std::vector<std::uint32_t> last_exp;    // per slot at depth n-1
    std::uint32_t last_deg = 0;
    std::vector<std::uint32_t> init;        // depth-0 coefficients (mod p image)
    std::uint32_t max_exp = 0;
};

// terms with coefficient reduced into the field's prime subfield image
std::vector<std::pair<Monomial, std::uint32_t>> reduced_terms(const SparsePoly& f,
                                                              const Field& F) {
    std::vector<std::pair<Monomial, std::uint32_t>> out;
    for (auto& t : f.terms()) {
        std::uint32_t c = F->from_mpz(t.second);
        if (c != 0) out.push_back({t.first, c});
    }
    return out;
}

PolyPlan build_plan(const std::vector<std::pair<Monomial, std::uint32_t>>& terms,
                    std::uint32_t nvars) {
    PolyPlan plan;
    std::vector<Monomial> cur;
    plan.slot_count.assign(nvars, 0);
    for (auto& t : terms) {
        cur.push_back(t.first);
        plan.init.push_back(t.second);
    }
    plan.slot_count[0] = std::uint32_t(cur.size());
    for (std::uint32_t d = 0; d + 1 < nvars; d++) {
        Var v = d + 1;
        std::vector<Monomial> next;
        std::map<std::string, std::uint32_t> index;
        std::vector<PolyPlan::Step> st(cur.size());
        for (std::size_t i = 0; i < cur.size(); i++) {
            std::uint32_t e = cur[i].deg_in(v);
            plan.max_exp = std::max(plan.max_exp, e);
            Monomial m = cur[i].without(v);
            std::string key;
            SparsePoly::monomial(m, 1).append_key(key);
            auto it = index.find(key);
            std::uint32_t slot;
            if (it == index.end()) {
                slot = std::uint32_t(next.size());
                index.emplace(std::move(key), slot);
                next.push_back(m);
            } else {
                slot = it->second;
            }
            st[i] = {slot, e};
        }
        plan.steps.push_back(std::move(st));
        plan.slot_count[d + 1] = std::uint32_t(next.size());
        cur = std::move(next);
    }
    // innermost variable: slots are monomials in x_nvars only
    Var vlast = nvars;
    for (auto& m : cur) {
        std::uint32_t e = m.deg_in(vlast);
        plan.last_exp.push_back(e);
        plan.last_deg = std::max(plan.last_deg, e);
        plan.max_exp = std::max(plan.max_exp, e);
    }
    return plan;
}

template <class Ops>
struct Enumerator {
    Ops ops;
    std::uint64_t q;
    std::uint32_t n;
    bool prime;
    std::uint32_t p;
    std::vector<PolyPlan> plans;
    // buf[pi][d]: coefficients at depth d
    std::vector<std::vector<std::vector<std::uint32_t>>> buf;
    std::vector<std::vector<std::uint32_t>> univar;  // dense innermost coeffs
    std::vector<std::uint32_t> powv;
    std::uint64_t zeros = 0;

    Enumerator(Ops o, std::uint64_t q_, std::uint32_t n_, bool prime_, std::uint32_t p_,
               std::vector<PolyPlan> plans_)
        : ops(o), q(q_), n(n_), prime(prime_), p(p_), plans(std::move(plans_)) {
        buf.resize(plans.size());
        univar.resize(plans.size());
        for (std::size_t i = 0; i < plans.size(); i++) {
            buf[i].resize(n);
            for (std::uint32_t d = 0; d < n; d++) buf[i][d].assign(plans[i].slot_count[d], 0);
            buf[i][0] = plans[i].init;
            univar[i].assign(plans[i].last_deg + 1, 0);
            powv.resize(std::max<std::size_t>(powv.size(), plans[i].max_exp + 1));
        }
        powv.resize(std::max<std::size_t>(powv.size(), 2));
    }

    void transition(std::size_t pi, std::uint32_t d, std::uint32_t val) {
        const auto& st = plans[pi].steps[d];
        auto& src = buf[pi][d];
        auto& dst = buf[pi][d + 1];
        std::fill(dst.begin(), dst.end(), 0);
        powv[0] = 1;
        for (std::uint32_t e = 1; e <= plans[pi].max_exp; e++) powv[e] = ops.mul(powv[e - 1], val);
        for (std::size_t i = 0; i < st.size(); i++) {
            if (src[i] == 0) continue;
            std::uint32_t contrib = st[i].exp ? ops.mul(src[i], powv[st[i].exp]) : src[i];
            dst[st[i].parent] = ops.add(dst[st[i].parent], contrib);
        }
    }

    void innermost() {
        // collect dense univariate coefficients per polynomial
        for (std::size_t pi = 0; pi < plans.size(); pi++) {
            auto& u = univar[pi];
            std::fill(u.begin(), u.end(), 0);
            auto& src = buf[pi][n - 1];
            for (std::size_t i = 0; i < src.size(); i++)
                if (src[i] != 0)
                    u[plans[pi].last_exp[i]] = ops.add(u[plans[pi].last_exp[i]], src[i]);
        }
        if (plans.size() == 1 && prime && p < (1u << 16)) {
            zeros += kern::active_kernels().count_univariate_zeros(
                univar[0].data(), int(plans[0].last_deg), p);
            return;
        }
        for (std::uint64_t x = 0; x < q; x++) {
            bool all = true;
            for (std::size_t pi = 0; pi < plans.size() && all; pi++) {
                const auto& u = univar[pi];
                std::uint32_t acc = u[plans[pi].last_deg];
                for (int e = int(plans[pi].last_deg) - 1; e >= 0; e--)
                    acc = ops.add(ops.mul(acc, std::uint32_t(x)), u[e]);
                if (acc != 0) all = false;
            }
            if (all) zeros++;
        }
    }

    void dfs(std::uint32_t d, const ShardSpec& shard) {
        if (d == n - 1) {
            innermost();
            return;
        }
        std::uint64_t start = (d == 0) ? shard.index : 0;
        std::uint64_t step = (d == 0) ? shard.total : 1;
        for (std::uint64_t v = start; v < q; v += step) {
            for (std::size_t pi = 0; pi < plans.size(); pi++)
                transition(pi, d, std::uint32_t(v));
            dfs(d + 1, shard);
        }
    }

    std::uint64_t run(const ShardSpec& shard) {
        if (n == 1) {
            // depth 0 already is the innermost level
            for (std::size_t pi = 0; pi < plans.size(); pi++) {
                auto& u = univar[pi];
                std::fill(u.begin(), u.end(), 0);
                for (std::size_t i = 0; i < plans[pi].init.size(); i++) {
                    std::uint32_t e = plans[pi].last_exp[i];
                    u[e] = ops.add(u[e], plans[pi].init[i]);
                }
            }
            if (shard.total != 1) {
                // count only x == index (mod total)
                for (std::uint64_t x = shard.index; x < q; x += shard.total) {
                    bool all = true;
                    for (std::size_t pi = 0; pi < plans.size() && all; pi++) {
                        const auto& u = univar[pi];
                        std::uint32_t acc = u[plans[pi].last_deg];
                        for (int e = int(plans[pi].last_deg) - 1; e >= 0; e--)
                            acc = ops.add(ops.mul(acc, std::uint32_t(x)), u[e]);
                        if (acc != 0) all = false;
                    }
                    if (all) zeros++;
                }
                return zeros;
            }
            innermost();
            return zeros;
        }
        dfs(0, shard);
        return zeros;
    }
};

std::uint64_t pow_u64_checked(std::uint64_t b, std::uint32_t e) {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < e; i++) {
        if (r > (~0ull) / b) throw budget_error("q^n overflows 64 bits");
        r *= b;
    }
    return r;
}

std::uint64_t shard_value_count(std::uint64_t q, const ShardSpec& s) {
    if (s.index >= q) return 0;
    return (q - 1 - s.index) / s.total + 1;
}

}  // namespace

std::uint64_t count_zeros(const PolySystem& sys, const Field& field, ShardSpec shard,
                          std::uint64_t budget) {
    sys.validate();
    if (shard.total == 0 || shard.index >= shard.total)
        throw input_error("bad shard spec");
    const std::uint64_t q = field->q();
    const std::uint32_t n = sys.nvars;

    // reduce mod p: drop vanishing polynomials, bail on unit constants
    std::vector<std::vector<std::pair<Monomial, std::uint32_t>>> reduced;
    for (auto& f : sys.polys) {
        auto t = reduced_terms(f, field);
        if (t.empty()) continue;  // identically zero: no constraint
        if (t.size() == 1 && t[0].first.is_one()) return 0;  // unit constant
        reduced.push_back(std::move(t));
    }
    if (n == 0) return shard.index == 0 ? 1 : 0;  // the empty tuple

    std::uint64_t total_points = pow_u64_checked(q, n);
    std::uint64_t my_points = shard_value_count(q, shard) * pow_u64_checked(q, n - 1);
    if (my_points > budget) {
        std::uint64_t need = (total_points + budget - 1) / budget;
        throw budget_error("enumeration over " + std::to_string(total_points) +
                           " points exceeds budget; use at least " + std::to_string(need) +
                           " shards");
    }
    if (reduced.empty()) return my_points;

    std::vector<PolyPlan> plans;
    for (auto& t : reduced) plans.push_back(build_plan(t, n));

    if (field->prime_field()) {
        Enumerator<PrimeOps> en(PrimeOps{field->p()}, q, n, true, field->p(), std::move(plans));
        return en.run(shard);
    }
    Enumerator<FieldOps> en(FieldOps{field.get()}, q, n, false, field->p(), std::move(plans));
    return en.run(shard);
}

std::uint64_t count_affine(const PolySystem& sys, const Field& field, ShardSpec shard,
                           std::uint64_t budget) {
    if (sys.ambient != AmbientKind::Affine)
        throw input_error("count_affine requires an affine system");
    return count_zeros(sys, field, shard, budget);
}

namespace {

// complement bookkeeping shared by the enumeration and multilinear paths
enum class SpecialForm { None, AllZero, UnitConstant };

SpecialForm classify_mod_p(const PolySystem& sys, const Field& field) {
    bool any = false;
    for (auto& f : sys.polys) {
        auto t = reduced_terms(f, field);
        if (t.empty()) continue;
        if (t.size() == 1 && t[0].first.is_one()) return SpecialForm::UnitConstant;
        any = true;
    }
    return any ? SpecialForm::None : SpecialForm::AllZero;
}

std::uint64_t projective_points(std::uint64_t q, std::uint32_t n) {
    // |P^{n-1}| = q^{n-1} + ... + 1
    std::uint64_t r = 0, t = 1;
    for (std::uint32_t i = 0; i < n; i++) {
        r += t;
        t *= q;
    }
    return r;
}

std::uint64_t proj_complement_from_zeros(const PolySystem& sys, const Field& field,
                                         std::uint64_t zeros) {
    const std::uint64_t q = field->q();
    std::uint64_t qn = pow_u64_checked(q, sys.nvars);
    if ((qn - zeros) % (q - 1) != 0)
        throw internal_error("projective complement: (q^n - N) not divisible by q-1");
    return (qn - zeros) / (q - 1);
}

}  // namespace

std::uint64_t count_projective_complement(const PolySystem& sys, const Field& field,
                                          std::uint64_t budget) {
    if (sys.ambient != AmbientKind::Projective)
        throw input_error("count_projective_complement requires a projective system");
    sys.validate();
    switch (classify_mod_p(sys, field)) {
        case SpecialForm::AllZero: return 0;
        case SpecialForm::UnitConstant: return projective_points(field->q(), sys.nvars);
        case SpecialForm::None: break;
    }
    return proj_complement_from_zeros(sys, field, count_zeros(sys, field, {}, budget));
}

std::uint64_t count_affine_complement(const PolySystem& sys, const Field& field,
                                      std::uint64_t budget) {
    if (sys.ambient != AmbientKind::Affine)
        throw input_error("count_affine_complement requires an affine system");
    std::uint64_t qn = pow_u64_checked(field->q(), sys.nvars);
    return qn - count_zeros(sys, field, {}, budget);
}

// ---- multilinear recursive counter ---------------------------------------------

namespace {

// Mod-p polynomial with nibble-packed monomials: variable v (1..16) holds its
// exponent in bits 4(v-1)..4v-1.  Products become integer additions; memo
// keys become cheap byte strings.  Blocks that overflow the packing (more
// than 16 variables or an exponent above 15) fall back to enumeration.
struct PPoly {
    std::vector<std::pair<std::uint64_t, std::uint32_t>> t;  // sorted desc, coeff in [1,p)
    std::uint64_t maxnib = 0;  // per-variable maximum exponent, nibble-packed

    bool zero() const { return t.empty(); }
    bool constant() const { return t.empty() || (t.size() == 1 && t[0].first == 0); }

    static std::uint32_t exp_of(std::uint64_t m, std::uint32_t v) {
        return std::uint32_t(m >> (4 * (v - 1))) & 0xFu;
    }

    std::uint32_t deg_in(std::uint32_t v) const {
        return exp_of(maxnib, v);
    }

    std::uint16_t var_mask() const {
        std::uint16_t mask = 0;
        for (std::uint32_t v = 1; v <= 16; v++)
            if (exp_of(maxnib, v)) mask |= std::uint16_t(1u << (v - 1));
        return mask;
    }

    void finalize(std::uint32_t p) {
        std::sort(t.begin(), t.end(),
                  [](auto& a, auto& b) { return a.first > b.first; });
        std::size_t out = 0;
        for (std::size_t i = 0; i < t.size();) {
            std::uint64_t m = t[i].first;
            std::uint64_t c = 0;
            while (i < t.size() && t[i].first == m) c += t[i++].second;
            c %= p;
            if (c) t[out++] = {m, std::uint32_t(c)};
        }
        t.resize(out);
        maxnib = 0;
        for (auto& [m, c] : t)
            for (std::uint32_t v = 1; v <= 16; v++) {
                std::uint32_t e = exp_of(m, v);
                if (e > exp_of(maxnib, v))
                    maxnib = (maxnib & ~(0xFull << (4 * (v - 1)))) |
                             (std::uint64_t(e) << (4 * (v - 1)));
            }
    }

    PPoly coeff_in(std::uint32_t v, std::uint32_t d, std::uint32_t p) const {
        PPoly r;
        std::uint64_t nib = 0xFull << (4 * (v - 1));
        for (auto& [m, c] : t)
            if (exp_of(m, v) == d) r.t.push_back({m & ~nib, c});
        r.finalize(p);
        return r;
    }

    void append_key(std::string& out) const {
        std::uint32_t n = std::uint32_t(t.size());
        out.append(reinterpret_cast<const char*>(&n), 4);
        for (auto& [m, c] : t) {
            out.append(reinterpret_cast<const char*>(&m), 8);
            out.append(reinterpret_cast<const char*>(&c), 4);
        }
    }
};

struct pack_overflow {};

PPoly ppoly_add(const PPoly& a, const PPoly& b, std::uint32_t p) {
    PPoly r;
    r.t.reserve(a.t.size() + b.t.size());
    r.t = a.t;
    r.t.insert(r.t.end(), b.t.begin(), b.t.end());
    r.finalize(p);
    return r;
}

PPoly ppoly_scale(const PPoly& a, std::uint32_t c, std::uint32_t p) {
    PPoly r;
    c %= p;
    if (c == 0) return r;
    r = a;
    for (auto& [m, co] : r.t) co = std::uint32_t(std::uint64_t(co) * c % p);
    return r;
}

PPoly ppoly_mul(const PPoly& a, const PPoly& b, std::uint32_t p) {
    // nibble overflow check once, via the per-variable maxima
    for (std::uint32_t v = 1; v <= 16; v++)
        if (PPoly::exp_of(a.maxnib, v) + PPoly::exp_of(b.maxnib, v) > 15)
            throw pack_overflow{};
    PPoly r;
    r.t.reserve(a.t.size() * b.t.size());
    for (auto& [ma, ca] : a.t)
        for (auto& [mb, cb] : b.t)
            r.t.push_back({ma + mb, std::uint32_t(std::uint64_t(ca) * cb % p)});
    r.finalize(p);
    return r;
}

struct MultiCounter {
    Field field;
    std::uint64_t budget;
    std::unordered_map<std::string, std::uint64_t> memo;
    std::uint32_t p;

    explicit MultiCounter(Field f, std::uint64_t b) : field(std::move(f)), budget(b) {
        p = field->p();
    }

    std::uint32_t inv_mod_p(std::uint32_t a) const {
        std::uint64_t r = 1, base = a, e = p - 2;
        while (e) {
            if (e & 1) r = r * base % p;
            base = base * base % p;
            e >>= 1;
        }
        return std::uint32_t(r);
    }

    // canonical key: monic polys, shape-sorted, variables renamed by first
    // occurrence, exact resort, byte serialization
    std::string canonical_key(std::vector<PPoly> S) const {
        for (auto& f : S)
            if (!f.t.empty() && f.t[0].second != 1)
                f = ppoly_scale(f, inv_mod_p(f.t[0].second), p);
        // renaming-invariant signature: term count plus sorted (degree, coeff)
        auto sig = [](const PPoly& f) {
            std::vector<std::uint64_t> s;
            s.reserve(f.t.size() + 1);
            for (auto& [m, c] : f.t) {
                std::uint32_t deg = 0;
                std::uint64_t mm = m;
                while (mm) { deg += mm & 0xF; mm >>= 4; }
                s.push_back((std::uint64_t(deg) << 32) | c);
            }
            std::sort(s.begin(), s.end());
            return s;
        };
        std::vector<std::vector<std::uint64_t>> sigs(S.size());
        for (std::size_t i = 0; i < S.size(); i++) sigs[i] = sig(S[i]);
        std::vector<std::size_t> order(S.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (sigs[a] != sigs[b]) return sigs[a] < sigs[b];
            return S[a].t < S[b].t;
        });
        // first-occurrence rename over the ordered polys
        std::array<std::uint32_t, 17> rename{};
        std::uint32_t next = 1;
        for (std::size_t oi : order)
            for (auto& [m, c] : S[oi].t)
                for (std::uint32_t v = 1; v <= 16; v++)
                    if (PPoly::exp_of(m, v) && rename[v] == 0) rename[v] = next++;
        std::vector<PPoly> renamed;
        renamed.reserve(S.size());
        for (std::size_t oi : order) {
            PPoly f;
            f.t.reserve(S[oi].t.size());
            for (auto& [m, c] : S[oi].t) {
                std::uint64_t nm = 0;
                for (std::uint32_t v = 1; v <= 16; v++) {
                    std::uint32_t e = PPoly::exp_of(m, v);
                    if (e) nm |= std::uint64_t(e) << (4 * (rename[v] - 1));
                }
                f.t.push_back({nm, c});
            }
            f.finalize(p);
            renamed.push_back(std::move(f));
        }
        std::sort(renamed.begin(), renamed.end(),
                  [](const PPoly& a, const PPoly& b) { return a.t < b.t; });
        std::string key;
        key.reserve(renamed.size() * 16);
        for (auto& f : renamed) f.append_key(key);
        return key;
    }

    std::uint64_t enumerate_block(const std::vector<PPoly>& sys,
                                  const std::vector<Var>& vars) {
        std::map<std::uint32_t, Var> back;
        for (std::size_t i = 0; i < vars.size(); i++) back[std::uint32_t(i + 1)] = Var(i + 1);
        std::vector<SparsePoly> polys;
        for (auto& f : sys) {
            std::vector<SparsePoly::Term> terms;
            for (auto& [m, c] : f.t) {
                Monomial mono;
                for (std::uint32_t v = 1; v <= 16; v++) {
                    std::uint32_t e = PPoly::exp_of(m, v);
                    if (e) mono.vp.push_back({Var(v), e});
                }
                terms.push_back({std::move(mono), Int(c)});
            }
            polys.push_back(SparsePoly::from_terms(std::move(terms)));
        }
        PolySystem blk;
        blk.ambient = AmbientKind::Affine;
        blk.nvars = std::uint32_t(vars.size());
        blk.polys = std::move(polys);
        return count_zeros(blk, field, {}, budget);
    }

    // common zero count over F_q^{vars(S)}; callers add q^(unused) factors
    std::uint64_t zrec(std::vector<PPoly> S, int depth) {
        if (depth > 4000) throw internal_error("multilinear counter: recursion too deep");
        std::vector<PPoly> sys;
        for (auto& f : S) {
            if (f.zero()) continue;
            if (f.constant()) return 0;  // nonzero constant
            sys.push_back(std::move(f));
        }
        std::sort(sys.begin(), sys.end(),
                  [](const PPoly& a, const PPoly& b) { return a.t < b.t; });
        sys.erase(std::unique(sys.begin(), sys.end(),
                              [](const PPoly& a, const PPoly& b) { return a.t == b.t; }),
                  sys.end());
        std::uint16_t used = 0;
        for (auto& f : sys) used |= f.var_mask();
        const std::uint32_t s = std::uint32_t(std::popcount(used));
        if (s == 0) return 1;  // no constraints, no variables: the empty point

        std::string key = canonical_key(sys);
        if (auto it = memo.find(key); it != memo.end()) return it->second;

        // variable that appears linearly in some polynomial; prefer the one
        // whose elimination touches the least material (cheapest resultants)
        std::uint32_t pick_v = 0;
        std::size_t pick_f = SIZE_MAX;
        std::size_t best_cost = SIZE_MAX;
        for (std::uint32_t v = 1; v <= 16; v++) {
            if (!(used >> (v - 1) & 1)) continue;
            std::size_t linear_terms = SIZE_MAX, lin_idx = SIZE_MAX, cost = 0;
            for (std::size_t i = 0; i < sys.size(); i++) {
                std::uint32_t d = sys[i].deg_in(v);
                if (d >= 1) cost += sys[i].t.size() * d;
                if (d == 1 && sys[i].t.size() < linear_terms) {
                    linear_terms = sys[i].t.size();
                    lin_idx = i;
                }
            }
            if (lin_idx == SIZE_MAX) continue;
            cost += linear_terms * sys.size();
            if (cost < best_cost) {
                best_cost = cost;
                pick_v = v;
                pick_f = lin_idx;
            }
        }

        std::uint64_t result;
        if (pick_f == SIZE_MAX) {
            std::vector<Var> vars;
            for (std::uint32_t v = 1; v <= 16; v++)
                if (used >> (v - 1) & 1) vars.push_back(Var(v));
            // compact onto 1..s before handing to the enumerator
            std::vector<PPoly> compact = sys;
            std::array<std::uint32_t, 17> rn{};
            std::uint32_t next = 1;
            for (Var v : vars) rn[v] = next++;
            for (auto& f : compact) {
                for (auto& [m, c] : f.t) {
                    std::uint64_t nm = 0;
                    for (std::uint32_t v = 1; v <= 16; v++) {
                        std::uint32_t e = PPoly::exp_of(m, v);
                        if (e) nm |= std::uint64_t(e) << (4 * (rn[v] - 1));
                    }
                    m = nm;
                }
                f.finalize(p);
            }
            result = enumerate_block(compact, vars);
        } else {
            const std::uint32_t x = pick_v;
            PPoly f = sys[pick_f];
            std::vector<PPoly> others;
            for (std::size_t i = 0; i < sys.size(); i++)
                if (i != pick_f) others.push_back(sys[i]);
            PPoly f1 = f.coeff_in(x, 1, p);
            PPoly f0 = f.coeff_in(x, 0, p);
            PPoly neg_f0 = ppoly_scale(f0, p - 1, p);
            // substitute x = -f0/f1 into the rest, resultant style
            std::vector<PPoly> bar;
            bool overflow = false;
            try {
                for (auto& g : others) {
                    std::uint32_t k = g.deg_in(x);
                    PPoly acc;
                    for (std::uint32_t i = 0; i <= k; i++) {
                        PPoly term = g.coeff_in(x, i, p);
                        for (std::uint32_t j = 0; j < i; j++) term = ppoly_mul(term, neg_f0, p);
                        for (std::uint32_t j = i; j < k; j++) term = ppoly_mul(term, f1, p);
                        acc = ppoly_add(acc, term, p);
                    }
                    bar.push_back(std::move(acc));
                }
            } catch (const pack_overflow&) {
                overflow = true;
            }
            if (overflow) {
                std::vector<Var> vars;
                for (std::uint32_t v = 1; v <= 16; v++)
                    if (used >> (v - 1) & 1) vars.push_back(Var(v));
                std::vector<PPoly> compact = sys;
                std::array<std::uint32_t, 17> rn{};
                std::uint32_t next = 1;
                for (Var v : vars) rn[v] = next++;
                for (auto& f2 : compact) {
                    for (auto& [m, c] : f2.t) {
                        std::uint64_t nm = 0;
                        for (std::uint32_t v = 1; v <= 16; v++) {
                            std::uint32_t e = PPoly::exp_of(m, v);
                            if (e) nm |= std::uint64_t(e) << (4 * (rn[v] - 1));
                        }
                        m = nm;
                    }
                    f2.finalize(p);
                }
                result = enumerate_block(compact, vars);
            } else {
                // N(S) over s vars =
                //   N(bar)            over s-1 vars (f1 != 0, x solved)
                // - N(bar + {f1})     over s-1 vars
                // + N(others+{f1,f0}) over s vars   (f vanishes identically)
                auto count_over = [&](std::vector<PPoly> T, std::uint32_t ambient_vars) {
                    std::uint16_t um = 0;
                    for (auto& g : T) {
                        if (g.zero()) continue;
                        if (g.constant()) return std::uint64_t(0);
                        um |= g.var_mask();
                    }
                    std::uint64_t sub = zrec(std::move(T), depth + 1);
                    std::uint64_t factor = 1;
                    for (std::uint32_t i = std::uint32_t(std::popcount(um)); i < ambient_vars;
                         i++)
                        factor *= field->q();
                    return sub * factor;
                };
                std::uint64_t a = count_over(bar, s - 1);
                std::vector<PPoly> bar_f1 = bar;
                bar_f1.push_back(f1);
                std::uint64_t b = count_over(std::move(bar_f1), s - 1);
                std::vector<PPoly> rest = others;
                rest.push_back(f1);
                rest.push_back(f0);
                std::uint64_t c = count_over(std::move(rest), s);
                result = a - b + c;
            }
        }
        memo.emplace(std::move(key), result);
        return result;
    }

    std::uint64_t count(const PolySystem& sys) {
        sys.validate();
        std::uint64_t qn = pow_u64_checked(field->q(), sys.nvars);
        (void)qn;
        // map used variables onto packed slots 1..16
        std::set<Var> used_vars;
        bool packable = true;
        for (auto& f : sys.polys)
            for (auto& t : f.terms())
                for (auto& vp : t.first.vp) {
                    used_vars.insert(vp.var);
                    if (vp.exp > 15) packable = false;
                }
        if (used_vars.size() > 16) packable = false;
        if (!packable) {
            // rare: hand the whole system to the enumerator
            return count_zeros(sys, field, {}, budget);
        }
        std::map<Var, std::uint32_t> slot;
        std::uint32_t next = 1;
        for (Var v : used_vars) slot[v] = next++;
        std::vector<PPoly> S;
        bool any_zero_all = false;
        (void)any_zero_all;
        for (auto& f : sys.polys) {
            PPoly z;
            for (auto& t : f.terms()) {
                std::uint32_t c = field->from_mpz(t.second);
                if (c == 0) continue;
                std::uint64_t m = 0;
                for (auto& vp : t.first.vp)
                    m |= std::uint64_t(vp.exp) << (4 * (slot[vp.var] - 1));
                z.t.push_back({m, c});
            }
            z.finalize(p);
            if (z.zero()) continue;
            if (z.constant()) return 0;
            S.push_back(std::move(z));
        }
        std::uint64_t factor = 1;
        if (S.empty()) return pow_u64_checked(field->q(), sys.nvars);
        std::uint16_t used = 0;
        for (auto& f : S) used |= f.var_mask();
        for (std::uint32_t i = std::uint32_t(std::popcount(used)); i < sys.nvars; i++)
            factor *= field->q();
        return zrec(std::move(S), 0) * factor;
    }
};

}  // namespace

std::uint64_t count_zeros_multilinear(const PolySystem& sys, const Field& field,
                                      std::uint64_t budget) {
    MultiCounter mc(field, budget);
    return mc.count(sys);
}

struct MultilinearCounter::Impl {
    MultiCounter mc;
    Impl(Field f, std::uint64_t b) : mc(std::move(f), b) {}
};

MultilinearCounter::MultilinearCounter(Field field, std::uint64_t budget)
    : impl_(new Impl(std::move(field), budget)) {}

MultilinearCounter::~MultilinearCounter() = default;

std::uint64_t MultilinearCounter::zeros(const PolySystem& sys) { return impl_->mc.count(sys); }

std::uint64_t MultilinearCounter::complement(const PolySystem& sys) {
    sys.validate();
    const Field& field = impl_->mc.field;
    if (sys.ambient == AmbientKind::Affine) {
        std::uint64_t qn = pow_u64_checked(field->q(), sys.nvars);
        return qn - impl_->mc.count(sys);
    }
    switch (classify_mod_p(sys, field)) {
        case SpecialForm::AllZero: return 0;
        case SpecialForm::UnitConstant: return projective_points(field->q(), sys.nvars);
        case SpecialForm::None: break;
    }
    return proj_complement_from_zeros(sys, field, impl_->mc.count(sys));
}

std::uint64_t count_complement_multilinear(const PolySystem& sys, const Field& field,
                                           std::uint64_t budget) {
    sys.validate();
    if (sys.ambient == AmbientKind::Affine) {
        std::uint64_t qn = pow_u64_checked(field->q(), sys.nvars);
        return qn - count_zeros_multilinear(sys, field, budget);
    }
    switch (classify_mod_p(sys, field)) {
        case SpecialForm::AllZero: return 0;
        case SpecialForm::UnitConstant: return projective_points(field->q(), sys.nvars);
        case SpecialForm::None: break;
    }
    return proj_complement_from_zeros(sys, field,
                                      count_zeros_multilinear(sys, field, budget));
}

// ---- Eq. 8b swap ----------------------------------------------------------------

std::pair<PolySystem, PolySystem> affine_projective_swap(const PolySystem& sys, Var v) {
    if (sys.ambient != AmbientKind::Projective)
        throw input_error("affine_projective_swap requires a projective system");
    sys.validate();
    if (v < 1 || v > sys.nvars) throw input_error("swap variable out of range");
    std::map<Var, Var> remap;
    for (Var u = 1; u <= sys.nvars; u++) {
        if (u == v) continue;
        remap[u] = u < v ? u : u - 1;
    }
    PolySystem boundary{AmbientKind::Projective, sys.nvars - 1, {}};
    PolySystem dehom{AmbientKind::Affine, sys.nvars - 1, {}};
    for (auto& f : sys.polys) {
        boundary.polys.push_back(f.subst_zero(v).rename(remap));
        dehom.polys.push_back(f.subst_one(v).rename(remap));
    }
    return {std::move(boundary), std::move(dehom)};
}

// ---- c2 ------------------------------------------------------------------------

C2Report c2_invariant(const Multigraph& g, const Field& field) {
    auto probe = structural_probe(g);
    if (!probe.is_simple || !probe.vertex_connectivity_ge_2)
        throw input_error("c2_invariant requires a simple 2-connected graph");
    const std::uint64_t q = field->q();
    SparsePoly psi = graph_polynomial(g);
    std::vector<Var> coords;
    for (auto& e : g.edges) coords.push_back(Var(e.id));
    std::sort(coords.begin(), coords.end());
    PolySystem sys = make_system({psi}, AmbientKind::Projective, coords);
    C2Report rep;
    rep.nbar = count_complement_multilinear(sys, field);
    if (rep.nbar % (q * q) != 0)
        throw internal_error("c2_invariant: Nbar not divisible by q^2");
    rep.c2 = std::uint32_t((rep.nbar / (q * q)) % q);
    if (!probe.three_valent_vertices.empty()) {
        auto vfd = vertex_face_decomposition(g, probe.three_valent_vertices[0].edges);
        std::vector<Var> rest;
        for (Var c : coords)
            if (int(c) != vfd.edges[0] && int(c) != vfd.edges[1] && int(c) != vfd.edges[2])
                rest.push_back(c);
        PolySystem pair_sys =
            make_system({vfd.psi_del3, vfd.delta}, AmbientKind::Projective, rest);
        std::uint64_t nbar_pair = count_complement_multilinear(pair_sys, field);
        if (nbar_pair % q != rep.c2)
            throw internal_error("c2_invariant: Eq. 15a route disagrees with full count");
        rep.delta_route_checked = true;
    }
    return rep;
}

// ---- quartic surface scan --------------------------------------------------------

std::uint64_t quartic_nbar_direct(std::uint64_t p) {
    auto f = [&](std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
        std::uint64_t a2 = a * a % p, b2 = b * b % p, c2 = c * c % p, d2 = d * d % p;
        std::uint64_t s = 0;
        s += a2 % p * b2 % p;
        s += a2 * b % p * c % p;
        s += a2 * b % p * d % p;
        s += a2 * c % p * d % p;
        s += a * b2 % p * c % p;
        s += a * b % p * c2 % p;
        s += a * b % p * c % p * d % p;
        s += a * b % p * d2 % p;
        s += a * c2 % p * d % p;
        s += a * c % p * d2 % p;
        s += b * c2 % p * d % p;
        s += c2 * d2 % p;
        return s % p;
    };
    std::uint64_t nonzero = 0;
    for (std::uint64_t b = 0; b < p; b++)
        for (std::uint64_t c = 0; c < p; c++)
            for (std::uint64_t d = 0; d < p; d++)
                if (f(1, b, c, d) != 0) nonzero++;
    for (std::uint64_t c = 0; c < p; c++)
        for (std::uint64_t d = 0; d < p; d++)
            if (f(0, 1, c, d) != 0) nonzero++;
    for (std::uint64_t d = 0; d < p; d++)
        if (f(0, 0, 1, d) != 0) nonzero++;
    if (f(0, 0, 0, 1) != 0) nonzero++;
    return nonzero;
}

std::uint64_t quartic_nbar(std::uint64_t p) {
    if (p < 3 || p >= (1u << 16) || !is_prime_u64(p) || p == 2)
        throw input_error("quartic_nbar: odd prime < 2^16 required");
    const std::uint32_t up = std::uint32_t(p);
    const auto& K = kern::active_kernels();
    // chart a=1: f(1,b,c,d) is quadratic in d:
    //   alpha = c^2+c+b, beta = (b+1)(c^2+c)+b, gamma = b(c^2+c) + b^2(c+1)
    std::vector<std::uint32_t> t1(p), A(p), B(p), C(p);
    for (std::uint64_t c = 0; c < p; c++) t1[c] = std::uint32_t(c * (c + 1) % p);
    std::vector<std::int32_t> chi(p, -1);
    chi[0] = 0;
    for (std::uint64_t x = 1; x < p; x++) chi[x * x % p] = 1;
    std::uint64_t zeros1 = 0;
    for (std::uint64_t b = 0; b < p; b++) {
        std::uint32_t ub = std::uint32_t(b);
        std::uint32_t b2 = std::uint32_t(b * b % p);
        K.fused_affine_mod(t1.data(), p, 1, 0, ub, up, A.data());
        K.fused_affine_mod(t1.data(), p, std::uint32_t((b + 1) % p), 0, ub, up, B.data());
        K.fused_affine_mod(t1.data(), p, ub, b2, b2, up, C.data());
        zeros1 += K.quadratic_roots_sum(A.data(), B.data(), C.data(), p, chi.data(), up);
    }
    // chart a=0,b=1: f = c^2 d (1+d): zero iff c=0 or d=0 or d=-1
    std::uint64_t zeros2 = 3 * p - 2;
    // chart a=0,b=0,c=1: f = d^2
    std::uint64_t zeros3 = 1;
    // point (0,0,0,1): f = 0
    std::uint64_t zeros4 = 1;
    std::uint64_t points = ((p * p + p + 1) * p + 1);  // p^3+p^2+p+1
    return points - (zeros1 + zeros2 + zeros3 + zeros4);
}

std::vector<Result4Row> result4_scan(std::uint64_t p_max) {
    if (p_max < 3) throw input_error("result4_scan: p_max must be >= 3");
    std::vector<Result4Row> rows;
    for (std::uint64_t p = 3; p <= p_max; p += 2) {
        if (!is_prime_u64(p)) continue;
        Result4Row row;
        row.p = p;
        row.nbar = quartic_nbar(p);
        row.nbar_mod_p = row.nbar % p;
        std::uint64_t kmax = 0;
        while ((kmax + 1) * (kmax + 1) * 7 <= p) kmax++;
        row.k = -1;
        for (std::uint64_t k = 0; k <= kmax; k++) {
            if (28 * k % p * k % p == row.nbar_mod_p) {
                row.k = std::int64_t(k);
                break;
            }
        }
        if (row.k >= 0) row.ratio = 7.0 * double(row.k) * double(row.k) / double(p);
        std::uint64_t r7 = p % 7;
        bool zero_expected = (p == 7) || r7 == 3 || r7 == 5 || r7 == 6;
        row.pattern_ok = (row.k == 0) == zero_expected && row.k >= 0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nbar
