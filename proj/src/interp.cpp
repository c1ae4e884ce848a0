#include <nbar/interp.hpp>

#include <nbar/errors.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace nbar {

namespace {

struct Level {
    std::vector<Int> d;      // current quotients per sample
    std::vector<Int> coeffs; // c_start..c_k found so far
};

Int crt_residue(const std::vector<Int>& d, const std::vector<Int>& mods, const Int& M) {
    // incremental CRT: x == d[i] mod mods[i]
    Int x = 0, m = 1;
    for (std::size_t i = 0; i < d.size(); i++) {
        // x + m*t == d[i] (mod mods[i])  =>  t == (d[i]-x)/m
        Int mi = mods[i];
        Int r = (d[i] - x) % mi;
        if (r < 0) r += mi;
        Int minv;
        if (mpz_invert(minv.get_mpz_t(), m.get_mpz_t(), mi.get_mpz_t()) == 0)
            throw input_error("crt_reconstruct: sample moduli are not pairwise coprime");
        Int t = (r * minv) % mi;
        x += m * t;
        m *= mi;
    }
    x %= M;
    if (x < 0) x += M;
    return x;
}

}  // namespace

std::vector<QPoly> crt_reconstruct(std::vector<CountSample> samples, std::uint32_t degree,
                                   ReconstructOptions opt) {
    if (opt.drop_prime_2)
        std::erase_if(samples, [](const CountSample& s) { return s.q % 2 == 0; });
    if (samples.size() < 2) throw input_error("crt_reconstruct: need at least 2 samples");
    std::set<std::uint64_t> qs;
    for (auto& s : samples) {
        if (s.q < 2) throw input_error("crt_reconstruct: bad q");
        if (s.nbar < 0) throw input_error("crt_reconstruct: negative count");
        if (!qs.insert(s.q).second) throw input_error("crt_reconstruct: duplicate q");
    }

    std::vector<Int> mods;
    Int M = 1;
    for (auto& s : samples) {
        mods.push_back(Int(static_cast<unsigned long>(s.q)));
        M *= mods.back();
    }

    // start at c_2 when all counts are divisible by q^2
    bool all_div_q2 = true;
    for (auto& s : samples)
        if (s.nbar % (mods[&s - samples.data()] * mods[&s - samples.data()]) != 0)
            all_div_q2 = false;
    std::uint32_t start = all_div_q2 ? 2 : 0;

    Level init;
    for (std::size_t i = 0; i < samples.size(); i++) {
        Int v = samples[i].nbar;
        if (start == 2) v /= mods[i] * mods[i];
        init.d.push_back(v);
    }

    std::vector<QPoly> out;
    std::vector<Level> frontier{init};
    for (std::uint32_t level = start; level <= degree && !frontier.empty(); level++) {
        std::vector<Level> next;
        for (auto& L : frontier) {
            Int r = crt_residue(L.d, mods, M);
            Int r0 = r, r1 = r - M;  // the two representatives nearest zero
            if (cmp(abs(r1), abs(r0)) < 0) std::swap(r0, r1);
            std::vector<Int> cands{r0};
            if (opt.branch_per_level >= 2) {
                Int a0 = abs(r0);
                if (a0 < 1) a0 = 1;
                Int bound = opt.second_factor * a0;
                if (abs(r1) <= bound) cands.push_back(r1);
            }
            for (auto& c : cands) {
                Level nl;
                nl.coeffs = L.coeffs;
                nl.coeffs.push_back(c);
                bool ok = true;
                for (std::size_t i = 0; i < L.d.size(); i++) {
                    Int t = L.d[i] - c;
                    if (t % mods[i] != 0) { ok = false; break; }
                    nl.d.push_back(t / mods[i]);
                }
                if (ok) next.push_back(std::move(nl));
            }
        }
        frontier = std::move(next);
    }

    for (auto& L : frontier) {
        bool done = true;
        for (auto& v : L.d)
            if (v != 0) done = false;
        if (!done) continue;
        QPoly cand;
        cand.c.assign(start, Int(0));
        for (auto& c : L.coeffs) cand.c.push_back(c);
        cand.trim();
        if (opt.require_monic_top) {
            if (cand.degree() != int(degree)) continue;
            if (cand.coeff(degree) != 1) continue;
            if (degree >= 1 && cand.coeff(degree - 1) != 0) continue;
        }
        if (std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(cand);
    }
    return out;
}

std::vector<QPoly> residue_class_reconstruct(const std::vector<CountSample>& samples,
                                             std::uint64_t modulus, std::uint64_t residue,
                                             std::uint32_t degree, ReconstructOptions opt) {
    std::vector<CountSample> sub;
    for (auto& s : samples)
        if (s.q % modulus == residue % modulus) sub.push_back(s);
    if (sub.size() < 3)
        throw input_error("residue_class_reconstruct: need >= 3 samples in the class");
    return crt_reconstruct(std::move(sub), degree, opt);
}

bool verify_candidate(const QPoly& cand, const std::vector<CountSample>& samples) {
    for (auto& s : samples)
        if (cand.eval(Int(static_cast<unsigned long>(s.q))) != s.nbar) return false;
    return true;
}

std::vector<CountSample> parse_samples(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<CountSample> out;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::uint64_t q;
        std::string nbar;
        if (!(ls >> q >> nbar)) continue;
        out.push_back({q, Int(nbar), "file"});
    }
    return out;
}

std::string samples_to_text(const std::vector<CountSample>& samples) {
    std::ostringstream os;
    for (auto& s : samples) os << s.q << " " << s.nbar.get_str() << "\n";
    return os.str();
}

// ---- zeta ---------------------------------------------------------------------

std::vector<ZetaFactor> zeta_function(const QPoly& nbar) {
    std::vector<ZetaFactor> out;
    int n = nbar.degree() + 1;
    for (int k = 0; k < n; k++) out.push_back({std::uint32_t(k), nbar.coeff(k) - 1});
    return out;
}

std::string zeta_to_string(const std::vector<ZetaFactor>& factors) {
    std::ostringstream num, den;
    for (auto& f : factors) {
        if (f.exponent == 0) continue;
        std::ostringstream base;
        base << "(1";
        base << " - ";
        if (f.k == 0) base << "t";
        else if (f.k == 1) base << "q*t";
        else base << "q^" << f.k << "*t";
        base << ")";
        Int e = abs(f.exponent);
        std::string s = base.str();
        if (e != 1) s += "^" + e.get_str();
        if (f.exponent > 0) {
            if (num.tellp() > 0) num << "*";
            num << s;
        } else {
            if (den.tellp() > 0) den << "*";
            den << s;
        }
    }
    std::string n = num.tellp() > 0 ? num.str() : "1";
    if (den.tellp() > 0) return n + " / (" + den.str() + ")";
    return n;
}

namespace {

// multiply truncated series a by (1 - u t)^e for integer e (negative allowed)
std::vector<Int> mul_binomial_power(std::vector<Int> a, const Int& u, Int e, int order) {
    // (1-ut)^e: for e >= 0 multiply e times; else divide: series division by (1-ut)
    while (e > 0) {
        std::vector<Int> b(a.size(), Int(0));
        for (std::size_t i = 0; i < a.size(); i++) {
            b[i] += a[i];
            if (i + 1 < a.size()) b[i + 1] -= a[i] * u;
        }
        a = std::move(b);
        e -= 1;
    }
    while (e < 0) {
        // b = a / (1-ut): b[i] = a[i] + u*b[i-1]
        std::vector<Int> b(a.size(), Int(0));
        for (std::size_t i = 0; i < a.size(); i++) {
            b[i] = a[i];
            if (i > 0) b[i] += u * b[i - 1];
        }
        a = std::move(b);
        e += 1;
    }
    (void)order;
    return a;
}

}  // namespace

std::vector<Int> zeta_series(const std::vector<ZetaFactor>& factors, const Int& q,
                             int order) {
    std::vector<Int> series(order + 1, Int(0));
    series[0] = 1;
    for (auto& f : factors) {
        Int u;
        mpz_pow_ui(u.get_mpz_t(), q.get_mpz_t(), f.k);
        series = mul_binomial_power(std::move(series), u, f.exponent, order);
    }
    return series;
}

std::vector<Int> exp_series_from_counts(const std::vector<Int>& counts, int order) {
    // exp(sum N_k t^k / k) via the recurrence B' = B * S' with
    // S = sum N_k t^k/k, S' = sum N_k t^{k-1}:
    //   (i+1) b_{i+1} = sum_{k=1..i+1} N_k b_{i+1-k}
    std::vector<Int> b(order + 1, Int(0));
    b[0] = 1;
    for (int i = 0; i < order; i++) {
        Int acc = 0;
        for (int k = 1; k <= i + 1; k++) {
            if (k - 1 >= int(counts.size())) break;
            acc += counts[k - 1] * b[i + 1 - k];
        }
        Int rem;
        mpz_tdiv_qr(b[i + 1].get_mpz_t(), rem.get_mpz_t(), acc.get_mpz_t(),
                    Int(i + 1).get_mpz_t());
        if (rem != 0) throw internal_error("exp_series_from_counts: non-integral series");
    }
    return b;
}

}  // namespace nbar
