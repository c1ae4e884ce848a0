#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nbar/count.hpp>
#include <nbar/gf.hpp>
#include <nbar/interp.hpp>

#include <random>

using namespace nbar;

namespace {

std::vector<CountSample> sample_poly(const QPoly& p,
                                     std::initializer_list<std::uint64_t> qs) {
    std::vector<CountSample> out;
    for (std::uint64_t q : qs)
        out.push_back({q, p.eval(Int(static_cast<unsigned long>(q))), "synthetic"});
    return out;
}

}  // namespace

TEST_CASE("C3 samples reconstruct q^2") {
    std::vector<CountSample> s{{2, Int(4), ""}, {3, Int(9), ""}, {5, Int(25), ""},
                               {7, Int(49), ""}};
    auto cands = crt_reconstruct(s, 2);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0] == QPoly::power(2));
}

TEST_CASE("non-polynomial conic samples are rejected") {
    // Nbar(a^2+ab+b^2) over q=2,3,5,7: 3, 3, 6, 6 — the chi_3 pattern
    std::vector<CountSample> s;
    for (std::uint32_t p : {2, 3, 5, 7}) {
        Field f = make_field(p, 1);
        s.push_back({p, Int(long(conic_count(ConicForm::sum_with_cross, f))), ""});
    }
    auto cands = crt_reconstruct(s, 3);
    CHECK(cands.empty());
}

TEST_CASE("residue-class reconstruction sees the conic closed forms") {
    std::vector<CountSample> samples;
    for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {11, 1}, {13, 1}}) {
        Field f = make_field(p, k);
        samples.push_back(
            {f->q(), Int(long(conic_count(ConicForm::sum_with_cross, f))), ""});
    }
    ReconstructOptions opt;
    opt.require_monic_top = false;
    auto plus = residue_class_reconstruct(samples, 3, 1, 1, opt);  // q = 4,7,13
    REQUIRE(plus.size() >= 1);
    QPoly qminus1 = QPoly::power(1) - QPoly::constant(1);
    CHECK(std::find(plus.begin(), plus.end(), qminus1) != plus.end());

    auto minus = residue_class_reconstruct(samples, 3, 2, 1, opt);  // q = 2,5,11
    QPoly qplus1 = QPoly::power(1) + QPoly::constant(1);
    REQUIRE(minus.size() >= 1);
    CHECK(std::find(minus.begin(), minus.end(), qplus1) != minus.end());

    // mixing the classes kills every candidate (prime samples only; the
    // reconstruction requires pairwise coprime moduli)
    std::vector<CountSample> primes_only;
    for (auto& s : samples)
        if (s.q != 4) primes_only.push_back(s);
    auto mixed = crt_reconstruct(primes_only, 1, opt);
    bool has_conic = false;
    for (auto& c : mixed)
        if (c == qminus1 || c == qplus1) has_conic = true;
    CHECK_FALSE(has_conic);
    CHECK_THROWS_AS(crt_reconstruct(samples, 1, opt), input_error);
}

TEST_CASE("random round trips with graph-shaped polynomials") {
    std::mt19937_64 rng(2024);
    int done = 0;
    while (done < 300) {
        std::uint32_t deg = 4 + std::uint32_t(rng() % 10);  // up to 13
        QPoly p;
        p.c.assign(deg + 1, Int(0));
        p.c[deg] = 1;
        for (std::uint32_t i = 2; i + 2 <= deg; i++)
            p.c[i] = Int(long(rng() % 81) - 40);
        bool negative = false;
        for (std::uint64_t q : {2, 3, 5, 7, 11})
            if (p.eval(Int(static_cast<unsigned long>(q))) < 0) negative = true;
        if (negative) continue;  // counts are nonnegative; resample
        done++;
        auto samples = sample_poly(p, {2, 3, 5, 7, 11});
        auto cands = crt_reconstruct(samples, deg);
        REQUIRE(cands.size() == 1);
        CHECK(cands[0] == p);
    }
}

TEST_CASE("drop-prime-2 workflow") {
    QPoly p = QPoly::power(3) + QPoly::power(1, Int(5)) + QPoly::constant(7);
    auto samples = sample_poly(p, {3, 5, 7, 11});
    samples.push_back({2, p.eval(Int(2)) + 1, "corrupted"});  // exceptional prime
    ReconstructOptions opt;
    opt.drop_prime_2 = true;
    auto cands = crt_reconstruct(samples, 3, opt);
    REQUIRE(cands.size() == 1);
    CHECK(cands[0] == p);
    auto with2 = crt_reconstruct(samples, 3);
    CHECK(std::find(with2.begin(), with2.end(), p) == with2.end());
}

TEST_CASE("prime power verification of candidates") {
    QPoly p = QPoly::power(2);
    CHECK(verify_candidate(p, sample_poly(p, {4, 8, 9, 16})));
    auto bad = sample_poly(p, {4, 8});
    bad[0].nbar += 1;
    CHECK_FALSE(verify_candidate(p, bad));
}

TEST_CASE("sample file round trip") {
    std::vector<CountSample> s{{2, Int(4), ""}, {3, Int(9), ""}};
    auto back = parse_samples(samples_to_text(s) + "# comment\n\n");
    REQUIRE(back.size() == 2);
    CHECK(back[0].q == 2);
    CHECK(back[1].nbar == 9);
}

TEST_CASE("zeta function of the C3 answer") {
    auto factors = zeta_function(QPoly::power(2));
    REQUIRE(factors.size() == 3);
    CHECK(factors[0].exponent == -1);
    CHECK(factors[1].exponent == -1);
    CHECK(factors[2].exponent == 0);
    CHECK(zeta_to_string(factors) == "1 / ((1 - t)*(1 - q*t))");

    // expanding Z at q=2 must reproduce the line's point counts q^k + 1
    std::vector<Int> counts;
    for (int k = 1; k <= 3; k++) counts.push_back(Int((1 << k) + 1));
    auto series = zeta_series(factors, Int(2), 3);
    auto expseries = exp_series_from_counts(counts, 3);
    CHECK(series == expseries);
}

TEST_CASE("zeta corner cases") {
    // all c_k = 1: complement of an empty variety, Z = 1
    QPoly full = QPoly::projective_space(3);
    auto f1 = zeta_function(full);
    for (auto& fac : f1) CHECK(fac.exponent == 0);
    CHECK(zeta_to_string(f1) == "1");

    // Nbar = q^2 + q: a single point's zeta
    QPoly p = QPoly::power(2) + QPoly::power(1);
    auto f2 = zeta_function(p);
    CHECK(zeta_to_string(f2) == "1 / ((1 - t))");
    auto series = zeta_series(f2, Int(5), 3);
    std::vector<Int> ones{Int(1), Int(1), Int(1)};  // one point over every F_{q^k}
    CHECK(series == exp_series_from_counts(ones, 3));
}
