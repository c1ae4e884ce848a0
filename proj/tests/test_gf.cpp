#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nbar/gf.hpp>

using Int = mpz_class;

using namespace nbar;

TEST_CASE("make_field moduli") {
    Field f4 = make_field(2, 2);
    CHECK(f4->q() == 4);
    CHECK(f4->modulus() == std::vector<std::uint32_t>{1, 1, 1});  // x^2+x+1

    Field f2 = make_field(2, 1);
    CHECK(f2->q() == 2);
    CHECK(f2->prime_field());

    Field f9 = make_field(3, 2);
    CHECK(f9->modulus() == std::vector<std::uint32_t>{1, 0, 1});  // x^2+1

    CHECK_THROWS_AS(make_field(4, 1), input_error);
    CHECK_THROWS_AS(FieldSpec::make_with_modulus(2, 2, {0, 0, 1}), input_error);  // x^2
}

TEST_CASE("field arithmetic closure and inverses") {
    for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 1}, {3, 1}, {7, 1}, {2, 2}, {2, 3}, {3, 2}, {2, 4}}) {
        Field f = make_field(p, k);
        std::uint64_t q = f->q();
        for (std::uint32_t a = 0; a < q; a++) {
            CHECK(f->add(a, f->neg(a)) == 0);
            if (a != 0) {
                CHECK(f->mul(a, f->inv(a)) == 1);
                CHECK(f->pow(a, q - 1) == 1);  // x^(q-1) = 1
            }
        }
        // associativity spot checks
        for (std::uint32_t a = 0; a < q; a++)
            for (std::uint32_t b = 0; b < q; b++) {
                CHECK(f->mul(a, b) == f->mul(b, a));
                CHECK(f->add(a, b) == f->add(b, a));
            }
    }
}

TEST_CASE("frobenius for q <= 256") {
    for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 4}, {2, 8}, {3, 4}, {5, 3}, {13, 2}}) {
        Field f = make_field(p, k);
        for (std::uint32_t a = 0; a < f->q(); a += 3)
            for (std::uint32_t b = 0; b < f->q(); b += 5)
                CHECK(f->pow(f->add(a, b), p) == f->add(f->pow(a, p), f->pow(b, p)));
    }
}

TEST_CASE("multiplicative group is cyclic") {
    for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 4}, {3, 2}, {5, 2}, {7, 1}}) {
        Field f = make_field(p, k);
        std::uint64_t qm1 = f->q() - 1;
        bool generator = false;
        for (std::uint32_t a = 1; a < f->q(); a++) {
            std::uint64_t ord = f->order(a);
            CHECK(qm1 % ord == 0);
            if (ord == qm1) generator = true;
        }
        CHECK(generator);
    }
}

TEST_CASE("power sums match naive summation") {
    for (std::uint64_t q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16}) {
        std::uint32_t p = 2;
        std::uint32_t kk = 1;
        for (std::uint32_t cand : {2u, 3u, 5u, 7u, 11u, 13u}) {
            std::uint64_t t = q;
            std::uint32_t k = 0;
            while (t % cand == 0) { t /= cand; k++; }
            if (t == 1 && k >= 1) { p = cand; kk = k; break; }
        }
        Field f = make_field(p, kk);
        REQUIRE(f->q() == q);
        for (std::uint64_t e = 0; e <= 3 * (q - 1); e++) {
            std::uint32_t naive = 0;
            for (std::uint32_t x = 0; x < q; x++) naive = f->add(naive, f->pow(x, e));
            CHECK(power_sum(f, e).idx == naive);
        }
    }
    // spec examples
    Field f5 = make_field(5, 1);
    CHECK(power_sum(f5, 4).idx == 4);  // -1 mod 5
    CHECK(power_sum(f5, 3).idx == 0);
    Field f4 = make_field(2, 2);
    CHECK(power_sum(f4, 0).idx == 0);  // q * 1 = 0 in characteristic 2
}

TEST_CASE("unit indicator") {
    CHECK(unit_indicator(2, make_field(2, 3)) == 0);
    CHECK(unit_indicator(2, make_field(7, 1)) == 1);
    CHECK(unit_indicator(-3, make_field(2, 2)) == 1);
    CHECK(unit_indicator(Int(0), make_field(3, 1)) == 0);
}

TEST_CASE("conic counts match the closed forms") {
    // q = 4: 4 mod 3 == 1 -> q - 1 = 3
    CHECK(conic_count(ConicForm::sum_with_cross, make_field(2, 2)) == 3);
    CHECK(conic_count(ConicForm::sum_with_cross, make_field(3, 1)) == 3);
    CHECK(conic_count(ConicForm::sum_of_squares, make_field(7, 1)) == 8);
    // every prime power q <= 25 (the closed-form assert runs inside)
    for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {11, 1}, {13, 1},
             {2, 4}, {17, 1}, {19, 1}, {23, 1}, {5, 2}}) {
        Field f = make_field(p, k);
        CHECK_NOTHROW(conic_count(ConicForm::sum_with_cross, f));
        CHECK_NOTHROW(conic_count(ConicForm::sum_of_squares, f));
    }
}

TEST_CASE("counts are modulus independent") {
    // two distinct irreducible moduli for F_16
    Field a = make_field(2, 4);
    Field b = FieldSpec::make_with_modulus(2, 4, {1, 0, 0, 1, 1});  // x^4+x^3+1
    CHECK(a->modulus() != b->modulus());
    CHECK(conic_count(ConicForm::sum_with_cross, a) ==
          conic_count(ConicForm::sum_with_cross, b));
    CHECK(conic_count(ConicForm::sum_of_squares, a) ==
          conic_count(ConicForm::sum_of_squares, b));
}
