#include <nbar/kernels.hpp>

#include <immintrin.h>

namespace nbar::kern {

namespace {

// Barrett reduction of 32-bit lane values into [0,p), p < 2^16.
// im = floor(2^32 / p); q = mulhi_u32(t, im); r = t - q*p, then one
// conditional subtract.
struct Barrett {
    __m256i vp;
    __m256i vim;

    explicit Barrett(std::uint32_t p)
        : vp(_mm256_set1_epi32(int(p))),
          vim(_mm256_set1_epi32(int(std::uint32_t(0x100000000ull / p)))) {}

    __m256i reduce(__m256i t) const {
        __m256i even = _mm256_srli_epi64(_mm256_mul_epu32(t, vim), 32);
        __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(t, 32), _mm256_srli_epi64(vim, 32));
        odd = _mm256_and_si256(odd, _mm256_set1_epi64x(0xFFFFFFFF00000000ll));
        __m256i q = _mm256_or_si256(even, odd);
        __m256i r = _mm256_sub_epi32(t, _mm256_mullo_epi32(q, vp));
        return _mm256_min_epu32(r, _mm256_sub_epi32(r, vp));
    }

    __m256i mulmod(__m256i a, __m256i b) const { return reduce(_mm256_mullo_epi32(a, b)); }

    __m256i addmod(__m256i a, __m256i b) const {
        __m256i s = _mm256_add_epi32(a, b);
        return _mm256_min_epu32(s, _mm256_sub_epi32(s, vp));
    }
};

std::uint32_t count_univariate_zeros_avx2(const std::uint32_t* coeffs, int deg,
                                          std::uint32_t p) {
    Barrett bar(p);
    const __m256i step = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
    std::uint32_t zeros = 0;
    std::uint32_t x = 0;
    __m256i zcount = _mm256_setzero_si256();
    for (; x + 8 <= p; x += 8) {
        __m256i vx = _mm256_add_epi32(_mm256_set1_epi32(int(x)), step);
        __m256i acc = _mm256_set1_epi32(int(coeffs[deg]));
        for (int i = deg - 1; i >= 0; i--) {
            __m256i t = _mm256_mullo_epi32(acc, vx);
            t = _mm256_add_epi32(t, _mm256_set1_epi32(int(coeffs[i])));
            acc = bar.reduce(t);
        }
        zcount = _mm256_sub_epi32(zcount, _mm256_cmpeq_epi32(acc, _mm256_setzero_si256()));
    }
    alignas(32) std::uint32_t lanes[8];
    _mm256_store_si256((__m256i*)lanes, zcount);
    for (int i = 0; i < 8; i++) zeros += lanes[i];
    for (; x < p; x++) {
        std::uint64_t acc = coeffs[deg];
        for (int i = deg - 1; i >= 0; i--) acc = (acc * x + coeffs[i]) % p;
        if (acc == 0) zeros++;
    }
    return zeros;
}

std::uint64_t quadratic_roots_sum_avx2(const std::uint32_t* A, const std::uint32_t* B,
                                       const std::uint32_t* C, std::size_t n,
                                       const std::int32_t* chi, std::uint32_t p) {
    Barrett bar(p);
    const __m256i zero = _mm256_setzero_si256();
    const __m256i one = _mm256_set1_epi32(1);
    const __m256i vp32 = _mm256_set1_epi32(int(p));
    __m256i acc64 = _mm256_setzero_si256();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        __m256i a = _mm256_loadu_si256((const __m256i*)(A + j));
        __m256i b = _mm256_loadu_si256((const __m256i*)(B + j));
        __m256i c = _mm256_loadu_si256((const __m256i*)(C + j));
        __m256i bsq = bar.mulmod(b, b);
        __m256i ac4 = bar.reduce(_mm256_slli_epi32(bar.mulmod(a, c), 2));
        __m256i d = _mm256_sub_epi32(_mm256_add_epi32(bsq, vp32), ac4);
        d = _mm256_min_epu32(d, _mm256_sub_epi32(d, vp32));
        __m256i chid = _mm256_i32gather_epi32(chi, d, 4);
        __m256i val = _mm256_add_epi32(one, chid);            // a != 0 case
        __m256i ma0 = _mm256_cmpeq_epi32(a, zero);
        __m256i mb0 = _mm256_cmpeq_epi32(b, zero);
        __m256i mc0 = _mm256_cmpeq_epi32(c, zero);
        __m256i a0val = _mm256_blendv_epi8(one, _mm256_and_si256(mc0, vp32), mb0);
        val = _mm256_blendv_epi8(val, a0val, ma0);
        acc64 = _mm256_add_epi64(acc64, _mm256_unpacklo_epi32(val, zero));
        acc64 = _mm256_add_epi64(acc64, _mm256_unpackhi_epi32(val, zero));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256((__m256i*)lanes, acc64);
    std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; j < n; j++) {
        std::uint32_t a = A[j], b = B[j], c = C[j];
        if (a == 0) {
            if (b != 0) total += 1;
            else if (c == 0) total += p;
            continue;
        }
        std::uint32_t bsq = std::uint32_t(std::uint64_t(b) * b % p);
        std::uint32_t ac4 = std::uint32_t(std::uint64_t(a) * c % p * 4 % p);
        std::uint32_t d = bsq >= ac4 ? bsq - ac4 : bsq + p - ac4;
        total += std::uint64_t(std::int64_t(1) + chi[d]);
    }
    return total;
}

void fused_affine_mod_avx2(const std::uint32_t* t, std::size_t n, std::uint32_t m1,
                           std::uint32_t m2, std::uint32_t add, std::uint32_t p,
                           std::uint32_t* out) {
    std::size_t i = 0;
    if (p < 8) {
        // lane wrap handling is not worth it at tiny p
        for (; i < n; i++) {
            std::uint64_t v = std::uint64_t(m1) * t[i] + std::uint64_t(m2) * (i % p) + add;
            out[i] = std::uint32_t(v % p);
        }
        return;
    }
    Barrett bar(p);
    const __m256i step = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
    const __m256i vm1 = _mm256_set1_epi32(int(m1));
    const __m256i vm2 = _mm256_set1_epi32(int(m2));
    const __m256i vadd = _mm256_set1_epi32(int(add));
    const __m256i vp32 = _mm256_set1_epi32(int(p));
    for (; i + 8 <= n; i += 8) {
        std::uint32_t base = std::uint32_t(i % p);
        __m256i iv = _mm256_add_epi32(_mm256_set1_epi32(int(base)), step);
        iv = _mm256_min_epu32(iv, _mm256_sub_epi32(iv, vp32));
        __m256i tv = _mm256_loadu_si256((const __m256i*)(t + i));
        __m256i r1 = bar.mulmod(vm1, tv);
        __m256i r2 = bar.mulmod(vm2, iv);
        __m256i s = bar.addmod(r1, r2);
        s = bar.addmod(s, vadd);
        _mm256_storeu_si256((__m256i*)(out + i), s);
    }
    for (; i < n; i++) {
        std::uint64_t v = std::uint64_t(m1) * t[i] + std::uint64_t(m2) * (i % p) + add;
        out[i] = std::uint32_t(v % p);
    }
}

}  // namespace

const Kernels* avx2_kernels_impl() {
    static const Kernels k{
        "avx2",
        count_univariate_zeros_avx2,
        quadratic_roots_sum_avx2,
        fused_affine_mod_avx2,
    };
    return &k;
}

}  // namespace nbar::kern
