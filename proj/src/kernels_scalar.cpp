#include <nbar/kernels.hpp>

namespace nbar::kern {

namespace {

std::uint32_t count_univariate_zeros_scalar(const std::uint32_t* coeffs, int deg,
                                            std::uint32_t p) {
    std::uint32_t zeros = 0;
    for (std::uint32_t x = 0; x < p; x++) {
        std::uint64_t acc = coeffs[deg];
        for (int i = deg - 1; i >= 0; i--) acc = (acc * x + coeffs[i]) % p;
        if (acc == 0) zeros++;
    }
    return zeros;
}

std::uint64_t quadratic_roots_sum_scalar(const std::uint32_t* A, const std::uint32_t* B,
                                         const std::uint32_t* C, std::size_t n,
                                         const std::int32_t* chi, std::uint32_t p) {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < n; j++) {
        std::uint32_t a = A[j], b = B[j], c = C[j];
        if (a == 0) {
            if (b != 0) total += 1;
            else if (c == 0) total += p;
            continue;
        }
        std::uint32_t bsq = std::uint32_t(std::uint64_t(b) * b % p);
        std::uint32_t ac = std::uint32_t(std::uint64_t(a) * c % p);
        std::uint32_t ac4 = std::uint32_t(std::uint64_t(ac) * 4 % p);
        std::uint32_t d = bsq >= ac4 ? bsq - ac4 : bsq + p - ac4;
        total += std::uint64_t(std::int64_t(1) + chi[d]);
    }
    return total;
}

void fused_affine_mod_scalar(const std::uint32_t* t, std::size_t n, std::uint32_t m1,
                             std::uint32_t m2, std::uint32_t add, std::uint32_t p,
                             std::uint32_t* out) {
    for (std::size_t i = 0; i < n; i++) {
        std::uint64_t v = std::uint64_t(m1) * t[i] + std::uint64_t(m2) * (i % p) + add;
        out[i] = std::uint32_t(v % p);
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{
        "scalar",
        count_univariate_zeros_scalar,
        quadratic_roots_sum_scalar,
        fused_affine_mod_scalar,
    };
    return k;
}

}  // namespace nbar::kern
