#ifndef NBAR_KERNELS_HPP
#define NBAR_KERNELS_HPP

#include <cstddef>
#include <cstdint>

namespace nbar::kern {

// Mod-p inner loops used by the exhaustive counters.  All kernels require
// an odd-or-even prime p < 2^16 and inputs already reduced to [0, p).
// The scalar implementations are the reference; vector variants must match
// them bit for bit (equivalence-tested).
struct Kernels {
    const char* name;

    // #{x in [0,p) : sum_i coeffs[i] * x^i == 0 (mod p)}, deg+1 coefficients
    std::uint32_t (*count_univariate_zeros)(const std::uint32_t* coeffs, int deg,
                                            std::uint32_t p);

    // sum over j of #roots in x of A[j] x^2 + B[j] x + C[j] (mod p), p odd.
    // chi is the quadratic character table: chi[t] in {-1,0,+1}, size p,
    // stored as int32 for gather friendliness.
    std::uint64_t (*quadratic_roots_sum)(const std::uint32_t* A, const std::uint32_t* B,
                                         const std::uint32_t* C, std::size_t n,
                                         const std::int32_t* chi, std::uint32_t p);

    // out[i] = (m1 * t[i] + m2 * i + add) mod p for i in [0, n)
    void (*fused_affine_mod)(const std::uint32_t* t, std::size_t n, std::uint32_t m1,
                             std::uint32_t m2, std::uint32_t add, std::uint32_t p,
                             std::uint32_t* out);
};

const Kernels& scalar_kernels();
// nullptr when the CPU (or build) lacks AVX2
const Kernels* avx2_kernels();
// AVX2 when available unless NBAR_KERNELS=scalar is set in the environment
const Kernels& active_kernels();

}  // namespace nbar::kern

#endif
