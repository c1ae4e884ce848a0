#ifndef NBAR_INTERP_HPP
#define NBAR_INTERP_HPP

#include <nbar/qpoly.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace nbar {

struct CountSample {
    std::uint64_t q = 0;
    Int nbar;
    std::string provenance;  // "brute-force", "reduction", ...
};

struct ReconstructOptions {
    // smallest common representative always; second smallest too when
    // |r2| <= second_factor * max(|r1|, 1)
    int branch_per_level = 2;
    Int second_factor = Int(4);
    // graph-hypersurface shape gate: c_{deg} == 1 and c_{deg-1} == 0
    bool require_monic_top = true;
    bool drop_prime_2 = false;
};

// CRT coefficient peeling after Method 2.  Samples must have pairwise
// coprime q (distinct primes in the standard workflow; coprime prime powers
// are accepted for residue-class runs).  Starts at c_2 when every sample is
// divisible by q^2, else at c_0.  Returns all surviving candidates with
// degree <= `degree`.
std::vector<QPoly> crt_reconstruct(std::vector<CountSample> samples, std::uint32_t degree,
                                   ReconstructOptions opt = {});

// crt_reconstruct restricted to samples with q == residue (mod modulus).
std::vector<QPoly> residue_class_reconstruct(const std::vector<CountSample>& samples,
                                             std::uint64_t modulus, std::uint64_t residue,
                                             std::uint32_t degree,
                                             ReconstructOptions opt = {});

// check a candidate against held-out samples (e.g. prime powers)
bool verify_candidate(const QPoly& cand, const std::vector<CountSample>& samples);

// lines "q nbar", '#' comments allowed
std::vector<CountSample> parse_samples(const std::string& text);
std::string samples_to_text(const std::vector<CountSample>& samples);

// ---- local zeta function -----------------------------------------------------

struct ZetaFactor {
    std::uint32_t k = 0;
    Int exponent;  // c_k - 1
};

// Z_q(t) = prod_k (1 - q^k t)^(c_k - 1) for Nbar = sum c_k q^k, k in 0..n-1
// with n = deg+1.
std::vector<ZetaFactor> zeta_function(const QPoly& nbar);
std::string zeta_to_string(const std::vector<ZetaFactor>& factors);

// power-series coefficients of Z(t) up to t^order at a concrete q
std::vector<Int> zeta_series(const std::vector<ZetaFactor>& factors, const Int& q,
                             int order);

// series of exp(sum_k N_k t^k / k) up to t^order; N_k = zero-locus point
// counts over F_{q^k}
std::vector<Int> exp_series_from_counts(const std::vector<Int>& counts, int order);

}  // namespace nbar

#endif
