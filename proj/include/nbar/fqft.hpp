#ifndef NBAR_FQFT_HPP
#define NBAR_FQFT_HPP

#include <nbar/gf.hpp>
#include <nbar/graph.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace nbar {

struct TheoryConfig {
    std::uint32_t d = 4;              // space-time dimension, >= 1
    std::int64_t mass_squared = 1;    // m^2, reduced into the field
    std::vector<int> metric;          // +-1 per coordinate; empty = euclidean
};

// Signed incidence of each edge with the fundamental-cycle basis of a
// spanning tree: edge e carries momentum sum_i coeffs[e][i] * p_i.
struct MomentumRouting {
    std::uint32_t h1 = 0;
    std::vector<std::vector<int>> coeffs;  // indexed like g.edges, entries in {-1,0,1}
};

// c = d*h1 - 2n
int superficial_degree(const Multigraph& g, std::uint32_t d);

// Fundamental-cycle routing; every non-tree edge carries exactly its own
// basis momentum.  The default spanning tree is deterministic; pass an
// explicit tree (edge-id set) to vary it.
MomentumRouting route_momenta(const Multigraph& g);
MomentumRouting route_momenta(const Multigraph& g, const std::vector<int>& tree_edges);

struct Amplitude {
    FieldElement value;
    std::uint64_t excluded_points = 0;  // momenta with some Q_i = 0
    bool tree_convention = false;       // h1 = 0: empty product, value 1
    bool eq30_checked = false;          // power form compared (q > 2)
};

inline constexpr std::uint64_t kAmplitudeNaiveBudget = 1ull << 24;
inline constexpr std::uint64_t kAmplitudeBudget = 1ull << 26;

// Momentum-space sum of prod Q_i(p)^{-1} over p in F_q^{d h1} with all
// Q_i != 0.  Uses the edge-value distribution (per-coordinate convolution)
// when the q^n table fits, else direct enumeration within budget.  For q > 2
// the power form prod Q_i^{q-2} is evaluated as well and must agree.
Amplitude amplitude(const Multigraph& g, const TheoryConfig& theory, const Field& field,
                    std::uint64_t budget = kAmplitudeBudget);

// direct Eq.-28 style enumeration (oracle path)
Amplitude amplitude_direct(const Multigraph& g, const TheoryConfig& theory,
                           const Field& field, const MomentumRouting& routing,
                           std::uint64_t budget = kAmplitudeNaiveBudget);

// Lemma-4 guarantee: (q-1)c + 2n > 0 forces a vanishing amplitude; only
// defined for q > 2 (nullopt marks "no guarantee available").
std::optional<bool> vanishing_predicate(const Multigraph& g, std::uint32_t d,
                                        std::uint64_t q);

struct ScanCell {
    std::uint32_t d = 0;
    std::uint64_t q = 0;
    int c = 0;                       // superficial degree of divergence
    std::int64_t criterion = 0;      // (q-1)c + 2n
    std::optional<bool> predicate;
    std::uint32_t amplitude_value = 0;
    bool amplitude_zero = false;
    bool forms_agree = false;        // Eq. 28 vs Eq. 30 (q > 2)
    bool predicate_respected = true; // predicate true -> amplitude zero
};

std::vector<ScanCell> vanishing_scan(const Multigraph& g, const std::vector<std::uint32_t>& ds,
                                     const std::vector<std::uint64_t>& qs,
                                     std::int64_t mass_squared = 1);

}  // namespace nbar

#endif
