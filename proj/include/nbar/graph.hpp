#ifndef NBAR_GRAPH_HPP
#define NBAR_GRAPH_HPP

#include <nbar/errors.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nbar {

// Undirected multigraph.  Loops (a == b) and parallel edges are allowed.
// Edge ids are stable 1-based labels: they survive minor operations and
// double as polynomial variable ids.
struct Edge {
    int a = 0;
    int b = 0;
    int id = 0;
};

struct Multigraph {
    int vertex_count = 0;
    std::vector<Edge> edges;

    int edge_count() const { return int(edges.size()); }
    const Edge& edge_by_id(int id) const;
    bool has_edge_id(int id) const;
    void validate() const;  // endpoint range, unique ids

    std::vector<int> degrees() const;  // loops count twice
    int components() const;            // isolated vertices count
    bool connected() const { return vertex_count > 0 && components() == 1; }
    // connected after discarding isolated vertices (true for edgeless graphs
    // with <= 1 vertex)
    bool connected_ignoring_isolated() const;
    bool is_simple() const;
    bool has_loops() const;
    Multigraph drop_isolated_vertices() const;
};

struct MinorSpec {
    std::set<int> deleted;
    std::set<int> contracted;
};

// h1 = edges - vertices + components
int cycle_rank(const Multigraph& g);

// Deletions first, then contractions in ascending edge-id order.
// Contracting an edge that is a loop at its turn is an error: the caller
// must delete it and account for the Psi factor instead.
Multigraph minor(const Multigraph& g, const MinorSpec& spec);

Multigraph delete_edges(const Multigraph& g, std::initializer_list<int> ids);
Multigraph contract_edges(const Multigraph& g, std::initializer_list<int> ids);

// Removes a vertex that has no incident edges left.  The theorem-shaped
// minors "Gamma - 123" stand for coefficient extractions in which the bared
// 3-valent vertex is gone, not merely stranded.
Multigraph delete_isolated_vertex(const Multigraph& g, int v);

// All spanning trees as sorted edge-id sets, by recursive
// deletion/contraction with a bridge shortcut.  Throws on disconnected input.
std::vector<std::vector<int>> spanning_trees(const Multigraph& g);

// Spanning tree count via the reduced-Laplacian determinant.  Used as an
// independent cross-check against spanning_trees.
std::uint64_t matrix_tree_count(const Multigraph& g);

struct ThreeValentVertex {
    int vertex = 0;
    std::array<int, 3> edges{};  // ascending ids
};

// A 3-valent vertex whose edges e2,e3 close a triangle through edge e4;
// the labels line up with the reduction formulas: e1 spare, (e2,e3,e4)
// the triangle.
struct TriangleAtVertex {
    int vertex = 0;
    int e1 = 0, e2 = 0, e3 = 0, e4 = 0;
};

struct StructuralProbe {
    bool is_simple = false;
    bool vertex_connectivity_ge_2 = false;
    std::vector<ThreeValentVertex> three_valent_vertices;
    std::vector<TriangleAtVertex> triangles_at_3valent;
};

StructuralProbe structural_probe(const Multigraph& g);

// ---- named families --------------------------------------------------------

Multigraph make_cycle(int n);
Multigraph make_path(int edges);
Multigraph make_complete(int n);
Multigraph make_complete_bipartite(int a, int b);
Multigraph make_wheel(int rim);  // rim cycle plus hub, rim >= 3

// ---- isomorphism certificates and corpus -----------------------------------

// Canonical certificate for a simple graph (permutation-invariant bytes).
std::string canonical_cert(const Multigraph& g);

// All connected simple graphs with 1..max_edges edges, up to isomorphism,
// generated by edge/leaf augmentation.  max_edges <= 10 is practical.
std::vector<Multigraph> exhaustive_corpus(int max_edges);

// Deterministic pseudo-random sample of connected simple graphs with edge
// counts in [min_edges, max_edges], distinct up to isomorphism.
std::vector<Multigraph> sampled_corpus(int min_edges, int max_edges, int count,
                                       std::uint64_t seed);

// ---- text formats (see also io.hpp for JSON) -------------------------------

// "v <n>" header then one "u w" line per edge; ids are 1-based line order.
Multigraph parse_graph_text(const std::string& text);
std::string graph_to_text(const Multigraph& g);

}  // namespace nbar

#endif
