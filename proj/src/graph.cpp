#include <nbar/graph.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace nbar {

const Edge& Multigraph::edge_by_id(int id) const {
    for (auto& e : edges)
        if (e.id == id) return e;
    throw input_error("unknown edge id " + std::to_string(id));
}

bool Multigraph::has_edge_id(int id) const {
    for (auto& e : edges)
        if (e.id == id) return true;
    return false;
}

void Multigraph::validate() const {
    std::set<int> ids;
    for (auto& e : edges) {
        if (e.a < 0 || e.b < 0 || e.a >= vertex_count || e.b >= vertex_count)
            throw input_error("edge endpoint out of range");
        if (!ids.insert(e.id).second)
            throw input_error("duplicate edge id " + std::to_string(e.id));
    }
}

std::vector<int> Multigraph::degrees() const {
    std::vector<int> d(vertex_count, 0);
    for (auto& e : edges) { d[e.a]++; d[e.b]++; }
    return d;
}

namespace {

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { while (p[x] != x) x = p[x] = p[p[x]]; return x; }
    bool unite(int a, int b) {
        a = find(a); b = find(b);
        if (a == b) return false;
        p[a] = b;
        return true;
    }
};

}  // namespace

int Multigraph::components() const {
    if (vertex_count == 0) return 0;
    UnionFind uf(vertex_count);
    int c = vertex_count;
    for (auto& e : edges)
        if (uf.unite(e.a, e.b)) c--;
    return c;
}

bool Multigraph::connected_ignoring_isolated() const {
    auto d = degrees();
    UnionFind uf(vertex_count);
    int c = 0;
    for (int v = 0; v < vertex_count; v++)
        if (d[v] > 0) c++;
    if (c == 0) return true;
    for (auto& e : edges)
        if (uf.unite(e.a, e.b)) c--;
    return c == 1;
}

bool Multigraph::is_simple() const {
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges) {
        if (e.a == e.b) return false;
        auto key = std::minmax(e.a, e.b);
        if (!seen.insert({key.first, key.second}).second) return false;
    }
    return true;
}

bool Multigraph::has_loops() const {
    for (auto& e : edges)
        if (e.a == e.b) return true;
    return false;
}

Multigraph Multigraph::drop_isolated_vertices() const {
    auto d = degrees();
    std::vector<int> remap(vertex_count, -1);
    int n = 0;
    for (int v = 0; v < vertex_count; v++)
        if (d[v] > 0) remap[v] = n++;
    Multigraph r;
    r.vertex_count = n;
    for (auto& e : edges) r.edges.push_back({remap[e.a], remap[e.b], e.id});
    return r;
}

int cycle_rank(const Multigraph& g) {
    return g.edge_count() - g.vertex_count + g.components();
}

Multigraph minor(const Multigraph& g, const MinorSpec& spec) {
    for (int id : spec.deleted)
        if (spec.contracted.count(id))
            throw input_error("edge id in both deleted and contracted sets");
    for (int id : spec.deleted) (void)g.edge_by_id(id);
    for (int id : spec.contracted) (void)g.edge_by_id(id);

    UnionFind uf(g.vertex_count);
    for (int id : spec.contracted) {
        const Edge& e = g.edge_by_id(id);
        if (uf.find(e.a) == uf.find(e.b))
            throw input_error("contraction of a loop (edge id " + std::to_string(id) + ")");
        uf.unite(e.a, e.b);
    }
    std::vector<int> remap(g.vertex_count, -1);
    int n = 0;
    for (int v = 0; v < g.vertex_count; v++) {
        int r = uf.find(v);
        if (remap[r] < 0) remap[r] = n++;
    }
    Multigraph out;
    out.vertex_count = n;
    for (auto& e : g.edges) {
        if (spec.deleted.count(e.id) || spec.contracted.count(e.id)) continue;
        out.edges.push_back({remap[uf.find(e.a)], remap[uf.find(e.b)], e.id});
    }
    return out;
}

Multigraph delete_edges(const Multigraph& g, std::initializer_list<int> ids) {
    MinorSpec s;
    s.deleted.insert(ids.begin(), ids.end());
    return minor(g, s);
}

Multigraph contract_edges(const Multigraph& g, std::initializer_list<int> ids) {
    MinorSpec s;
    s.contracted.insert(ids.begin(), ids.end());
    return minor(g, s);
}

Multigraph delete_isolated_vertex(const Multigraph& g, int v) {
    if (v < 0 || v >= g.vertex_count)
        throw input_error("delete_isolated_vertex: vertex out of range");
    Multigraph out;
    out.vertex_count = g.vertex_count - 1;
    for (auto& e : g.edges) {
        if (e.a == v || e.b == v)
            throw internal_error("delete_isolated_vertex: vertex still has edges");
        out.edges.push_back({e.a > v ? e.a - 1 : e.a, e.b > v ? e.b - 1 : e.b, e.id});
    }
    return out;
}

namespace {

bool edge_is_bridge(const Multigraph& g, int idx) {
    UnionFind uf(g.vertex_count);
    int c = g.vertex_count;
    for (int i = 0; i < g.edge_count(); i++) {
        if (i == idx) continue;
        if (uf.unite(g.edges[i].a, g.edges[i].b)) c--;
    }
    UnionFind all(g.vertex_count);
    int call = g.vertex_count;
    for (auto& e : g.edges)
        if (all.unite(e.a, e.b)) call--;
    return c != call;
}

void tree_rec(const Multigraph& g, std::vector<int>& chosen,
              std::vector<std::vector<int>>& out) {
    if (g.vertex_count == 1) {
        std::vector<int> t = chosen;
        std::sort(t.begin(), t.end());
        out.push_back(std::move(t));
        return;
    }
    // drop loops; they never enter a tree
    int pick = -1;
    for (int i = 0; i < g.edge_count(); i++) {
        if (g.edges[i].a == g.edges[i].b) {
            Multigraph h = g;
            h.edges.erase(h.edges.begin() + i);
            tree_rec(h, chosen, out);
            return;
        }
        if (pick < 0) pick = i;
    }
    if (pick < 0) return;  // >1 vertex, no edges: disconnected
    const Edge e = g.edges[pick];
    // contract branch: e in the tree
    {
        Multigraph h = g;
        h.edges.erase(h.edges.begin() + pick);
        int keep = std::min(e.a, e.b), gone = std::max(e.a, e.b);
        for (auto& f : h.edges) {
            if (f.a == gone) f.a = keep;
            if (f.b == gone) f.b = keep;
            if (f.a > gone) f.a--;
            if (f.b > gone) f.b--;
        }
        h.vertex_count--;
        chosen.push_back(e.id);
        tree_rec(h, chosen, out);
        chosen.pop_back();
    }
    // delete branch: only if e is not a bridge
    if (!edge_is_bridge(g, pick)) {
        Multigraph h = g;
        h.edges.erase(h.edges.begin() + pick);
        tree_rec(h, chosen, out);
    }
}

}  // namespace

std::vector<std::vector<int>> spanning_trees(const Multigraph& g) {
    if (!g.connected()) throw input_error("spanning_trees: disconnected graph");
    std::vector<std::vector<int>> out;
    std::vector<int> chosen;
    tree_rec(g, chosen, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t matrix_tree_count(const Multigraph& g) {
    if (!g.connected()) throw input_error("matrix_tree_count: disconnected graph");
    int n = g.vertex_count;
    if (n == 1) return 1;
    // reduced Laplacian determinant, fraction-free Bareiss over int128
    int m = n - 1;
    std::vector<std::vector<__int128>> a(m, std::vector<__int128>(m, 0));
    for (auto& e : g.edges) {
        if (e.a == e.b) continue;
        if (e.a < m) a[e.a][e.a]++;
        if (e.b < m) a[e.b][e.b]++;
        if (e.a < m && e.b < m) { a[e.a][e.b]--; a[e.b][e.a]--; }
    }
    __int128 prev = 1;
    for (int k = 0; k < m; k++) {
        if (a[k][k] == 0) {
            int swap = -1;
            for (int i = k + 1; i < m; i++)
                if (a[i][k] != 0) { swap = i; break; }
            if (swap < 0) return 0;
            // swap + negate keeps the determinant unchanged
            std::swap(a[k], a[swap]);
            for (int j = 0; j < m; j++) a[k][j] = -a[k][j];
        }
        for (int i = k + 1; i < m; i++)
            for (int j = k + 1; j < m; j++)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    __int128 det = a[m - 1][m - 1];
    if (det < 0) det = -det;
    return std::uint64_t(det);
}

StructuralProbe structural_probe(const Multigraph& g) {
    StructuralProbe p;
    p.is_simple = g.is_simple();

    // vertex connectivity >= 2: connected, >= 3 vertices, no cut vertex
    p.vertex_connectivity_ge_2 = false;
    if (g.vertex_count >= 3 && g.connected()) {
        bool cut = false;
        for (int v = 0; v < g.vertex_count && !cut; v++) {
            UnionFind uf(g.vertex_count);
            int c = g.vertex_count - 1;
            for (auto& e : g.edges) {
                if (e.a == v || e.b == v) continue;
                if (uf.unite(e.a, e.b)) c--;
            }
            if (c != 1) cut = true;
        }
        p.vertex_connectivity_ge_2 = !cut;
    }

    auto deg = g.degrees();
    for (int v = 0; v < g.vertex_count; v++) {
        if (deg[v] != 3) continue;
        std::array<int, 3> es{};
        int k = 0;
        bool loop_at_v = false;
        for (auto& e : g.edges)
            if (e.a == v || e.b == v) {
                if (e.a == e.b) loop_at_v = true;
                else if (k < 3) es[k++] = e.id;
            }
        if (loop_at_v || k != 3) continue;
        std::sort(es.begin(), es.end());
        p.three_valent_vertices.push_back({v, es});

        auto far = [&](int id) {
            const Edge& e = g.edge_by_id(id);
            return e.a == v ? e.b : e.a;
        };
        // pairs (e2,e3) of v-edges whose far endpoints are joined by e4
        static const int pairs[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}};
        for (auto& pr : pairs) {
            int u = far(es[pr[0]]), w = far(es[pr[1]]);
            for (auto& e : g.edges) {
                if (e.id == es[0] || e.id == es[1] || e.id == es[2]) continue;
                if ((e.a == u && e.b == w) || (e.a == w && e.b == u))
                    p.triangles_at_3valent.push_back(
                        {v, es[pr[2]], es[pr[0]], es[pr[1]], e.id});
            }
        }
    }
    return p;
}

// ---- families ---------------------------------------------------------------

Multigraph make_cycle(int n) {
    Multigraph g;
    g.vertex_count = n;
    for (int i = 0; i < n; i++) g.edges.push_back({i, (i + 1) % n, i + 1});
    return g;
}

Multigraph make_path(int edges) {
    Multigraph g;
    g.vertex_count = edges + 1;
    for (int i = 0; i < edges; i++) g.edges.push_back({i, i + 1, i + 1});
    return g;
}

Multigraph make_complete(int n) {
    Multigraph g;
    g.vertex_count = n;
    int id = 1;
    for (int i = 0; i < n; i++)
        for (int j = i + 1; j < n; j++) g.edges.push_back({i, j, id++});
    return g;
}

Multigraph make_complete_bipartite(int a, int b) {
    Multigraph g;
    g.vertex_count = a + b;
    int id = 1;
    for (int i = 0; i < a; i++)
        for (int j = 0; j < b; j++) g.edges.push_back({i, a + j, id++});
    return g;
}

Multigraph make_wheel(int rim) {
    Multigraph g;
    g.vertex_count = rim + 1;
    int id = 1;
    for (int i = 0; i < rim; i++) g.edges.push_back({i, (i + 1) % rim, id++});
    for (int i = 0; i < rim; i++) g.edges.push_back({i, rim, id++});
    return g;
}

// ---- canonical certificate ---------------------------------------------------

namespace {

struct CanonSearch {
    int n;
    std::vector<std::uint16_t> adj;   // bitmask per vertex
    std::vector<std::uint16_t> best_rows;
    bool have_best = false;

    // initial colors from iterated degree refinement
    std::vector<int> refine() const {
        std::vector<int> color(n, 0);
        for (int it = 0; it < n; it++) {
            std::vector<std::vector<int>> sig(n);
            for (int v = 0; v < n; v++) {
                std::vector<int> s;
                for (int u = 0; u < n; u++)
                    if (adj[v] >> u & 1) s.push_back(color[u]);
                std::sort(s.begin(), s.end());
                s.push_back(color[v]);
                sig[v] = std::move(s);
            }
            std::vector<std::vector<int>> uniq = sig;
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            std::vector<int> nc(n);
            for (int v = 0; v < n; v++)
                nc[v] = int(std::lower_bound(uniq.begin(), uniq.end(), sig[v]) - uniq.begin());
            if (nc == color) break;
            color = std::move(nc);
        }
        return color;
    }

    // rows[k] = adjacency bits of placed vertex k against earlier ones.
    // `tight` means the current prefix equals the best certificate so far;
    // only then may a smaller row be pruned.
    void dfs(std::vector<int>& perm, std::vector<std::uint16_t>& rows,
             std::vector<char>& used, const std::vector<int>& color, bool tight) {
        int k = int(perm.size());
        if (k == n) {
            if (!have_best || rows > best_rows) {
                best_rows = rows;
                have_best = true;
            }
            return;
        }
        std::vector<int> cand;
        for (int v = 0; v < n; v++)
            if (!used[v]) cand.push_back(v);
        std::stable_sort(cand.begin(), cand.end(),
                         [&](int a, int b) { return color[a] < color[b]; });
        for (int v : cand) {
            std::uint16_t row = 0;
            for (int j = 0; j < k; j++)
                if (adj[v] >> perm[j] & 1) row |= std::uint16_t(1u << j);
            bool t2 = tight;
            if (have_best && tight) {
                if (row < best_rows[k]) continue;
                t2 = (row == best_rows[k]);
            }
            perm.push_back(v);
            used[v] = 1;
            rows.push_back(row);
            dfs(perm, rows, used, color, t2);
            rows.pop_back();
            used[v] = 0;
            perm.pop_back();
        }
    }
};

}  // namespace

std::string canonical_cert(const Multigraph& g) {
    if (!g.is_simple()) throw input_error("canonical_cert: graph must be simple");
    Multigraph h = g.drop_isolated_vertices();
    int n = h.vertex_count;
    if (n > 16) throw budget_error("canonical_cert: too many vertices");
    // exact maximization over all placements, seeded by color refinement;
    // correctness does not depend on the refinement quality
    std::vector<std::uint16_t> adj(n, 0);
    for (auto& e : h.edges) {
        adj[e.a] |= std::uint16_t(1u << e.b);
        adj[e.b] |= std::uint16_t(1u << e.a);
    }
    CanonSearch cs{n, adj, {}, false};
    auto color = cs.refine();
    std::vector<int> perm;
    std::vector<std::uint16_t> rows;
    std::vector<char> used(n, 0);
    cs.dfs(perm, rows, used, color, true);
    std::string out;
    out.push_back(char(n));
    for (auto r : cs.best_rows) {
        out.push_back(char(r & 0xff));
        out.push_back(char(r >> 8));
    }
    return out;
}

// simpler exact search without the over-clever pruning, used as the
// reference in tests
namespace detail {
std::string canonical_cert_bruteforce(const Multigraph& g) {
    Multigraph h = g.drop_isolated_vertices();
    int n = h.vertex_count;
    std::vector<std::uint16_t> adj(n, 0);
    for (auto& e : h.edges) {
        adj[e.a] |= std::uint16_t(1u << e.b);
        adj[e.b] |= std::uint16_t(1u << e.a);
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::uint16_t> best;
    do {
        std::vector<std::uint16_t> rows(n, 0);
        for (int k = 0; k < n; k++)
            for (int j = 0; j < k; j++)
                if (adj[perm[k]] >> perm[j] & 1) rows[k] |= std::uint16_t(1u << j);
        if (best.empty() || rows > best) best = rows;
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::string out;
    out.push_back(char(n));
    for (auto r : best) {
        out.push_back(char(r & 0xff));
        out.push_back(char(r >> 8));
    }
    return out;
}
}  // namespace detail

// ---- corpus -------------------------------------------------------------------

std::vector<Multigraph> exhaustive_corpus(int max_edges) {
    std::vector<Multigraph> all;
    std::set<std::string> seen;
    std::vector<Multigraph> level;
    {
        Multigraph k2;
        k2.vertex_count = 2;
        k2.edges.push_back({0, 1, 1});
        level.push_back(k2);
        seen.insert(canonical_cert(k2));
        all.push_back(k2);
    }
    for (int e = 2; e <= max_edges; e++) {
        std::vector<Multigraph> next;
        for (auto& g : level) {
            auto push = [&](Multigraph h) {
                for (int i = 0; i < h.edge_count(); i++) h.edges[i].id = i + 1;
                std::string c = canonical_cert(h);
                if (seen.insert(std::move(c)).second) {
                    next.push_back(h);
                    all.push_back(h);
                }
            };
            // add an edge between existing non-adjacent vertices
            for (int u = 0; u < g.vertex_count; u++)
                for (int w = u + 1; w < g.vertex_count; w++) {
                    bool adj = false;
                    for (auto& ed : g.edges)
                        if ((ed.a == u && ed.b == w) || (ed.a == w && ed.b == u)) adj = true;
                    if (adj) continue;
                    Multigraph h = g;
                    h.edges.push_back({u, w, e});
                    push(std::move(h));
                }
            // attach a new leaf
            for (int u = 0; u < g.vertex_count; u++) {
                Multigraph h = g;
                h.edges.push_back({u, h.vertex_count, e});
                h.vertex_count++;
                push(std::move(h));
            }
        }
        level = std::move(next);
    }
    return all;
}

std::vector<Multigraph> sampled_corpus(int min_edges, int max_edges, int count,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Multigraph> out;
    std::set<std::string> seen;
    int target_edges = min_edges;
    int stall = 0;
    while (int(out.size()) < count && stall < 200000) {
        int e = target_edges;
        target_edges++;
        if (target_edges > max_edges) target_edges = min_edges;
        int vmin = 3;
        while (vmin * (vmin - 1) / 2 < e) vmin++;
        int vmax = std::min(e + 1, 11);
        if (vmin > vmax) { stall++; continue; }
        int v = vmin + int(rng() % std::uint64_t(vmax - vmin + 1));
        Multigraph g;
        g.vertex_count = v;
        std::set<std::pair<int, int>> used;
        // random spanning tree: connect vertex i to a random earlier vertex
        for (int i = 1; i < v; i++) {
            int j = int(rng() % std::uint64_t(i));
            used.insert({j, i});
        }
        std::vector<std::pair<int, int>> rest;
        for (int i = 0; i < v; i++)
            for (int j = i + 1; j < v; j++)
                if (!used.count({i, j})) rest.push_back({i, j});
        std::shuffle(rest.begin(), rest.end(), rng);
        int need = e - (v - 1);
        if (need < 0 || need > int(rest.size())) { stall++; continue; }
        for (int i = 0; i < need; i++) used.insert(rest[i]);
        int id = 1;
        for (auto& [a, b] : used) g.edges.push_back({a, b, id++});
        std::string c = canonical_cert(g);
        if (seen.insert(std::move(c)).second) {
            out.push_back(std::move(g));
            stall = 0;
        } else {
            stall++;
        }
    }
    return out;
}

// ---- text format ---------------------------------------------------------------

Multigraph parse_graph_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Multigraph g;
    bool have_header = false;
    int id = 1;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "#") continue;
        if (!have_header) {
            if (tok != "v") throw input_error("graph text: expected 'v <count>' header");
            if (!(ls >> g.vertex_count) || g.vertex_count < 0)
                throw input_error("graph text: bad vertex count");
            have_header = true;
            continue;
        }
        int a, b;
        std::istringstream es(line);
        if (!(es >> a >> b)) throw input_error("graph text: bad edge line '" + line + "'");
        g.edges.push_back({a, b, id++});
    }
    if (!have_header) throw input_error("graph text: missing header");
    g.validate();
    return g;
}

std::string graph_to_text(const Multigraph& g) {
    std::ostringstream os;
    os << "v " << g.vertex_count << "\n";
    auto sorted = g.edges;
    std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.id < y.id; });
    for (auto& e : sorted) os << e.a << " " << e.b << "\n";
    return os.str();
}

}  // namespace nbar
