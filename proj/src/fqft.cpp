#include <nbar/fqft.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace nbar {

int superficial_degree(const Multigraph& g, std::uint32_t d) {
    return int(d) * cycle_rank(g) - 2 * g.edge_count();
}

namespace {

std::vector<int> default_tree(const Multigraph& g) {
    std::vector<int> parent(g.vertex_count);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<int> tree;
    for (auto& e : g.edges) {
        int a = find(e.a), b = find(e.b);
        if (a != b) {
            parent[a] = b;
            tree.push_back(e.id);
        }
    }
    return tree;
}

}  // namespace

MomentumRouting route_momenta(const Multigraph& g) {
    return route_momenta(g, default_tree(g));
}

MomentumRouting route_momenta(const Multigraph& g, const std::vector<int>& tree_edges) {
    if (!g.connected()) throw input_error("route_momenta: disconnected graph");
    std::set<int> tree(tree_edges.begin(), tree_edges.end());
    if (int(tree.size()) != g.vertex_count - 1)
        throw input_error("route_momenta: tree has wrong size");
    std::uint32_t h1 = std::uint32_t(cycle_rank(g));
    MomentumRouting r;
    r.h1 = h1;
    r.coeffs.assign(g.edges.size(), std::vector<int>(h1, 0));
    if (h1 == 0) return r;

    // adjacency over tree edges
    std::vector<std::vector<std::pair<int, std::size_t>>> adj(g.vertex_count);
    for (std::size_t i = 0; i < g.edges.size(); i++) {
        if (!tree.count(g.edges[i].id)) continue;
        adj[g.edges[i].a].push_back({g.edges[i].b, i});
        adj[g.edges[i].b].push_back({g.edges[i].a, i});
    }
    // tree path as sequence of (edge index, direction) via DFS
    auto tree_path = [&](int from, int to) {
        std::vector<int> prev_vertex(g.vertex_count, -1);
        std::vector<std::size_t> prev_edge(g.vertex_count, SIZE_MAX);
        std::vector<int> stack{from};
        prev_vertex[from] = from;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (v == to) break;
            for (auto& [u, ei] : adj[v])
                if (prev_vertex[u] < 0) {
                    prev_vertex[u] = v;
                    prev_edge[u] = ei;
                    stack.push_back(u);
                }
        }
        std::vector<std::pair<std::size_t, int>> path;  // (edge idx, +1 if a->b)
        int v = to;
        while (v != from) {
            std::size_t ei = prev_edge[v];
            int u = prev_vertex[v];
            path.push_back({ei, g.edges[ei].a == u ? +1 : -1});
            v = u;
        }
        std::reverse(path.begin(), path.end());
        return path;
    };

    std::uint32_t loop = 0;
    std::vector<std::size_t> nontree;
    for (std::size_t i = 0; i < g.edges.size(); i++)
        if (!tree.count(g.edges[i].id)) nontree.push_back(i);
    std::sort(nontree.begin(), nontree.end(), [&](std::size_t a, std::size_t b) {
        return g.edges[a].id < g.edges[b].id;
    });
    for (std::size_t i : nontree) {
        // cycle: edge i from a to b, then tree path b -> a
        r.coeffs[i][loop] = +1;
        if (g.edges[i].a != g.edges[i].b)
            for (auto& [ei, dir] : tree_path(g.edges[i].b, g.edges[i].a))
                r.coeffs[ei][loop] = dir;
        loop++;
    }
    return r;
}

namespace {

struct EdgeValueTables {
    // mixed-radix index over F_q^n (edge-indexed digits), counts mod nothing
    std::uint32_t n;
    std::uint64_t q;
    std::uint64_t size;
};

// distribution route: counts D(w) of slice-square sums, then contract with
// the inverse (or power) tables
Amplitude amplitude_distribution(const Multigraph& g, const TheoryConfig& theory,
                                 const Field& field, const MomentumRouting& routing) {
    const auto& F = *field;
    const std::uint64_t q = F.q();
    const std::uint32_t n = std::uint32_t(g.edges.size());
    const std::uint32_t h1 = routing.h1;
    std::uint64_t table = 1;
    for (std::uint32_t i = 0; i < n; i++) {
        table *= q;
        if (table > (1ull << 26)) throw budget_error("amplitude: q^n table too large");
    }

    // image of F_q^{h1} under the edge linear forms, as mixed-radix deltas of
    // squared values with each metric sign
    std::uint64_t qh = 1;
    for (std::uint32_t i = 0; i < h1; i++) qh *= q;
    std::vector<std::uint32_t> msq(n);
    auto edge_values = [&](std::uint64_t pidx, int sign) {
        // slice momentum p: digits base q; returns mixed-radix index of
        // (sign * (s_e . p)^2)_e
        std::vector<std::uint32_t> pv(h1);
        std::uint64_t t = pidx;
        for (std::uint32_t i = 0; i < h1; i++) { pv[i] = std::uint32_t(t % q); t /= q; }
        std::uint64_t widx = 0, stride = 1;
        for (std::uint32_t e = 0; e < n; e++) {
            std::uint32_t acc = 0;
            for (std::uint32_t i = 0; i < h1; i++) {
                int c = routing.coeffs[e][i];
                if (c == +1) acc = F.add(acc, pv[i]);
                else if (c == -1) acc = F.sub(acc, pv[i]);
            }
            std::uint32_t sq = F.mul(acc, acc);
            if (sign < 0) sq = F.neg(sq);
            widx += std::uint64_t(sq) * stride;
            stride *= q;
        }
        return widx;
    };

    // per-coordinate convolution: D_{j+1}(w + v) += D_j(w) over the slice image
    std::vector<std::uint64_t> cur(table, 0), next(table, 0);
    cur[0] = 1;
    std::vector<std::uint64_t> strides(n);
    {
        std::uint64_t s = 1;
        for (std::uint32_t e = 0; e < n; e++) { strides[e] = s; s *= q; }
    }
    auto add_index = [&](std::uint64_t a, std::uint64_t b) {
        // digitwise field addition of mixed-radix indices
        std::uint64_t r = 0;
        for (std::uint32_t e = 0; e < n; e++) {
            std::uint32_t da = std::uint32_t(a / strides[e] % q);
            std::uint32_t db = std::uint32_t(b / strides[e] % q);
            r += std::uint64_t(F.add(da, db)) * strides[e];
        }
        return r;
    };
    const auto& metric = theory.metric;
    for (std::uint32_t j = 0; j < theory.d; j++) {
        int sign = metric.empty() ? +1 : metric[j];
        std::vector<std::uint64_t> image(qh);
        for (std::uint64_t pidx = 0; pidx < qh; pidx++) image[pidx] = edge_values(pidx, sign);
        std::fill(next.begin(), next.end(), 0);
        for (std::uint64_t w = 0; w < table; w++) {
            if (cur[w] == 0) continue;
            for (std::uint64_t v : image) next[add_index(w, v)] += cur[w];
        }
        std::swap(cur, next);
    }

    // contract with prod (m^2 + w_e)^{-1}, skipping zero factors (Eq. 28),
    // and with prod (m^2 + w_e)^{q-2} including them (Eq. 30)
    std::uint32_t m2 = F.from_int(theory.mass_squared);
    std::vector<std::uint32_t> invtab(q), powtab(q);
    for (std::uint64_t t = 0; t < q; t++) {
        std::uint32_t val = F.add(std::uint32_t(t), m2);
        invtab[t] = val == 0 ? 0 : F.inv(val);
        powtab[t] = F.pow(val, q - 2);  // 0 for val == 0 when q > 2
    }
    std::uint32_t sum28 = 0, sum30 = 0;
    std::uint64_t excluded = 0;
    for (std::uint64_t w = 0; w < table; w++) {
        if (cur[w] == 0) continue;
        std::uint32_t prod = 1, prodp = 1;
        bool zero = false;
        std::uint64_t t = w;
        for (std::uint32_t e = 0; e < n; e++) {
            std::uint32_t digit = std::uint32_t(t % q);
            t /= q;
            if (F.add(digit, m2) == 0) zero = true;
            prod = F.mul(prod, invtab[digit]);
            prodp = F.mul(prodp, powtab[digit]);
        }
        std::uint32_t cnt = std::uint32_t(cur[w] % F.p());
        if (!zero) sum28 = F.add(sum28, F.mul(cnt, prod));
        else excluded += cur[w];
        sum30 = F.add(sum30, F.mul(cnt, prodp));
    }

    Amplitude a;
    a.value = FieldElement(sum28, field);
    a.excluded_points = excluded;
    if (q > 2) {
        a.eq30_checked = true;
        if (sum28 != sum30)
            throw internal_error("amplitude: restricted sum and power form disagree");
    }
    return a;
}

}  // namespace

Amplitude amplitude_direct(const Multigraph& g, const TheoryConfig& theory,
                           const Field& field, const MomentumRouting& routing,
                           std::uint64_t budget) {
    const auto& F = *field;
    const std::uint64_t q = F.q();
    const std::uint32_t n = std::uint32_t(g.edges.size());
    const std::uint32_t h1 = routing.h1;
    if (h1 == 0) {
        Amplitude a;
        a.value = FieldElement(1 % F.q() == 0 ? 0 : 1, field);
        a.tree_convention = true;
        return a;
    }
    const std::uint32_t dim = theory.d * h1;
    std::uint64_t points = 1;
    for (std::uint32_t i = 0; i < dim; i++) {
        points *= q;
        if (points > budget) throw budget_error("amplitude_direct: q^(d*h1) over budget");
    }
    std::uint32_t m2 = F.from_int(theory.mass_squared);
    const auto& metric = theory.metric;

    std::vector<std::uint32_t> coord(dim, 0);
    std::uint32_t sum28 = 0, sum30 = 0;
    std::uint64_t excluded = 0;
    for (std::uint64_t idx = 0;; idx++) {
        std::uint64_t t = idx;
        bool done = false;
        if (idx > 0) {
            std::uint32_t pos = 0;
            for (;;) {
                if (pos == dim) { done = true; break; }
                coord[pos]++;
                if (coord[pos] < q) break;
                coord[pos] = 0;
                pos++;
            }
        }
        (void)t;
        if (done) break;
        // Q_e = m^2 + sum_j metric_j (s_e . p_j)^2, p_j = coords[j*h1 .. )
        std::uint32_t prod = 1, prodp = 1;
        bool zero = false;
        for (std::uint32_t e = 0; e < n && !zero; e++) {
            std::uint32_t val = m2;
            for (std::uint32_t j = 0; j < theory.d; j++) {
                std::uint32_t acc = 0;
                for (std::uint32_t i = 0; i < h1; i++) {
                    int c = routing.coeffs[e][i];
                    std::uint32_t pv = coord[j * h1 + i];
                    if (c == +1) acc = F.add(acc, pv);
                    else if (c == -1) acc = F.sub(acc, pv);
                }
                std::uint32_t sq = F.mul(acc, acc);
                int sign = metric.empty() ? +1 : metric[j];
                val = sign > 0 ? F.add(val, sq) : F.sub(val, sq);
            }
            if (val == 0) zero = true;
            else prod = F.mul(prod, F.inv(val));
        }
        if (zero) excluded++;
        else sum28 = F.add(sum28, prod);
        // power form recomputed without the zero short-circuit
        if (q > 2) {
            std::uint32_t pp = 1;
            for (std::uint32_t e = 0; e < n; e++) {
                std::uint32_t val = m2;
                for (std::uint32_t j = 0; j < theory.d; j++) {
                    std::uint32_t acc = 0;
                    for (std::uint32_t i = 0; i < h1; i++) {
                        int c = routing.coeffs[e][i];
                        std::uint32_t pv = coord[j * h1 + i];
                        if (c == +1) acc = F.add(acc, pv);
                        else if (c == -1) acc = F.sub(acc, pv);
                    }
                    std::uint32_t sq = F.mul(acc, acc);
                    int sign = metric.empty() ? +1 : metric[j];
                    val = sign > 0 ? F.add(val, sq) : F.sub(val, sq);
                }
                pp = F.mul(pp, F.pow(val, q - 2));
            }
            sum30 = F.add(sum30, pp);
        }
    }
    Amplitude a;
    a.value = FieldElement(sum28, field);
    a.excluded_points = excluded;
    if (q > 2) {
        a.eq30_checked = true;
        if (sum28 != sum30)
            throw internal_error("amplitude_direct: restricted sum and power form disagree");
    }
    return a;
}

Amplitude amplitude(const Multigraph& g, const TheoryConfig& theory, const Field& field,
                    std::uint64_t budget) {
    if (theory.d < 1) throw input_error("amplitude: dimension must be >= 1");
    if (!theory.metric.empty()) {
        if (theory.metric.size() != theory.d)
            throw input_error("amplitude: metric length must equal d");
        for (int s : theory.metric)
            if (s != 1 && s != -1) throw input_error("amplitude: metric entries must be +-1");
    }
    MomentumRouting routing = route_momenta(g);
    if (routing.h1 == 0) {
        Amplitude a;
        a.value = FieldElement(field->q() == 1 ? 0 : 1, field);
        a.tree_convention = true;
        return a;
    }
    // prefer the distribution route when the q^n table is affordable
    std::uint64_t table = 1;
    bool table_ok = true;
    for (std::uint32_t i = 0; i < g.edges.size(); i++) {
        table *= field->q();
        if (table > (1ull << 26)) { table_ok = false; break; }
    }
    if (table_ok) return amplitude_distribution(g, theory, field, routing);
    return amplitude_direct(g, theory, field, routing, budget);
}

std::optional<bool> vanishing_predicate(const Multigraph& g, std::uint32_t d,
                                        std::uint64_t q) {
    if (q <= 2) return std::nullopt;
    std::int64_t c = superficial_degree(g, d);
    std::int64_t crit = std::int64_t(q - 1) * c + 2 * g.edge_count();
    return crit > 0;
}

std::vector<ScanCell> vanishing_scan(const Multigraph& g, const std::vector<std::uint32_t>& ds,
                                     const std::vector<std::uint64_t>& qs,
                                     std::int64_t mass_squared) {
    std::vector<ScanCell> out;
    for (std::uint32_t d : ds) {
        for (std::uint64_t q : qs) {
            if (!is_prime_u64(q)) throw input_error("vanishing_scan: q must be prime here");
            Field f = make_field(std::uint32_t(q), 1);
            TheoryConfig th;
            th.d = d;
            th.mass_squared = mass_squared;
            ScanCell cell;
            cell.d = d;
            cell.q = q;
            cell.c = superficial_degree(g, d);
            cell.criterion = std::int64_t(q - 1) * cell.c + 2 * g.edge_count();
            cell.predicate = vanishing_predicate(g, d, q);
            Amplitude a = amplitude(g, th, f);
            cell.amplitude_value = a.value.idx;
            cell.amplitude_zero = a.value.idx == 0;
            cell.forms_agree = a.eq30_checked || q <= 2;
            cell.predicate_respected =
                !cell.predicate.has_value() || !*cell.predicate || cell.amplitude_zero;
            out.push_back(cell);
        }
    }
    return out;
}

}  // namespace nbar
