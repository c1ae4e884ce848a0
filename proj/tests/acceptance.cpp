// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.  Exit code = number of
// failures.  NBAR_ACCEPT_ONLY=<n[,m...]> restricts the run; NBAR_ACCEPT_EXTENDED=1
// enables the long quartic-surface scan.

#include <nbar/count.hpp>
#include <nbar/fqft.hpp>
#include <nbar/gf.hpp>
#include <nbar/graphpoly.hpp>
#include <nbar/interp.hpp>
#include <nbar/reduce.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

using namespace nbar;
using Clock = std::chrono::steady_clock;

namespace {

std::uint64_t projective_points_for_test(std::uint64_t q, std::uint32_t n) {
    std::uint64_t r = 0, t = 1;
    for (std::uint32_t i = 0; i < n; i++) {
        r += t;
        t *= q;
    }
    return r;
}

constexpr std::uint64_t kCorpusSeed = 0x6e626172;  // "nbar"

struct Corpus {
    std::vector<Multigraph> exhaustive8;  // all connected simple graphs, <= 8 edges
    std::vector<Multigraph> sample500;    // 9..12 edges, iso-distinct
    std::vector<Multigraph> families;
};

const Corpus& corpus() {
    static Corpus c = [] {
        Corpus k;
        k.exhaustive8 = exhaustive_corpus(8);
        k.sample500 = sampled_corpus(9, 12, 500, kCorpusSeed);
        for (int n = 3; n <= 8; n++) k.families.push_back(make_cycle(n));
        k.families.push_back(make_complete(4));
        k.families.push_back(make_complete(5));
        k.families.push_back(make_wheel(4));
        k.families.push_back(make_wheel(5));
        k.families.push_back(make_complete_bipartite(3, 3));
        return k;
    }();
    return c;
}

std::vector<Multigraph> twelve_edge_corpus() {
    std::vector<Multigraph> all = corpus().exhaustive8;
    for (auto& g : corpus().sample500) all.push_back(g);
    for (auto& g : corpus().families)
        if (g.edge_count() <= 12) all.push_back(g);
    return all;
}

Field field_q(std::uint64_t q) {
    for (std::uint32_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23}) {
        std::uint64_t t = q;
        std::uint32_t k = 0;
        while (t % p == 0) { t /= p; k++; }
        if (t == 1 && k >= 1) return make_field(p, k);
    }
    throw input_error("not a small prime power");
}

std::uint64_t nbar_enum(const Multigraph& g, const Field& f) {
    return count_projective_complement(psi_system(g, {}), f);
}

// run fn over items on two workers
template <class T, class Fn>
bool parallel_all(const std::vector<T>& items, Fn fn, std::string& firstfail) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> ok{true};
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= items.size() || !ok.load()) return;
            std::string why;
            if (!fn(items[i], why)) {
                std::lock_guard<std::mutex> lock(mu);
                ok = false;
                if (firstfail.empty()) firstfail = why;
            }
        }
    };
    auto f1 = std::async(std::launch::async, worker);
    auto f2 = std::async(std::launch::async, worker);
    f1.wait();
    f2.wait();
    return ok.load();
}

// ---- criteria ---------------------------------------------------------------

bool crit1(std::string& note) {
    Multigraph c3 = make_cycle(3);
    PolySystem psi = psi_system(c3, {});
    PolySystem dual = make_system({dual_polynomial(c3)}, AmbientKind::Projective, {1, 2, 3});
    for (std::uint64_t q : {2, 3, 4, 5, 7, 8, 9, 16}) {
        Field f = field_q(q);
        if (count_projective_complement(psi, f) != q * q) {
            note = "Psi_C3 at q=" + std::to_string(q);
            return false;
        }
        if (count_projective_complement(dual, f) != q * q) {
            note = "dual Psi_C3 at q=" + std::to_string(q);
            return false;
        }
    }
    return true;
}

bool crit2(std::string& note) {
    return parallel_all(corpus().exhaustive8, [](const Multigraph& g, std::string& why) {
        SparsePoly psi = graph_polynomial(g);
        Monomial all;
        for (auto& e : g.edges) all = all.mul(Monomial::var(Var(e.id)));
        std::vector<SparsePoly::Term> t;
        for (auto& term : psi.terms()) t.push_back({*all.div(term.first), term.second});
        if (dual_polynomial(g) != SparsePoly::from_terms(std::move(t))) {
            why = "Cremona identity failed on " + graph_to_text(g);
            return false;
        }
        return true;
    }, note);
}

bool crit3(std::string& note) {
    std::vector<Multigraph> gs;
    for (auto& g : twelve_edge_corpus())
        if (g.edge_count() <= 10) gs.push_back(g);
    return parallel_all(gs, [](const Multigraph& g, std::string& why) {
        SparsePoly psi = graph_polynomial(g);
        for (auto& e : g.edges)
            for (auto& f : g.edges) {
                if (e.id >= f.id) continue;
                if (psi.deg_in(Var(e.id)) > 1 || psi.deg_in(Var(f.id)) > 1) continue;
                if (!try_delta_pair(psi, Var(e.id), Var(f.id))) {
                    why = "bc-ad not a square on " + graph_to_text(g);
                    return false;
                }
            }
        return true;
    }, note);
}

bool crit4(std::string& note) {
    std::vector<Multigraph> gs;
    for (auto& g : twelve_edge_corpus()) {
        auto probe = structural_probe(g);
        if (probe.is_simple && probe.vertex_connectivity_ge_2 && cycle_rank(g) > 0)
            gs.push_back(g);
    }
    return parallel_all(gs, [](const Multigraph& g, std::string& why) {
        PolySystem psi = psi_system(g, {});
        auto probe = structural_probe(g);
        bool cor4 = !probe.three_valent_vertices.empty() &&
                    2 * cycle_rank(g) < g.edge_count();
        for (std::uint64_t q : {2, 3, 4, 5, 7, 8, 9}) {
            Field f = field_q(q);
            std::uint64_t nbar = count_complement_multilinear(psi, f);
            if (nbar % (q * q) != 0) {
                why = "Cor.3 violated at q=" + std::to_string(q) + " on " + graph_to_text(g);
                return false;
            }
            if (cor4 && nbar % (q * q * q) != 0) {
                why = "Cor.4 violated at q=" + std::to_string(q) + " on " + graph_to_text(g);
                return false;
            }
        }
        return true;
    }, note);
}

struct ReducedCorpus {
    std::vector<Multigraph> graphs;
    std::vector<ReductionReport> reports;
    int resolved = 0;
};

const ReducedCorpus& reduced_corpus() {
    static ReducedCorpus rc = [] {
        ReducedCorpus r;
        r.graphs = twelve_edge_corpus();
        r.reports.resize(r.graphs.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= r.graphs.size()) return;
                r.reports[i] = run_method1(r.graphs[i]);
            }
        };
        auto f1 = std::async(std::launch::async, worker);
        auto f2 = std::async(std::launch::async, worker);
        f1.wait();
        f2.wait();
        for (auto& rep : r.reports)
            if (rep.fully_resolved()) r.resolved++;
        return r;
    }();
    return rc;
}

bool crit5(std::string& note) {
    // part 1: certification of the 500-graph sample against enumeration
    const auto& rc = reduced_corpus();
    std::vector<std::size_t> sample_idx;
    std::size_t base = corpus().exhaustive8.size();
    for (std::size_t i = 0; i < corpus().sample500.size(); i++)
        sample_idx.push_back(base + i);
    bool ok = parallel_all(sample_idx, [&](std::size_t i, std::string& why) {
        const Multigraph& g = rc.graphs[i];
        PolySystem sys = psi_system(g, {});
        for (std::uint64_t q : {2, 3, 4, 5}) {
            Field f = field_q(q);
            if (!certify_report(rc.reports[i], sys, f)) {
                why = "report != brute force at q=" + std::to_string(q) + " on " +
                      graph_to_text(g);
                return false;
            }
        }
        return true;
    }, note);
    if (!ok) return false;

    // part 2: the theorem entry formulas on K4 and five larger fixtures
    std::vector<Multigraph> fixtures{make_complete(4), make_wheel(4), make_wheel(5),
                                     make_complete_bipartite(3, 3)};
    {
        Multigraph prism;
        prism.vertex_count = 6;
        prism.edges = {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}, {3, 4, 4}, {4, 5, 5},
                       {3, 5, 6}, {0, 3, 7}, {1, 4, 8}, {2, 5, 9}};
        fixtures.push_back(prism);
        Multigraph k5e = make_complete(5);  // K5 minus one edge
        k5e.edges.erase(k5e.edges.begin());
        int id = 1;
        for (auto& e : k5e.edges) e.id = id++;
        fixtures.push_back(k5e);
    }
    for (auto& g : fixtures) {
        auto probe = structural_probe(g);
        std::vector<Theorem1Mode> modes{Theorem1Mode::Vertex, Theorem1Mode::VertexAlt};
        if (!probe.triangles_at_3valent.empty()) modes.push_back(Theorem1Mode::Triangle);
        for (auto mode : modes) {
            CountExpression e = theorem1_entry(g, mode);
            for (std::uint64_t q : {2, 3, 5, 7}) {
                Field f = field_q(q);
                if (e.eval_enumerated(f) != Int(static_cast<unsigned long>(nbar_enum(g, f)))) {
                    note = "theorem entry mismatch on " + graph_to_text(g) + " q=" +
                           std::to_string(q);
                    return false;
                }
            }
        }
    }
    return true;
}

bool crit6(std::string& note) {
    const auto& rc = reduced_corpus();
    int n = int(rc.graphs.size());
    double rate = double(rc.resolved) / n;
    if (rate < 0.95) {
        note = "resolution rate " + std::to_string(rate);
        return false;
    }
    for (std::size_t i = 0; i < rc.graphs.size(); i++) {
        const auto& rep = rc.reports[i];
        if (!rep.fully_resolved()) continue;
        const Multigraph& g = rc.graphs[i];
        std::uint32_t ne = std::uint32_t(g.edge_count());
        auto probe = structural_probe(g);
        if (rep.resolved.coeff(ne - 1) != 1) {
            note = "leading coefficient != 1 on " + graph_to_text(g);
            return false;
        }
        if (probe.is_simple && cycle_rank(g) > 0 &&
            (rep.resolved.coeff(0) != 0 || rep.resolved.coeff(1) != 0)) {
            note = "c0/c1 != 0 on " + graph_to_text(g);
            return false;
        }
        // Eq. 13c's q^{n-2} gap needs vertex connectivity >= 2
        if (probe.is_simple && probe.vertex_connectivity_ge_2 &&
            rep.resolved.coeff(ne - 2) != 0) {
            note = "c_{n-2} != 0 on " + graph_to_text(g);
            return false;
        }
    }
    return true;
}

bool crit7(std::string& note) {
    auto rows = result4_scan(199);
    for (auto& r : rows) {
        if (r.k < 0) {
            note = "falsification record at p=" + std::to_string(r.p);
            return false;
        }
        if (!r.pattern_ok) {
            note = "k(p)=0 pattern failed at p=" + std::to_string(r.p);
            return false;
        }
    }
    const char* ext = std::getenv("NBAR_ACCEPT_EXTENDED");
    if (ext && *ext == '1') {
        auto big = result4_scan(4999);
        double maxr = 0;
        for (auto& r : big) {
            if (r.k < 0 || !r.pattern_ok) {
                note = "extended scan failed at p=" + std::to_string(r.p);
                return false;
            }
            maxr = std::max(maxr, r.ratio);
        }
        if (maxr < 0.9) {
            note = "extended max 7k^2/p = " + std::to_string(maxr);
            return false;
        }
        note = "extended max 7k^2/p = " + std::to_string(maxr);
    }
    return true;
}

bool crit8(std::string& note) {
    for (auto [p, k] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}, {11, 1},
             {13, 1}, {2, 4}, {17, 1}, {19, 1}, {23, 1}, {5, 2}}) {
        Field f = make_field(p, k);
        try {
            conic_count(ConicForm::sum_with_cross, f);   // closed form asserted inside
            conic_count(ConicForm::sum_of_squares, f);
        } catch (const internal_error& e) {
            note = std::string(e.what()) + " at q=" + std::to_string(f->q());
            return false;
        }
    }
    return true;
}

bool crit9(std::string& note) {
    std::mt19937_64 rng(777);
    int done = 0;
    while (done < 1000) {
        std::uint32_t deg = 2 + std::uint32_t(rng() % 12);  // degree <= 13
        QPoly p;
        p.c.assign(deg + 1, Int(0));
        p.c[deg] = 1;
        for (std::uint32_t i = 2; i + 2 <= deg; i++)
            p.c[i] = Int(long(rng() % 81) - 40);
        std::vector<CountSample> samples;
        bool negative = false;
        for (std::uint64_t q : {2, 3, 5, 7, 11}) {
            Int v = p.eval(Int(static_cast<unsigned long>(q)));
            if (v < 0) negative = true;
            samples.push_back({q, v, "synthetic"});
        }
        if (negative) continue;  // counts are nonnegative; resample
        done++;
        auto cands = crt_reconstruct(samples, deg);
        if (cands.size() != 1 || !(cands[0] == p)) {
            note = "round trip failed at trial " + std::to_string(done);
            return false;
        }
    }
    // chi_3 pattern rejection
    std::vector<CountSample> conic;
    for (std::uint32_t p : {2, 3, 5, 7}) {
        Field f = make_field(p, 1);
        conic.push_back({p, Int(long(conic_count(ConicForm::sum_with_cross, f))), ""});
    }
    if (!crt_reconstruct(conic, 3).empty()) {
        note = "chi_3 pattern was not rejected";
        return false;
    }
    return true;
}

bool crit10(std::string& note) {
    auto factors = zeta_function(QPoly::power(2));
    Field f2 = make_field(2, 1);
    // direct counts of the line x1+x2+x3 = 0 in P^2 over F_{2^k}
    std::vector<Int> counts;
    for (std::uint32_t k = 1; k <= 3; k++) {
        Field f = make_field(2, k);
        PolySystem line;
        line.ambient = AmbientKind::Projective;
        line.nvars = 3;
        line.polys.push_back(parse_poly("x1 + x2 + x3"));
        std::uint64_t points =
            projective_points_for_test(f->q(), 3) - count_projective_complement(line, f);
        counts.push_back(Int(static_cast<unsigned long>(points)));
    }
    if (zeta_series(factors, Int(2), 3) != exp_series_from_counts(counts, 3)) {
        note = "series expansion mismatch";
        return false;
    }
    return true;
}

bool crit11(std::string& note) {
    std::vector<Multigraph> gs;
    {
        Multigraph bubble;
        bubble.vertex_count = 2;
        bubble.edges = {{0, 1, 1}, {0, 1, 2}};
        gs.push_back(bubble);
        Multigraph theta = bubble;
        theta.edges.push_back({0, 1, 3});
        gs.push_back(theta);
        gs.push_back(make_complete(4));
    }
    std::vector<std::pair<std::size_t, std::pair<std::uint32_t, std::uint64_t>>> cells;
    for (std::size_t gi = 0; gi < gs.size(); gi++)
        for (std::uint32_t d = 1; d <= 6; d++)
            for (std::uint64_t q : {3, 5, 7}) cells.push_back({gi, {d, q}});
    return parallel_all(cells, [&](const auto& cell, std::string& why) {
        const Multigraph& g = gs[cell.first];
        std::uint32_t d = cell.second.first;
        std::uint64_t q = cell.second.second;
        Field f = field_q(q);
        TheoryConfig th;
        th.d = d;
        th.mass_squared = 1;
        Amplitude a;
        try {
            a = amplitude(g, th, f);
        } catch (const internal_error& e) {
            why = std::string("Eq28/Eq30: ") + e.what();
            return false;
        }
        if (!a.eq30_checked) {
            why = "power form not checked";
            return false;
        }
        auto pred = vanishing_predicate(g, d, q);
        if (pred && *pred && a.value.idx != 0) {
            why = "predicate-true cell with nonzero amplitude (d=" + std::to_string(d) +
                  ", q=" + std::to_string(q) + ")";
            return false;
        }
        return true;
    }, note);
}

bool crit12(std::string& note) {
    for (std::uint64_t q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16}) {
        Field f = field_q(q);
        for (std::uint64_t e = 0; e <= 3 * (q - 1); e++) {
            std::uint32_t naive = 0;
            for (std::uint32_t x = 0; x < q; x++) naive = f->add(naive, f->pow(x, e));
            if (power_sum(f, e).idx != naive) {
                note = "q=" + std::to_string(q) + " k=" + std::to_string(e);
                return false;
            }
        }
    }
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* desc;
        bool (*fn)(std::string&);
    };
    std::vector<Criterion> list{
        {1, "C3 exactness: Nbar(Psi)=Nbar(dual)=q^2 for q in {2,3,4,5,7,8,9,16}", crit1},
        {2, "Cremona identity on every connected simple graph with <= 8 edges", crit2},
        {3, "Dodgson square property for every edge pair, corpus <= 10 edges", crit3},
        {4, "congruences: Nbar = 0 mod q^2 (and mod q^3 with a 3-valent vertex, 2h1<n)",
         crit4},
        {5, "reduction reports equal brute force (500-graph corpus, q=2..5); "
            "theorem entries certified on 6 fixtures at q in {2,3,5,7}", crit5},
        {6, ">= 95% of the <= 12-edge corpus fully resolves with the expected shape",
         crit6},
        {7, "quartic surface scan: 28 k(p)^2 congruence and k(p)=0 pattern, p <= 199",
         crit7},
        {8, "conic counts match the q-{1,0,-1} closed forms for q <= 25", crit8},
        {9, "CRT round trip: 1000 random polynomials recovered; chi_3 rejected", crit9},
        {10, "zeta of the C3 answer reproduces the line's point counts", crit10},
        {11, "Lemma 4 scan: predicate-true cells vanish, Eq28 = Eq30 everywhere", crit11},
        {12, "power sums: closed form vs naive for q <= 16, k <= 3(q-1)", crit12},
    };
    std::set<int> only;
    if (const char* env = std::getenv("NBAR_ACCEPT_ONLY")) {
        std::istringstream in(env);
        std::string tok;
        while (std::getline(in, tok, ',')) only.insert(std::stoi(tok));
    }
    int failures = 0;
    for (auto& c : list) {
        if (!only.empty() && !only.count(c.id)) continue;
        auto start = Clock::now();
        std::string note;
        bool ok = false;
        try {
            ok = c.fn(note);
        } catch (const std::exception& e) {
            note = e.what();
        }
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", c.id,
                    c.desc, secs, note.empty() ? "" : " -- ", note.c_str());
        std::fflush(stdout);
        if (!ok) failures++;
    }
    return failures;
}
