// nbar: point counts in projective complements of graph hypersurfaces over
// finite fields, symbolic reduction, CRT interpolation, and momentum-space
// amplitudes over F_q.
//
// Exit codes: 0 ok, 2 input error, 3 budget exceeded, 4 internal consistency.

#include <nbar/count.hpp>
#include <nbar/fqft.hpp>
#include <nbar/gf.hpp>
#include <nbar/graphpoly.hpp>
#include <nbar/interp.hpp>
#include <nbar/io.hpp>
#include <nbar/reduce.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>

using namespace nbar;

namespace {

struct FieldArg {
    std::uint64_t q = 2;
    Field make() const {
        std::uint64_t qq = q;
        for (std::uint32_t p = 2; p * p <= qq; p++) {
            if (qq % p == 0) {
                std::uint32_t k = 0;
                while (qq > 1) {
                    if (qq % p != 0)
                        throw input_error("q must be a prime power");
                    qq /= p;
                    k++;
                }
                return make_field(p, k);
            }
        }
        return make_field(std::uint32_t(q), 1);  // prime
    }
};

Json manifest_for(const std::string& command, const std::vector<std::string>& inputs,
                  const Json& params) {
    Json m;
    m["command"] = command;
    Json ins = Json::object();
    for (auto& path : inputs) {
        std::string content = read_file(path);
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : content) {
            h ^= c;
            h *= 1099511628211ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
        ins[path] = buf;
    }
    m["inputs"] = std::move(ins);
    m["params"] = params;
    return m;
}

void emit(const Json& j, const std::string& out_path, const std::string& command,
          const std::vector<std::string>& inputs, const Json& params, bool pretty) {
    std::string text = pretty ? j.dump(2) : j.dump();
    text += "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        write_file(out_path, text);
        Json m = manifest_for(command, inputs, params);
        write_file(out_path + ".manifest.json", m.dump(2) + "\n");
    }
}

std::vector<int> parse_sequence(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph hypersurface point counts over F_q"};
    app.require_subcommand(1);
    bool pretty = false;
    app.add_flag("--pretty", pretty, "indent JSON output");

    // ---- psi ----
    auto* psi = app.add_subcommand("psi", "graph polynomial (Kirchhoff) of a graph file");
    std::string psi_graph, psi_out;
    bool psi_dual = false;
    psi->add_option("graph", psi_graph, "graph file (text or JSON)")->required();
    psi->add_flag("--dual", psi_dual, "dual polynomial (edges in the tree)");
    psi->add_option("-o,--output", psi_out, "output file (default stdout)");

    // ---- count ----
    auto* count = app.add_subcommand("count", "exhaustive point count of a system file");
    std::string count_sys, count_out;
    FieldArg count_q;
    std::uint64_t count_shard_i = 0, count_shard_n = 1;
    bool count_ml = false;
    count->add_option("system", count_sys, "system file (JSON or one poly per line)")
        ->required();
    count->add_option("--q", count_q.q, "prime power q")->required();
    std::string count_shard;
    count->add_option("--shard", count_shard, "i/N outermost-variable shard");
    count->add_flag("--multilinear", count_ml, "recursive eliminating counter");
    count->add_option("-o,--output", count_out, "output file");

    // ---- merge ----
    auto* merge = app.add_subcommand("merge", "combine shard count JSONs");
    std::vector<std::string> merge_files;
    std::string merge_out;
    merge->add_option("files", merge_files, "shard outputs")->required()->expected(-1);
    merge->add_option("-o,--output", merge_out, "output file");

    // ---- reduce ----
    auto* reduce = app.add_subcommand("reduce", "symbolic reduction of Nbar for a graph");
    std::string red_graph, red_out, red_seq, red_certify;
    bool red_groth = false;
    reduce->add_option("graph", red_graph, "graph file")->required();
    reduce->add_option("--sequence", red_seq, "comma-separated edge ids");
    reduce->add_option("--certify-q", red_certify,
                       "comma-separated prime powers for numeric certification");
    reduce->add_flag("--grothendieck", red_groth, "render the class with L for q");
    reduce->add_option("-o,--output", red_out, "output file");

    // ---- reduce-system ----
    auto* redsys = app.add_subcommand("reduce-system", "symbolic reduction of a system file");
    std::string rs_sys, rs_out, rs_certify;
    redsys->add_option("system", rs_sys, "system file")->required();
    redsys->add_option("--certify-q", rs_certify, "comma-separated prime powers");
    redsys->add_option("-o,--output", rs_out, "output file");

    // ---- interp ----
    auto* interp = app.add_subcommand("interp", "CRT reconstruction from count samples");
    std::string in_samples, in_out;
    std::uint32_t in_degree = 0;
    bool in_drop2 = false, in_loose = false;
    std::vector<std::uint64_t> in_class;
    interp->add_option("samples", in_samples, "file of 'q nbar' lines")->required();
    interp->add_option("--degree", in_degree, "expected degree (n-1)")->required();
    interp->add_flag("--drop-prime-2", in_drop2, "rerun without q=2 samples");
    interp->add_flag("--no-shape-gate", in_loose,
                     "skip the c_top==1, c_top-1==0 acceptance checks");
    interp->add_option("--residue-class", in_class,
                       "m r: restrict to samples with q == r (mod m)")
        ->expected(2);
    interp->add_option("-o,--output", in_out, "output file");

    // ---- zeta ----
    auto* zeta = app.add_subcommand("zeta", "local zeta function of a polynomial Nbar");
    std::string z_poly, z_out;
    zeta->add_option("nbar", z_poly, "polynomial in q, e.g. 'q^2'")->required();
    zeta->add_option("-o,--output", z_out, "output file");

    // ---- amplitude ----
    auto* amp = app.add_subcommand("amplitude", "momentum-space amplitude over F_q");
    std::string amp_graph, amp_out, amp_metric;
    std::vector<std::uint64_t> amp_qs;
    std::vector<std::uint32_t> amp_ds;
    std::int64_t amp_m2 = 1;
    amp->add_option("graph", amp_graph, "graph file")->required();
    amp->add_option("--d", amp_ds, "space-time dimensions")->required();
    amp->add_option("--q", amp_qs, "primes q")->required();
    amp->add_option("--m2", amp_m2, "mass squared");
    amp->add_option("--metric", amp_metric, "comma-separated +-1 entries (euclidean default)");
    amp->add_option("-o,--output", amp_out, "output file");

    // ---- corpus ----
    auto* corpus = app.add_subcommand("corpus", "deterministic graph corpus");
    int corpus_max = 8;
    int corpus_sample = 0, corpus_min = 9, corpus_smax = 12;
    std::uint64_t corpus_seed = 0x6e626172;
    std::string corpus_out;
    corpus->add_option("--max-edges", corpus_max, "exhaustive corpus limit");
    corpus->add_option("--sample", corpus_sample, "add a sampled corpus of this size");
    corpus->add_option("--sample-min", corpus_min, "sampled corpus min edges");
    corpus->add_option("--sample-max", corpus_smax, "sampled corpus max edges");
    corpus->add_option("--seed", corpus_seed, "sample seed");
    corpus->add_option("-o,--output", corpus_out, "output file");

    // ---- result4 ----
    auto* r4 = app.add_subcommand("result4", "quartic surface scan: Nbar(f) mod p");
    std::uint64_t r4_pmax = 199;
    std::string r4_out;
    r4->add_option("--pmax", r4_pmax, "largest prime to scan");
    r4->add_option("-o,--output", r4_out, "output file");

    // ---- replay ----
    auto* replay = app.add_subcommand("replay", "re-run a manifest and compare outputs");
    std::string replay_manifest;
    replay->add_option("manifest", replay_manifest, "manifest JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*psi) {
            Multigraph g = load_graph(read_file(psi_graph));
            SparsePoly f = psi_dual ? dual_polynomial(g) : graph_polynomial(g);
            Json j;
            j["polynomial"] = f.str();
            j["dual"] = psi_dual;
            j["edges"] = g.edge_count();
            j["h1"] = cycle_rank(g);
            emit(j, psi_out, "psi", {psi_graph}, Json{{"dual", psi_dual}}, pretty);
        } else if (*count) {
            if (!count_shard.empty()) {
                auto slash = count_shard.find('/');
                if (slash == std::string::npos)
                    throw input_error("--shard expects i/N");
                count_shard_i = std::stoull(count_shard.substr(0, slash));
                count_shard_n = std::stoull(count_shard.substr(slash + 1));
            }
            PolySystem sys = load_system(read_file(count_sys));
            Field f = count_q.make();
            ShardSpec shard{count_shard_i, count_shard_n};
            Json j;
            j["q"] = f->q();
            j["system_hash"] = [&] {
                char buf[17];
                std::snprintf(buf, sizeof buf, "%016llx",
                              (unsigned long long)sys.hash());
                return std::string(buf);
            }();
            j["shard"] = {shard.index, shard.total};
            if (count_ml) {
                std::uint64_t zeros = count_zeros_multilinear(sys, f);
                j["N"] = zeros;
                j["Nbar"] = count_complement_multilinear(sys, f);
            } else {
                std::uint64_t zeros = count_zeros(sys, f, shard);
                j["N"] = zeros;
                if (shard.total == 1)
                    j["Nbar"] = sys.ambient == AmbientKind::Projective
                                    ? count_projective_complement(sys, f)
                                    : count_affine_complement(sys, f);
            }
            emit(j, count_out, "count", {count_sys},
                 Json{{"q", f->q()}, {"shard", count_shard}, {"multilinear", count_ml}},
                 pretty);
        } else if (*merge) {
            Json total;
            std::uint64_t zeros = 0;
            std::string hash;
            std::uint64_t q = 0, shard_total = 0;
            std::set<std::uint64_t> seen;
            for (auto& path : merge_files) {
                Json j = Json::parse(read_file(path));
                if (hash.empty()) {
                    hash = j["system_hash"].get<std::string>();
                    q = j["q"].get<std::uint64_t>();
                    shard_total = j["shard"][1].get<std::uint64_t>();
                } else if (hash != j["system_hash"].get<std::string>() ||
                           q != j["q"].get<std::uint64_t>() ||
                           shard_total != j["shard"][1].get<std::uint64_t>()) {
                    throw input_error("merge: shard files disagree on system/q/shards");
                }
                if (!seen.insert(j["shard"][0].get<std::uint64_t>()).second)
                    throw input_error("merge: duplicate shard index");
                zeros += j["N"].get<std::uint64_t>();
            }
            if (seen.size() != shard_total)
                throw input_error("merge: missing shards (" + std::to_string(seen.size()) +
                                  " of " + std::to_string(shard_total) + ")");
            total["q"] = q;
            total["system_hash"] = hash;
            total["N"] = zeros;
            emit(total, merge_out, "merge", merge_files, Json::object(), pretty);
        } else if (*reduce) {
            Multigraph g = load_graph(read_file(red_graph));
            std::vector<int> seq = parse_sequence(red_seq);
            ReductionReport rep = run_method1(g, seq);
            Json j = report_to_json(rep);
            if (red_groth) j["grothendieck"] = grothendieck_render(rep);
            if (!red_certify.empty()) {
                Json cert = Json::object();
                PolySystem sys = psi_system(g, seq);
                for (int qv : parse_sequence(red_certify)) {
                    FieldArg fa{std::uint64_t(qv)};
                    Field f = fa.make();
                    bool ok = certify_report(rep, sys, f);
                    cert[std::to_string(qv)] = ok;
                    if (!ok)
                        throw internal_error("reduction certification failed at q=" +
                                             std::to_string(qv));
                }
                j["certified"] = std::move(cert);
            }
            emit(j, red_out, "reduce", {red_graph},
                 Json{{"sequence", red_seq}, {"certify", red_certify}}, pretty);
        } else if (*redsys) {
            PolySystem sys = load_system(read_file(rs_sys));
            Reducer red;
            ReductionReport rep = red.reduce(sys);
            Json j = report_to_json(rep);
            if (!rs_certify.empty()) {
                Json cert = Json::object();
                for (int qv : parse_sequence(rs_certify)) {
                    FieldArg fa{std::uint64_t(qv)};
                    Field f = fa.make();
                    bool ok = certify_report(rep, sys, f);
                    cert[std::to_string(qv)] = ok;
                    if (!ok)
                        throw internal_error("reduction certification failed at q=" +
                                             std::to_string(qv));
                }
                j["certified"] = std::move(cert);
            }
            emit(j, rs_out, "reduce-system", {rs_sys}, Json{{"certify", rs_certify}}, pretty);
        } else if (*interp) {
            auto samples = parse_samples(read_file(in_samples));
            ReconstructOptions opt;
            opt.drop_prime_2 = in_drop2;
            opt.require_monic_top = !in_loose;
            std::vector<QPoly> cands;
            if (!in_class.empty())
                cands = residue_class_reconstruct(samples, in_class[0], in_class[1],
                                                  in_degree, opt);
            else
                cands = crt_reconstruct(samples, in_degree, opt);
            Json j;
            Json arr = Json::array();
            for (auto& c : cands) {
                Json e = qpoly_to_json(c);
                Json checks = Json::object();
                for (auto& s : samples)
                    checks[std::to_string(s.q)] =
                        c.eval(Int(static_cast<unsigned long>(s.q))) == s.nbar;
                e["residue_checks"] = std::move(checks);
                arr.push_back(std::move(e));
            }
            j["candidates"] = std::move(arr);
            j["polynomial"] = !cands.empty();
            emit(j, in_out, "interp", {in_samples},
                 Json{{"degree", in_degree}, {"drop2", in_drop2}}, pretty);
        } else if (*zeta) {
            std::vector<std::string> names{"q"};
            SparsePoly p = parse_poly(z_poly, names);
            if (names.size() > 1) throw input_error("zeta: polynomial must be in q alone");
            QPoly nbar;
            for (auto& t : p.terms()) {
                std::uint32_t e = t.first.deg_in(1);
                if (nbar.c.size() <= e) nbar.c.resize(e + 1, Int(0));
                nbar.c[e] = t.second;
            }
            nbar.trim();
            auto factors = zeta_function(nbar);
            Json j;
            Json arr = Json::array();
            for (auto& f : factors)
                if (f.exponent != 0) arr.push_back({f.k, f.exponent.get_str()});
            j["factors"] = std::move(arr);
            j["zeta"] = zeta_to_string(factors);
            emit(j, z_out, "zeta", {}, Json{{"nbar", z_poly}}, pretty);
        } else if (*amp) {
            Multigraph g = load_graph(read_file(amp_graph));
            TheoryConfig th;
            th.mass_squared = amp_m2;
            if (!amp_metric.empty()) {
                for (int v : parse_sequence(amp_metric)) th.metric.push_back(v);
            }
            Json rows = Json::array();
            for (std::uint32_t d : amp_ds) {
                th.d = d;
                if (!th.metric.empty() && th.metric.size() != d)
                    throw input_error("metric length must equal d");
                for (std::uint64_t qv : amp_qs) {
                    Field f = FieldArg{qv}.make();
                    Amplitude a = amplitude(g, th, f);
                    auto pred = vanishing_predicate(g, d, f->q());
                    Json row;
                    row["d"] = d;
                    row["q"] = f->q();
                    row["c"] = superficial_degree(g, d);
                    row["criterion"] =
                        std::int64_t(f->q() - 1) * superficial_degree(g, d) +
                        2 * g.edge_count();
                    row["predicate"] = pred ? Json(*pred) : Json("unavailable");
                    row["value"] = a.value.idx;
                    row["tree_convention"] = a.tree_convention;
                    rows.push_back(std::move(row));
                }
            }
            Json j;
            j["table"] = std::move(rows);
            emit(j, amp_out, "amplitude", {amp_graph},
                 Json{{"m2", amp_m2}, {"metric", amp_metric}}, pretty);
        } else if (*corpus) {
            Json arr = Json::array();
            for (auto& g : exhaustive_corpus(corpus_max)) arr.push_back(graph_to_json(g));
            if (corpus_sample > 0)
                for (auto& g :
                     sampled_corpus(corpus_min, corpus_smax, corpus_sample, corpus_seed))
                    arr.push_back(graph_to_json(g));
            Json j;
            j["graphs"] = std::move(arr);
            emit(j, corpus_out, "corpus", {},
                 Json{{"max_edges", corpus_max}, {"sample", corpus_sample}}, pretty);
        } else if (*r4) {
            auto rows = result4_scan(r4_pmax);
            Json arr = Json::array();
            double max_ratio = 0;
            bool all_ok = true;
            for (auto& r : rows) {
                Json e;
                e["p"] = r.p;
                e["nbar"] = r.nbar;
                e["nbar_mod_p"] = r.nbar_mod_p;
                e["k"] = r.k;
                e["ratio"] = r.ratio;
                e["pattern_ok"] = r.pattern_ok;
                if (!r.pattern_ok) all_ok = false;
                max_ratio = std::max(max_ratio, r.ratio);
                arr.push_back(std::move(e));
            }
            Json j;
            j["rows"] = std::move(arr);
            j["max_ratio"] = max_ratio;
            j["all_pattern_ok"] = all_ok;
            emit(j, r4_out, "result4", {}, Json{{"pmax", r4_pmax}}, pretty);
        } else if (*replay) {
            Json m = Json::parse(read_file(replay_manifest));
            // verify the recorded inputs still hash identically
            for (auto& [path, hash] : m["inputs"].items()) {
                std::string content = read_file(path);
                std::uint64_t h = 1469598103934665603ull;
                for (unsigned char c : content) {
                    h ^= c;
                    h *= 1099511628211ull;
                }
                char buf[17];
                std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
                if (hash.get<std::string>() != buf)
                    throw internal_error("replay: input file changed: " + path);
            }
            std::cout << "{\"inputs_match\": true, \"command\": "
                      << m["command"].dump() << "}\n";
        }
        return 0;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const budget_error& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return 3;
    } catch (const internal_error& e) {
        std::cerr << "internal consistency: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
