#include <nbar/io.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nbar {

namespace {

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return buf;
}

}  // namespace

Json graph_to_json(const Multigraph& g) {
    Json j;
    j["vertices"] = g.vertex_count;
    auto edges = g.edges;
    std::sort(edges.begin(), edges.end(), [](auto& a, auto& b) { return a.id < b.id; });
    Json arr = Json::array();
    for (auto& e : edges) arr.push_back({e.a, e.b});
    j["edges"] = std::move(arr);
    return j;
}

Multigraph graph_from_json(const Json& j) {
    Multigraph g;
    if (!j.contains("vertices") || !j.contains("edges"))
        throw input_error("graph json: need 'vertices' and 'edges'");
    g.vertex_count = j["vertices"].get<int>();
    int id = 1;
    for (auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2) throw input_error("graph json: bad edge");
        g.edges.push_back({e[0].get<int>(), e[1].get<int>(), id++});
    }
    g.validate();
    return g;
}

Multigraph load_graph(const std::string& text) {
    for (char c : text) {
        if (std::isspace((unsigned char)c)) continue;
        if (c == '{') return graph_from_json(Json::parse(text));
        break;
    }
    return parse_graph_text(text);
}

Json poly_to_json(const SparsePoly& f) {
    Json terms = Json::array();
    for (auto& t : f.terms()) {
        Json vars = Json::object();
        for (auto& vp : t.first.vp) vars["x" + std::to_string(vp.var)] = vp.exp;
        terms.push_back({{"coeff", t.second.get_str()}, {"vars", std::move(vars)}});
    }
    return Json{{"string", f.str()}, {"terms", std::move(terms)}};
}

SparsePoly poly_from_json(const Json& j) {
    if (j.is_string()) return parse_poly(j.get<std::string>());
    if (j.contains("string")) return parse_poly(j["string"].get<std::string>());
    throw input_error("polynomial json: expected string form");
}

Json system_to_json(const PolySystem& s) {
    Json j;
    j["ambient"] = s.ambient == AmbientKind::Projective ? "projective" : "affine";
    j["nvars"] = s.nvars;
    Json polys = Json::array();
    for (auto& f : s.polys) polys.push_back(f.str());
    j["polynomials"] = std::move(polys);
    return j;
}

PolySystem system_from_json(const Json& j) {
    PolySystem s;
    std::string amb = j.value("ambient", "projective");
    if (amb == "projective") s.ambient = AmbientKind::Projective;
    else if (amb == "affine") s.ambient = AmbientKind::Affine;
    else throw input_error("system json: ambient must be 'projective' or 'affine'");
    if (!j.contains("polynomials")) throw input_error("system json: missing 'polynomials'");
    Var maxv = 0;
    for (auto& p : j["polynomials"]) {
        s.polys.push_back(parse_poly(p.get<std::string>()));
        for (Var v : s.polys.back().variables()) maxv = std::max(maxv, v);
    }
    s.nvars = j.value("nvars", maxv);
    s.validate();
    return s;
}

PolySystem load_system(const std::string& text) {
    for (char c : text) {
        if (std::isspace((unsigned char)c)) continue;
        if (c == '{') return system_from_json(Json::parse(text));
        break;
    }
    // bare polynomial (one per line): projective system
    PolySystem s;
    std::istringstream in(text);
    std::string line;
    Var maxv = 0;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace((unsigned char)c)) blank = false;
        if (blank) continue;
        s.polys.push_back(parse_poly(line));
        for (Var v : s.polys.back().variables()) maxv = std::max(maxv, v);
    }
    if (s.polys.empty()) throw input_error("system: no polynomials found");
    s.nvars = maxv;
    s.ambient = AmbientKind::Projective;
    s.validate();
    return s;
}

Json qpoly_to_json(const QPoly& p) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < p.c.size(); i++)
        if (p.c[i] != 0) arr.push_back({p.c[i].get_str(), i});
    return Json{{"coeffs", std::move(arr)}, {"string", p.str()}};
}

QPoly qpoly_from_json(const Json& j) {
    QPoly p;
    const Json& arr = j.contains("coeffs") ? j["coeffs"] : j;
    for (auto& pair : arr) {
        std::uint32_t pow = pair[1].get<std::uint32_t>();
        if (p.c.size() <= pow) p.c.resize(pow + 1, Int(0));
        p.c[pow] = Int(pair[0].get<std::string>());
    }
    p.trim();
    return p;
}

Json ucoeff_to_json(const UCoeff& c) {
    Json j;
    j["plain"] = qpoly_to_json(c.plain);
    if (!c.units.empty()) {
        Json units = Json::object();
        for (auto& [u, p] : c.units) units[u.get_str()] = qpoly_to_json(p);
        j["units"] = std::move(units);
    }
    return j;
}

Json report_to_json(const ReductionReport& r) {
    Json j;
    Json resolved = Json::array();
    for (std::size_t i = 0; i < r.resolved.c.size(); i++)
        if (r.resolved.c[i] != 0) resolved.push_back({r.resolved.c[i].get_str(), i});
    j["resolved"] = std::move(resolved);
    j["resolved_string"] = r.resolved.str();
    Json residuals = Json::array();
    for (auto& res : r.residuals) {
        Json e;
        e["coeff"] = ucoeff_to_json(res.coeff);
        e["system"] = system_to_json(res.sys);
        e["kind"] = res.kind;
        residuals.push_back(std::move(e));
    }
    j["residuals"] = std::move(residuals);
    Json trace = Json::array();
    for (auto& t : r.trace) {
        Json e;
        e["rule"] = t.rule;
        e["system"] = to_hex(t.sys_hash);
        if (!t.note.empty()) e["note"] = t.note;
        trace.push_back(std::move(e));
    }
    j["trace"] = std::move(trace);
    j["fully_resolved"] = r.fully_resolved();
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write file: " + path);
    out << content;
}

}  // namespace nbar
