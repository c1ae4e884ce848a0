#ifndef NBAR_IO_HPP
#define NBAR_IO_HPP

#include <nbar/count.hpp>
#include <nbar/graph.hpp>
#include <nbar/interp.hpp>
#include <nbar/reduce.hpp>

#include <json.hpp>

#include <string>

namespace nbar {

using Json = nlohmann::json;

// graphs: {"vertices": n, "edges": [[u,w],...]} (ids are 1-based list order)
Json graph_to_json(const Multigraph& g);
Multigraph graph_from_json(const Json& j);
// accepts either the JSON form or the "v n" text form
Multigraph load_graph(const std::string& text);

// polynomials: canonical string or term-list round trip
Json poly_to_json(const SparsePoly& f);
SparsePoly poly_from_json(const Json& j);

// systems: {"ambient": "projective"|"affine", "nvars": n, "polynomials": [...]}
Json system_to_json(const PolySystem& s);
PolySystem system_from_json(const Json& j);
PolySystem load_system(const std::string& text);

Json qpoly_to_json(const QPoly& p);
QPoly qpoly_from_json(const Json& j);

Json ucoeff_to_json(const UCoeff& c);
Json report_to_json(const ReductionReport& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace nbar

#endif
