#include "harmonic/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace harmonic::io {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_error(const std::string& msg)
{
    throw Error(ErrorCode::Parse, msg);
}

std::int64_t parse_int(std::string_view s, const std::string& context)
{
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        parse_error("invalid integer '" + std::string(s) + "' in " + context);
    }
    return v;
}

double parse_number(std::string_view s, const std::string& context)
{
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
        parse_error("invalid number '" + std::string(s) + "' in " + context);
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    for (;;) {
        auto next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (next == std::string_view::npos) {
            return parts;
        }
        pos = next + 1;
    }
}

json parse_json(const std::string& text, const char* what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        parse_error(std::string(what) + ": " + e.what());
    }
}

template <class T>
T get(const json& j, const char* key, const char* what)
{
    if (!j.is_object() || !j.contains(key)) {
        parse_error(std::string(what) + ": missing key '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        parse_error(std::string(what) + ": bad value for '" + key + "': " + e.what());
    }
}

Point json_point(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        parse_error(std::string(what) + ": expected [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Arc json_arc(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        parse_error("arc: expected [theta1, theta2]");
    }
    Arc arc{j[0].get<double>(), j[1].get<double>()};
    arc.validate();
    return arc;
}

json cell_array(const CellIndex& c)
{
    json a = json::array();
    for (int k = 0; k < c.dim; ++k) {
        a.push_back(c[k]);
    }
    return a;
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

CellIndex parse_cell(const std::string& text, char sep)
{
    auto parts = split(text, sep);
    std::vector<std::int64_t> coords;
    for (auto p : parts) {
        coords.push_back(parse_int(p, "cell '" + text + "'"));
    }
    return CellIndex::from_coords(coords);
}

Point parse_point(const std::string& text)
{
    auto parts = split(text, ',');
    if (parts.size() != 2) {
        parse_error("point '" + text + "' must be x,y");
    }
    return {parse_number(parts[0], "point"), parse_number(parts[1], "point")};
}

//---------------------------------------------------------------------------//
// Region JSON
//---------------------------------------------------------------------------//

BoundaryValues read_region_json(const std::string& text)
{
    const char* what = "region JSON";
    auto j = parse_json(text, what);
    int dim = get<int>(j, "dimension", what);
    auto stencil_name = get<std::string>(j, "stencil", what);
    if (stencil_name != "von_neumann" && stencil_name != "moore") {
        parse_error("region JSON: unknown stencil '" + stencil_name + "'");
    }
    auto stencil = stencil_name == "moore" ? Stencil::moore(dim) : Stencil::von_neumann(dim);

    if (!j.contains("interior") || !j.at("interior").is_array()) {
        parse_error("region JSON: 'interior' must be an array");
    }
    std::vector<CellIndex> cells;
    for (const auto& c : j.at("interior")) {
        if (!c.is_array()) {
            parse_error("region JSON: interior cell must be an array");
        }
        std::vector<std::int64_t> coords;
        for (const auto& v : c) {
            if (!v.is_number_integer()) {
                parse_error("region JSON: cell coordinates must be integers");
            }
            coords.push_back(v.get<std::int64_t>());
        }
        cells.push_back(CellIndex::from_coords(coords));
    }
    auto region = build_region(cells, stencil);
    if (!region->discarded().empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "region JSON: interior is not connected (" + std::to_string(region->discarded().size())
                        + " cells unreachable)");
    }
    if (region->interior_size() != cells.size()) {
        throw Error(ErrorCode::InvalidArgument, "region JSON: duplicate interior cells");
    }

    if (!j.contains("boundary") || !j.at("boundary").is_object()) {
        parse_error("region JSON: 'boundary' must be an object");
    }
    std::map<CellIndex, double> values;
    for (const auto& [key, v] : j.at("boundary").items()) {
        if (!v.is_number()) {
            parse_error("region JSON: boundary value for '" + key + "' is not a number");
        }
        auto c = parse_cell(key, ',');
        if (!values.emplace(c, v.get<double>()).second) {
            parse_error("region JSON: duplicate boundary key '" + key + "'");
        }
    }
    return BoundaryValues::from_map(region, values);
}

std::string write_region_json(const BoundaryValues& boundary)
{
    const auto& region = *boundary.region();
    json j;
    j["dimension"] = region.dimension();
    j["stencil"] = region.stencil().name();
    json interior = json::array();
    for (const auto& c : region.interior()) {
        interior.push_back(cell_array(c));
    }
    j["interior"] = std::move(interior);
    json bd = json::object();
    for (std::size_t b = 0; b < region.boundary_size(); ++b) {
        bd[region.boundary()[b].to_string(',')] = boundary[b];
    }
    j["boundary"] = std::move(bd);
    return j.dump() + "\n";
}

//---------------------------------------------------------------------------//
// Field CSV / PGM
//---------------------------------------------------------------------------//

std::string write_field_csv(const ScalarField& field)
{
    const auto& region = field.region_ref();
    std::vector<std::size_t> order(region.cell_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return region.cell(a) < region.cell(b); });
    std::string out = "cell,value\n";
    for (auto i : order) {
        out += region.cell(i).to_string(';');
        out += ',';
        out += format_double(field[i]);
        out += '\n';
    }
    return out;
}

ScalarField read_field_csv(const std::string& text, const RegionPtr& region)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || (line != "cell,value" && line != "cell,value\r")) {
        parse_error("field CSV: expected header 'cell,value'");
    }
    std::vector<double> values(region->cell_count());
    std::vector<bool> seen(region->cell_count(), false);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            parse_error("field CSV: row " + std::to_string(row) + " has no value");
        }
        auto cell = parse_cell(line.substr(0, comma), ';');
        auto idx = region->index_of(cell);
        if (!idx) {
            throw Error(ErrorCode::MissingCell,
                        "field CSV: cell " + cell.to_string(';') + " is not in the region");
        }
        if (seen[*idx]) {
            parse_error("field CSV: duplicate cell " + cell.to_string(';'));
        }
        seen[*idx] = true;
        values[*idx] = parse_number(std::string_view(line).substr(comma + 1), "field CSV");
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw Error(ErrorCode::MissingCell, "field CSV: not every region cell has a value");
    }
    return ScalarField(region, std::move(values));
}

std::string write_field_pgm(const ScalarField& field)
{
    const auto& region = field.region_ref();
    if (region.dimension() != 2) {
        throw Error(ErrorCode::DimensionMismatch, "PGM export needs a 2D region");
    }
    auto [lo_it, hi_it] = std::minmax_element(field.values().begin(), field.values().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::int32_t imin = region.cell(0)[0], imax = imin, jmin = region.cell(0)[1], jmax = jmin;
    for (std::size_t i = 0; i < region.cell_count(); ++i) {
        const auto& c = region.cell(i);
        imin = std::min(imin, c[0]);
        imax = std::max(imax, c[0]);
        jmin = std::min(jmin, c[1]);
        jmax = std::max(jmax, c[1]);
    }
    const auto width = static_cast<std::size_t>(imax - imin + 1);
    const auto height = static_cast<std::size_t>(jmax - jmin + 1);
    std::vector<int> pixels(width * height, 0);
    for (std::size_t i = 0; i < region.cell_count(); ++i) {
        const auto& c = region.cell(i);
        int level = 128;
        if (hi > lo) {
            level = static_cast<int>(std::lround(255.0 * (field[i] - lo) / (hi - lo)));
        }
        auto row = static_cast<std::size_t>(jmax - c[1]);
        auto col = static_cast<std::size_t>(c[0] - imin);
        pixels[row * width + col] = level;
    }
    std::string out = "P2\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t col = 0; col < width; ++col) {
            if (col > 0) out += ' ';
            out += std::to_string(pixels[r * width + col]);
        }
        out += '\n';
    }
    return out;
}

//---------------------------------------------------------------------------//
// Result JSON
//---------------------------------------------------------------------------//

std::string solve_report_json(const SolveReport& report)
{
    json j;
    j["iterations"] = report.iterations;
    j["final_residual_sup"] = report.final_residual_sup;
    j["final_update_sup"] = report.final_update_sup;
    j["converged"] = report.converged;
    if (report.contraction_estimate) {
        j["contraction_estimate"] = *report.contraction_estimate;
    } else {
        j["contraction_estimate"] = nullptr;
    }
    return j.dump();
}

std::string ensemble_json(const WalkEnsembleResult& result, const Region& region)
{
    json j;
    j["start"] = cell_array(result.start);
    j["seed"] = result.seed;
    j["walks"] = result.walks;
    j["truncated"] = result.truncated;
    j["completed"] = result.completed;
    j["estimate"] = result.estimate;
    j["std_error"] = result.std_error;
    json hits = json::object();
    for (std::size_t b = 0; b < result.hits.size(); ++b) {
        hits[region.boundary()[b].to_string(';')] = result.hits[b];
    }
    j["hits"] = std::move(hits);
    return j.dump();
}

std::string harmonic_measure_json(const HarmonicMeasureResult& result,
                                  const std::vector<Arc>& arcs, std::uint64_t seed,
                                  std::uint64_t walks, double tau, Point point)
{
    json j;
    j["point"] = json::array({point.x, point.y});
    j["tau"] = tau;
    j["start"] = cell_array(result.start);
    j["seed"] = seed;
    j["walks"] = walks;
    j["completed"] = result.completed;
    j["truncated"] = result.truncated;
    json list = json::array();
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        json e;
        e["arc"] = json::array({arcs[a].begin, arcs[a].end});
        e["count"] = result.counts[a];
        e["fraction"] = result.fractions[a];
        list.push_back(std::move(e));
    }
    j["arcs"] = std::move(list);
    return j.dump();
}

//---------------------------------------------------------------------------//
// Domain / trace / arcs JSON
//---------------------------------------------------------------------------//

Domain read_domain_json(const std::string& text)
{
    const char* what = "domain JSON";
    auto j = parse_json(text, what);
    auto shape = get<std::string>(j, "shape", what);
    if (shape == "disk") {
        Disk d;
        d.center = json_point(j.contains("center") ? j.at("center") : json::array({0.0, 0.0}), what);
        d.radius = get<double>(j, "radius", what);
        return Domain(d);
    }
    if (shape == "polygon") {
        const auto& vs = j.contains("vertices") ? j.at("vertices") : json();
        if (!vs.is_array()) {
            parse_error("domain JSON: 'vertices' must be an array");
        }
        Polygon p;
        for (const auto& v : vs) {
            p.vertices.push_back(json_point(v, what));
        }
        return Domain(std::move(p));
    }
    parse_error("domain JSON: unknown shape '" + shape + "'");
}

BoundaryTrace read_trace_json(const std::string& text)
{
    const char* what = "trace JSON";
    auto j = parse_json(text, what);
    auto kind = get<std::string>(j, "kind", what);
    if (kind == "constant") {
        return trace::Constant{get<double>(j, "value", what)};
    }
    if (kind == "harmonic_polynomial") {
        trace::HarmonicPolynomial hp;
        hp.degree = get<int>(j, "n", what);
        auto part = j.contains("part") ? get<std::string>(j, "part", what) : std::string("re");
        if (part != "re" && part != "im") {
            parse_error("trace JSON: part must be 're' or 'im'");
        }
        hp.part = part == "re" ? Part::Re : Part::Im;
        if (hp.degree < 0) {
            parse_error("trace JSON: n must be >= 0");
        }
        return hp;
    }
    if (kind == "arc_indicator") {
        return trace::ArcIndicator{json_arc(j.at("arc"))};
    }
    if (kind == "arc_combination") {
        trace::ArcCombination comb;
        if (!j.contains("terms") || !j.at("terms").is_array()) {
            parse_error("trace JSON: 'terms' must be an array");
        }
        for (const auto& t : j.at("terms")) {
            comb.terms.emplace_back(get<double>(t, "coefficient", what), json_arc(t.at("arc")));
        }
        return comb;
    }
    if (kind == "sampled") {
        trace::Sampled s;
        if (!j.contains("table") || !j.at("table").is_array()) {
            parse_error("trace JSON: 'table' must be an array");
        }
        for (const auto& row : j.at("table")) {
            auto p = json_point(row, what);
            s.table.emplace_back(p.x, p.y);
        }
        return s;
    }
    parse_error("trace JSON: unknown kind '" + kind + "'");
}

std::vector<Arc> read_arcs_json(const std::string& text)
{
    auto j = parse_json(text, "arcs JSON");
    if (!j.is_array()) {
        parse_error("arcs JSON: expected an array of [theta1, theta2]");
    }
    std::vector<Arc> arcs;
    for (const auto& a : j) {
        arcs.push_back(json_arc(a));
    }
    return arcs;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    }
    out << contents;
    if (!out) {
        throw Error(ErrorCode::InvalidArgument, "failed writing '" + path + "'");
    }
}

} // namespace harmonic::io
