#pragma once

// Surface file format (.tsf): a JSON document
//   { "polygons": [ { "vertices": [["0","0"],["1","0"],["1/2","1/2 r3"]] }, ... ],
//     "gluings":  [ [[p,e],[p',e']], ... ],
//     "name":     "optional" }
// Exact files use the coordinate literal grammar; approximate files use
// decimal coordinates with 17 significant digits. Unknown fields are rejected.

#include "surface.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

namespace flatsys {

using json = nlohmann::ordered_json;

struct io_error : std::runtime_error {
    explicit io_error(const std::string& m) : std::runtime_error(m) {}
};

using AnySurface = std::variant<Surface<QScalar>, Surface<double>>;

namespace detail {

inline bool looks_decimal(const std::string& s) {
    return s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
           s.find('E') != std::string::npos;
}

inline std::string format_decimal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <class R>
json surface_to_json_impl(const Surface<R>& s) {
    json doc;
    json polys = json::array();
    for (const auto& p : s.polygons()) {
        json verts = json::array();
        for (const auto& v : p.vertices) {
            if constexpr (scalar_traits<R>::exact)
                verts.push_back({v.x.to_literal(), v.y.to_literal()});
            else
                verts.push_back({format_decimal(v.x), format_decimal(v.y)});
        }
        polys.push_back({{"vertices", verts}});
    }
    doc["polygons"] = polys;
    json glu = json::array();
    for (const auto& pr : s.gluing_pairs())
        glu.push_back({{pr.first.poly, pr.first.edge}, {pr.second.poly, pr.second.edge}});
    doc["gluings"] = glu;
    if (!s.name().empty()) doc["name"] = s.name();
    return doc;
}

}  // namespace detail

inline json surface_to_json(const Surface<QScalar>& s) { return detail::surface_to_json_impl(s); }
inline json surface_to_json(const Surface<double>& s) { return detail::surface_to_json_impl(s); }

inline std::string serialize_surface(const Surface<QScalar>& s) {
    return surface_to_json(s).dump(2) + "\n";
}
inline std::string serialize_surface(const Surface<double>& s) {
    return surface_to_json(s).dump(2) + "\n";
}

inline AnySurface parse_surface_json(const json& doc) {
    if (!doc.is_object()) throw io_error("surface document must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (it.key() != "polygons" && it.key() != "gluings" && it.key() != "name")
            throw io_error("unknown field '" + it.key() + "' in surface document");
    }
    if (!doc.contains("polygons") || !doc.contains("gluings"))
        throw io_error("surface document needs 'polygons' and 'gluings'");

    std::string name;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw io_error("'name' must be a string");
        name = doc["name"].get<std::string>();
    }

    // collect coordinate strings first to decide the numeric mode
    std::vector<std::vector<std::pair<std::string, std::string>>> coords;
    bool approx = false;
    for (const auto& pj : doc["polygons"]) {
        if (!pj.is_object() || !pj.contains("vertices"))
            throw io_error("each polygon needs a 'vertices' array");
        for (auto it = pj.begin(); it != pj.end(); ++it)
            if (it.key() != "vertices") throw io_error("unknown polygon field '" + it.key() + "'");
        coords.emplace_back();
        for (const auto& vj : pj["vertices"]) {
            if (!vj.is_array() || vj.size() != 2)
                throw io_error("vertex must be a [x, y] pair of strings");
            std::string xs, ys;
            if (vj[0].is_string()) xs = vj[0].get<std::string>();
            else if (vj[0].is_number()) { xs = vj[0].dump(); approx = true; }
            else throw io_error("vertex coordinate must be a string");
            if (vj[1].is_string()) ys = vj[1].get<std::string>();
            else if (vj[1].is_number()) { ys = vj[1].dump(); approx = true; }
            else throw io_error("vertex coordinate must be a string");
            approx = approx || detail::looks_decimal(xs) || detail::looks_decimal(ys);
            coords.back().emplace_back(std::move(xs), std::move(ys));
        }
    }

    std::vector<std::pair<EdgeRef, EdgeRef>> pairs;
    for (const auto& gj : doc["gluings"]) {
        if (!gj.is_array() || gj.size() != 2 || !gj[0].is_array() || gj[0].size() != 2 ||
            !gj[1].is_array() || gj[1].size() != 2)
            throw io_error("gluings must be [[p,e],[p',e']] pairs");
        pairs.push_back({EdgeRef{gj[0][0].get<int>(), gj[0][1].get<int>()},
                         EdgeRef{gj[1][0].get<int>(), gj[1][1].get<int>()}});
    }

    try {
        if (approx) {
            std::vector<PolygonSpec<double>> ps;
            for (const auto& pc : coords) {
                PolygonSpec<double> p;
                for (const auto& [xs, ys] : pc)
                    p.vertices.push_back({std::stod(xs), std::stod(ys)});
                ps.push_back(std::move(p));
            }
            return Surface<double>(std::move(ps), std::move(pairs), name);
        }
        std::vector<PolygonSpec<QScalar>> ps;
        for (const auto& pc : coords) {
            PolygonSpec<QScalar> p;
            for (const auto& [xs, ys] : pc)
                p.vertices.push_back({parse_coord_literal(xs), parse_coord_literal(ys)});
            ps.push_back(std::move(p));
        }
        return Surface<QScalar>(std::move(ps), std::move(pairs), name);
    } catch (const std::invalid_argument& e) {
        throw io_error(std::string("bad coordinate: ") + e.what());
    }
}

inline AnySurface parse_surface(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw io_error(std::string("invalid JSON: ") + e.what());
    }
    return parse_surface_json(doc);
}

inline AnySurface load_surface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_surface(ss.str());
}

template <class R>
void save_surface(const Surface<R>& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write file: " + path);
    out << serialize_surface(s);
}

}  // namespace flatsys
