#pragma once

// JSON serialization of reports. Coordinates print as strings: the literal
// grammar in exact mode, 17-significant-digit decimals in approximate mode.

#include "io.hpp"
#include "saddle.hpp"
#include "verify.hpp"

namespace flatsys {

template <class R>
std::string coord_string(const R& v) {
    if constexpr (scalar_traits<R>::exact) return v.to_literal();
    else return detail::format_decimal(v);
}

template <class R>
json holonomy_json(const Vec2<R>& v) {
    return json::array({coord_string(v.x), coord_string(v.y)});
}

template <class R>
json connection_json(const SaddleConnection<R>& c) {
    json j;
    j["start"] = c.start_class;
    j["end"] = c.end_class;
    j["holonomy"] = holonomy_json(c.holonomy);
    j["length"] = c.length;
    return j;
}

template <class R>
json systole_json(const SystoleReport<R>& rep) {
    json j;
    j["schema_version"] = 1;
    j["systole"] = rep.systole;
    j["count"] = rep.count;
    j["exact"] = rep.exact;
    json arr = json::array();
    for (const auto& c : rep.shortest) arr.push_back(connection_json(c));
    j["shortest"] = arr;
    return j;
}

template <class R>
json triangulation_json(const Triangulation<R>& T) {
    json j;
    j["schema_version"] = 1;
    j["triangle_count"] = T.triangle_count();
    j["edge_count"] = T.edge_count;
    j["flips"] = T.flips_performed;
    json tris = json::array();
    for (int ti = 0; ti < T.triangle_count(); ++ti) {
        const auto& t = T.tris[ti];
        json tj;
        tj["vertices"] = t.vclass;
        json hols = json::array();
        for (int k = 0; k < 3; ++k) hols.push_back(holonomy_json(t.hol[k]));
        tj["holonomies"] = hols;
        json nbrs = json::array();
        json stats = json::array();
        json eids = json::array();
        for (int k = 0; k < 3; ++k) {
            nbrs.push_back({t.nbr[k].tri, t.nbr[k].k});
            stats.push_back(to_string(T.status(t.edge[k])));
            eids.push_back(t.edge[k]);
        }
        tj["neighbors"] = nbrs;
        tj["edges"] = eids;
        tj["status"] = stats;
        tris.push_back(tj);
    }
    j["triangles"] = tris;
    return j;
}

inline json deformation_json(const Deformation& d) {
    json arr = json::array();
    for (const auto& v : d) arr.push_back({v.x, v.y});
    return arr;
}

inline json probe_json(const ProbeReport& rep) {
    json j;
    j["schema_version"] = 1;
    j["baseline_normalized_systole"] = rep.baseline;
    j["verdict"] = rep.improvement_found ? "improvement-found" : "no-improvement-found";
    j["skipped"] = rep.skipped;
    if (rep.witness) j["witness"] = deformation_json(*rep.witness);
    json arr = json::array();
    for (const auto& t : rep.trials) {
        json tj;
        tj["step"] = t.step;
        tj["seed"] = t.seed;
        tj["skipped"] = t.skipped;
        if (!t.skipped) {
            tj["normalized_systole"] = t.normalized_systole;
            tj["delta"] = t.delta;
        }
        arr.push_back(tj);
    }
    j["trials"] = arr;
    return j;
}

inline json rigidity_json(const RigidityReport& rep) {
    json j;
    j["schema_version"] = 1;
    j["verdict"] = rep.infinitesimally_rigid ? "infinitesimally-rigid" : "kernel-found";
    j["kernel_dimension"] = rep.kernel_dim;
    j["rows"] = rep.rows;
    json ker = json::array();
    for (const auto& d : rep.kernel) ker.push_back(deformation_json(d));
    j["kernel"] = ker;
    return j;
}

template <class R>
json kissing_json(const KissingAudit& k, const SurfaceAnalysis<R>& A) {
    json j;
    j["schema_version"] = 1;
    j["count"] = k.count;
    j["bound"] = k.bound;
    j["equality"] = k.equality;
    j["verdict"] = (k.within_bound && k.matches_global_max) ? "certified" : "violated";
    j["stratum"] = A.surface.stratum().str();
    return j;
}

}  // namespace flatsys
