// flatsys: systole computation and extremality certification for translation
// surfaces given as polygon gluings (.tsf files).
//
// Subcommands: systole, enumerate, delaunay, verify, example, construct,
// surgery. JSON reports go to stdout, a human summary to stderr. Exit codes:
// 0 = certified / ok, 1 = violated / improvement found, 2 = input error.

#include "flatsys/extremal.hpp"
#include "flatsys/reports.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace flatsys;

namespace {

long long budget_from_env(long long flag_value) {
    if (const char* env = std::getenv("FLATSYS_BUDGET")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return flag_value;
}

void emit(const json& j, const std::string& summary) {
    std::cout << j.dump(2) << "\n";
    std::cerr << summary << "\n";
}

std::vector<double> parse_steps(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw io_error("empty step list");
    return out;
}

std::vector<int> parse_orders(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    if (out.empty()) throw io_error("empty stratum signature");
    return out;
}

CylinderSpec parse_cylinder(const std::string& s) {
    auto bar = s.find('/');
    if (bar == std::string::npos) throw io_error("cylinder spec must be top/bottom");
    auto split = [](const std::string& part) {
        std::vector<std::string> labels;
        std::stringstream ss(part);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) labels.push_back(item);
        }
        if (labels.size() <= 1 && !part.empty() && part.find(',') == std::string::npos) {
            labels.clear();
            for (char c : part) labels.push_back(std::string(1, c));
        }
        return labels;
    };
    return CylinderSpec{split(s.substr(0, bar)), split(s.substr(bar + 1))};
}

// realize the idx-th shortest connection as an edge pair or a polygon chord
Slit slit_from_index(const QSurface& s, int idx) {
    Triangulation<QScalar> T0 = triangulate(s);
    auto rep = systole(T0);
    if (idx < 0 || idx >= rep.count)
        throw io_error("slit index out of range (surface has " + std::to_string(rep.count) +
                       " shortest connections)");
    const auto& c = rep.shortest[idx];
    if (c.along_edge) {
        if (T0.edge_is_boundary[c.edge_id]) {
            // map the triangulation edge back to the surface gluing pair
            HalfEdge h = T0.edge_rep[c.edge_id];
            for (size_t p = 0; p < T0.polygon_edge.size(); ++p)
                for (size_t e = 0; e < T0.polygon_edge[p].size(); ++e)
                    if (T0.polygon_edge[p][e] == h || T0.partner(T0.polygon_edge[p][e]) == h) {
                        EdgeRef er{static_cast<int>(p), static_cast<int>(e)};
                        for (size_t i = 0; i < s.gluing_pairs().size(); ++i)
                            if (s.gluing_pairs()[i].first == er || s.gluing_pairs()[i].second == er)
                                return Slit{s, SlitRef{true, static_cast<int>(i), -1, -1, -1}};
                    }
            throw io_error("internal: boundary edge not found in gluing");
        }
        HalfEdge h = T0.edge_rep[c.edge_id];
        int poly = T0.tri_polygon[h.tri];
        return Slit{s, SlitRef{false, -1, poly, T0.tri_corner[h.tri][h.k],
                               T0.tri_corner[h.tri][(h.k + 1) % 3]}};
    }
    // general connection: realizable when it stays inside one polygon
    int poly = -1;
    for (const auto& x : c.crossings) {
        HalfEdge h = x;
        if (T0.edge_is_boundary[T0.tris[h.tri].edge[h.k]])
            throw io_error("slit crosses a gluing edge; only edge/chord slits are supported");
        if (poly < 0) poly = T0.tri_polygon[h.tri];
        else if (poly != T0.tri_polygon[h.tri])
            throw io_error("slit crosses several polygons; not realizable as a chord");
    }
    int u = T0.tri_corner[c.start_corner.tri][c.start_corner.k];
    int v = T0.tri_corner[c.end_corner.tri][c.end_corner.k];
    return Slit{s, SlitRef{false, -1, poly, u, v}};
}

int run(int argc, char** argv) {
    CLI::App app{"systole and extremality toolkit for translation surfaces"};
    app.require_subcommand(1);
    long long budget = kDefaultNodeBudget;
    unsigned long long seed = 0;
    double tau = 1e-9;
    app.add_option("--budget", budget, "node budget for saddle connection enumeration");
    app.add_option("--seed", seed, "seed for randomized operations");
    app.add_option("--tau", tau, "approximate-mode comparison tolerance");

    std::string file, file_b, out_path, check, steps_str = "1e-3,1e-4";
    double lmax = 1.0, step_single = 0;
    int trials = 100, slit_a = 0, slit_b = 0;
    std::string name, stratum_str, cylinder_str, pair_str;

    auto* c_sys = app.add_subcommand("systole", "systole and all shortest connections");
    c_sys->add_option("file", file)->required();

    auto* c_enum = app.add_subcommand("enumerate", "saddle connections up to --lmax");
    c_enum->add_option("file", file)->required();
    c_enum->add_option("--lmax", lmax, "length bound")->required();

    auto* c_del = app.add_subcommand("delaunay", "Delaunay triangulation by edge flips");
    c_del->add_option("file", file)->required();

    auto* c_ver = app.add_subcommand("verify", "certification checks");
    c_ver->add_option("file", file)->required();
    c_ver->add_option("--check", check, "global|local-criterion|kissing|rigidity|probe")
        ->required();
    c_ver->add_option("--trials", trials, "probe trials per step");
    c_ver->add_option("--step", steps_str, "comma-separated probe steps");
    c_ver->add_option("--steps", steps_str, "alias of --step");

    auto* c_ex = app.add_subcommand("example", "built-in example surfaces");
    c_ex->add_option("name", name, "s4|s22|s20|s1100|s110|nonrigid_h2|nonrigid_h000|"
                                   "square_torus|triangle_torus|rigid_family_N")
        ->required();
    c_ex->add_option("-o,--output", out_path, "write .tsf here");

    auto* c_con = app.add_subcommand("construct", "global maximum in a stratum");
    c_con->add_option("--stratum", stratum_str, "orders, e.g. 2,0")->required();
    c_con->add_option("--cylinder", cylinder_str, "one-cylinder spec top/bottom, e.g. abc/cba");
    c_con->add_option("--pair", pair_str, "indices i,j: join the i-th and j-th singularities");
    c_con->add_option("-o,--output", out_path, "write .tsf here");

    auto* c_sur = app.add_subcommand("surgery", "slit-glue two surfaces");
    c_sur->add_option("a", file)->required();
    c_sur->add_option("b", file_b)->required();
    c_sur->add_option("--slit-a", slit_a, "index into A's shortest connections")->required();
    c_sur->add_option("--slit-b", slit_b, "index into B's shortest connections")->required();
    c_sur->add_option("-o,--output", out_path, "write .tsf here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    budget = budget_from_env(budget);
    scalar_traits<double>::tau = tau;

    auto load = [&](const std::string& path) { return load_surface(path); };

    if (c_sys->parsed() || c_enum->parsed() || c_del->parsed()) {
        AnySurface any = load(file);
        return std::visit(
            [&](auto& s) -> int {
                if (c_sys->parsed()) {
                    auto rep = systole(s, budget);
                    json j = systole_json(rep);
                    j["surface"] = s.name();
                    j["stratum"] = s.stratum().str();
                    emit(j, "systole " + std::to_string(rep.systole) + " realized by " +
                                std::to_string(rep.count) + " connections");
                } else if (c_enum->parsed()) {
                    auto conns = enumerate_saddle_connections(s, lmax, budget);
                    json j;
                    j["schema_version"] = 1;
                    j["lmax"] = lmax;
                    j["count"] = conns.size();
                    json arr = json::array();
                    for (const auto& c : conns) arr.push_back(connection_json(c));
                    j["connections"] = arr;
                    emit(j, std::to_string(conns.size()) + " connections up to length " +
                                std::to_string(lmax));
                } else {
                    auto T = flip_to_delaunay(triangulate(s), static_cast<unsigned>(seed));
                    json j = triangulation_json(T);
                    emit(j, "Delaunay triangulation: " + std::to_string(T.triangle_count()) +
                                " triangles, " + std::to_string(T.flips_performed) + " flips");
                }
                return 0;
            },
            any);
    }

    if (c_ver->parsed()) {
        AnySurface any = load(file);
        bool exact = std::holds_alternative<Surface<QScalar>>(any);
        if (check == "global" || check == "local-criterion" || check == "probe") {
            if (!exact) throw io_error("check '" + check + "' requires an exact surface file");
            auto A = analyze(std::get<Surface<QScalar>>(any), budget);
            if (check == "global" || check == "local-criterion") {
                Verdict v = check == "global" ? check_global_max(A) : check_local_max_criterion(A);
                json j;
                j["schema_version"] = 1;
                j["check"] = check;
                j["verdict"] = v.pass ? "certified" : "violated";
                j["detail"] = v.detail;
                j["stratum"] = A.surface.stratum().str();
                emit(j, check + ": " + (v.pass ? "certified" : "violated") + " (" + v.detail + ")");
                return v.pass ? 0 : 1;
            }
            auto rep = perturbation_probe(A, parse_steps(steps_str), trials, seed);
            json j = probe_json(rep);
            j["check"] = "probe";
            emit(j, std::string("probe: ") +
                        (rep.improvement_found ? "improvement-found" : "no-improvement-found"));
            return rep.improvement_found ? 1 : 0;
        }
        if (check == "kissing" || check == "rigidity") {
            return std::visit(
                [&](auto& s) -> int {
                    auto A = analyze(s, budget);
                    if (check == "kissing") {
                        auto k = kissing_audit(A);
                        json j = kissing_json(k, A);
                        emit(j, "kissing: " + std::to_string(k.count) + " of bound " +
                                    std::to_string(k.bound));
                        return (k.within_bound && k.matches_global_max) ? 0 : 1;
                    }
                    auto r = first_order_rigidity(A);
                    json j = rigidity_json(r);
                    j["check"] = "rigidity";
                    emit(j, std::string("rigidity: ") +
                                (r.infinitesimally_rigid ? "infinitesimally-rigid"
                                                         : "kernel-found (dim " +
                                                               std::to_string(r.kernel_dim) + ")"));
                    return r.infinitesimally_rigid ? 0 : 1;
                },
                any);
        }
        throw io_error("unknown check: " + check);
    }

    if (c_ex->parsed()) {
        std::optional<QSurface> s;
        if (name == "square_torus") {
            s = one_cylinder_origami(CylinderSpec{{"a"}, {"a"}}, QScalar(1), "square_torus");
        } else if (name == "triangle_torus") {
            s = shear_to_equilateral(
                one_cylinder_origami(CylinderSpec{{"a"}, {"a"}}, QScalar(1), "triangle_torus"));
        } else if (name.rfind("rigid_family_", 0) == 0) {
            s = rigid_family(std::stoi(name.substr(13))).surface;
        } else {
            s = named_example(name);
        }
        json j = surface_to_json(*s);
        if (!out_path.empty()) save_surface(*s, out_path);
        emit(j, "example " + name + " -> " + s->stratum().str() +
                    (out_path.empty() ? "" : (" written to " + out_path)));
        return 0;
    }

    if (c_con->parsed()) {
        std::optional<CylinderSpec> cyl;
        if (!cylinder_str.empty()) cyl = parse_cylinder(cylinder_str);
        std::optional<std::pair<int, int>> pr;
        if (!pair_str.empty()) {
            auto v = parse_orders(pair_str);
            if (v.size() != 2) throw io_error("--pair needs two indices");
            pr = std::make_pair(v[0], v[1]);
        }
        auto res = global_max_surface(parse_orders(stratum_str), pr, cyl);
        json j = surface_to_json(res.surface);
        if (!out_path.empty()) save_surface(res.surface, out_path);
        emit(j, "constructed global maximum in " + res.surface.stratum().str());
        return 0;
    }

    if (c_sur->parsed()) {
        AnySurface any_a = load(file), any_b = load(file_b);
        if (!std::holds_alternative<Surface<QScalar>>(any_a) ||
            !std::holds_alternative<Surface<QScalar>>(any_b))
            throw io_error("surgery requires exact surface files");
        QSurface A = std::get<Surface<QScalar>>(any_a);
        QSurface B = std::get<Surface<QScalar>>(any_b);
        Slit sa = slit_from_index(A, slit_a);
        Slit sb = slit_from_index(B, slit_b);
        QVec ha = slit_holonomy(sa.surface, sa.ref);
        QVec hb = slit_holonomy(sb.surface, sb.ref);
        if (!(ha == hb || ha == -hb)) {
            auto rot = rotate_to_match(sb.surface, hb, ha);
            if (!rot) throw io_error("slit holonomies cannot be aligned by a 60-degree rotation");
            sb.surface = *rot;
        }
        QSurface out = slit_glue(sa, sb, A.name() + "+" + B.name());
        json j = surface_to_json(out);
        if (!out_path.empty()) save_surface(out, out_path);
        emit(j, "surgery -> " + out.stratum().str() + ", genus " + std::to_string(out.genus()));
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
