#include "w4d/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "w4d/deformation.hpp"
#include "w4d/geometry.hpp"
#include "w4d/mesh_io.hpp"
#include "w4d/reduction1d.hpp"

#ifndef W4D_VERSION
#define W4D_VERSION "0.1.0"
#endif

namespace w4d {

namespace fs = std::filesystem;

const char* version() { return W4D_VERSION; }

Command command_from_string(const std::string& s) {
    if (s == "generate") return Command::generate;
    if (s == "analyze") return Command::analyze;
    if (s == "evolve") return Command::evolve;
    if (s == "reduce") return Command::reduce;
    if (s == "export") return Command::export_mesh;
    if (s == "verify") return Command::verify;
    throw ConfigError("unknown command '" + s + "'");
}

std::string to_string(Command c) {
    switch (c) {
        case Command::generate: return "generate";
        case Command::analyze: return "analyze";
        case Command::evolve: return "evolve";
        case Command::reduce: return "reduce";
        case Command::export_mesh: return "export";
        case Command::verify: return "verify";
    }
    return "?";
}

// ------------------------------------------------------------------ config

json default_config() {
    return json::parse(R"({
      "name": "scenario",
      "family": "",
      "representation": "",
      "grid": {"half": 10.0, "n": 128, "periodic": false},
      "params": {},
      "analysis": {"curvatures": null, "numeric": null, "closedness": null, "conformality": null, "K0": 0.0},
      "evolution": {"T": 0.1, "dt": 0.0, "samples": 10, "track_spinors": false, "blowup": 1000.0},
      "reduction": {"kind": "nls", "x0": -20.0, "length": 40.0, "n": 1024, "T": 1.0, "dt": 0.0, "samples": 10},
      "export": {"obj": false, "ply": false, "axes": [0, 1, 2], "stereographic": false, "basename": "surface"},
      "checks": {
        "conformality": 1e-6, "closedness": 1e-6, "minimal_H": 1e-8, "superminimal": 1e-8,
        "constant_h2": 1e-6, "willmore_rtol": 0.01, "dual_formula": 1e-4, "dromion_rtol": 0.01,
        "w_drift": 1e-6, "c1_drift": 1e-6, "soliton_evolution": 1e-3,
        "c1_drift_1d": 1e-8, "sphere": 1e-8, "sphere_motion": 1e-6
      }
    })");
}

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    json file;
    try {
        file = json::parse(is, nullptr, true, true);  // comments allowed
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config '" + path + "' must be a JSON object");
    json cfg = default_config();
    cfg.merge_patch(file);
    return cfg;
}

void apply_override(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must be key.path=value");
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (part.empty()) throw ConfigError("override '" + assignment + "': empty key component");
        if (!node->is_object()) throw ConfigError("override '" + assignment + "': '" + part + "' is not inside an object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        pos = dot + 1;
    }
}

namespace {

struct FamilyInfo {
    std::set<std::string> reps;
    std::set<Command> commands;
    bool surface;  // produces spinors and an immersion
};

// Compatibility table.  Dromion data only carries |p|^2, so it is Willmore-only.
const std::map<std::string, FamilyInfo>& families() {
    using C = Command;
    static const std::map<std::string, FamilyInfo> t = {
        {"minimal", {{"R4", "R22", "R31", "R3", "R21", "R31T"}, {C::generate, C::analyze, C::export_mesh}, true}},
        {"soliton", {{"R4", "R22"}, {C::generate, C::analyze, C::export_mesh, C::evolve}, true}},
        {"constant_h2", {{"R4"}, {C::generate, C::analyze, C::export_mesh}, true}},
        {"constant_p_timelike", {{"R31T"}, {C::generate, C::analyze, C::export_mesh}, true}},
        {"dromion", {{"R31T"}, {C::generate, C::analyze}, false}},
        {"periodic", {{"R4", "R22"}, {C::evolve}, false}},
        {"reduction", {{"R4", "R22", "R31"}, {C::reduce}, false}},
    };
    return t;
}

double num(const json& j, const char* key, double def) {
    if (!j.contains(key) || j[key].is_null()) return def;
    if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

int inum(const json& j, const char* key, int def) {
    if (!j.contains(key) || j[key].is_null()) return def;
    if (!j[key].is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
    return j[key].get<int>();
}

// number or [re, im]
cplx cnum(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("complex value must be a number or [re, im], got " + v.dump());
}

cplx cnum(const json& j, const char* key, cplx def) {
    if (!j.contains(key) || j[key].is_null()) return def;
    return cnum(j[key]);
}

std::vector<cplx> clist(const json& j, const char* key, std::vector<cplx> def) {
    if (!j.contains(key)) return def;
    const json& v = j[key];
    if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an array");
    std::vector<cplx> out;
    for (const auto& e : v) out.push_back(cnum(e));
    return out;
}

int sign_param(const json& p, int def) {
    const int e = inum(p, "eps", def);
    if (e != 1 && e != -1) throw ConfigError("'eps' must be +1 or -1");
    return e;
}

// tri-state toggle: null -> family default
bool toggle(const json& cfg, const char* key, bool def) {
    const json& a = cfg["analysis"];
    if (!a.contains(key) || a[key].is_null()) return def;
    if (!a[key].is_boolean()) throw ConfigError(std::string("analysis.") + key + " must be a boolean");
    return a[key].get<bool>();
}

Grid grid_of(const json& cfg) {
    const json& j = cfg["grid"];
    if (!j.is_object()) throw ConfigError("'grid' must be an object");
    Grid g;
    if (j.contains("x_min")) {
        g.x_min = num(j, "x_min", -1), g.x_max = num(j, "x_max", 1);
        g.y_min = num(j, "y_min", g.x_min), g.y_max = num(j, "y_max", g.x_max);
        g.nx = inum(j, "nx", inum(j, "n", 64)), g.ny = inum(j, "ny", g.nx);
        const bool per = j.value("periodic", false);
        g.periodic_x = j.value("periodic_x", per), g.periodic_y = j.value("periodic_y", per);
    } else {
        g = Grid::box(num(j, "half", 10), inum(j, "n", 128), j.value("periodic", false));
    }
    try {
        g.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    return g;
}

std::string resolved_rep(const json& cfg) {
    const std::string fam = cfg["family"].get<std::string>();
    const json& p = cfg["params"];
    std::string def;
    if (fam == "minimal") def = "R4";
    if (fam == "soliton" || fam == "periodic") def = sign_param(p, -1) < 0 ? "R4" : "R22";
    if (fam == "constant_h2") def = "R4";
    if (fam == "constant_p_timelike" || fam == "dromion") def = "R31T";
    if (fam == "reduction") def = "R4";
    const std::string r = cfg["representation"].is_string() ? cfg["representation"].get<std::string>() : "";
    if (r.empty()) return def;
    if ((fam == "soliton" || fam == "periodic") && r != def)
        throw ConfigError("representation " + r + " does not match eps (eps = -1 -> R4, eps = +1 -> R22)");
    return r;
}

}  // namespace

void validate_config(const json& cfg_in, Command cmd) {
    if (!cfg_in.is_object()) throw ConfigError("config must be an object");
    json cfg = default_config();
    cfg.merge_patch(cfg_in);
    if (!cfg.contains("name") || !cfg["name"].is_string() || cfg["name"].get<std::string>().empty())
        throw ConfigError("'name' must be a non-empty string");
    const std::string name = cfg["name"];
    if (name.find_first_of("/\\") != std::string::npos || name == "." || name == "..")
        throw ConfigError("'name' must not contain path separators");
    if (!cfg["family"].is_string()) throw ConfigError("'family' must be a string");
    const std::string fam = cfg["family"];
    const auto it = families().find(fam);
    if (it == families().end()) throw ConfigError("unknown family '" + fam + "'");
    const FamilyInfo& info = it->second;
    if (!info.commands.count(cmd))
        throw ConfigError("family '" + fam + "' does not support the '" + to_string(cmd) + "' command");
    const std::string rep = resolved_rep(cfg);
    if (!info.reps.count(rep)) throw ConfigError("family '" + fam + "' is not available in representation " + rep);
    if (!cfg["params"].is_object()) throw ConfigError("'params' must be an object");

    if (fam == "dromion") {
        for (const char* k : {"curvatures", "numeric", "closedness", "conformality"})
            if (toggle(cfg, k, false)) throw ConfigError(std::string("dromion data is Willmore-only; analysis.") + k + " is not available");
        if (cfg["export"].value("obj", false) || cfg["export"].value("ply", false))
            throw ConfigError("dromion data is Willmore-only; it has no surface to export");
    }
    if (!info.surface && cmd != Command::reduce && (cfg["export"].value("obj", false) || cfg["export"].value("ply", false)))
        throw ConfigError("family '" + fam + "' has no surface to export");
    if (cmd != Command::reduce) {
        const Grid g = grid_of(cfg);
        if (cmd == Command::evolve && !(g.periodic_x && g.periodic_y))
            throw ConfigError("evolution needs a doubly periodic grid (grid.periodic = true)");
    }
    if (cmd == Command::evolve) {
        const json& e = cfg["evolution"];
        if (!(num(e, "T", 0) > 0)) throw ConfigError("evolution.T must be positive");
        if (num(e, "dt", 0) < 0) throw ConfigError("evolution.dt must be >= 0 (0 selects the stability rule)");
        if (inum(e, "samples", 1) < 1) throw ConfigError("evolution.samples must be >= 1");
    }
    if (cmd == Command::reduce) {
        const json& r = cfg["reduction"];
        static const std::set<std::string> kinds = {"nls", "kdv", "mkdv", "curve", "curve_motion"};
        if (!r["kind"].is_string() || !kinds.count(r["kind"].get<std::string>()))
            throw ConfigError("reduction.kind must be one of nls, kdv, mkdv, curve, curve_motion");
        if (inum(r, "n", 0) < 8 || !(num(r, "length", 0) > 0)) throw ConfigError("reduction grid needs n >= 8 and length > 0");
    }
    const json& ex = cfg["export"];
    if (ex.value("stereographic", false) && !(num(cfg["analysis"], "K0", 0) > 0))
        throw ConfigError("stereographic export needs analysis.K0 > 0");
    if (ex.contains("axes")) {
        const json& a = ex["axes"];
        if (!a.is_array() || a.size() != 3) throw ConfigError("export.axes must list three coordinate indices");
        std::set<int> s;
        for (const auto& v : a) {
            if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 3)
                throw ConfigError("export.axes entries must be integers in 0..3");
            s.insert(v.get<int>());
        }
        if (s.size() != 3) throw ConfigError("export.axes entries must be distinct");
    }
}

std::string resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* e = std::getenv("W4D_OUT"); e && *e) return e;
    return "w4d_out";
}

// ------------------------------------------------------------------ running

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

struct Staging {
    fs::path final_dir, dir;
    std::vector<std::string> files;
    bool done = false;

    Staging(const std::string& out, const std::string& name) {
        final_dir = fs::path(out) / name;
        dir = fs::path(out) / (name + ".partial");
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Staging() {
        if (!done) {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    }
    std::string path(const std::string& file) {
        files.push_back(file);
        return (dir / file).string();
    }
    std::vector<std::string> commit() {
        fs::remove_all(final_dir);
        fs::rename(dir, final_dir);
        done = true;
        std::vector<std::string> out;
        for (const auto& f : files) out.push_back((final_dir / f).string());
        return out;
    }
};

struct Ctx {
    json cfg, results = json::object();
    std::vector<CheckResult> checks;
    Staging* st = nullptr;

    double tol(const char* key) const { return num(cfg["checks"], key, -1); }
    // value <= threshold passes; negative thresholds disable the check
    void check(const std::string& name, double value, const char* key) {
        const double t = tol(key);
        if (t < 0) return;
        checks.push_back({name, value, t, std::isfinite(value) && value <= t});
    }
};

std::vector<cplx> poly(const json& p, const char* key, std::vector<cplx> def) { return clist(p, key, def); }

cplx eval_poly(const std::vector<cplx>& c, cplx z) {
    cplx r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * z + *it;
    return r;
}

struct SurfaceData {
    SpinorQuad sq;
    Potentials pot;
    json info = json::object();
};

SurfaceData build_minimal(const json& p, const Grid& g, Rep rep) {
    // psi_a = conj(P_a(z)) (spacelike) or P_a(eta) (timelike); phi_a = Q_a(z) or Q_a(xi).
    const auto P1 = poly(p, "psi1", {1.0}), P2 = poly(p, "psi2", {0.0, 1.0});
    auto Q1 = poly(p, "phi1", {0.0, 1.0}), Q2 = poly(p, "phi2", {1.0, 0.0, 0.5});
    const bool tl = is_timelike(rep);
    SurfaceData d;
    if (p.contains("superminimal")) {
        if (rep != Rep::R4 && rep != Rep::R22) throw ConfigError("params.superminimal is available for R4 and R22 only");
        const auto a = clist(p, "superminimal", {});
        if (a.size() != 2) throw ConfigError("params.superminimal must be [a1, a2]");
        Q1 = P1, Q2 = P2;
        for (auto& c : Q1) c *= a[0];
        for (auto& c : Q2) c *= a[1];
        d.info["superminimal"] = true;
    }
    auto psi = [&](const std::vector<cplx>& c) {
        return sample(g, [&](cplx z) { return tl ? eval_poly(c, z.imag()) : std::conj(eval_poly(c, z)); });
    };
    auto phi = [&](const std::vector<cplx>& c) {
        return sample(g, [&](cplx z) { return tl ? eval_poly(c, z.real()) : eval_poly(c, z); });
    };
    d.sq = minimal_spinors(g, phi(Q1), phi(Q2), psi(P1), psi(P2), rep);
    d.pot = {cfield(g.size(), 0.0), cfield(g.size(), 0.0)};
    return d;
}

SolitonParams soliton_params(const json& p) {
    SolitonParams sp;
    sp.lambda = clist(p, "lambda", {0.5});
    sp.mu = clist(p, "mu", std::vector<cplx>(sp.lambda.size(), 0.0));
    sp.nu = clist(p, "nu", std::vector<cplx>(sp.lambda.size(), 1.0));
    sp.eps = sign_param(p, -1);
    sp.t2 = num(p, "t2", 0.0);
    try {
        sp.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return sp;
}

SurfaceData build_surface(const json& cfg, const Grid& g, Rep rep) {
    const std::string fam = cfg["family"];
    const json& p = cfg["params"];
    if (fam == "minimal") return build_minimal(p, g, rep);
    SurfaceData d;
    if (fam == "soliton") {
        const auto sp = soliton_params(p);
        auto r = soliton_fields(sp, g);
        d.sq = std::move(r.sq);
        d.pot = {std::move(r.p), {}};
        d.info = {{"N", sp.N()}, {"masked", r.masked}, {"tilde_gap", r.tilde_gap}};
        return d;
    }
    if (fam == "constant_h2") {
        auto r = constant_h2_r4(g, cnum(p, "p0", 1.0), cnum(p, "k1", {0.6, 0.8}), cnum(p, "k2", {-0.8, 0.6}),
                                cnum(p, "A1", 1.0), cnum(p, "A2", 1.0));
        d.sq = std::move(r.sq);
        d.pot = std::move(r.pot);
        return d;
    }
    if (fam == "constant_p_timelike") {
        const cplx p0 = cnum(p, "p0", {0.5, 0.2});
        d.sq = constant_p_timelike(g, p0, num(p, "a", 1.0));
        d.pot = {cfield(g.size(), p0), {}};
        return d;
    }
    throw ConfigError("family '" + fam + "' has no surface");
}

Profile profile_of(const json& j) {
    Profile pr;
    const std::string k = j.value("kind", std::string("gaussian"));
    if (k == "gaussian") pr.kind = ProfileKind::gaussian;
    else if (k == "sech") pr.kind = ProfileKind::sech;
    else throw ConfigError("profile kind must be gaussian or sech");
    pr.center = num(j, "center", 0), pr.width = num(j, "width", 1);
    return pr;
}

void write_ds_series(const std::string& path, const std::vector<SeriesRow>& rows) {
    std::ofstream os(path);
    os << "# w4d-series/1\n"
       << "t,W,C1,dirac_residual,conformality_defect\n";
    for (const auto& r : rows)
        os << fmt(r.t) << ',' << fmt(r.W) << ',' << fmt(r.C1) << ',' << fmt(r.dirac_residual) << ','
           << fmt(r.conformality_defect) << '\n';
    if (!os) throw Error("cannot write " + path);
}

void write_1d_series(const std::string& path, const std::vector<Series1DRow>& rows) {
    std::ofstream os(path);
    os << "# w4d-series1d/1\n"
       << "t,C1,mass,energy\n";
    for (const auto& r : rows) os << fmt(r.t) << ',' << fmt(r.C1) << ',' << fmt(r.mass) << ',' << fmt(r.energy) << '\n';
    if (!os) throw Error("cannot write " + path);
}

double two_contour_gap(const OneForm& w, const SurfacePatch& sp) {
    const Grid& g = w.grid;
    const std::pair<int, int> a{0, 0}, b{g.nx - 1, g.ny - 1};
    const auto I1 = integrate_contour(w, straight_contour(a, b, true));
    const auto I2 = integrate_contour(w, straight_contour(a, b, false));
    double gap = 0;
    for (int c = 0; c < 4; ++c) gap = std::max(gap, std::abs(I1[c] - I2[c]));
    const double d = diameter(sp);
    return d > 0 ? gap / d : gap;
}

void run_surface(Ctx& c, Command cmd) {
    const Grid g = grid_of(c.cfg);
    const Rep rep = rep_from_string(resolved_rep(c.cfg));
    const std::string fam = c.cfg["family"];
    SurfaceData d;
    try {
        d = build_surface(c.cfg, g, rep);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("params: ") + e.what());  // parameter constraints of the family
    }
    c.results["family_info"] = d.info;

    ImmerseOptions io;
    io.i0 = g.nx / 2, io.j0 = g.ny / 2;
    const auto patch = immerse(d.sq, d.pot, io);
    const auto form = weierstrass_form(d.sq);
    const bool analyze = cmd == Command::analyze;
    c.results["dirac_residual"] = patch.residual;
    c.results["diameter"] = diameter(patch);
    c.results["max_imag"] = patch.max_imag;

    std::optional<ConformalFactor> cf;
    const double K0 = num(c.cfg["analysis"], "K0", 0);
    if (K0 != 0) cf = conformal_scale(patch, K0);

    const bool want_curv = toggle(c.cfg, "curvatures", true);
    std::optional<GeometryReport> geo;
    if (want_curv || cmd == Command::export_mesh) {
        geo = curvatures(d.sq, d.pot, cf ? &*cf : nullptr);
        c.results["W"] = geo->W;
        c.results["W_area"] = geo->W_area;
        c.results["coverage"] = geo->coverage;
        double hmax = 0;
        for (int k = 0; k < 4; ++k) hmax = std::max(hmax, max_abs(geo->H[k], &geo->mask));
        c.results["max_H"] = hmax;
        if (fam == "minimal") c.check("minimal_max_H", hmax, "minimal_H");
        if (fam == "soliton") {
            const double N = double(d.info["N"].get<std::size_t>());
            const double target = 16 * PI * N;
            c.results["W_over_16piN"] = geo->W / target;
            c.check("soliton_willmore_16piN_rel", std::abs(geo->W - target) / target, "willmore_rtol");
        }
    }
    if (toggle(c.cfg, "conformality", true)) {
        const double cd = metric_from_form(form).conformality_defect;
        c.results["conformality_defect"] = cd;
        c.check("conformality", cd, "conformality");
    }
    if (toggle(c.cfg, "closedness", true)) {
        const double gap = two_contour_gap(form, patch);
        c.results["two_contour_gap_over_diameter"] = gap;
        c.results["closedness_residual"] = closedness_residual(form);
        c.check("two_contour_closedness", gap, "closedness");
    }
    if (analyze) {
        const auto cls = class_predicates(d.sq, d.pot);
        c.results["class"] = {{"minimal", cls.minimal},
                              {"superminimal_direct", cls.superminimal_direct},
                              {"superminimal_rhs_gap", cls.superminimal_rhs_gap},
                              {"superminimal_sufficient", cls.superminimal_sufficient},
                              {"constant_h2", cls.constant_h2},
                              {"constant_h2_system", cls.constant_h2_system}};
        if (d.info.value("superminimal", false)) {
            c.check("superminimal_sufficient", cls.superminimal_sufficient, "superminimal");
            c.check("superminimal_direct", cls.superminimal_direct, "superminimal");
        }
        if (fam == "constant_h2") c.check("constant_h2_spread", cls.constant_h2, "constant_h2");
        if (fam == "soliton" && d.info["N"].get<std::size_t>() == 1 && !g.periodic_x && !g.periodic_y) {
            const auto sp = soliton_params(c.cfg["params"]);
            const auto ld = soliton_p2_logdet(sp, g);
            // gap relative to the peak of |p|^2 (pointwise ratios are meaningless in the decaying tails)
            double gap = 0, peak = 0;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const auto k = g.idx(i, j);
                    if (ld.mask[k]) continue;
                    const double ex = std::norm(soliton1_p(sp, g.z(i, j)));
                    peak = std::max(peak, ex);
                    gap = std::max(gap, std::abs(ld.p2[k] - ex));
                }
            gap /= std::max(peak, 1e-300);
            c.results["dual_formula_rel_gap"] = gap;
            c.check("dual_formula_logdet_vs_closed", gap, "dual_formula");
        }
        if (toggle(c.cfg, "numeric", true) && geo) {
            const auto ng = geometry_numeric(patch);
            const Mask in = mask_or(interior_mask(g, 4), geo->mask);
            double h2gap = 0, h2max = 0, fgap = 0, fmax = 0;
            const auto mc = metric_closed(d.sq);
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (in[k] || (!mc.mask.empty() && mc.mask[k])) continue;
                h2gap = std::max(h2gap, std::abs(ng.H2[k] - geo->H2_vec[k]));
                h2max = std::max(h2max, std::abs(geo->H2_vec[k]));
                fgap = std::max(fgap, std::abs(ng.metric.factor[k] - mc.factor[k]));
                fmax = std::max(fmax, std::abs(mc.factor[k]));
            }
            c.results["numeric_vs_closed"] = {{"H2_abs_gap", h2gap}, {"H2_scale", h2max},
                                              {"metric_rel_gap", fmax > 0 ? fgap / fmax : fgap}};
        }
    }
    if (cmd == Command::export_mesh || c.cfg["export"].value("obj", false) || c.cfg["export"].value("ply", false)) {
        const json& ex = c.cfg["export"];
        const std::string base = ex.value("basename", std::string("surface"));
        const bool obj = cmd == Command::export_mesh || ex.value("obj", false);
        const bool ply = cmd == Command::export_mesh || ex.value("ply", false);
        if (obj) {
            ObjProjection pr;
            for (int k = 0; k < 3; ++k) pr.axes[k] = ex["axes"][k].get<int>();
            if (ex.value("stereographic", false)) pr.stereographic = true, pr.radius = 2.0 / std::sqrt(K0);
            const auto ms = write_obj(patch, c.st->path(base + ".obj"), pr);
            c.results["obj"] = {{"vertices", ms.vertices}, {"faces", ms.faces}, {"omitted_faces", ms.omitted_faces}};
        }
        if (ply) {
            const auto ms = write_ply(patch, geo ? &geo->H2 : nullptr, c.st->path(base + ".ply"));
            c.results["ply"] = {{"vertices", ms.vertices}, {"faces", ms.faces}, {"omitted_faces", ms.omitted_faces}};
        }
    }
}

void run_dromion(Ctx& c) {
    const Grid g = grid_of(c.cfg);
    const json& p = c.cfg["params"];
    DromionParams dp;
    dp.M = inum(p, "M", 1), dp.L = inum(p, "L", 1);
    dp.rho = clist(p, "rho", {0.5});
    dp.eps = sign_param(p, 1);
    dp.t2 = num(p, "t2", 0);
    auto profiles = [&](const char* key, int n) {
        std::vector<Profile> v;
        if (p.contains(key)) {
            for (const auto& e : p[key]) v.push_back(profile_of(e));
        } else {
            for (int k = 0; k < n; ++k) v.push_back(Profile{ProfileKind::gaussian, 2.0 * k, 1.0});
        }
        return v;
    };
    dp.X = profiles("X", dp.M), dp.Y = profiles("Y", dp.L);
    try {
        dp.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const auto r = dromion_p2(dp, g);
    const double exact = willmore_dromion(dp);
    const double quad = 2.0 * r.integral;
    c.results["W_exact"] = exact;
    c.results["W_quadrature"] = quad;
    c.results["coverage"] = r.coverage;
    c.check("dromion_willmore_rel", std::abs(quad - exact) / std::abs(exact), "dromion_rtol");
}

cfield periodic_data(const json& p, const Grid& g) {
    const double Lx = g.x_max - g.x_min, Ly = g.y_max - g.y_min;
    cfield f(g.size(), 0.0);
    auto add = [&](double kx, double ky, cplx a) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f[g.idx(i, j)] += a * std::exp(I * (2 * PI * kx * (g.x(i) - g.x_min) / Lx + 2 * PI * ky * (g.y(j) - g.y_min) / Ly));
    };
    if (p.contains("modes")) {
        for (const auto& m : p["modes"]) {
            if (!m.is_array() || m.size() != 4) throw ConfigError("params.modes entries are [kx, ky, re, im]");
            add(m[0].get<double>(), m[1].get<double>(), {m[2].get<double>(), m[3].get<double>()});
        }
    } else {
        // seeded random smooth data: modes |k| <= kmax with amplitude / (1 + |k|^2)
        std::mt19937_64 rng(std::uint64_t(inum(p, "seed", 1)));
        const int kmax = inum(p, "kmax", 3);
        const double amp = num(p, "amplitude", 0.1);
        for (int ky = -kmax; ky <= kmax; ++ky)
            for (int kx = -kmax; kx <= kmax; ++kx) {
                const double re = double(rng() >> 11) * 0x1.0p-53 - 0.5;
                const double im = double(rng() >> 11) * 0x1.0p-53 - 0.5;
                add(kx, ky, amp * cplx(re, im) / (1.0 + kx * kx + ky * ky));
            }
    }
    return f;
}

void run_evolve(Ctx& c) {
    const Grid g = grid_of(c.cfg);
    const std::string fam = c.cfg["family"];
    const json& p = c.cfg["params"];
    const json& e = c.cfg["evolution"];
    const int eps = sign_param(p, -1);
    cfield p0;
    std::optional<SpinorQuad> sq;
    std::optional<SolitonParams> sp;
    if (fam == "soliton") {
        sp = soliton_params(p);
        if (e.value("track_spinors", false)) {
            auto r = soliton_fields(*sp, g);
            p0 = std::move(r.p);
            sq = std::move(r.sq);
        } else {
            p0 = sample(g, [&](cplx z) { return soliton_p_at(*sp, z); });
        }
    } else {
        p0 = periodic_data(p, g);
    }
    auto s0 = make_state(g, std::move(p0), eps, sq);
    EvolveOptions eo;
    eo.T = num(e, "T", 0.1);
    eo.dt = num(e, "dt", 0);
    const double dt = eo.dt > 0 ? eo.dt : stable_dt(g);
    const int steps = int(std::ceil(eo.T / dt - 1e-9));
    eo.sample_every = std::max(1, steps / inum(e, "samples", 10));
    eo.track_spinors = sq.has_value();
    eo.step.blowup = num(e, "blowup", 1e3);
    const auto r = evolve_and_track(s0, eo);
    write_ds_series(c.st->path("series.csv"), r.series);

    double wd = 0, cd = 0;
    bool monotone = true;
    const auto& f = r.series.front();
    for (std::size_t k = 0; k < r.series.size(); ++k) {
        wd = std::max(wd, std::abs(r.series[k].W - f.W) / std::max(std::abs(f.W), 1e-300));
        cd = std::max(cd, std::abs(r.series[k].C1 - f.C1) / std::max(std::abs(f.C1), 1e-300));
        if (k && !(r.series[k].t > r.series[k - 1].t)) monotone = false;
    }
    c.results["steps"] = r.steps;
    c.results["dt"] = r.dt;
    c.results["samples"] = r.series.size();
    c.results["W_rel_drift"] = wd;
    c.results["C1_rel_drift"] = cd;
    c.checks.push_back({"time_column_monotone", monotone ? 0.0 : 1.0, 0.0, monotone});
    c.check("willmore_rel_drift", wd, "w_drift");
    c.check("c1_rel_drift", cd, "c1_drift");
    if (sp) {
        SolitonParams st = *sp;
        st.t2 += r.final_state.t;
        double err = 0, scale = 0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double ex = std::norm(soliton_p_at(st, g.z(i, j)));
                scale = std::max(scale, ex);
                err = std::max(err, std::abs(std::norm(r.final_state.p[g.idx(i, j)]) - ex));
            }
        c.results["soliton_final_rel_error"] = err / scale;
        c.check("soliton_evolution_vs_exact", err / scale, "soliton_evolution");
    }
}

void run_reduce(Ctx& c) {
    const json& r = c.cfg["reduction"];
    const json& p = c.cfg["params"];
    Grid1D g{num(r, "x0", -20), num(r, "length", 40), inum(r, "n", 1024), true};
    const std::string kind = r["kind"];
    const double amp = num(p, "amplitude", 1.0), center = num(p, "center", 0.0), vel = num(p, "velocity", 0.0);
    auto sech_data = [&](bool complex_phase) {
        cfield f(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            f[i] = amp / std::cosh(amp * (x - center)) * (complex_phase ? std::exp(I * vel * x) : cplx(1.0));
        }
        return f;
    };
    Evolve1DOptions eo;
    eo.T = num(r, "T", 1.0);
    eo.dt = num(r, "dt", 0);
    eo.sample_every = 1;
    auto c1_drift = [&](const std::vector<Series1DRow>& s) {
        double d = 0;
        for (const auto& row : s) d = std::max(d, std::abs(row.C1 - s.front().C1) / std::max(std::abs(s.front().C1), 1e-300));
        return d;
    };
    auto thin = [&](int steps_hint) { return std::max(1, steps_hint / std::max(1, inum(r, "samples", 10))); };
    if (kind == "nls" || kind == "kdv" || kind == "mkdv") {
        Evolve1DResult res;
        if (kind == "nls") {
            const int eps = sign_param(p, -1);
            const auto f0 = sech_data(true);
            eo.sample_every = thin(int(eo.T / (eo.dt > 0 ? eo.dt : stable_dt_1d(g, 2, max_abs(f0)))));
            res = nls_evolve(f0, eps, g, eo);
        } else if (kind == "kdv") {
            const auto q0 = kdv_soliton_profile(g, num(p, "c", 1.0), center);
            eo.sample_every = thin(int(eo.T / (eo.dt > 0 ? eo.dt : stable_dt_1d(g, 3, max_abs(q0)))));
            res = kdv_evolve(q0, g, eo);
        } else {
            const auto f0 = real_part(sech_data(false));
            eo.sample_every = thin(int(eo.T / (eo.dt > 0 ? eo.dt : stable_dt_1d(g, 3, max_abs(f0)))));
            res = mkdv_evolve(f0, g, eo);
        }
        write_1d_series(c.st->path("series1d.csv"), res.series);
        const double d = c1_drift(res.series);
        c.results["steps"] = res.steps;
        c.results["dt"] = res.dt;
        c.results["C1_rel_drift"] = d;
        c.check("c1_rel_drift_1d", d, "c1_drift_1d");
        return;
    }
    const double lambda = num(p, "lambda", 0.5), mu = num(p, "mu", 0.5);
    if (kind == "curve") {
        const Rep rep = rep_from_string(resolved_rep(c.cfg));
        const auto f0 = sech_data(true);
        const auto cv = curve_from_reduction(f0, g, lambda, mu, rep);
        std::ofstream os(c.st->path("curve.csv"));
        os << "# w4d-curve/1\nx,Y1,Y2,Y3,Y4\n";
        for (int i = 0; i < g.n; ++i)
            os << fmt(g.x(i)) << ',' << fmt(cv.Y[0][i]) << ',' << fmt(cv.Y[1][i]) << ',' << fmt(cv.Y[2][i]) << ','
               << fmt(cv.Y[3][i]) << '\n';
        c.results["radius2"] = cv.radius2;
        c.results["constraint_defect"] = cv.constraint_defect;
        c.results["speed_defect"] = cv.speed_defect;
        c.check("sphere_constraint", cv.constraint_defect, "sphere");
        return;
    }
    // curve_motion
    const auto f0 = sech_data(true);
    const double dt = eo.dt > 0 ? eo.dt : stable_dt_1d(g, 2, max_abs(f0));
    eo.sample_every = thin(int(eo.T / dt));
    const auto m = curve_motion(f0, sign_param(p, -1), g, lambda, mu, eo);
    std::ofstream os(c.st->path("curve_motion.csv"));
    os << "# w4d-curve-motion/1\nt,constraint_defect\n";
    for (std::size_t k = 0; k < m.t.size(); ++k) os << fmt(m.t[k]) << ',' << fmt(m.frames[k].constraint_defect) << '\n';
    c.results["frames"] = m.t.size();
    c.results["max_constraint_defect"] = m.max_constraint_defect;
    c.check("sphere_constraint_motion", m.max_constraint_defect, "sphere_motion");
}

json checks_json(const std::vector<CheckResult>& v) {
    json a = json::array();
    for (const auto& c : v) a.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
    return a;
}

}  // namespace

RunResult run_scenario(const json& cfg_in, Command cmd, const std::string& out_dir) {
    if (cmd == Command::verify) return run_verify(out_dir);
    validate_config(cfg_in, cmd);
    Ctx c;
    c.cfg = default_config();
    c.cfg.merge_patch(cfg_in);
    c.cfg["representation"] = resolved_rep(c.cfg);
    Staging st(out_dir, c.cfg["name"].get<std::string>());
    c.st = &st;
    const std::string fam = c.cfg["family"];
    if (cmd == Command::evolve) run_evolve(c);
    else if (cmd == Command::reduce) run_reduce(c);
    else if (fam == "dromion") run_dromion(c);
    else run_surface(c, cmd);

    RunResult rr;
    rr.checks = c.checks;
    rr.pass = std::all_of(c.checks.begin(), c.checks.end(), [](const CheckResult& k) { return k.pass; });
    rr.report = {{"w4d_version", version()}, {"command", to_string(cmd)}, {"config", c.cfg},
                 {"results", c.results},   {"checks", checks_json(c.checks)}, {"pass", rr.pass}};
    {
        std::ofstream os(st.path("report.json"));
        os << rr.report.dump(2) << '\n';
        if (!os) throw Error("cannot write report.json");
    }
    rr.files = st.commit();
    return rr;
}

RunResult run_verify(const std::string& out_dir) {
    // small, fast instances of the library's identities
    struct Item {
        const char* cfg;
        Command cmd;
    };
    using C = Command;
    const Item items[] = {
        {R"({"name":"minimal_r4","family":"minimal","grid":{"half":1.5,"n":64}})", C::analyze},
        {R"({"name":"superminimal_r4","family":"minimal","grid":{"half":1.5,"n":64},
             "params":{"superminimal":[[0.5,0.5],2.0]}})", C::analyze},
        {R"({"name":"minimal_r31t","family":"minimal","representation":"R31T","grid":{"half":1.5,"n":64}})", C::analyze},
        {R"({"name":"soliton_r4","family":"soliton","grid":{"half":20,"n":256},
             "params":{"lambda":[0.5],"mu":[0.0],"nu":[1.0],"eps":-1},
             "checks":{"willmore_rtol":-1}})", C::analyze},
        {R"({"name":"constant_h2","family":"constant_h2","grid":{"half":2,"n":128}})", C::analyze},
        {R"({"name":"constant_p_timelike","family":"constant_p_timelike","grid":{"half":1,"n":64}})", C::analyze},
        {R"({"name":"dromion","family":"dromion","grid":{"half":12,"n":256},"params":{"rho":[0.5]}})", C::generate},
        {R"({"name":"ds2_periodic","family":"periodic","grid":{"half":3.141592653589793,"n":32,"periodic":true},
             "params":{"eps":-1,"seed":7,"amplitude":0.2,"kmax":3},"evolution":{"T":0.02,"samples":5}})", C::evolve},
        {R"({"name":"nls","family":"reduction","reduction":{"kind":"nls","x0":-20,"length":40,"n":256,"T":0.2}})", C::reduce},
        {R"({"name":"kdv","family":"reduction","reduction":{"kind":"kdv","x0":-20,"length":40,"n":256,"T":0.05},
             "params":{"c":1.0}})", C::reduce},
        {R"({"name":"mkdv","family":"reduction","reduction":{"kind":"mkdv","x0":-20,"length":40,"n":256,"T":0.05}})", C::reduce},
        {R"({"name":"curve","family":"reduction","reduction":{"kind":"curve","x0":-20,"length":40,"n":512}})", C::reduce},
    };
    const std::string vdir = (fs::path(out_dir) / "verify").string();
    fs::create_directories(vdir);
    RunResult all;
    json runs = json::array();
    for (const auto& it : items) {
        json cfg = default_config();
        cfg.merge_patch(json::parse(it.cfg));
        auto r = run_scenario(cfg, it.cmd, vdir);
        for (auto k : r.checks) {
            k.name = cfg["name"].get<std::string>() + "/" + k.name;
            all.checks.push_back(k);
        }
        all.files.insert(all.files.end(), r.files.begin(), r.files.end());
        runs.push_back({{"name", cfg["name"]}, {"command", to_string(it.cmd)}, {"pass", r.pass}});
    }
    all.pass = std::all_of(all.checks.begin(), all.checks.end(), [](const CheckResult& k) { return k.pass; });
    all.report = {{"w4d_version", version()}, {"command", "verify"}, {"runs", runs},
                  {"checks", checks_json(all.checks)}, {"pass", all.pass}};
    const auto path = (fs::path(vdir) / "verify_report.json").string();
    std::ofstream os(path);
    os << all.report.dump(2) << '\n';
    all.files.push_back(path);
    return all;
}

}  // namespace w4d
