#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "w4d/mesh_io.hpp"
#include "w4d/scenario.hpp"

using namespace w4d;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& tag) {
    auto d = fs::temp_directory_path() / ("w4d_test_cli_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}
json cfg(const char* patch) {
    json c = default_config();
    c.merge_patch(json::parse(patch));
    return c;
}
std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}
SurfacePatch flat_patch(int n) {
    SurfacePatch sp;
    sp.grid = Grid::box(1.0, n);
    sp.sig = Signature::of(Sig::R4);
    for (int c = 0; c < 4; ++c) sp.X[c].assign(sp.grid.size(), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const auto k = sp.grid.idx(i, j);
            sp.X[0][k] = sp.grid.x(i), sp.X[1][k] = 0.5 * sp.grid.x(i) + sp.grid.y(j), sp.X[2][k] = 0.25 * sp.grid.y(j);
            sp.X[3][k] = sp.grid.x(i) * sp.grid.y(j);  // colour only
        }
    return sp;
}
const char* kMinimal = R"({"name":"m","family":"minimal","grid":{"half":1.5,"n":48}})";
const char* kPeriodic = R"({"name":"ev","family":"periodic","grid":{"half":3.141592653589793,"n":16,"periodic":true},
                            "params":{"seed":3,"amplitude":0.2},"evolution":{"T":0.01,"samples":4}})";
}  // namespace

TEST_CASE("overrides") {
    json c = default_config();
    apply_override(c, "grid.n=256");
    apply_override(c, "params.lambda=[[0.5,0.1]]");
    apply_override(c, "name=run_a");
    apply_override(c, "new.nested.key=true");
    CHECK(c["grid"]["n"] == 256);
    CHECK(c["params"]["lambda"][0][1] == 0.1);
    CHECK(c["name"] == "run_a");
    CHECK(c["new"]["nested"]["key"] == true);
    CHECK_THROWS_AS(apply_override(c, "grid.n"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "grid..n=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "grid.n.x=3"), ConfigError);
}

TEST_CASE("invalid combinations are rejected before compute") {
    CHECK_NOTHROW(validate_config(cfg(kMinimal), Command::analyze));
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"nope"})"), Command::generate), ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(kMinimal), Command::evolve), ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"dromion"})"), Command::export_mesh), ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"dromion","analysis":{"curvatures":true}})"), Command::analyze),
                    ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"soliton","representation":"R22","params":{"eps":-1}})"),
                                    Command::generate),
                    ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"soliton"})"), Command::evolve), ConfigError);  // not periodic
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"minimal","representation":"R22T"})"), Command::generate),
                    ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"minimal","export":{"stereographic":true}})"), Command::export_mesh),
                    ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"minimal","export":{"axes":[0,0,1]}})"), Command::export_mesh),
                    ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"minimal","name":"../x"})"), Command::generate), ConfigError);
    CHECK_THROWS_AS(validate_config(cfg(R"({"family":"minimal","grid":{"n":4}})"), Command::generate), ConfigError);

    const auto out = scratch("reject");
    CHECK_THROWS_AS(run_scenario(cfg(R"({"name":"d","family":"dromion"})"), Command::export_mesh, out.string()),
                    ConfigError);
    CHECK(fs::is_empty(out));
}

TEST_CASE("minimal scenario: report, checks and layout") {
    const auto out = scratch("minimal");
    const auto r = run_scenario(cfg(kMinimal), Command::analyze, out.string());
    CHECK(r.pass);
    CHECK(fs::exists(out / "m" / "report.json"));
    CHECK_FALSE(fs::exists(out / "m.partial"));
    const auto rep = json::parse(slurp(out / "m" / "report.json"));
    CHECK(rep["w4d_version"] == version());
    CHECK(rep["config"]["grid"]["n"] == 48);
    CHECK(rep["config"]["representation"] == "R4");
    CHECK(rep["results"]["max_H"].get<double>() < 1e-8);
    bool saw_h = false;
    for (const auto& c : r.checks) saw_h |= c.name == "minimal_max_H";
    CHECK(saw_h);
}

TEST_CASE("evolve and export outputs are byte-identical across runs") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    run_scenario(cfg(kPeriodic), Command::evolve, a.string());
    run_scenario(cfg(kPeriodic), Command::evolve, b.string());
    const auto csv = slurp(a / "ev" / "series.csv");
    CHECK(csv == slurp(b / "ev" / "series.csv"));
    CHECK(csv.rfind("# w4d-series/1\nt,W,C1,dirac_residual,conformality_defect\n", 0) == 0);

    run_scenario(cfg(kMinimal), Command::export_mesh, a.string());
    run_scenario(cfg(kMinimal), Command::export_mesh, b.string());
    CHECK(slurp(a / "m" / "surface.ply") == slurp(b / "m" / "surface.ply"));
    CHECK(slurp(a / "m" / "surface.obj") == slurp(b / "m" / "surface.obj"));
}

TEST_CASE("aborted runs leave nothing behind") {
    const auto out = scratch("abort");
    auto c = cfg(kPeriodic);
    c["params"]["amplitude"] = 20.0;
    c["evolution"]["blowup"] = 0.5;
    CHECK_THROWS_AS(run_scenario(c, Command::evolve, out.string()), BlowupError);
    CHECK(fs::is_empty(out));
}

TEST_CASE("mesh: 2x2 grid gives 4 vertices and 2 triangles") {
    SurfacePatch sp = flat_patch(8);
    sp.grid = {0, 1, 0, 1, 2, 2, false, false};
    for (int c = 0; c < 4; ++c) sp.X[c] = {0.0, 1.0, 0.0, 1.0};
    const auto out = scratch("mesh2");
    const auto st = write_obj(sp, (out / "a.obj").string());
    CHECK(st.vertices == 4u);
    CHECK(st.faces == 2u);
    CHECK(st.omitted_faces == 0u);
    const auto sp2 = write_ply(sp, nullptr, (out / "a.ply").string());
    CHECK(read_ply((out / "a.ply").string()).vertices.size() == 4u);
    CHECK(sp2.faces == 2u);
}

TEST_CASE("mesh: masked vertices drop their faces") {
    SurfacePatch sp = flat_patch(8);
    sp.mask.assign(sp.grid.size(), 0);
    sp.mask[sp.grid.idx(3, 3)] = 1;  // interior vertex: 4 quads, 8 triangles
    const auto out = scratch("mask");
    const auto st = write_ply(sp, nullptr, (out / "m.ply").string());
    CHECK(st.omitted_faces == 8u);
    CHECK(st.faces == 2u * 7u * 7u - 8u);
}

TEST_CASE("mesh: plane patch gives a planar OBJ") {
    const auto sp = flat_patch(9);
    const auto out = scratch("plane");
    write_obj(sp, (out / "p.obj").string());
    std::ifstream is(out / "p.obj");
    std::vector<std::array<double, 3>> v;
    std::vector<std::array<int, 3>> f;
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string t;
        ls >> t;
        if (t == "v") {
            std::array<double, 3> p{};
            ls >> p[0] >> p[1] >> p[2];
            v.push_back(p);
        } else if (t == "f") {
            std::array<int, 3> q{};
            ls >> q[0] >> q[1] >> q[2];
            f.push_back(q);
        }
    }
    REQUIRE(f.size() == 2u * 8u * 8u);
    auto normal = [&](const std::array<int, 3>& q) {
        const auto &a = v[q[0] - 1], &b = v[q[1] - 1], &c = v[q[2] - 1];
        const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]}, w[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        std::array<double, 3> n{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
        const double l = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        for (auto& x : n) x /= l;
        return n;
    };
    const auto n0 = normal(f[0]);
    double worst = 0;
    for (const auto& q : f) {
        const auto n = normal(q);
        const double cx = n[1] * n0[2] - n[2] * n0[1], cy = n[2] * n0[0] - n[0] * n0[2], cz = n[0] * n0[1] - n[1] * n0[0];
        worst = std::max(worst, std::sqrt(cx * cx + cy * cy + cz * cz));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("mesh: PLY round trip is bit exact") {
    auto sp = flat_patch(12);
    rfield H2(sp.grid.size());
    for (std::size_t k = 0; k < H2.size(); ++k) H2[k] = std::sin(0.37 * k) * 1e-3;
    const auto out = scratch("ply");
    const auto st = write_ply(sp, &H2, (out / "r.ply").string());
    const auto d = read_ply((out / "r.ply").string());
    REQUIRE(d.vertices.size() == sp.grid.size());
    CHECK(d.faces.size() == st.faces);
    bool same = true;
    for (std::size_t k = 0; k < d.vertices.size(); ++k) {
        for (int c = 0; c < 4; ++c) same &= d.vertices[k][c] == float(sp.X[c][k]);
        same &= d.vertices[k][4] == float(H2[k]);
    }
    CHECK(same);
    CHECK(d.faces[0] == std::array<int, 3>{0, 1, 13});
}

TEST_CASE("output directory precedence") {
    ::setenv("W4D_OUT", "/tmp/from_env", 1);
    CHECK(resolve_out_dir("flag_dir") == "flag_dir");
    CHECK(resolve_out_dir("") == "/tmp/from_env");
    ::unsetenv("W4D_OUT");
    CHECK(resolve_out_dir("") == "w4d_out");
}

#ifdef W4D_CLI_PATH
TEST_CASE("command-line exit codes") {
    const auto out = scratch("exe");
    const auto good = out / "good.json", bad = out / "bad.json", failing = out / "failing.json";
    std::ofstream(good) << kMinimal;
    std::ofstream(bad) << R"({"name":"b","family":"dromion"})";
    std::ofstream(failing) << R"({"name":"f","family":"minimal","grid":{"half":1.5,"n":48},"checks":{"minimal_H":-1,"closedness":1e-30}})";
    auto run = [&](const std::string& args) {
        const std::string cmd = "W4D_OUT=" + (out / "o").string() + " " + W4D_CLI_PATH + " " + args + " > /dev/null 2>&1";
        const int st = std::system(cmd.c_str());
        return WEXITSTATUS(st);
    };
    CHECK(run("analyze " + good.string()) == 0);
    CHECK(fs::exists(out / "o" / "m" / "report.json"));
    CHECK(run("export " + bad.string()) == 2);
    CHECK(run("analyze " + failing.string()) == 1);
    CHECK(run("analyze " + good.string() + " --set grid.n=4") == 2);
    CHECK(run("frobnicate") != 0);
}
#endif
