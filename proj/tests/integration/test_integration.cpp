// End-to-end runs through the command-line tool.
#include "mxgs/io.hpp"
#include "mxgs/runner.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace mxgs;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {
fs::path root() {
    static const fs::path p = [] {
        const auto d = fs::temp_directory_path() / "mxgs_integration";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return p;
}
int cli(const std::string& args) {
    const std::string cmd = std::string(MXGS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}
json results(const fs::path& dir) { return json::parse(read_text_file(dir / "results.json")); }
std::size_t data_rows(const fs::path& csv) {
    std::ifstream is(csv);
    std::size_t n = 0;
    for (std::string l; std::getline(is, l);)
        if (!l.empty() && l[0] != '#') ++n;
    return n - 1;
}
void write_config(const std::string& name, const std::string& text) { write_text_file(root() / name, text); }
}  // namespace

TEST_CASE("solve, then spectrum, kato and decay on the saved state") {
    const auto solve_dir = root() / "solve";
    REQUIRE(cli("solve --out " + solve_dir.string()) == 0);
    const auto r = results(solve_dir);
    CHECK(r["state"]["converged"] == true);
    CHECK(r["state"]["nehari_rel"].get<double>() < 1e-8);
    CHECK(r["state"]["lambda_s"].get<double>() > r["endpoints"]["sandwich_lower"].get<double>());
    CHECK(r["state"]["lambda_s"].get<double>() < r["endpoints"]["sandwich_upper"].get<double>());
    REQUIRE(fs::exists(solve_dir / "u.field"));

    const std::string state = (solve_dir / "u.field").string();
    write_config("state.json", R"({"state":")" + state + R"("})");
    const std::string cfg = "--config " + (root() / "state.json").string();

    const auto sp_dir = root() / "spectrum";
    REQUIRE(cli("spectrum " + cfg + " --out " + sp_dir.string()) == 0);
    const auto sp = json::parse(read_text_file(sp_dir / "spectrum.json"));
    CHECK(sp["morse_index"] == 1);
    CHECK(sp["kernel_dim"] == 1);
    CHECK(sp["translation_overlaps"][0].get<double>() >= 0.999);
    CHECK(sp["radial_gap"].get<double>() > 0.0);
    CHECK(data_rows(sp_dir / "eigenvalues.csv") == 6);

    const auto kato_dir = root() / "kato";
    REQUIRE(cli("kato " + cfg + " --out " + kato_dir.string()) == 0);
    const auto k = results(kato_dir);
    CHECK(k["strictly_decreasing"] == true);
    CHECK(k["last_over_first"].get<double>() < 0.1);

    const auto decay_dir = root() / "decay";
    REQUIRE(cli("decay " + cfg + " --out " + decay_dir.string()) == 0);
    const auto d = results(decay_dir);
    CHECK(std::abs(d["tail_fit"]["fitted_exponent"].get<double>() + 2.0) < 0.15);
    CHECK(data_rows(decay_dir / "tail.csv") == 41);
}

TEST_CASE("sweep of five s values") {
    write_config("sweep.json", R"({"s_values":[0.95,0.9,0.85,0.8,0.75],"N":2048})");
    const auto dir = root() / "sweep";
    REQUIRE(cli("sweep --config " + (root() / "sweep.json").string() + " --out " + dir.string() + " --threads 2") == 0);
    CHECK(data_rows(dir / "lambda_curve.csv") == 5);
    const auto r = results(dir);
    for (std::size_t i = 1; i < 5; ++i) {
        CHECK(r["records"][i]["scratch_h1"].get<double>() < 1e-5);
        CHECK(r["records"][i]["contraction_estimate"].get<double>() < 1.0);
    }
    CHECK(r["u_max_ratio"].get<double>() < 10.0);
    CHECK(fs::exists(dir / "u_004.field"));
}

TEST_CASE("continuation from 0.05 to 0.075") {
    write_config("cont.json", R"({"s":0.05,"continuation":{"s_target":0.075}})");
    const auto dir = root() / "continuation";
    REQUIRE(cli("continuation --config " + (root() / "cont.json").string() + " --out " + dir.string()) == 0);
    const auto r = results(dir);
    CHECK(r["contraction_estimate"].get<double>() < 1.0);
    CHECK(r["scratch_h1"].get<double>() < 1e-5);
    CHECK(r["target"]["s"].get<double>() == 0.075);
}

TEST_CASE("kernel experiment: heat and resolvent tables") {
    write_config("kernel.json", R"({"s":0.5,"kernel":{"kind":"both","radii":[0.5,1,2],"times":[0.1,1]}})");
    const auto dir = root() / "kernel";
    REQUIRE(cli("kernel --config " + (root() / "kernel.json").string() + " --out " + dir.string()) == 0);
    CHECK(data_rows(dir / "kernel.csv") == 9);
    const auto r = results(dir);
    for (const auto& m : r["heat"]["mass"]) CHECK(std::abs(m["mass"].get<double>() - 1.0) < 1e-6);
    for (const auto& c : r["resolvent"]["cross_check"])
        CHECK(std::abs(c["direct"].get<double>() - c["laplace_of_heat"].get<double>()) < 1e-4 * c["direct"].get<double>());
}

TEST_CASE("identical config, seed and threads give identical numerical output") {
    write_config("det.json", R"({"N":1024,"spectrum":{"m":4}})");
    const auto a = root() / "det_a", b = root() / "det_b";
    REQUIRE(cli("spectrum --config " + (root() / "det.json").string() + " --out " + a.string() + " --seed 9") == 0);
    REQUIRE(cli("spectrum --config " + (root() / "det.json").string() + " --out " + b.string() + " --seed 9") == 0);
    CHECK(read_text_file(a / "results.json") == read_text_file(b / "results.json"));
    CHECK(read_text_file(a / "eigenvalues.csv") == read_text_file(b / "eigenvalues.csv"));
    CHECK(read_text_file(a / "u.field") == read_text_file(b / "u.field"));
}

TEST_CASE("a saved state restarts bit-exactly") {
    const auto st = load_state(root() / "solve" / "u.field");
    const auto dir = root() / "resave";
    fs::create_directories(dir);
    save_state(dir / "u.field", st);
    CHECK(read_text_file(dir / "u.field") == read_text_file(root() / "solve" / "u.field"));
}
