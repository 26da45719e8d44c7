#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include "annealed_ldp/cli.hpp"
#include "test_helpers.hpp"

using namespace annealed_ldp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("annealed_ldp_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("phase sweep round trip", "[cli]") {
    TempDir tmp;
    const auto out = (tmp.path / "phase.csv").string();
    const int rc = run_cli({"phase", "--atoms", "1,3", "--probs", "0.5,0.5", "--beta",
                            "0:1:0.05", "--B", "0.1", "--output", out, "--deterministic"});
    REQUIRE(rc == 0);
    std::ifstream is(out);
    const Table t = read_csv(is);
    CHECK(t.columns == std::vector<std::string>{"beta", "B", "z_star", "psi_an", "magnetization",
                                                "susceptibility", "beta_c"});
    REQUIRE(t.rows.size() == 21);
    const auto model = two_type();
    for (const auto& row : t.rows) {
        REQUIRE(row.size() == 7);
        const ModelPoint p{row[0], row[1], model};
        CHECK(row[3] == annealed_pressure(p));  // lossless 17-digit round trip
        CHECK(row[6] == critical_beta(model));
    }
    bool has_artifact = false;
    for (const auto& [k, v] : t.meta) has_artifact = has_artifact || k == "artifact";
    CHECK(has_artifact);
}

TEST_CASE("deterministic outputs are byte-identical", "[cli]") {
    TempDir tmp;
    const auto a = (tmp.path / "a.csv").string(), b = (tmp.path / "b.csv").string();
    const std::vector<std::string> base{"phase", "--atoms", "1,3",  "--probs", "0.5,0.5",
                                        "--beta", "0:0.4:0.1", "--B", "0,0.2", "--deterministic"};
    auto with_output = [&](const std::string& o) {
        auto v = base;
        v.push_back("--output");
        v.push_back(o);
        return v;
    };
    REQUIRE(run_cli(with_output(a)) == 0);
    REQUIRE(run_cli(with_output(b)) == 0);
    CHECK(slurp(a) == slurp(b));

    // worker count does not change the bytes
    setenv("ANNEALED_LDP_THREADS", "3", 1);
    const auto c = (tmp.path / "c.csv").string();
    REQUIRE(run_cli(with_output(c)) == 0);
    unsetenv("ANNEALED_LDP_THREADS");
    CHECK(slurp(a) == slurp(c));
}

TEST_CASE("json output validates against the schema", "[cli]") {
    TempDir tmp;
    const auto out = (tmp.path / "curve.json").string();
    REQUIRE(run_cli({"rate-edges", "--atoms", "1,3", "--probs", "0.5,0.5", "--beta", "0.8",
                     "--B", "0.1", "--t", "-1:1:0.5", "--format", "json", "--output", out,
                     "--deterministic"}) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j.contains("meta"));
    REQUIRE(j.contains("columns"));
    REQUIRE(j.contains("rows"));
    CHECK(j["meta"].is_object());
    CHECK(j["columns"].get<std::vector<std::string>>() ==
          std::vector<std::string>{"t", "cgf", "cgf_derivative", "z_star_t"});
    CHECK(j["rows"].size() == 5);
    for (const auto& row : j["rows"]) CHECK(row.size() == 4);
}

TEST_CASE("rate-spin emits one column per method", "[cli]") {
    TempDir tmp;
    const auto out = (tmp.path / "rs.csv").string();
    REQUIRE(run_cli({"rate-spin", "--atoms", "1,3", "--probs", "0.5,0.5", "--beta", "0.8",
                     "--B", "0", "--m", "-0.95:0.95:0.05", "--method",
                     "contraction,combinatorial", "--output", out, "--deterministic"}) == 0);
    std::ifstream is(out);
    const Table t = read_csv(is);
    CHECK(t.columns ==
          std::vector<std::string>{"m", "rate_contraction", "rate_combinatorial"});
    REQUIRE(t.rows.size() == 39);
    for (const auto& row : t.rows) CHECK(std::abs(row[1] - row[2]) <= 1e-6);
}

TEST_CASE("oracle and mc commands", "[cli]") {
    TempDir tmp;
    {
        const auto out = (tmp.path / "oracle.csv").string();
        REQUIRE(run_cli({"oracle", "--atoms", "1,3", "--counts", "6,6", "--beta", "0.8", "--B",
                         "0.1", "--output", out, "--deterministic"}) == 0);
        std::ifstream is(out);
        const Table t = read_csv(is);
        REQUIRE(t.rows.size() == 1);
        const auto inst = make_exact_instance({6, 6}, {1.0, 3.0}, 0.8, 0.1);
        CHECK(t.rows[0][1] == exact_log_partition(inst));
    }
    {
        const auto out = (tmp.path / "dist.csv").string();
        REQUIRE(run_cli({"oracle", "--atoms", "1,3", "--counts", "4,4", "--beta", "0.5", "--B",
                         "0", "--spin-dist", "--output", out, "--deterministic"}) == 0);
        std::ifstream is(out);
        const Table t = read_csv(is);
        REQUIRE(t.rows.size() == 9);
        double sum = 0.0;
        for (const auto& row : t.rows) sum += row[1];
        CHECK(sum == Approx(1.0).margin(1e-12));
    }
    {
        const auto out = (tmp.path / "mc.csv").string();
        REQUIRE(run_cli({"mc", "--atoms", "1,3", "--counts", "50,50", "--theta", "0.5", "--B",
                         "0.2", "--sweeps", "400", "--burn-in", "100", "--seed", "7",
                         "--output", out, "--deterministic"}) == 0);
        std::ifstream is(out);
        const Table t = read_csv(is);
        REQUIRE(t.rows.size() == 1);
        bool has_prng = false;
        for (const auto& [k, v] : t.meta) has_prng = has_prng || (k == "prng" && v == "splitmix64");
        CHECK(has_prng);
    }
}

TEST_CASE("config file with flag precedence", "[cli]") {
    TempDir tmp;
    const auto cfg = (tmp.path / "run.cfg").string();
    {
        std::ofstream os(cfg);
        os << "atoms=1,3\nprobs=0.5,0.5\nbeta=0.5\nB=0.9\ndeterministic=true\n";
    }
    const auto out = (tmp.path / "out.csv").string();
    // --B on the command line overrides the config value
    REQUIRE(run_cli({"phase", "--config", cfg, "--B", "0.1", "--output", out}) == 0);
    std::ifstream is(out);
    const Table t = read_csv(is);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == 0.5);
    CHECK(t.rows[0][1] == 0.1);
}

TEST_CASE("usage and validation errors exit with 2", "[cli]") {
    std::string err;
    CHECK(run_cli({"phase", "--bogus-flag", "1"}, nullptr, &err) == 2);
    CHECK_FALSE(err.empty());
    CHECK(run_cli({}, nullptr, &err) == 2);
    CHECK(run_cli({"phase", "--atoms", "1,3", "--probs", "0.5,0.5", "--beta", "oops", "--B",
                   "0"},
                  nullptr, &err) == 2);
    CHECK(run_cli({"phase", "--atoms", "1,3", "--beta", "0.5", "--B", "0"}, nullptr, &err) == 2);
    CHECK(run_cli({"phase", "--atoms", "1,3", "--probs", "0.5,0.5", "--beta", "0.5", "--B", "0",
                   "--output", "/nonexistent_dir_zz/x.csv"},
                  nullptr, &err) == 2);
    CHECK(run_cli({"validate", "--suite", "bogus"}, nullptr, &err) == 2);
    // --help is a clean exit
    CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("validate subcommand runs selected criteria", "[cli]") {
    std::string out;
    const int rc = run_cli({"validate", "--suite", "acceptance", "--criteria", "2"}, &out);
    CHECK(rc == 0);
    CHECK(out.find("critical temperature") != std::string::npos);
    CHECK(out.find("[PASS]") != std::string::npos);
}
