#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include <qmem/cli/scenario.hpp>

using namespace qmem;
using namespace qmem::cli;
namespace fs = std::filesystem;

namespace {

const char *minimal = R"(
schema_version = 1
kind = "certify"
name = "probe"

[certify]
test = "g2_memory"

[detector]
eta_d = 0.5
p_dc = 0.01
)";

int run_cli(const std::string &args)
{
    std::string cmd = std::string(QMEM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<fs::path> bundled()
{
    std::vector<fs::path> v;
    for (const auto &e : fs::directory_iterator(QMEM_SCENARIO_DIR)) {
        if (e.path().extension() == ".toml") {
            v.push_back(e.path());
        }
    }
    std::sort(v.begin(), v.end());
    return v;
}

fs::path scratch(const std::string &name)
{
    auto p = fs::temp_directory_path() / ("qmem_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Config, ParsesSectionsAndTypes)
{
    auto f = ConfigFile::parse(R"(
a = 1.5   # comment
b = true
[sec]
s = "x # not a comment"
v = [1, 2.5, -3e2]
w = ["p", "q"]
)");
    EXPECT_EQ(f.root().number("a"), 1.5);
    EXPECT_TRUE(f.root().flag("b", false));
    const auto &s = f.section("sec");
    EXPECT_EQ(s.text("s"), "x # not a comment");
    EXPECT_EQ(s.numbers("v", {}), (std::vector<double>{1.0, 2.5, -300.0}));
    EXPECT_EQ(s.texts("w", {}), (std::vector<std::string>{"p", "q"}));
    EXPECT_NO_THROW(f.finish());
}

TEST(Config, RejectsMalformedInput)
{
    for (const char *bad : {"a = 1\na = 2", "[s]\n[s]", "A = 1", "a = 1x", "a = \"open",
                            "a = [1, 2", "just text", "[bad name]"}) {
        EXPECT_THROW(ConfigFile::parse(bad), Error) << bad;
    }
    auto f = ConfigFile::parse("a = \"x\"");
    EXPECT_THROW(f.root().number("a"), Error);
    EXPECT_THROW(f.root().number("missing"), Error);
}

TEST(Config, UnknownKeysAndSectionsRejected)
{
    auto f = ConfigFile::parse("a = 1\nstray = 2\n");
    f.root().number("a");
    EXPECT_THROW(f.finish(), Error);
    EXPECT_THROW(run_scenario(std::string(minimal) + "typo = 3\n", {}), Error);
    EXPECT_THROW(run_scenario(std::string(minimal) + "[extra]\nx = 1\n", {}), Error);
    EXPECT_NO_THROW(run_scenario(minimal, {}));
}

TEST(Scenario, SchemaVersionChecked)
{
    std::string s = minimal;
    s.replace(s.find("schema_version = 1"), 18, "schema_version = 2");
    EXPECT_THROW(run_scenario(s, {}), Error);
}

TEST(Scenario, ReportFieldsStable)
{
    auto a = run_scenario(minimal, {});
    const auto &r = a.report;
    for (const char *k : {"test", "detector", "conditioned", "result", "scenario"}) {
        EXPECT_TRUE(r.contains(k)) << k;
    }
    for (const char *k : {"criterion", "value", "threshold", "passes_quantum", "warnings"}) {
        EXPECT_TRUE(r["result"].contains(k)) << k;
    }
    EXPECT_NEAR(r["result"]["value"].get<double>(),
                g2_memory({0.5, 0.01, 1.0}).value, 1e-12);
}

TEST(Scenario, CatalogComplete)
{
    auto files = bundled();
    EXPECT_GE(files.size(), 10u);
    for (const auto &f : files) {
        auto c = ConfigFile::parse(read_file(f));
        EXPECT_FALSE(c.root().text("figure", "").empty()) << f;
        EXPECT_FALSE(c.root().text("description", "").empty()) << f;
    }
}

TEST(Cli, ValidateOnlyOnEveryBundledScenario)
{
    for (const auto &f : bundled()) {
        auto out = scratch("validate");
        EXPECT_EQ(run_cli("run " + f.string() + " --validate-only --out " + out.string()), 0) << f;
        EXPECT_FALSE(fs::exists(out)) << f;
    }
}

TEST(Cli, ExitCodes)
{
    auto dir = scratch("codes");
    fs::create_directories(dir);
    auto write = [&](const std::string &name, const std::string &body) {
        auto p = dir / name;
        std::ofstream(p) << body;
        return p.string();
    };
    EXPECT_EQ(run_cli("run " + write("bad.toml", std::string(minimal) + "oops = 1\n")), 2);
    EXPECT_EQ(run_cli("run " + write("flip.toml", R"(
schema_version = 1
kind = "echo"
name = "flip"
[echo]
protocol = "crib_fwd"
d = 1.0
tau = 1.0
)")),
              2);
    auto gate = write("gate.toml", R"(
schema_version = 1
kind = "echo"
name = "gate"
[echo]
protocol = "crib_fwd"
d = 4.0
[numerics]
nz = 20
z_scheme = "euler"
convergence_gate = true
gate_tolerance = 0.0001
)");
    EXPECT_EQ(run_cli("run " + gate + " --out " + (dir / "g").string()), 3);
    auto warn = write("warn.toml", R"(
schema_version = 1
kind = "certify"
name = "warn"
[certify]
test = "tv"
protocol = "slowlight"
alpha = 0.5
beta = 0.5
)");
    EXPECT_EQ(run_cli("run " + warn + " --out " + (dir / "w").string()), 0);
    EXPECT_EQ(run_cli("run " + warn + " --strict --out " + (dir / "w").string()), 4);
    EXPECT_EQ(run_cli("--list"), 0);
}

TEST(Cli, ArtifactsByteIdenticalAcrossRunsAndThreads)
{
    for (const char *name : {"fig5_crib_numeric", "fig3_2pe_ratio2", "fig11_fid",
                             "fig8_shaded_area_lorentzian", "table_chain_convergence"}) {
        auto a = scratch(std::string("det_a_") + name);
        auto b = scratch(std::string("det_b_") + name);
        auto c = scratch(std::string("det_c_") + name);
        ASSERT_EQ(run_cli(std::string("run ") + name + " --threads 1 --out " + a.string()), 0);
        ASSERT_EQ(run_cli(std::string("run ") + name + " --threads 1 --out " + b.string()), 0);
        ASSERT_EQ(run_cli(std::string("run ") + name + " --threads 3 --out " + c.string()), 0);
        for (const char *file : {"traces.csv", "sweep.csv"}) {
            if (!fs::exists(a / file)) {
                continue;
            }
            auto ta = read_file(a / file);
            EXPECT_EQ(ta, read_file(b / file)) << name << " " << file;
            EXPECT_EQ(ta, read_file(c / file)) << name << " " << file;
        }
    }
}

TEST(Cli, CsvLayout)
{
    auto out = scratch("csv");
    ASSERT_EQ(run_cli("run fig6_slowlight_il --out " + out.string()), 0);
    auto csv = read_file(out / "traces.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "field,t,re,im,intensity");
    EXPECT_NE(csv.find("\noutput,"), std::string::npos);
    auto rep = nlohmann::json::parse(read_file(out / "report.json"));
    EXPECT_NEAR(rep["peak_delay"].get<double>(), 10.0, 0.5);
}
