#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include <qmem/cli/scenario.hpp>

namespace fs = std::filesystem;
using namespace qmem;
using namespace qmem::cli;

#ifndef QMEM_SCENARIO_DIR
#define QMEM_SCENARIO_DIR "scenarios"
#endif

namespace {

fs::path scenario_dir()
{
    if (const char *e = std::getenv("QMEM_SCENARIO_DIR")) {
        return e;
    }
    return QMEM_SCENARIO_DIR;
}

fs::path resolve(const std::string &name)
{
    fs::path p(name);
    if (fs::exists(p)) {
        return p;
    }
    auto q = scenario_dir() / p;
    if (fs::exists(q)) {
        return q;
    }
    q.replace_extension(".toml");
    if (fs::exists(q)) {
        return q;
    }
    throw Error(ErrorKind::Validation, "config not found: " + name);
}

int list_scenarios()
{
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(scenario_dir())) {
        if (e.path().extension() == ".toml") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
        auto c = ConfigFile::parse(read_file(f));
        const auto &r = c.root();
        std::printf("%-32s %-10s %-16s %s\n", f.stem().string().c_str(),
                    r.text("kind", "").c_str(), r.text("figure", "").c_str(),
                    r.text("description", "").c_str());
    }
    return 0;
}

void print_error(const std::string &kind, const std::string &msg)
{
    nlohmann::json e = {{"error", {{"kind", kind}, {"message", msg}}}};
    std::cerr << e.dump() << "\n";
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Quantum memory protocol simulator"};
    bool list = false;
    app.add_flag("--list", list, "List bundled scenarios");
    auto *run = app.add_subcommand("run", "Run a scenario file");
    std::string config;
    std::string out;
    RunOptions opt;
    bool strict = false;
    run->add_option("config", config, "Scenario file or bundled name")->required();
    run->add_option("--out", out, "Output directory");
    run->add_flag("--validate-only", opt.validate_only, "Check the scenario only");
    run->add_option("--grid-scale", opt.grid_scale, "Multiply grid densities")
        ->check(CLI::PositiveNumber);
    run->add_option("--threads", opt.threads, "Worker threads (0 = default)")
        ->check(CLI::NonNegativeNumber);
    run->add_flag("--strict", strict, "Exit 4 on numeric-regime warnings");
    CLI11_PARSE(app, argc, argv);

    try {
        if (list) {
            return list_scenarios();
        }
        if (!run->parsed()) {
            std::cerr << app.help();
            return 2;
        }
        auto path = resolve(config);
        auto a = run_scenario(read_file(path), opt);
        for (const auto &w : a.warnings) {
            std::cerr << "warning: " << to_string(w.kind) << ": " << w.message << "\n";
        }
        if (opt.validate_only) {
            std::printf("%s: valid\n", a.info.name.c_str());
            return strict && !a.warnings.empty() ? 4 : 0;
        }
        fs::path dir = !out.empty() ? fs::path(out)
                       : !a.info.out.empty() ? fs::path(a.info.out)
                                             : fs::path("out") / a.info.name;
        write_artifacts(a, dir);
        std::printf("%s: wrote %s\n", a.info.name.c_str(), dir.string().c_str());
        return strict && !a.warnings.empty() ? 4 : 0;
    } catch (const Error &e) {
        print_error(to_string(e.kind()), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception &e) {
        print_error("Validation", e.what());
        return 2;
    }
}
