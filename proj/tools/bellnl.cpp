#include "bellnl/runspec.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

int main(int argc, char** argv) {
    CLI::App app{"Bell-inequality toolkit for spin states"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bellnl::kVersion);

    std::string spec_path;
    std::string out;
    std::string format;
    unsigned threads = 0;
    std::uint64_t seed = 0;

    const std::pair<const char*, const char*> commands[] = {
        {"evaluate", "evaluate a functional at fixed settings"},
        {"optimize", "search settings for the largest violation"},
        {"lhv-bound", "classical bound by strategy enumeration"},
        {"scan", "sweep one parameter over a grid"},
        {"selftest", "run the built-in consistency checks"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        auto* spec = sub->add_option("--spec", spec_path, "JSON run-spec file");
        if (std::string(name) != "selftest") spec->required();
        sub->add_option("--out", out, "output file (default: stdout)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", threads, "worker threads (0: all cores)");
        sub->add_option("--seed", seed, "search seed, overrides the spec");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bellnl::cli::kMalformed;
    }

    const auto* sub = app.get_subcommands().front();
    bellnl::cli::Options opt;
    opt.command = sub->get_name();
    opt.threads = threads;
    if (sub->count("--out")) opt.out = out;
    if (sub->count("--format")) opt.format = format;
    if (sub->count("--seed")) opt.seed = seed;

    std::string text = "{}";
    if (!spec_path.empty()) {
        std::ifstream f(spec_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot read spec '" << spec_path << "'\n";
            return bellnl::cli::kMalformed;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    return bellnl::cli::run(text, opt, std::cerr, std::cout);
}
