// Command-line front end:
//   transmonlab spectrum|chip|fem|converge --config <path> [--out <dir>] [--format csv|svg|both]
//   transmonlab presets list [--json]

#include "transmonlab/io/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    using namespace tlab::io;

    CLI::App app{"Transmon spectra, chip sweeps and 2D electrostatics"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    struct RunArgs {
        std::string config;
        std::optional<std::string> out;
        std::optional<std::string> format;
    };
    std::map<std::string, RunArgs> args;
    for (const char* name : {"spectrum", "chip", "fem", "converge"}) {
        auto& a = args[name];
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " command");
        sub->add_option("--config", a.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", a.out, "output directory (overrides output.dir)");
        sub->add_option("--format", a.format, "csv, svg or both (overrides output.format)")
            ->check(CLI::IsMember({"csv", "svg", "both"}));
    }
    auto* presets = app.add_subcommand("presets", "builtin chip and material presets");
    auto* list = presets->add_subcommand("list", "print the builtin presets");
    bool as_json = false;
    list->add_flag("--json", as_json, "print in the preset-file JSON schema");
    presets->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_code::ok : exit_code::validation;
    }

    if (list->parsed()) {
        if (as_json) std::cout << presets_json().dump(2) << "\n";
        else std::cout << presets_listing();
        return exit_code::ok;
    }
    for (auto& [name, a] : args) {
        if (!app.got_subcommand(name)) continue;
        std::optional<std::filesystem::path> out;
        if (a.out) out = *a.out;
        return run_cli(parse_command(name), a.config, out, a.format, std::cout, std::cerr);
    }
    return exit_code::validation;
}
