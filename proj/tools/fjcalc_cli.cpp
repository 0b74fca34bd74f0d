#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fjcalc/errors.hpp"
#include "fjcalc/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fjcalc: exact verification of Fourier-Jacobi toy models"};
    app.require_subcommand(1);
    int indent = 2;
    bool no_timing = false;
    app.add_option("--json-indent", indent, "Indentation of the JSON report (-1 for one line)");
    app.add_flag("--no-timing", no_timing, "Omit the timing section");

    std::string target;
    auto* run = app.add_subcommand("run", "Run a scenario file (.json or .toml) or a built-in scenario");
    run->add_option("scenario", target, "Path or built-in name")->required();
    auto* list = app.add_subcommand("list", "List built-in scenarios");
    std::string name;
    auto* describe = app.add_subcommand("describe", "Print a built-in scenario definition");
    describe->add_option("name", name, "Built-in name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*list) {
            for (const auto& [n, d] : fjc::list_scenarios()) std::cout << n << "\t" << d << "\n";
            return 0;
        }
        if (*describe) {
            std::cout << fjc::to_json(fjc::builtin_scenario(name)).dump(indent) << "\n";
            return 0;
        }
        auto scenario = fjc::load_scenario(target);
        auto report = fjc::run_scenario(scenario);
        nlohmann::json doc{{"report", report.verdicts()}};
        if (!no_timing) doc["timing"] = report.timing();
        std::cout << doc.dump(indent) << "\n";
        if (!report.pass()) std::cerr << "CheckFailed: " << report.first_failure() << "\n";
        return fjc::exit_code(report);
    } catch (const fjc::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
