#include "retfield/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Retarded-field evaluation runs"};
    app.require_subcommand(1);

    std::string config_path;
    bool validate_only = false;
    unsigned threads = 1;
    std::string output_dir;

    CLI::App* run = app.add_subcommand("run", "Execute the tasks of a run configuration");
    run->add_option("config", config_path, "Run configuration (JSON)")->required();
    run->add_flag("--validate-only", validate_only, "Parse and validate, print the resolved config, then exit");
    run->add_option("--threads", threads, "Worker threads (0 = all hardware threads)");
    run->add_option("--output-dir", output_dir, "Override output.directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    retfield::ParsedConfig parsed;
    try {
        parsed = retfield::load_config(config_path);
    } catch (const retfield::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    for (const auto& w : parsed.warnings)
        std::cerr << "warning: " << w << "\n";

    if (validate_only) {
        std::cout << retfield::to_json(parsed.config).dump(2) << "\n";
        return 0;
    }

    retfield::RunOptions opts;
    opts.threads = threads;
    if (!output_dir.empty())
        opts.output_dir = output_dir;

    try {
        const retfield::RunReport report = retfield::run_tasks(parsed.config, opts);
        for (const auto& t : report.report["tasks"]) {
            std::cout << t["task"].get<std::string>() << ": " << t["status"].get<std::string>();
            if (t.contains("error"))
                std::cout << " (" << t["error"].get<std::string>() << ")";
            std::cout << "\n";
        }
        std::cout << "output: " << report.output_dir.string() << "\n";
        return report.any_error ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
