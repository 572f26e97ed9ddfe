#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "projlab/engine.hpp"
#include "projlab/errors.hpp"
#include "projlab/serialize.hpp"

int main(int argc, char** argv) {
    CLI::App app{"projlab: iterates of products and averages of projections in l^p"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run_cmd =
        app.add_subcommand("run", "execute the checks described by a JSON config");
    run_cmd->add_option("config", config_path, "path to a config JSON file")->required();

    std::string scenario_name;
    std::uint64_t seed = 0;
    std::string out_dir;
    CLI::App* scen_cmd = app.add_subcommand("scenario", "run a builtin scenario");
    std::string names;
    for (const std::string& n : projlab::scenario_names())
        names += (names.empty() ? "" : ", ") + n;
    scen_cmd->add_option("name", scenario_name, "one of: " + names)->required();
    scen_cmd->add_option("--seed", seed, "root seed for all substreams (default 0)");
    scen_cmd->add_option("--out", out_dir, "output directory (default scenario-<name>)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        projlab::RunConfig config;
        if (run_cmd->parsed()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open " << config_path << "\n";
                return 3;
            }
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                std::cerr << "config parse error: " << e.what() << "\n";
                return 2;
            }
            config = projlab::config_from_json(j);
        } else {
            config = projlab::scenario(scenario_name, seed, out_dir);
            std::error_code ec;
            std::filesystem::create_directories(config.output, ec);
            if (ec) {
                std::cerr << "cannot create output directory " << config.output << ": "
                          << ec.message() << "\n";
                return 3;
            }
            std::ofstream cfg_out(std::filesystem::path(config.output) / "config.json");
            if (cfg_out) cfg_out << projlab::to_json(config).dump(2) << '\n';
            if (!cfg_out) {
                std::cerr << "cannot write config.json under " << config.output << "\n";
                return 3;
            }
        }
        return projlab::run(config);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
}
