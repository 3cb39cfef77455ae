#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pumbem/experiments.hpp"

using nlohmann::json;

namespace {

// A flag value is read as JSON when possible; "2,4,8" becomes a list when the
// field is a list, anything else falls back to a plain string.
json parse_flag(const std::string& text, const json& current) {
    if (current.is_array()) {
        const std::string wrapped = text.starts_with('[') ? text : "[" + text + "]";
        return json::parse(wrapped);
    }
    if (current.is_string()) return text;
    return json::parse(text);
}

struct Subcommand {
    CLI::App* app = nullptr;
    std::string config_path;
    std::string out;
    int threads = 1;
    std::map<std::string, std::string> overrides;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-time Galerkin boundary elements for the wave equation: experiment runner"};
    app.require_subcommand(1);
    std::map<std::string, Subcommand> commands;
    for (const auto& name : pumbem::experiment_names()) {
        auto& cmd = commands[name];
        cmd.app = app.add_subcommand(name, "run the " + name + " experiment");
        cmd.app->add_option("--config", cmd.config_path, "JSON config file")->check(CLI::ExistingFile);
        cmd.app->add_option("--out", cmd.out, "output directory");
        cmd.app->add_option("--threads", cmd.threads, "worker threads")->check(CLI::PositiveNumber);
        const json defaults = pumbem::default_config(name);
        for (const auto& [key, value] : defaults.items()) {
            if (key == "out" || key == "threads" || key == "experiment") continue;
            cmd.app->add_option("--" + key, cmd.overrides[key], "override (default " + value.dump() + ")");
        }
    }
    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [name, cmd] : commands) {
            if (!cmd.app->parsed()) continue;
            json config = pumbem::default_config(name);
            if (!cmd.config_path.empty()) {
                std::ifstream in(cmd.config_path);
                json file = json::parse(in);
                if (file.contains("experiment") && file["experiment"] != name)
                    throw std::invalid_argument("config file is for experiment " + file["experiment"].get<std::string>());
                config.update(file);
            }
            for (const auto& [key, text] : cmd.overrides)
                if (cmd.app->get_option("--" + key)->count() > 0) config[key] = parse_flag(text, config[key]);
            if (cmd.app->get_option("--out")->count() > 0) config["out"] = cmd.out;
            if (cmd.app->get_option("--threads")->count() > 0) config["threads"] = cmd.threads;

            const auto parsed = config.get<pumbem::ExperimentConfig>();
            parsed.validate();
            const auto result = pumbem::run_experiment(parsed);
            const json manifest = pumbem::write_outputs(result, parsed, parsed.out);
            std::cout << name << ": wrote " << manifest["files"].size() << " table(s) to " << parsed.out << '\n'
                      << "content hash " << manifest["content_hash"].get<std::string>() << '\n'
                      << result.summary.dump(2) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
