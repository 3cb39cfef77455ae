#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pumbem/galerkin.hpp"

namespace pumbem {

/// Everything an experiment reads. Flat so that every key doubles as a CLI flag.
struct ExperimentConfig {
    std::string experiment;

    std::string mesh = "sphere";  ///< sphere | torus | file
    int refinement = 1;
    std::string mesh_file;
    double torus_major = 1.0;
    double torus_minor = 0.5;
    int torus_n_major = 12;
    int torus_n_minor = 6;
    std::string spatial = "P1";

    double T = 1.0;
    int steps = 8;
    std::vector<double> breakpoints;  ///< overrides T and steps when non-empty
    std::vector<int> step_sweep;
    int p = 1;
    std::vector<int> degrees;
    std::string rhs = "rhs1";

    int n_sing = 10;
    int n_near = 8;
    int n_far = 6;
    int cells = 5;   ///< Chebyshev cells per window of four smallest steps
    int q = 20;
    std::vector<std::array<int, 3>> order_table;
    std::array<int, 3> reference_orders{20, 15, 12};

    double alpha = 0.5;
    int max_iter = 10;
    int indicator_order = 16;
    int residual_order = 12;
    std::vector<std::array<double, 3>> observation_points;

    int samples = 2000;       ///< sup-error samples or trace samples per unit time
    double sample_step = 0.05;
    std::string out = "out";
    int threads = 1;

    AssemblyOptions assembly() const;
    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// Defaults for a named experiment. Throws std::invalid_argument for an unknown name.
ExperimentConfig default_config(const std::string& experiment);
const std::vector<std::string>& experiment_names();

using Cell = std::variant<long long, double, std::string>;

/// CSV table with a one-line header; doubles print as %.12e.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
    std::string to_csv() const;
};

struct ExperimentResult {
    std::vector<std::pair<std::string, Table>> tables;  ///< file stem -> table
    nlohmann::json summary = nlohmann::json::object();
    const Table& table(const std::string& name) const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

ExperimentResult psi_table(const ExperimentConfig& config);
ExperimentResult quad_cases(const ExperimentConfig& config);
ExperimentResult converge(const ExperimentConfig& config);
ExperimentResult quad_influence(const ExperimentConfig& config);
ExperimentResult long_term(const ExperimentConfig& config);
ExperimentResult torus(const ExperimentConfig& config);
ExperimentResult adapt_1d(const ExperimentConfig& config);
ExperimentResult adapt_3d(const ExperimentConfig& config);

SurfaceMesh build_mesh(const ExperimentConfig& config);
TimeGrid build_grid(const ExperimentConfig& config);

/// Hex SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(const std::string& content);

/// Writes one CSV per table plus manifest.json (config, summary, per-file hashes
/// and a hash over all outputs) into `directory`. Returns the manifest.
nlohmann::json write_outputs(const ExperimentResult& result, const ExperimentConfig& config, const std::string& directory);

}  // namespace pumbem
