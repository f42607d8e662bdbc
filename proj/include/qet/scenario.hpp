#pragma once

#include "qet/event_statistics.hpp"
#include "qet/oracle.hpp"
#include "qet/photon.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qet {

using Json = nlohmann::ordered_json;

// What kind of photon packet a config describes.
struct PacketSpec {
    enum class Type { gaussian, chirped_gaussian, rectangular, samples };
    Type type = Type::gaussian;
    double omega0 = 0.0;
    double sigma = 0.0;
    double beta = 0.0;
    double width = 0.0;
    double span = 2.0;
    double halfwidth = 0.0; // 0 → module default
    Eigen::Index n = 0;
    // samples only:
    double omega_min = 0.0;
    double domega = 0.0;
    Eigen::VectorXcd values;
};

struct SweepSpec {
    std::string parameter; // finite_dim: "d"|"dt"; photon_arrival: "n";
                           // photon_frequency: "total_time"
    std::vector<double> values;
};

struct ScenarioConfig {
    enum class Kind { finite_dim, photon_arrival, photon_frequency };
    Kind kind = Kind::finite_dim;
    std::string name;
    std::string source_path;
    std::string source_hash; // "fnv1a64:<16 hex digits>" of the config bytes

    // finite_dim
    Eigen::Index clock_d = 0;
    double clock_dt = 0.0;
    Eigen::Index system_dimension = 0;
    Eigen::MatrixXcd hamiltonian;
    Eigen::VectorXcd initial_state;
    Eigen::MatrixXcd projector;
    std::string event_label;

    // photon
    PacketSpec packet;
    double screen_position = 0.0;
    double speed = 1.0;
    double omega0 = 0.0;
    double total_time = 0.0;

    std::optional<SweepSpec> sweep;
    Tolerances tolerances;
};

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& bytes);

// Throws io_error when the file cannot be read, validation_error (naming the
// offending field) when the content is malformed.
ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(const Json& j, const std::string& source_path,
                              const std::string& source_hash);

struct ScenarioResult {
    Json report;           // complete report object, ready to serialize
    Eigen::VectorXd times; // distribution grid for the CSV
    Eigen::VectorXd p;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Same report, assembled entirely from the dense-oracle route (finite_dim
// only; joint dimension must fit the oracle cap). Used by `oracle-check` and
// to produce golden reports.
ScenarioResult run_scenario_oracle(const ScenarioConfig& cfg);

struct ReportComparison {
    double max_deviation = 0.0;       // max over numeric fields of |a−b|/(1+|a|+|b|)
    std::vector<std::string> mismatches; // fields beyond tolerance, human-readable
};

// Recursively compares the result sections of two reports; strings and
// booleans must match exactly, numbers within the given relative deviation.
ReportComparison compare_reports(const Json& a, const Json& b, double tolerance);

struct SweepRow {
    double parameter = 0.0;
    double t_std = 0.0;
    double e_std = 0.0;
    double product = 0.0;
    double margin = 0.0;
    double constraint_residual = 0.0;  // NaN for photon scenarios
    double commutator_residual = 0.0;  // NaN for photon scenarios
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool margin_monotone = false; // margins never decrease along the sweep
};

// Sweeping "d" holds total_time fixed (dt = T/d); sweeping "dt" holds d fixed;
// sweeping "n" regenerates the packet on a finer grid of the same window.
SweepResult run_sweep(const ScenarioConfig& cfg);

// Serialization. Reports are byte-identical across runs of the same config
// except for the generated_at line. render_report validates the assembled
// object against the published schema before returning.
std::string render_report(const Json& report);
std::string distribution_csv(const Eigen::VectorXd& times, const Eigen::VectorXd& p);
std::string sweep_csv(const SweepResult& sweep);

// Structural re-validation of an emitted report; throws validation_error.
void validate_report_json(const Json& report);

// Random finite-dim scenario for the property corpus and oracle comparisons.
struct RandomScenarioOptions {
    std::vector<Eigen::Index> system_dims = {2, 3};
    Eigen::Index clock_d = 512;
    double hamiltonian_norm = 5.0; // spectral norm after rescaling
    double norm_times_dt = 0.05;   // dt = norm_times_dt / hamiltonian_norm
};

struct RandomScenario {
    Eigen::Index d = 0;
    double dt = 0.0;
    HermitianOperator hamiltonian;
    StateVector initial_state;
    Projector projector;
};

RandomScenario make_random_scenario(std::mt19937_64& rng,
                                    const RandomScenarioOptions& opt);

// The randomized property corpus behind `qet verify`.
struct VerifySummary {
    int trials = 0;
    int failures = 0;
    std::vector<std::string> messages; // one line per failed property
};

VerifySummary run_verification(std::uint64_t seed, int trials);

} // namespace qet
