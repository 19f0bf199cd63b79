#pragma once

#include "qlbm/qmem.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlbm::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InitialField {
    enum class Type { Uniform, Table, Impulse };
    Type type = Type::Uniform;
    /// Uniform: every population of every fluid cell; impulse: the injected
    /// population value.
    double value = 1.0;
    /// Table: one row of q values per cell, in cell-index order.
    std::vector<std::vector<double>> table;
    IVec cell{0, 0, 0};
    int direction = 0;
};

struct RunConfig {
    int dimension = 1;
    std::vector<int> extents;
    std::vector<ObstacleBox> obstacles;
    InitialField initial;
    int timesteps = 0;
    qmem::ForceMeasurementConfig measurement;
    bool compare = false;
    std::string output = "results.csv";

    static RunConfig from_json_text(const std::string& text, const std::string& origin);
    static RunConfig from_json_file(const std::filesystem::path& path);
    std::string to_json_text() const;
};

/// Geometry, layout and initial field realized from a validated config.
struct Domain {
    std::shared_ptr<const DomainGeometry> geometry;
    sv::RegisterLayout layout;
    ClassicalFlowField initial;
};

Domain build_domain(const RunConfig& config);

inline constexpr int kQubitBudget = 26;
inline constexpr double kCompareTolerance = 1e-8;

struct RunResult {
    int exit_code = 0;
    double max_deviation = 0.0;
    std::filesystem::path csv_path;
};

/// Executes the configured run: T timesteps with per-step force measurement,
/// CSV output under out_dir, optional classical lockstep comparison.
/// Exit code 0 on success, 2 if the comparison deviation exceeded the
/// tolerance; config and state errors throw.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log,
              bool verbose);

/// Per-phase primitive gate counts of the configured timestep circuit plus
/// the per-dimension momentum-flag circuits, as a printable table.
std::string gate_report(const RunConfig& config);

} // namespace qlbm::cli
