#include "qlbm/driver.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <utility>

namespace qlbm::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config error at '" + where + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object())
        fail(where, "expected an object");
    const auto it = j.find(key);
    if (it == j.end())
        fail(where, std::string("missing key '") + key + "'");
    return *it;
}

int get_int(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        fail(where, "expected an integer");
    return v.get<int>();
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number())
        fail(where, "expected a number");
    return v.get<double>();
}

std::uint64_t get_u64(const json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(where, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

IVec get_ivec(const json& v, int d, const std::string& where) {
    if (!v.is_array() || static_cast<int>(v.size()) != d)
        fail(where, "expected an array with one entry per dimension");
    IVec x{0, 0, 0};
    for (int j = 0; j < d; ++j)
        x[j] = get_int(v[j], where);
    return x;
}

qmem::ForceMeasurementConfig::Mode parse_mode(const std::string& text, const std::string& where) {
    using Mode = qmem::ForceMeasurementConfig::Mode;
    if (text == "observable")
        return Mode::ObservableExact;
    if (text == "ancilla")
        return Mode::AncillaExact;
    if (text == "shots")
        return Mode::AncillaShots;
    fail(where, "mode must be one of observable, ancilla, shots");
}

std::string mode_name(qmem::ForceMeasurementConfig::Mode mode) {
    using Mode = qmem::ForceMeasurementConfig::Mode;
    switch (mode) {
    case Mode::ObservableExact:
        return "observable";
    case Mode::AncillaExact:
        return "ancilla";
    case Mode::AncillaShots:
        return "shots";
    }
    return "observable";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }

    RunConfig cfg;
    cfg.dimension = get_int(require(j, "dimension", origin), origin + ".dimension");
    if (cfg.dimension < 1 || cfg.dimension > 3)
        fail(origin + ".dimension", "dimension must be 1, 2 or 3");

    const json& ext = require(j, "extents", origin);
    if (!ext.is_array() || static_cast<int>(ext.size()) != cfg.dimension)
        fail(origin + ".extents", "expected one extent per dimension");
    for (std::size_t k = 0; k < ext.size(); ++k)
        cfg.extents.push_back(get_int(ext[k], origin + ".extents"));

    if (j.contains("obstacles")) {
        const json& obs = j["obstacles"];
        if (!obs.is_array())
            fail(origin + ".obstacles", "expected an array of boxes");
        for (std::size_t b = 0; b < obs.size(); ++b) {
            const std::string where = origin + ".obstacles[" + std::to_string(b) + "]";
            ObstacleBox box;
            box.lo = get_ivec(require(obs[b], "lo", where), cfg.dimension, where + ".lo");
            box.hi = get_ivec(require(obs[b], "hi", where), cfg.dimension, where + ".hi");
            cfg.obstacles.push_back(box);
        }
    }

    const json& init = require(j, "initial", origin);
    const std::string init_where = origin + ".initial";
    const json& type = require(init, "type", init_where);
    if (!type.is_string())
        fail(init_where + ".type", "expected a string");
    const std::string type_text = type.get<std::string>();
    if (type_text == "uniform") {
        cfg.initial.type = InitialField::Type::Uniform;
        cfg.initial.value = get_number(require(init, "value", init_where), init_where + ".value");
    } else if (type_text == "impulse") {
        cfg.initial.type = InitialField::Type::Impulse;
        cfg.initial.cell =
            get_ivec(require(init, "cell", init_where), cfg.dimension, init_where + ".cell");
        cfg.initial.direction =
            get_int(require(init, "direction", init_where), init_where + ".direction");
        cfg.initial.value = init.contains("value")
                                ? get_number(init["value"], init_where + ".value")
                                : 1.0;
    } else if (type_text == "table") {
        cfg.initial.type = InitialField::Type::Table;
        const json& values = require(init, "values", init_where);
        if (!values.is_array())
            fail(init_where + ".values", "expected an array of per-cell rows");
        for (std::size_t c = 0; c < values.size(); ++c) {
            const std::string where = init_where + ".values[" + std::to_string(c) + "]";
            if (!values[c].is_array())
                fail(where, "expected an array of population values");
            std::vector<double> row;
            for (std::size_t i = 0; i < values[c].size(); ++i)
                row.push_back(get_number(values[c][i], where));
            cfg.initial.table.push_back(std::move(row));
        }
    } else {
        fail(init_where + ".type", "type must be one of uniform, table, impulse");
    }

    cfg.timesteps = get_int(require(j, "timesteps", origin), origin + ".timesteps");
    if (cfg.timesteps < 0)
        fail(origin + ".timesteps", "timesteps must be nonnegative");

    if (j.contains("measurement")) {
        const json& m = j["measurement"];
        const std::string where = origin + ".measurement";
        if (m.contains("mode")) {
            const json& mode = m["mode"];
            if (!mode.is_string())
                fail(where + ".mode", "expected a string");
            cfg.measurement.mode = parse_mode(mode.get<std::string>(), where + ".mode");
        }
        if (m.contains("shots"))
            cfg.measurement.shots = get_u64(m["shots"], where + ".shots");
        if (m.contains("seed"))
            cfg.measurement.seed = get_u64(m["seed"], where + ".seed");
        if (m.contains("epsilon"))
            cfg.measurement.epsilon = get_number(m["epsilon"], where + ".epsilon");
    }
    if (cfg.measurement.mode == qmem::ForceMeasurementConfig::Mode::AncillaShots &&
        cfg.measurement.shots < 1)
        fail(origin + ".measurement.shots", "shots mode needs a positive shot count");

    if (j.contains("compare")) {
        if (!j["compare"].is_boolean())
            fail(origin + ".compare", "expected a boolean");
        cfg.compare = j["compare"].get<bool>();
    }
    if (j.contains("output")) {
        if (!j["output"].is_string())
            fail(origin + ".output", "expected a string");
        cfg.output = j["output"].get<std::string>();
        if (cfg.output.empty())
            fail(origin + ".output", "output file name must not be empty");
    }
    return cfg;
}

RunConfig RunConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path.filename().string());
}

std::string RunConfig::to_json_text() const {
    json j;
    j["dimension"] = dimension;
    j["extents"] = extents;
    json obs = json::array();
    for (const ObstacleBox& box : obstacles) {
        json b;
        b["lo"] = std::vector<int>(box.lo.begin(), box.lo.begin() + dimension);
        b["hi"] = std::vector<int>(box.hi.begin(), box.hi.begin() + dimension);
        obs.push_back(b);
    }
    j["obstacles"] = obs;
    json init;
    switch (initial.type) {
    case InitialField::Type::Uniform:
        init["type"] = "uniform";
        init["value"] = initial.value;
        break;
    case InitialField::Type::Impulse:
        init["type"] = "impulse";
        init["cell"] = std::vector<int>(initial.cell.begin(), initial.cell.begin() + dimension);
        init["direction"] = initial.direction;
        init["value"] = initial.value;
        break;
    case InitialField::Type::Table:
        init["type"] = "table";
        init["values"] = initial.table;
        break;
    }
    j["initial"] = init;
    j["timesteps"] = timesteps;
    json m;
    m["mode"] = mode_name(measurement.mode);
    m["shots"] = measurement.shots;
    m["seed"] = measurement.seed;
    m["epsilon"] = measurement.epsilon;
    j["measurement"] = m;
    j["compare"] = compare;
    j["output"] = output;
    return j.dump(2);
}

namespace {

ClassicalFlowField build_initial(const RunConfig& cfg,
                                 const std::shared_ptr<const DomainGeometry>& geometry) {
    const LatticeDescriptor& lat = geometry->lattice();
    ClassicalFlowField field(geometry);
    switch (cfg.initial.type) {
    case InitialField::Type::Uniform: {
        if (!(cfg.initial.value > 0.0))
            throw ConfigError("config error at 'initial.value': uniform value must be positive");
        for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
            if (geometry->solid_at(c))
                continue;
            for (int i = 0; i < lat.num_velocities(); ++i)
                field.at_cell(c, i) = cfg.initial.value;
        }
        break;
    }
    case InitialField::Type::Impulse: {
        const IVec& x = cfg.initial.cell;
        for (int j = 0; j < lat.dim(); ++j)
            if (x[j] < 0 || x[j] >= lat.extent(j))
                throw ConfigError("config error at 'initial.cell': coordinate out of range");
        if (cfg.initial.direction < 0 || cfg.initial.direction >= lat.num_velocities())
            throw ConfigError("config error at 'initial.direction': no such velocity index");
        if (geometry->solid(x))
            throw ConfigError("config error at 'initial.cell': impulse cell is inside an obstacle");
        if (!(cfg.initial.value > 0.0))
            throw ConfigError("config error at 'initial.value': impulse value must be positive");
        field.at(x, cfg.initial.direction) = cfg.initial.value;
        break;
    }
    case InitialField::Type::Table: {
        if (static_cast<std::int64_t>(cfg.initial.table.size()) != lat.num_cells())
            throw ConfigError("config error at 'initial.values': need one row per cell (" +
                              std::to_string(lat.num_cells()) + ")");
        double mass = 0.0;
        for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
            const std::vector<double>& row = cfg.initial.table[c];
            if (static_cast<int>(row.size()) != lat.num_velocities())
                throw ConfigError("config error at 'initial.values[" + std::to_string(c) +
                                  "]': need one value per velocity (" +
                                  std::to_string(lat.num_velocities()) + ")");
            for (int i = 0; i < lat.num_velocities(); ++i) {
                if (row[i] < 0.0)
                    throw ConfigError("config error at 'initial.values[" + std::to_string(c) +
                                      "]': populations must be nonnegative");
                if (row[i] != 0.0 && geometry->solid_at(c))
                    throw ConfigError("config error at 'initial.values[" + std::to_string(c) +
                                      "]': population on a solid cell");
                field.at_cell(c, i) = row[i];
                mass += row[i];
            }
        }
        if (!(mass > 0.0))
            throw ConfigError("config error at 'initial.values': total mass must be positive");
        break;
    }
    }
    return field;
}

} // namespace

Domain build_domain(const RunConfig& config) {
    try {
        LatticeDescriptor lattice(config.dimension, config.extents);
        auto geometry = std::make_shared<const DomainGeometry>(lattice, config.obstacles);
        sv::RegisterLayout layout(lattice);
        if (layout.total_qubits() > kQubitBudget)
            throw ConfigError(
                "this configuration needs " + std::to_string(layout.total_qubits()) +
                " qubits; runs are capped at " + std::to_string(kQubitBudget) +
                " (about 1 GiB of amplitudes) to stay desk-scale");
        ClassicalFlowField initial = build_initial(config, geometry);
        return Domain{std::move(geometry), std::move(layout), std::move(initial)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
}

RunResult run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log,
              bool verbose) {
    Domain dom = build_domain(config);
    const DomainGeometry& geometry = *dom.geometry;
    const sv::RegisterLayout& layout = dom.layout;
    const LatticeDescriptor& lat = layout.lattice();
    const int d = lat.dim();
    const bool observable_mode =
        config.measurement.mode == qmem::ForceMeasurementConfig::Mode::ObservableExact;

    sv::QuantumFlowState quantum = qc::encode_rooted(dom.initial, layout);
    ClassicalFlowField classical = dom.initial;
    const qc::TimestepCircuit circuit = qc::build_timestep_circuit(layout, geometry);
    const std::vector<BoundaryLink> links = boundary_links(geometry);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path csv_path = out_dir / config.output;
    std::ofstream csv(csv_path);
    if (!csv)
        throw std::runtime_error("cannot write CSV file: " + csv_path.string());

    csv << "t";
    for (int j = 1; j <= d; ++j)
        csv << ",F_" << j;
    for (int j = 1; j <= d; ++j)
        csv << ",stderr_" << j;
    for (int j = 1; j <= d; ++j)
        csv << ",P_plus_" << j;
    for (int j = 1; j <= d; ++j)
        csv << ",P_minus_" << j;
    csv << ",total_mass";
    if (config.compare) {
        for (int j = 1; j <= d; ++j)
            csv << ",F_classical_" << j;
        csv << ",max_deviation";
    }
    csv << "\n";

    if (verbose) {
        log << "grid: " << lat.num_cells() << " cells, " << layout.total_qubits()
            << " qubits, mode " << mode_name(config.measurement.mode) << "\n";
        if (config.measurement.epsilon > 0.0) {
            // Informational only: a standard error of epsilon on the exchange
            // probabilities needs about 1/epsilon^2 samples.
            const double wanted = 1.0 / (config.measurement.epsilon * config.measurement.epsilon);
            log << "target precision " << config.measurement.epsilon << " suggests about "
                << static_cast<std::uint64_t>(std::ceil(wanted)) << " shots (configured: "
                << config.measurement.shots << ")\n";
        }
        log << qmem::format_diagnostics(qmem::nonzero_fraction_report(geometry, layout));
    }

    double max_dev_overall = 0.0;
    for (int t = 0; t < config.timesteps; ++t) {
        const ClassicalFlowField decoded = qc::decode(quantum, layout, dom.geometry);
        const double mass_now = total_mass(decoded);

        std::vector<double> classical_force;
        if (config.compare)
            classical_force = mem_force(classical, links);

        qmem::ForceVector force;
        if (observable_mode)
            force = qmem::measure_force_observable(quantum, layout, geometry);

        qc::run_phase(quantum.vec, circuit.phase("set_stream_flags"));
        qc::run_phase(quantum.vec, circuit.phase("stream"));
        if (!observable_mode) {
            qmem::ForceMeasurementConfig step_config = config.measurement;
            step_config.seed += static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(d);
            force = qmem::measure_force_ancilla(quantum, layout, geometry, step_config);
        }
        qc::run_phase(quantum.vec, circuit.phase("flag_object"));
        qc::run_phase(quantum.vec, circuit.phase("reverse_velocity"));
        qc::run_phase(quantum.vec, circuit.phase("return_step"));
        qc::run_phase(quantum.vec, circuit.phase("reset_object_flag"));
        qc::run_phase(quantum.vec, circuit.phase("unset_stream_flags"));

        double step_dev = 0.0;
        if (config.compare) {
            stream(classical);
            bounce_back(classical);
            const ClassicalFlowField after = qc::decode(quantum, layout, dom.geometry);
            for (std::size_t k = 0; k < after.values().size(); ++k)
                step_dev = std::max(step_dev,
                                    std::abs(after.values()[k] - classical.values()[k]));
            max_dev_overall = std::max(max_dev_overall, step_dev);
        }

        csv << t;
        for (int j = 0; j < d; ++j)
            csv << "," << fmt(force.F[j]);
        for (int j = 0; j < d; ++j)
            csv << "," << fmt(force.std_error[j]);
        for (int j = 0; j < d; ++j)
            csv << "," << fmt(force.p_plus[j]);
        for (int j = 0; j < d; ++j)
            csv << "," << fmt(force.p_minus[j]);
        csv << "," << fmt(mass_now);
        if (config.compare) {
            for (int j = 0; j < d; ++j)
                csv << "," << fmt(classical_force[j]);
            csv << "," << fmt(step_dev);
        }
        csv << "\n";

        if (verbose) {
            log << "t=" << t << " F=(";
            for (int j = 0; j < d; ++j)
                log << (j ? ", " : "") << force.F[j];
            log << ") mass=" << mass_now;
            if (config.compare)
                log << " deviation=" << step_dev;
            log << "\n";
        }
    }

    RunResult result;
    result.max_deviation = max_dev_overall;
    result.csv_path = csv_path;
    if (config.compare && max_dev_overall > kCompareTolerance)
        result.exit_code = 2;
    return result;
}

std::string gate_report(const RunConfig& config) {
    Domain dom = build_domain(config);
    const qc::TimestepCircuit circuit = qc::build_timestep_circuit(dom.layout, *dom.geometry);

    std::ostringstream out;
    const auto emit = [&out](const std::string& name, const qc::GateCounts& c) {
        out << "  " << std::left << std::setw(24) << name << std::right;
        std::uint64_t x = 0;
        std::ostringstream mcx;
        for (const auto& [arity, n] : c.mcx_by_arity) {
            if (arity == 0) {
                x += n;
                continue;
            }
            if (mcx.tellp() > 0)
                mcx << " ";
            mcx << arity << ":" << n;
        }
        out << " X=" << x;
        out << " MCX=[" << (mcx.tellp() > 0 ? mcx.str() : "-") << "]";
        out << " shifts=" << c.shifts;
        out << " range_flags=" << c.range_flags;
        out << " comparators=" << c.comparators;
        out << " qft_blocks=" << c.qft_blocks;
        out << "\n";
    };

    const LatticeDescriptor& lat = dom.layout.lattice();
    out << "gate counts per timestep\n";
    out << "grid: ";
    for (int j = 0; j < lat.dim(); ++j)
        out << (j ? "x" : "") << lat.extent(j);
    out << " (" << lat.num_cells() << " cells), qubits: " << dom.layout.total_qubits()
        << " (velocity " << dom.layout.velocity_qubit_count() << ", position "
        << dom.layout.position_qubit_count() << ", ancilla " << dom.layout.ancilla_qubit_count()
        << ")\n";

    qc::GateCounts total;
    for (const qc::Phase& p : circuit.phases) {
        const qc::GateCounts c = qc::count_gates(p);
        total += c;
        emit(p.name, c);
    }
    emit("total", total);

    out << "per-dimension momentum flag circuits (per force readout)\n";
    for (int j = 0; j < lat.dim(); ++j) {
        const qc::Phase p = qmem::build_momentum_flags(dom.layout, *dom.geometry, j);
        emit("flag_momentum F_" + std::to_string(j + 1), qc::count_gates(p));
    }
    return out.str();
}

} // namespace qlbm::cli
