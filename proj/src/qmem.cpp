#include "qlbm/qmem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qlbm::qmem {

namespace {

void check_dim(const sv::RegisterLayout& layout, int dim) {
    if (dim < 0 || dim >= layout.dimension())
        throw std::invalid_argument("force dimension out of range");
}

} // namespace

sv::DiagonalObservable build_observable(const sv::RegisterLayout& layout,
                                        const DomainGeometry& geometry, int dim, int sign) {
    check_dim(layout, dim);
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("sign must be +1 or -1");

    sv::DiagonalObservable obs;
    obs.num_qubits = layout.total_qubits();
    for (const BoundaryLink& link : boundary_links(geometry)) {
        if (layout.lattice().velocity(link.i)[dim] != sign)
            continue;
        obs.entries.emplace_back(layout.basis_index(link.x_f, link.i), 2.0);
    }
    std::sort(obs.entries.begin(), obs.entries.end());
    return obs;
}

ForceVector measure_force_observable(const sv::QuantumFlowState& state,
                                     const sv::RegisterLayout& layout,
                                     const DomainGeometry& geometry) {
    const int d = layout.dimension();
    ForceVector result;
    result.F.resize(d);
    result.std_error.assign(d, 0.0);
    result.p_plus.resize(d);
    result.p_minus.resize(d);
    for (int j = 0; j < d; ++j) {
        const double plus = sv::expectation(state.vec, build_observable(layout, geometry, j, +1));
        const double minus = sv::expectation(state.vec, build_observable(layout, geometry, j, -1));
        result.F[j] = state.total_mass * (plus - minus);
        result.p_plus[j] = plus / 2.0;
        result.p_minus[j] = minus / 2.0;
    }
    return result;
}

qc::Phase build_momentum_flags(const sv::RegisterLayout& layout, const DomainGeometry& geometry,
                               int dim) {
    check_dim(layout, dim);
    qc::Phase p{"flag_momentum", {}};
    const int d = layout.dimension();
    for (const ObstacleBox& box : geometry.obstacles()) {
        std::vector<qc::Gate> ranges;
        for (int j = 0; j < d; ++j) {
            qc::Gate g;
            g.kind = qc::Gate::Kind::RangeFlag;
            g.reg = layout.position_register(j);
            g.lo = static_cast<std::uint64_t>(box.lo[j]);
            g.hi = static_cast<std::uint64_t>(box.hi[j]);
            g.target = layout.scratch_qubit(j);
            ranges.push_back(g);
        }
        std::vector<sv::Control> in_box;
        for (int j = 0; j < d; ++j)
            in_box.push_back({layout.scratch_qubit(j), true});

        for (const qc::Gate& g : ranges)
            p.gates.push_back(g);
        for (int sign : {+1, -1}) {
            qc::Gate g;
            g.kind = qc::Gate::Kind::Mcx;
            g.controls = in_box;
            g.controls.push_back({layout.velocity_mag_qubit(dim), true});
            g.controls.push_back({layout.velocity_dir_qubit(dim), sign < 0});
            g.target = sign > 0 ? layout.object_flag_qubit() : layout.negative_flag_qubit();
            p.gates.push_back(std::move(g));
        }
        for (const qc::Gate& g : ranges)
            p.gates.push_back(g);
    }
    return p;
}

void flag_momentum_ancillae(sv::StateVector& state, const sv::RegisterLayout& layout,
                            const DomainGeometry& geometry, int dim) {
    qc::run_phase(state, build_momentum_flags(layout, geometry, dim));
}

ForceVector measure_force_ancilla(const sv::QuantumFlowState& tap_state,
                                  const sv::RegisterLayout& layout,
                                  const DomainGeometry& geometry,
                                  const ForceMeasurementConfig& config) {
    const bool shots_mode = config.mode == ForceMeasurementConfig::Mode::AncillaShots;
    if (shots_mode && config.shots < 1)
        throw std::invalid_argument("shots mode needs a shot count");

    const int d = layout.dimension();
    const double mass = tap_state.total_mass;
    ForceVector result;
    result.F.resize(d);
    result.std_error.assign(d, 0.0);
    result.p_plus.resize(d);
    result.p_minus.resize(d);

    const int plus_q = layout.object_flag_qubit();
    const int minus_q = layout.negative_flag_qubit();
    for (int j = 0; j < d; ++j) {
        sv::StateVector flagged = tap_state.vec;
        flag_momentum_ancillae(flagged, layout, geometry, j);
        double p_plus, p_minus;
        if (shots_mode) {
            const int qubits[] = {plus_q, minus_q};
            const auto counts =
                sv::sample_shots(flagged, qubits, config.shots, config.seed + j);
            std::uint64_t n_plus = 0, n_minus = 0;
            for (const auto& [outcome, n] : counts) {
                if (outcome & 1)
                    n_plus += n;
                if (outcome & 2)
                    n_minus += n;
            }
            const double m = static_cast<double>(config.shots);
            p_plus = static_cast<double>(n_plus) / m;
            p_minus = static_cast<double>(n_minus) / m;
            result.std_error[j] =
                2.0 * mass *
                std::sqrt(p_plus * (1.0 - p_plus) / m + p_minus * (1.0 - p_minus) / m);
        } else {
            p_plus = sv::ancilla_probability(flagged, plus_q, 1);
            p_minus = sv::ancilla_probability(flagged, minus_q, 1);
        }
        result.F[j] = 2.0 * mass * (p_plus - p_minus);
        result.p_plus[j] = p_plus;
        result.p_minus[j] = p_minus;
    }
    return result;
}

std::vector<ObservableDiagnostics> nonzero_fraction_report(const DomainGeometry& geometry,
                                                           const sv::RegisterLayout& layout) {
    std::vector<ObservableDiagnostics> rows;
    const std::uint64_t dimension = layout.data_dimension();
    for (int j = 0; j < layout.dimension(); ++j) {
        for (int sign : {+1, -1}) {
            ObservableDiagnostics row;
            row.dim = j;
            row.sign = sign;
            row.nonzeros = build_observable(layout, geometry, j, sign).entries.size();
            row.dimension = dimension;
            row.ratio = static_cast<double>(row.nonzeros) / static_cast<double>(dimension);
            rows.push_back(row);
        }
    }
    return rows;
}

std::string format_diagnostics(const std::vector<ObservableDiagnostics>& rows) {
    std::ostringstream out;
    out << "observable  nonzeros  dimension  ratio\n";
    for (const ObservableDiagnostics& r : rows) {
        out << "F_" << (r.dim + 1) << (r.sign > 0 ? "+" : "-") << "         " << r.nonzeros
            << "  " << r.dimension << "  " << r.ratio << "\n";
    }
    return out.str();
}

} // namespace qlbm::qmem
