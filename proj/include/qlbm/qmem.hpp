#pragma once

#include "qlbm/circuits.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qlbm::qmem {

struct ForceMeasurementConfig {
    enum class Mode { ObservableExact, AncillaExact, AncillaShots };
    Mode mode = Mode::ObservableExact;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    /// Target precision, echoed in reports; not used by the math.
    double epsilon = 0.0;
};

/// Per-dimension force result in lattice momentum units per timestep.
/// std_error is zero outside shots mode. p_plus/p_minus are the momentum
/// flag probabilities the force was derived from.
struct ForceVector {
    std::vector<double> F;
    std::vector<double> std_error;
    std::vector<double> p_plus;
    std::vector<double> p_minus;
};

/// Diagonal observable for force component dim (0-based) and one sign of
/// momentum transfer: entry 2 at every basis state (x_f, i) where (x_f, i)
/// is a boundary link with velocity component sign along dim.
sv::DiagonalObservable build_observable(const sv::RegisterLayout& layout,
                                        const DomainGeometry& geometry, int dim, int sign);

/// Force from the 2d diagonal observables, evaluated on the pre-stream
/// state: F_j = total_mass * (<O_{j,+}> - <O_{j,->}>).
ForceVector measure_force_observable(const sv::QuantumFlowState& state,
                                     const sv::RegisterLayout& layout,
                                     const DomainGeometry& geometry);

/// Gate sequence that flips the positive momentum flag (the object-flag
/// qubit) on in-obstacle states moving with positive velocity component
/// along dim, and the negative flag on those with negative component.
/// Intended for the post-stream tap state, before the object flag is set.
qc::Phase build_momentum_flags(const sv::RegisterLayout& layout, const DomainGeometry& geometry,
                               int dim);

void flag_momentum_ancillae(sv::StateVector& state, const sv::RegisterLayout& layout,
                            const DomainGeometry& geometry, int dim);

/// Force from the momentum flags: F_j = 2 * total_mass * (P[+ flag] - P[- flag]).
/// Takes the post-stream tap state; each dimension is flagged on a scratch
/// copy. Exact mode reads marginal probabilities; shots mode samples the two
/// flag qubits (dimension j uses seed + j) and reports the binomial standard
/// error per term.
ForceVector measure_force_ancilla(const sv::QuantumFlowState& tap_state,
                                  const sv::RegisterLayout& layout,
                                  const DomainGeometry& geometry,
                                  const ForceMeasurementConfig& config);

/// Sparsity of one force observable against the data-subspace dimension.
struct ObservableDiagnostics {
    int dim = 0;
    int sign = +1;
    std::uint64_t nonzeros = 0;
    std::uint64_t dimension = 0;
    double ratio = 0.0;
};

std::vector<ObservableDiagnostics> nonzero_fraction_report(const DomainGeometry& geometry,
                                                           const sv::RegisterLayout& layout);

std::string format_diagnostics(const std::vector<ObservableDiagnostics>& rows);

} // namespace qlbm::qmem
