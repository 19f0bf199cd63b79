#pragma once

#include "qlbm/classical.hpp"
#include "qlbm/register_layout.hpp"
#include "qlbm/statevector.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qlbm::qc {

/// One gate in a phase's gate list. Mcx covers X (no controls) through
/// multi-controlled X with mixed polarities; Shift and RangeFlag are the
/// composite register operations of the statevector engine.
struct Gate {
    enum class Kind { Mcx, Shift, RangeFlag };
    Kind kind = Kind::Mcx;
    std::vector<sv::Control> controls;
    int target = -1;
    std::vector<int> reg;
    int direction = 0;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};

struct Phase {
    std::string name;
    std::vector<Gate> gates;
};

/// Primitive-operation tally for a gate list. Composite gates contribute
/// their decomposition: a shift is one shift plus two QFT blocks; an open
/// range flag spends four QFT blocks per borrow comparator.
struct GateCounts {
    std::map<int, std::uint64_t> mcx_by_arity;
    std::uint64_t shifts = 0;
    std::uint64_t range_flags = 0;
    std::uint64_t comparators = 0;
    std::uint64_t qft_blocks = 0;

    GateCounts& operator+=(const GateCounts& other);
};

GateCounts count_gates(const Phase& phase);

/// The ordered phases of one collisionless bounce-back step. The force
/// measurement tap sits between "stream" and "flag_object": at that instant
/// every population that is about to reflect occupies its solid cell.
struct TimestepCircuit {
    std::vector<Phase> phases;

    const Phase& phase(std::string_view name) const;
};

Phase build_set_stream_flags(const sv::RegisterLayout& layout);
Phase build_stream(const sv::RegisterLayout& layout);
Phase build_flag_object(const sv::RegisterLayout& layout, const DomainGeometry& geometry);
Phase build_reverse_velocity(const sv::RegisterLayout& layout);
Phase build_return_step(const sv::RegisterLayout& layout);
Phase build_reset_object_flag(const sv::RegisterLayout& layout, const DomainGeometry& geometry);
Phase build_unset_stream_flags(const sv::RegisterLayout& layout);

TimestepCircuit build_timestep_circuit(const sv::RegisterLayout& layout,
                                       const DomainGeometry& geometry);

void apply_gate(sv::StateVector& state, const Gate& gate);
void run_phase(sv::StateVector& state, const Phase& phase);

/// Positive controls selecting basis states whose position equals x.
std::vector<sv::Control> position_controls(const sv::RegisterLayout& layout, const IVec& x);
/// Controls selecting velocity component w in {-1,0,+1} along one dimension,
/// expressed on the stream-flag and direction qubits: a moving component
/// pins both, a rest component pins only the stream flag low.
std::vector<sv::Control> component_controls(const sv::RegisterLayout& layout, int dim, int w);

/// Loads sqrt(f_i(x)/sum f) into the amplitude of each (x, i) basis state
/// (ancillae zero) and stores sum f on the returned state.
sv::QuantumFlowState encode_rooted(const ClassicalFlowField& field,
                                   const sv::RegisterLayout& layout);

/// Inverse of encode_rooted: f_i(x) = total_mass * |amplitude|^2. Rejects
/// states carrying more than 1e-12 amplitude on any ancilla-set or
/// unused-velocity basis state.
ClassicalFlowField decode(const sv::QuantumFlowState& state, const sv::RegisterLayout& layout,
                          std::shared_ptr<const DomainGeometry> geometry);

/// One full stream + bounce-back step on the encoded state.
void timestep(sv::QuantumFlowState& state, const sv::RegisterLayout& layout,
              const DomainGeometry& geometry);

} // namespace qlbm::qc
