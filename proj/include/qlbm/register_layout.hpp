#pragma once

#include "qlbm/lattice.hpp"

#include <cstdint>
#include <vector>

namespace qlbm::sv {

/// Assigns lattice degrees of freedom to statevector qubits.
///
/// Bit order, least significant first:
///   - velocity pairs, one per dimension: (v_dir^j, v^j) at bits (2j, 2j+1),
///     so within a pair v^j is the more significant bit;
///   - position registers, dimension 1 lowest, log2(N_j) bits each;
///   - ancillae: stream flags a_v^1..a_v^d, the object flag a_o (reused as
///     the positive momentum flag), the negative momentum flag, then one
///     comparator scratch qubit per dimension.
///
/// A velocity component +1 encodes as (v, v_dir) = (1,0), -1 as (1,1) and
/// 0 as (0,1); the pattern (0,0) is never populated.
class RegisterLayout {
public:
    explicit RegisterLayout(const LatticeDescriptor& lattice);

    const LatticeDescriptor& lattice() const { return lattice_; }
    int dimension() const { return lattice_.dim(); }

    int velocity_qubit_count() const { return 2 * dimension(); }
    int position_qubit_count() const { return position_bits_total_; }
    int ancilla_qubit_count() const { return 2 * dimension() + 2; }
    int total_qubits() const;

    int velocity_dir_qubit(int dim) const;
    int velocity_mag_qubit(int dim) const;

    int position_base(int dim) const;
    int position_bits(int dim) const;
    /// Qubits of dimension dim's position register, most significant first
    /// (the order QFT-based operations expect).
    std::vector<int> position_register(int dim) const;

    int stream_flag_qubit(int dim) const;
    int object_flag_qubit() const;
    int negative_flag_qubit() const;
    int scratch_qubit(int dim) const;

    /// Value of the 2d velocity bits encoding direction index i.
    std::uint64_t velocity_bits(int i) const;
    /// Direction index for a velocity bit pattern, or -1 if the pattern
    /// contains an unused (0,0) pair.
    int direction_from_bits(std::uint64_t bits) const;

    /// Full basis index of (cell x, direction i) with all ancillae zero.
    std::uint64_t basis_index(const IVec& x, int i) const;

    /// Size of the ancillae-zero data subspace, 2^(n_v + n_g).
    std::uint64_t data_dimension() const;

private:
    LatticeDescriptor lattice_;
    std::vector<int> position_base_;
    int position_bits_total_ = 0;
    std::vector<int> pattern_to_direction_;
};

} // namespace qlbm::sv
