#include "qlbm/register_layout.hpp"

#include <stdexcept>

namespace qlbm::sv {

RegisterLayout::RegisterLayout(const LatticeDescriptor& lattice) : lattice_(lattice) {
    const int d = lattice_.dim();
    position_base_.resize(d);
    int base = 2 * d;
    for (int j = 0; j < d; ++j) {
        position_base_[j] = base;
        base += lattice_.extent_bits(j);
    }
    position_bits_total_ = base - 2 * d;

    pattern_to_direction_.assign(std::size_t{1} << (2 * d), -1);
    for (int i = 0; i < lattice_.num_velocities(); ++i)
        pattern_to_direction_[velocity_bits(i)] = i;
}

int RegisterLayout::total_qubits() const {
    return velocity_qubit_count() + position_qubit_count() + ancilla_qubit_count();
}

int RegisterLayout::velocity_dir_qubit(int dim) const {
    return 2 * dim;
}

int RegisterLayout::velocity_mag_qubit(int dim) const {
    return 2 * dim + 1;
}

int RegisterLayout::position_base(int dim) const {
    return position_base_.at(dim);
}

int RegisterLayout::position_bits(int dim) const {
    return lattice_.extent_bits(dim);
}

std::vector<int> RegisterLayout::position_register(int dim) const {
    const int base = position_base(dim);
    const int bits = position_bits(dim);
    std::vector<int> reg(bits);
    for (int b = 0; b < bits; ++b)
        reg[b] = base + bits - 1 - b;
    return reg;
}

int RegisterLayout::stream_flag_qubit(int dim) const {
    if (dim < 0 || dim >= dimension())
        throw std::out_of_range("dimension index out of range");
    return velocity_qubit_count() + position_qubit_count() + dim;
}

int RegisterLayout::object_flag_qubit() const {
    return velocity_qubit_count() + position_qubit_count() + dimension();
}

int RegisterLayout::negative_flag_qubit() const {
    return object_flag_qubit() + 1;
}

int RegisterLayout::scratch_qubit(int dim) const {
    if (dim < 0 || dim >= dimension())
        throw std::out_of_range("dimension index out of range");
    return negative_flag_qubit() + 1 + dim;
}

std::uint64_t RegisterLayout::velocity_bits(int i) const {
    const IVec& e = lattice_.velocity(i);
    std::uint64_t bits = 0;
    for (int j = 0; j < dimension(); ++j) {
        if (e[j] != 0)
            bits |= std::uint64_t{1} << (2 * j + 1);
        if (e[j] <= 0)
            bits |= std::uint64_t{1} << (2 * j);
    }
    return bits;
}

int RegisterLayout::direction_from_bits(std::uint64_t bits) const {
    if (bits >= pattern_to_direction_.size())
        throw std::out_of_range("velocity pattern out of range");
    return pattern_to_direction_[bits];
}

std::uint64_t RegisterLayout::basis_index(const IVec& x, int i) const {
    const std::uint64_t cell = static_cast<std::uint64_t>(lattice_.cell_index(x));
    return (cell << velocity_qubit_count()) | velocity_bits(i);
}

std::uint64_t RegisterLayout::data_dimension() const {
    return std::uint64_t{1} << (velocity_qubit_count() + position_qubit_count());
}

} // namespace qlbm::sv
