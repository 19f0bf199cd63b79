#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace qlbm::sv {

using Amp = std::complex<double>;

/// One control qubit of a multi-controlled gate. value=true fires on |1>,
/// value=false on |0> (negative control).
struct Control {
    int qubit;
    bool value = true;
};

/// Real diagonal operator, stored sparsely as (basis index, value) pairs
/// sorted by index. Hermitian by construction.
struct DiagonalObservable {
    int num_qubits = 0;
    std::vector<std::pair<std::uint64_t, double>> entries;
};

/// Exact dense statevector over num_qubits qubits. Qubit k is bit k of the
/// basis index. Gate kernels iterate only the subspace matching their
/// controls; amplitudes are double-precision complex.
class StateVector {
public:
    explicit StateVector(int num_qubits);

    int num_qubits() const { return n_; }
    std::uint64_t size() const { return a_.size(); }

    Amp& operator[](std::uint64_t idx) { return a_[idx]; }
    const Amp& operator[](std::uint64_t idx) const { return a_[idx]; }
    const std::vector<Amp>& amplitudes() const { return a_; }

    void set_all_zero();
    double norm() const;

    void apply_x(int qubit);
    void apply_mcx(std::span<const Control> controls, int target);
    void apply_swap(int q1, int q2);
    /// Phase gate diag(1, e^{i angle}) on the target, with optional controls.
    void apply_phase(int target, double angle, std::span<const Control> controls = {});
    void apply_h(int qubit);

    /// QFT / inverse QFT on a subregister. reg lists the register qubits
    /// most significant first: reg[0] carries the top bit of the register
    /// value both before and after the transform.
    void apply_qft(std::span<const int> reg);
    void apply_iqft(std::span<const int> reg);

    /// Maps the register value to (value + direction) mod 2^reg.size() on
    /// basis states matching the controls; identity elsewhere. Realized as
    /// QFT, controlled phase rotations, inverse QFT.
    void apply_controlled_shift(std::span<const int> reg, int direction,
                                std::span<const Control> controls = {});

    /// Flips the target qubit exactly on basis states whose register value r
    /// satisfies lo <= r <= hi. Point ranges (lo == hi) use a single
    /// mixed-polarity MCX; open ranges use two borrow comparators.
    void flag_in_range(std::span<const int> reg, std::uint64_t lo, std::uint64_t hi,
                       int target);

private:
    void fourier_add(std::span<const int> reg, std::uint64_t addend,
                     std::span<const Control> controls);
    /// target ^= [register value < c], register restored; 1 <= c < 2^reg.size()+1.
    void borrow_compare(std::span<const int> reg, std::uint64_t c, int target);
    std::uint64_t control_masks(std::span<const Control> controls, std::uint64_t& base) const;

    int n_;
    std::vector<Amp> a_;
};

double expectation(const StateVector& state, const DiagonalObservable& obs);

/// Marginal probability of measuring the qubit in the given outcome (0 or 1).
double ancilla_probability(const StateVector& state, int qubit, int outcome);

/// M independent draws from the joint measurement distribution of the listed
/// qubits. Outcome bit j of a count key corresponds to qubits[j].
/// Deterministic for a fixed seed.
std::map<std::uint64_t, std::uint64_t> sample_shots(const StateVector& state,
                                                    std::span<const int> qubits,
                                                    std::uint64_t shots, std::uint64_t seed);

/// Statevector plus the stored normalization scalar sum_{x,i} f_i from
/// initialization; squared amplitudes times total_mass recover densities.
struct QuantumFlowState {
    StateVector vec;
    double total_mass = 0.0;
};

} // namespace qlbm::sv
