#include "qlbm/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qlbm::sv {

namespace {

constexpr double kPi = std::numbers::pi;

void check_qubit(int qubit, int n) {
    if (qubit < 0 || qubit >= n)
        throw std::invalid_argument("qubit index out of range");
}

/// Iterates all basis indices whose bits inside fixed_mask equal base,
/// enumerating the complementary subcube with the subset-walk identity
/// s' = (s - free) & free.
template <typename Fn>
void for_each_matching(std::uint64_t size, std::uint64_t fixed_mask, std::uint64_t base,
                       Fn&& fn) {
    const std::uint64_t free_mask = (size - 1) & ~fixed_mask;
    std::uint64_t s = 0;
    while (true) {
        fn(s | base);
        if (s == free_mask)
            break;
        s = (s - free_mask) & free_mask;
    }
}

} // namespace

StateVector::StateVector(int num_qubits) : n_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 28)
        throw std::invalid_argument("statevector supports 1 to 28 qubits");
    a_.assign(std::uint64_t{1} << num_qubits, Amp{0.0, 0.0});
}

void StateVector::set_all_zero() {
    a_.assign(a_.size(), Amp{0.0, 0.0});
}

double StateVector::norm() const {
    double s = 0.0;
    for (const Amp& v : a_)
        s += std::norm(v);
    return std::sqrt(s);
}

std::uint64_t StateVector::control_masks(std::span<const Control> controls,
                                         std::uint64_t& base) const {
    std::uint64_t mask = 0;
    base = 0;
    for (const Control& c : controls) {
        check_qubit(c.qubit, n_);
        const std::uint64_t bit = std::uint64_t{1} << c.qubit;
        if (mask & bit)
            throw std::invalid_argument("duplicate control qubit");
        mask |= bit;
        if (c.value)
            base |= bit;
    }
    return mask;
}

void StateVector::apply_x(int qubit) {
    check_qubit(qubit, n_);
    const std::uint64_t tbit = std::uint64_t{1} << qubit;
    for_each_matching(a_.size(), tbit, 0, [&](std::uint64_t i0) {
        std::swap(a_[i0], a_[i0 | tbit]);
    });
}

void StateVector::apply_mcx(std::span<const Control> controls, int target) {
    check_qubit(target, n_);
    const std::uint64_t tbit = std::uint64_t{1} << target;
    std::uint64_t base = 0;
    const std::uint64_t cmask = control_masks(controls, base);
    if (cmask & tbit)
        throw std::invalid_argument("target of mcx is also a control");
    for_each_matching(a_.size(), cmask | tbit, base, [&](std::uint64_t i0) {
        std::swap(a_[i0], a_[i0 | tbit]);
    });
}

void StateVector::apply_swap(int q1, int q2) {
    check_qubit(q1, n_);
    check_qubit(q2, n_);
    if (q1 == q2)
        throw std::invalid_argument("swap needs two distinct qubits");
    const std::uint64_t b1 = std::uint64_t{1} << q1;
    const std::uint64_t b2 = std::uint64_t{1} << q2;
    for_each_matching(a_.size(), b1 | b2, b1, [&](std::uint64_t i) {
        std::swap(a_[i], a_[(i ^ b1) | b2]);
    });
}

void StateVector::apply_phase(int target, double angle, std::span<const Control> controls) {
    check_qubit(target, n_);
    const std::uint64_t tbit = std::uint64_t{1} << target;
    std::uint64_t base = 0;
    const std::uint64_t cmask = control_masks(controls, base);
    if (cmask & tbit)
        throw std::invalid_argument("target of phase is also a control");
    const Amp ph = std::polar(1.0, angle);
    for_each_matching(a_.size(), cmask | tbit, base | tbit, [&](std::uint64_t i) {
        a_[i] *= ph;
    });
}

void StateVector::apply_h(int qubit) {
    check_qubit(qubit, n_);
    const std::uint64_t tbit = std::uint64_t{1} << qubit;
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    for_each_matching(a_.size(), tbit, 0, [&](std::uint64_t i0) {
        const Amp lo = a_[i0];
        const Amp hi = a_[i0 | tbit];
        a_[i0] = (lo + hi) * inv_sqrt2;
        a_[i0 | tbit] = (lo - hi) * inv_sqrt2;
    });
}

void StateVector::apply_qft(std::span<const int> reg) {
    const int r = static_cast<int>(reg.size());
    for (int k = 0; k < r; ++k) {
        apply_h(reg[k]);
        for (int m = k + 1; m < r; ++m) {
            const Control ctrl[] = {{reg[m], true}};
            apply_phase(reg[k], 2.0 * kPi / static_cast<double>(std::uint64_t{1} << (m - k + 1)),
                        ctrl);
        }
    }
    for (int k = 0; k < r / 2; ++k)
        apply_swap(reg[k], reg[r - 1 - k]);
}

void StateVector::apply_iqft(std::span<const int> reg) {
    const int r = static_cast<int>(reg.size());
    for (int k = 0; k < r / 2; ++k)
        apply_swap(reg[k], reg[r - 1 - k]);
    for (int k = r - 1; k >= 0; --k) {
        for (int m = r - 1; m > k; --m) {
            const Control ctrl[] = {{reg[m], true}};
            apply_phase(reg[k], -2.0 * kPi / static_cast<double>(std::uint64_t{1} << (m - k + 1)),
                        ctrl);
        }
        apply_h(reg[k]);
    }
}

void StateVector::fourier_add(std::span<const int> reg, std::uint64_t addend,
                              std::span<const Control> controls) {
    const int r = static_cast<int>(reg.size());
    const std::uint64_t modulus = std::uint64_t{1} << r;
    apply_qft(reg);
    for (int m = 0; m < r; ++m) {
        const std::uint64_t steps = (addend << m) & (modulus - 1);
        if (steps == 0)
            continue;
        const double angle = 2.0 * kPi * static_cast<double>(steps) / static_cast<double>(modulus);
        apply_phase(reg[r - 1 - m], angle, controls);
    }
    apply_iqft(reg);
}

void StateVector::apply_controlled_shift(std::span<const int> reg, int direction,
                                         std::span<const Control> controls) {
    if (reg.empty())
        throw std::invalid_argument("shift register is empty");
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("shift direction must be +1 or -1");
    const std::uint64_t modulus = std::uint64_t{1} << reg.size();
    const std::uint64_t addend = direction == 1 ? 1 : modulus - 1;
    fourier_add(reg, addend, controls);
}

void StateVector::borrow_compare(std::span<const int> reg, std::uint64_t c, int target) {
    // Subtracting c over the borrow-extended register [target | reg] pulls the
    // target through exactly when the register value is below c; re-adding c on
    // the bare register restores it while keeping the borrow bit flipped.
    std::vector<int> ext;
    ext.reserve(reg.size() + 1);
    ext.push_back(target);
    ext.insert(ext.end(), reg.begin(), reg.end());
    const std::uint64_t ext_modulus = std::uint64_t{1} << ext.size();
    fourier_add(ext, ext_modulus - c, {});
    fourier_add(reg, c, {});
}

void StateVector::flag_in_range(std::span<const int> reg, std::uint64_t lo, std::uint64_t hi,
                                int target) {
    if (reg.empty())
        throw std::invalid_argument("range flag register is empty");
    check_qubit(target, n_);
    const std::uint64_t top = (std::uint64_t{1} << reg.size()) - 1;
    if (lo > hi || hi > top)
        throw std::invalid_argument("malformed range");
    for (int q : reg)
        if (q == target)
            throw std::invalid_argument("range flag target inside register");

    if (lo == 0 && hi == top) {
        apply_x(target);
        return;
    }
    if (lo == hi) {
        std::vector<Control> ctrls;
        const int r = static_cast<int>(reg.size());
        for (int k = 0; k < r; ++k)
            ctrls.push_back({reg[k], ((lo >> (r - 1 - k)) & 1) != 0});
        apply_mcx(ctrls, target);
        return;
    }
    // target ^= [value <= hi] xor [value < lo]
    if (hi < top)
        borrow_compare(reg, hi + 1, target);
    else
        apply_x(target);
    if (lo > 0)
        borrow_compare(reg, lo, target);
}

double expectation(const StateVector& state, const DiagonalObservable& obs) {
    if (obs.num_qubits != state.num_qubits())
        throw std::invalid_argument("observable qubit count mismatch");
    double acc = 0.0;
    for (const auto& [idx, val] : obs.entries)
        acc += val * std::norm(state[idx]);
    return acc;
}

double ancilla_probability(const StateVector& state, int qubit, int outcome) {
    if (qubit < 0 || qubit >= state.num_qubits())
        throw std::invalid_argument("qubit index out of range");
    if (outcome != 0 && outcome != 1)
        throw std::invalid_argument("outcome must be 0 or 1");
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    double acc = 0.0;
    const std::uint64_t size = state.size();
    for (std::uint64_t i = 0; i < size; ++i) {
        if (((i & bit) != 0) == (outcome == 1))
            acc += std::norm(state[i]);
    }
    return acc;
}

std::map<std::uint64_t, std::uint64_t> sample_shots(const StateVector& state,
                                                    std::span<const int> qubits,
                                                    std::uint64_t shots, std::uint64_t seed) {
    if (qubits.empty())
        throw std::invalid_argument("no qubits to sample");
    if (shots == 0)
        throw std::invalid_argument("need at least one shot");
    for (int q : qubits)
        if (q < 0 || q >= state.num_qubits())
            throw std::invalid_argument("qubit index out of range");

    const std::size_t k = qubits.size();
    std::vector<double> marginal(std::size_t{1} << k, 0.0);
    const std::uint64_t size = state.size();
    for (std::uint64_t i = 0; i < size; ++i) {
        const double p = std::norm(state[i]);
        if (p == 0.0)
            continue;
        std::uint64_t out = 0;
        for (std::size_t j = 0; j < k; ++j)
            out |= ((i >> qubits[j]) & 1) << j;
        marginal[out] += p;
    }
    std::vector<double> cdf(marginal.size());
    double run = 0.0;
    for (std::size_t i = 0; i < marginal.size(); ++i) {
        run += marginal[i];
        cdf[i] = run;
    }
    cdf.back() = run;

    // Explicit 53-bit uniforms and inverse-CDF lookup keep the draw sequence
    // identical across standard library implementations.
    std::mt19937_64 rng(seed);
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * run;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t outcome =
            it == cdf.end() ? cdf.size() - 1 : static_cast<std::uint64_t>(it - cdf.begin());
        ++counts[outcome];
    }
    return counts;
}

} // namespace qlbm::sv
