#include "qlbm/circuits.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qlbm::qc {

namespace {

/// Odometer over the integer box [lo[k], hi[k]] per slot; lo/hi may be
/// empty, in which case fn runs once with the empty tuple.
template <typename Fn>
void for_each_tuple(const std::vector<int>& lo, const std::vector<int>& hi, Fn&& fn) {
    std::vector<int> cur(lo);
    const std::size_t n = lo.size();
    while (true) {
        fn(cur);
        std::size_t k = 0;
        while (k < n) {
            if (cur[k] < hi[k]) {
                ++cur[k];
                break;
            }
            cur[k] = lo[k];
            ++k;
        }
        if (k == n)
            break;
    }
}

IVec minus(const IVec& a, const IVec& b, int d) {
    IVec r{0, 0, 0};
    for (int j = 0; j < d; ++j)
        r[j] = a[j] - b[j];
    return r;
}

void append(std::vector<sv::Control>& dst, const std::vector<sv::Control>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

Gate make_mcx(std::vector<sv::Control> controls, int target) {
    Gate g;
    g.kind = Gate::Kind::Mcx;
    g.controls = std::move(controls);
    g.target = target;
    return g;
}

Gate make_shift(std::vector<int> reg, int direction, std::vector<sv::Control> controls) {
    Gate g;
    g.kind = Gate::Kind::Shift;
    g.reg = std::move(reg);
    g.direction = direction;
    g.controls = std::move(controls);
    return g;
}

Gate make_range_flag(std::vector<int> reg, std::uint64_t lo, std::uint64_t hi, int target) {
    Gate g;
    g.kind = Gate::Kind::RangeFlag;
    g.reg = std::move(reg);
    g.lo = lo;
    g.hi = hi;
    g.target = target;
    return g;
}

} // namespace

GateCounts& GateCounts::operator+=(const GateCounts& other) {
    for (const auto& [arity, n] : other.mcx_by_arity)
        mcx_by_arity[arity] += n;
    shifts += other.shifts;
    range_flags += other.range_flags;
    comparators += other.comparators;
    qft_blocks += other.qft_blocks;
    return *this;
}

GateCounts count_gates(const Phase& phase) {
    GateCounts counts;
    for (const Gate& g : phase.gates) {
        switch (g.kind) {
        case Gate::Kind::Mcx:
            ++counts.mcx_by_arity[static_cast<int>(g.controls.size())];
            break;
        case Gate::Kind::Shift:
            ++counts.shifts;
            counts.qft_blocks += 2;
            break;
        case Gate::Kind::RangeFlag: {
            ++counts.range_flags;
            const std::uint64_t top = (std::uint64_t{1} << g.reg.size()) - 1;
            if (g.lo == 0 && g.hi == top) {
                ++counts.mcx_by_arity[0];
            } else if (g.lo == g.hi) {
                ++counts.mcx_by_arity[static_cast<int>(g.reg.size())];
            } else {
                if (g.hi < top)
                    ++counts.comparators;
                else
                    ++counts.mcx_by_arity[0];
                if (g.lo > 0)
                    ++counts.comparators;
            }
            break;
        }
        }
    }
    counts.qft_blocks += 4 * counts.comparators;
    return counts;
}

const Phase& TimestepCircuit::phase(std::string_view name) const {
    for (const Phase& p : phases)
        if (p.name == name)
            return p;
    throw std::out_of_range("no such circuit phase");
}

std::vector<sv::Control> position_controls(const sv::RegisterLayout& layout, const IVec& x) {
    std::vector<sv::Control> ctrls;
    for (int j = 0; j < layout.dimension(); ++j) {
        const int base = layout.position_base(j);
        const int bits = layout.position_bits(j);
        for (int b = 0; b < bits; ++b)
            ctrls.push_back({base + b, ((x[j] >> b) & 1) != 0});
    }
    return ctrls;
}

std::vector<sv::Control> component_controls(const sv::RegisterLayout& layout, int dim, int w) {
    if (w == 0)
        return {{layout.stream_flag_qubit(dim), false}};
    return {{layout.stream_flag_qubit(dim), true}, {layout.velocity_dir_qubit(dim), w < 0}};
}

Phase build_set_stream_flags(const sv::RegisterLayout& layout) {
    Phase p{"set_stream_flags", {}};
    for (int j = 0; j < layout.dimension(); ++j)
        p.gates.push_back(make_mcx({{layout.velocity_mag_qubit(j), true}},
                                   layout.stream_flag_qubit(j)));
    return p;
}

Phase build_stream(const sv::RegisterLayout& layout) {
    Phase p{"stream", {}};
    for (int j = 0; j < layout.dimension(); ++j) {
        p.gates.push_back(make_shift(layout.position_register(j), +1,
                                     {{layout.stream_flag_qubit(j), true},
                                      {layout.velocity_dir_qubit(j), false}}));
        p.gates.push_back(make_shift(layout.position_register(j), -1,
                                     {{layout.stream_flag_qubit(j), true},
                                      {layout.velocity_dir_qubit(j), true}}));
    }
    return p;
}

Phase build_flag_object(const sv::RegisterLayout& layout, const DomainGeometry& geometry) {
    Phase p{"flag_object", {}};
    const int d = layout.dimension();
    for (const ObstacleBox& box : geometry.obstacles()) {
        std::vector<Gate> ranges;
        for (int j = 0; j < d; ++j)
            ranges.push_back(make_range_flag(layout.position_register(j),
                                             static_cast<std::uint64_t>(box.lo[j]),
                                             static_cast<std::uint64_t>(box.hi[j]),
                                             layout.scratch_qubit(j)));
        std::vector<sv::Control> conjunction;
        for (int j = 0; j < d; ++j)
            conjunction.push_back({layout.scratch_qubit(j), true});

        for (const Gate& g : ranges)
            p.gates.push_back(g);
        p.gates.push_back(make_mcx(conjunction, layout.object_flag_qubit()));
        for (const Gate& g : ranges)
            p.gates.push_back(g);
    }
    return p;
}

Phase build_reverse_velocity(const sv::RegisterLayout& layout) {
    // The direction flip is restricted to dimensions with an active stream
    // flag: a rest component has no direction to reverse, and an
    // unconditional flip would push its (0,1) pattern into the unused (0,0)
    // slot.
    Phase p{"reverse_velocity", {}};
    for (int j = 0; j < layout.dimension(); ++j)
        p.gates.push_back(make_mcx({{layout.object_flag_qubit(), true},
                                    {layout.stream_flag_qubit(j), true}},
                                   layout.velocity_dir_qubit(j)));
    return p;
}

Phase build_return_step(const sv::RegisterLayout& layout) {
    Phase p{"return_step", {}};
    for (int j = 0; j < layout.dimension(); ++j) {
        p.gates.push_back(make_shift(layout.position_register(j), +1,
                                     {{layout.object_flag_qubit(), true},
                                      {layout.stream_flag_qubit(j), true},
                                      {layout.velocity_dir_qubit(j), false}}));
        p.gates.push_back(make_shift(layout.position_register(j), -1,
                                     {{layout.object_flag_qubit(), true},
                                      {layout.stream_flag_qubit(j), true},
                                      {layout.velocity_dir_qubit(j), true}}));
    }
    return p;
}

Phase build_reset_object_flag(const sv::RegisterLayout& layout, const DomainGeometry& geometry) {
    // After the return step a state carries the object flag exactly when its
    // cell c and velocity w satisfy "c - w is solid": it just bounced off
    // that cell. No free-streaming state can share such a (c, w) signature,
    // because its source cell c - w would have held population inside an
    // obstacle. The flag is therefore cleared by gates conditioned on
    // position and velocity alone, generated per box:
    //   - face-adjacent cells get one gate per face keyed on the away-facing
    //     velocity component, wildcarding the other dimensions;
    //   - that overshoots for patterns whose source cell misses the box
    //     sideways, so each such pattern gets a compensating exact-signature
    //     gate (flipping twice restores the flag);
    //   - diagonally adjacent cells (two or more coordinates outside the
    //     box) only ever receive reflected states through exact signatures,
    //     enumerated directly.
    Phase p{"reset_object_flag", {}};
    const int d = layout.dimension();
    const int a_obj = layout.object_flag_qubit();

    for (const ObstacleBox& box : geometry.obstacles()) {
        for (int k = 0; k < d; ++k) {
            std::vector<int> perp_dims, perp_lo, perp_hi;
            for (int j = 0; j < d; ++j) {
                if (j == k)
                    continue;
                perp_dims.push_back(j);
                perp_lo.push_back(box.lo[j]);
                perp_hi.push_back(box.hi[j]);
            }
            for (int side : {-1, +1}) {
                for_each_tuple(perp_lo, perp_hi, [&](const std::vector<int>& perp) {
                    IVec c{0, 0, 0};
                    c[k] = side < 0 ? box.lo[k] - 1 : box.hi[k] + 1;
                    for (std::size_t m = 0; m < perp_dims.size(); ++m)
                        c[perp_dims[m]] = perp[m];

                    std::vector<sv::Control> face = position_controls(layout, c);
                    append(face, component_controls(layout, k, side));
                    p.gates.push_back(make_mcx(std::move(face), a_obj));

                    std::vector<int> wlo(perp_dims.size(), -1), whi(perp_dims.size(), +1);
                    for_each_tuple(wlo, whi, [&](const std::vector<int>& wperp) {
                        IVec w{0, 0, 0};
                        w[k] = side;
                        for (std::size_t m = 0; m < perp_dims.size(); ++m)
                            w[perp_dims[m]] = wperp[m];
                        if (box.contains(minus(c, w, d), d))
                            return;
                        std::vector<sv::Control> ctrls = position_controls(layout, c);
                        for (int j = 0; j < d; ++j)
                            append(ctrls, component_controls(layout, j, w[j]));
                        p.gates.push_back(make_mcx(std::move(ctrls), a_obj));
                    });
                });
            }
        }

        std::vector<int> ring_lo(d), ring_hi(d);
        for (int j = 0; j < d; ++j) {
            ring_lo[j] = box.lo[j] - 1;
            ring_hi[j] = box.hi[j] + 1;
        }
        for_each_tuple(ring_lo, ring_hi, [&](const std::vector<int>& cc) {
            IVec c{0, 0, 0};
            int outside = 0;
            for (int j = 0; j < d; ++j) {
                c[j] = cc[j];
                if (cc[j] < box.lo[j] || cc[j] > box.hi[j])
                    ++outside;
            }
            if (outside < 2)
                return;
            std::vector<int> wlo(d, -1), whi(d, +1);
            for_each_tuple(wlo, whi, [&](const std::vector<int>& wv) {
                IVec w{0, 0, 0};
                bool rest = true;
                for (int j = 0; j < d; ++j) {
                    w[j] = wv[j];
                    if (wv[j] != 0)
                        rest = false;
                }
                if (rest || !box.contains(minus(c, w, d), d))
                    return;
                std::vector<sv::Control> ctrls = position_controls(layout, c);
                for (int j = 0; j < d; ++j)
                    append(ctrls, component_controls(layout, j, w[j]));
                p.gates.push_back(make_mcx(std::move(ctrls), a_obj));
            });
        });
    }
    return p;
}

Phase build_unset_stream_flags(const sv::RegisterLayout& layout) {
    Phase p = build_set_stream_flags(layout);
    p.name = "unset_stream_flags";
    return p;
}

TimestepCircuit build_timestep_circuit(const sv::RegisterLayout& layout,
                                       const DomainGeometry& geometry) {
    TimestepCircuit circuit;
    circuit.phases.push_back(build_set_stream_flags(layout));
    circuit.phases.push_back(build_stream(layout));
    circuit.phases.push_back(build_flag_object(layout, geometry));
    if (geometry.obstacles().empty()) {
        // Without an obstacle the object flag is never raised, so every
        // bounce-back gate is an identity; keep the phases but leave them
        // empty.
        circuit.phases.push_back(Phase{"reverse_velocity", {}});
        circuit.phases.push_back(Phase{"return_step", {}});
    } else {
        circuit.phases.push_back(build_reverse_velocity(layout));
        circuit.phases.push_back(build_return_step(layout));
    }
    circuit.phases.push_back(build_reset_object_flag(layout, geometry));
    circuit.phases.push_back(build_unset_stream_flags(layout));
    return circuit;
}

void apply_gate(sv::StateVector& state, const Gate& gate) {
    switch (gate.kind) {
    case Gate::Kind::Mcx:
        state.apply_mcx(gate.controls, gate.target);
        break;
    case Gate::Kind::Shift:
        state.apply_controlled_shift(gate.reg, gate.direction, gate.controls);
        break;
    case Gate::Kind::RangeFlag:
        if (!gate.controls.empty())
            throw std::invalid_argument("range flag gates take no extra controls");
        state.flag_in_range(gate.reg, gate.lo, gate.hi, gate.target);
        break;
    }
}

void run_phase(sv::StateVector& state, const Phase& phase) {
    for (const Gate& g : phase.gates)
        apply_gate(state, g);
}

sv::QuantumFlowState encode_rooted(const ClassicalFlowField& field,
                                   const sv::RegisterLayout& layout) {
    const LatticeDescriptor& lat = layout.lattice();
    if (lat.dim() != field.lattice().dim() || lat.extents() != field.lattice().extents())
        throw std::invalid_argument("layout and field lattices differ");

    const double mass = total_mass(field);
    if (!(mass > 0.0))
        throw std::invalid_argument("total mass must be positive");

    sv::QuantumFlowState qs{sv::StateVector(layout.total_qubits()), mass};
    for (std::int64_t cell = 0; cell < lat.num_cells(); ++cell) {
        const IVec x = lat.cell_coords(cell);
        for (int i = 0; i < lat.num_velocities(); ++i) {
            const double f = field.at_cell(cell, i);
            if (f < 0.0)
                throw std::invalid_argument("negative density");
            if (f == 0.0)
                continue;
            qs.vec[layout.basis_index(x, i)] = sv::Amp{std::sqrt(f / mass), 0.0};
        }
    }
    return qs;
}

ClassicalFlowField decode(const sv::QuantumFlowState& state, const sv::RegisterLayout& layout,
                          std::shared_ptr<const DomainGeometry> geometry) {
    if (state.vec.num_qubits() != layout.total_qubits())
        throw std::invalid_argument("state size does not match layout");
    const LatticeDescriptor& lat = layout.lattice();
    if (lat.dim() != geometry->lattice().dim() || lat.extents() != geometry->lattice().extents())
        throw std::invalid_argument("layout and geometry lattices differ");

    // Amplitudes above this are treated as real population; below, as
    // rotation roundoff. Well separated from both the 1e-10 equivalence
    // tolerance and the scale of accumulated QFT error.
    constexpr double guard = 1e-12;

    ClassicalFlowField field(std::move(geometry));
    const int nv = layout.velocity_qubit_count();
    const std::uint64_t vmask = (std::uint64_t{1} << nv) - 1;
    const std::uint64_t data_dim = layout.data_dimension();
    const std::uint64_t size = state.vec.size();
    for (std::uint64_t idx = 0; idx < size; ++idx) {
        const double a2 = std::norm(state.vec[idx]);
        if (a2 == 0.0)
            continue;
        if (idx >= data_dim) {
            if (a2 > guard * guard)
                throw std::runtime_error("decode: ancilla qubit entangled with the flow state");
            continue;
        }
        const int i = layout.direction_from_bits(idx & vmask);
        if (i < 0) {
            if (a2 > guard * guard)
                throw std::runtime_error("decode: unused velocity slot populated");
            continue;
        }
        field.at_cell(static_cast<std::int64_t>(idx >> nv), i) += state.total_mass * a2;
    }
    return field;
}

void timestep(sv::QuantumFlowState& state, const sv::RegisterLayout& layout,
              const DomainGeometry& geometry) {
    const TimestepCircuit circuit = build_timestep_circuit(layout, geometry);
    for (const Phase& p : circuit.phases)
        run_phase(state.vec, p);
}

} // namespace qlbm::qc
