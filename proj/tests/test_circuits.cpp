#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qlbm/circuits.hpp"
#include "qlbm/classical.hpp"
#include "qlbm/lattice.hpp"
#include "qlbm/register_layout.hpp"
#include "qlbm/statevector.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

using namespace qlbm;
using qc::Phase;
using sv::Amp;
using sv::RegisterLayout;

namespace {

std::shared_ptr<const DomainGeometry> make_geometry(const LatticeDescriptor& lat,
                                                    std::vector<ObstacleBox> boxes) {
    return std::make_shared<const DomainGeometry>(lat, std::move(boxes));
}

void fill_random(ClassicalFlowField& field, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    const LatticeDescriptor& lat = field.lattice();
    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        if (field.geometry().solid_at(c))
            continue;
        for (int i = 0; i < lat.num_velocities(); ++i)
            field.at_cell(c, i) = dist(rng);
    }
}

double max_field_difference(const ClassicalFlowField& a, const ClassicalFlowField& b) {
    double m = 0.0;
    const auto& va = a.values();
    const auto& vb = b.values();
    for (std::size_t k = 0; k < va.size(); ++k)
        m = std::max(m, std::abs(va[k] - vb[k]));
    return m;
}

// Largest amplitude on any basis state with at least one ancilla bit set.
double max_ancilla_amplitude(const sv::StateVector& state, const RegisterLayout& layout) {
    double m = 0.0;
    for (std::uint64_t idx = layout.data_dimension(); idx < state.size(); ++idx)
        m = std::max(m, std::abs(state[idx]));
    return m;
}

std::uint64_t stream_flag_bits(const RegisterLayout& layout, int i) {
    std::uint64_t bits = 0;
    for (int j = 0; j < layout.dimension(); ++j)
        if (layout.lattice().velocity(i)[j] != 0)
            bits |= std::uint64_t{1} << layout.stream_flag_qubit(j);
    return bits;
}

// The unique basis state carrying (almost) all of the amplitude.
std::uint64_t dominant_index(const sv::StateVector& state) {
    std::uint64_t best = 0;
    double best_mag = -1.0;
    for (std::uint64_t k = 0; k < state.size(); ++k)
        if (std::abs(state[k]) > best_mag) {
            best_mag = std::abs(state[k]);
            best = k;
        }
    return best;
}

void check_is_basis(const sv::StateVector& s, std::uint64_t idx, double tol = 1e-12) {
    const std::uint64_t got = dominant_index(s);
    REQUIRE(got == idx);
    CHECK(std::abs(s[idx] - Amp{1.0, 0.0}) <= tol);
    double rest = 0.0;
    for (std::uint64_t k = 0; k < s.size(); ++k)
        if (k != idx)
            rest = std::max(rest, std::abs(s[k]));
    CHECK(rest <= tol);
}

}  // namespace

TEST_CASE("register layout places velocity, position and ancillae in order") {
    const LatticeDescriptor lat(2, {4, 8});
    const RegisterLayout layout(lat);
    CHECK(layout.velocity_qubit_count() == 4);
    CHECK(layout.position_qubit_count() == 5);
    CHECK(layout.ancilla_qubit_count() == 6);
    CHECK(layout.total_qubits() == 15);
    CHECK(layout.data_dimension() == 512);

    CHECK(layout.velocity_dir_qubit(0) == 0);
    CHECK(layout.velocity_mag_qubit(0) == 1);
    CHECK(layout.velocity_dir_qubit(1) == 2);
    CHECK(layout.velocity_mag_qubit(1) == 3);

    CHECK(layout.position_base(0) == 4);
    CHECK(layout.position_bits(0) == 2);
    CHECK(layout.position_base(1) == 6);
    CHECK(layout.position_bits(1) == 3);
    CHECK(layout.position_register(0) == std::vector<int>{5, 4});
    CHECK(layout.position_register(1) == std::vector<int>{8, 7, 6});

    CHECK(layout.stream_flag_qubit(0) == 9);
    CHECK(layout.stream_flag_qubit(1) == 10);
    CHECK(layout.object_flag_qubit() == 11);
    CHECK(layout.negative_flag_qubit() == 12);
    CHECK(layout.scratch_qubit(0) == 13);
    CHECK(layout.scratch_qubit(1) == 14);
}

TEST_CASE("velocity bit patterns follow the sign convention") {
    const LatticeDescriptor lat(1, {4});
    const RegisterLayout layout(lat);
    // rest (0): (v, v_dir) = (0, 1); +1: (1, 0); -1: (1, 1)
    CHECK(layout.velocity_bits(0) == 0b01u);
    CHECK(layout.velocity_bits(1) == 0b10u);
    CHECK(layout.velocity_bits(2) == 0b11u);
    CHECK(layout.direction_from_bits(0b00u) == -1);
    for (int i = 0; i < 3; ++i)
        CHECK(layout.direction_from_bits(layout.velocity_bits(i)) == i);
}

TEST_CASE("the positive mover of cell one sits at basis index six") {
    const LatticeDescriptor lat(1, {4});
    const RegisterLayout layout(lat);
    CHECK(layout.basis_index({1, 0, 0}, 1) == 6);
    CHECK(layout.basis_index({0, 0, 0}, 0) == 1);
    CHECK(layout.basis_index({3, 0, 0}, 2) == (3u << 2 | 3u));
}

TEST_CASE("velocity patterns round-trip in every dimension") {
    for (int d = 1; d <= 3; ++d) {
        std::vector<int> ext(d, 4);
        const LatticeDescriptor lat(d, ext);
        const RegisterLayout layout(lat);
        for (int i = 0; i < lat.num_velocities(); ++i)
            CHECK(layout.direction_from_bits(layout.velocity_bits(i)) == i);
        // Any pattern with a (0,0) pair is unused.
        const std::uint64_t patterns = std::uint64_t{1} << (2 * d);
        int used = 0;
        for (std::uint64_t p = 0; p < patterns; ++p)
            if (layout.direction_from_bits(p) >= 0)
                ++used;
        CHECK(used == lat.num_velocities());
    }
}

TEST_CASE("encoding loads root densities at the expected indices") {
    const LatticeDescriptor lat(1, {4});
    auto geo = make_geometry(lat, {});
    ClassicalFlowField f(geo);
    const RegisterLayout layout(lat);
    double mass = 0.0;
    for (int x = 0; x < 4; ++x)
        for (int i = 0; i < 3; ++i) {
            f.at({x, 0, 0}, i) = 0.1 + 0.2 * x + 0.05 * i;
            mass += f.at({x, 0, 0}, i);
        }
    const sv::QuantumFlowState qs = qc::encode_rooted(f, layout);
    CHECK(qs.total_mass == doctest::Approx(mass).epsilon(1e-15));
    double norm_sq = 0.0;
    for (int x = 0; x < 4; ++x)
        for (int i = 0; i < 3; ++i) {
            const std::uint64_t idx = layout.basis_index({x, 0, 0}, i);
            const double expected = std::sqrt(f.at({x, 0, 0}, i) / mass);
            CHECK(std::abs(qs.vec[idx] - Amp{expected, 0.0}) <= 1e-15);
            norm_sq += std::norm(qs.vec[idx]);
        }
    CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-14));
    // Unused velocity pattern (0,0) and all ancilla-set slots stay empty.
    for (int x = 0; x < 4; ++x)
        CHECK(std::abs(qs.vec[static_cast<std::uint64_t>(x) << 2]) == 0.0);
    for (std::uint64_t idx = layout.data_dimension(); idx < qs.vec.size(); ++idx)
        CHECK(std::abs(qs.vec[idx]) == 0.0);
}

TEST_CASE("decode inverts encode") {
    const LatticeDescriptor lat(2, {8, 4});
    auto geo = make_geometry(lat, {{{2, 1, 0}, {4, 2, 0}}});
    ClassicalFlowField f(geo);
    fill_random(f, 321);
    const RegisterLayout layout(lat);
    const sv::QuantumFlowState qs = qc::encode_rooted(f, layout);
    const ClassicalFlowField g = qc::decode(qs, layout, geo);
    CHECK(max_field_difference(f, g) <= 1e-12);
}

TEST_CASE("encode and decode reject malformed inputs") {
    const LatticeDescriptor lat(1, {4});
    auto geo = make_geometry(lat, {});
    const RegisterLayout layout(lat);

    ClassicalFlowField empty(geo);
    CHECK_THROWS_AS(qc::encode_rooted(empty, layout), std::invalid_argument);

    ClassicalFlowField neg(geo);
    neg.at({0, 0, 0}, 1) = -0.5;
    CHECK_THROWS_AS(qc::encode_rooted(neg, layout), std::invalid_argument);

    ClassicalFlowField ok(geo);
    ok.at({0, 0, 0}, 1) = 1.0;
    sv::QuantumFlowState qs = qc::encode_rooted(ok, layout);
    qs.vec[layout.data_dimension()] = Amp{1e-6, 0.0};
    CHECK_THROWS_AS(qc::decode(qs, layout, geo), std::runtime_error);

    sv::QuantumFlowState qs2 = qc::encode_rooted(ok, layout);
    qs2.vec[0] = Amp{1e-6, 0.0};  // velocity pattern (0,0)
    CHECK_THROWS_AS(qc::decode(qs2, layout, geo), std::runtime_error);
}

TEST_CASE("stream flags copy the moving-axis bits and uncompute") {
    const LatticeDescriptor lat(2, {4, 4});
    auto geo = make_geometry(lat, {});
    ClassicalFlowField f(geo);
    fill_random(f, 11);
    const RegisterLayout layout(lat);
    sv::QuantumFlowState qs = qc::encode_rooted(f, layout);
    const std::vector<Amp> start = qs.vec.amplitudes();

    qc::run_phase(qs.vec, qc::build_set_stream_flags(layout));
    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        const IVec x = lat.cell_coords(c);
        for (int i = 0; i < 9; ++i) {
            const std::uint64_t src = layout.basis_index(x, i);
            const std::uint64_t dst = src | stream_flag_bits(layout, i);
            CHECK(std::abs(qs.vec[dst] - start[src]) == 0.0);
            if (dst != src)
                CHECK(std::abs(qs.vec[src]) == 0.0);
        }
    }

    qc::run_phase(qs.vec, qc::build_unset_stream_flags(layout));
    for (std::uint64_t k = 0; k < qs.vec.size(); ++k)
        CHECK(std::abs(qs.vec[k] - start[k]) == 0.0);
}

TEST_CASE("the stream phase advects every population with wraparound") {
    const LatticeDescriptor lat(2, {4, 8});
    auto geo = make_geometry(lat, {});
    ClassicalFlowField f(geo);
    fill_random(f, 22);
    const RegisterLayout layout(lat);

    sv::QuantumFlowState qs = qc::encode_rooted(f, layout);
    qc::run_phase(qs.vec, qc::build_set_stream_flags(layout));
    qc::run_phase(qs.vec, qc::build_stream(layout));
    qc::run_phase(qs.vec, qc::build_unset_stream_flags(layout));

    stream(f);
    const ClassicalFlowField g = qc::decode(qs, layout, geo);
    CHECK(max_field_difference(f, g) <= 1e-12);
}

TEST_CASE("flag_object marks exactly the solid cells and restores scratch") {
    const LatticeDescriptor lat(2, {8, 8});
    auto geo = make_geometry(lat, {{{2, 2, 0}, {3, 5, 0}}, {{6, 1, 0}, {6, 2, 0}}});
    const RegisterLayout layout(lat);
    const Phase flag = qc::build_flag_object(layout, *geo);

    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        const IVec x = lat.cell_coords(c);
        sv::StateVector s(layout.total_qubits());
        s.set_all_zero();
        const std::uint64_t in = layout.basis_index(x, 1);
        s[in] = 1.0;
        qc::run_phase(s, flag);
        const std::uint64_t expected =
            geo->solid(x) ? (in | (std::uint64_t{1} << layout.object_flag_qubit())) : in;
        check_is_basis(s, expected, 1e-12);
    }
}

TEST_CASE("reverse_velocity flips directions only on moving axes") {
    const LatticeDescriptor lat(2, {4, 4});
    const RegisterLayout layout(lat);
    const Phase reverse = qc::build_reverse_velocity(layout);
    const std::uint64_t a_obj = std::uint64_t{1} << layout.object_flag_qubit();

    for (int i = 0; i < 9; ++i) {
        sv::StateVector s(layout.total_qubits());
        s.set_all_zero();
        const std::uint64_t in =
            layout.basis_index({1, 2, 0}, i) | stream_flag_bits(layout, i) | a_obj;
        s[in] = 1.0;
        qc::run_phase(s, reverse);
        const int opp = layout.lattice().opposite(i);
        const std::uint64_t expected =
            layout.basis_index({1, 2, 0}, opp) | stream_flag_bits(layout, opp) | a_obj;
        check_is_basis(s, expected, 1e-15);
    }

    // Without the object flag nothing moves.
    sv::StateVector s(layout.total_qubits());
    s.set_all_zero();
    const std::uint64_t in = layout.basis_index({1, 2, 0}, 5) | stream_flag_bits(layout, 5);
    s[in] = 1.0;
    qc::run_phase(s, reverse);
    check_is_basis(s, in, 1e-15);
}

TEST_CASE("return_step moves flagged states one cell along their velocity") {
    const LatticeDescriptor lat(2, {8, 8});
    const RegisterLayout layout(lat);
    const Phase ret = qc::build_return_step(layout);
    const std::uint64_t a_obj = std::uint64_t{1} << layout.object_flag_qubit();

    for (int i = 0; i < 9; ++i) {
        sv::StateVector s(layout.total_qubits());
        s.set_all_zero();
        const std::uint64_t in =
            layout.basis_index({2, 3, 0}, i) | stream_flag_bits(layout, i) | a_obj;
        s[in] = 1.0;
        qc::run_phase(s, ret);
        const IVec dst = lat.advect({2, 3, 0}, lat.velocity(i));
        const std::uint64_t expected =
            layout.basis_index(dst, i) | stream_flag_bits(layout, i) | a_obj;
        check_is_basis(s, expected, 1e-12);
    }
}

TEST_CASE("reset clears exactly the reflected signatures") {
    // Exhaustive oracle over every (cell, velocity) pair: the object flag
    // must flip exactly when the cell is fluid and stepping one velocity
    // backwards lands inside an obstacle.
    const LatticeDescriptor lat(2, {8, 8});
    auto geo = make_geometry(lat, {{{2, 2, 0}, {3, 5, 0}}, {{6, 1, 0}, {6, 2, 0}}});
    const RegisterLayout layout(lat);
    const Phase reset = qc::build_reset_object_flag(layout, *geo);
    const std::uint64_t a_obj = std::uint64_t{1} << layout.object_flag_qubit();

    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        const IVec x = lat.cell_coords(c);
        for (int i = 0; i < 9; ++i) {
            const IVec e = lat.velocity(i);
            IVec back{0, 0, 0};
            for (int j = 0; j < 2; ++j)
                back[j] = x[j] - e[j];
            bool flips = false;
            if (i != 0 && !geo->solid(x))
                for (const ObstacleBox& box : geo->obstacles())
                    flips = flips || box.contains(back, 2);

            sv::StateVector s(layout.total_qubits());
            s.set_all_zero();
            const std::uint64_t in =
                layout.basis_index(x, i) | stream_flag_bits(layout, i) | a_obj;
            s[in] = 1.0;
            qc::run_phase(s, reset);
            check_is_basis(s, flips ? (in ^ a_obj) : in, 1e-15);
        }
    }
}

TEST_CASE("reset in one dimension matches the same oracle") {
    const LatticeDescriptor lat(1, {8});
    auto geo = make_geometry(lat, {{{3, 0, 0}, {4, 0, 0}}});
    const RegisterLayout layout(lat);
    const Phase reset = qc::build_reset_object_flag(layout, *geo);
    const std::uint64_t a_obj = std::uint64_t{1} << layout.object_flag_qubit();

    for (int x = 0; x < 8; ++x) {
        for (int i = 0; i < 3; ++i) {
            const int back = x - lat.velocity(i)[0];
            const bool flips = i != 0 && !geo->solid({x, 0, 0}) && back >= 3 && back <= 4;
            sv::StateVector s(layout.total_qubits());
            s.set_all_zero();
            const std::uint64_t in =
                layout.basis_index({x, 0, 0}, i) | stream_flag_bits(layout, i) | a_obj;
            s[in] = 1.0;
            qc::run_phase(s, reset);
            check_is_basis(s, flips ? (in ^ a_obj) : in, 1e-15);
        }
    }
}

TEST_CASE("a single entrant bounces back to its origin in one step") {
    const LatticeDescriptor lat(1, {4});
    auto geo = make_geometry(lat, {{{2, 0, 0}, {2, 0, 0}}});
    ClassicalFlowField f(geo);
    f.at({1, 0, 0}, 1) = 1.0;
    const RegisterLayout layout(lat);

    sv::QuantumFlowState qs = qc::encode_rooted(f, layout);
    qc::timestep(qs, layout, *geo);
    const ClassicalFlowField g = qc::decode(qs, layout, geo);

    CHECK(g.at({1, 0, 0}, 2) == doctest::Approx(1.0).epsilon(1e-12));
    double rest = 0.0;
    for (std::int64_t c = 0; c < 4; ++c)
        for (int i = 0; i < 3; ++i)
            if (!(c == 1 && i == 2))
                rest = std::max(rest, std::abs(g.at_cell(c, i)));
    CHECK(rest <= 1e-12);
}

TEST_CASE("the quantum step tracks the reference dynamics") {
    struct Case {
        int d;
        std::vector<int> extents;
        std::vector<ObstacleBox> boxes;
        int steps;
        std::uint64_t seed;
    };
    const std::vector<Case> cases = {
        {1, {8}, {{{3, 0, 0}, {4, 0, 0}}}, 4, 1},
        {1, {16}, {{{2, 0, 0}, {2, 0, 0}}, {{9, 0, 0}, {12, 0, 0}}}, 4, 2},
        {2, {4, 4}, {{{1, 1, 0}, {2, 2, 0}}}, 4, 3},
        {2, {8, 8}, {{{2, 2, 0}, {3, 5, 0}}}, 3, 4},
        {2, {8, 8}, {{{1, 1, 0}, {2, 2, 0}}, {{5, 4, 0}, {6, 6, 0}}}, 3, 5},
    };

    for (const Case& tc : cases) {
        CAPTURE(tc.seed);
        const LatticeDescriptor lat(tc.d, tc.extents);
        auto geo = make_geometry(lat, tc.boxes);
        ClassicalFlowField f(geo);
        fill_random(f, tc.seed);
        const RegisterLayout layout(lat);

        sv::QuantumFlowState qs = qc::encode_rooted(f, layout);
        const double mass0 = qs.total_mass;
        for (int t = 0; t < tc.steps; ++t) {
            qc::timestep(qs, layout, *geo);
            stream(f);
            bounce_back(f);
            const ClassicalFlowField g = qc::decode(qs, layout, geo);
            CHECK(max_field_difference(f, g) <= 1e-12);
            CHECK(max_ancilla_amplitude(qs.vec, layout) <= 1e-14);
            CHECK(std::abs(qs.vec.norm() - 1.0) <= 1e-12);
            double mass = 0.0;
            for (double v : g.values())
                mass += v;
            CHECK(std::abs(mass - mass0) <= 1e-12 * mass0);
        }
    }
}

TEST_CASE("without obstacles the step is pure streaming and periodic") {
    const LatticeDescriptor lat(2, {4, 4});
    auto geo = make_geometry(lat, {});
    ClassicalFlowField f(geo);
    fill_random(f, 77);
    const RegisterLayout layout(lat);

    sv::QuantumFlowState qs = qc::encode_rooted(f, layout);
    ClassicalFlowField ref = f;
    for (int t = 0; t < 4; ++t) {
        qc::timestep(qs, layout, *geo);
        stream(ref);
        const ClassicalFlowField g = qc::decode(qs, layout, geo);
        CHECK(max_field_difference(ref, g) <= 1e-12);
    }
    // One full period of the 4-torus returns the initial field.
    const ClassicalFlowField g = qc::decode(qs, layout, geo);
    CHECK(max_field_difference(f, g) <= 1e-12);
}

TEST_CASE("phases appear in the pinned order") {
    const LatticeDescriptor lat(1, {4});
    auto geo = make_geometry(lat, {{{2, 0, 0}, {2, 0, 0}}});
    const RegisterLayout layout(lat);
    const qc::TimestepCircuit circuit = qc::build_timestep_circuit(layout, *geo);
    const std::vector<std::string> expected = {
        "set_stream_flags", "stream",      "flag_object",       "reverse_velocity",
        "return_step",      "reset_object_flag", "unset_stream_flags",
    };
    REQUIRE(circuit.phases.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k)
        CHECK(circuit.phases[k].name == expected[k]);
    CHECK_NOTHROW(circuit.phase("stream"));
    CHECK_THROWS_AS(circuit.phase("collide"), std::out_of_range);
}

TEST_CASE("gate tallies reflect the geometry") {
    const LatticeDescriptor lat(2, {8, 8});
    const RegisterLayout layout(lat);

    auto free_geo = make_geometry(lat, {});
    const qc::TimestepCircuit free_circuit = qc::build_timestep_circuit(layout, *free_geo);
    for (const char* name : {"flag_object", "reverse_velocity", "return_step",
                             "reset_object_flag"}) {
        const qc::GateCounts counts = qc::count_gates(free_circuit.phase(name));
        CHECK(counts.mcx_by_arity.empty());
        CHECK(counts.shifts == 0);
        CHECK(counts.range_flags == 0);
    }

    const qc::GateCounts stream_counts = qc::count_gates(free_circuit.phase("stream"));
    CHECK(stream_counts.shifts == 4);
    CHECK(stream_counts.qft_blocks == 8);

    const qc::GateCounts set_counts = qc::count_gates(free_circuit.phase("set_stream_flags"));
    CHECK(set_counts.mcx_by_arity.at(1) == 2);

    auto geo = make_geometry(lat, {{{2, 2, 0}, {3, 5, 0}}});
    const qc::TimestepCircuit circuit = qc::build_timestep_circuit(layout, *geo);
    const qc::GateCounts flag_counts = qc::count_gates(circuit.phase("flag_object"));
    CHECK(flag_counts.range_flags == 4);
    CHECK(flag_counts.mcx_by_arity.at(2) == 1);
    const qc::GateCounts reverse_counts = qc::count_gates(circuit.phase("reverse_velocity"));
    CHECK(reverse_counts.mcx_by_arity.at(2) == 2);
    const qc::GateCounts return_counts = qc::count_gates(circuit.phase("return_step"));
    CHECK(return_counts.shifts == 4);
    const qc::GateCounts reset_counts = qc::count_gates(circuit.phase("reset_object_flag"));
    std::uint64_t reset_total = 0;
    for (const auto& [arity, n] : reset_counts.mcx_by_arity)
        reset_total += n;
    CHECK(reset_total > 0);
}

TEST_CASE("growing one extent widens only that shift register") {
    const LatticeDescriptor small(2, {4, 4});
    const LatticeDescriptor tall(2, {4, 8});
    const Phase a = qc::build_stream(RegisterLayout(small));
    const Phase b = qc::build_stream(RegisterLayout(tall));
    REQUIRE(a.gates.size() == 4);
    REQUIRE(b.gates.size() == 4);
    CHECK(a.gates[0].reg.size() == 2);
    CHECK(b.gates[0].reg.size() == 2);
    CHECK(a.gates[2].reg.size() == 2);
    CHECK(b.gates[2].reg.size() == 3);
}
