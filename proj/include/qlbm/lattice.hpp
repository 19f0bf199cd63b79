#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace qlbm {

/// Integer vector with one slot per spatial dimension; unused slots stay 0.
using IVec = std::array<int, 3>;

/// Builds the ordered discrete velocity set of the DdQq scheme (q = 3^d).
///
/// Ordering: index 0 is the rest vector; the remaining vectors are grouped
/// by shell (number of nonzero components, ascending). Within a shell the
/// canonical half H (vectors whose last nonzero component is +1) comes
/// first, sorted by descending lexicographic comparison of components,
/// followed by the negations of H in matching order. For d = 1 this yields
/// (0), (1), (-1); for d = 2 it yields the usual D2Q9 listing
/// (0,0); (1,0), (0,1), (-1,0), (0,-1); (1,1), (-1,1), (-1,-1), (1,-1).
std::vector<IVec> build_velocity_set(int d);

/// Geometry and velocity bookkeeping of a DdQq lattice on a periodic grid
/// whose extents are powers of two.
class LatticeDescriptor {
public:
    LatticeDescriptor(int d, const std::vector<int>& extents);

    int dim() const { return d_; }
    int num_velocities() const { return q_; }
    int extent(int j) const { return extents_[j]; }
    const std::array<int, 3>& extents() const { return extents_; }
    /// Number of qubits needed to address dimension j (log2 of the extent).
    int extent_bits(int j) const { return extent_bits_[j]; }
    std::int64_t num_cells() const { return num_cells_; }

    const std::vector<IVec>& velocities() const { return velocities_; }
    const IVec& velocity(int i) const { return velocities_[i]; }

    /// Index ī with e_ī = -e_i. opposite(0) == 0.
    int opposite(int i) const { return opposite_[i]; }

    /// Linear cell index: x_1 + N_1*(x_2 + N_2*x_3). Because every extent is
    /// a power of two this equals the concatenated binary coordinates with
    /// dimension 1 in the least significant bits, matching the position
    /// register value of the quantum encoding.
    std::int64_t cell_index(const IVec& x) const {
        std::int64_t idx = 0;
        for (int j = d_ - 1; j >= 0; --j) idx = idx * extents_[j] + x[j];
        return idx;
    }
    IVec cell_coords(std::int64_t idx) const {
        IVec x{0, 0, 0};
        for (int j = 0; j < d_; ++j) {
            x[j] = static_cast<int>(idx % extents_[j]);
            idx /= extents_[j];
        }
        return x;
    }

    /// x + e, wrapped periodically into the grid.
    IVec advect(const IVec& x, const IVec& e) const {
        IVec y{0, 0, 0};
        for (int j = 0; j < d_; ++j) {
            int c = x[j] + e[j];
            if (c < 0) c += extents_[j];
            if (c >= extents_[j]) c -= extents_[j];
            y[j] = c;
        }
        return y;
    }

private:
    int d_;
    int q_;
    std::array<int, 3> extents_{1, 1, 1};
    std::array<int, 3> extent_bits_{0, 0, 0};
    std::int64_t num_cells_;
    std::vector<IVec> velocities_;
    std::vector<int> opposite_;
};

/// Axis-aligned obstacle box, inclusive grid coordinates per dimension.
struct ObstacleBox {
    IVec lo{0, 0, 0};
    IVec hi{0, 0, 0};

    bool contains(const IVec& x, int d) const {
        for (int j = 0; j < d; ++j)
            if (x[j] < lo[j] || x[j] > hi[j]) return false;
        return true;
    }
};

/// A lattice plus its obstacles. Boxes must lie strictly inside the grid
/// with at least one fluid cell between a box and the periodic seam and
/// between any two boxes (Chebyshev gap >= 2); validated on construction.
class DomainGeometry {
public:
    DomainGeometry(LatticeDescriptor lattice, std::vector<ObstacleBox> obstacles);

    const LatticeDescriptor& lattice() const { return lattice_; }
    const std::vector<ObstacleBox>& obstacles() const { return obstacles_; }

    bool solid(const IVec& x) const { return solid_[lattice_.cell_index(x)] != 0; }
    bool solid_at(std::int64_t cell_idx) const { return solid_[cell_idx] != 0; }

private:
    LatticeDescriptor lattice_;
    std::vector<ObstacleBox> obstacles_;
    std::vector<std::uint8_t> solid_;
};

/// A (fluid cell, velocity) pair whose one-step displacement lands in a
/// solid cell.
struct BoundaryLink {
    IVec x_f{0, 0, 0};
    int i = 0;
};

/// All boundary links of the geometry, ordered lexicographically by cell
/// index, then velocity index. Empty if there are no obstacles.
std::vector<BoundaryLink> boundary_links(const DomainGeometry& geometry);

} // namespace qlbm
