#pragma once

#include "qlbm/lattice.hpp"

#include <memory>
#include <vector>

namespace qlbm {

/// BGK relaxation settings. dt is fixed to one lattice unit.
struct CollisionParams {
    double tau = 1.0;
    bool enabled = false;
};

/// Real-valued population densities f_i(x, t) on the grid; the reference
/// state every quantum-path test is compared against.
class ClassicalFlowField {
public:
    explicit ClassicalFlowField(std::shared_ptr<const DomainGeometry> geometry);

    const DomainGeometry& geometry() const { return *geometry_; }
    const std::shared_ptr<const DomainGeometry>& geometry_ptr() const { return geometry_; }
    const LatticeDescriptor& lattice() const { return geometry_->lattice(); }

    double& at(const IVec& x, int i) { return f_[idx(x, i)]; }
    double at(const IVec& x, int i) const { return f_[idx(x, i)]; }
    double& at_cell(std::int64_t cell, int i) { return f_[cell * q_ + i]; }
    double at_cell(std::int64_t cell, int i) const { return f_[cell * q_ + i]; }

    const std::vector<double>& values() const { return f_; }
    int time() const { return t_; }
    void set_time(int t) { t_ = t; }

private:
    std::size_t idx(const IVec& x, int i) const {
        return static_cast<std::size_t>(geometry_->lattice().cell_index(x)) * q_ + i;
    }

    std::shared_ptr<const DomainGeometry> geometry_;
    int q_;
    std::vector<double> f_;
    int t_ = 0;
};

double total_mass(const ClassicalFlowField& field);

/// Advects every population one step along its velocity (periodic wrap) and
/// increments the timestep. Mass is conserved exactly; populations may land
/// on solid cells until bounce_back runs.
void stream(ClassicalFlowField& field);

/// Moves every population sitting on a solid cell back to its pre-stream
/// cell with reversed velocity. Must run immediately after stream.
void bounce_back(ClassicalFlowField& field);

/// Second-order DdQq equilibrium with the canonical lattice weights.
/// Requires |u| <= 0.3 (lattice speed-of-sound guard).
std::vector<double> equilibrium(const LatticeDescriptor& lattice, double rho,
                                const std::array<double, 3>& u);

/// BGK relaxation f* = f - (dt/tau)(f - f^eq) at every fluid cell.
void bgk_collide(ClassicalFlowField& field, const CollisionParams& params);

/// Momentum-exchange force on the obstacles, evaluated on the pre-stream
/// field: F_j = sum over boundary links (x_f, i) of 2 (e_i)_j f_i(x_f).
std::vector<double> mem_force(const ClassicalFlowField& field);
std::vector<double> mem_force(const ClassicalFlowField& field,
                              const std::vector<BoundaryLink>& links);

} // namespace qlbm
