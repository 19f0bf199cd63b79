#include "qlbm/classical.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qlbm {

ClassicalFlowField::ClassicalFlowField(std::shared_ptr<const DomainGeometry> geometry)
    : geometry_(std::move(geometry)), q_(geometry_->lattice().num_velocities()) {
    f_.assign(static_cast<std::size_t>(geometry_->lattice().num_cells()) * q_, 0.0);
}

double total_mass(const ClassicalFlowField& field) {
    return std::accumulate(field.values().begin(), field.values().end(), 0.0);
}

void stream(ClassicalFlowField& field) {
    const LatticeDescriptor& lat = field.lattice();
    const int q = lat.num_velocities();
    std::vector<double> next(field.values().size(), 0.0);
    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        const IVec x = lat.cell_coords(c);
        for (int i = 0; i < q; ++i) {
            const double v = field.at_cell(c, i);
            if (v == 0.0) continue;
            const std::int64_t dest = lat.cell_index(lat.advect(x, lat.velocity(i)));
            next[static_cast<std::size_t>(dest) * q + i] = v;
        }
    }
    for (std::int64_t c = 0; c < lat.num_cells(); ++c)
        for (int i = 0; i < q; ++i)
            field.at_cell(c, i) = next[static_cast<std::size_t>(c) * q + i];
    field.set_time(field.time() + 1);
}

void bounce_back(ClassicalFlowField& field) {
    const DomainGeometry& geo = field.geometry();
    const LatticeDescriptor& lat = field.lattice();
    const int q = lat.num_velocities();
    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        if (!geo.solid_at(c)) continue;
        const IVec x = lat.cell_coords(c);
        for (int i = 0; i < q; ++i) {
            const double v = field.at_cell(c, i);
            if (v == 0.0) continue;
            // The population entered from x - e_i, which must be fluid.
            const IVec back = lat.advect(x, lat.velocity(lat.opposite(i)));
            if (geo.solid(back))
                throw std::logic_error("bounce_back: population on a solid cell deeper than "
                                       "one step from the fluid");
            field.at(back, lat.opposite(i)) += v;
            field.at_cell(c, i) = 0.0;
        }
    }
}

std::vector<double> equilibrium(const LatticeDescriptor& lattice, double rho,
                                const std::array<double, 3>& u) {
    if (rho < 0.0) throw std::invalid_argument("equilibrium: negative density");
    double usq = 0.0;
    for (int j = 0; j < lattice.dim(); ++j) usq += u[j] * u[j];
    if (std::sqrt(usq) > 0.3 + 1e-12)
        throw std::invalid_argument("equilibrium: |u| exceeds the lattice speed guard 0.3");

    // Shell weights: 1D (2/3, 1/6); 2D (4/9, 1/9, 1/36); 3D (8/27, 2/27, 1/54, 1/216).
    // All follow w_shell = (2/3)^(d - s) * (1/6)^s for a shell with s moving axes.
    const int d = lattice.dim();
    std::array<double, 4> w{};
    for (int s = 0; s <= d; ++s) {
        double ws = 1.0;
        for (int k = 0; k < d - s; ++k) ws *= 2.0 / 3.0;
        for (int k = 0; k < s; ++k) ws *= 1.0 / 6.0;
        w[s] = ws;
    }

    std::vector<double> feq(lattice.num_velocities());
    for (int i = 0; i < lattice.num_velocities(); ++i) {
        const IVec& e = lattice.velocity(i);
        int shell = 0;
        double eu = 0.0;
        for (int j = 0; j < d; ++j) {
            shell += (e[j] != 0);
            eu += e[j] * u[j];
        }
        feq[i] = rho * w[shell] * (1.0 + 3.0 * eu + 4.5 * eu * eu - 1.5 * usq);
    }
    return feq;
}

void bgk_collide(ClassicalFlowField& field, const CollisionParams& params) {
    if (!params.enabled) return;
    if (!(params.tau > 0.5))
        throw std::invalid_argument("bgk_collide: tau must exceed 0.5 for stability");
    const DomainGeometry& geo = field.geometry();
    const LatticeDescriptor& lat = field.lattice();
    const int q = lat.num_velocities();
    const double omega = 1.0 / params.tau; // dt = 1
    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        if (geo.solid_at(c)) continue;
        double rho = 0.0;
        std::array<double, 3> mom{0.0, 0.0, 0.0};
        for (int i = 0; i < q; ++i) {
            const double v = field.at_cell(c, i);
            rho += v;
            for (int j = 0; j < lat.dim(); ++j) mom[j] += v * lat.velocity(i)[j];
        }
        if (rho <= 0.0) continue;
        std::array<double, 3> u{0.0, 0.0, 0.0};
        for (int j = 0; j < lat.dim(); ++j) u[j] = mom[j] / rho;
        const std::vector<double> feq = equilibrium(lat, rho, u);
        for (int i = 0; i < q; ++i) {
            double& v = field.at_cell(c, i);
            v -= omega * (v - feq[i]);
        }
    }
}

std::vector<double> mem_force(const ClassicalFlowField& field,
                              const std::vector<BoundaryLink>& links) {
    const LatticeDescriptor& lat = field.lattice();
    std::vector<double> force(lat.dim(), 0.0);
    for (const BoundaryLink& link : links) {
        const double v = field.at(link.x_f, link.i);
        for (int j = 0; j < lat.dim(); ++j)
            force[j] += 2.0 * lat.velocity(link.i)[j] * v;
    }
    return force;
}

std::vector<double> mem_force(const ClassicalFlowField& field) {
    return mem_force(field, boundary_links(field.geometry()));
}

} // namespace qlbm
