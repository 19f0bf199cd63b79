#include "qlbm/lattice.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qlbm {

namespace {

int shell_of(const IVec& v, int d) {
    int s = 0;
    for (int j = 0; j < d; ++j) s += (v[j] != 0);
    return s;
}

// Sign of the last (highest-dimension) nonzero component; 0 for the rest vector.
int last_nonzero_sign(const IVec& v, int d) {
    for (int j = d - 1; j >= 0; --j)
        if (v[j] != 0) return v[j];
    return 0;
}

IVec negate(const IVec& v, int d) {
    IVec w{0, 0, 0};
    for (int j = 0; j < d; ++j) w[j] = -v[j];
    return w;
}

// Descending lexicographic comparison on components, dimension 1 first.
bool desc_lex_less(const IVec& a, const IVec& b, int d) {
    for (int j = 0; j < d; ++j) {
        if (a[j] != b[j]) return a[j] > b[j];
    }
    return false;
}

} // namespace

std::vector<IVec> build_velocity_set(int d) {
    if (d < 1 || d > 3)
        throw std::invalid_argument("build_velocity_set: dimension must be 1, 2 or 3");

    std::vector<IVec> all;
    const int q = d == 1 ? 3 : (d == 2 ? 9 : 27);
    all.reserve(q);
    IVec v{0, 0, 0};
    for (int c0 = -1; c0 <= 1; ++c0) {
        v[0] = c0;
        if (d == 1) { all.push_back(v); continue; }
        for (int c1 = -1; c1 <= 1; ++c1) {
            v[1] = c1;
            if (d == 2) { all.push_back(v); continue; }
            for (int c2 = -1; c2 <= 1; ++c2) {
                v[2] = c2;
                all.push_back(v);
            }
        }
    }

    // Canonical representative of the (v, -v) pair: the half with the last
    // nonzero component positive.
    auto canon = [&](const IVec& w) {
        return last_nonzero_sign(w, d) >= 0 ? w : negate(w, d);
    };
    std::sort(all.begin(), all.end(), [&](const IVec& a, const IVec& b) {
        const int sa = shell_of(a, d), sb = shell_of(b, d);
        if (sa != sb) return sa < sb;
        const IVec ca = canon(a), cb = canon(b);
        if (ca != cb) return desc_lex_less(ca, cb, d);
        // Within a canonical pair, the positive half comes first.
        return last_nonzero_sign(a, d) > last_nonzero_sign(b, d);
    });

    // The sort above interleaves pairs; the documented order lists the whole
    // half-shell H before -H. Regroup each shell accordingly.
    std::vector<IVec> out;
    out.reserve(all.size());
    std::size_t pos = 0;
    for (int s = 0; s <= d; ++s) {
        std::vector<IVec> pos_half, neg_half;
        while (pos < all.size() && shell_of(all[pos], d) == s) {
            if (last_nonzero_sign(all[pos], d) >= 0)
                pos_half.push_back(all[pos]);
            else
                neg_half.push_back(all[pos]);
            ++pos;
        }
        out.insert(out.end(), pos_half.begin(), pos_half.end());
        out.insert(out.end(), neg_half.begin(), neg_half.end());
    }
    return out;
}

LatticeDescriptor::LatticeDescriptor(int d, const std::vector<int>& extents) : d_(d) {
    if (d < 1 || d > 3)
        throw std::invalid_argument("LatticeDescriptor: dimension must be 1, 2 or 3");
    if (static_cast<int>(extents.size()) != d)
        throw std::invalid_argument("LatticeDescriptor: need one extent per dimension");
    num_cells_ = 1;
    for (int j = 0; j < d; ++j) {
        const int n = extents[j];
        if (n < 2 || (n & (n - 1)) != 0)
            throw std::invalid_argument("LatticeDescriptor: extent " + std::to_string(n) +
                                        " is not a power of two >= 2");
        extents_[j] = n;
        int bits = 0;
        while ((1 << bits) < n) ++bits;
        extent_bits_[j] = bits;
        num_cells_ *= n;
    }
    velocities_ = build_velocity_set(d);
    q_ = static_cast<int>(velocities_.size());
    opposite_.assign(q_, -1);
    for (int i = 0; i < q_; ++i) {
        const IVec neg = negate(velocities_[i], d);
        for (int k = 0; k < q_; ++k) {
            if (velocities_[k] == neg) {
                opposite_[i] = k;
                break;
            }
        }
    }
}

DomainGeometry::DomainGeometry(LatticeDescriptor lattice, std::vector<ObstacleBox> obstacles)
    : lattice_(std::move(lattice)), obstacles_(std::move(obstacles)) {
    const int d = lattice_.dim();
    for (std::size_t b = 0; b < obstacles_.size(); ++b) {
        const ObstacleBox& box = obstacles_[b];
        for (int j = 0; j < d; ++j) {
            if (box.lo[j] > box.hi[j])
                throw std::invalid_argument("DomainGeometry: obstacle " + std::to_string(b) +
                                            " has lo > hi in dimension " + std::to_string(j));
            // One fluid cell between the box and the periodic wrap seam.
            if (box.lo[j] < 1 || box.hi[j] > lattice_.extent(j) - 2)
                throw std::invalid_argument("DomainGeometry: obstacle " + std::to_string(b) +
                                            " touches or crosses the periodic seam in dimension " +
                                            std::to_string(j));
        }
        for (std::size_t b2 = 0; b2 < b; ++b2) {
            const ObstacleBox& other = obstacles_[b2];
            bool separated = false;
            for (int j = 0; j < d; ++j) {
                if (box.lo[j] > other.hi[j] + 1 || box.hi[j] < other.lo[j] - 1) {
                    separated = true;
                    break;
                }
            }
            if (!separated)
                throw std::invalid_argument("DomainGeometry: obstacles " + std::to_string(b2) +
                                            " and " + std::to_string(b) +
                                            " touch or overlap (need a one-cell fluid gap)");
        }
    }
    solid_.assign(static_cast<std::size_t>(lattice_.num_cells()), 0);
    for (std::int64_t c = 0; c < lattice_.num_cells(); ++c) {
        const IVec x = lattice_.cell_coords(c);
        for (const ObstacleBox& box : obstacles_) {
            if (box.contains(x, d)) {
                solid_[c] = 1;
                break;
            }
        }
    }
}

std::vector<BoundaryLink> boundary_links(const DomainGeometry& geometry) {
    const LatticeDescriptor& lat = geometry.lattice();
    std::vector<BoundaryLink> links;
    for (std::int64_t c = 0; c < lat.num_cells(); ++c) {
        if (geometry.solid_at(c)) continue;
        const IVec x = lat.cell_coords(c);
        for (int i = 1; i < lat.num_velocities(); ++i) {
            if (geometry.solid(lat.advect(x, lat.velocity(i)))) links.push_back({x, i});
        }
    }
    return links;
}

} // namespace qlbm
