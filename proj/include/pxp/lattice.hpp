#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pxp {

using Coord = std::array<int, 3>;

enum class Boundary { periodic, open };

/// Hypercubic lattice in 1..3 dimensions with the canonical edge orientation
/// (all arrows along +x, +y, +z). Sublattice A contains the origin; the two
/// sublattices are distinguished by coordinate-sum parity.
class Lattice {
  public:
    Lattice(int dim, std::vector<int> extent, Boundary boundary = Boundary::periodic);

    int dim() const { return dim_; }
    int extent(int axis) const { return extent_[axis]; }
    Boundary boundary() const { return boundary_; }
    int num_sites() const { return num_sites_; }

    int site_index(const Coord& c) const;
    Coord site_coord(int index) const;
    bool in_range(const Coord& c) const;

    /// 0 for sublattice A (even coordinate sum), 1 for B.
    int sublattice_of(const Coord& c) const;
    int sublattice_of(int index) const { return sublattice_of(site_coord(index)); }

    /// Nearest neighbours at unit distance (deduplicated on small periodic extents).
    std::vector<int> neighbors(int index) const;
    /// Next-nearest neighbours: |i-j| = 2a in 1D, |i-j| = sqrt(2) a for D > 1.
    std::vector<int> next_nearest(int index) const;
    /// Neighbours along +axis / -axis directions under the canonical orientation.
    std::vector<int> downstream(int index) const;
    std::vector<int> upstream(int index) const;

    /// All nearest-neighbour edges, each unordered pair once.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    /// All next-nearest-neighbour pairs, each once.
    const std::vector<std::pair<int, int>>& nnn_pairs() const { return nnn_pairs_; }

    /// NNN pairs per lattice site (each pair counted once): 1, 2, 6 for D = 1, 2, 3.
    static int nnn_pairs_per_site(int dim);

  private:
    std::vector<int> sites_at_offsets(int index, const std::vector<Coord>& offsets) const;

    int dim_;
    std::vector<int> extent_;
    Boundary boundary_;
    int num_sites_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::pair<int, int>> nnn_pairs_;
};

} // namespace pxp
