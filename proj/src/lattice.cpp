#include "pxp/lattice.hpp"

#include <algorithm>
#include <set>

namespace pxp {

Lattice::Lattice(int dim, std::vector<int> extent, Boundary boundary)
    : dim_(dim), extent_(std::move(extent)), boundary_(boundary) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("Lattice: dimension must be 1, 2 or 3");
    if (static_cast<int>(extent_.size()) != dim_)
        throw std::invalid_argument("Lattice: one extent per axis required");
    num_sites_ = 1;
    for (int a = 0; a < dim_; ++a) {
        if (extent_[a] < 1) throw std::invalid_argument("Lattice: extents must be positive");
        if (boundary_ == Boundary::periodic && extent_[a] % 2 != 0)
            throw std::invalid_argument("Lattice: periodic extents must be even (bipartition)");
        num_sites_ *= extent_[a];
    }

    // Edge lists, each unordered pair exactly once.
    std::set<std::pair<int, int>> nn, nnn;
    for (int i = 0; i < num_sites_; ++i) {
        for (int j : neighbors(i)) nn.insert({std::min(i, j), std::max(i, j)});
        for (int j : next_nearest(i)) nnn.insert({std::min(i, j), std::max(i, j)});
    }
    edges_.assign(nn.begin(), nn.end());
    nnn_pairs_.assign(nnn.begin(), nnn.end());
}

int Lattice::site_index(const Coord& c) const {
    int idx = 0;
    for (int a = dim_ - 1; a >= 0; --a) {
        if (c[a] < 0 || c[a] >= extent_[a]) throw std::out_of_range("Lattice: site out of range");
        idx = idx * extent_[a] + c[a];
    }
    return idx;
}

Coord Lattice::site_coord(int index) const {
    Coord c{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
        c[a] = index % extent_[a];
        index /= extent_[a];
    }
    return c;
}

bool Lattice::in_range(const Coord& c) const {
    for (int a = 0; a < dim_; ++a)
        if (c[a] < 0 || c[a] >= extent_[a]) return false;
    return true;
}

int Lattice::sublattice_of(const Coord& c) const {
    if (!in_range(c)) throw std::out_of_range("Lattice: site out of range");
    int s = 0;
    for (int a = 0; a < dim_; ++a) s += c[a];
    return ((s % 2) + 2) % 2;
}

std::vector<int> Lattice::sites_at_offsets(int index, const std::vector<Coord>& offsets) const {
    Coord c = site_coord(index);
    std::set<int> out;
    for (const Coord& d : offsets) {
        Coord t = c;
        bool ok = true;
        for (int a = 0; a < dim_; ++a) {
            t[a] += d[a];
            if (boundary_ == Boundary::periodic) {
                t[a] = ((t[a] % extent_[a]) + extent_[a]) % extent_[a];
            } else if (t[a] < 0 || t[a] >= extent_[a]) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        int j = site_index(t);
        if (j != index) out.insert(j); // extent-2 wraps can alias back onto the site
    }
    return {out.begin(), out.end()};
}

std::vector<int> Lattice::neighbors(int index) const {
    std::vector<Coord> offsets;
    for (int a = 0; a < dim_; ++a) {
        Coord d{0, 0, 0};
        d[a] = 1;
        offsets.push_back(d);
        d[a] = -1;
        offsets.push_back(d);
    }
    return sites_at_offsets(index, offsets);
}

std::vector<int> Lattice::next_nearest(int index) const {
    std::vector<Coord> offsets;
    if (dim_ == 1) {
        offsets.push_back({2, 0, 0});
        offsets.push_back({-2, 0, 0});
    } else {
        for (int a = 0; a < dim_; ++a)
            for (int b = a + 1; b < dim_; ++b)
                for (int sa : {1, -1})
                    for (int sb : {1, -1}) {
                        Coord d{0, 0, 0};
                        d[a] = sa;
                        d[b] = sb;
                        offsets.push_back(d);
                    }
    }
    return sites_at_offsets(index, offsets);
}

std::vector<int> Lattice::downstream(int index) const {
    std::vector<Coord> offsets;
    for (int a = 0; a < dim_; ++a) {
        Coord d{0, 0, 0};
        d[a] = 1;
        offsets.push_back(d);
    }
    return sites_at_offsets(index, offsets);
}

std::vector<int> Lattice::upstream(int index) const {
    std::vector<Coord> offsets;
    for (int a = 0; a < dim_; ++a) {
        Coord d{0, 0, 0};
        d[a] = -1;
        offsets.push_back(d);
    }
    return sites_at_offsets(index, offsets);
}

int Lattice::nnn_pairs_per_site(int dim) {
    switch (dim) {
        case 1: return 1;  // two distance-2 partners per site
        case 2: return 2;  // four plane diagonals per site
        case 3: return 6;  // twelve plane diagonals per site
        default: throw std::invalid_argument("nnn_pairs_per_site: dimension must be 1, 2 or 3");
    }
}

} // namespace pxp
