#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pxp/blocks.hpp"
#include "pxp/params.hpp"

namespace pxp {

/// One accumulated configuration class of the perturbative expansion.
/// n_anchor / n_opp count q tensors on the anchor / opposite sublattice,
/// pmask marks block in-legs receiving a 1, omask marks block out-legs that
/// must emit 0 (they feed a q).
struct TableEntry {
    int n_anchor = 0;
    int n_opp = 0;
    uint32_t pmask = 0;
    uint32_t omask = 0;
    long long coef = 0;
};

struct CountingTable {
    int dim = 1;
    int order = 0;
    std::string op_id;
    // structural fingerprint of the block the table was built for
    uint64_t leg_hash = 0;
    std::vector<TableEntry> entries; // sorted

    /// Plain counting factor f_{n,m} with n q's on the opposite sublattice and
    /// m on the anchor sublattice (the paper's matrix for single-site ops).
    long long fnm(int n_opp, int n_anchor) const;
    /// Anti-diagonal sums f_k = sum_{n+m=k} f_{n,m}.
    std::vector<long long> diagonal_sums() const;
};

uint64_t block_leg_hash(const ReducedBlock& block);

/// Exhaustive enumeration of admissible q configurations around the block,
/// grouped by sublattice counts and leg patterns. Layered growth generates
/// each configuration exactly once.
CountingTable enumerate_counting(const ReducedBlock& geometry, int order, int num_threads = 0);

std::string series_cache_dir();
bool load_table(CountingTable& table, const std::string& dir, int dim, const std::string& op_id, int order);
void save_table(const CountingTable& table, const std::string& dir);

/// Load-or-build with on-disk and in-memory caching.
const CountingTable& get_table(const ReducedBlock& geometry, int order);

struct SeriesResult {
    std::vector<cplx> partial; // partial sums S_0 .. S_order
    cplx value;                // S_order
};

/// Evaluate the expansion of the block expectation at the given parameters.
SeriesResult series_eval(const CountingTable& table, const ReducedBlock& block,
                         const VariationalParams& p, int order);

/// Default truncation orders, Fig. 7 caption: 12 in 2D, 9 in 3D.
int default_order(int dim);

/// |S_N - S_{N-1}| of the n-operator expansion; the regime mask is the region
/// where this is below the threshold.
double series_increment_n(int dim, const VariationalParams& p, int order);
bool in_perturbative_regime(int dim, const VariationalParams& p, int order, double threshold = 1e-3);

/// f_{k+1} > sqrt(k) f_k for every enumerated k with f_{k+1} > 0.
bool superexponential_check(const CountingTable& table);

} // namespace pxp
