#pragma once

#include <vector>

#include "hadr/dataset.hpp"
#include "hadr/rng.hpp"

namespace hadr {

enum class Rounding { floor, ceil, nearest };

struct ImbalanceStats {
    long n_min = 0;
    long n_maj = 0;
    double ir = 0.0;  // n_maj / n_min
    int ir_star = 1;  // number of data blocks
};

// One near-balanced training unit: one majority chunk joined with the full
// minority set. source_row_ids index into the parent training set.
struct DataBlock {
    Dataset data;
    int majority_chunk_index = 0;
    std::vector<std::size_t> source_row_ids;
};

// ir_star is floor(ir), ceil(ir) or the nearest integer (ties toward
// floor), never below 1; a dataset with n_maj <= n_min yields one block.
ImbalanceStats compute_stats(const Dataset& train, Rounding rounding);

// Shuffles the majority rows, deals them round-robin into ir_star chunks
// (sizes differ by at most one), and joins each chunk with every minority
// row. Deterministic in the rng seed.
std::vector<DataBlock> construct_blocks(const Dataset& train, const ImbalanceStats& stats,
                                        Rng& rng);

} // namespace hadr
