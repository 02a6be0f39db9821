#include "hadr/dbc.hpp"

#include <cmath>

#include "hadr/errors.hpp"

namespace hadr {

ImbalanceStats compute_stats(const Dataset& train, Rounding rounding) {
    train.validate();
    ImbalanceStats st;
    st.n_min = static_cast<long>(train.count(1));
    st.n_maj = static_cast<long>(train.count(0));
    if (st.n_min == 0 || st.n_maj == 0) {
        throw DataError("compute_stats: both classes must be present");
    }
    st.ir = static_cast<double>(st.n_maj) / static_cast<double>(st.n_min);
    if (st.n_maj <= st.n_min) {
        st.ir_star = 1;
        return st;
    }
    switch (rounding) {
        case Rounding::floor:
            st.ir_star = static_cast<int>(std::floor(st.ir));
            break;
        case Rounding::ceil:
            st.ir_star = static_cast<int>(std::ceil(st.ir));
            break;
        case Rounding::nearest: {
            const double fl = std::floor(st.ir);
            st.ir_star = static_cast<int>(st.ir - fl > 0.5 ? fl + 1.0 : fl);
            break;
        }
    }
    if (st.ir_star < 1) st.ir_star = 1;
    return st;
}

std::vector<DataBlock> construct_blocks(const Dataset& train, const ImbalanceStats& stats,
                                        Rng& rng) {
    std::vector<std::size_t> maj, min;
    for (std::size_t i = 0; i < train.n(); ++i) {
        (train.labels[i] == 1 ? min : maj).push_back(i);
    }
    if (static_cast<long>(maj.size()) != stats.n_maj ||
        static_cast<long>(min.size()) != stats.n_min) {
        throw DataError("construct_blocks: stats were not computed from this dataset");
    }

    rng.shuffle(maj);
    const int k = stats.ir_star;
    std::vector<std::vector<std::size_t>> chunks(k);
    for (std::size_t i = 0; i < maj.size(); ++i) {
        chunks[i % k].push_back(maj[i]);
    }

    std::vector<DataBlock> blocks;
    blocks.reserve(k);
    for (int b = 0; b < k; ++b) {
        DataBlock block;
        block.majority_chunk_index = b;
        block.source_row_ids = chunks[b];
        block.source_row_ids.insert(block.source_row_ids.end(), min.begin(), min.end());
        block.data = train.subset(block.source_row_ids,
                                  train.name + "/block" + std::to_string(b));
        blocks.push_back(std::move(block));
    }
    return blocks;
}

} // namespace hadr
