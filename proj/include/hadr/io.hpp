#pragma once

#include <optional>
#include <string>

#include "hadr/dataset.hpp"

namespace hadr {

// CSV with a header row, comma separated, decimal-point reals. The label
// column is named or given as a 0-based index; the file must contain
// exactly two distinct label values, and positive_label picks which one
// maps to 1.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label);

// KEEL-style .dat: @relation/@attribute/@data header, comma-separated rows,
// last attribute is the class. The minority class maps to 1 unless
// positive_override names a class explicitly. Categorical inputs are coded
// by their index in the declared value list.
Dataset load_keel_dat(const std::string& path,
                      const std::optional<std::string>& positive_override = std::nullopt);

// Internal JSON dataset format: {name, feature_names, features, labels}.
Dataset load_dataset_json(const std::string& path);
void save_dataset_json(const Dataset& d, const std::string& path);

// Writes CSV with header; the label column is appended last as 0/1.
void save_csv(const Dataset& d, const std::string& path,
              const std::string& label_column = "label");

} // namespace hadr
