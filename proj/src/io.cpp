#include "hadr/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hadr/errors.hpp"
#include "hadr/serialize.hpp"

namespace hadr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_real(const std::string& s, double* out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    *out = v;
    return true;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open file: " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

} // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label) {
    const auto lines = read_lines(path);
    if (lines.empty()) {
        throw DataError("empty CSV file: " + path);
    }
    const auto header = split_csv_line(lines[0]);
    if (header.empty()) {
        throw DataError("CSV header row missing: " + path);
    }

    // Label column by name first, by 0-based index as a fallback.
    std::size_t label_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == label_column) {
            label_idx = j;
            break;
        }
    }
    if (label_idx == header.size()) {
        double idx;
        if (parse_real(label_column, &idx) && idx >= 0 && idx < static_cast<double>(header.size()) &&
            idx == std::floor(idx)) {
            label_idx = static_cast<std::size_t>(idx);
        } else {
            throw DataError("label column '" + label_column + "' not found in " + path);
        }
    }

    Dataset d;
    d.name = file_stem(path);
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_idx) d.feature_names.push_back(header[j]);
    }
    const std::size_t m = d.feature_names.size();

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trim(lines[r]).empty()) continue;
        const auto cells = split_csv_line(lines[r]);
        if (cells.size() != header.size()) {
            throw DataError(path + ": row " + std::to_string(r + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == label_idx) {
                raw_labels.push_back(cells[j]);
                continue;
            }
            double v;
            if (!parse_real(cells[j], &v)) {
                throw DataError(path + ": non-numeric value '" + cells[j] + "' at row " +
                                std::to_string(r + 1) + ", column '" + header[j] + "'");
            }
            values.push_back(v);
        }
    }
    if (raw_labels.empty()) {
        throw DataError("no data rows in " + path);
    }

    std::map<std::string, long> label_counts;
    for (const auto& l : raw_labels) ++label_counts[l];
    if (label_counts.size() != 2) {
        throw DataError(path + ": label column must hold exactly 2 distinct values, found " +
                        std::to_string(label_counts.size()));
    }
    if (label_counts.find(positive_label) == label_counts.end()) {
        throw DataError(path + ": positive label '" + positive_label + "' not present");
    }

    d.features = Matrix(raw_labels.size(), m, std::move(values));
    d.labels.reserve(raw_labels.size());
    for (const auto& l : raw_labels) d.labels.push_back(l == positive_label ? 1 : 0);
    d.validate();
    return d;
}

Dataset load_keel_dat(const std::string& path,
                      const std::optional<std::string>& positive_override) {
    const auto lines = read_lines(path);

    struct Attribute {
        std::string name;
        bool categorical = false;
        std::vector<std::string> values; // for categorical
    };
    std::vector<Attribute> attrs;
    std::string relation;
    std::size_t data_start = lines.size();

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string line = trim(lines[i]);
        if (line.empty()) continue;
        std::string lower = line;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (lower.rfind("@relation", 0) == 0) {
            relation = trim(line.substr(9));
        } else if (lower.rfind("@attribute", 0) == 0) {
            std::string rest = trim(line.substr(10));
            Attribute a;
            // Name runs to the first space or '{'.
            std::size_t p = rest.find_first_of(" \t{");
            if (p == std::string::npos) {
                throw DataError(path + ": malformed @attribute line: " + line);
            }
            a.name = rest.substr(0, p);
            std::string spec = trim(rest.substr(p));
            if (!spec.empty() && spec[0] == '{') {
                const std::size_t close = spec.find('}');
                if (close == std::string::npos) {
                    throw DataError(path + ": unterminated value list: " + line);
                }
                a.categorical = true;
                for (auto& v : split_csv_line(spec.substr(1, close - 1))) {
                    a.values.push_back(trim(v));
                }
            } else {
                std::string type = spec;
                std::transform(type.begin(), type.end(), type.begin(),
                               [](unsigned char c) { return std::tolower(c); });
                if (type.rfind("real", 0) != 0 && type.rfind("integer", 0) != 0 &&
                    type.rfind("numeric", 0) != 0) {
                    throw DataError(path + ": unknown attribute type in: " + line);
                }
            }
            attrs.push_back(std::move(a));
        } else if (lower.rfind("@inputs", 0) == 0 || lower.rfind("@input", 0) == 0 ||
                   lower.rfind("@outputs", 0) == 0 || lower.rfind("@output", 0) == 0) {
            continue;
        } else if (lower.rfind("@data", 0) == 0) {
            data_start = i + 1;
            break;
        } else {
            throw DataError(path + ": unexpected header line: " + line);
        }
    }
    if (data_start >= lines.size()) {
        throw DataError(path + ": missing @data section");
    }
    if (attrs.size() < 2) {
        throw DataError(path + ": needs at least one input attribute and a class");
    }

    const Attribute& cls = attrs.back();
    const std::size_t m = attrs.size() - 1;

    Dataset d;
    d.name = relation.empty() ? file_stem(path) : relation;
    for (std::size_t j = 0; j < m; ++j) d.feature_names.push_back(attrs[j].name);

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    for (std::size_t i = data_start; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != attrs.size()) {
            throw DataError(path + ": data row " + std::to_string(i + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(attrs.size()));
        }
        for (std::size_t j = 0; j < m; ++j) {
            const Attribute& a = attrs[j];
            if (a.categorical) {
                const auto it = std::find(a.values.begin(), a.values.end(), cells[j]);
                if (it == a.values.end()) {
                    throw DataError(path + ": value '" + cells[j] +
                                    "' not in declared list for attribute " + a.name);
                }
                values.push_back(static_cast<double>(it - a.values.begin()));
            } else {
                double v;
                if (!parse_real(cells[j], &v)) {
                    throw DataError(path + ": non-numeric value '" + cells[j] +
                                    "' for attribute " + a.name + " at row " +
                                    std::to_string(i + 1));
                }
                values.push_back(v);
            }
        }
        raw_labels.push_back(cells.back());
    }
    if (raw_labels.empty()) {
        throw DataError(path + ": empty data section");
    }

    std::map<std::string, long> label_counts;
    for (const auto& l : raw_labels) ++label_counts[l];
    if (label_counts.size() != 2) {
        throw DataError(path + ": class column must hold exactly 2 distinct values, found " +
                        std::to_string(label_counts.size()));
    }

    std::string positive;
    if (positive_override) {
        if (label_counts.find(*positive_override) == label_counts.end()) {
            throw DataError(path + ": class '" + *positive_override + "' not present");
        }
        positive = *positive_override;
    } else {
        // Minority class is positive; on a tie, the class declared last wins.
        auto it = label_counts.begin();
        auto jt = std::next(it);
        if (it->second == jt->second && cls.categorical && cls.values.size() == 2) {
            positive = cls.values.back();
        } else {
            positive = it->second < jt->second ? it->first : jt->first;
        }
    }

    d.features = Matrix(raw_labels.size(), m, std::move(values));
    d.labels.reserve(raw_labels.size());
    for (const auto& l : raw_labels) d.labels.push_back(l == positive ? 1 : 0);
    d.validate();
    return d;
}

Dataset load_dataset_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open file: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    return dataset_from_json(j);
}

void save_dataset_json(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write file: " + path);
    }
    out << dataset_to_json(d).dump(2) << '\n';
}

void save_csv(const Dataset& d, const std::string& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write file: " + path);
    }
    out.precision(17);
    for (std::size_t j = 0; j < d.m(); ++j) {
        out << (j < d.feature_names.size() ? d.feature_names[j] : "f" + std::to_string(j)) << ',';
    }
    out << label_column << '\n';
    for (std::size_t i = 0; i < d.n(); ++i) {
        for (std::size_t j = 0; j < d.m(); ++j) out << d.features(i, j) << ',';
        out << d.labels[i] << '\n';
    }
}

} // namespace hadr
