#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace matrec {

/// Finite set of positive recurrence offsets, kept sorted and deduplicated.
///
/// j is the depth of the recurrence (largest offset). m is the gcd of the
/// offsets; when m > 1 the recurrence splits into m interleaved subsequences,
/// each a copy of the recurrence on the reduced set S/m.
struct index_set {
    std::vector<int> elements;
    int j = 0;
    int m = 0;

    bool contains(int v) const {
        return std::binary_search(elements.begin(), elements.end(), v);
    }

    /// True when the set is {1, 2, ..., j}.
    bool consecutive() const { return j == static_cast<int>(elements.size()); }

    std::size_t size() const { return elements.size(); }

    bool operator==(const index_set&) const = default;
};

inline index_set make_index_set(std::vector<int> raw) {
    if (raw.empty()) {
        throw empty_set_error("index set must not be empty");
    }
    for (int v : raw) {
        if (v < 1) {
            throw non_positive_entry_error("index set entries must be positive, got " +
                                           std::to_string(v));
        }
    }
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

    index_set s;
    s.j = raw.back();
    s.m = std::accumulate(raw.begin(), raw.end(), 0,
                          [](int acc, int v) { return std::gcd(acc, v); });
    s.elements = std::move(raw);
    return s;
}

/// The reduced set S/m = {l/m : l in S}; its own modulus is 1 by construction.
inline index_set reduce_set(const index_set& s) {
    if (s.m == 1) return s;
    std::vector<int> scaled;
    scaled.reserve(s.elements.size());
    for (int v : s.elements) scaled.push_back(v / s.m);
    return make_index_set(std::move(scaled));
}

inline std::string to_string(const index_set& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s.elements[i]);
    }
    out += "}";
    return out;
}

} // namespace matrec
