#pragma once

// Seeded, platform-stable random inputs for property tests. Values are drawn
// straight from mt19937_64 bits rather than std::uniform_real_distribution,
// whose output is implementation-defined.

#include <complex>
#include <random>

#include "matrec/index_set.hpp"
#include "matrec/matrix.hpp"

namespace testsupport {

class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    double unit() { // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    int uniform_int(int lo, int hi) { // inclusive
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    std::complex<double> complex_unit() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

    matrec::complex_matrix matrix(std::size_t rows, std::size_t cols) {
        matrec::complex_matrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_unit();
        }
        return m;
    }

    matrec::index_set subset(int max_element, std::size_t min_size = 2) {
        while (true) {
            std::vector<int> raw;
            for (int v = 1; v <= max_element; ++v) {
                if (unit() < 0.5) raw.push_back(v);
            }
            if (raw.size() >= min_size) return matrec::make_index_set(raw);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace testsupport
