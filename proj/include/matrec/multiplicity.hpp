#pragma once

// Exact occurrence counts inside the fully expanded product word of A_n,
// where A_n = B * prod_{l in S} A_{n-l}. Writing #A_{k,n} for the number of
// times the initial matrix A_k appears in A_n and #B_n for the number of
// times B appears:
//
//     #A_{k,n} = sum_{l in S, l >= j-k} F_{n+j-1-k-l}      (n >= j)
//     #B_n     = sum_{i=0}^{n-1} F_i
//
// with F the S-nacci terms. For n < j the word is the single letter A_n.

#include <cstdint>
#include <string>
#include <vector>

#include "snacci.hpp"

namespace matrec {

/// Number of occurrences of A_k in the expanded word of A_n. Exact.
inline big_int multiplicity(const index_set& s, int k, long long n) {
    const int j = s.j;
    if (k < 0 || k >= j) {
        throw index_out_of_range_error("multiplicity index k must lie in 0..j-1");
    }
    if (n < 0) throw index_out_of_range_error("multiplicity requires n >= 0");
    if (n < j) return big_int(n == k ? 1 : 0);
    const auto f = snacci_terms(s, static_cast<std::size_t>(n + j));
    big_int acc = 0;
    for (int l : s.elements) {
        if (l < j - k) continue;
        acc += f[static_cast<std::size_t>(n + j - 1 - k - l)];
    }
    return acc;
}

/// Number of occurrences of the constant factor B in the expanded word of A_n.
inline big_int b_multiplicity(const index_set& s, long long n) {
    if (n < 0) throw index_out_of_range_error("b_multiplicity requires n >= 0");
    const auto f = snacci_terms(s, static_cast<std::size_t>(n));
    big_int acc = 0;
    for (const auto& v : f) acc += v;
    return acc;
}

/// Leading asymptotic term of #B_n,
///
///     c_{S/m} / (phi_{S/m} - 1) * phi_{S/m}^{floor(n/m)},
///
/// evaluated in log space. Diagnostic only; verdicts never depend on it.
template <class Real = double>
Real b_multiplicity_leading(const index_set& s, long long n, Real root_tol = Real(1e-12)) {
    using std::exp;
    using std::log;
    if (s.size() < 2) {
        throw singleton_set_error("b_multiplicity_leading requires |S| >= 2");
    }
    if (n < 0) throw index_out_of_range_error("b_multiplicity_leading requires n >= 0");
    const index_set reduced = reduce_set(s);
    const Real phi = snacci_constant<Real>(reduced, root_tol);
    const Real c = detail::coefficient_from_root(reduced, phi);
    const long long steps = n / s.m;
    return exp(log(c) - log(phi - 1) + Real(steps) * log(phi));
}

/// All counts for one (S, n), sharing a single pass over the exact terms.
struct multiplicity_profile {
    index_set set;
    long long n = 0;
    std::vector<big_int> counts; // counts[k] = #A_{k,n}, k = 0..j-1
    big_int b_count;             // #B_n
};

inline multiplicity_profile make_multiplicity_profile(const index_set& s, long long n) {
    if (n < 0) throw index_out_of_range_error("multiplicity profile requires n >= 0");
    const int j = s.j;
    multiplicity_profile p;
    p.set = s;
    p.n = n;
    p.counts.assign(static_cast<std::size_t>(j), big_int(0));
    if (n < j) {
        p.counts[static_cast<std::size_t>(n)] = 1;
        p.b_count = 0;
        return p;
    }
    const auto f = snacci_terms(s, static_cast<std::size_t>(n + j));
    for (int k = 0; k < j; ++k) {
        big_int acc = 0;
        for (int l : s.elements) {
            if (l < j - k) continue;
            acc += f[static_cast<std::size_t>(n + j - 1 - k - l)];
        }
        p.counts[static_cast<std::size_t>(k)] = std::move(acc);
    }
    big_int b = 0;
    for (long long i = 0; i < n; ++i) b += f[static_cast<std::size_t>(i)];
    p.b_count = std::move(b);
    return p;
}

/// One symbol of an expanded word: the constant B, or an initial A_k.
struct word_letter {
    bool is_b = false;
    int index = 0;

    static word_letter b() { return {true, 0}; }
    static word_letter a(int k) { return {false, k}; }

    bool operator==(const word_letter&) const = default;
};

struct word {
    std::vector<word_letter> letters;

    bool operator==(const word&) const = default;
};

inline std::string to_string(const word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        if (i) out += ' ';
        if (w.letters[i].is_b) {
            out += 'B';
        } else {
            out += "A_" + std::to_string(w.letters[i].index);
        }
    }
    return out;
}

/// Brute-force expansion of the word of A_n, substituting the recurrence
/// until only initial letters (and optionally B) remain. Factors A_{n-l} are
/// laid down left to right following `order` (a permutation of S), with B
/// leftmost when included. Sub-words are shared through a sliding window of
/// the last j expansions, and the final length is checked against the letter
/// budget up front via the exact counts, since it grows like phi_S^n.
inline word expand_word(const index_set& s, long long n, const std::vector<int>& order,
                        bool include_b, std::size_t letter_budget = 1'000'000) {
    if (n < 0) throw index_out_of_range_error("expand_word requires n >= 0");
    {
        std::vector<int> check = order;
        std::sort(check.begin(), check.end());
        if (check != s.elements) {
            throw error("expand_word order must be a permutation of S");
        }
    }
    const auto profile = make_multiplicity_profile(s, n);
    big_int len = include_b ? profile.b_count : big_int(0);
    for (const auto& c : profile.counts) len += c;
    if (len > letter_budget) {
        throw budget_exceeded_error("word of length " + len.str() + " exceeds budget of " +
                                    std::to_string(letter_budget) + " letters");
    }

    const int j = s.j;
    if (n < j) return word{{word_letter::a(static_cast<int>(n))}};

    std::vector<word> window(static_cast<std::size_t>(j));
    for (int t = 0; t < j; ++t) {
        window[static_cast<std::size_t>(t)] = word{{word_letter::a(t)}};
    }
    word current;
    for (long long t = j; t <= n; ++t) {
        current.letters.clear();
        if (include_b) current.letters.push_back(word_letter::b());
        for (int l : order) {
            const auto& sub = window[static_cast<std::size_t>((t - l) % j)].letters;
            current.letters.insert(current.letters.end(), sub.begin(), sub.end());
        }
        window[static_cast<std::size_t>(t % j)] = current;
    }
    return current;
}

inline word expand_word(const index_set& s, long long n, bool include_b = false,
                        std::size_t letter_budget = 1'000'000) {
    return expand_word(s, n, s.elements, include_b, letter_budget);
}

} // namespace matrec
