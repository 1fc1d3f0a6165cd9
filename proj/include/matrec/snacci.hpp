#pragma once

// Generalized Fibonacci ("S-nacci") sequences and their growth constants.
//
// For a finite set S of positive integers with j = max(S), the S-nacci
// sequence is
//
//     F_n = sum_{l in S} F_{n-l},   F_0 = ... = F_{j-2} = 0,  F_{j-1} = 1.
//
// S = {1,2} gives the Fibonacci numbers. The growth rate phi_S is the unique
// real > 1 solving sum_{l in S} x^{-l} = 1 (the golden ratio for {1,2});
// when gcd(S) = 1 the terms satisfy F_n ~ c_S * phi_S^n with
// c_S = phi_S^{2-j} / G'(1/phi_S), where G(z) = sum_{l in S} z^l.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "index_set.hpp"

namespace matrec {

using big_int = boost::multiprecision::cpp_int;

/// First `count` terms F_0 .. F_{count-1}, exact.
inline std::vector<big_int> snacci_terms(const index_set& s, std::size_t count) {
    std::vector<big_int> f(count);
    const std::size_t seed = static_cast<std::size_t>(s.j) - 1;
    if (seed < count) f[seed] = 1;
    for (std::size_t n = static_cast<std::size_t>(s.j); n < count; ++n) {
        big_int acc = 0;
        for (int l : s.elements) acc += f[n - static_cast<std::size_t>(l)];
        f[n] = std::move(acc);
    }
    return f;
}

namespace detail {

template <class Real>
Real snacci_char_value(const index_set& s, const Real& x) {
    using std::pow;
    Real acc = 0;
    for (int l : s.elements) acc += pow(x, -l);
    return acc - Real(1);
}

template <class Real>
Real snacci_char_derivative(const index_set& s, const Real& x) {
    using std::pow;
    Real acc = 0;
    for (int l : s.elements) acc -= Real(l) * pow(x, -l - 1);
    return acc;
}

// c_S for a given root, assuming gcd(S) = 1. G'(z) = sum l z^{l-1}.
template <class Real>
Real coefficient_from_root(const index_set& s, const Real& phi) {
    using std::pow;
    Real gp = 0;
    const Real z = Real(1) / phi;
    for (int l : s.elements) gp += Real(l) * pow(z, l - 1);
    return pow(phi, 2 - s.j) / gp;
}

} // namespace detail

/// The S-nacci constant phi_S: unique root of sum_{l in S} x^{-l} = 1 in (1, 2].
///
/// Bisection on (1, 2] down to `tol`, then two Newton steps. The bracket is
/// valid for any |S| >= 2: the left side is strictly decreasing in x, equals
/// |S| >= 2 at x = 1, and is < 1 at x = 2 for distinct positive offsets.
template <class Real = double>
Real snacci_constant(const index_set& s, Real tol = Real(1e-12)) {
    if (s.size() < 2) {
        throw singleton_set_error("snacci_constant requires |S| >= 2; the singleton growth "
                                  "rate is degenerate");
    }
    Real lo = 1, hi = 2;
    while (hi - lo > tol) {
        const Real mid = (lo + hi) / 2;
        if (detail::snacci_char_value(s, mid) > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Real x = (lo + hi) / 2;
    for (int step = 0; step < 2; ++step) {
        x -= detail::snacci_char_value(s, x) / detail::snacci_char_derivative(s, x);
    }
    return x;
}

/// The S-nacci coefficient c_S = phi_S^{2-j} / G'(1/phi_S); requires gcd(S) = 1.
template <class Real = double>
Real snacci_coefficient(const index_set& s, Real root_tol = Real(1e-12)) {
    if (s.m != 1) {
        throw periodic_set_error("snacci_coefficient requires gcd(S) = 1; reduce the set first");
    }
    return detail::coefficient_from_root(s, snacci_constant<Real>(s, root_tol));
}

/// c_S * phi_S^n evaluated in log space so large n degrades to +inf, not UB.
template <class Real = double>
Real asymptotic_estimate(const index_set& s, long long n, Real root_tol = Real(1e-12)) {
    using std::exp;
    using std::log;
    if (n < 0) throw index_out_of_range_error("asymptotic_estimate requires n >= 0");
    if (s.m != 1) {
        throw periodic_set_error("asymptotic_estimate requires gcd(S) = 1; reduce the set first");
    }
    const Real phi = snacci_constant<Real>(s, root_tol);
    const Real c = detail::coefficient_from_root(s, phi);
    return exp(log(c) + Real(n) * log(phi));
}

/// Companion matrix of the S-nacci recurrence: indicator first row, unit
/// subdiagonal, zeros elsewhere.
inline std::vector<std::vector<int>> companion_matrix(const index_set& s) {
    const int j = s.j;
    std::vector<std::vector<int>> q(static_cast<std::size_t>(j),
                                    std::vector<int>(static_cast<std::size_t>(j), 0));
    for (int col = 1; col <= j; ++col) {
        q[0][static_cast<std::size_t>(col - 1)] = s.contains(col) ? 1 : 0;
    }
    for (int row = 1; row < j; ++row) {
        q[static_cast<std::size_t>(row)][static_cast<std::size_t>(row - 1)] = 1;
    }
    return q;
}

/// Entry (a, b) of the n-th power of the companion matrix, 1-based indices:
///
///     q_{a,b}^{(n)} = sum_{l in S, l >= b} F_{n+j-1+b-a-l},
///
/// with F at negative indices read as 0. The closed form agrees with the
/// actual matrix power for n >= j.
inline big_int companion_power_entry(const index_set& s, long long n, int a, int b) {
    const int j = s.j;
    if (a < 1 || a > j || b < 1 || b > j) {
        throw index_out_of_range_error("companion_power_entry indices must lie in 1..j");
    }
    if (n < 0) throw index_out_of_range_error("companion_power_entry requires n >= 0");
    const auto f = snacci_terms(s, static_cast<std::size_t>(n + j));
    big_int acc = 0;
    for (int l : s.elements) {
        if (l < b) continue;
        const long long idx = n + j - 1 + b - a - l;
        if (idx >= 0) acc += f[static_cast<std::size_t>(idx)];
    }
    return acc;
}

/// Bundled exact-and-asymptotic view of one sequence. The coefficient is
/// present only when gcd(S) = 1.
template <class Real = double>
struct snacci_profile {
    index_set set;
    Real phi{};
    std::optional<Real> coefficient;
    std::vector<big_int> terms;
};

template <class Real = double>
snacci_profile<Real> make_snacci_profile(const index_set& s, std::size_t count,
                                         Real tol = Real(1e-12)) {
    snacci_profile<Real> p;
    p.set = s;
    p.phi = snacci_constant<Real>(s, tol);
    if (s.m == 1) p.coefficient = detail::coefficient_from_root(s, p.phi);
    p.terms = snacci_terms(s, count);
    return p;
}

} // namespace matrec
