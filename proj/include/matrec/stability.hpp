#pragma once

// Norm-based stability certificates for matrix recurrences
//
//     A_n = B * prod_{l in S} A_{n-l}        (matrix product)
//     A_n = B (x) prod_{l in S} A_{n-l}      (Kronecker product)
//
// For a submultiplicative norm, phi = phi_{S/m}, m = gcd(S), j = max(S), and
// lambda = 0 when ||B|| >= 1 and m-1 otherwise, the margin is
//
//     phi^{-(j+lambda)/m + 1} / (phi - 1) * log||B||
//       + sum_{k=0}^{j-1} log||A_k|| * sum_{l in S, l >= j-k} phi^{(-k-l)/m}.
//
// A negative margin certifies convergence to zero for both product kinds.
// For a consecutive Kronecker recurrence (S = {1..j}, j > 1) the dual ratio
//
//     ||B|| * prod_k ||A_k||^{1 - phi_j^{-k-1}}
//
// certifies divergence to infinity in norm when it exceeds 1. A positive
// margin for a general matrix product certifies nothing, and is reported as
// inconclusive rather than as divergence.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matrix.hpp"
#include "multiplicity.hpp"
#include "snacci.hpp"

namespace matrec {

enum class recurrence_kind { product, kronecker };

inline const char* to_string(recurrence_kind k) {
    return k == recurrence_kind::product ? "product" : "kronecker";
}

/// A fully specified recurrence: the index set, the constant factor B, the j
/// initial matrices A_0..A_{j-1}, and the multiplication order (a permutation
/// of S, leftmost factor first; B is always leftmost).
struct recurrence_spec {
    recurrence_kind kind = recurrence_kind::product;
    index_set set;
    complex_matrix b;
    std::vector<complex_matrix> initials;
    std::vector<int> order;
};

inline void validate_spec(const recurrence_spec& spec) {
    const int j = spec.set.j;
    if (spec.set.elements.empty()) throw spec_error("spec has an empty index set");
    if (static_cast<int>(spec.initials.size()) != j) {
        throw dimension_mismatch_error("spec needs exactly j = " + std::to_string(j) +
                                       " initial matrices, got " +
                                       std::to_string(spec.initials.size()));
    }
    if (spec.b.entry_count() == 0) throw dimension_mismatch_error("spec B matrix is empty");
    for (const auto& a : spec.initials) {
        if (a.entry_count() == 0) throw dimension_mismatch_error("spec initial matrix is empty");
    }
    if (spec.kind == recurrence_kind::product) {
        const std::size_t dim = spec.initials.front().rows();
        for (std::size_t k = 0; k < spec.initials.size(); ++k) {
            const auto& a = spec.initials[k];
            if (!a.is_square() || a.rows() != dim) {
                throw dimension_mismatch_error(
                    "product recurrences need square initials of equal size; initials[" +
                    std::to_string(k) + "] is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
            }
        }
        if (!spec.b.is_scalar() && !(spec.b.is_square() && spec.b.rows() == dim)) {
            throw dimension_mismatch_error("B must be 1x1 or square of the initials' size");
        }
    }
    std::vector<int> order = spec.order;
    std::sort(order.begin(), order.end());
    if (order != spec.set.elements) {
        throw spec_error("order must be a permutation of S");
    }
}

inline recurrence_spec make_recurrence_spec(recurrence_kind kind, index_set set, complex_matrix b,
                                            std::vector<complex_matrix> initials,
                                            std::vector<int> order = {}) {
    recurrence_spec spec;
    spec.kind = kind;
    spec.set = std::move(set);
    spec.b = std::move(b);
    spec.initials = std::move(initials);
    spec.order = order.empty() ? spec.set.elements : std::move(order);
    validate_spec(spec);
    return spec;
}

namespace detail {

template <class Real>
void require_positive_norms(const Real& norm_b, const std::vector<Real>& norms_a) {
    if (!(norm_b > 0)) throw zero_norm_error("||B|| must be positive for the analytic criteria");
    for (std::size_t k = 0; k < norms_a.size(); ++k) {
        if (!(norms_a[k] > 0)) {
            throw zero_norm_error("||A_" + std::to_string(k) +
                                  "|| must be positive for the analytic criteria");
        }
    }
}

} // namespace detail

/// Stability margin from factor norms alone; negative certifies convergence
/// to the zero matrix.
template <class Real>
Real stability_margin_from_norms(const index_set& s, const Real& norm_b,
                                 const std::vector<Real>& norms_a,
                                 Real root_tol = Real(1e-12)) {
    using std::log;
    using std::pow;
    if (s.size() < 2) {
        throw singleton_set_error("the stability margin requires |S| >= 2; classify the "
                                  "depth-one recurrence directly");
    }
    if (norms_a.size() != static_cast<std::size_t>(s.j)) {
        throw dimension_mismatch_error("expected j = " + std::to_string(s.j) + " factor norms");
    }
    detail::require_positive_norms(norm_b, norms_a);

    const int j = s.j;
    const int m = s.m;
    const Real phi = snacci_constant<Real>(reduce_set(s), root_tol);
    const int lambda = norm_b >= Real(1) ? 0 : m - 1;

    Real margin = pow(phi, Real(-(j + lambda)) / Real(m) + Real(1)) / (phi - Real(1)) * log(norm_b);
    for (int k = 0; k < j; ++k) {
        Real weight = 0;
        for (int l : s.elements) {
            if (l >= j - k) weight += pow(phi, Real(-(k + l)) / Real(m));
        }
        margin += log(norms_a[static_cast<std::size_t>(k)]) * weight;
    }
    return margin;
}

/// Divergence ratio for consecutive Kronecker recurrences; a value above 1
/// certifies divergence to infinity in norm.
template <class Real>
Real kron_ratio_from_norms(const index_set& s, const Real& norm_b,
                           const std::vector<Real>& norms_a, Real root_tol = Real(1e-12)) {
    using std::pow;
    if (!s.consecutive() || s.j < 2) {
        throw not_consecutive_error("the divergence ratio is only defined for S = {1..j}, j > 1");
    }
    if (norms_a.size() != static_cast<std::size_t>(s.j)) {
        throw dimension_mismatch_error("expected j = " + std::to_string(s.j) + " factor norms");
    }
    detail::require_positive_norms(norm_b, norms_a);
    const Real phi = snacci_constant<Real>(s, root_tol);
    Real ratio = norm_b;
    for (int k = 0; k < s.j; ++k) {
        ratio *= pow(norms_a[static_cast<std::size_t>(k)], Real(1) - pow(phi, Real(-(k + 1))));
    }
    return ratio;
}

struct stability_options {
    double verdict_tol = 1e-9; // margins/ratios inside the band are marginal
    double root_tol = 1e-12;
    double norm_tol = 1e-12;
    int norm_max_iter = 10'000;
};

namespace detail {

inline std::vector<double> factor_norms(const recurrence_spec& spec, norm_kind kind,
                                        const stability_options& opt) {
    std::vector<double> out;
    out.reserve(spec.initials.size());
    for (const auto& a : spec.initials) {
        out.push_back(norm(a, kind, opt.norm_tol, opt.norm_max_iter));
    }
    return out;
}

} // namespace detail

inline double stability_margin(const recurrence_spec& spec, norm_kind kind,
                               const stability_options& opt = {}) {
    validate_spec(spec);
    const double norm_b = norm(spec.b, kind, opt.norm_tol, opt.norm_max_iter);
    return stability_margin_from_norms<double>(spec.set, norm_b,
                                               detail::factor_norms(spec, kind, opt),
                                               opt.root_tol);
}

inline double kron_divergence_ratio(const recurrence_spec& spec, norm_kind kind,
                                    const stability_options& opt = {}) {
    validate_spec(spec);
    if (spec.kind != recurrence_kind::kronecker) {
        throw not_consecutive_error(
            "the divergence ratio applies to kronecker recurrences over S = {1..j} only");
    }
    const double norm_b = norm(spec.b, kind, opt.norm_tol, opt.norm_max_iter);
    return kron_ratio_from_norms<double>(spec.set, norm_b, detail::factor_norms(spec, kind, opt),
                                         opt.root_tol);
}

enum class verdict { converges, diverges, marginal, inconclusive };

inline const char* to_string(verdict v) {
    switch (v) {
        case verdict::converges: return "converges";
        case verdict::diverges: return "diverges";
        case verdict::marginal: return "marginal";
        default: return "inconclusive";
    }
}

struct stability_report {
    norm_kind norm = norm_kind::frobenius;
    double phi_reduced = 0.0; // phi_{S/m}
    int m = 1;
    int lambda = 0;
    double margin = 0.0;
    std::optional<double> kron_ratio; // consecutive Kronecker only
    verdict result = verdict::inconclusive;
};

struct analysis {
    std::vector<stability_report> per_norm;
    verdict overall = verdict::inconclusive;
};

namespace detail {

inline int verdict_rank(verdict v) {
    switch (v) {
        case verdict::converges: return 3;
        case verdict::diverges: return 2;
        case verdict::marginal: return 1;
        default: return 0;
    }
}

} // namespace detail

/// Evaluate the certificates under each requested norm. Only some norm has to
/// certify, so the overall verdict is the strongest per-norm one.
inline analysis analyze(const recurrence_spec& spec, std::span<const norm_kind> kinds,
                        const stability_options& opt = {}) {
    validate_spec(spec);
    const bool ratio_applies =
        spec.kind == recurrence_kind::kronecker && spec.set.consecutive() && spec.set.j > 1;

    analysis out;
    for (norm_kind kind : kinds) {
        const double norm_b = norm(spec.b, kind, opt.norm_tol, opt.norm_max_iter);
        const std::vector<double> norms_a = detail::factor_norms(spec, kind, opt);

        stability_report rep;
        rep.norm = kind;
        rep.m = spec.set.m;
        rep.lambda = norm_b >= 1.0 ? 0 : spec.set.m - 1;
        rep.phi_reduced = snacci_constant<double>(reduce_set(spec.set), opt.root_tol);
        rep.margin = stability_margin_from_norms<double>(spec.set, norm_b, norms_a, opt.root_tol);
        if (ratio_applies) {
            rep.kron_ratio = kron_ratio_from_norms<double>(spec.set, norm_b, norms_a, opt.root_tol);
        }

        const double tol = opt.verdict_tol;
        if (rep.margin < -tol) {
            rep.result = verdict::converges;
        } else if (rep.kron_ratio && *rep.kron_ratio > 1.0 + tol) {
            rep.result = verdict::diverges;
        } else if (std::abs(rep.margin) <= tol ||
                   (rep.kron_ratio && std::abs(*rep.kron_ratio - 1.0) <= tol)) {
            rep.result = verdict::marginal;
        } else {
            rep.result = verdict::inconclusive;
        }
        out.per_norm.push_back(rep);
    }

    out.overall = verdict::inconclusive;
    for (const auto& rep : out.per_norm) {
        if (detail::verdict_rank(rep.result) > detail::verdict_rank(out.overall)) {
            out.overall = rep.result;
        }
    }
    return out;
}

inline analysis analyze(const recurrence_spec& spec, std::initializer_list<norm_kind> kinds,
                        const stability_options& opt = {}) {
    return analyze(spec, std::span<const norm_kind>(kinds.begin(), kinds.size()), opt);
}

// ---------------------------------------------------------------------------
// Complete classification of scalar recurrences
// ---------------------------------------------------------------------------

enum class scalar_class { converges_to_zero, diverges, bounded_marginal, trivial_closed_form };

inline const char* to_string(scalar_class c) {
    switch (c) {
        case scalar_class::converges_to_zero: return "converges_to_zero";
        case scalar_class::diverges: return "diverges";
        case scalar_class::bounded_marginal: return "bounded_marginal";
        default: return "trivial_closed_form";
    }
}

struct scalar_classification {
    scalar_class result = scalar_class::bounded_marginal;
    /// Behaviour of the closed form a_n = a_0 b^n when result is
    /// trivial_closed_form.
    std::optional<scalar_class> trivial_behavior;
};

/// Classify a scalar recurrence from the moduli of its factors.
///
/// S = {1} has the closed form a_n = a_0 b^n and is classified directly.
/// Otherwise the exact log magnitude
///
///     L_n = #B_n log|b| + sum_k #A_{k,n} log|a_k|
///
/// is evaluated from exact multiplicities at two consecutive points of the
/// n = 0 (mod m) subsequence, far enough out that the dominant growth term
/// has settled, and the trend of L decides. The marginal band is relative to
/// the magnitude of the summed terms, so the boundary is detected without
/// comparing astronomically scaled values against an absolute epsilon. A
/// factor that is exactly zero and participates with positive multiplicity
/// forces the subsequence to zero exactly.
template <class Real>
scalar_classification classify_scalar_from_moduli(const index_set& s, const Real& abs_b,
                                                  const std::vector<Real>& abs_a,
                                                  long long horizon = 200,
                                                  double trend_rel_tol = 1e-10) {
    using std::log;
    if (abs_a.size() != static_cast<std::size_t>(s.j)) {
        throw dimension_mismatch_error("expected j = " + std::to_string(s.j) + " factor moduli");
    }
    if (abs_b < 0) throw error("moduli must be nonnegative");
    for (const auto& v : abs_a) {
        if (v < 0) throw error("moduli must be nonnegative");
    }

    if (s.elements == std::vector<int>{1}) {
        scalar_classification out;
        out.result = scalar_class::trivial_closed_form;
        if (abs_a[0] == 0 || abs_b < Real(1)) {
            out.trivial_behavior = scalar_class::converges_to_zero;
        } else if (abs_b > Real(1)) {
            out.trivial_behavior = scalar_class::diverges;
        } else {
            out.trivial_behavior = scalar_class::bounded_marginal;
        }
        return out;
    }

    const long long base = s.m * std::max<long long>(horizon, 2LL * s.j);
    const auto p0 = make_multiplicity_profile(s, base);
    const auto p1 = make_multiplicity_profile(s, base + s.m);

    if (abs_b == 0) return {scalar_class::converges_to_zero, std::nullopt};
    for (int k = 0; k < s.j; ++k) {
        if (p0.counts[static_cast<std::size_t>(k)] > 0 && abs_a[static_cast<std::size_t>(k)] == 0) {
            return {scalar_class::converges_to_zero, std::nullopt};
        }
    }

    const auto log_magnitude = [&](const multiplicity_profile& p, Real& scale) {
        Real acc = 0;
        const Real log_b = log(abs_b);
        if (p.b_count > 0) {
            const Real term = static_cast<Real>(p.b_count) * log_b;
            acc += term;
            scale += term < 0 ? -term : term;
        }
        for (int k = 0; k < s.j; ++k) {
            const auto& count = p.counts[static_cast<std::size_t>(k)];
            if (count > 0) {
                const Real term = static_cast<Real>(count) * log(abs_a[static_cast<std::size_t>(k)]);
                acc += term;
                scale += term < 0 ? -term : term;
            }
        }
        return acc;
    };

    Real scale = 0;
    const Real l0 = log_magnitude(p0, scale);
    const Real l1 = log_magnitude(p1, scale);
    if (scale == 0) return {scalar_class::bounded_marginal, std::nullopt};
    const Real delta = l1 - l0;
    const Real band = Real(trend_rel_tol) * scale;
    if (delta < -band) return {scalar_class::converges_to_zero, std::nullopt};
    if (delta > band) return {scalar_class::diverges, std::nullopt};
    return {scalar_class::bounded_marginal, std::nullopt};
}

/// classify_scalar on a full spec; every matrix must be 1x1.
inline scalar_classification classify_scalar(const recurrence_spec& spec, long long horizon = 200,
                                             double trend_rel_tol = 1e-10) {
    validate_spec(spec);
    if (!spec.b.is_scalar()) {
        throw not_scalar_error("classify_scalar requires a 1x1 B");
    }
    std::vector<double> abs_a;
    abs_a.reserve(spec.initials.size());
    for (const auto& a : spec.initials) {
        if (!a.is_scalar()) {
            throw not_scalar_error("classify_scalar requires 1x1 initials");
        }
        abs_a.push_back(std::abs(a(0, 0)));
    }
    return classify_scalar_from_moduli<double>(spec.set, std::abs(spec.b(0, 0)), abs_a, horizon,
                                               trend_rel_tol);
}

} // namespace matrec
