#pragma once

// Direct iteration of a recurrence and an exact log-norm surrogate.
//
// Direct mode materializes A_j..A_{n_max} by the literal recurrence and
// records the norm at each step. Kronecker sizes grow doubly exponentially,
// so direct mode is a short-prefix instrument guarded by an entry budget.
//
// Surrogate mode never materializes matrices: it evaluates
//
//     L_n = #B_n log||B|| + sum_k #A_{k,n} log||A_k||
//
// from exact multiplicities. By submultiplicativity L_n is an upper bound on
// log||A_n|| for products; norm multiplicativity of the Kronecker product
// makes it exact there, and it is exact for positive real scalars.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stability.hpp"

namespace matrec {

enum class trajectory_mode { direct, surrogate };

inline const char* to_string(trajectory_mode m) {
    return m == trajectory_mode::direct ? "direct" : "surrogate";
}

template <class Real = double>
struct trajectory_step {
    long long n = 0;
    std::optional<long long> rows; // unknown for surrogate Kronecker steps
    std::optional<long long> cols;
    std::optional<Real> norm_value; // absent when not representable
    Real log_norm{};
};

template <class Real = double>
struct trajectory {
    trajectory_mode mode = trajectory_mode::direct;
    long long n_max = 0;
    std::vector<trajectory_step<Real>> steps; // n = 0.. until n_max or truncation

    struct truncation_info {
        long long at = 0;
        std::string reason;
    };
    std::optional<truncation_info> truncated;
};

struct simulate_options {
    long long entry_budget = 1'000'000; // max entries of any materialized matrix
    double overflow_limit = 1e300;      // entry magnitude treated as overflow
    double norm_tol = 1e-12;
    int norm_max_iter = 10'000;
};

namespace detail {

inline bool entries_exceed(const complex_matrix& m, double limit) {
    for (const cplx& v : m.data()) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) ||
            std::abs(v.real()) > limit || std::abs(v.imag()) > limit) {
            return true;
        }
    }
    return false;
}

inline complex_matrix scale_by(const complex_matrix& m, cplx factor) {
    complex_matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = factor * m(r, c);
    }
    return out;
}

} // namespace detail

/// Materialize the recurrence step by step, recording norms. Stops early with
/// a truncation record when the next Kronecker result would exceed the entry
/// budget or an entry magnitude passes the overflow limit.
inline trajectory<double> iterate(const recurrence_spec& spec, long long n_max,
                                  norm_kind kind = norm_kind::frobenius,
                                  const simulate_options& opt = {}) {
    validate_spec(spec);
    const int j = spec.set.j;
    if (n_max < j) throw error("iterate requires n_max >= j");
    for (const auto& a : spec.initials) {
        if (static_cast<long long>(a.entry_count()) > opt.entry_budget) {
            throw error("entry budget is smaller than an initial matrix");
        }
    }

    trajectory<double> traj;
    traj.mode = trajectory_mode::direct;
    traj.n_max = n_max;

    std::vector<complex_matrix> window(static_cast<std::size_t>(j));
    const auto record = [&](long long n, const complex_matrix& m) {
        trajectory_step<double> step;
        step.n = n;
        step.rows = static_cast<long long>(m.rows());
        step.cols = static_cast<long long>(m.cols());
        const double nv = norm(m, kind, opt.norm_tol, opt.norm_max_iter);
        step.norm_value = nv;
        step.log_norm = std::log(nv);
        traj.steps.push_back(step);
    };

    for (int n = 0; n < j && n <= n_max; ++n) {
        const auto& a = spec.initials[static_cast<std::size_t>(n)];
        record(n, a);
        window[static_cast<std::size_t>(n)] = a;
    }

    for (long long n = j; n <= n_max; ++n) {
        complex_matrix next;
        if (spec.kind == recurrence_kind::kronecker) {
            // Budget check on the composed size before materializing anything.
            const std::size_t budget = static_cast<std::size_t>(opt.entry_budget);
            std::size_t rows = spec.b.rows(), cols = spec.b.cols();
            bool too_big = false;
            for (int l : spec.order) {
                const auto& f = window[static_cast<std::size_t>((n - l) % j)];
                if (rows > budget / f.rows() || cols > budget / f.cols()) {
                    too_big = true;
                    break;
                }
                rows *= f.rows();
                cols *= f.cols();
            }
            if (too_big || rows > budget || cols > budget / rows) {
                traj.truncated = {n, "entry budget exceeded"};
                return traj;
            }
            next = spec.b;
            for (int l : spec.order) {
                next = kron(next, window[static_cast<std::size_t>((n - l) % j)],
                            static_cast<std::size_t>(opt.entry_budget));
            }
        } else {
            bool first = true;
            for (int l : spec.order) {
                const auto& f = window[static_cast<std::size_t>((n - l) % j)];
                next = first ? f : matmul(next, f);
                first = false;
            }
            next = spec.b.is_scalar() && next.rows() > 1 ? detail::scale_by(next, spec.b(0, 0))
                                                         : matmul(spec.b, next);
        }
        if (detail::entries_exceed(next, opt.overflow_limit)) {
            traj.truncated = {n, "numeric overflow"};
            return traj;
        }
        record(n, next);
        window[static_cast<std::size_t>(n % j)] = next;
    }
    return traj;
}

/// Exact-multiplicity log norms L_0..L_{n_max} for given factor log norms.
/// L_n = log||A_n|| of the initial matrix for n < j.
template <class Real>
std::vector<Real> surrogate_log_norms(const index_set& s, const Real& log_b,
                                      const std::vector<Real>& logs_a, long long n_max) {
    if (logs_a.size() != static_cast<std::size_t>(s.j)) {
        throw dimension_mismatch_error("expected j = " + std::to_string(s.j) + " factor norms");
    }
    const int j = s.j;
    const auto f = snacci_terms(s, static_cast<std::size_t>(n_max + j + 1));
    std::vector<Real> out;
    out.reserve(static_cast<std::size_t>(n_max + 1));
    big_int b_count = 0; // running sum of F_0..F_{n-1}
    for (long long n = 0; n <= n_max; ++n) {
        if (n > 0) b_count += f[static_cast<std::size_t>(n - 1)];
        if (n < j) {
            out.push_back(logs_a[static_cast<std::size_t>(n)]);
            continue;
        }
        Real acc = static_cast<Real>(b_count) * log_b;
        for (int k = 0; k < j; ++k) {
            big_int count = 0;
            for (int l : s.elements) {
                if (l >= j - k) count += f[static_cast<std::size_t>(n + j - 1 - k - l)];
            }
            if (count != 0) acc += static_cast<Real>(count) * logs_a[static_cast<std::size_t>(k)];
        }
        out.push_back(acc);
    }
    return out;
}

/// Surrogate trajectory for a spec under one norm. Valid far beyond where
/// direct mode could reach; stops only if the log norm itself leaves the
/// numeric range of Real.
template <class Real = double>
trajectory<Real> surrogate(const recurrence_spec& spec, long long n_max, norm_kind kind,
                           const simulate_options& opt = {}) {
    using std::exp;
    using std::isfinite;
    using std::log;
    validate_spec(spec);
    const double norm_b = norm(spec.b, kind, opt.norm_tol, opt.norm_max_iter);
    std::vector<Real> logs_a;
    logs_a.reserve(spec.initials.size());
    if (!(norm_b > 0)) throw zero_norm_error("surrogate requires ||B|| > 0");
    for (const auto& a : spec.initials) {
        const double na = norm(a, kind, opt.norm_tol, opt.norm_max_iter);
        if (!(na > 0)) throw zero_norm_error("surrogate requires ||A_k|| > 0");
        logs_a.push_back(log(Real(na)));
    }
    const auto logs = surrogate_log_norms<Real>(spec.set, log(Real(norm_b)), logs_a, n_max);

    trajectory<Real> traj;
    traj.mode = trajectory_mode::surrogate;
    traj.n_max = n_max;
    const bool fixed_dims = spec.kind == recurrence_kind::product;
    const long long dim =
        fixed_dims ? static_cast<long long>(spec.initials.front().rows()) : 0;
    for (long long n = 0; n <= n_max; ++n) {
        const Real l = logs[static_cast<std::size_t>(n)];
        if (!isfinite(l)) {
            traj.truncated = {n, "log norm overflow"};
            return traj;
        }
        trajectory_step<Real> step;
        step.n = n;
        if (fixed_dims) {
            step.rows = dim;
            step.cols = dim;
        } else if (n < spec.set.j) {
            step.rows = static_cast<long long>(spec.initials[static_cast<std::size_t>(n)].rows());
            step.cols = static_cast<long long>(spec.initials[static_cast<std::size_t>(n)].cols());
        }
        step.log_norm = l;
        if (l < Real(700) && l > Real(-700)) step.norm_value = exp(l);
        traj.steps.push_back(step);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Trend extraction and the analytic-vs-empirical agreement check
// ---------------------------------------------------------------------------

/// Least-squares slope of log norm against n over the last quarter of a
/// trajectory, fitted separately for each residue class mod m (the m
/// interleaved subsequences grow on different schedules). A window that
/// contains an exactly zero norm yields slope -inf for its class.
template <class Real>
std::vector<double> trend_slopes(const trajectory<Real>& traj, int m) {
    if (traj.steps.empty()) throw error("cannot fit a trend to an empty trajectory");
    const long long last = traj.steps.back().n;
    const long long window = (last + 3) / 4;
    const long long start = last - window + 1;

    std::vector<double> slopes(static_cast<std::size_t>(m), 0.0);
    for (int r = 0; r < m; ++r) {
        std::vector<double> xs, ys;
        bool exact_zero = false;
        for (const auto& step : traj.steps) {
            if (step.n < start || step.n % m != r) continue;
            const double y = static_cast<double>(step.log_norm);
            if (y == -std::numeric_limits<double>::infinity()) {
                exact_zero = true;
                continue;
            }
            xs.push_back(static_cast<double>(step.n));
            ys.push_back(y);
        }
        if (exact_zero) {
            slopes[static_cast<std::size_t>(r)] = -std::numeric_limits<double>::infinity();
            continue;
        }
        if (xs.size() < 2) {
            throw error("trend window has fewer than two points for residue class " +
                        std::to_string(r) + "; increase the step count");
        }
        double mean_x = 0, mean_y = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mean_x += xs[i];
            mean_y += ys[i];
        }
        mean_x /= static_cast<double>(xs.size());
        mean_y /= static_cast<double>(xs.size());
        double num = 0, den = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mean_x) * (ys[i] - mean_y);
            den += (xs[i] - mean_x) * (xs[i] - mean_x);
        }
        slopes[static_cast<std::size_t>(r)] = num / den;
    }
    return slopes;
}

struct verify_options {
    long long steps = 200;
    double slope_threshold = 1e-6;
    simulate_options sim{.entry_budget = 100'000};
    stability_options stability{};
};

struct verify_entry {
    stability_report report;
    std::vector<double> surrogate_slopes;              // per residue class mod m
    std::optional<std::vector<double>> direct_slopes;  // absent when truncated
    std::optional<long long> direct_truncated_at;
    bool surrogate_consistent = true;
    bool direct_consistent = true; // vacuously true when unchecked
    bool consistent = true;
};

struct verify_report {
    std::vector<verify_entry> per_norm;
    verdict overall = verdict::inconclusive;
    bool consistent = true;
};

namespace detail {

inline bool slopes_match_verdict(verdict v, const std::vector<double>& slopes, double thr) {
    switch (v) {
        case verdict::converges:
            for (double s : slopes) {
                if (!(s <= -thr)) return false; // -inf (exact zero) passes
            }
            return true;
        case verdict::diverges:
            for (double s : slopes) {
                if (!(s >= thr)) return false;
            }
            return true;
        case verdict::marginal:
            for (double s : slopes) {
                if (!(std::abs(s) <= thr)) return false;
            }
            return true;
        default:
            return true; // inconclusive makes no claim
    }
}

} // namespace detail

/// Run the analytic certificates and the simulations side by side and report
/// whether the observed trends agree with each verdict. Disagreement is
/// reported, never silently dropped; for matrix products the direct
/// trajectory is only checked against certified verdicts, since the surrogate
/// is an upper bound there.
inline verify_report verify(const recurrence_spec& spec, std::span<const norm_kind> kinds,
                            const verify_options& opt = {}) {
    const analysis an = analyze(spec, kinds, opt.stability);
    verify_report out;
    out.overall = an.overall;

    for (const auto& rep : an.per_norm) {
        verify_entry entry;
        entry.report = rep;

        const auto surr = surrogate<double>(spec, opt.steps, rep.norm, opt.sim);
        if (surr.truncated) {
            throw error("surrogate overflowed double log range before the requested step count");
        }
        entry.surrogate_slopes = trend_slopes(surr, spec.set.m);
        entry.surrogate_consistent = detail::slopes_match_verdict(
            rep.result, entry.surrogate_slopes, opt.slope_threshold);

        const auto direct = iterate(spec, opt.steps, rep.norm, opt.sim);
        if (direct.truncated) {
            entry.direct_truncated_at = direct.truncated->at;
        } else {
            entry.direct_slopes = trend_slopes(direct, spec.set.m);
            if (rep.result == verdict::converges || rep.result == verdict::diverges) {
                entry.direct_consistent = detail::slopes_match_verdict(
                    rep.result, *entry.direct_slopes, opt.slope_threshold);
            }
        }
        entry.consistent = entry.surrogate_consistent && entry.direct_consistent;
        out.consistent = out.consistent && entry.consistent;
        out.per_norm.push_back(std::move(entry));
    }
    return out;
}

inline verify_report verify(const recurrence_spec& spec, std::initializer_list<norm_kind> kinds,
                            const verify_options& opt = {}) {
    return verify(spec, std::span<const norm_kind>(kinds.begin(), kinds.size()), opt);
}

} // namespace matrec
