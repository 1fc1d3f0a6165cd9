#pragma once

// External formats shared by the CLI and tests.
//
// Spec files are JSON objects:
//
//   { "kind": "product" | "kronecker",
//     "S": [1, 2],
//     "B": 1.0,                  // scalar, [re, im], or a matrix literal
//     "initials": [ [[1, 0], [0, 1]], ... ],   // max(S) matrix literals
//     "order": [2, 1],           // optional permutation of S
//     "norm": "both" }           // optional: "frobenius" | "operator" | "both"
//
// A matrix literal is an array of rows; each entry is a real number or a
// two-element [re, im] array. Trajectories serialize to CSV with the header
// n,rows,cols,norm,log_norm and NA for fields unavailable after truncation.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "simulate.hpp"

namespace matrec {

using nlohmann::json;

struct spec_file {
    recurrence_spec spec;
    std::vector<norm_kind> norms = {norm_kind::frobenius, norm_kind::operator_norm};
};

namespace io_detail {

inline cplx parse_entry(const json& v, const std::string& path) {
    if (v.is_number()) return cplx(v.get<double>(), 0.0);
    if (v.is_array()) {
        if (v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw spec_error(path + ": a complex entry must be [re, im]");
        }
        return cplx(v[0].get<double>(), v[1].get<double>());
    }
    throw spec_error(path + ": expected a number or [re, im]");
}

} // namespace io_detail

inline complex_matrix parse_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
        throw spec_error(path + ": expected a nonempty array of rows");
    }
    std::vector<std::vector<cplx>> rows;
    for (std::size_t r = 0; r < v.size(); ++r) {
        const json& row = v[r];
        const std::string row_path = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.empty()) {
            throw spec_error(row_path + ": expected a nonempty row array");
        }
        std::vector<cplx> out_row;
        for (std::size_t c = 0; c < row.size(); ++c) {
            out_row.push_back(
                io_detail::parse_entry(row[c], row_path + "[" + std::to_string(c) + "]"));
        }
        if (!rows.empty() && out_row.size() != rows.front().size()) {
            throw spec_error(row_path + ": rows must all have the same length");
        }
        rows.push_back(std::move(out_row));
    }
    return complex_matrix::from_rows(rows);
}

/// B may be a bare scalar, an [re, im] pair, or a full matrix literal.
inline complex_matrix parse_b(const json& v, const std::string& path) {
    if (v.is_number()) return complex_matrix::scalar(cplx(v.get<double>(), 0.0));
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return complex_matrix::scalar(cplx(v[0].get<double>(), v[1].get<double>()));
    }
    return parse_matrix(v, path);
}

inline std::vector<norm_kind> parse_norms(const std::string& text, const std::string& path) {
    if (text == "frobenius") return {norm_kind::frobenius};
    if (text == "operator") return {norm_kind::operator_norm};
    if (text == "both") return {norm_kind::frobenius, norm_kind::operator_norm};
    throw spec_error(path + ": expected \"frobenius\", \"operator\" or \"both\"");
}

inline spec_file parse_spec_json(const json& doc) {
    if (!doc.is_object()) throw spec_error("spec: expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "kind" && key != "S" && key != "B" && key != "initials" && key != "order" &&
            key != "norm") {
            throw spec_error("spec: unknown field \"" + key + "\"");
        }
    }

    spec_file out;
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        throw spec_error("kind: expected \"product\" or \"kronecker\"");
    }
    const std::string kind = doc["kind"].get<std::string>();
    if (kind == "product") {
        out.spec.kind = recurrence_kind::product;
    } else if (kind == "kronecker") {
        out.spec.kind = recurrence_kind::kronecker;
    } else {
        throw spec_error("kind: expected \"product\" or \"kronecker\", got \"" + kind + "\"");
    }

    if (!doc.contains("S") || !doc["S"].is_array() || doc["S"].empty()) {
        throw spec_error("S: expected a nonempty array of positive integers");
    }
    std::vector<int> raw;
    for (std::size_t i = 0; i < doc["S"].size(); ++i) {
        const json& v = doc["S"][i];
        if (!v.is_number_integer() || v.get<long long>() < 1) {
            throw spec_error("S[" + std::to_string(i) + "]: expected a positive integer");
        }
        raw.push_back(v.get<int>());
    }
    try {
        out.spec.set = make_index_set(raw);
    } catch (const error& e) {
        throw spec_error(std::string("S: ") + e.what());
    }

    if (!doc.contains("B")) throw spec_error("B: required field is missing");
    out.spec.b = parse_b(doc["B"], "B");

    if (!doc.contains("initials") || !doc["initials"].is_array()) {
        throw spec_error("initials: expected an array of matrix literals");
    }
    for (std::size_t i = 0; i < doc["initials"].size(); ++i) {
        out.spec.initials.push_back(
            parse_matrix(doc["initials"][i], "initials[" + std::to_string(i) + "]"));
    }

    if (doc.contains("order")) {
        if (!doc["order"].is_array()) throw spec_error("order: expected an array");
        for (std::size_t i = 0; i < doc["order"].size(); ++i) {
            const json& v = doc["order"][i];
            if (!v.is_number_integer()) {
                throw spec_error("order[" + std::to_string(i) + "]: expected an integer");
            }
            out.spec.order.push_back(v.get<int>());
        }
    } else {
        out.spec.order = out.spec.set.elements;
    }

    if (doc.contains("norm")) {
        if (!doc["norm"].is_string()) throw spec_error("norm: expected a string");
        out.norms = parse_norms(doc["norm"].get<std::string>(), "norm");
    }

    try {
        validate_spec(out.spec);
    } catch (const error& e) {
        throw spec_error(e.what());
    }
    return out;
}

inline spec_file load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_error("cannot open spec file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw spec_error(path + ": " + e.what());
    }
    return parse_spec_json(doc);
}

inline json entry_to_json(const cplx& v) {
    if (v.imag() == 0.0) return json(v.real());
    return json::array({v.real(), v.imag()});
}

inline json matrix_to_json(const complex_matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(entry_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json dump_spec(const spec_file& file) {
    json doc;
    doc["kind"] = to_string(file.spec.kind);
    doc["S"] = file.spec.set.elements;
    doc["B"] = file.spec.b.is_scalar() ? entry_to_json(file.spec.b(0, 0))
                                       : matrix_to_json(file.spec.b);
    json initials = json::array();
    for (const auto& a : file.spec.initials) initials.push_back(matrix_to_json(a));
    doc["initials"] = std::move(initials);
    doc["order"] = file.spec.order;
    doc["norm"] = file.norms.size() == 2 ? "both" : to_string(file.norms.front());
    return doc;
}

inline json to_json(const stability_report& rep) {
    json out;
    out["norm"] = to_string(rep.norm);
    out["margin"] = rep.margin;
    if (rep.kron_ratio) out["kron_ratio"] = *rep.kron_ratio;
    out["lambda"] = rep.lambda;
    out["m"] = rep.m;
    out["phi_reduced"] = rep.phi_reduced;
    out["verdict"] = to_string(rep.result);
    return out;
}

inline json to_json(const analysis& an) {
    json out;
    out["per_norm"] = json::array();
    for (const auto& rep : an.per_norm) out["per_norm"].push_back(to_json(rep));
    out["overall_verdict"] = to_string(an.overall);
    return out;
}

inline json slope_to_json(double v) {
    if (std::isfinite(v)) return json(v);
    return json(v > 0 ? "inf" : "-inf");
}

inline json to_json(const verify_report& rep) {
    json out;
    out["per_norm"] = json::array();
    for (const auto& entry : rep.per_norm) {
        json e = to_json(entry.report);
        json slopes = json::array();
        for (double s : entry.surrogate_slopes) slopes.push_back(slope_to_json(s));
        e["surrogate_slopes"] = std::move(slopes);
        if (entry.direct_slopes) {
            json ds = json::array();
            for (double s : *entry.direct_slopes) ds.push_back(slope_to_json(s));
            e["direct_slopes"] = std::move(ds);
        }
        if (entry.direct_truncated_at) e["direct_truncated_at"] = *entry.direct_truncated_at;
        e["surrogate_consistent"] = entry.surrogate_consistent;
        e["direct_consistent"] = entry.direct_consistent;
        e["consistent"] = entry.consistent;
        out["per_norm"].push_back(std::move(e));
    }
    out["overall_verdict"] = to_string(rep.overall);
    out["consistent"] = rep.consistent;
    return out;
}

inline std::string format_value(double v) {
    if (std::isfinite(v)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    if (v > 0) return "inf";
    if (v < 0) return "-inf";
    return "nan";
}

/// CSV rows for every n in 0..n_max; steps lost to truncation appear as NA.
template <class Real>
std::string trajectory_to_csv(const trajectory<Real>& traj) {
    std::ostringstream out;
    out << "n,rows,cols,norm,log_norm\n";
    std::size_t i = 0;
    for (long long n = 0; n <= traj.n_max; ++n) {
        if (i < traj.steps.size() && traj.steps[i].n == n) {
            const auto& step = traj.steps[i++];
            out << n << ',';
            if (step.rows) {
                out << *step.rows << ',' << *step.cols << ',';
            } else {
                out << "NA,NA,";
            }
            if (step.norm_value) {
                out << format_value(static_cast<double>(*step.norm_value));
            } else {
                out << "NA";
            }
            out << ',' << format_value(static_cast<double>(step.log_norm)) << '\n';
        } else {
            out << n << ",NA,NA,NA,NA\n";
        }
    }
    return out.str();
}

} // namespace matrec
