#pragma once

// JSON interchange documents:
//   {"kind": "...", "m1": int, "m2": int, "data": [matrix, ...]}
// A matrix is an array of rows and each entry is a [re, im] pair. Numbers are
// written with 17 significant digits and keys in a fixed order, so
// parse -> serialize reproduces an emitted document byte for byte.
// Documents carry double precision only.

#include "dirac/core.hpp"
#include "dirac/inverse.hpp"
#include "dirac/jalgebra.hpp"
#include "dirac/potential.hpp"
#include "dirac/snode.hpp"
#include "dirac/taylor.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace dirac::io {

using Json = nlohmann::ordered_json;

enum class Kind { schur, potential, taylor, snode, report };

inline std::string kind_name(Kind k) {
    switch (k) {
        case Kind::schur: return "schur";
        case Kind::potential: return "potential";
        case Kind::taylor: return "taylor";
        case Kind::snode: return "snode";
        case Kind::report: return "report";
    }
    return "unknown";
}

inline Kind parse_kind(const std::string& s) {
    for (Kind k : {Kind::schur, Kind::potential, Kind::taylor, Kind::snode, Kind::report}) {
        if (kind_name(k) == s) return k;
    }
    throw ValidationError("document: unknown kind '" + s + "'");
}

inline std::string format_number(double x) {
    if (!std::isfinite(x)) throw NumericalError("document: non-finite number");
    if (x == 0.0) return "0";  // also folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write(const Json& j, std::string& out, int indent, bool inline_arrays) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::null: out += "null"; break;
        case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
        case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
        case Json::value_t::number_float: out += format_number(j.get<double>()); break;
        case Json::value_t::string: out += Json(j.get<std::string>()).dump(); break;
        case Json::value_t::array: {
            // Scalar pairs and matrix rows stay on one line.
            const bool flat = inline_arrays || j.empty() || !j.front().is_array() || !j.front().front().is_array();
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += flat ? ", " : ",";
                if (!flat) out += "\n" + pad_in;
                write(v, out, indent + 1, flat);
                first = false;
            }
            if (!flat && !j.empty()) out += "\n" + pad;
            out += ']';
            break;
        }
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                out += first ? "\n" : ",\n";
                out += pad_in + Json(it.key()).dump() + ": ";
                write(it.value(), out, indent + 1, false);
                first = false;
            }
            if (!j.empty()) out += "\n" + pad;
            out += '}';
            break;
        }
        default: throw ValidationError("document: unsupported JSON value");
    }
}

}  // namespace detail

/// Canonical serialization, newline terminated.
inline std::string serialize(const Json& j) {
    std::string out;
    detail::write(j, out, 0, false);
    out += '\n';
    return out;
}

inline Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("document: malformed JSON: ") + e.what());
    }
}

inline Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ValidationError(what + ": matrix must be a non-empty array of rows");
    const auto rows = j.size();
    if (!j.front().is_array() || j.front().empty()) throw ValidationError(what + ": rows must be non-empty arrays");
    const auto cols = j.front().size();
    Mat m(idx(rows), idx(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != cols) throw ValidationError(what + ": ragged matrix");
        for (std::size_t k = 0; k < cols; ++k) {
            const auto& e = row[k];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw ValidationError(what + ": entries must be [re, im] number pairs");
            }
            m(idx(i), idx(k)) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

struct Document {
    Kind kind = Kind::report;
    Signature sig;
    std::vector<Mat> data;
    Json extra = Json::object();  // additional top-level fields of report documents
};

inline Json to_json(const Document& d) {
    Json j = Json::object();
    j["kind"] = kind_name(d.kind);
    j["m1"] = d.sig.m1;
    j["m2"] = d.sig.m2;
    Json data = Json::array();
    for (const auto& m : d.data) data.push_back(matrix_to_json(m));
    j["data"] = std::move(data);
    for (auto it = d.extra.begin(); it != d.extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

inline std::string serialize(const Document& d) { return serialize(to_json(d)); }

namespace detail {

inline void check_shapes(const Document& d) {
    const auto m1 = d.sig.m1;
    const auto m2 = d.sig.m2;
    auto each = [&](std::size_t rows, std::size_t cols, const char* what) {
        if (d.data.empty()) throw ValidationError(kind_name(d.kind) + " document: empty data");
        for (const auto& m : d.data) require_shape(m, rows, cols, what);
    };
    switch (d.kind) {
        case Kind::schur: each(m1, m2, "schur coefficient"); break;
        case Kind::potential: each(m1 + m2, m1 + m2, "potential matrix"); break;
        case Kind::taylor: each(m2, m1, "taylor coefficient"); break;
        case Kind::snode: {
            if (d.data.size() != 3) throw ValidationError("snode document: data must be [A, S, Pi]");
            const auto n = static_cast<std::size_t>(d.data[0].rows());
            if (n == 0 || n % m2 != 0) throw ValidationError("snode document: A is not m2 (r+1) square");
            require_shape(d.data[0], n, n, "snode A");
            require_shape(d.data[1], n, n, "snode S");
            require_shape(d.data[2], n, m1 + m2, "snode Pi");
            break;
        }
        case Kind::report: break;
    }
}

inline std::size_t positive_int(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<std::int64_t>() <= 0) {
        throw ValidationError(std::string("document: '") + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(j[key].get<std::int64_t>());
}

}  // namespace detail

/// Structural validation: kind, signature and matrix shapes.
inline Document from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("document: top level must be an object");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ValidationError("document: missing 'kind'");
    Document d;
    d.kind = parse_kind(j["kind"].get<std::string>());
    d.sig = {detail::positive_int(j, "m1"), detail::positive_int(j, "m2")};
    if (!j.contains("data") || !j["data"].is_array()) throw ValidationError("document: missing 'data' array");
    for (std::size_t k = 0; k < j["data"].size(); ++k) {
        d.data.push_back(matrix_from_json(j["data"][k], "data[" + std::to_string(k) + "]"));
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "kind" && it.key() != "m1" && it.key() != "m2" && it.key() != "data") {
            d.extra[it.key()] = it.value();
        }
    }
    detail::check_shapes(d);
    return d;
}

inline Document parse_document(const std::string& text) { return from_json(parse_json(text)); }

inline Document expect_kind(Document d, std::initializer_list<Kind> kinds) {
    for (Kind k : kinds) {
        if (d.kind == k) return d;
    }
    throw ValidationError("document: unexpected kind '" + kind_name(d.kind) + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ValidationError("write to '" + path + "' failed");
}

/// Default class-membership tolerance, overridden by DIRAC_LAB_TOL.
inline double validation_tolerance() {
    const char* env = std::getenv("DIRAC_LAB_TOL");
    if (env == nullptr || *env == '\0') return Tolerances{}.membership;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(env, &end);
    if (errno != 0 || end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string("DIRAC_LAB_TOL: not a positive number: '") + env + "'");
    }
    return v;
}

template <class Real>
std::vector<Mat> to_double_all(const std::vector<Matrix<Real>>& ms) {
    std::vector<Mat> out;
    for (const auto& m : ms) out.push_back(cast_matrix<double>(m));
    return out;
}

template <class Real>
Document schur_document(const SchurSequence<Real>& s) {
    return {Kind::schur, s.sig, to_double_all(s.rho), Json::object()};
}

template <class Real>
Document potential_document(const DiracPotential<Real>& p) {
    return {Kind::potential, p.sig, to_double_all(p.C), Json::object()};
}

template <class Real>
Document taylor_document(const TaylorData<Real>& t) {
    return {Kind::taylor, t.sig, to_double_all(t.phi), Json::object()};
}

template <class Real>
Document snode_document(const SNode<Real>& n) {
    return {Kind::snode, n.sig, to_double_all(std::vector<Matrix<Real>>{n.A, n.S, n.Pi}), Json::object()};
}

template <class Real = double>
SchurSequence<Real> to_schur(const Document& d) {
    expect_kind(d, {Kind::schur});
    SchurSequence<Real> s{d.sig, {}};
    for (const auto& m : d.data) s.rho.push_back(cast_matrix<Real>(m));
    s.validate();
    return s;
}

/// Loads and validates a potential against the class tolerance.
template <class Real = double>
DiracPotential<Real> to_potential(const Document& d, double tol) {
    expect_kind(d, {Kind::potential});
    DiracPotential<Real> p{d.sig, {}};
    for (const auto& m : d.data) p.C.push_back(cast_matrix<Real>(m));
    p.validate(tol);
    return p;
}

template <class Real = double>
TaylorData<Real> to_taylor(const Document& d) {
    expect_kind(d, {Kind::taylor});
    TaylorData<Real> t{d.sig, {}};
    for (const auto& m : d.data) t.phi.push_back(cast_matrix<Real>(m));
    t.validate();
    return t;
}

}  // namespace dirac::io
