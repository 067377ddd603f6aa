#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "pants.hpp"
#include "surface.hpp"

namespace conelength::doc {

using Json = nlohmann::ordered_json;

// digits == 0 means binary64 output (17 significant digits, or hex with hexFloats);
// otherwise values are written as decimal strings with that many digits.
struct NumberFormat {
    bool hexFloats = false;
    int digits = 0;
};

inline std::string format_double(double x, bool hex) {
    char buf[64];
    std::snprintf(buf, sizeof buf, hex ? "%a" : "%.17g", x);
    return buf;
}

template <class Real>
Json real_to_json(const Real& x, const NumberFormat& f) {
    if constexpr (std::is_same_v<Real, double>) {
        if (!std::isfinite(x)) return nullptr;
        if (f.hexFloats) return format_double(x, true);
        return x;
    } else {
        if (!detail::is_finite(x)) return nullptr;
        if (f.hexFloats && f.digits == 0) return format_double(static_cast<double>(x), true);
        return x.str(f.digits > 0 ? f.digits : 17, std::ios_base::scientific);
    }
}

namespace detail_doc {

inline bool is_hex(const std::string& s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    return s.size() > i + 1 && s[i] == '0' && (s[i + 1] == 'x' || s[i + 1] == 'X');
}

inline std::optional<double> strict_strtod(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

} // namespace detail_doc

// Accepts JSON numbers and strings holding decimal or C99 hex floats.
template <class Real>
std::optional<Real> json_to_real(const Json& v) {
    if (v.is_number()) return Real(v.get<double>());
    if (!v.is_string()) return std::nullopt;
    const auto s = v.get<std::string>();
    if constexpr (std::is_same_v<Real, double>) {
        return detail_doc::strict_strtod(s);
    } else {
        if (detail_doc::is_hex(s)) {
            auto d = detail_doc::strict_strtod(s);
            if (!d) return std::nullopt;
            return Real(*d);
        }
        if (!detail_doc::strict_strtod(s)) return std::nullopt;
        try {
            return Real(s);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
}

// JSON writer that keeps 17 significant digits for binary64 values.
inline void write_json(std::ostream& os, const Json& j, int indent = 2, int depth = 0) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        if (!std::isfinite(x)) os << "null";
        else os << format_double(x, false);
        return;
    }
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << Json(it.key()).dump() << ": ";
            write_json(os, it.value(), indent, depth + 1);
        }
        os << "\n" << close << "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        bool flat = true;
        for (const auto& e : j) flat = flat && e.is_primitive();
        if (flat) {
            os << "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                write_json(os, j[i], indent, depth + 1);
            }
            os << "]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            write_json(os, j[i], indent, depth + 1);
        }
        os << "\n" << close << "]";
        return;
    }
    default: os << j.dump(); return;
    }
}

inline std::string dump(const Json& j) {
    std::ostringstream os;
    write_json(os, j);
    os << "\n";
    return os.str();
}

template <class Real>
struct SpectrumEntry {
    CurveId id;
    std::optional<Real> length;
};

template <class Real>
struct SurfaceDocument {
    Topology topology;
    std::optional<std::vector<GeneralizedLength<Real>>> boundaries;
    std::optional<std::vector<Real>> lengths;
    std::optional<std::vector<Real>> twists;
    std::vector<int> families;
    std::vector<SpectrumEntry<Real>> spectrum;
    bool has_spectrum = false;

    bool has_surface() const { return boundaries && lengths && twists; }

    SurfaceFN<Real> surface(const char* command) const {
        std::vector<std::string> v;
        if (!boundaries) v.push_back(std::string("/boundaries: required by ") + command);
        if (!lengths) v.push_back(std::string("/lengths: required by ") + command);
        if (!twists) v.push_back(std::string("/twists: required by ") + command);
        if (!v.empty()) throw SchemaError(std::move(v));
        return SurfaceFN<Real>(topology, *boundaries, *lengths, *twists);
    }

    LengthSpectrum<Real> length_spectrum(const char* command) const {
        if (!has_spectrum) throw SchemaError({std::string("/spectrum: required by ") + command});
        LengthSpectrum<Real> s;
        std::vector<std::string> v;
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            if (spectrum[i].length) s.insert(spectrum[i].id, *spectrum[i].length);
            else v.push_back("/spectrum/" + std::to_string(i) + "/length: required by " + command);
        }
        if (!v.empty()) throw SchemaError(std::move(v));
        return s;
    }

    // Family curves selected by the document, or every internal curve.
    std::vector<int> selected_families() const {
        if (!families.empty()) return families;
        std::vector<int> all(static_cast<std::size_t>(std::max(topology.curve_count(), 0)));
        for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
        return all;
    }
};

namespace detail_doc {

template <class Real>
std::optional<std::vector<Real>> real_array(const Json& j, const char* key, std::vector<std::string>& v) {
    if (!j.contains(key)) return std::nullopt;
    const Json& a = j.at(key);
    const std::string base = std::string("/") + key;
    if (!a.is_array()) {
        v.push_back(base + ": expected an array");
        return std::nullopt;
    }
    std::vector<Real> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto x = json_to_real<Real>(a[i]);
        if (!x) v.push_back(base + "/" + std::to_string(i) + ": expected a real number");
        else out.push_back(*x);
    }
    return out;
}

inline std::optional<int> int_field(const Json& j, const char* key, const std::string& where,
                                    std::vector<std::string>& v) {
    if (!j.contains(key)) return std::nullopt;
    const Json& x = j.at(key);
    if (!x.is_number_integer()) {
        v.push_back(where + "/" + key + ": expected an integer");
        return std::nullopt;
    }
    return x.get<int>();
}

} // namespace detail_doc

template <class Real>
SurfaceDocument<Real> parse_document(const Json& j) {
    using detail_doc::int_field;
    std::vector<std::string> v;
    if (!j.is_object()) throw SchemaError({"/: expected an object"});
    static const std::vector<std::string> known{"genus", "boundaries", "boundary_count", "pants", "lengths",
                                                "twists", "families", "spectrum", "report"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) v.push_back("/" + it.key() + ": unknown key");

    SurfaceDocument<Real> d;
    if (auto g = int_field(j, "genus", "", v)) d.topology.genus = *g;
    else if (!j.contains("genus")) v.push_back("/genus: required");

    int inferred = 0;
    if (!j.contains("pants")) {
        v.push_back("/pants: required");
    } else if (!j.at("pants").is_array()) {
        v.push_back("/pants: expected an array");
    } else {
        const Json& P = j.at("pants");
        for (std::size_t p = 0; p < P.size(); ++p) {
            const std::string where = "/pants/" + std::to_string(p);
            PantsRecord rec{};
            if (!P[p].is_array() || P[p].size() != 3) {
                v.push_back(where + ": expected an array of 3 cuff bindings");
                d.topology.pants.push_back(rec);
                continue;
            }
            for (std::size_t s = 0; s < 3; ++s) {
                const Json& c = P[p][s];
                const std::string cw = where + "/" + std::to_string(s);
                const bool is_b = c.is_object() && c.size() == 1 && c.contains("boundary");
                const bool is_c = c.is_object() && c.size() == 1 && c.contains("curve");
                if (!is_b && !is_c) {
                    v.push_back(cw + R"(: expected {"boundary": i} or {"curve": j})");
                    continue;
                }
                auto idx = int_field(c, is_b ? "boundary" : "curve", cw, v);
                if (!idx) continue;
                rec[s] = is_b ? Cuff::boundary(*idx) : Cuff::curve(*idx);
                if (is_b) inferred = std::max(inferred, *idx + 1);
            }
            d.topology.pants.push_back(rec);
        }
    }

    d.boundaries.reset();
    if (auto b = detail_doc::real_array<Real>(j, "boundaries", v)) {
        std::vector<GeneralizedLength<Real>> out;
        for (std::size_t i = 0; i < b->size(); ++i) {
            try {
                out.emplace_back((*b)[i]);
            } catch (const DomainError& e) {
                v.push_back("/boundaries/" + std::to_string(i) + ": " + e.what());
            }
        }
        d.boundaries = std::move(out);
        d.topology.boundary_count = static_cast<int>(b->size());
    } else if (auto n = int_field(j, "boundary_count", "", v)) {
        d.topology.boundary_count = *n;
    } else if (!j.contains("boundaries")) {
        d.topology.boundary_count = inferred;
    }
    if (j.contains("boundaries") && j.contains("boundary_count")) {
        auto n = int_field(j, "boundary_count", "", v);
        if (n && j.at("boundaries").is_array() && *n != static_cast<int>(j.at("boundaries").size()))
            v.push_back("/boundary_count: disagrees with /boundaries");
    }

    d.lengths = detail_doc::real_array<Real>(j, "lengths", v);
    d.twists = detail_doc::real_array<Real>(j, "twists", v);

    if (j.contains("families")) {
        const Json& F = j.at("families");
        if (!F.is_array()) v.push_back("/families: expected an array of curve indices");
        else
            for (std::size_t i = 0; i < F.size(); ++i) {
                if (!F[i].is_number_integer()) v.push_back("/families/" + std::to_string(i) + ": expected an integer");
                else d.families.push_back(F[i].get<int>());
            }
    }

    if (j.contains("spectrum")) {
        d.has_spectrum = true;
        const Json& S = j.at("spectrum");
        if (!S.is_array()) v.push_back("/spectrum: expected an array");
        else
            for (std::size_t i = 0; i < S.size(); ++i) {
                const std::string where = "/spectrum/" + std::to_string(i);
                const Json& e = S[i];
                if (!e.is_object() || !e.contains("family") || !e.at("family").is_string()) {
                    v.push_back(where + "/family: required string");
                    continue;
                }
                long n = 0;
                if (e.contains("n")) {
                    if (!e.at("n").is_number_integer()) {
                        v.push_back(where + "/n: expected an integer");
                        continue;
                    }
                    n = e.at("n").get<long>();
                }
                auto id = CurveId::parse(e.at("family").get<std::string>(), n);
                if (!id || (id->role == CurveRole::pants_curve && n != 0)) {
                    v.push_back(where + ": unknown curve " + e.at("family").get<std::string>() + "[" +
                                std::to_string(n) + "]");
                    continue;
                }
                SpectrumEntry<Real> entry{*id, std::nullopt};
                if (e.contains("length") && !e.at("length").is_null()) {
                    auto x = json_to_real<Real>(e.at("length"));
                    if (!x || !detail::is_finite(*x) || !(*x > Real(0))) {
                        v.push_back(where + "/length: expected a finite real > 0");
                        continue;
                    }
                    entry.length = *x;
                }
                for (const auto& prev : d.spectrum)
                    if (prev.id == entry.id) v.push_back(where + ": duplicate curve " + entry.id.str());
                d.spectrum.push_back(entry);
            }
    }

    if (v.empty()) {
        try {
            d.topology.validate();
        } catch (const SchemaError& e) {
            for (const auto& s : e.violations()) v.push_back("/pants: " + s);
        }
    }
    if (v.empty()) {
        for (int f : d.families)
            if (f < 0 || f >= d.topology.curve_count()) v.push_back("/families: curve " + std::to_string(f) + " out of range");
        for (std::size_t i = 0; i < d.spectrum.size(); ++i)
            if (d.spectrum[i].id.curve >= d.topology.curve_count())
                v.push_back("/spectrum/" + std::to_string(i) + ": curve index out of range");
        const int nc = d.topology.curve_count();
        if (d.lengths && static_cast<int>(d.lengths->size()) != nc)
            v.push_back("/lengths: expected " + std::to_string(nc) + " entries");
        if (d.twists && static_cast<int>(d.twists->size()) != nc)
            v.push_back("/twists: expected " + std::to_string(nc) + " entries");
        if (!d.has_spectrum) {
            if (!d.lengths) v.push_back("/lengths: required");
            if (!d.twists) v.push_back("/twists: required");
            if (!d.boundaries) v.push_back("/boundaries: required");
        } else if (d.lengths.has_value() != d.twists.has_value()) {
            v.push_back(d.lengths ? "/twists: required alongside /lengths" : "/lengths: required alongside /twists");
        }
        if (d.lengths)
            for (std::size_t i = 0; i < d.lengths->size(); ++i)
                if (!detail::is_finite((*d.lengths)[i]) || !((*d.lengths)[i] > Real(0)))
                    v.push_back("/lengths/" + std::to_string(i) + ": must be finite and > 0");
    }
    if (!v.empty()) throw SchemaError(std::move(v));
    return d;
}

template <class Real>
SurfaceDocument<Real> parse_document_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
    return parse_document<Real>(j);
}

template <class Real>
SurfaceDocument<Real> load_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_document_text<Real>(ss.str());
}

inline Json topology_json(const Topology& t) {
    Json pants = Json::array();
    for (const auto& p : t.pants) {
        Json rec = Json::array();
        for (const auto& c : p) rec.push_back(c.is_curve() ? Json{{"curve", c.index}} : Json{{"boundary", c.index}});
        pants.push_back(rec);
    }
    return pants;
}

template <class Real>
Json spectrum_entry_json(const CurveId& id, const std::optional<Real>& length, const NumberFormat& f) {
    Json e{{"family", id.family()}, {"n", id.n}};
    if (length) e["length"] = real_to_json(*length, f);
    return e;
}

template <class Real>
Json to_json(const SurfaceDocument<Real>& d, const NumberFormat& f) {
    Json j;
    j["genus"] = d.topology.genus;
    if (d.boundaries) {
        Json b = Json::array();
        for (const auto& x : *d.boundaries) b.push_back(real_to_json(x.value(), f));
        j["boundaries"] = b;
    } else {
        j["boundary_count"] = d.topology.boundary_count;
    }
    j["pants"] = topology_json(d.topology);
    auto arr = [&](const std::vector<Real>& xs) {
        Json a = Json::array();
        for (const auto& x : xs) a.push_back(real_to_json(x, f));
        return a;
    };
    if (d.lengths) j["lengths"] = arr(*d.lengths);
    if (d.twists) j["twists"] = arr(*d.twists);
    if (!d.families.empty()) j["families"] = d.families;
    if (d.has_spectrum) {
        Json s = Json::array();
        for (const auto& e : d.spectrum) s.push_back(spectrum_entry_json(e.id, e.length, f));
        j["spectrum"] = s;
    }
    return j;
}

template <class Real>
SurfaceDocument<Real> document_from(const SurfaceFN<Real>& X) {
    SurfaceDocument<Real> d;
    d.topology = X.topology();
    d.boundaries = X.boundaries();
    d.lengths = X.lengths();
    d.twists = X.twists();
    return d;
}

} // namespace conelength::doc
