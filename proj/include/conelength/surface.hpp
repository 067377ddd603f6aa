#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "pants.hpp"
#include "xpiece.hpp"

namespace conelength {

inline bool is_exceptional(int genus, int boundaries) {
    return genus == 0 ? boundaries <= 5 : (genus == 1 && boundaries == 0);
}

enum class CuffKind { boundary, curve };

struct Cuff {
    CuffKind kind = CuffKind::curve;
    int index = 0;

    static Cuff boundary(int i) { return {CuffKind::boundary, i}; }
    static Cuff curve(int j) { return {CuffKind::curve, j}; }
    bool is_curve() const { return kind == CuffKind::curve; }
    friend bool operator==(const Cuff&, const Cuff&) = default;
};

using PantsRecord = std::array<Cuff, 3>;

struct Slot {
    int pants = -1;
    int position = -1;
};

struct Topology {
    int genus = 0;
    int boundary_count = 0;
    std::vector<PantsRecord> pants;

    int curve_count() const { return 3 * genus - 3 + boundary_count; }
    int pants_count() const { return 2 * genus - 2 + boundary_count; }

    // Violations as human-readable strings; empty when valid.
    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (genus < 0) out.push_back("genus must be >= 0");
        if (boundary_count < 0) out.push_back("boundary count must be >= 0");
        if (!out.empty()) return out;
        if (is_exceptional(genus, boundary_count)) {
            out.push_back("surface type (" + std::to_string(genus) + ", " + std::to_string(boundary_count) +
                          ") is exceptional");
            return out;
        }
        if (static_cast<int>(pants.size()) != pants_count())
            out.push_back("expected " + std::to_string(pants_count()) + " pants, got " +
                          std::to_string(pants.size()));
        std::vector<int> curve_uses(std::max(curve_count(), 0), 0);
        std::vector<int> boundary_uses(boundary_count, 0);
        for (std::size_t p = 0; p < pants.size(); ++p) {
            for (int s = 0; s < 3; ++s) {
                const Cuff& c = pants[p][s];
                const std::string where = "pants[" + std::to_string(p) + "][" + std::to_string(s) + "]";
                if (c.kind == CuffKind::curve) {
                    if (c.index < 0 || c.index >= curve_count())
                        out.push_back(where + ": curve index " + std::to_string(c.index) + " out of range");
                    else
                        ++curve_uses[c.index];
                } else {
                    if (c.index < 0 || c.index >= boundary_count)
                        out.push_back(where + ": boundary index " + std::to_string(c.index) + " out of range");
                    else
                        ++boundary_uses[c.index];
                }
            }
        }
        for (std::size_t j = 0; j < curve_uses.size(); ++j)
            if (curve_uses[j] != 2)
                out.push_back("curve " + std::to_string(j) + " bound to " + std::to_string(curve_uses[j]) +
                              " slots, expected 2");
        for (std::size_t i = 0; i < boundary_uses.size(); ++i)
            if (boundary_uses[i] != 1)
                out.push_back("boundary " + std::to_string(i) + " bound to " + std::to_string(boundary_uses[i]) +
                              " slots, expected 1");
        return out;
    }

    void validate() const {
        if (genus >= 0 && boundary_count >= 0 && is_exceptional(genus, boundary_count))
            throw ExceptionalSurface("surface type (" + std::to_string(genus) + ", " +
                                     std::to_string(boundary_count) + ") is exceptional");
        auto v = violations();
        if (!v.empty()) throw SchemaError(std::move(v));
    }

    std::array<Slot, 2> curve_slots(int j) const {
        std::array<Slot, 2> out{};
        int found = 0;
        for (std::size_t p = 0; p < pants.size(); ++p)
            for (int s = 0; s < 3; ++s)
                if (pants[p][s] == Cuff::curve(j) && found < 2) out[found++] = {static_cast<int>(p), s};
        return out;
    }

    Slot boundary_slot(int i) const {
        for (std::size_t p = 0; p < pants.size(); ++p)
            for (int s = 0; s < 3; ++s)
                if (pants[p][s] == Cuff::boundary(i)) return {static_cast<int>(p), s};
        return {};
    }

    friend bool operator==(const Topology&, const Topology&) = default;
};

template <class Real>
class SurfaceFN {
public:
    SurfaceFN(Topology topology, std::vector<GeneralizedLength<Real>> boundaries, std::vector<Real> lengths,
              std::vector<Real> twists)
        : topology_(std::move(topology)), boundaries_(std::move(boundaries)), lengths_(std::move(lengths)),
          twists_(std::move(twists)) {
        topology_.validate();
        std::vector<std::string> v;
        if (static_cast<int>(boundaries_.size()) != topology_.boundary_count)
            v.push_back("expected " + std::to_string(topology_.boundary_count) + " boundary values");
        if (static_cast<int>(lengths_.size()) != topology_.curve_count())
            v.push_back("expected " + std::to_string(topology_.curve_count()) + " lengths");
        if (static_cast<int>(twists_.size()) != topology_.curve_count())
            v.push_back("expected " + std::to_string(topology_.curve_count()) + " twists");
        for (std::size_t j = 0; j < lengths_.size(); ++j)
            if (!detail::is_finite(lengths_[j]) || !(lengths_[j] > Real(0)))
                v.push_back("lengths[" + std::to_string(j) + "] must be finite and > 0");
        for (std::size_t j = 0; j < twists_.size(); ++j)
            if (!detail::is_finite(twists_[j])) v.push_back("twists[" + std::to_string(j) + "] must be finite");
        if (!v.empty()) throw SchemaError(std::move(v));
    }

    const Topology& topology() const { return topology_; }
    int genus() const { return topology_.genus; }
    const std::vector<GeneralizedLength<Real>>& boundaries() const { return boundaries_; }
    const std::vector<Real>& lengths() const { return lengths_; }
    const std::vector<Real>& twists() const { return twists_; }

    GeneralizedLength<Real> cuff_value(const Cuff& c) const {
        return c.is_curve() ? GeneralizedLength<Real>(lengths_[c.index]) : boundaries_[c.index];
    }

    SurfaceFN with_boundaries(std::vector<GeneralizedLength<Real>> b) const {
        return SurfaceFN(topology_, std::move(b), lengths_, twists_);
    }

    SurfaceFN with_twist(int j, const Real& t) const {
        auto tw = twists_;
        tw.at(j) = t;
        return SurfaceFN(topology_, boundaries_, lengths_, std::move(tw));
    }

private:
    Topology topology_;
    std::vector<GeneralizedLength<Real>> boundaries_;
    std::vector<Real> lengths_;
    std::vector<Real> twists_;
};

enum class FamilyKind { xpiece, torus };

// Twist family of one internal curve. For an X-piece, side A is the pants
// holding the curve's first slot. Each side turns around the first internal
// cuff (in slot order) other than the waist, or the first cuff if none is
// internal. For a torus the third cuff of the self-glued pants is the boundary.
struct EmbeddedFamily {
    int curve = 0;
    FamilyKind kind = FamilyKind::xpiece;
    int pantsA = -1;
    int pantsB = -1;
    Cuff targetA, companionA, targetB, companionB;
    Cuff torusBoundary;

    int intersection_with_waist() const { return kind == FamilyKind::xpiece ? 2 : 1; }
};

namespace detail_surface {

inline std::pair<Cuff, Cuff> pick_target(const PantsRecord& p, int skip_position) {
    std::array<Cuff, 2> others{};
    int k = 0;
    for (int s = 0; s < 3; ++s)
        if (s != skip_position) others[k++] = p[s];
    if (!others[0].is_curve() && others[1].is_curve()) return {others[1], others[0]};
    return {others[0], others[1]};
}

} // namespace detail_surface

inline EmbeddedFamily embedded_family(const Topology& topo, int j) {
    EmbeddedFamily f;
    f.curve = j;
    const auto slots = topo.curve_slots(j);
    if (slots[0].pants == slots[1].pants) {
        f.kind = FamilyKind::torus;
        f.pantsA = f.pantsB = slots[0].pants;
        const auto& p = topo.pants[slots[0].pants];
        f.torusBoundary = p[3 - slots[0].position - slots[1].position];
        return f;
    }
    f.kind = FamilyKind::xpiece;
    f.pantsA = slots[0].pants;
    f.pantsB = slots[1].pants;
    std::tie(f.targetA, f.companionA) = detail_surface::pick_target(topo.pants[f.pantsA], slots[0].position);
    std::tie(f.targetB, f.companionB) = detail_surface::pick_target(topo.pants[f.pantsB], slots[1].position);
    return f;
}

inline std::vector<EmbeddedFamily> embedded_families(const Topology& topo) {
    std::vector<EmbeddedFamily> out;
    for (int j = 0; j < topo.curve_count(); ++j) out.push_back(embedded_family(topo, j));
    return out;
}

template <class Real>
xpiece::XPieceSpec<Real> xpiece_spec(const SurfaceFN<Real>& X, const EmbeddedFamily& f) {
    if (f.kind != FamilyKind::xpiece) throw DomainError("family is not an X-piece");
    return {{X.cuff_value(f.targetA), X.cuff_value(f.companionA)},
            {X.cuff_value(f.targetB), X.cuff_value(f.companionB)},
            X.lengths()[f.curve],
            X.twists()[f.curve]};
}

template <class Real>
xpiece::TorusSpec<Real> torus_spec(const SurfaceFN<Real>& X, const EmbeddedFamily& f) {
    if (f.kind != FamilyKind::torus) throw DomainError("family is not a torus");
    return {X.lengths()[f.curve], X.cuff_value(f.torusBoundary), X.twists()[f.curve]};
}

// Curve roles, in canonical order within one internal curve.
//   pants_curve      the curve itself (n = 0)
//   twist            its twist family, index n
//   retwisted_waist  the waist twisted k times along the n = 0 family curve (n = k)
//   retwisted_family twist family about that retwisted waist (k, n)
enum class CurveRole { pants_curve, twist, retwisted_waist, retwisted_family };

struct CurveId {
    int curve = 0;
    CurveRole role = CurveRole::pants_curve;
    long k = 0;
    long n = 0;

    friend auto operator<=>(const CurveId&, const CurveId&) = default;
    friend bool operator==(const CurveId&, const CurveId&) = default;

    static CurveId pants_curve(int j) { return {j, CurveRole::pants_curve, 0, 0}; }
    static CurveId twist(int j, long n) { return {j, CurveRole::twist, 0, n}; }
    static CurveId retwisted_waist(int j, long k) { return {j, CurveRole::retwisted_waist, 0, k}; }
    static CurveId retwisted_family(int j, long k, long n) { return {j, CurveRole::retwisted_family, k, n}; }

    // Family identifier used in documents: L3, T3, G3, R3:-2.
    std::string family() const {
        const std::string j = std::to_string(curve);
        switch (role) {
        case CurveRole::pants_curve: return "L" + j;
        case CurveRole::twist: return "T" + j;
        case CurveRole::retwisted_waist: return "G" + j;
        case CurveRole::retwisted_family: return "R" + j + ":" + std::to_string(k);
        }
        return "?";
    }

    std::string str() const { return family() + "[" + std::to_string(n) + "]"; }

    static std::optional<CurveId> parse(const std::string& family, long n) {
        if (family.size() < 2) return std::nullopt;
        CurveId id;
        id.n = n;
        switch (family[0]) {
        case 'L': id.role = CurveRole::pants_curve; break;
        case 'T': id.role = CurveRole::twist; break;
        case 'G': id.role = CurveRole::retwisted_waist; break;
        case 'R': id.role = CurveRole::retwisted_family; break;
        default: return std::nullopt;
        }
        const std::string rest = family.substr(1);
        const auto colon = rest.find(':');
        if ((colon != std::string::npos) != (id.role == CurveRole::retwisted_family)) return std::nullopt;
        try {
            std::size_t used = 0;
            const std::string head = rest.substr(0, colon);
            id.curve = std::stoi(head, &used);
            if (used != head.size() || id.curve < 0) return std::nullopt;
            if (colon != std::string::npos) {
                const std::string tail = rest.substr(colon + 1);
                id.k = std::stol(tail, &used);
                if (used != tail.size()) return std::nullopt;
            }
        } catch (const std::exception&) {
            return std::nullopt;
        }
        if (id.family() != family) return std::nullopt;
        return id;
    }
};

template <class Real>
class LengthSpectrum {
public:
    void insert(const CurveId& id, const Real& length) {
        if (!detail::is_finite(length) || !(length > Real(0)))
            throw DomainError("length of " + id.str() + " must be finite and > 0");
        entries_[id] = length;
    }

    bool contains(const CurveId& id) const { return entries_.count(id) != 0; }

    const Real& at(const CurveId& id) const {
        auto it = entries_.find(id);
        if (it == entries_.end()) throw MissingCurves({id.str()});
        return it->second;
    }

    const std::map<CurveId, Real>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<CurveId, Real> entries_;
};

enum class BoundaryRoute { torus, xpiece };

// How one boundary datum is recovered. For the X-piece route the boundary is
// the companion on side A (onSideA) or side B of the anchor curve's family.
struct BoundaryPlan {
    int boundary = 0;
    BoundaryRoute route = BoundaryRoute::torus;
    int anchor = 0;
    bool onSideA = true;
};

inline constexpr long retwist_reach = 3;

struct CurveManifest {
    std::vector<CurveId> curves;
    std::vector<BoundaryPlan> plans;
};

inline CurveManifest curve_manifest(const Topology& topo) {
    topo.validate();
    const auto families = embedded_families(topo);
    CurveManifest m;
    std::set<CurveId> ids;
    for (int j = 0; j < topo.curve_count(); ++j) {
        ids.insert(CurveId::pants_curve(j));
        for (long n = 0; n <= 2; ++n) ids.insert(CurveId::twist(j, n));
    }
    std::set<int> anchors;
    for (int i = 0; i < topo.boundary_count; ++i) {
        const Slot slot = topo.boundary_slot(i);
        const auto& p = topo.pants[slot.pants];
        std::vector<BoundaryPlan> candidates;
        for (int s = 0; s < 3; ++s) {
            if (!p[s].is_curve()) continue;
            const auto& f = families[p[s].index];
            if (f.kind == FamilyKind::torus) {
                candidates.push_back({i, BoundaryRoute::torus, f.curve, true});
                continue;
            }
            const bool sideA = f.companionA == Cuff::boundary(i) && f.pantsA == slot.pants;
            const bool sideB = f.companionB == Cuff::boundary(i) && f.pantsB == slot.pants;
            if (!sideA && !sideB) continue;
            if (f.targetA.is_curve() && f.targetB.is_curve())
                candidates.push_back({i, BoundaryRoute::xpiece, f.curve, sideA});
        }
        if (candidates.empty())
            throw DomainError("boundary " + std::to_string(i) +
                              " has no adjacent X-piece with internal targets on both sides");
        auto chosen = std::find_if(candidates.begin(), candidates.end(), [&](const BoundaryPlan& b) {
            return b.route == BoundaryRoute::torus || anchors.count(b.anchor) != 0;
        });
        const BoundaryPlan plan = chosen != candidates.end() ? *chosen : candidates.front();
        if (plan.route == BoundaryRoute::xpiece) anchors.insert(plan.anchor);
        m.plans.push_back(plan);
    }
    for (int j : anchors) {
        for (long k = -retwist_reach; k <= retwist_reach; ++k) {
            if (k == 0) continue;
            ids.insert(CurveId::retwisted_waist(j, k));
            ids.insert(CurveId::retwisted_family(j, k, 1));
            ids.insert(CurveId::retwisted_family(j, k, 2));
        }
    }
    m.curves.assign(ids.begin(), ids.end());
    return m;
}

// Immutable evaluator of curve lengths on a fixed surface; safe to share across threads.
template <class Real>
class CurveEvaluator {
public:
    explicit CurveEvaluator(const SurfaceFN<Real>& X) : X_(X), families_(embedded_families(X.topology())) {}

    const std::vector<EmbeddedFamily>& families() const { return families_; }

    Real family_length(int j, long n) const {
        const auto& f = families_.at(j);
        if (f.kind == FamilyKind::torus) return xpiece::torus_family_length(torus_spec(X_, f), n);
        return xpiece::family_length(xpiece_spec(X_, f), n);
    }

    Real length(const CurveId& id) const {
        if (id.curve < 0 || id.curve >= static_cast<int>(families_.size()))
            throw DomainError("curve index out of range in " + id.str());
        const auto& f = families_[id.curve];
        if (id.role == CurveRole::pants_curve) return X_.lengths()[id.curve];
        if (id.role == CurveRole::twist) return family_length(id.curve, id.n);
        if (f.kind != FamilyKind::xpiece) throw DomainError(id.str() + " needs an X-piece family");
        const auto spec = xpiece_spec(X_, f);
        switch (id.role) {
        case CurveRole::retwisted_waist:
            return xpiece::family_length(xpiece::dual_spec(spec), id.n);
        case CurveRole::retwisted_family:
            return xpiece::family_length(xpiece::retwisted_spec(spec, id.k), id.n);
        default:
            break;
        }
        throw DomainError("unsupported curve " + id.str());
    }

    // Deterministic regardless of worker count: results land in input order.
    std::vector<Real> lengths(const std::vector<CurveId>& ids, int workers = 1) const {
        std::vector<Real> out(ids.size());
        workers = std::max(1, std::min<int>(workers, static_cast<int>(ids.size())));
        if (workers == 1) {
            for (std::size_t i = 0; i < ids.size(); ++i) out[i] = length(ids[i]);
            return out;
        }
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < ids.size(); i += workers) out[i] = length(ids[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        return out;
    }

private:
    SurfaceFN<Real> X_;
    std::vector<EmbeddedFamily> families_;
};

template <class Real>
LengthSpectrum<Real> forward_spectrum(const SurfaceFN<Real>& X, const std::vector<CurveId>& ids, int workers = 1) {
    CurveEvaluator<Real> eval(X);
    const auto values = eval.lengths(ids, workers);
    LengthSpectrum<Real> s;
    for (std::size_t i = 0; i < ids.size(); ++i) s.insert(ids[i], values[i]);
    return s;
}

template <class Real>
LengthSpectrum<Real> forward_spectrum(const SurfaceFN<Real>& X, int workers = 1) {
    return forward_spectrum(X, curve_manifest(X.topology()).curves, workers);
}

} // namespace conelength
