#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "groups.hpp"

namespace wreathlab {

/// Restricted wreath product A wr B: finitely supported maps B -> A with B
/// acting by left translation, (b.f)(x) = f(b^-1 x).
struct WreathProduct {
    GroupPtr base;  // A
    GroupPtr act;   // B
    bool abelian_base;
    std::string label;

    static std::shared_ptr<const WreathProduct> make(GroupPtr a, GroupPtr b) {
        auto w = std::make_shared<WreathProduct>();
        w->abelian_base = a->abelian();
        w->label = "(" + a->label + ")wr(" + b->label + ")";
        w->base = std::move(a);
        w->act = std::move(b);
        return w;
    }

    bool finite() const { return base->finite() && act->finite(); }

    std::uint64_t order() const {
        std::uint64_t o = 1;
        std::uint64_t a = base->order();
        for (std::uint64_t i = 0; i < act->order(); ++i) o *= a;
        return o * act->order();
    }
};

using WreathPtr = std::shared_ptr<const WreathProduct>;

inline bool same_wreath(const WreathPtr& u, const WreathPtr& v) {
    if (u == v) return true;
    return same_descriptor(u->base, v->base) && same_descriptor(u->act, v->act);
}

/// Finitely supported base map, kept sorted by canonical B-key with no
/// identity values stored.
using BaseMap = std::vector<std::pair<GroupElement, GroupElement>>;

struct WreathElement {
    WreathPtr owner;
    BaseMap base;       // sorted, support exact
    GroupElement top;

    bool operator==(const WreathElement& o) const {
        if (!(top == o.top) || base.size() != o.base.size()) return false;
        for (std::size_t i = 0; i < base.size(); ++i)
            if (!(base[i].first == o.base[i].first) || !(base[i].second == o.base[i].second))
                return false;
        return true;
    }
    bool operator!=(const WreathElement& o) const { return !(*this == o); }
};

namespace detail {

inline void normalize_base(const WreathPtr& w, BaseMap& f) {
    auto ida = identity(w->base);
    std::sort(f.begin(), f.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    BaseMap out;
    for (auto& kv : f) {
        if (!out.empty() && out.back().first == kv.first) {
            out.back().second = mul(out.back().second, kv.second);
        } else {
            out.push_back(std::move(kv));
        }
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [&](const auto& kv) { return kv.second == ida; }),
              out.end());
    f = std::move(out);
}

inline void check_wreath_owner(const WreathElement& x, const WreathElement& y, const char* op) {
    if (!same_wreath(x.owner, y.owner))
        throw MixedOwnersError(std::string(op) + ": elements of different wreath products");
}

/// Flat integer key for hashing/ordering wreath elements.
inline std::vector<std::int64_t> wr_key(const WreathElement& x) {
    std::vector<std::int64_t> k;
    k.reserve(x.top.payload.size() + 1 + x.base.size() * 4);
    k.insert(k.end(), x.top.payload.begin(), x.top.payload.end());
    k.push_back(static_cast<std::int64_t>(x.base.size()));
    for (const auto& kv : x.base) {
        k.insert(k.end(), kv.first.payload.begin(), kv.first.payload.end());
        k.insert(k.end(), kv.second.payload.begin(), kv.second.payload.end());
    }
    return k;
}

} // namespace detail

inline WreathElement make_wreath(const WreathPtr& w, BaseMap f, GroupElement top) {
    detail::normalize_base(w, f);
    return WreathElement{w, std::move(f), std::move(top)};
}

inline WreathElement wr_identity(const WreathPtr& w) {
    return WreathElement{w, {}, identity(w->act)};
}

inline bool wr_is_identity(const WreathElement& x) {
    return x.base.empty() && is_identity(x.top);
}

inline GroupElement base_value(const WreathElement& x, const GroupElement& at) {
    for (const auto& kv : x.base)
        if (kv.first == at) return kv.second;
    return identity(x.owner->base);
}

inline GroupElement base_value(const WreathPtr& w, const BaseMap& f, const GroupElement& at) {
    for (const auto& kv : f)
        if (kv.first == at) return kv.second;
    return identity(w->base);
}

/// (f, b)(g, c) = (f * (b.g), bc) with (b.g)(x) = g(b^-1 x).
inline WreathElement wr_mul(const WreathElement& x, const WreathElement& y) {
    detail::check_wreath_owner(x, y, "wr_mul");
    BaseMap f = x.base;
    for (const auto& kv : y.base)
        f.emplace_back(mul(x.top, kv.first), kv.second);
    return make_wreath(x.owner, std::move(f), mul(x.top, y.top));
}

/// (f, b)^-1 = (b^-1 . f^-1, b^-1).
inline WreathElement wr_inv(const WreathElement& x) {
    auto bi = inv(x.top);
    BaseMap f;
    f.reserve(x.base.size());
    for (const auto& kv : x.base)
        f.emplace_back(mul(bi, kv.first), inv(kv.second));
    return make_wreath(x.owner, std::move(f), std::move(bi));
}

/// w x w^-1.
inline WreathElement wr_conj(const WreathElement& x, const WreathElement& w) {
    return wr_mul(wr_mul(w, x), wr_inv(w));
}

inline WreathElement wr_commutator(const WreathElement& x, const WreathElement& y) {
    return wr_mul(wr_mul(x, y), wr_mul(wr_inv(x), wr_inv(y)));
}

/// Support translated by c: keys c*s, values unchanged.
inline BaseMap translate_base(const WreathPtr& w, const BaseMap& f, const GroupElement& c) {
    BaseMap out;
    out.reserve(f.size());
    for (const auto& kv : f) out.emplace_back(mul(c, kv.first), kv.second);
    detail::normalize_base(w, out);
    return out;
}

inline std::vector<GroupElement> support(const BaseMap& f) {
    std::vector<GroupElement> s;
    s.reserve(f.size());
    for (const auto& kv : f) s.push_back(kv.first);
    return s;
}

/// tilde(f, b, t) = product of f over the <b>-orbit through t.  Each orbit
/// point contributes once; for abelian A the value depends only on the coset
/// <b>t.
inline GroupElement tilde(const WreathPtr& w, const BaseMap& f, const GroupElement& b,
                          const GroupElement& t) {
    if (!w->abelian_base)
        throw NonAbelianBaseError("tilde requires an abelian base group");
    auto acc = identity(w->base);
    for (const auto& kv : f) {
        // s in <b>t  iff  s t^-1 in <b>
        if (cyclic_member(b, mul(kv.first, inv(t)))) acc = mul(acc, kv.second);
    }
    return acc;
}

namespace detail {

/// Partition of supp(f) into <b>-cosets; each part keeps support order.
inline std::vector<std::vector<std::size_t>> coset_partition(const BaseMap& f,
                                                             const GroupElement& b) {
    std::vector<std::vector<std::size_t>> parts;
    std::vector<bool> claimed(f.size(), false);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (claimed[i]) continue;
        std::vector<std::size_t> part{i};
        claimed[i] = true;
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            if (claimed[j]) continue;
            if (cyclic_member(b, mul(f[j].first, inv(f[i].first)))) {
                part.push_back(j);
                claimed[j] = true;
            }
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

} // namespace detail

/// f in K_b = {[h, b] : h in A^B} iff every <b>-coset product of f vanishes.
inline bool in_Kb(const WreathPtr& w, const BaseMap& f, const GroupElement& b) {
    if (!w->abelian_base)
        throw NonAbelianBaseError("in_Kb requires an abelian base group");
    auto ida = identity(w->base);
    for (const auto& part : detail::coset_partition(f, b)) {
        auto acc = ida;
        for (auto i : part) acc = mul(acc, f[i].second);
        if (!(acc == ida)) return false;
    }
    return true;
}

struct SupportReduction {
    BaseMap reduced;
    BaseMap conjugator;  // h in A^B with (h,1)(f,b)(h,1)^-1 = (reduced, b)
};

/// Folds same-coset support points onto the highest power of b, so the result
/// meets each <b>-coset at most once.  The fold step replaces values at a pair
/// s, s' = b^d s (d >= 1) by f(s') <- f(s') f(s), f(s) <- 1, realised by
/// conjugation with h supported on {b^l s : 0 <= l < d} with value f(s)^-1.
inline SupportReduction reduce_support_full(const WreathPtr& w, BaseMap f, const GroupElement& b) {
    if (!w->abelian_base)
        throw NonAbelianBaseError("reduce_support requires an abelian base group");
    BaseMap conjugator;
    auto ida = identity(w->base);
    while (true) {
        // deterministic pick: lowest-indexed support point with a same-coset
        // partner at the next higher exponent
        bool folded = false;
        auto parts = detail::coset_partition(f, b);
        for (auto& part : parts) {
            if (part.size() < 2) continue;
            // order the part by exponent relative to its first point
            std::vector<std::pair<std::int64_t, std::size_t>> exps;
            for (auto i : part) {
                auto k = cyclic_exponent(b, mul(f[i].first, inv(f[part[0]].first)));
                exps.emplace_back(*k, i);
            }
            std::sort(exps.begin(), exps.end());
            std::size_t lo = exps[0].second, hi = exps[1].second;
            std::int64_t d = exps[1].first - exps[0].first;  // >= 1: exponents are distinct
            auto s = f[lo].first;
            auto v = f[lo].second;
            // conjugator step h on {b^l s : 0 <= l < d} with value v^-1
            auto vi = inv(v);
            auto pt = s;
            for (std::int64_t l = 0; l < d; ++l) {
                conjugator.emplace_back(pt, vi);
                pt = mul(b, pt);
            }
            f[hi].second = mul(f[hi].second, v);
            f[lo].second = ida;
            detail::normalize_base(w, f);
            folded = true;
            break;
        }
        if (!folded) break;
    }
    detail::normalize_base(w, conjugator);
    return SupportReduction{std::move(f), std::move(conjugator)};
}

/// Representative of (f, b)^{A^B} whose support meets each <b>-coset at most once.
inline BaseMap reduce_support(const WreathPtr& w, const BaseMap& f, const GroupElement& b) {
    return reduce_support_full(w, f, b).reduced;
}

inline std::vector<WreathElement> wreath_generators(const WreathPtr& w) {
    std::vector<WreathElement> out;
    auto idb = identity(w->act);
    for (const auto& a : generators(w->base))
        out.push_back(make_wreath(w, {{idb, a}}, idb));
    for (const auto& b : generators(w->act))
        out.push_back(make_wreath(w, {}, b));
    return out;
}

/// BFS ball of radius n in the standard wreath generators, sorted canonically.
inline std::vector<WreathElement> wr_ball(const WreathPtr& w, std::uint64_t n,
                                          std::uint64_t cell_cap = default_cell_cap()) {
    std::vector<WreathElement> steps;
    for (const auto& g : wreath_generators(w)) {
        steps.push_back(g);
        auto gi = wr_inv(g);
        if (!(gi == g)) steps.push_back(std::move(gi));
    }
    auto id = wr_identity(w);
    std::unordered_set<std::vector<std::int64_t>, detail::VecHash> seen;
    seen.insert(detail::wr_key(id));
    std::vector<WreathElement> all{id};
    std::vector<WreathElement> frontier{id};
    for (std::uint64_t r = 1; r <= n; ++r) {
        std::vector<WreathElement> next;
        for (const auto& e : frontier) {
            for (const auto& s : steps) {
                auto x = wr_mul(e, s);
                if (seen.insert(detail::wr_key(x)).second) {
                    if (seen.size() > cell_cap)
                        throw CapExceededError("wr_ball(" + w->label + ") exceeds cell cap");
                    next.push_back(x);
                    all.push_back(std::move(x));
                }
            }
        }
        if (next.empty()) break;
        frontier = std::move(next);
    }
    std::sort(all.begin(), all.end(), [](const WreathElement& a, const WreathElement& b) {
        return detail::wr_key(a) < detail::wr_key(b);
    });
    return all;
}

/// Every element of a finite wreath product, sorted canonically.
inline std::vector<WreathElement> wr_all_elements(const WreathPtr& w,
                                                  std::uint64_t cell_cap = default_cell_cap()) {
    if (!w->finite()) throw NotFiniteError("wr_all_elements on infinite " + w->label);
    if (w->order() > cell_cap) throw CapExceededError("wr_all_elements exceeds cell cap");
    auto bs = all_elements(w->act);
    auto as = all_elements(w->base);
    std::vector<WreathElement> out;
    std::vector<std::size_t> idx(bs.size(), 0);
    while (true) {
        BaseMap f;
        for (std::size_t i = 0; i < bs.size(); ++i)
            f.emplace_back(bs[i], as[idx[i]]);
        for (const auto& top : bs) out.push_back(make_wreath(w, f, top));
        std::size_t i = 0;
        for (; i < idx.size(); ++i) {
            if (++idx[i] < as.size()) break;
            idx[i] = 0;
        }
        if (i == idx.size() || idx.empty()) break;
    }
    std::sort(out.begin(), out.end(), [](const WreathElement& a, const WreathElement& b) {
        return detail::wr_key(a) < detail::wr_key(b);
    });
    return out;
}

namespace detail {

inline std::uint64_t base_cost(const WreathElement& x, std::uint64_t radius_cap = 1u << 20) {
    std::uint64_t s = 0;
    for (const auto& kv : x.base) {
        auto l = word_length(kv.second, radius_cap);
        s += l ? *l : radius_cap;
    }
    return s;
}

inline std::uint64_t act_dist(const GroupElement& u, const GroupElement& v,
                              std::uint64_t radius_cap = 1u << 20) {
    auto l = word_length(mul(inv(u), v), radius_cap);
    return l ? *l : radius_cap;
}

} // namespace detail

/// Word length of a wreath element in the standard generators.  Exact for
/// B = Z (optimal left/right interval traversal); otherwise an upper-bound
/// proxy via nearest-neighbour traversal of the support.
inline std::uint64_t wr_norm(const WreathElement& x) {
    const auto& w = x.owner;
    if (wr_is_identity(x)) return 0;
    std::uint64_t lamps = detail::base_cost(x);
    if (w->act->kind == GroupKind::FreeAbelian && w->act->rank == 1) {
        std::int64_t d = x.top.payload[0];
        std::int64_t lo = std::min<std::int64_t>(0, d), hi = std::max<std::int64_t>(0, d);
        for (const auto& kv : x.base) {
            lo = std::min(lo, kv.first.payload[0]);
            hi = std::max(hi, kv.first.payload[0]);
        }
        std::uint64_t right_first = static_cast<std::uint64_t>(hi) + static_cast<std::uint64_t>(hi - lo) +
                                    static_cast<std::uint64_t>(d - lo);
        std::uint64_t left_first = static_cast<std::uint64_t>(-lo) + static_cast<std::uint64_t>(hi - lo) +
                                   static_cast<std::uint64_t>(hi - d);
        return lamps + std::min(right_first, left_first);
    }
    // proxy: greedy nearest-neighbour walk through the support, then to the top
    std::vector<GroupElement> todo = support(x.base);
    auto cur = identity(w->act);
    std::uint64_t walk = 0;
    while (!todo.empty()) {
        std::size_t best = 0;
        std::uint64_t bestd = detail::act_dist(cur, todo[0]);
        for (std::size_t i = 1; i < todo.size(); ++i) {
            std::uint64_t di = detail::act_dist(cur, todo[i]);
            if (di < bestd || (di == bestd && todo[i] < todo[best])) {
                best = i;
                bestd = di;
            }
        }
        walk += bestd;
        cur = todo[best];
        todo.erase(todo.begin() + best);
    }
    walk += detail::act_dist(cur, x.top);
    return lamps + walk;
}

inline std::string wreath_to_string(const WreathElement& x) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < x.base.size(); ++i) {
        if (i) os << ",";
        os << element_to_string(x.base[i].first) << ":" << element_to_string(x.base[i].second);
    }
    os << "}@" << element_to_string(x.top);
    return os.str();
}

} // namespace wreathlab
