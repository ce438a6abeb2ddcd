#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace wreathlab {

/// Ball-size cap used by BFS enumerations. WREATHLAB_MAX_CELLS overrides.
inline std::uint64_t default_cell_cap() {
    if (const char* env = std::getenv("WREATHLAB_MAX_CELLS")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
    }
    return 1'000'000;
}

enum class GroupKind {
    FiniteCyclic,
    FreeAbelian,
    FiniteAbelian,
    DirectProduct,
    HeisenbergZ,
    FiniteTable,
};

class GroupDescriptor;
using GroupPtr = std::shared_ptr<const GroupDescriptor>;

/// A concrete finitely generated group with canonical element coordinates.
/// Payloads are vectors of int64: residues for cyclic kinds, integer vectors
/// for Z^m, the (a,b,c) entries of a unitriangular matrix for HeisenbergZ,
/// a single table index for FiniteTable, and concatenated child payloads for
/// DirectProduct.
class GroupDescriptor {
public:
    GroupKind kind;
    std::uint64_t n = 0;                          // FiniteCyclic modulus / FiniteTable size
    std::uint64_t rank = 0;                       // FreeAbelian rank
    std::vector<std::uint64_t> factors;           // FiniteAbelian invariant factors d1|d2|...
    std::vector<GroupPtr> children;               // DirectProduct
    std::vector<std::size_t> child_offsets;       // payload offsets per child
    std::vector<std::vector<std::uint32_t>> table; // FiniteTable multiplication
    std::uint32_t table_identity = 0;
    std::vector<std::uint32_t> table_generators;
    std::string label;

    static GroupPtr finite_cyclic(std::uint64_t order) {
        if (order == 0) throw UnsupportedDescriptorError("finite cyclic group needs order >= 1");
        auto g = std::make_shared<GroupDescriptor>();
        g->kind = GroupKind::FiniteCyclic;
        g->n = order;
        g->label = "Z/" + std::to_string(order);
        return g;
    }

    static GroupPtr free_abelian(std::uint64_t m) {
        auto g = std::make_shared<GroupDescriptor>();
        g->kind = GroupKind::FreeAbelian;
        g->rank = m;
        g->label = (m == 1) ? "Z" : ("Z^" + std::to_string(m));
        return g;
    }

    static GroupPtr finite_abelian(std::vector<std::uint64_t> invariant_factors) {
        for (auto d : invariant_factors)
            if (d == 0) throw UnsupportedDescriptorError("finite abelian factors must be >= 1");
        auto g = std::make_shared<GroupDescriptor>();
        g->kind = GroupKind::FiniteAbelian;
        g->factors = std::move(invariant_factors);
        std::string l;
        for (std::size_t i = 0; i < g->factors.size(); ++i) {
            if (i) l += "x";
            l += "Z/" + std::to_string(g->factors[i]);
        }
        g->label = g->factors.empty() ? "1" : l;
        return g;
    }

    static GroupPtr direct_product(std::vector<GroupPtr> parts) {
        auto g = std::make_shared<GroupDescriptor>();
        g->kind = GroupKind::DirectProduct;
        g->children = std::move(parts);
        std::size_t off = 0;
        std::string l;
        for (std::size_t i = 0; i < g->children.size(); ++i) {
            g->child_offsets.push_back(off);
            off += g->children[i]->payload_size();
            if (i) l += "x";
            l += "(" + g->children[i]->label + ")";
        }
        g->child_offsets.push_back(off);
        g->label = l;
        return g;
    }

    static GroupPtr heisenberg() {
        auto g = std::make_shared<GroupDescriptor>();
        g->kind = GroupKind::HeisenbergZ;
        g->label = "H";
        return g;
    }

    static GroupPtr finite_table(std::string name,
                                 std::vector<std::vector<std::uint32_t>> mul_table,
                                 std::uint32_t identity_index,
                                 std::vector<std::uint32_t> generator_indices) {
        auto g = std::make_shared<GroupDescriptor>();
        g->kind = GroupKind::FiniteTable;
        g->n = mul_table.size();
        g->table = std::move(mul_table);
        g->table_identity = identity_index;
        g->table_generators = std::move(generator_indices);
        g->label = std::move(name);
        return g;
    }

    std::size_t payload_size() const {
        switch (kind) {
            case GroupKind::FiniteCyclic: return 1;
            case GroupKind::FreeAbelian: return rank;
            case GroupKind::FiniteAbelian: return factors.size();
            case GroupKind::DirectProduct: return child_offsets.back();
            case GroupKind::HeisenbergZ: return 3;
            case GroupKind::FiniteTable: return 1;
        }
        return 0;
    }

    bool finite() const {
        switch (kind) {
            case GroupKind::FiniteCyclic:
            case GroupKind::FiniteAbelian:
            case GroupKind::FiniteTable: return true;
            case GroupKind::FreeAbelian: return rank == 0;
            case GroupKind::HeisenbergZ: return false;
            case GroupKind::DirectProduct:
                return std::all_of(children.begin(), children.end(),
                                   [](const GroupPtr& c) { return c->finite(); });
        }
        return false;
    }

    std::uint64_t order() const {
        switch (kind) {
            case GroupKind::FiniteCyclic:
            case GroupKind::FiniteTable: return n;
            case GroupKind::FreeAbelian:
                if (rank == 0) return 1;
                throw NotFiniteError("order() on infinite group " + label);
            case GroupKind::FiniteAbelian: {
                std::uint64_t o = 1;
                for (auto d : factors) o *= d;
                return o;
            }
            case GroupKind::HeisenbergZ: throw NotFiniteError("order() on infinite group H");
            case GroupKind::DirectProduct: {
                std::uint64_t o = 1;
                for (const auto& c : children) o *= c->order();
                return o;
            }
        }
        return 0;
    }

    bool abelian() const {
        switch (kind) {
            case GroupKind::FiniteCyclic:
            case GroupKind::FreeAbelian:
            case GroupKind::FiniteAbelian: return true;
            case GroupKind::HeisenbergZ: return false;
            case GroupKind::DirectProduct:
                return std::all_of(children.begin(), children.end(),
                                   [](const GroupPtr& c) { return c->abelian(); });
            case GroupKind::FiniteTable:
                for (std::size_t i = 0; i < table.size(); ++i)
                    for (std::size_t j = i + 1; j < table.size(); ++j)
                        if (table[i][j] != table[j][i]) return false;
                return true;
        }
        return false;
    }
};

inline bool same_descriptor(const GroupDescriptor& a, const GroupDescriptor& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case GroupKind::FiniteCyclic: return a.n == b.n;
        case GroupKind::FreeAbelian: return a.rank == b.rank;
        case GroupKind::FiniteAbelian: return a.factors == b.factors;
        case GroupKind::HeisenbergZ: return true;
        case GroupKind::FiniteTable:
            return a.n == b.n && a.table == b.table && a.table_identity == b.table_identity;
        case GroupKind::DirectProduct: {
            if (a.children.size() != b.children.size()) return false;
            for (std::size_t i = 0; i < a.children.size(); ++i)
                if (!same_descriptor(*a.children[i], *b.children[i])) return false;
            return true;
        }
    }
    return false;
}

inline bool same_descriptor(const GroupPtr& a, const GroupPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return same_descriptor(*a, *b);
}

/// Element of a GroupDescriptor; payload is always in canonical form.
struct GroupElement {
    GroupPtr owner;
    std::vector<std::int64_t> payload;

    bool operator==(const GroupElement& other) const { return payload == other.payload; }
    bool operator!=(const GroupElement& other) const { return payload != other.payload; }
    bool operator<(const GroupElement& other) const { return payload < other.payload; }
};

namespace detail {

inline std::int64_t mod_reduce(std::int64_t v, std::uint64_t m) {
    auto mm = static_cast<std::int64_t>(m);
    std::int64_t r = v % mm;
    if (r < 0) r += mm;
    return r;
}

inline void check_owner(const GroupElement& g, const GroupElement& h, const char* op) {
    if (!same_descriptor(g.owner, h.owner))
        throw MixedOwnersError(std::string(op) + ": elements belong to different groups");
}

struct VecHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace detail

inline GroupElement make_element(const GroupPtr& desc, std::vector<std::int64_t> payload) {
    if (payload.size() != desc->payload_size())
        throw UnsupportedDescriptorError("payload size mismatch for " + desc->label);
    switch (desc->kind) {
        case GroupKind::FiniteCyclic:
            payload[0] = detail::mod_reduce(payload[0], desc->n);
            break;
        case GroupKind::FiniteAbelian:
            for (std::size_t i = 0; i < desc->factors.size(); ++i)
                payload[i] = detail::mod_reduce(payload[i], desc->factors[i]);
            break;
        case GroupKind::FiniteTable:
            if (payload[0] < 0 || payload[0] >= static_cast<std::int64_t>(desc->n))
                throw UnsupportedDescriptorError("table index out of range");
            break;
        case GroupKind::DirectProduct: {
            std::vector<std::int64_t> out;
            out.reserve(payload.size());
            for (std::size_t i = 0; i < desc->children.size(); ++i) {
                std::vector<std::int64_t> part(payload.begin() + desc->child_offsets[i],
                                               payload.begin() + desc->child_offsets[i + 1]);
                auto e = make_element(desc->children[i], std::move(part));
                out.insert(out.end(), e.payload.begin(), e.payload.end());
            }
            payload = std::move(out);
            break;
        }
        default:
            break;
    }
    return GroupElement{desc, std::move(payload)};
}

inline GroupElement identity(const GroupPtr& desc) {
    std::vector<std::int64_t> p(desc->payload_size(), 0);
    if (desc->kind == GroupKind::FiniteTable) p[0] = desc->table_identity;
    if (desc->kind == GroupKind::DirectProduct) {
        std::vector<std::int64_t> out;
        for (const auto& c : desc->children) {
            auto e = identity(c);
            out.insert(out.end(), e.payload.begin(), e.payload.end());
        }
        return GroupElement{desc, std::move(out)};
    }
    return GroupElement{desc, std::move(p)};
}

inline bool is_identity(const GroupElement& g) { return g == identity(g.owner); }

inline GroupElement mul(const GroupElement& g, const GroupElement& h) {
    detail::check_owner(g, h, "mul");
    const auto& d = *g.owner;
    std::vector<std::int64_t> p(d.payload_size());
    switch (d.kind) {
        case GroupKind::FiniteCyclic:
            p[0] = detail::mod_reduce(g.payload[0] + h.payload[0], d.n);
            break;
        case GroupKind::FreeAbelian:
            for (std::size_t i = 0; i < d.rank; ++i) p[i] = g.payload[i] + h.payload[i];
            break;
        case GroupKind::FiniteAbelian:
            for (std::size_t i = 0; i < d.factors.size(); ++i)
                p[i] = detail::mod_reduce(g.payload[i] + h.payload[i], d.factors[i]);
            break;
        case GroupKind::HeisenbergZ:
            // (a1,b1,c1)(a2,b2,c2) = (a1+a2, b1+b2, c1+c2+a1*b2)
            p[0] = g.payload[0] + h.payload[0];
            p[1] = g.payload[1] + h.payload[1];
            p[2] = g.payload[2] + h.payload[2] + g.payload[0] * h.payload[1];
            break;
        case GroupKind::FiniteTable:
            p[0] = d.table[g.payload[0]][h.payload[0]];
            break;
        case GroupKind::DirectProduct: {
            p.clear();
            for (std::size_t i = 0; i < d.children.size(); ++i) {
                GroupElement a{d.children[i],
                               {g.payload.begin() + d.child_offsets[i],
                                g.payload.begin() + d.child_offsets[i + 1]}};
                GroupElement b{d.children[i],
                               {h.payload.begin() + d.child_offsets[i],
                                h.payload.begin() + d.child_offsets[i + 1]}};
                auto e = mul(a, b);
                p.insert(p.end(), e.payload.begin(), e.payload.end());
            }
            break;
        }
    }
    return GroupElement{g.owner, std::move(p)};
}

inline GroupElement inv(const GroupElement& g) {
    const auto& d = *g.owner;
    std::vector<std::int64_t> p(d.payload_size());
    switch (d.kind) {
        case GroupKind::FiniteCyclic:
            p[0] = detail::mod_reduce(-g.payload[0], d.n);
            break;
        case GroupKind::FreeAbelian:
            for (std::size_t i = 0; i < d.rank; ++i) p[i] = -g.payload[i];
            break;
        case GroupKind::FiniteAbelian:
            for (std::size_t i = 0; i < d.factors.size(); ++i)
                p[i] = detail::mod_reduce(-g.payload[i], d.factors[i]);
            break;
        case GroupKind::HeisenbergZ:
            // (a,b,c)^-1 = (-a,-b,ab-c)
            p[0] = -g.payload[0];
            p[1] = -g.payload[1];
            p[2] = g.payload[0] * g.payload[1] - g.payload[2];
            break;
        case GroupKind::FiniteTable: {
            std::uint32_t gi = static_cast<std::uint32_t>(g.payload[0]);
            std::uint32_t found = d.table_identity;
            for (std::uint32_t j = 0; j < d.n; ++j)
                if (d.table[gi][j] == d.table_identity) { found = j; break; }
            p[0] = found;
            break;
        }
        case GroupKind::DirectProduct: {
            p.clear();
            for (std::size_t i = 0; i < d.children.size(); ++i) {
                GroupElement a{d.children[i],
                               {g.payload.begin() + d.child_offsets[i],
                                g.payload.begin() + d.child_offsets[i + 1]}};
                auto e = inv(a);
                p.insert(p.end(), e.payload.begin(), e.payload.end());
            }
            break;
        }
    }
    return GroupElement{g.owner, std::move(p)};
}

inline GroupElement conj(const GroupElement& g, const GroupElement& w) {
    return mul(mul(w, g), inv(w));
}

inline std::vector<GroupElement> generators(const GroupPtr& desc) {
    std::vector<GroupElement> out;
    const auto& d = *desc;
    switch (d.kind) {
        case GroupKind::FiniteCyclic:
            if (d.n > 1) out.push_back(make_element(desc, {1}));
            break;
        case GroupKind::FreeAbelian:
            for (std::size_t i = 0; i < d.rank; ++i) {
                std::vector<std::int64_t> p(d.rank, 0);
                p[i] = 1;
                out.push_back(make_element(desc, std::move(p)));
            }
            break;
        case GroupKind::FiniteAbelian:
            for (std::size_t i = 0; i < d.factors.size(); ++i) {
                if (d.factors[i] < 2) continue;
                std::vector<std::int64_t> p(d.factors.size(), 0);
                p[i] = 1;
                out.push_back(make_element(desc, std::move(p)));
            }
            break;
        case GroupKind::HeisenbergZ:
            out.push_back(make_element(desc, {1, 0, 0}));
            out.push_back(make_element(desc, {0, 1, 0}));
            break;
        case GroupKind::FiniteTable:
            for (auto gi : d.table_generators) out.push_back(make_element(desc, {static_cast<std::int64_t>(gi)}));
            break;
        case GroupKind::DirectProduct:
            for (std::size_t i = 0; i < d.children.size(); ++i) {
                for (const auto& cg : generators(d.children[i])) {
                    auto e = identity(desc);
                    std::copy(cg.payload.begin(), cg.payload.end(),
                              e.payload.begin() + d.child_offsets[i]);
                    out.push_back(std::move(e));
                }
            }
            break;
    }
    return out;
}

namespace detail {

inline std::vector<GroupElement> bfs_step_set(const GroupPtr& desc) {
    auto gens = generators(desc);
    std::vector<GroupElement> steps;
    for (const auto& g : gens) {
        steps.push_back(g);
        auto gi = inv(g);
        if (!(gi == g)) steps.push_back(std::move(gi));
    }
    return steps;
}

// Geodesic length in the standard generators, when a closed form exists.
inline std::optional<std::uint64_t> closed_form_length(const GroupElement& g) {
    const auto& d = *g.owner;
    switch (d.kind) {
        case GroupKind::FiniteCyclic: {
            if (d.n <= 1) return 0;
            std::uint64_t r = static_cast<std::uint64_t>(g.payload[0]);
            return std::min<std::uint64_t>(r, d.n - r);
        }
        case GroupKind::FreeAbelian: {
            std::uint64_t s = 0;
            for (auto v : g.payload) s += static_cast<std::uint64_t>(v < 0 ? -v : v);
            return s;
        }
        case GroupKind::FiniteAbelian: {
            std::uint64_t s = 0;
            for (std::size_t i = 0; i < d.factors.size(); ++i) {
                std::uint64_t r = static_cast<std::uint64_t>(g.payload[i]);
                s += std::min<std::uint64_t>(r, d.factors[i] - r);
            }
            return s;
        }
        case GroupKind::DirectProduct: {
            std::uint64_t s = 0;
            for (std::size_t i = 0; i < d.children.size(); ++i) {
                GroupElement a{d.children[i],
                               {g.payload.begin() + d.child_offsets[i],
                                g.payload.begin() + d.child_offsets[i + 1]}};
                auto part = closed_form_length(a);
                if (!part) return std::nullopt;
                s += *part;
            }
            return s;
        }
        default:
            return std::nullopt;
    }
}

} // namespace detail

/// Exact geodesic word length (BFS semantics) up to radius_cap; nullopt = Unknown.
inline std::optional<std::uint64_t> word_length(const GroupElement& g,
                                                std::uint64_t radius_cap,
                                                std::uint64_t cell_cap = default_cell_cap()) {
    if (auto cf = detail::closed_form_length(g)) {
        if (*cf <= radius_cap) return cf;
        return std::nullopt;
    }
    auto id = identity(g.owner);
    if (g == id) return 0;
    auto steps = detail::bfs_step_set(g.owner);
    std::unordered_set<std::vector<std::int64_t>, detail::VecHash> seen;
    seen.insert(id.payload);
    std::vector<GroupElement> frontier{id};
    for (std::uint64_t r = 1; r <= radius_cap; ++r) {
        std::vector<GroupElement> next;
        for (const auto& e : frontier) {
            for (const auto& s : steps) {
                auto x = mul(e, s);
                if (x == g) return r;
                if (seen.insert(x.payload).second) next.push_back(std::move(x));
            }
        }
        if (seen.size() > cell_cap) return std::nullopt;
        if (next.empty()) break;
        frontier = std::move(next);
    }
    return std::nullopt;
}

/// Elements of word length <= n, sorted by canonical payload.
inline std::vector<GroupElement> ball(const GroupPtr& desc, std::uint64_t n,
                                      std::uint64_t cell_cap = default_cell_cap()) {
    auto steps = detail::bfs_step_set(desc);
    auto id = identity(desc);
    std::unordered_set<std::vector<std::int64_t>, detail::VecHash> seen;
    seen.insert(id.payload);
    std::vector<GroupElement> all{id};
    std::vector<GroupElement> frontier{id};
    for (std::uint64_t r = 1; r <= n; ++r) {
        std::vector<GroupElement> next;
        for (const auto& e : frontier) {
            for (const auto& s : steps) {
                auto x = mul(e, s);
                if (seen.insert(x.payload).second) {
                    if (seen.size() > cell_cap)
                        throw CapExceededError("ball(" + desc->label + ", " + std::to_string(n) +
                                               ") exceeds cell cap");
                    next.push_back(x);
                    all.push_back(std::move(x));
                }
            }
        }
        if (next.empty()) break;
        frontier = std::move(next);
    }
    std::sort(all.begin(), all.end());
    return all;
}

/// All elements of a finite group, sorted by canonical payload.
inline std::vector<GroupElement> all_elements(const GroupPtr& desc,
                                              std::uint64_t cell_cap = default_cell_cap()) {
    if (!desc->finite()) throw NotFiniteError("all_elements on infinite group " + desc->label);
    std::uint64_t o = desc->order();
    if (o > cell_cap) throw CapExceededError("all_elements exceeds cell cap");
    // Direct mixed-radix enumeration keeps this independent of generating sets.
    switch (desc->kind) {
        case GroupKind::FiniteCyclic: {
            std::vector<GroupElement> out;
            for (std::uint64_t r = 0; r < desc->n; ++r)
                out.push_back(make_element(desc, {static_cast<std::int64_t>(r)}));
            return out;
        }
        case GroupKind::FiniteTable: {
            std::vector<GroupElement> out;
            for (std::uint64_t r = 0; r < desc->n; ++r)
                out.push_back(make_element(desc, {static_cast<std::int64_t>(r)}));
            return out;
        }
        case GroupKind::FiniteAbelian: {
            std::vector<GroupElement> out;
            std::vector<std::int64_t> p(desc->factors.size(), 0);
            while (true) {
                out.push_back(make_element(desc, p));
                std::size_t i = 0;
                for (; i < p.size(); ++i) {
                    if (++p[i] < static_cast<std::int64_t>(desc->factors[i])) break;
                    p[i] = 0;
                }
                if (i == p.size()) break;
                if (p.empty()) break;
            }
            std::sort(out.begin(), out.end());
            return out;
        }
        case GroupKind::FreeAbelian: // rank 0 only
            return {identity(desc)};
        case GroupKind::DirectProduct: {
            std::vector<std::vector<GroupElement>> parts;
            for (const auto& c : desc->children) parts.push_back(all_elements(c, cell_cap));
            std::vector<GroupElement> out;
            std::vector<std::size_t> idx(parts.size(), 0);
            while (true) {
                std::vector<std::int64_t> p;
                for (std::size_t i = 0; i < parts.size(); ++i)
                    p.insert(p.end(), parts[i][idx[i]].payload.begin(), parts[i][idx[i]].payload.end());
                out.push_back(GroupElement{desc, std::move(p)});
                std::size_t i = 0;
                for (; i < idx.size(); ++i) {
                    if (++idx[i] < parts[i].size()) break;
                    idx[i] = 0;
                }
                if (i == idx.size() || idx.empty()) break;
            }
            std::sort(out.begin(), out.end());
            return out;
        }
        default:
            throw UnsupportedDescriptorError("all_elements: " + desc->label);
    }
}

inline bool centralizer_contains(const GroupElement& b, const GroupElement& c) {
    detail::check_owner(b, c, "centralizer_contains");
    return mul(c, b) == mul(b, c);
}

/// nullopt = infinite order.
inline std::optional<std::uint64_t> element_order(const GroupElement& g) {
    const auto& d = *g.owner;
    switch (d.kind) {
        case GroupKind::FreeAbelian:
        case GroupKind::HeisenbergZ:
            return is_identity(g) ? std::optional<std::uint64_t>(1) : std::nullopt;
        case GroupKind::DirectProduct: {
            std::uint64_t l = 1;
            for (std::size_t i = 0; i < d.children.size(); ++i) {
                GroupElement a{d.children[i],
                               {g.payload.begin() + d.child_offsets[i],
                                g.payload.begin() + d.child_offsets[i + 1]}};
                auto o = element_order(a);
                if (!o) return std::nullopt;
                l = std::lcm(l, *o);
            }
            return l;
        }
        default: {
            auto id = identity(g.owner);
            auto p = g;
            std::uint64_t k = 1;
            while (!(p == id)) {
                p = mul(p, g);
                ++k;
            }
            return k;
        }
    }
}

namespace detail {

// Solutions k of b^k = x, as a constraint on k.
struct ExpConstraint {
    enum Kind { None, Any, Exact, Mod } kind = None;
    std::int64_t k = 0;  // Exact value or Mod residue
    std::int64_t m = 0;  // Mod modulus

    static ExpConstraint none() { return {None, 0, 0}; }
    static ExpConstraint any() { return {Any, 0, 0}; }
    static ExpConstraint exact(std::int64_t k) { return {Exact, k, 0}; }
    static ExpConstraint mod(std::int64_t r, std::int64_t m) { return {Mod, r, m}; }
};

inline ExpConstraint merge_constraints(const ExpConstraint& a, const ExpConstraint& b) {
    if (a.kind == ExpConstraint::None || b.kind == ExpConstraint::None) return ExpConstraint::none();
    if (a.kind == ExpConstraint::Any) return b;
    if (b.kind == ExpConstraint::Any) return a;
    if (a.kind == ExpConstraint::Exact && b.kind == ExpConstraint::Exact)
        return a.k == b.k ? a : ExpConstraint::none();
    if (a.kind == ExpConstraint::Exact)
        return mod_reduce(a.k, static_cast<std::uint64_t>(b.m)) == mod_reduce(b.k, static_cast<std::uint64_t>(b.m))
                   ? a
                   : ExpConstraint::none();
    if (b.kind == ExpConstraint::Exact) return merge_constraints(b, a);
    // Mod & Mod: CRT with possibly non-coprime moduli.
    std::int64_t g = std::gcd(a.m, b.m);
    if (mod_reduce(a.k - b.k, static_cast<std::uint64_t>(g)) != 0) return ExpConstraint::none();
    std::int64_t l = a.m / g * b.m;
    // scan residues of a; moduli here are small (element orders of desk-scale groups)
    for (std::int64_t r = mod_reduce(a.k, static_cast<std::uint64_t>(a.m)); r < l; r += a.m)
        if (mod_reduce(r, static_cast<std::uint64_t>(b.m)) == mod_reduce(b.k, static_cast<std::uint64_t>(b.m)))
            return ExpConstraint::mod(r, l);
    return ExpConstraint::none();
}

inline ExpConstraint solve_exponent(const GroupElement& b, const GroupElement& x) {
    const auto& d = *b.owner;
    switch (d.kind) {
        case GroupKind::FreeAbelian: {
            bool bzero = is_identity(b);
            if (bzero) return is_identity(x) ? ExpConstraint::any() : ExpConstraint::none();
            std::size_t i0 = 0;
            while (b.payload[i0] == 0) ++i0;
            if (x.payload[i0] % b.payload[i0] != 0) return ExpConstraint::none();
            std::int64_t k = x.payload[i0] / b.payload[i0];
            for (std::size_t i = 0; i < d.rank; ++i)
                if (x.payload[i] != k * b.payload[i]) return ExpConstraint::none();
            return ExpConstraint::exact(k);
        }
        case GroupKind::HeisenbergZ: {
            std::int64_t al = b.payload[0], be = b.payload[1], ga = b.payload[2];
            std::int64_t xa = x.payload[0], xb = x.payload[1], xc = x.payload[2];
            auto check_k = [&](std::int64_t k) {
                // b^k = (k*al, k*be, k*ga + k(k-1)/2 * al*be)
                std::int64_t c = k * ga + (k * (k - 1) / 2) * al * be;
                return xa == k * al && xb == k * be && xc == c;
            };
            if (al == 0 && be == 0 && ga == 0)
                return is_identity(x) ? ExpConstraint::any() : ExpConstraint::none();
            std::int64_t k;
            if (al != 0) {
                if (xa % al != 0) return ExpConstraint::none();
                k = xa / al;
            } else if (be != 0) {
                if (xb % be != 0) return ExpConstraint::none();
                k = xb / be;
            } else {
                if (xc % ga != 0) return ExpConstraint::none();
                k = xc / ga;
            }
            return check_k(k) ? ExpConstraint::exact(k) : ExpConstraint::none();
        }
        case GroupKind::DirectProduct: {
            ExpConstraint acc = ExpConstraint::any();
            for (std::size_t i = 0; i < d.children.size(); ++i) {
                GroupElement bc{d.children[i],
                                {b.payload.begin() + d.child_offsets[i],
                                 b.payload.begin() + d.child_offsets[i + 1]}};
                GroupElement xc{d.children[i],
                                {x.payload.begin() + d.child_offsets[i],
                                 x.payload.begin() + d.child_offsets[i + 1]}};
                acc = merge_constraints(acc, solve_exponent(bc, xc));
                if (acc.kind == ExpConstraint::None) return acc;
            }
            return acc;
        }
        default: {
            // finite cyclic / finite abelian / table: walk the cycle of b
            auto ord = element_order(b);
            auto p = identity(b.owner);
            for (std::uint64_t k = 0; k < *ord; ++k) {
                if (p == x) return ExpConstraint::mod(static_cast<std::int64_t>(k),
                                                      static_cast<std::int64_t>(*ord));
                p = mul(p, b);
            }
            return ExpConstraint::none();
        }
    }
}

} // namespace detail

/// x in <b> (powers of b, including negative ones).
inline bool cyclic_member(const GroupElement& b, const GroupElement& x) {
    detail::check_owner(b, x, "cyclic_member");
    return detail::solve_exponent(b, x).kind != detail::ExpConstraint::None;
}

/// Some exponent k with b^k = x, if one exists.
inline std::optional<std::int64_t> cyclic_exponent(const GroupElement& b, const GroupElement& x) {
    auto c = detail::solve_exponent(b, x);
    switch (c.kind) {
        case detail::ExpConstraint::None: return std::nullopt;
        case detail::ExpConstraint::Any: return 0;
        default: return c.k;
    }
}

/// Exact conjugacy decision inside a single group descriptor.
inline bool conjugate_in_group(const GroupElement& g, const GroupElement& h) {
    detail::check_owner(g, h, "conjugate_in_group");
    const auto& d = *g.owner;
    if (d.abelian()) return g == h;
    switch (d.kind) {
        case GroupKind::HeisenbergZ: {
            // w (a,b,c) w^-1 = (a, b, c + x*b - y*a) over all integers x, y.
            if (g.payload[0] != h.payload[0] || g.payload[1] != h.payload[1]) return false;
            std::int64_t gcd = std::gcd(g.payload[0], g.payload[1]);
            std::int64_t diff = h.payload[2] - g.payload[2];
            if (gcd == 0) return diff == 0;
            return diff % gcd == 0;
        }
        case GroupKind::FiniteTable: {
            for (std::uint64_t t = 0; t < d.n; ++t) {
                auto w = make_element(g.owner, {static_cast<std::int64_t>(t)});
                if (conj(g, w) == h) return true;
            }
            return false;
        }
        case GroupKind::DirectProduct: {
            for (std::size_t i = 0; i < d.children.size(); ++i) {
                GroupElement a{d.children[i],
                               {g.payload.begin() + d.child_offsets[i],
                                g.payload.begin() + d.child_offsets[i + 1]}};
                GroupElement b{d.children[i],
                               {h.payload.begin() + d.child_offsets[i],
                                h.payload.begin() + d.child_offsets[i + 1]}};
                if (!conjugate_in_group(a, b)) return false;
            }
            return true;
        }
        default:
            return g == h;
    }
}

inline std::string element_to_string(const GroupElement& g) {
    const auto& d = *g.owner;
    std::ostringstream os;
    switch (d.kind) {
        case GroupKind::FiniteCyclic:
        case GroupKind::FiniteTable:
            os << g.payload[0];
            break;
        case GroupKind::FreeAbelian:
            if (d.rank == 1) {
                os << g.payload[0];
            } else {
                os << "(";
                for (std::size_t i = 0; i < d.rank; ++i) {
                    if (i) os << ",";
                    os << g.payload[i];
                }
                os << ")";
            }
            break;
        case GroupKind::FiniteAbelian:
            if (d.factors.size() == 1) {
                os << g.payload[0];
            } else {
                os << "(";
                for (std::size_t i = 0; i < g.payload.size(); ++i) {
                    if (i) os << ",";
                    os << g.payload[i];
                }
                os << ")";
            }
            break;
        case GroupKind::HeisenbergZ:
            os << "H(" << g.payload[0] << "," << g.payload[1] << "," << g.payload[2] << ")";
            break;
        case GroupKind::DirectProduct:
            os << "(";
            for (std::size_t i = 0; i < g.payload.size(); ++i) {
                if (i) os << ",";
                os << g.payload[i];
            }
            os << ")";
            break;
    }
    return os.str();
}

} // namespace wreathlab
