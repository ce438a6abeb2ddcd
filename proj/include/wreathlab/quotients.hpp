#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wreath.hpp"

namespace wreathlab {

/// Extension-closed pseudovariety used for separation: all finite groups, or
/// all finite p-groups.
struct CoCFamily {
    enum class Kind { AllFinite, PGroups } kind = Kind::AllFinite;
    std::uint64_t p = 0;

    static CoCFamily all() { return {Kind::AllFinite, 0}; }
    static CoCFamily pgroups(std::uint64_t prime) { return {Kind::PGroups, prime}; }

    bool admits_index(std::uint64_t idx) const {
        if (kind == Kind::AllFinite) return true;
        while (idx % p == 0) idx /= p;
        return idx == 1;
    }

    std::string label() const {
        return kind == Kind::AllFinite ? "all" : ("p" + std::to_string(p));
    }
};

/// Surjection of a group onto a finite group in the family, with index and
/// kernel-membership test.
class QuotientMap {
public:
    QuotientMap(GroupPtr source, GroupPtr target, std::uint64_t index, std::string label,
                std::function<GroupElement(const GroupElement&)> apply)
        : source_(std::move(source)),
          target_(std::move(target)),
          index_(index),
          label_(std::move(label)),
          apply_(std::move(apply)) {}

    const GroupPtr& source() const { return source_; }
    const GroupPtr& target() const { return target_; }
    std::uint64_t index() const { return index_; }
    const std::string& label() const { return label_; }

    GroupElement apply(const GroupElement& g) const {
        if (!same_descriptor(g.owner, source_))
            throw MixedOwnersError("QuotientMap::apply: element not in source group");
        return apply_(g);
    }

    bool in_kernel(const GroupElement& g) const { return is_identity(apply(g)); }

    /// Z -> Z/m.
    static QuotientMap mod_quotient(const GroupPtr& z, std::uint64_t m) {
        auto target = GroupDescriptor::finite_cyclic(m);
        return QuotientMap(z, target, m, "Z/" + std::to_string(m),
                           [target](const GroupElement& g) {
                               return make_element(target, {g.payload[0]});
                           });
    }

    /// Z/n -> Z/d for d | n.
    static QuotientMap divisor_quotient(const GroupPtr& zn, std::uint64_t d) {
        auto target = GroupDescriptor::finite_cyclic(d);
        std::string label = zn->label + "->Z/" + std::to_string(d);
        return QuotientMap(zn, target, d, label, [target](const GroupElement& g) {
            return make_element(target, {g.payload[0]});
        });
    }

    /// Z^m -> Z^m / L for a full-rank sublattice L given by an upper
    /// triangular column-HNF basis (columns generate L, 0 <= h[i][j] < h[i][i]
    /// for j > i).  Cosets are represented by the box of HNF-reduced vectors.
    static QuotientMap lattice_quotient(const GroupPtr& zm,
                                        const std::vector<std::vector<std::int64_t>>& hnf) {
        std::size_t m = zm->rank;
        std::uint64_t index = 1;
        for (std::size_t i = 0; i < m; ++i) index *= static_cast<std::uint64_t>(hnf[i][i]);

        auto reduce = [hnf, m](std::vector<std::int64_t> x) {
            for (std::size_t ii = m; ii-- > 0;) {
                std::int64_t d = hnf[ii][ii];
                std::int64_t k = x[ii] >= 0 ? x[ii] / d : -((-x[ii] + d - 1) / d);
                for (std::size_t r = 0; r <= ii; ++r) x[r] -= k * hnf[r][ii];
            }
            return x;
        };

        // enumerate canonical representatives (the HNF box) in sorted order
        std::vector<std::vector<std::int64_t>> reps;
        std::vector<std::int64_t> cur(m, 0);
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == m) {
                reps.push_back(cur);
                return;
            }
            for (std::int64_t v = 0; v < hnf[i][i]; ++v) {
                cur[i] = v;
                rec(i + 1);
            }
            cur[i] = 0;
        };
        rec(0);
        std::sort(reps.begin(), reps.end());
        std::map<std::vector<std::int64_t>, std::uint32_t> rep_index;
        for (std::size_t i = 0; i < reps.size(); ++i) rep_index[reps[i]] = static_cast<std::uint32_t>(i);

        std::vector<std::vector<std::uint32_t>> table(reps.size(),
                                                      std::vector<std::uint32_t>(reps.size()));
        for (std::size_t i = 0; i < reps.size(); ++i) {
            for (std::size_t j = 0; j < reps.size(); ++j) {
                std::vector<std::int64_t> s(m);
                for (std::size_t r = 0; r < m; ++r) s[r] = reps[i][r] + reps[j][r];
                table[i][j] = rep_index.at(reduce(std::move(s)));
            }
        }
        std::uint32_t id_idx = rep_index.at(std::vector<std::int64_t>(m, 0));
        std::vector<std::uint32_t> gens;
        for (std::size_t r = 0; r < m; ++r) {
            std::vector<std::int64_t> e(m, 0);
            e[r] = 1;
            std::uint32_t gi = rep_index.at(reduce(std::move(e)));
            if (gi != id_idx) gens.push_back(gi);
        }
        std::sort(gens.begin(), gens.end());
        gens.erase(std::unique(gens.begin(), gens.end()), gens.end());

        std::ostringstream lbl;
        lbl << zm->label << "/[";
        for (std::size_t i = 0; i < m; ++i) {
            if (i) lbl << ",";
            lbl << "[";
            for (std::size_t j = 0; j < m; ++j) {
                if (j) lbl << ",";
                lbl << hnf[i][j];
            }
            lbl << "]";
        }
        lbl << "]";
        auto target = GroupDescriptor::finite_table(lbl.str(), std::move(table), id_idx, gens);
        auto lookup = std::make_shared<std::map<std::vector<std::int64_t>, std::uint32_t>>(
            std::move(rep_index));
        return QuotientMap(zm, target, index, lbl.str(),
                           [target, reduce, lookup](const GroupElement& g) {
                               return make_element(
                                   target, {static_cast<std::int64_t>(lookup->at(reduce(g.payload)))});
                           });
    }

    /// HeisenbergZ -> H(Z/k), entries reduced mod k.
    static QuotientMap congruence_quotient(const GroupPtr& h, std::uint64_t k) {
        std::string lbl = "H(Z/" + std::to_string(k) + ")";
        std::uint64_t index = k * k * k;
        // reps (a,b,c) with each entry in [0,k)
        std::vector<std::vector<std::int64_t>> reps;
        for (std::int64_t a = 0; a < static_cast<std::int64_t>(k); ++a)
            for (std::int64_t b = 0; b < static_cast<std::int64_t>(k); ++b)
                for (std::int64_t c = 0; c < static_cast<std::int64_t>(k); ++c)
                    reps.push_back({a, b, c});
        std::sort(reps.begin(), reps.end());
        std::map<std::vector<std::int64_t>, std::uint32_t> rep_index;
        for (std::size_t i = 0; i < reps.size(); ++i) rep_index[reps[i]] = static_cast<std::uint32_t>(i);
        auto reduce = [k](const std::vector<std::int64_t>& x) {
            std::vector<std::int64_t> r(3);
            for (int i = 0; i < 3; ++i) r[i] = detail::mod_reduce(x[i], k);
            return r;
        };
        std::vector<std::vector<std::uint32_t>> table(reps.size(),
                                                      std::vector<std::uint32_t>(reps.size()));
        for (std::size_t i = 0; i < reps.size(); ++i) {
            for (std::size_t j = 0; j < reps.size(); ++j) {
                const auto &x = reps[i], &y = reps[j];
                std::vector<std::int64_t> p{x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]};
                table[i][j] = rep_index.at(reduce(p));
            }
        }
        std::uint32_t id_idx = rep_index.at(std::vector<std::int64_t>{0, 0, 0});
        std::vector<std::uint32_t> gens;
        if (k > 1) {
            gens.push_back(rep_index.at(std::vector<std::int64_t>{1, 0, 0}));
            gens.push_back(rep_index.at(std::vector<std::int64_t>{0, 1, 0}));
        }
        auto target = GroupDescriptor::finite_table(lbl, std::move(table), id_idx, gens);
        auto lookup =
            std::make_shared<std::map<std::vector<std::int64_t>, std::uint32_t>>(std::move(rep_index));
        return QuotientMap(h, target, index, lbl,
                           [target, reduce, lookup](const GroupElement& g) {
                               return make_element(
                                   target, {static_cast<std::int64_t>(lookup->at(reduce(g.payload)))});
                           });
    }

    /// Finite G -> G/K for a subgroup K (G abelian, so K is normal).
    static QuotientMap subgroup_quotient(const GroupPtr& g,
                                         const std::vector<GroupElement>& kernel) {
        auto elems = all_elements(g);
        std::set<std::vector<std::int64_t>> ker;
        for (const auto& e : kernel) ker.insert(e.payload);
        // coset representative: minimal payload in e*K
        std::map<std::vector<std::int64_t>, std::vector<std::int64_t>> rep_of;
        std::vector<std::vector<std::int64_t>> reps;
        for (const auto& e : elems) {
            if (rep_of.count(e.payload)) continue;
            std::vector<std::vector<std::int64_t>> coset;
            for (const auto& k : kernel) coset.push_back(mul(e, k).payload);
            auto rep = *std::min_element(coset.begin(), coset.end());
            for (auto& c : coset) rep_of[c] = rep;
            reps.push_back(rep);
        }
        std::sort(reps.begin(), reps.end());
        std::map<std::vector<std::int64_t>, std::uint32_t> rep_index;
        for (std::size_t i = 0; i < reps.size(); ++i) rep_index[reps[i]] = static_cast<std::uint32_t>(i);

        std::vector<std::vector<std::uint32_t>> table(reps.size(),
                                                      std::vector<std::uint32_t>(reps.size()));
        for (std::size_t i = 0; i < reps.size(); ++i)
            for (std::size_t j = 0; j < reps.size(); ++j) {
                auto prod = mul(GroupElement{g, reps[i]}, GroupElement{g, reps[j]});
                table[i][j] = rep_index.at(rep_of.at(prod.payload));
            }
        std::uint32_t id_idx = rep_index.at(rep_of.at(identity(g).payload));
        std::vector<std::uint32_t> gens;
        for (const auto& s : generators(g)) {
            std::uint32_t gi = rep_index.at(rep_of.at(s.payload));
            if (gi != id_idx) gens.push_back(gi);
        }
        std::sort(gens.begin(), gens.end());
        gens.erase(std::unique(gens.begin(), gens.end()), gens.end());

        std::ostringstream lbl;
        lbl << g->label << "/{";
        bool first = true;
        for (const auto& k : ker) {
            if (!first) lbl << ",";
            first = false;
            lbl << element_to_string(GroupElement{g, k});
        }
        lbl << "}";
        std::uint64_t index = reps.size();
        auto target = GroupDescriptor::finite_table(lbl.str(), std::move(table), id_idx, gens);
        auto rep_lookup = std::make_shared<std::map<std::vector<std::int64_t>, std::vector<std::int64_t>>>(
            std::move(rep_of));
        auto idx_lookup =
            std::make_shared<std::map<std::vector<std::int64_t>, std::uint32_t>>(std::move(rep_index));
        return QuotientMap(g, target, index, lbl.str(),
                           [target, rep_lookup, idx_lookup](const GroupElement& e) {
                               return make_element(target, {static_cast<std::int64_t>(
                                                               idx_lookup->at(rep_lookup->at(e.payload)))});
                           });
    }

    /// G -> 1.
    static QuotientMap trivial_quotient(const GroupPtr& g) {
        auto target = GroupDescriptor::finite_cyclic(1);
        return QuotientMap(g, target, 1, g->label + "->1", [target](const GroupElement&) {
            return make_element(target, {0});
        });
    }

private:
    GroupPtr source_;
    GroupPtr target_;
    std::uint64_t index_;
    std::string label_;
    std::function<GroupElement(const GroupElement&)> apply_;
};

namespace detail {

inline std::vector<std::set<std::vector<std::int64_t>>> all_subgroups_finite_abelian(
    const GroupPtr& g) {
    auto elems = all_elements(g);
    auto closure = [&](std::set<std::vector<std::int64_t>> s) {
        std::vector<GroupElement> work;
        for (const auto& p : s) work.push_back(GroupElement{g, p});
        while (!work.empty()) {
            auto e = work.back();
            work.pop_back();
            for (auto it = s.begin(); it != s.end(); ++it) {
                auto prod = mul(e, GroupElement{g, *it});
                if (s.insert(prod.payload).second) work.push_back(prod);
            }
            auto e_inv = inv(e);
            if (s.insert(e_inv.payload).second) work.push_back(e_inv);
        }
        return s;
    };
    std::set<std::set<std::vector<std::int64_t>>> seen;
    std::vector<std::set<std::vector<std::int64_t>>> out;
    std::set<std::vector<std::int64_t>> trivial{identity(g).payload};
    seen.insert(trivial);
    out.push_back(trivial);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto current = out[i];
        for (const auto& e : elems) {
            if (current.count(e.payload)) continue;
            auto bigger = current;
            bigger.insert(e.payload);
            bigger = closure(std::move(bigger));
            if (seen.insert(bigger).second) out.push_back(std::move(bigger));
        }
    }
    return out;
}

inline void enumerate_hnf(std::uint64_t m, std::uint64_t max_index, const CoCFamily& family,
                          std::vector<std::vector<std::vector<std::int64_t>>>& out) {
    // upper triangular, positive diagonal, 0 <= h[i][j] < h[i][i] for j > i
    std::vector<std::vector<std::int64_t>> h(m, std::vector<std::int64_t>(m, 0));
    std::function<void(std::size_t, std::uint64_t)> pick_diag = [&](std::size_t i,
                                                                    std::uint64_t prod) {
        if (i == m) {
            if (!family.admits_index(prod)) return;
            // fill off-diagonal entries
            std::vector<std::pair<std::size_t, std::size_t>> slots;
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = r + 1; c < m; ++c) slots.emplace_back(r, c);
            std::function<void(std::size_t)> fill = [&](std::size_t s) {
                if (s == slots.size()) {
                    out.push_back(h);
                    return;
                }
                auto [r, c] = slots[s];
                for (std::int64_t v = 0; v < h[r][r]; ++v) {
                    h[r][c] = v;
                    fill(s + 1);
                }
                h[r][c] = 0;
            };
            fill(0);
            return;
        }
        for (std::uint64_t d = 1; prod * d <= max_index; ++d) {
            h[i][i] = static_cast<std::int64_t>(d);
            pick_diag(i + 1, prod * d);
        }
    };
    pick_diag(0, 1);
}

} // namespace detail

/// Finite quotients of desc in the family, nondecreasing index, deterministic
/// tie-break by label.
inline std::vector<QuotientMap> enumerate_coC(const GroupPtr& desc, const CoCFamily& family,
                                              std::uint64_t max_index) {
    std::vector<QuotientMap> out;
    switch (desc->kind) {
        case GroupKind::FreeAbelian: {
            if (desc->rank == 1) {
                for (std::uint64_t m = 1; m <= max_index; ++m)
                    if (family.admits_index(m)) out.push_back(QuotientMap::mod_quotient(desc, m));
            } else {
                std::vector<std::vector<std::vector<std::int64_t>>> hs;
                detail::enumerate_hnf(desc->rank, max_index, family, hs);
                for (const auto& h : hs) out.push_back(QuotientMap::lattice_quotient(desc, h));
            }
            break;
        }
        case GroupKind::FiniteCyclic: {
            for (std::uint64_t d = 1; d <= desc->n && d <= max_index; ++d)
                if (desc->n % d == 0 && family.admits_index(d))
                    out.push_back(QuotientMap::divisor_quotient(desc, d));
            break;
        }
        case GroupKind::FiniteAbelian:
        case GroupKind::DirectProduct: {
            if (!desc->finite() || !desc->abelian())
                throw UnsupportedDescriptorError("enumerate_coC: " + desc->label);
            std::uint64_t order = desc->order();
            for (const auto& sub : detail::all_subgroups_finite_abelian(desc)) {
                std::uint64_t index = order / sub.size();
                if (index > max_index || !family.admits_index(index)) continue;
                std::vector<GroupElement> kernel;
                for (const auto& p : sub) kernel.push_back(GroupElement{desc, p});
                out.push_back(QuotientMap::subgroup_quotient(desc, kernel));
            }
            break;
        }
        case GroupKind::HeisenbergZ: {
            for (std::uint64_t k = 1; k * k * k <= max_index; ++k)
                if (family.admits_index(k))
                    out.push_back(QuotientMap::congruence_quotient(desc, k));
            break;
        }
        default:
            throw UnsupportedDescriptorError("enumerate_coC: " + desc->label);
    }
    std::stable_sort(out.begin(), out.end(), [](const QuotientMap& a, const QuotientMap& b) {
        if (a.index() != b.index()) return a.index() < b.index();
        return a.label() < b.label();
    });
    return out;
}

/// Projection A wr B -> (A/M) wr (B/N) built from factor quotients: the base
/// image collects coset sums, the top maps through the B-quotient.
class WreathQuotientMap {
public:
    WreathQuotientMap(WreathPtr source, std::optional<QuotientMap> base_quot, QuotientMap act_quot)
        : source_(std::move(source)),
          base_quot_(std::move(base_quot)),
          act_quot_(std::move(act_quot)) {
        bool act_collapses = !source_->act->finite() ||
                             act_quot_.index() != source_->act->order();
        bool retraction = base_quot_ && base_quot_->index() == 1;
        if (!source_->abelian_base && act_collapses && !retraction)
            throw NonAbelianBaseError("wreath quotient needs an abelian base group");
        target_ = WreathProduct::make(base_quot_ ? base_quot_->target() : source_->base,
                                      act_quot_.target());
        if (retraction) {
            label_ = act_quot_.label();
        } else {
            label_ = target_->label;
        }
    }

    const WreathPtr& source() const { return source_; }
    const WreathPtr& target() const { return target_; }
    const QuotientMap& act_quot() const { return act_quot_; }
    const std::optional<QuotientMap>& base_quot() const { return base_quot_; }
    const std::string& label() const { return label_; }

    /// |A/M|^{|B/N|} * |B/N| when the target is finite.
    std::uint64_t index() const {
        std::uint64_t a = target_->base->order();
        std::uint64_t m = act_quot_.index();
        unsigned __int128 o = m;
        for (std::uint64_t i = 0; i < m; ++i) o *= a;
        return static_cast<std::uint64_t>(o);
    }

    WreathElement apply(const WreathElement& x) const {
        if (!same_wreath(x.owner, source_))
            throw MixedOwnersError("WreathQuotientMap::apply: wrong wreath product");
        BaseMap img;
        for (const auto& kv : x.base) {
            auto key = act_quot_.apply(kv.first);
            auto val = base_quot_ ? base_quot_->apply(kv.second) : kv.second;
            img.emplace_back(std::move(key), std::move(val));
        }
        return make_wreath(target_, std::move(img), act_quot_.apply(x.top));
    }

private:
    WreathPtr source_;
    std::optional<QuotientMap> base_quot_;
    QuotientMap act_quot_;
    WreathPtr target_;
    std::string label_;
};

/// Extension of a B-quotient to the whole wreath product: the base image at a
/// coset is the A-sum of f over that coset, the top maps through q.
inline WreathQuotientMap extend_quotient(const WreathPtr& w, const QuotientMap& q) {
    if (!w->abelian_base) throw NonAbelianBaseError("extend_quotient needs an abelian base");
    return WreathQuotientMap(w, std::nullopt, q);
}

/// Composite surjection onto (A/ker qA) wr (B/ker qB).
inline WreathQuotientMap product_quotient(const WreathPtr& w, const QuotientMap& qa,
                                          const QuotientMap& qb) {
    return WreathQuotientMap(w, qa, qb);
}

/// f lies in K_N = ker of the extension, i.e. every ker(q)-coset sum of f is
/// the A-identity.
inline bool in_KN(const WreathPtr& w, const QuotientMap& q, const BaseMap& f) {
    if (!w->abelian_base) throw NonAbelianBaseError("in_KN needs an abelian base");
    auto img = extend_quotient(w, q).apply(make_wreath(w, f, identity(w->act)));
    return img.base.empty();
}

/// Image coset equality of <q(b)> coincides with source coset equality of <b>
/// over all pairs from S.
inline bool separates_cosets(const QuotientMap& q, const GroupElement& b,
                             const std::vector<GroupElement>& s) {
    auto qb = q.apply(b);
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            bool src = cyclic_member(b, mul(inv(s[i]), s[j]));
            bool img = cyclic_member(qb, mul(inv(q.apply(s[i])), q.apply(s[j])));
            if (src != img) return false;
        }
    }
    return true;
}

inline bool injective_on_ball(const QuotientMap& q, std::uint64_t n,
                              std::uint64_t cell_cap = default_cell_cap()) {
    auto b = ball(q.source(), n, cell_cap);
    std::set<std::vector<std::int64_t>> images;
    for (const auto& e : b)
        if (!images.insert(q.apply(e).payload).second) return false;
    return true;
}

/// No element of the finite target translates image(S_f) onto image(S_g);
/// requires q to stay injective on S_f and S_g so supports survive intact.
inline bool separates_support_translation(const QuotientMap& q,
                                          const std::vector<GroupElement>& s_f,
                                          const std::vector<GroupElement>& s_g) {
    std::set<std::vector<std::int64_t>> union_img;
    std::set<std::vector<std::int64_t>> union_src;
    for (const auto& e : s_f) union_src.insert(e.payload);
    for (const auto& e : s_g) union_src.insert(e.payload);
    for (const auto& p : union_src)
        union_img.insert(q.apply(GroupElement{q.source(), p}).payload);
    if (union_img.size() != union_src.size()) return false;  // support points collide

    std::set<std::vector<std::int64_t>> img_f, img_g;
    for (const auto& e : s_f) img_f.insert(q.apply(e).payload);
    for (const auto& e : s_g) img_g.insert(q.apply(e).payload);
    for (const auto& t : all_elements(q.target())) {
        std::set<std::vector<std::int64_t>> shifted;
        for (const auto& p : img_f) shifted.insert(mul(t, GroupElement{q.target(), p}).payload);
        if (shifted == img_g) return false;
    }
    return true;
}

/// All wreath-shaped quotients (A/M) wr (B/N) of target order <= max_index,
/// sorted by (order, label).  Index-1 base quotients give the
/// retraction-composed B/N maps.
inline std::vector<WreathQuotientMap> wreath_quotient_stream(const WreathPtr& w,
                                                             const CoCFamily& family,
                                                             std::uint64_t max_index) {
    if (!w->abelian_base)
        throw NonAbelianBaseError("wreath_quotient_stream needs an abelian base");
    auto qbs = enumerate_coC(w->act, family, max_index);
    auto qas = enumerate_coC(w->base, family, max_index);
    auto target_order = [](std::uint64_t a, std::uint64_t m,
                           std::uint64_t cap) -> std::optional<std::uint64_t> {
        unsigned __int128 o = m;  // a^m * m
        for (std::uint64_t i = 0; i < m; ++i) {
            o *= a;
            if (o > cap) return std::nullopt;
        }
        return static_cast<std::uint64_t>(o);
    };
    std::vector<WreathQuotientMap> out;
    for (const auto& qb : qbs)
        for (const auto& qa : qas)
            if (target_order(qa.index(), qb.index(), max_index))
                out.emplace_back(w, qa, qb);
    std::stable_sort(out.begin(), out.end(),
                     [](const WreathQuotientMap& x, const WreathQuotientMap& y) {
                         if (x.index() != y.index()) return x.index() < y.index();
                         return x.label() < y.label();
                     });
    return out;
}

} // namespace wreathlab
