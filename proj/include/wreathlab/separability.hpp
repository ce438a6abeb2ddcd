#pragma once

#include <atomic>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "bignat.hpp"
#include "conjugacy.hpp"

namespace wreathlab {

/// Named depth bound formula.  The ThmB flavours take tabulated component
/// functions (measured or closed-form); nullopt from a component means
/// Unreached and makes the bound Undefined at that n.
struct BoundFormula {
    enum class Name { ThmB_finiteB, ThmB_infiniteA, ThmB_finiteA, ThmC_abelian, ThmC_nilpotent };
    using ComponentFn = std::function<std::optional<std::uint64_t>(std::uint64_t)>;

    Name name = Name::ThmC_abelian;
    bool finite_a = false;      // picks 2^... over n^... in the ThmC flavours
    std::uint64_t card_b = 1;   // ThmB_finiteB
    std::uint64_t nil_d = 2;    // ThmC_nilpotent exponent d
    ComponentFn conj_a, conj_b, cyclic_b, rg_b, short_b;
    std::uint64_t digit_cap = 100000;

    std::string label() const {
        switch (name) {
            case Name::ThmB_finiteB: return "thmb-finiteb";
            case Name::ThmB_infiniteA: return "thmb-infinitea";
            case Name::ThmB_finiteA: return "thmb-finitea";
            case Name::ThmC_abelian: return finite_a ? "thmc:2^(n^(n^2))" : "thmc:n^(n^(n^2))";
            case Name::ThmC_nilpotent:
                return (finite_a ? "thmc:2^(n^(n^" : "thmc:n^(n^(n^") + std::to_string(nil_d) + "))";
        }
        return "?";
    }
};

namespace detail {

inline BoundResult max_bound(BoundResult a, BoundResult b) {
    if (a.kind == BoundResult::Kind::Undefined || b.kind == BoundResult::Kind::Undefined)
        return BoundResult::undefined();
    if (a.kind == BoundResult::Kind::Overflow || b.kind == BoundResult::Kind::Overflow)
        return BoundResult::overflow();
    return BoundResult::of(a.value > b.value ? a.value : b.value);
}

} // namespace detail

/// Exact big-natural evaluation of the named bound at n >= 1.
inline BoundResult theorem_bound(const BoundFormula& f, std::uint64_t n) {
    if (n < 1) return BoundResult::undefined();
    switch (f.name) {
        case BoundFormula::Name::ThmC_abelian:
        case BoundFormula::Name::ThmC_nilpotent: {
            // n^(n^(n^d)) or 2^(n^(n^d)), d = 2 in the abelian flavour
            std::uint64_t d = f.name == BoundFormula::Name::ThmC_abelian ? 2 : f.nil_d;
            auto inner = pow_checked(BigNat(n), BigNat(d), f.digit_cap);  // n^d
            if (!inner.is_value()) return inner;
            auto mid = pow_checked(BigNat(n), inner.value, f.digit_cap);  // n^(n^d)
            if (!mid.is_value()) return mid;
            return pow_checked(BigNat(f.finite_a ? 2 : n), mid.value, f.digit_cap);
        }
        case BoundFormula::Name::ThmB_finiteB: {
            // (Conj_A(n))^(|B|^3)
            if (!f.conj_a) return BoundResult::undefined();
            auto ca = f.conj_a(n);
            if (!ca) return BoundResult::undefined();
            BigNat e = BigNat(f.card_b) * f.card_b * f.card_b;
            return pow_checked(BigNat(*ca), e, f.digit_cap);
        }
        case BoundFormula::Name::ThmB_infiniteA:
        case BoundFormula::Name::ThmB_finiteA: {
            // Phi(n) = Short_B(n) + n, Psi(n) = RG_B(Phi) * Cyclic_B(Phi)^(Phi^2)
            if (!f.short_b || !f.rg_b || !f.cyclic_b || !f.conj_b) return BoundResult::undefined();
            auto sb = f.short_b(n);
            if (!sb) return BoundResult::undefined();
            std::uint64_t phi = *sb + n;
            auto rg = f.rg_b(phi);
            auto cy = f.cyclic_b(phi);
            auto cb = f.conj_b(n);
            if (!rg || !cy || !cb) return BoundResult::undefined();
            auto cy_pow = pow_checked(BigNat(*cy), BigNat(phi) * phi, f.digit_cap);
            if (!cy_pow.is_value()) return cy_pow;
            BigNat psi = BigNat(*rg) * cy_pow.value;
            BoundResult right;
            if (f.name == BoundFormula::Name::ThmB_finiteA) {
                // Psi * 2^Psi
                auto p = pow_checked(BigNat(2), psi, f.digit_cap);
                if (!p.is_value()) return p;
                right = BoundResult::of(psi * p.value);
            } else {
                // (Psi * Conj_A(Psi * n))^(Psi^3)
                if (!f.conj_a) return BoundResult::undefined();
                BigNat arg = psi * n;
                if (arg > BigNat(std::numeric_limits<std::uint64_t>::max()))
                    return BoundResult::overflow();
                auto ca = f.conj_a(static_cast<std::uint64_t>(arg));
                if (!ca) return BoundResult::undefined();
                auto p = pow_checked(psi * *ca, psi * psi * psi, f.digit_cap);
                if (!p.is_value()) return p;
                right = p;
            }
            if (right.str().size() > f.digit_cap) return BoundResult::overflow();
            return detail::max_bound(BoundResult::of(BigNat(*cb)), right);
        }
    }
    return BoundResult::undefined();
}

enum class ProfileKind { ConjDepth, CyclicDepth, ResidualGirth, ShortConj };

inline std::string profile_kind_label(ProfileKind k) {
    switch (k) {
        case ProfileKind::ConjDepth: return "conj";
        case ProfileKind::CyclicDepth: return "cyclic";
        case ProfileKind::ResidualGirth: return "girth";
        case ProfileKind::ShortConj: return "short";
    }
    return "?";
}

struct DepthRow {
    std::uint64_t n;
    std::optional<std::uint64_t> measured;  // nullopt = Unreached
    std::uint64_t witness_pairs = 0;
    BoundResult bound = BoundResult::undefined();
};

struct DepthProfile {
    ProfileKind kind;
    CoCFamily family;
    std::string group_label;
    std::vector<DepthRow> rows;

    /// CSV schema: kind,family,n,measured,bound,witness_count
    std::string to_csv(bool stamp) const {
        std::ostringstream os;
        if (stamp) {
            auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            os << "# " << group_label << " generated " << t << "\n";
        }
        os << "kind,family,n,measured,bound,witness_count\n";
        for (const auto& r : rows) {
            os << profile_kind_label(kind) << "," << family.label() << "," << r.n << ",";
            if (r.measured)
                os << *r.measured;
            else
                os << "unreached";
            os << "," << r.bound.str() << "," << r.witness_pairs << "\n";
        }
        return os.str();
    }
};

/// Decides x ~ y with the exact decider appropriate for W.
inline ConjVerdict decide_conjugacy(const WreathElement& x, const WreathElement& y) {
    const auto& w = x.owner;
    if (w->finite()) return conj_finite_wreath(x, y);
    if (w->abelian_base && w->act->kind == GroupKind::FreeAbelian)
        return conj_abelianA_wreath(x, y);
    throw UnsupportedActingGroupError("no exact conjugacy decider for " + w->label);
}

/// Minimal index of a wreath-shaped (or retraction-composed) quotient whose
/// images of x and y are non-conjugate; nullopt = Unreached within max_index.
inline std::optional<std::uint64_t> depth_conjugacy(const WreathPtr& w, const WreathElement& x,
                                                    const WreathElement& y, const CoCFamily& family,
                                                    std::uint64_t max_index) {
    if (decide_conjugacy(x, y).conjugate())
        throw ArgumentsConjugateError("depth_conjugacy: arguments are conjugate");
    for (const auto& q : wreath_quotient_stream(w, family, max_index)) {
        if (conj_finite_wreath(q.apply(x), q.apply(y)).not_conjugate()) return q.index();
    }
    return std::nullopt;
}

/// Minimal index of a B-quotient with pi(x) outside pi(<b>).
inline std::optional<std::uint64_t> depth_cyclic(const GroupPtr& bdesc, const GroupElement& b,
                                                 const GroupElement& x, const CoCFamily& family,
                                                 std::uint64_t max_index) {
    if (cyclic_member(b, x))
        throw ArgumentInSubgroupError("depth_cyclic: x lies in <b>");
    for (const auto& q : enumerate_coC(bdesc, family, max_index)) {
        if (!cyclic_member(q.apply(b), q.apply(x))) return q.index();
    }
    return std::nullopt;
}

/// Minimal index of a quotient injective on the n-ball.
inline std::optional<std::uint64_t> residual_girth(const GroupPtr& bdesc, const CoCFamily& family,
                                                   std::uint64_t n, std::uint64_t max_index,
                                                   std::uint64_t cell_cap = default_cell_cap()) {
    for (const auto& q : enumerate_coC(bdesc, family, max_index)) {
        if (injective_on_ball(q, n, cell_cap)) return q.index();
    }
    return std::nullopt;
}

/// Length of the shortest conjugator between two elements known to be
/// conjugate (BFS over conjugator length).
inline std::uint64_t shortest_conjugator_length(const GroupElement& g, const GroupElement& h,
                                                std::uint64_t cell_cap = default_cell_cap()) {
    if (g == h) return 0;
    for (std::uint64_t r = 1;; ++r) {
        for (const auto& c : ball(g.owner, r, cell_cap))
            if (conj(g, c) == h) return r;
    }
}

/// Short_B(n) rows: max over conjugate pairs in the n-ball of the minimal
/// conjugator length.
inline DepthProfile short_profile(const GroupPtr& bdesc, std::uint64_t n_max,
                                  std::uint64_t cell_cap = default_cell_cap()) {
    DepthProfile prof{ProfileKind::ShortConj, CoCFamily::all(), bdesc->label, {}};
    auto elems = ball(bdesc, n_max, cell_cap);
    std::vector<std::optional<std::uint64_t>> lens(elems.size());
    for (std::size_t i = 0; i < elems.size(); ++i) lens[i] = word_length(elems[i], n_max);
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        std::uint64_t best = 0, witnesses = 0;
        for (std::size_t i = 0; i < elems.size(); ++i) {
            if (!lens[i] || *lens[i] > n) continue;
            for (std::size_t j = i + 1; j < elems.size(); ++j) {
                if (!lens[j] || *lens[j] > n) continue;
                if (!conjugate_in_group(elems[i], elems[j])) continue;
                std::uint64_t sc = shortest_conjugator_length(elems[i], elems[j], cell_cap);
                if (sc > best) {
                    best = sc;
                    witnesses = 1;
                } else if (sc == best && sc > 0) {
                    ++witnesses;
                }
            }
        }
        prof.rows.push_back(DepthRow{n, best, witnesses, BoundResult::undefined()});
    }
    return prof;
}

/// Conj profile: for each n <= n_max the max depth_conjugacy over non-conjugate
/// pairs in the wr_norm-ball of radius n (max over the empty set is 0), with
/// the bound column evaluated from `formula` when given.  Pair depths may be
/// evaluated on `jobs` worker threads; the reduction order is fixed by the
/// pair order, so results are independent of the parallelism degree.
inline DepthProfile conj_profile(const WreathPtr& w, std::uint64_t n_max, const CoCFamily& family,
                                 std::uint64_t max_index,
                                 const std::optional<BoundFormula>& formula = std::nullopt,
                                 unsigned jobs = 1,
                                 std::uint64_t cell_cap = default_cell_cap()) {
    DepthProfile prof{ProfileKind::ConjDepth, family, w->label, {}};
    auto elems = wr_ball(w, n_max, cell_cap);
    std::vector<std::pair<WreathElement, std::uint64_t>> in_ball;
    for (auto& e : elems) {
        auto norm = wr_norm(e);
        if (norm <= n_max) in_ball.emplace_back(std::move(e), norm);
    }
    struct PairResult {
        std::uint64_t norm;                     // max of the two element norms
        bool nonconjugate = false;
        std::optional<std::uint64_t> depth;
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < in_ball.size(); ++i)
        for (std::size_t j = i + 1; j < in_ball.size(); ++j) pairs.emplace_back(i, j);
    std::vector<PairResult> results(pairs.size());

    auto work = [&](std::size_t k) {
        auto [i, j] = pairs[k];
        PairResult r;
        r.norm = std::max(in_ball[i].second, in_ball[j].second);
        if (!decide_conjugacy(in_ball[i].first, in_ball[j].first).conjugate()) {
            r.nonconjugate = true;
            r.depth = depth_conjugacy(w, in_ball[i].first, in_ball[j].first, family, max_index);
        }
        results[k] = std::move(r);
    };
    if (jobs <= 1) {
        for (std::size_t k = 0; k < pairs.size(); ++k) work(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < pairs.size(); k = next.fetch_add(1))
                    work(k);
            });
        for (auto& t : pool) t.join();
    }

    for (std::uint64_t n = 0; n <= n_max; ++n) {
        std::optional<std::uint64_t> measured = 0;
        std::uint64_t witnesses = 0;
        bool unreached = false;
        for (const auto& r : results) {
            if (!r.nonconjugate || r.norm > n) continue;
            if (!r.depth) {
                unreached = true;
                continue;
            }
            if (!unreached) {
                if (*r.depth > *measured) {
                    measured = *r.depth;
                    witnesses = 1;
                } else if (*r.depth == *measured && *r.depth > 0) {
                    ++witnesses;
                }
            }
        }
        DepthRow row{n, unreached ? std::nullopt : measured, unreached ? 0 : witnesses,
                     BoundResult::undefined()};
        if (formula && n >= 1) row.bound = theorem_bound(*formula, n);
        prof.rows.push_back(std::move(row));
    }
    return prof;
}

/// Measured component functions of an acting group, for the ThmB formulas.
/// Values are cached per n; nullopt propagates Unreached.
struct MeasuredComponents {
    GroupPtr bdesc;
    CoCFamily family;
    std::uint64_t max_index;
    std::uint64_t cell_cap = default_cell_cap();

    /// Conj_B(n): abelian B only needs element separation (conjugacy = equality).
    std::optional<std::uint64_t> conj_b(std::uint64_t n) const {
        auto elems = ball(bdesc, n, cell_cap);
        std::uint64_t best = 0;
        for (std::size_t i = 0; i < elems.size(); ++i) {
            for (std::size_t j = i + 1; j < elems.size(); ++j) {
                if (conjugate_in_group(elems[i], elems[j])) continue;
                bool found = false;
                for (const auto& q : enumerate_coC(bdesc, family, max_index)) {
                    if (!conjugate_in_group(q.apply(elems[i]), q.apply(elems[j]))) {
                        best = std::max(best, q.index());
                        found = true;
                        break;
                    }
                }
                if (!found) return std::nullopt;
            }
        }
        return best;
    }

    std::optional<std::uint64_t> cyclic_b(std::uint64_t n) const {
        auto elems = ball(bdesc, n, cell_cap);
        std::uint64_t best = 0;
        for (const auto& g : elems) {
            for (const auto& h : elems) {
                if (cyclic_member(g, h)) continue;
                auto d = depth_cyclic(bdesc, g, h, family, max_index);
                if (!d) return std::nullopt;
                best = std::max(best, *d);
            }
        }
        return best;
    }

    std::optional<std::uint64_t> rg_b(std::uint64_t n) const {
        return residual_girth(bdesc, family, n, max_index, cell_cap);
    }

    std::optional<std::uint64_t> short_b(std::uint64_t n) const {
        auto prof = short_profile(bdesc, n, cell_cap);
        return prof.rows.back().measured;
    }

};

/// ThmB bound with all B-components measured; Conj_A measured too when a
/// component table for A is supplied (only the infinite-A flavour uses it).
inline BoundFormula thmb_formula(const MeasuredComponents& comp_b, bool a_finite,
                                 std::optional<MeasuredComponents> comp_a = std::nullopt) {
    BoundFormula f;
    f.name = a_finite ? BoundFormula::Name::ThmB_finiteA : BoundFormula::Name::ThmB_infiniteA;
    f.finite_a = a_finite;
    f.conj_b = [comp_b](std::uint64_t n) { return comp_b.conj_b(n); };
    f.cyclic_b = [comp_b](std::uint64_t n) { return comp_b.cyclic_b(n); };
    f.rg_b = [comp_b](std::uint64_t n) { return comp_b.rg_b(n); };
    f.short_b = [comp_b](std::uint64_t n) { return comp_b.short_b(n); };
    if (comp_a) {
        auto ca = *comp_a;
        f.conj_a = [ca](std::uint64_t n) { return ca.conj_b(n); };
    } else {
        f.conj_a = [](std::uint64_t n) { return std::optional<std::uint64_t>(n); };
    }
    return f;
}

/// Report produced by the pro-p non-separability construction: h = [g, c]
/// with c = 1 in the pro-p closure of <b>, so h avoids K_b while every
/// p-power congruence quotient maps it into the image of K_b.
struct NonsepReport {
    WreathElement h;
    GroupElement b;
    std::uint64_t p = 0;
    bool h_in_Kb = true;
    struct Row {
        std::uint64_t j;               // acting quotient Z/p^j
        std::string base_quot_label;   // A -> A/M
        bool image_in_image_Kb;
    };
    std::vector<Row> rows;

    bool positive() const {
        if (h_in_Kb) return false;
        for (const auto& r : rows)
            if (!r.image_in_image_Kb) return false;
        return !rows.empty();
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "h = " << wreath_to_string(h) << "  b = " << element_to_string(b) << "  p = " << p
           << "\n";
        os << "h in K_b: " << (h_in_Kb ? "yes" : "no") << "\n";
        for (const auto& r : rows)
            os << "  quotient (" << r.base_quot_label << ") wr (Z/" << p << "^" << r.j
               << "): image in image(K_b): " << (r.image_in_image_Kb ? "yes" : "no") << "\n";
        os << (positive() ? "WITNESS: h lies in the pro-p closure of K_b but not in K_b"
                          : "no witness")
           << "\n";
        return os.str();
    }
};

/// Builds the witness for: A wr Z is conjugacy separable but not p-conjugacy
/// separable.  Requires finite abelian A of p-power order (residually-p),
/// gcd(b, p) = 1 and b not in {-1, 0, 1}.
inline NonsepReport pro_p_nonsep_witness(const GroupPtr& a, std::int64_t b, std::uint64_t p,
                                         std::uint64_t k_max) {
    if (!a->finite() || !a->abelian())
        throw PreconditionViolatedError("pro_p_nonsep_witness: A must be finite abelian");
    std::uint64_t ord = a->order();
    while (ord % p == 0) ord /= p;
    if (ord != 1)
        throw PreconditionViolatedError("pro_p_nonsep_witness: A must be residually-p (p-power order)");
    if (b == 0 || b == 1 || b == -1)
        throw PreconditionViolatedError("pro_p_nonsep_witness: <b> must be a proper infinite subgroup");
    std::uint64_t babs = static_cast<std::uint64_t>(b < 0 ? -b : b);
    if (std::gcd(babs, p) != 1)
        throw PreconditionViolatedError("pro_p_nonsep_witness: gcd(b, p) must be 1");

    auto z = GroupDescriptor::free_abelian(1);
    auto w = WreathProduct::make(a, z);
    auto b_elt = make_element(z, {b});
    auto a_gen = generators(a).at(0);
    // g = delta_{0 -> a}, c = 1 (dense in the pro-p topology since gcd(b,p)=1)
    auto g_elt = make_wreath(w, {{identity(z), a_gen}}, identity(z));
    auto c_elt = make_wreath(w, {}, make_element(z, {1}));
    auto h = wr_commutator(g_elt, c_elt);

    NonsepReport report{h, b_elt, p, in_Kb(w, h.base, b_elt), {}};
    std::uint64_t pj = 1;
    for (std::uint64_t j = 1; j <= k_max; ++j) {
        pj *= p;
        auto qb = QuotientMap::mod_quotient(z, pj);
        for (const auto& qa : enumerate_coC(a, CoCFamily::pgroups(p), a->order())) {
            auto q = product_quotient(w, qa, qb);
            auto img = q.apply(h);
            // image of K_b equals K_{image(b)}; membership via the vanishing
            // coset-product criterion in the finite target
            bool member = in_Kb(q.target(), img.base, qb.apply(b_elt));
            report.rows.push_back(NonsepReport::Row{j, qa.label(), member});
        }
    }
    return report;
}

} // namespace wreathlab
