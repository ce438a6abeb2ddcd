#include "catch_amalgamated.hpp"

#include <numeric>

#include "oracles.hpp"
#include "wreathlab/wreathlab.hpp"

using namespace wreathlab;

namespace {

WreathPtr lamplighter() {
    return WreathProduct::make(GroupDescriptor::finite_cyclic(2), GroupDescriptor::free_abelian(1));
}

WreathElement lamp(const WreathPtr& w, std::initializer_list<std::int64_t> support, std::int64_t top) {
    BaseMap f;
    for (auto s : support) f.emplace_back(make_element(w->act, {s}), make_element(w->base, {1}));
    return make_wreath(w, std::move(f), make_element(w->act, {top}));
}

} // namespace

TEST_CASE("depth_conjugacy") {
    auto w = lamplighter();
    // equal sums force the coset-collapsing order-8 quotient
    CHECK(depth_conjugacy(w, lamp(w, {0, 1}, 0), lamp(w, {0, 2}, 0), CoCFamily::all(), 64) == 8);
    // different sums: the augmentation (Z/2)wr(Z/1) of order 2 separates
    CHECK(depth_conjugacy(w, lamp(w, {0}, 0), lamp(w, {0, 1}, 0), CoCFamily::all(), 64) == 2);

    auto wzz = WreathProduct::make(GroupDescriptor::free_abelian(1), GroupDescriptor::free_abelian(1));
    auto t1 = make_wreath(wzz, {}, make_element(wzz->act, {1}));
    auto t2 = make_wreath(wzz, {}, make_element(wzz->act, {2}));
    CHECK(depth_conjugacy(wzz, t1, t2, CoCFamily::all(), 64) == 2);

    CHECK_THROWS_AS(depth_conjugacy(w, lamp(w, {0}, 0), lamp(w, {3}, 0), CoCFamily::all(), 64),
                    ArgumentsConjugateError);

    // symmetry on a handful of pairs
    std::vector<std::pair<WreathElement, WreathElement>> pairs = {
        {lamp(w, {0, 1}, 0), lamp(w, {0, 2}, 0)},
        {lamp(w, {0}, 2), lamp(w, {0, 2}, 2)},
        {lamp(w, {}, 1), lamp(w, {}, -1)},
    };
    for (const auto& [x, y] : pairs)
        CHECK(depth_conjugacy(w, x, y, CoCFamily::all(), 64) ==
              depth_conjugacy(w, y, x, CoCFamily::all(), 64));
}

TEST_CASE("depth_conjugacy depth is recomputed by a straight-line scan") {
    // independent recomputation: loop over quotient shapes by hand and find
    // the minimal separating order via orbit enumeration in the target
    auto w = lamplighter();
    auto x = lamp(w, {0, 1}, 0);
    auto y = lamp(w, {0, 2}, 0);
    std::uint64_t best = 0;
    for (std::uint64_t order = 1; order <= 64 && best == 0; ++order) {
        for (const auto& q : wreath_quotient_stream(w, CoCFamily::all(), 64)) {
            if (q.index() != order) continue;
            auto classes = oracles::enumerate_classes(q.target());
            if (!classes.conjugate(q.apply(x), q.apply(y))) {
                best = order;
                break;
            }
        }
    }
    CHECK(best == depth_conjugacy(w, x, y, CoCFamily::all(), 64));
}

TEST_CASE("depth_cyclic") {
    auto z = GroupDescriptor::free_abelian(1);
    auto el = [&](std::int64_t v) { return make_element(z, {v}); };
    CHECK(depth_cyclic(z, el(2), el(3), CoCFamily::all(), 16) == 2);
    CHECK(depth_cyclic(z, el(2), el(3), CoCFamily::pgroups(3), 81) == std::nullopt);
    CHECK(depth_cyclic(z, el(0), el(1), CoCFamily::all(), 16) == 2);
    CHECK_THROWS_AS(depth_cyclic(z, el(2), el(4), CoCFamily::all(), 16), ArgumentInSubgroupError);

    // pro-p density: Unreached exactly when gcd(b, p) = 1 (b not 0 or +-1)
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        std::uint64_t pk = p * p * p * p;
        for (std::int64_t b = 2; b <= 10; ++b) {
            auto d = depth_cyclic(z, el(b), el(1), CoCFamily::pgroups(p), pk);
            bool coprime = std::gcd(static_cast<std::uint64_t>(b), p) == 1;
            CHECK(!d == coprime);
        }
    }
}

TEST_CASE("residual_girth exact values") {
    auto z = GroupDescriptor::free_abelian(1);
    CHECK(residual_girth(z, CoCFamily::all(), 3, 32) == 7);
    CHECK(residual_girth(z, CoCFamily::pgroups(2), 3, 32) == 8);
    CHECK(residual_girth(z, CoCFamily::all(), 0, 32) == 1);

    for (std::uint64_t n = 0; n <= 10; ++n) {
        CHECK(residual_girth(z, CoCFamily::all(), n, 64) == 2 * n + 1);
        for (std::uint64_t p : {2ull, 3ull, 5ull}) {
            std::uint64_t want = 1;
            while (want < 2 * n + 1) want *= p;
            CHECK(residual_girth(z, CoCFamily::pgroups(p), n, 256) == want);
        }
    }
}

TEST_CASE("heisenberg measurements through congruence quotients") {
    auto h = GroupDescriptor::heisenberg();
    // ball(1) = {1, x, x^-1, y, y^-1}; mod 2 folds x onto x^-1, mod 3 injects
    CHECK(residual_girth(h, CoCFamily::all(), 1, 27) == 27);
    CHECK(residual_girth(h, CoCFamily::all(), 1, 8) == std::nullopt);

    auto x = make_element(h, {1, 0, 0});
    auto z = make_element(h, {0, 0, 1});
    CHECK(depth_cyclic(h, x, z, CoCFamily::all(), 27) == 8);
    CHECK(depth_cyclic(h, x, z, CoCFamily::pgroups(2), 64) == 8);
}

TEST_CASE("wr_norm is the BFS geodesic for Z wr Z") {
    auto wzz = WreathProduct::make(GroupDescriptor::free_abelian(1), GroupDescriptor::free_abelian(1));
    auto dist = oracles::wreath_bfs_distances(wzz, 4);
    for (const auto& e : wr_ball(wzz, 4))
        CHECK(wr_norm(e) == dist.at(wreathlab::detail::wr_key(e)));
}

TEST_CASE("depth examples in Z wr Z") {
    auto wzz = WreathProduct::make(GroupDescriptor::free_abelian(1), GroupDescriptor::free_abelian(1));
    auto a = make_wreath(wzz, {{identity(wzz->act), make_element(wzz->base, {1})}},
                         identity(wzz->act));
    auto a_inv = wr_inv(a);
    // base sums 1 vs -1 agree mod 2, split first by the mod-3 collapse
    CHECK(depth_conjugacy(wzz, a, a_inv, CoCFamily::all(), 64) == 3);
    auto t = make_wreath(wzz, {}, make_element(wzz->act, {1}));
    CHECK(depth_conjugacy(wzz, t, wr_inv(t), CoCFamily::all(), 64) == 3);
    CHECK(depth_conjugacy(wzz, a, t, CoCFamily::all(), 64) == 2);
}

TEST_CASE("short_profile") {
    // abelian groups have no distinct conjugate pairs at all
    auto z2 = GroupDescriptor::free_abelian(2);
    auto prof = short_profile(z2, 3);
    for (const auto& r : prof.rows) CHECK(r.measured == 0);

    // Heisenberg: recompute the n = 2 value by independent enumeration
    auto h = GroupDescriptor::heisenberg();
    auto hp = short_profile(h, 2);
    REQUIRE(hp.rows.size() == 3);
    std::uint64_t expect = 0;
    {
        auto b2 = ball(h, 2);
        for (const auto& g : b2) {
            for (const auto& k : b2) {
                if (g == k) continue;
                // exact Heisenberg conjugacy: same (a,b), c differs by gcd(a,b)
                if (!conjugate_in_group(g, k)) continue;
                std::uint64_t sc = 0;
                for (std::uint64_t r = 1; sc == 0; ++r) {
                    for (const auto& c : ball(h, r))
                        if (conj(g, c) == k) {
                            sc = r;
                            break;
                        }
                }
                expect = std::max(expect, sc);
            }
        }
    }
    CHECK(hp.rows[2].measured == expect);
}

TEST_CASE("theorem_bound values") {
    BoundFormula thmc;
    thmc.name = BoundFormula::Name::ThmC_abelian;
    thmc.finite_a = false;
    auto v2 = theorem_bound(thmc, 2);
    REQUIRE(v2.is_value());
    CHECK(v2.value == 65536);  // 2^(2^4)
    auto v1 = theorem_bound(thmc, 1);
    REQUIRE(v1.is_value());
    CHECK(v1.value == 1);

    BoundFormula thmb;
    thmb.name = BoundFormula::Name::ThmB_finiteB;
    thmb.card_b = 2;
    thmb.conj_a = [](std::uint64_t n) { return std::optional<std::uint64_t>(n); };
    auto v3 = theorem_bound(thmb, 3);
    REQUIRE(v3.is_value());
    CHECK(v3.value == 6561);  // 3^(2^3)

    BoundFormula lamp_bound;
    lamp_bound.name = BoundFormula::Name::ThmC_abelian;
    lamp_bound.finite_a = true;
    auto v3f = theorem_bound(lamp_bound, 3);
    REQUIRE(v3f.is_value());
    CHECK(v3f.value == pow_checked(BigNat(2), BigNat(19683), 100000).value);  // 2^(3^9)

    lamp_bound.digit_cap = 100;
    CHECK(theorem_bound(lamp_bound, 3).kind == BoundResult::Kind::Overflow);

    BoundFormula nil;
    nil.name = BoundFormula::Name::ThmC_nilpotent;
    nil.nil_d = 3;
    auto vn = theorem_bound(nil, 2);
    REQUIRE(vn.is_value());
    CHECK(vn.value == pow_checked(BigNat(2), BigNat(256), 100000).value);  // 2^(2^(2^3))
}

TEST_CASE("conj_profile on the lamplighter") {
    auto w = lamplighter();
    auto prof = conj_profile(w, 2, CoCFamily::all(), 64);
    REQUIRE(prof.rows.size() == 3);
    CHECK(prof.rows[0].measured == 0);  // no distinct pairs at n = 0
    for (std::size_t i = 1; i < prof.rows.size(); ++i)
        CHECK(*prof.rows[i].measured >= *prof.rows[i - 1].measured);

    // independent straight-line recomputation over the same ball
    auto elems = wr_ball(w, 2);
    std::vector<WreathElement> in_ball;
    for (const auto& e : elems)
        if (wr_norm(e) <= 2) in_ball.push_back(e);
    std::uint64_t expect = 0;
    auto stream = wreath_quotient_stream(w, CoCFamily::all(), 64);
    for (std::size_t i = 0; i < in_ball.size(); ++i) {
        for (std::size_t j = i + 1; j < in_ball.size(); ++j) {
            auto brute = conj_bruteforce(in_ball[i], in_ball[j], 8);
            if (brute.conjugate()) continue;
            std::uint64_t depth = 0;
            for (const auto& q : stream) {
                auto classes = oracles::enumerate_classes(q.target());
                if (!classes.conjugate(q.apply(in_ball[i]), q.apply(in_ball[j]))) {
                    depth = q.index();
                    break;
                }
            }
            REQUIRE(depth > 0);
            expect = std::max(expect, depth);
        }
    }
    CHECK(prof.rows[2].measured == expect);

    // parallel evaluation gives identical rows
    auto prof8 = conj_profile(w, 2, CoCFamily::all(), 64, std::nullopt, 8);
    REQUIRE(prof8.rows.size() == prof.rows.size());
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
        CHECK(prof8.rows[i].measured == prof.rows[i].measured);
        CHECK(prof8.rows[i].witness_pairs == prof.rows[i].witness_pairs);
    }
    CHECK(prof8.to_csv(false) == prof.to_csv(false));
}

TEST_CASE("pro_p_nonsep_witness") {
    auto z3 = GroupDescriptor::finite_cyclic(3);
    auto report = pro_p_nonsep_witness(z3, 2, 3, 3);
    CHECK_FALSE(report.h_in_Kb);
    REQUIRE(!report.rows.empty());
    for (const auto& r : report.rows) CHECK(r.image_in_image_Kb);
    CHECK(report.positive());

    auto z2 = GroupDescriptor::finite_cyclic(2);
    auto report2 = pro_p_nonsep_witness(z2, 3, 2, 3);
    CHECK(report2.positive());

    CHECK_THROWS_AS(pro_p_nonsep_witness(z3, 1, 3, 3), PreconditionViolatedError);
    CHECK_THROWS_AS(pro_p_nonsep_witness(z3, 3, 3, 3), PreconditionViolatedError);
    CHECK_THROWS_AS(pro_p_nonsep_witness(GroupDescriptor::finite_cyclic(6), 5, 3, 3),
                    PreconditionViolatedError);
}

TEST_CASE("image of K_b membership rechecked by enumeration in a small quotient") {
    // the criterion-based membership check agrees with brute enumeration of
    // {[f, b] : f} in (Z/3) wr (Z/3)
    auto z3 = GroupDescriptor::finite_cyclic(3);
    auto z = GroupDescriptor::free_abelian(1);
    auto w = WreathProduct::make(z3, z);
    auto qb = QuotientMap::mod_quotient(z, 3);
    auto qa = enumerate_coC(z3, CoCFamily::pgroups(3), 3).back();
    REQUIRE(qa.index() == 3);
    auto q = product_quotient(w, qa, qb);

    auto g = make_wreath(w, {{identity(z), make_element(z3, {1})}}, identity(z));
    auto c = make_wreath(w, {}, make_element(z, {1}));
    auto h = wr_commutator(g, c);
    auto img = q.apply(h);
    auto b_img = qb.apply(make_element(z, {2}));

    std::set<std::vector<std::int64_t>> kb_images;
    for (const auto& f : wr_all_elements(q.target())) {
        if (!is_identity(f.top)) continue;
        auto comm = wr_commutator(f, make_wreath(q.target(), {}, b_img));
        kb_images.insert(wreathlab::detail::wr_key(comm));
    }
    bool enumerated = kb_images.count(wreathlab::detail::wr_key(img)) > 0;
    bool criterion = in_Kb(q.target(), img.base, b_img);
    CHECK(enumerated == criterion);
    CHECK(criterion);
}

TEST_CASE("profile CSV shape") {
    auto w = lamplighter();
    BoundFormula f;
    f.name = BoundFormula::Name::ThmC_abelian;
    f.finite_a = true;
    auto prof = conj_profile(w, 1, CoCFamily::all(), 32, f);
    auto csv = prof.to_csv(false);
    CHECK(csv.rfind("kind,family,n,measured,bound,witness_count\n", 0) == 0);
    CHECK(csv.find("conj,all,0,0,-,0") != std::string::npos);
    CHECK(csv.find("conj,all,1,") != std::string::npos);
}
