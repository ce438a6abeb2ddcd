#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "wreathlab/wreathlab.hpp"

using namespace wreathlab;

namespace {

WreathPtr lamplighter() {
    return WreathProduct::make(GroupDescriptor::finite_cyclic(2), GroupDescriptor::free_abelian(1));
}

BaseMap lamp_base(const WreathPtr& w, std::initializer_list<std::int64_t> support) {
    BaseMap f;
    for (auto s : support) f.emplace_back(make_element(w->act, {s}), make_element(w->base, {1}));
    std::sort(f.begin(), f.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return f;
}

} // namespace

TEST_CASE("enumerate_coC on Z") {
    auto z = GroupDescriptor::free_abelian(1);
    auto qs = enumerate_coC(z, CoCFamily::all(), 4);
    std::vector<std::uint64_t> idx;
    for (const auto& q : qs) idx.push_back(q.index());
    CHECK(idx == std::vector<std::uint64_t>{1, 2, 3, 4});

    auto qp = enumerate_coC(z, CoCFamily::pgroups(3), 10);
    idx.clear();
    for (const auto& q : qp) idx.push_back(q.index());
    CHECK(idx == std::vector<std::uint64_t>{1, 3, 9});
}

TEST_CASE("enumerate_coC on Z^2 matches the surjection-count oracle") {
    auto z2 = GroupDescriptor::free_abelian(2);
    auto qs = enumerate_coC(z2, CoCFamily::all(), 2);
    // index 1 plus the three index-2 sublattices (kernels of the three
    // nontrivial surjections Z^2 -> Z/2)
    REQUIRE(qs.size() == 4);
    CHECK(qs[0].index() == 1);
    CHECK(qs[1].index() == 2);
    CHECK(qs[2].index() == 2);
    CHECK(qs[3].index() == 2);
    // the three index-2 quotients are pairwise distinct as kernels
    auto in_kernel_pattern = [&](const QuotientMap& q) {
        std::string s;
        for (std::int64_t a = 0; a <= 1; ++a)
            for (std::int64_t b = 0; b <= 1; ++b)
                s += q.in_kernel(make_element(z2, {a, b})) ? '1' : '0';
        return s;
    };
    std::set<std::string> patterns;
    for (std::size_t i = 1; i < 4; ++i) patterns.insert(in_kernel_pattern(qs[i]));
    CHECK(patterns == std::set<std::string>{"1100", "1010", "1001"});
}

TEST_CASE("every yielded quotient is a homomorphism with the right index") {
    std::vector<std::pair<GroupPtr, std::uint64_t>> cases = {
        {GroupDescriptor::free_abelian(1), 6},
        {GroupDescriptor::free_abelian(2), 4},
        {GroupDescriptor::finite_cyclic(6), 6},
        {GroupDescriptor::finite_abelian({2, 4}), 8},
        {GroupDescriptor::heisenberg(), 27},
    };
    for (const auto& [desc, max_index] : cases) {
        for (const auto& q : enumerate_coC(desc, CoCFamily::all(), max_index)) {
            oracles::Rng rng(41);
            for (int t = 0; t < 100; ++t) {
                auto g = rng.element(desc);
                auto h = rng.element(desc);
                REQUIRE(q.apply(mul(g, h)) == mul(q.apply(g), q.apply(h)));
                CHECK(q.in_kernel(g) == is_identity(q.apply(g)));
            }
            // index = number of distinct images over a generating-closed set
            CHECK(all_elements(q.target()).size() == q.index());
            std::vector<GroupElement> gen_images;
            for (const auto& g : generators(desc)) gen_images.push_back(q.apply(g));
            std::set<std::vector<std::int64_t>> closure{identity(q.target()).payload};
            std::vector<GroupElement> work{identity(q.target())};
            while (!work.empty()) {
                auto e = work.back();
                work.pop_back();
                for (const auto& s : gen_images) {
                    for (const auto& nxt : {mul(e, s), mul(e, inv(s))}) {
                        if (closure.insert(nxt.payload).second) work.push_back(nxt);
                    }
                }
            }
            CHECK(closure.size() == q.index());
        }
    }
}

TEST_CASE("enumerate_coC ordering is monotone and deterministic") {
    auto h = GroupDescriptor::heisenberg();
    auto run1 = enumerate_coC(h, CoCFamily::all(), 64);
    auto run2 = enumerate_coC(h, CoCFamily::all(), 64);
    REQUIRE(run1.size() == run2.size());
    for (std::size_t i = 0; i < run1.size(); ++i) {
        CHECK(run1[i].label() == run2[i].label());
        if (i) CHECK(run1[i].index() >= run1[i - 1].index());
    }

    for (std::uint64_t p : {2, 3, 5}) {
        for (const auto& q : enumerate_coC(GroupDescriptor::free_abelian(2),
                                           CoCFamily::pgroups(p), 16)) {
            std::uint64_t idx = q.index();
            while (idx % p == 0) idx /= p;
            CHECK(idx == 1);
        }
    }
}

TEST_CASE("extend_quotient computes coset sums") {
    auto w = lamplighter();
    auto z = w->act;
    auto q2 = QuotientMap::mod_quotient(z, 2);

    auto ext = extend_quotient(w, q2);
    CHECK(ext.apply(make_wreath(w, {}, identity(z))).base.empty());
    // {0->1, 2->1}: both support points in the even coset, Z/2 values cancel
    CHECK(ext.apply(make_wreath(w, lamp_base(w, {0, 2}), identity(z))).base.empty());
    // {0->1, 1->1}: distinct cosets survive
    auto img = ext.apply(make_wreath(w, lamp_base(w, {0, 1}), identity(z)));
    REQUIRE(img.base.size() == 2);
    CHECK(img.base[0].second == make_element(w->base, {1}));
    CHECK(img.base[1].second == make_element(w->base, {1}));
}

TEST_CASE("extend_quotient is a homomorphism (200 random pairs per quotient)") {
    struct Case {
        WreathPtr w;
        QuotientMap q;
    };
    auto wz = WreathProduct::make(GroupDescriptor::free_abelian(1), GroupDescriptor::free_abelian(1));
    auto wl = lamplighter();
    auto z2 = GroupDescriptor::free_abelian(2);
    auto wz2 = WreathProduct::make(GroupDescriptor::finite_cyclic(2), z2);
    std::vector<Case> cases;
    cases.push_back({wl, QuotientMap::mod_quotient(wl->act, 2)});
    cases.push_back({wz, QuotientMap::mod_quotient(wz->act, 3)});
    for (const auto& q : enumerate_coC(z2, CoCFamily::all(), 2))
        if (q.index() == 2) cases.push_back({wz2, q});
    REQUIRE(cases.size() == 5);
    for (const auto& c : cases) {
        auto ext = extend_quotient(c.w, c.q);
        oracles::Rng rng(43);
        for (int t = 0; t < 200; ++t) {
            auto x = rng.wreath(c.w);
            auto y = rng.wreath(c.w);
            REQUIRE(ext.apply(wr_mul(x, y)) == wr_mul(ext.apply(x), ext.apply(y)));
            // in_KN iff the image of (f,1) has empty base
            auto f = rng.wreath(c.w);
            f.top = identity(c.w->act);
            CHECK(in_KN(c.w, c.q, f.base) ==
                  ext.apply(make_wreath(c.w, f.base, f.top)).base.empty());
        }
    }
}

TEST_CASE("product_quotient orders") {
    auto wl = lamplighter();
    // identity on Z/2 and Z -> Z/2 gives (Z/2) wr (Z/2) of order 2^2 * 2 = 8
    auto qa_id = enumerate_coC(wl->base, CoCFamily::all(), 2).back();
    REQUIRE(qa_id.index() == 2);
    auto q8 = product_quotient(wl, qa_id, QuotientMap::mod_quotient(wl->act, 2));
    CHECK(q8.index() == 8);

    auto wzz = WreathProduct::make(GroupDescriptor::free_abelian(1), GroupDescriptor::free_abelian(1));
    auto q24 = product_quotient(wzz, QuotientMap::mod_quotient(wzz->base, 2),
                                QuotientMap::mod_quotient(wzz->act, 3));
    CHECK(q24.index() == 24);  // 2^3 * 3

    // trivial legs compose to the identity on a finite wreath product
    auto w22 = WreathProduct::make(GroupDescriptor::finite_cyclic(2), GroupDescriptor::finite_cyclic(2));
    auto qa_full = enumerate_coC(w22->base, CoCFamily::all(), 2).back();
    auto qb_full = enumerate_coC(w22->act, CoCFamily::all(), 2).back();
    auto qid = product_quotient(w22, qa_full, qb_full);
    CHECK(qid.index() == w22->order());
    for (const auto& e : wr_all_elements(w22)) {
        auto img = qid.apply(e);
        CHECK(img.base.size() == e.base.size());
        CHECK(is_identity(img.top) == is_identity(e.top));
    }
}

TEST_CASE("trivial quotient") {
    auto z = GroupDescriptor::free_abelian(1);
    auto q = QuotientMap::trivial_quotient(z);
    CHECK(q.index() == 1);
    CHECK(q.in_kernel(make_element(z, {42})));
}

TEST_CASE("separates_cosets") {
    auto z = GroupDescriptor::free_abelian(1);
    auto b = make_element(z, {2});
    auto q2 = QuotientMap::mod_quotient(z, 2);
    auto q3 = QuotientMap::mod_quotient(z, 3);
    std::vector<GroupElement> single{make_element(z, {0})};
    std::vector<GroupElement> s{make_element(z, {0}), make_element(z, {1})};
    CHECK(separates_cosets(q3, b, single));
    CHECK(separates_cosets(q2, b, s));
    CHECK_FALSE(separates_cosets(q3, b, s));  // <2> mod 3 is everything
}

TEST_CASE("injective_on_ball") {
    auto z = GroupDescriptor::free_abelian(1);
    CHECK(injective_on_ball(QuotientMap::mod_quotient(z, 1), 0));
    CHECK(injective_on_ball(QuotientMap::mod_quotient(z, 7), 3));
    CHECK_FALSE(injective_on_ball(QuotientMap::mod_quotient(z, 6), 3));  // -3 = 3 mod 6
}

TEST_CASE("separates_support_translation") {
    auto z = GroupDescriptor::free_abelian(1);
    auto q5 = QuotientMap::mod_quotient(z, 5);
    auto q2 = QuotientMap::mod_quotient(z, 2);
    auto q7 = QuotientMap::mod_quotient(z, 7);
    auto set = [&](std::initializer_list<std::int64_t> vs) {
        std::vector<GroupElement> out;
        for (auto v : vs) out.push_back(make_element(z, {v}));
        return out;
    };
    // cardinality mismatch survives an injective quotient
    CHECK(separates_support_translation(q7, set({0}), set({0, 1})));
    CHECK(separates_support_translation(q5, set({0, 1}), set({0, 2})));
    // collapses the support (0 = 2 mod 2), cannot certify
    CHECK_FALSE(separates_support_translation(q2, set({0, 1}), set({0, 2})));
    // a translation appears in the image even though none exists in Z
    auto q3 = QuotientMap::mod_quotient(z, 3);
    CHECK_FALSE(separates_support_translation(q3, set({0, 1}), set({0, 2})));
}

TEST_CASE("wreath_quotient_stream is sorted, deterministic, and monotone") {
    auto wl = lamplighter();
    auto stream = wreath_quotient_stream(wl, CoCFamily::all(), 24);
    REQUIRE(!stream.empty());
    for (std::size_t i = 1; i < stream.size(); ++i)
        CHECK(stream[i].index() >= stream[i - 1].index());
    // contains the retraction Z/2 and the wreath shape (Z/2)wr(Z/2)
    bool has_retraction = false, has_wreath8 = false;
    for (const auto& q : stream) {
        if (q.label() == "Z/2" && q.index() == 2) has_retraction = true;
        if (q.label() == "(Z/2)wr(Z/2)" && q.index() == 8) has_wreath8 = true;
    }
    CHECK(has_retraction);
    CHECK(has_wreath8);

    // quotient maps in the stream are homomorphisms on random pairs
    oracles::Rng rng(47);
    for (const auto& q : stream) {
        for (int t = 0; t < 20; ++t) {
            auto x = rng.wreath(wl);
            auto y = rng.wreath(wl);
            REQUIRE(q.apply(wr_mul(x, y)) == wr_mul(q.apply(x), q.apply(y)));
        }
    }
}
