#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "wreathlab/wreathlab.hpp"

using namespace wreathlab;

TEST_CASE("multiplication in the shipped groups") {
    auto z = GroupDescriptor::free_abelian(1);
    CHECK(mul(make_element(z, {3}), make_element(z, {4})) == make_element(z, {7}));

    auto z5 = GroupDescriptor::finite_cyclic(5);
    CHECK(mul(make_element(z5, {3}), make_element(z5, {4})) == make_element(z5, {2}));

    auto h = GroupDescriptor::heisenberg();
    auto x = make_element(h, {1, 0, 0});
    auto y = make_element(h, {0, 1, 0});
    auto p = mul(x, y);
    // cross-check against the 3x3 matrix product
    auto pm = oracles::Mat3::from_abc(1, 0, 0) * oracles::Mat3::from_abc(0, 1, 0);
    CHECK(p.payload == std::vector<std::int64_t>{pm.a(), pm.b(), pm.c()});
    CHECK(p == make_element(h, {1, 1, 1}));
}

TEST_CASE("mixed owners are rejected") {
    auto z = GroupDescriptor::free_abelian(1);
    auto z5 = GroupDescriptor::finite_cyclic(5);
    CHECK_THROWS_AS(mul(make_element(z, {1}), make_element(z5, {1})), MixedOwnersError);
}

TEST_CASE("group laws hold on ball(3) for every shipped descriptor") {
    std::vector<GroupPtr> descs = {
        GroupDescriptor::free_abelian(1),
        GroupDescriptor::free_abelian(2),
        GroupDescriptor::finite_cyclic(2),
        GroupDescriptor::finite_cyclic(6),
        GroupDescriptor::finite_abelian({2, 4}),
        GroupDescriptor::direct_product(
            {GroupDescriptor::finite_cyclic(3), GroupDescriptor::free_abelian(1)}),
        GroupDescriptor::heisenberg(),
        oracles::make_s3(),
    };
    for (const auto& d : descs) {
        auto b = ball(d, 3);
        auto id = identity(d);
        for (const auto& g : b) {
            CHECK(mul(id, g) == g);
            CHECK(mul(g, inv(g)) == id);
        }
        // associativity on a deterministic sample of triples
        oracles::Rng rng(7);
        for (int t = 0; t < 60; ++t) {
            const auto& g1 = b[static_cast<std::size_t>(rng.int_in(0, static_cast<std::int64_t>(b.size()) - 1))];
            const auto& g2 = b[static_cast<std::size_t>(rng.int_in(0, static_cast<std::int64_t>(b.size()) - 1))];
            const auto& g3 = b[static_cast<std::size_t>(rng.int_in(0, static_cast<std::int64_t>(b.size()) - 1))];
            CHECK(mul(mul(g1, g2), g3) == mul(g1, mul(g2, g3)));
        }
    }
}

TEST_CASE("canonical forms are unique and FiniteCyclic(n) has n elements") {
    auto z5 = GroupDescriptor::finite_cyclic(5);
    CHECK(make_element(z5, {7}) == make_element(z5, {-3}));
    CHECK(all_elements(z5).size() == 5);
}

TEST_CASE("word_length examples") {
    auto z = GroupDescriptor::free_abelian(1);
    CHECK(word_length(identity(z), 10) == 0);
    CHECK(word_length(make_element(z, {5}), 10) == 5);
    CHECK(word_length(make_element(z, {5}), 3) == std::nullopt);

    auto z2 = GroupDescriptor::free_abelian(2);
    auto g = make_element(z2, {2, 3});
    CHECK(word_length(g, 10) == 5);
    // BFS oracle: find the first radius whose ball contains g
    std::uint64_t r = 0;
    while (true) {
        auto b = ball(z2, r);
        if (std::find(b.begin(), b.end(), g) != b.end()) break;
        ++r;
    }
    CHECK(r == 5);
}

TEST_CASE("ball examples and counts") {
    auto z = GroupDescriptor::free_abelian(1);
    auto b2 = ball(z, 2);
    std::vector<GroupElement> expect;
    for (std::int64_t v : {-2, -1, 0, 1, 2}) expect.push_back(make_element(z, {v}));
    CHECK(b2 == expect);

    auto z3 = GroupDescriptor::finite_cyclic(3);
    CHECK(ball(z3, 1).size() == 3);

    auto z2 = GroupDescriptor::free_abelian(2);
    CHECK(ball(z2, 1).size() == 5);
    for (std::uint64_t n = 0; n <= 6; ++n) {
        CHECK(ball(z, n).size() == 2 * n + 1);
        CHECK(ball(z2, n).size() == 2 * n * n + 2 * n + 1);  // taxicab count
    }
    CHECK_THROWS_AS(ball(z, 50, 10), CapExceededError);
}

TEST_CASE("balls are nested and word_length is subadditive") {
    auto z2 = GroupDescriptor::free_abelian(2);
    auto b3 = ball(z2, 3);
    auto b4 = ball(z2, 4);
    for (const auto& g : b3) CHECK(std::find(b4.begin(), b4.end(), g) != b4.end());

    oracles::Rng rng(11);
    auto h = GroupDescriptor::heisenberg();
    for (int t = 0; t < 40; ++t) {
        auto g1 = rng.element(h, 1);
        auto g2 = rng.element(h, 1);
        auto l1 = word_length(g1, 20);
        auto l2 = word_length(g2, 20);
        auto l12 = word_length(mul(g1, g2), 40);
        REQUIRE(l1);
        REQUIRE(l2);
        REQUIRE(l12);
        CHECK(*l12 <= *l1 + *l2);
    }
}

TEST_CASE("centralizer_contains") {
    auto z5 = GroupDescriptor::finite_cyclic(5);
    CHECK(centralizer_contains(make_element(z5, {2}), make_element(z5, {3})));

    auto h = GroupDescriptor::heisenberg();
    auto x = make_element(h, {1, 0, 0});
    auto y = make_element(h, {0, 1, 0});
    auto zc = make_element(h, {0, 0, 1});
    CHECK_FALSE(centralizer_contains(x, y));
    CHECK(centralizer_contains(x, zc));
    oracles::Rng rng(3);
    for (int t = 0; t < 20; ++t) CHECK(centralizer_contains(rng.element(h), zc));
}

TEST_CASE("cyclic membership and exponents") {
    auto z = GroupDescriptor::free_abelian(1);
    CHECK(cyclic_member(make_element(z, {2}), make_element(z, {-6})));
    CHECK_FALSE(cyclic_member(make_element(z, {2}), make_element(z, {3})));
    CHECK(cyclic_exponent(make_element(z, {2}), make_element(z, {-6})) == -3);

    auto z2 = GroupDescriptor::free_abelian(2);
    CHECK(cyclic_member(make_element(z2, {1, 2}), make_element(z2, {3, 6})));
    CHECK_FALSE(cyclic_member(make_element(z2, {1, 2}), make_element(z2, {3, 5})));

    auto z6 = GroupDescriptor::finite_cyclic(6);
    CHECK(cyclic_member(make_element(z6, {2}), make_element(z6, {4})));
    CHECK_FALSE(cyclic_member(make_element(z6, {2}), make_element(z6, {3})));

    auto h = GroupDescriptor::heisenberg();
    auto g = make_element(h, {1, 1, 0});
    // g^3 = (3, 3, 3*0 + 3*1) = (3,3,3)
    auto g3 = mul(mul(g, g), g);
    CHECK(cyclic_member(g, g3));
    CHECK(cyclic_exponent(g, g3) == 3);
    CHECK_FALSE(cyclic_member(g, make_element(h, {3, 3, 2})));

    auto mixed = GroupDescriptor::direct_product(
        {GroupDescriptor::free_abelian(1), GroupDescriptor::finite_cyclic(4)});
    auto bb = make_element(mixed, {2, 1});
    CHECK(cyclic_member(bb, make_element(mixed, {6, 3})));   // k = 3
    CHECK_FALSE(cyclic_member(bb, make_element(mixed, {6, 2})));
}

TEST_CASE("exact conjugacy decisions per kind") {
    auto h = GroupDescriptor::heisenberg();
    // conjugates of (a,b,c) differ by multiples of gcd(a,b) in the c slot
    CHECK(conjugate_in_group(make_element(h, {2, 0, 0}), make_element(h, {2, 0, 4})));
    CHECK_FALSE(conjugate_in_group(make_element(h, {2, 0, 0}), make_element(h, {2, 0, 1})));
    CHECK_FALSE(conjugate_in_group(make_element(h, {2, 0, 0}), make_element(h, {0, 2, 0})));

    auto s3 = oracles::make_s3();
    // transpositions are all conjugate, and not conjugate to 3-cycles
    CHECK(conjugate_in_group(make_element(s3, {1}), make_element(s3, {2})));
    CHECK_FALSE(conjugate_in_group(make_element(s3, {1}), make_element(s3, {3})));
}

TEST_CASE("element order") {
    auto z6 = GroupDescriptor::finite_cyclic(6);
    CHECK(element_order(make_element(z6, {2})) == 3);
    CHECK(element_order(make_element(z6, {1})) == 6);
    auto z = GroupDescriptor::free_abelian(1);
    CHECK(element_order(make_element(z, {3})) == std::nullopt);
    CHECK(element_order(identity(z)) == 1);
}
