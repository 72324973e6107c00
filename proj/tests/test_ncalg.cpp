/*
   Copyright 2026 the freewick authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <catch2/catch_amalgamated.hpp>
#include <freewick/ncalg.hpp>

#include "oracles.hpp"

using namespace freewick;

namespace {

scalar_poly mono(int d, std::initializer_list<generator> ls, cplx c = {1.0, 0.0}) {
    scalar_poly p(d, d);
    p.add_term(word_of(ls), c);
    return p;
}

Eigen::MatrixXcd rand2x2(std::uint64_t stream) {
    Eigen::MatrixXcd m(2, 2);
    std::uint64_t ctr = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double re = 2.0 * oracles::test_uniform(stream, ctr++) - 1.0;
            const double im = 2.0 * oracles::test_uniform(stream, ctr++) - 1.0;
            m(i, j) = cplx(re, im);
        }
    return m;
}

}  // namespace

TEST_CASE("product concatenates words") {
    auto p = mono(3, {X(1)}) * mono(3, {X(2)});
    REQUIRE(p.terms().size() == 1);
    CHECK(p.terms().begin()->first == word_of({X(1), X(2)}));

    auto q = mono(3, {X(1), Z(2)}, {0.0, 2.0});
    CHECK(q * scalar_poly::identity_like(q) == q);
    CHECK(scalar_poly::identity_like(q) * q == q);
}

TEST_CASE("matrix-coefficient product matches the term-by-term oracle") {
    const auto a = rand2x2(1), b = rand2x2(2), c = rand2x2(3);
    matrix_poly p(2, 0, 2), q(2, 0, 2);
    p.add_term(word_of({X(1)}), a);
    p.add_term(word_of({X(2)}), b);
    q.add_term(word_of({X(1)}), c);
    const auto prod = p * q;
    const auto expect = oracles::naive_product(p, q);
    CHECK(prod.max_coeff_deviation(expect) < 1e-15);
    REQUIRE(prod.terms().size() == 2);
    CHECK((prod.terms().at(word_of({X(1), X(1)})) - a * c).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((prod.terms().at(word_of({X(2), X(1)})) - b * c).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("sum drops cancelled terms") {
    auto p = oracles::random_scalar_poly(2, 1, 4, 5, 11);
    const scalar_poly zero(2, 1);
    CHECK(p + zero == p);
    CHECK((p + p * cplx(-1.0, 0.0)).is_zero());

    auto two_x1 = mono(2, {X(1)}) + mono(2, {X(1)});
    REQUIRE(two_x1.terms().size() == 1);
    CHECK(two_x1.terms().begin()->second == cplx(2.0, 0.0));
}

TEST_CASE("degree conventions") {
    const scalar_poly zero(2, 1);
    CHECK(zero.degree() == -1);  // minus-infinity sentinel
    CHECK(scalar_poly::constant(2, 1, {3.0, 0.0}).degree() == 0);
    auto p = mono(2, {X(1), Z(1), X(2)});
    CHECK(p.degree() == 3);  // Z letters count toward the degree
    CHECK(p.xdegree() == 2);
    auto q = oracles::random_scalar_poly(2, 1, 3, 4, 5);
    auto r = oracles::random_scalar_poly(2, 1, 3, 4, 6);
    if (!q.is_zero() && !r.is_zero() && !(q * r).is_zero())
        CHECK((q * r).degree() <= q.degree() + r.degree());
}

TEST_CASE("adjoint conjugates and reverses") {
    auto p = mono(2, {X(1), X(2)}, {0.0, 1.0});
    auto a = p.adjoint();
    REQUIRE(a.terms().size() == 1);
    CHECK(a.terms().begin()->first == word_of({X(2), X(1)}));
    CHECK(a.terms().begin()->second == cplx(0.0, -1.0));

    auto sa = mono(2, {X(1)}) + mono(2, {X(2), X(1), X(2)});
    CHECK(sa.adjoint() == sa);

    auto m = oracles::random_matrix_poly(2, 1, 2, 3, 4, 21);
    CHECK(m.adjoint().adjoint().max_coeff_deviation(m) == 0.0);
}

TEST_CASE("adjoint is an antihomomorphism") {
    auto p = oracles::random_matrix_poly(2, 1, 2, 3, 3, 31);
    auto q = oracles::random_matrix_poly(2, 1, 2, 3, 3, 32);
    CHECK((p * q).adjoint().max_coeff_deviation(q.adjoint() * p.adjoint()) < 1e-14);
}

TEST_CASE("partial derivative on single letters") {
    auto d1 = partial_derivative(mono(2, {X(1)}), 1);
    REQUIRE(d1.terms().size() == 1);
    CHECK(d1.terms().begin()->first == std::vector<word>{word{}, word{}});
    CHECK(d1.terms().begin()->second == cplx(1.0, 0.0));

    CHECK(partial_derivative(mono(2, {X(2)}), 1).is_zero());
    CHECK(partial_derivative(mono(2, {Z(1)}), 1).is_zero());
    CHECK_THROWS_AS(partial_derivative(mono(2, {X(1)}), 3), std::invalid_argument);
}

TEST_CASE("partial derivative enumerates occurrences") {
    auto p = mono(2, {X(1), X(1), X(1)});
    auto d = partial_derivative(p, 1);
    CHECK(d.max_coeff_deviation(oracles::naive_partial(p, 1)) == 0.0);
    REQUIRE(d.terms().size() == 3);
    // 1 (x) X1X1 + X1 (x) X1 + X1X1 (x) 1
    const word x1 = word_of({X(1)});
    const word x1x1 = word_of({X(1), X(1)});
    CHECK(d.terms().count({word{}, x1x1}) == 1);
    CHECK(d.terms().count({x1, x1}) == 1);
    CHECK(d.terms().count({x1x1, word{}}) == 1);

    for (std::uint64_t s = 0; s < 8; ++s) {
        auto q = oracles::random_scalar_poly(2, 1, 4, 4, 100 + s);
        CHECK(partial_derivative(q, 1).max_coeff_deviation(oracles::naive_partial(q, 1)) <
              1e-15);
    }
}

TEST_CASE("Leibniz identity termwise") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto p = oracles::random_scalar_poly(2, 1, 4, 3, 200 + s);
        auto q = oracles::random_scalar_poly(2, 1, 4, 3, 300 + s);
        for (int i = 1; i <= 2; ++i) {
            auto lhs = partial_derivative(p * q, i);
            auto rhs = partial_derivative(p, i) * q + p * partial_derivative(q, i);
            CHECK(lhs.max_coeff_deviation(rhs) < 1e-13);
        }
    }
}

TEST_CASE("higher derivative: rank, vanishing, recursive oracle") {
    auto p = mono(1, {X(1), X(1)});
    auto d2 = higher_derivative(p, {1, 1});
    REQUIRE(d2.rank() == 3);
    // both orders of splitting the two letters collapse to 1 (x) 1 (x) 1
    REQUIRE(d2.terms().size() == 1);
    CHECK(d2.terms().begin()->first == std::vector<word>{word{}, word{}, word{}});
    CHECK(d2.terms().begin()->second == cplx(1.0, 0.0));

    CHECK(higher_derivative(p, {1, 1, 1}).is_zero());  // order beyond the degree

    // recursive application of partial_derivative as the oracle: iterate the
    // last-slot split by hand
    auto q = oracles::random_scalar_poly(2, 0, 4, 4, 400);
    auto by_lib = higher_derivative(q, {1, 2});
    tensor_polynomial<cplx> by_hand(2, 0, 1, 3);
    for (const auto& [slots, c] : partial_derivative(q, 1).terms()) {
        scalar_poly tail(2, 0);
        tail.add_term(slots[1], {1.0, 0.0});
        for (const auto& [s2, c2] : partial_derivative(tail, 2).terms())
            by_hand.add_term({slots[0], s2[0], s2[1]}, c * c2);
    }
    CHECK(by_lib.max_coeff_deviation(by_hand) < 1e-15);

    // word lengths in every term sum to (source length) - order
    auto m = mono(2, {X(1), X(2), X(1), X(2), X(1)});
    auto d = higher_derivative(m, {1, 2});
    for (const auto& [slots, c] : d.terms()) {
        std::size_t total = 0;
        for (const auto& w : slots) total += w.length();
        CHECK(total == 5 - 2);
    }
}

TEST_CASE("power derivative expansion") {
    auto p = mono(1, {X(1)});

    SECTION("k = 1 reduces to the iterated derivative") {
        auto q = oracles::random_scalar_poly(2, 0, 3, 3, 500);
        CHECK(power_derivative_expansion(q, {1, 2}, 1)
                  .max_coeff_deviation(higher_derivative(q, {1, 2})) < 1e-15);
    }

    SECTION("powers of a single letter") {
        auto e = power_derivative_expansion(p, {1}, 3);
        // sum_{j=0..2} X1^j (x) X1^{2-j}
        tensor_polynomial<cplx> expect(1, 0, 1, 2);
        for (int j = 0; j <= 2; ++j) {
            std::vector<generator> a(j, X(1)), b(2 - j, X(1));
            expect.add_term({word{a}, word{b}}, {1.0, 0.0});
        }
        CHECK(e.max_coeff_deviation(expect) == 0.0);
    }

    SECTION("agrees with differentiating the expanded power") {
        for (std::uint64_t s = 0; s < 6; ++s) {
            auto q = oracles::random_scalar_poly(2, 0, 3, 2, 600 + s);
            for (int k = 1; k <= 3; ++k) {
                const std::vector<std::vector<int>> index_sets = {{1}, {2, 1}};
                for (const auto& zs : index_sets) {
                    auto direct = higher_derivative(pow(q, k), std::span<const int>(zs));
                    auto expanded =
                        power_derivative_expansion(q, std::span<const int>(zs), k);
                    CHECK(direct.max_coeff_deviation(expanded) < 1e-12);
                }
            }
        }
        // matrix coefficients exercise the slot-merge coefficient order
        auto m = oracles::random_matrix_poly(2, 0, 2, 2, 2, 700);
        auto direct = higher_derivative(pow(m, 2), {1});
        auto expanded = power_derivative_expansion(m, {1}, 2);
        CHECK(direct.max_coeff_deviation(expanded) < 1e-12);
    }
}

TEST_CASE("alphabet and algebra mismatches are rejected") {
    scalar_poly a(2, 0), b(3, 0);
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    CHECK_THROWS_AS(a * b, std::invalid_argument);
    matrix_poly m2(2, 0, 2), m3(2, 0, 3);
    CHECK_THROWS_AS(m2 * m3, std::invalid_argument);
    scalar_poly p(2, 0);
    CHECK_THROWS_AS(p.add_term(word_of({X(3)}), cplx{1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(p.add_term(word_of({Z(1)}), cplx{1.0, 0.0}), std::invalid_argument);
}
