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
#include <freewick/parse.hpp>

#include "oracles.hpp"

using namespace freewick;

TEST_CASE("basic polynomial forms") {
    auto p = parse_polynomial("X1*X2 + 2*X3", 3);
    REQUIRE(p.terms().size() == 2);
    CHECK(p.terms().at(word_of({X(1), X(2)})) == cplx(1.0, 0.0));
    CHECK(p.terms().at(word_of({X(3)})) == cplx(2.0, 0.0));

    auto q = parse_polynomial("(1+1i)*Z1*X1", 1, 1);
    REQUIRE(q.terms().size() == 1);
    CHECK(q.terms().at(word_of({Z(1), X(1)})) == cplx(1.0, 1.0));

    auto cube = parse_polynomial("X1^3", 1);
    REQUIRE(cube.terms().size() == 1);
    CHECK(cube.terms().begin()->first == word_of({X(1), X(1), X(1)}));
}

TEST_CASE("juxtaposed words, aliases, signs") {
    auto w = parse_polynomial("X1X2X1X2", 2);
    CHECK(w.terms().begin()->first == word_of({X(1), X(2), X(1), X(2)}));

    auto y = parse_polynomial("X1 + Y1", 1, 1);  // Y is an alias for Z
    CHECK(y.terms().count(word_of({Z(1)})) == 1);

    auto s = parse_polynomial("-X1 - 2i*X2 + (0.5-0.25i)", 2);
    CHECK(s.terms().at(word_of({X(1)})) == cplx(-1.0, 0.0));
    CHECK(s.terms().at(word_of({X(2)})) == cplx(0.0, -2.0));
    CHECK(s.terms().at(word{}) == cplx(0.5, -0.25));

    CHECK(parse_polynomial("X1 - X1", 1).is_zero());
    CHECK(parse_polynomial("X1^0", 1).terms().begin()->first == word{});
}

TEST_CASE("errors carry positions") {
    try {
        parse_polynomial("X1 + * X2", 2);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.position() == 5);
    }
    CHECK_THROWS_AS(parse_polynomial("X9", 2), parse_error);        // out of alphabet
    CHECK_THROWS_AS(parse_polynomial("Z1", 2, 0), parse_error);     // no Z letters declared
    CHECK_THROWS_AS(parse_polynomial("X1 +", 2), parse_error);      // dangling operator
    CHECK_THROWS_AS(parse_polynomial("(1+2)", 2), parse_error);     // not a complex literal
}

TEST_CASE("printer round-trips") {
    CHECK(print_polynomial(scalar_poly(2, 0)) == "0");
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto p = oracles::random_scalar_poly(3, 2, 4, 5, 900 + s);
        auto back = parse_polynomial(print_polynomial(p), 3, 2);
        CHECK(back.max_coeff_deviation(p) < 1e-12);
    }
    CHECK(print_polynomial(parse_polynomial("X1^3", 1)) == "X1*X1*X1");
}

TEST_CASE("json round-trip and matrix coefficients") {
    auto p = oracles::random_scalar_poly(2, 1, 3, 4, 950);
    auto j = poly_to_json(p);
    CHECK(scalar_poly_from_json(j, 2, 1).max_coeff_deviation(p) < 1e-15);

    nlohmann::json jm = {
        {"terms",
         {{{"coeff", {{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {2.0, -1.0}}}},
           {"word", {"X1", "Z2"}}}}}};
    auto m = matrix_poly_from_json(jm, 1, 2);
    REQUIRE(m.coeff_dim() == 2);
    const auto& c = m.terms().at(word_of({X(1), Z(2)}));
    CHECK(c(0, 0) == cplx(1.0, 0.0));
    CHECK(c(1, 1) == cplx(2.0, -1.0));
}
