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
#include <freewick/bounds.hpp>
#include <freewick/parse.hpp>

#include "oracles.hpp"

using namespace freewick;
using namespace freewick::bounds;
using Eigen::MatrixXcd;

namespace {

std::vector<scalar_poly> random_tuple(int n, int d, std::uint64_t stream) {
    std::vector<scalar_poly> polys;
    for (int j = 0; j < n; ++j) {
        auto p = oracles::random_scalar_poly(d, 0, 3, 2, stream + 10 * j);
        if (p.is_zero()) p = scalar_poly::constant(d, 0, cplx{1.0, 0.0});
        polys.push_back(std::move(p));
    }
    return polys;
}

}  // namespace

TEST_CASE("twisted product") {
    SECTION("identity permutation is the plain product") {
        auto p = oracles::random_scalar_poly(2, 0, 3, 3, 50);
        auto q = oracles::random_scalar_poly(2, 0, 3, 3, 51);
        auto tw = twisted_product<cplx>({p, q}, {1, 2});
        CHECK(tw.max_coeff_deviation(p * q) < 1e-14);
    }
    SECTION("swap on single letters gives the commuted word") {
        scalar_poly x1(1, 0);
        x1.add_term(word_of({X(1)}), cplx{1.0, 0.0});
        auto tw = twisted_product<cplx>({x1, x1}, {2, 1});
        CHECK(tw.max_coeff_deviation(x1 * x1) == 0.0);
    }
    SECTION("matrix-model swap: twisted multiply of the swap tensor scales by N") {
        // m_(12) on (M_N (x) M_N)^(x)2 sends U (x) U to N U for the swap
        // tensor U = sum E_ij (x) E_ji; computed here directly on matrices
        const int N = 4;
        MatrixXcd u = MatrixXcd::Zero(N * N, N * N);
        MatrixXcd out = MatrixXcd::Zero(N * N, N * N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                MatrixXcd eij = MatrixXcd::Zero(N, N), eji = MatrixXcd::Zero(N, N);
                eij(i, j) = 1;
                eji(j, i) = 1;
                u += fock::kron(eij, eji);
                for (int k = 0; k < N; ++k)
                    for (int l = 0; l < N; ++l) {
                        MatrixXcd ekl = MatrixXcd::Zero(N, N), elk = MatrixXcd::Zero(N, N);
                        ekl(k, l) = 1;
                        elk(l, k) = 1;
                        // (a1 (x) b1) . (a2 (x) b2) -> a1 a2 (x) b2 b1
                        out += fock::kron(MatrixXcd(eij * ekl), MatrixXcd(elk * eji));
                    }
            }
        CHECK((out - static_cast<double>(N) * u).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(fock::op_norm(u) == Catch::Approx(1.0).margin(1e-10));  // U is unitary
    }
    SECTION("bad permutations are rejected") {
        scalar_poly x1(1, 0);
        x1.add_term(word_of({X(1)}), cplx{1.0, 0.0});
        CHECK_THROWS_AS(twisted_product<cplx>({x1, x1}, {1}), std::invalid_argument);
        CHECK_THROWS_AS(twisted_product<cplx>({x1, x1}, {1, 1}), std::invalid_argument);
    }
}

TEST_CASE("derivative norm profile") {
    SECTION("P = X1") {
        scalar_poly p(1, 0);
        p.add_term(word_of({X(1)}), cplx{1.0, 0.0});
        profile_params pp;
        pp.d = 1;
        pp.base_pad = 40;  // deep enough to see the semicircle edge
        auto s = derivative_norm_profile(p, pp);
        CHECK(s[0] == Catch::Approx(2.0).margin(0.05));
        CHECK(s[1] == Catch::Approx(1.0).margin(1e-10));  // |1 (x) 1| = 1
        CHECK(s[2] == 0.0);
        CHECK(s[3] == 0.0);
    }
    SECTION("constants keep only the zeroth entry") {
        auto a = scalar_poly::constant(2, 0, cplx{0.0, -2.5});
        profile_params pp;
        pp.d = 2;
        auto s = derivative_norm_profile(a, pp);
        CHECK(s[0] == Catch::Approx(2.5).margin(1e-12));
        CHECK(s[1] == 0.0);
    }
    SECTION("profiles are homogeneous in the polynomial") {
        auto p = oracles::random_scalar_poly(2, 0, 3, 3, 60);
        profile_params pp;
        pp.d = 2;
        auto s1 = derivative_norm_profile(p, pp);
        auto s2 = derivative_norm_profile(p * cplx{3.0, 0.0}, pp);
        for (std::size_t i = 0; i < s1.size(); ++i)
            CHECK(s2[i] == Catch::Approx(3.0 * s1[i]).margin(1e-8));
    }
    SECTION("order cap") {
        profile_params pp;
        pp.max_order = 4;
        scalar_poly p(1, 0);
        p.add_term(word_of({X(1)}), cplx{1.0, 0.0});
        CHECK_THROWS_AS(derivative_norm_profile(p, pp), capacity_error);
    }
}

TEST_CASE("budget LP") {
    SECTION("forced choice for constants") {
        std::vector<std::vector<double>> profiles = {{2.0}, {3.0}};
        auto sol = profile_budget_optimum(profiles, 6.0);
        CHECK(sol.log_value == Catch::Approx(std::log(6.0)).margin(1e-12));
        CHECK(sol.alpha.at({0, 1}) == 1.0);
        CHECK(sol.alpha.at({0, 2}) == 1.0);
    }
    SECTION("budget slack takes the per-factor maximum") {
        std::vector<std::vector<double>> profiles = {{2.0, 1.0}, {1.0, 1.5}};
        auto sol = profile_budget_optimum(profiles, 6.0);
        CHECK(sol.log_value == Catch::Approx(std::log(2.0) + std::log(1.5)).margin(1e-12));
    }
    SECTION("hand-solved two-vertex instance") {
        // n=1, S = (2, 1): unconstrained max is 2
        std::vector<std::vector<double>> profiles = {{2.0, 1.0}};
        CHECK(master_rhs(profiles, 1) ==
              Catch::Approx(80.0 * std::numbers::e * 2.0).epsilon(1e-12));
    }
    SECTION("tight budgets split fractionally and match the vertex oracle") {
        for (std::uint64_t s = 0; s < 40; ++s) {
            const int n = 1 + static_cast<int>(oracles::test_uniform(70 + s, 0) * 3) % 3;
            std::vector<std::vector<double>> profiles(n);
            std::vector<std::vector<double>> logs(n);
            std::vector<std::vector<int>> levels(n);
            for (int j = 0; j < n; ++j) {
                const int m = 2 + static_cast<int>(oracles::test_uniform(70 + s, j + 1) * 3) % 3;
                for (int i = 0; i < m; ++i) {
                    const double v =
                        0.05 + 8.0 * oracles::test_uniform(70 + s, 100 + 10 * j + i);
                    profiles[j].push_back(v);
                    logs[j].push_back(std::log(v));
                    levels[j].push_back(i);
                }
            }
            const double budget = 0.5 * n;  // tight, exercises the bisection
            const auto sol = profile_budget_optimum(profiles, budget);
            const double brute = oracles::lp_vertex_enumeration(logs, levels, budget);
            CHECK(sol.log_value == Catch::Approx(brute).margin(1e-9));
            double used = 0.0, val = 0.0, colsum = 0.0;
            for (const auto& [key, w] : sol.alpha) {
                used += key.first * w;
                val += w * std::log(profiles[key.second - 1][key.first]);
                colsum += w;
            }
            CHECK(used <= budget + 1e-9);
            CHECK(colsum == Catch::Approx(static_cast<double>(n)).margin(1e-12));
            CHECK(val == Catch::Approx(sol.log_value).margin(1e-7));
        }
    }
    SECTION("the optimum is symmetric under permuting the factors") {
        std::vector<std::vector<double>> profiles = {{2.0, 1.2, 0.3}, {0.9, 3.1}, {1.1}};
        auto a = profile_budget_optimum(profiles, 2.0);
        std::swap(profiles[0], profiles[2]);
        auto b = profile_budget_optimum(profiles, 2.0);
        CHECK(a.log_value == Catch::Approx(b.log_value).margin(1e-12));
    }
    SECTION("zero polynomial forces rhs 0") {
        std::vector<std::vector<double>> profiles = {{0.0, 0.0}};
        CHECK(master_rhs(profiles, 1) == 0.0);
    }
    SECTION("an unmeetable budget is rejected") {
        std::vector<std::vector<double>> profiles = {{0.0, 5.0}};  // only level 1 available
        CHECK_THROWS_AS(profile_budget_optimum(profiles, 0.5), std::invalid_argument);
    }
}

TEST_CASE("master inequality") {
    SECTION("single polynomial, identity permutation") {
        auto p = parse_polynomial("X1*X2 + 0.5*X2", 2);
        auto rep = master_inequality_check<cplx>({p}, {1}, 2);
        CHECK(rep.pass);
        CHECK(rep.lhs <= rep.rhs);
    }
    SECTION("random pairs with the swap") {
        for (std::uint64_t s = 0; s < 5; ++s) {
            auto polys = random_tuple(2, 2, 80 + 10 * s);
            auto rep = master_inequality_check<cplx>(polys, {2, 1}, 2);
            CHECK(rep.pass);
        }
    }
    SECTION("matrix coefficients") {
        std::vector<matrix_poly> polys;
        polys.push_back(oracles::random_matrix_poly(2, 0, 2, 2, 2, 85));
        polys.push_back(oracles::random_matrix_poly(2, 0, 2, 2, 2, 86));
        auto rep = master_inequality_check<Eigen::MatrixXcd>(polys, {2, 1}, 2);
        CHECK(rep.pass);
    }
    SECTION("rhs growth in the power is at most polynomial") {
        // for P_j = R^k the bound grows like k^{3n} |R(x)|^{2k}: the
        // normalized ratio stays bounded across k
        scalar_poly r = parse_polynomial("X1 + X2", 2);
        profile_params pp;
        pp.d = 2;
        std::vector<double> ratios;
        for (int k = 1; k <= 5; ++k) {
            auto rk = pow(r, k);
            auto prof = derivative_norm_profile(rk, pp);
            const double rhs = master_rhs({prof, prof}, 2);
            const double base = std::pow(prof[0], 2.0);
            ratios.push_back(rhs / (base * std::pow(static_cast<double>(k), 6.0)));
        }
        const double cap = *std::max_element(ratios.begin(), ratios.end());
        CHECK(cap <= ratios[0] * 1.0 + 1e-9);  // decreasing once normalized
    }
}

TEST_CASE("coefficient recovery") {
    const int d = 2;
    SECTION("single monomial") {
        matrix_poly p(d, 0, 2);
        Eigen::MatrixXcd a(2, 2);
        a << cplx(1, 2), cplx(0, -1), cplx(3, 0), cplx(-2, 1);
        p.add_term(word_of({X(1), X(2)}), a);
        fock::fock_basis b(d, 4);
        auto rec = coefficient_recovery(fock::evaluate_in_semicircular(b, p), b, 2, 3, d);
        CHECK(rec.max_coeff_deviation(p) < 1e-10);
    }
    SECTION("random round trips and the norm bound") {
        for (std::uint64_t s = 0; s < 6; ++s) {
            auto p = oracles::random_matrix_poly(d, 0, 2, 4, 5, 90 + s);
            fock::fock_basis b(d, 6);
            const auto t = fock::evaluate_in_semicircular(b, p);
            auto rec = coefficient_recovery(t, b, 2, 4, d);
            CHECK(rec.max_coeff_deviation(p) < 1e-8);

            double max_coeff = 0.0;
            for (const auto& [w, c] : p.terms())
                max_coeff = std::max(max_coeff, fock::op_norm(Eigen::MatrixXcd(c)));
            const double cn = recovery_constant(4, d);
            CHECK(max_coeff <= cn * fock::op_norm(t) + 1e-9);
        }
    }
    SECTION("depth too small is rejected") {
        fock::fock_basis b(d, 2);
        CHECK_THROWS_AS(
            coefficient_recovery(Eigen::MatrixXcd::Zero(b.dim, b.dim), b, 1, 3, d),
            std::invalid_argument);
    }
}
