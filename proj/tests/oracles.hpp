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

// Independent brute-force oracles used only by tests.  They deliberately
// avoid the library's algorithmic paths: full enumerations, term-by-term
// expansions, naive filters.

#ifndef FREEWICK_TEST_ORACLES_HPP
#define FREEWICK_TEST_ORACLES_HPP

#include <freewick/combin.hpp>
#include <freewick/ncalg.hpp>
#include <freewick/wick.hpp>

#include <algorithm>
#include <vector>

namespace oracles {

using freewick::cplx;
using freewick::word;

// All perfect matchings of [1, k] (no crossing filter).
inline std::vector<std::vector<std::pair<int, int>>> all_matchings(int k) {
    std::vector<std::vector<std::pair<int, int>>> out;
    if (k % 2 == 1) return out;
    std::vector<int> pts(k);
    for (int i = 0; i < k; ++i) pts[i] = i + 1;
    std::vector<std::pair<int, int>> cur;
    std::function<void(std::vector<int>)> rec = [&](std::vector<int> rest) {
        if (rest.empty()) {
            out.push_back(cur);
            return;
        }
        const int first = rest[0];
        for (std::size_t j = 1; j < rest.size(); ++j) {
            cur.emplace_back(first, rest[j]);
            std::vector<int> next;
            for (std::size_t t = 1; t < rest.size(); ++t)
                if (t != j) next.push_back(rest[t]);
            rec(next);
            cur.pop_back();
        }
    };
    rec(pts);
    return out;
}

// Non-crossing matchings by filtering the full list.
inline std::vector<std::vector<std::pair<int, int>>> noncrossing_matchings(int k) {
    auto all = all_matchings(k);
    std::vector<std::vector<std::pair<int, int>>> out;
    for (auto& m : all) {
        freewick::combin::pair_partition pp;
        pp.pairs = m;
        if (freewick::combin::is_noncrossing(pp)) out.push_back(m);
    }
    return out;
}

// Wick sum over the non-crossing filter; independent of the library's
// recursive summer.
inline double semicircular_trace_by_filter(const freewick::wick::family_word& w,
                                           const freewick::wick::covariance_spec& cov) {
    if (w.size() % 2 == 1) return 0.0;
    double total = 0.0;
    for (const auto& m : noncrossing_matchings(static_cast<int>(w.size()))) {
        double prod = 1.0;
        for (auto [p, q] : m) {
            const auto& a = w[p - 1];
            const auto& b = w[q - 1];
            prod *= a.slot == b.slot ? cov(a.family, b.family) : 0.0;
        }
        total += prod;
    }
    return total;
}

// Term-by-term product of two polynomials, written independently of
// nc_polynomial::operator* (plain nested loops over term lists).
template <class C>
freewick::nc_polynomial<C> naive_product(const freewick::nc_polynomial<C>& a,
                                         const freewick::nc_polynomial<C>& b) {
    std::vector<std::pair<word, C>> terms;
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms()) {
            word w = wa;
            w.letters.insert(w.letters.end(), wb.letters.begin(), wb.letters.end());
            terms.emplace_back(std::move(w), C(ca * cb));
        }
    freewick::nc_polynomial<C> r(a.num_x(), a.num_z(), a.coeff_dim());
    for (auto& [w, c] : terms) r.add_term(w, c);
    return r;
}

// Derivative of a monomial by direct occurrence enumeration.
inline freewick::tensor_polynomial<cplx> naive_partial(const freewick::scalar_poly& p, int i) {
    freewick::tensor_polynomial<cplx> t(p.num_x(), p.num_z(), 1, 2);
    for (const auto& [w, c] : p.terms())
        for (std::size_t pos = 0; pos < w.letters.size(); ++pos)
            if (w.letters[pos] == freewick::X(i)) {
                word a{std::vector<freewick::generator>(w.letters.begin(),
                                                        w.letters.begin() + pos)};
                word b{std::vector<freewick::generator>(w.letters.begin() + pos + 1,
                                                        w.letters.end())};
                t.add_term({a, b}, c);
            }
    return t;
}

// Exhaustive LP over the vertices of {alpha >= 0, per-j sums = 1,
// sum i*alpha <= budget}: every per-j pure choice, plus every way to split a
// single j across two levels to exhaust the budget exactly.
inline double lp_vertex_enumeration(const std::vector<std::vector<double>>& log_s,
                                    const std::vector<std::vector<int>>& levels, double budget) {
    const int n = static_cast<int>(log_s.size());
    std::vector<int> choice(n, 0);
    double best = -std::numeric_limits<double>::infinity();
    std::function<void(int)> rec = [&](int j) {
        if (j == n) {
            double used = 0.0, val = 0.0;
            for (int t = 0; t < n; ++t) {
                used += levels[t][choice[t]];
                val += log_s[t][choice[t]];
            }
            if (used <= budget + 1e-12) best = std::max(best, val);
            // allow one coordinate to split between its choice and any other
            // level so the budget constraint can be exactly tight
            for (int t = 0; t < n; ++t)
                for (std::size_t alt = 0; alt < levels[t].size(); ++alt) {
                    const double i0 = levels[t][choice[t]], i1 = levels[t][alt];
                    if (i1 == i0) continue;
                    const double rest = used - i0;
                    const double theta = (budget - rest - i0) / (i1 - i0);
                    if (theta < -1e-12 || theta > 1.0 + 1e-12) continue;
                    const double th = std::clamp(theta, 0.0, 1.0);
                    const double v =
                        val - log_s[t][choice[t]] +
                        (1.0 - th) * log_s[t][choice[t]] + th * log_s[t][alt];
                    if (rest + (1.0 - th) * i0 + th * i1 <= budget + 1e-12)
                        best = std::max(best, v);
                }
            return;
        }
        for (std::size_t c = 0; c < levels[j].size(); ++c) {
            choice[j] = static_cast<int>(c);
            rec(j + 1);
        }
    };
    rec(0);
    return best;
}

// Deterministic pseudo-random helpers for test instance generation.
inline double test_uniform(std::uint64_t a, std::uint64_t b) {
    return freewick::rng::uniform(0xfeedULL, a, b);
}

inline freewick::scalar_poly random_scalar_poly(int d, int q, int max_deg, int terms,
                                                std::uint64_t stream) {
    freewick::scalar_poly p(d, q);
    std::uint64_t ctr = 0;
    for (int t = 0; t < terms; ++t) {
        const int len = static_cast<int>(test_uniform(stream, ctr++) * (max_deg + 1));
        std::vector<freewick::generator> ls;
        for (int l = 0; l < len; ++l) {
            const bool xkind = q == 0 || test_uniform(stream, ctr++) < 0.7;
            const int bound = xkind ? d : q;
            const int idx = 1 + static_cast<int>(test_uniform(stream, ctr++) * bound) % bound;
            ls.push_back(xkind ? freewick::X(idx) : freewick::Z(idx));
        }
        const double re = 2.0 * test_uniform(stream, ctr++) - 1.0;
        const double im = 2.0 * test_uniform(stream, ctr++) - 1.0;
        p.add_term(word{std::move(ls)}, cplx(re, im));
    }
    return p;
}

inline freewick::matrix_poly random_matrix_poly(int d, int q, int dim, int max_deg, int terms,
                                                std::uint64_t stream) {
    freewick::matrix_poly p(d, q, dim);
    std::uint64_t ctr = 1000000;
    for (int t = 0; t < terms; ++t) {
        const int len = static_cast<int>(test_uniform(stream, ctr++) * (max_deg + 1));
        std::vector<freewick::generator> ls;
        for (int l = 0; l < len; ++l) {
            const bool xkind = q == 0 || test_uniform(stream, ctr++) < 0.7;
            const int bound = xkind ? d : q;
            const int idx = 1 + static_cast<int>(test_uniform(stream, ctr++) * bound) % bound;
            ls.push_back(xkind ? freewick::X(idx) : freewick::Z(idx));
        }
        Eigen::MatrixXcd c(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s) {
                const double re = 2.0 * test_uniform(stream, ctr++) - 1.0;
                const double im = 2.0 * test_uniform(stream, ctr++) - 1.0;
                c(r, s) = cplx(re, im);
            }
        p.add_term(word{std::move(ls)}, c);
    }
    return p;
}

// Random PSD covariance with unit diagonal.
inline Eigen::MatrixXd random_unit_psd(int n, std::uint64_t stream) {
    Eigen::MatrixXd a(n, n);
    std::uint64_t ctr = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 2.0 * test_uniform(stream + 77, ctr++) - 1.0;
    Eigen::MatrixXd k = a * a.transpose();
    Eigen::VectorXd d = k.diagonal().cwiseSqrt().cwiseInverse();
    return d.asDiagonal() * k * d.asDiagonal();
}

}  // namespace oracles

#endif
