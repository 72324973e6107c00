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

// Random-matrix laboratory: GUE and Haar sampling from a counter-based
// generator (bit-reproducible, embarrassingly parallel), the exact Gaussian
// Wick oracle for mixed moments as integer series in 1/N^2, the classical
// three-term moment recursion, Monte Carlo moment and L^{2k} norm tables,
// strong-convergence experiments against Fock-side free limits, and norm
// tail checks.

#ifndef FREEWICK_RMT_HPP
#define FREEWICK_RMT_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include "fock.hpp"
#include "wick.hpp"

namespace freewick::rmt {

using Eigen::MatrixXcd;
using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

struct rng_spec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// ---------------------------------------------------------------------------
// Sampling.

/// GUE: Hermitian, diagonal entries N(0, 1/N), off-diagonal real and
/// imaginary parts N(0, 1/(2N)); normalized so E ts(X^2) = 1.
inline std::vector<MatrixXcd> sample_gue(int N, int d, const rng_spec& rng) {
    if (N < 1 || N > caps::matrix_dim)
        throw capacity_error("sample_gue: N outside [1, " + std::to_string(caps::matrix_dim) +
                             "]");
    const double diag_sd = 1.0 / std::sqrt(static_cast<double>(N));
    const double off_sd = 1.0 / std::sqrt(2.0 * N);
    std::vector<MatrixXcd> out;
    out.reserve(d);
    for (int t = 0; t < d; ++t) {
        MatrixXcd x(N, N);
        for (int i = 0; i < N; ++i) {
            const std::uint64_t base =
                (static_cast<std::uint64_t>(t) * N + i) * N * 2;
            x(i, i) = diag_sd * rng::gaussian(rng.seed, rng.stream, base + 2 * i);
            for (int j = i + 1; j < N; ++j) {
                const double re = off_sd * rng::gaussian(rng.seed, rng.stream, base + 2 * j);
                const double im =
                    off_sd * rng::gaussian(rng.seed, rng.stream, base + 2 * j + 1);
                x(i, j) = cplx(re, im);
                x(j, i) = cplx(re, -im);
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

/// Haar unitary: QR of a complex Ginibre matrix with the phases of the
/// triangular factor's diagonal divided out (without the phase correction the
/// law is not Haar).
inline MatrixXcd sample_haar(int N, const rng_spec& rng) {
    if (N < 1 || N > caps::matrix_dim)
        throw capacity_error("sample_haar: N outside [1, " + std::to_string(caps::matrix_dim) +
                             "]");
    MatrixXcd g(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const std::uint64_t base = 2 * (static_cast<std::uint64_t>(i) * N + j);
            g(i, j) = cplx(rng::gaussian(rng.seed, rng.stream, base),
                           rng::gaussian(rng.seed, rng.stream, base + 1));
        }
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    MatrixXcd q = qr.householderQ();
    const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < N; ++j) {
        const cplx rjj = r(j, j);
        const double a = std::abs(rjj);
        q.col(j) *= a == 0.0 ? cplx(1.0, 0.0) : rjj / a;
    }
    return q;
}

/// Evaluation in fixed matrices; matrix coefficients tensorize with the
/// coefficient as the slow index.
template <class C>
MatrixXcd eval_poly_matrices(const nc_polynomial<C>& p, const std::vector<MatrixXcd>& xs,
                             const std::vector<MatrixXcd>& zs = {}) {
    fock::assignment a;
    a.x_ops = xs;
    a.z_ops = zs;
    return fock::evaluate_poly(p, a);
}

// ---------------------------------------------------------------------------
// Exact Gaussian Wick oracle.
//
// E[ts_N(X_{a_1}...X_{a_k})] = sum over pairings with matching letters of
// N^{#cycles(c.pi) - 1 - k/2} where c is the full cycle; the exponent deficit
// is even, so the moment is an integer series in 1/N^2.  The constant term
// collects exactly the non-crossing pairings, i.e. the free trace.

using moment_series = std::vector<bigint>;  // index p: coefficient of N^{-2p}

namespace detail {

inline int cycles_of(const std::vector<int>& perm) {
    const int k = static_cast<int>(perm.size());
    std::vector<char> seen(k, 0);
    int cycles = 0;
    for (int s = 0; s < k; ++s) {
        if (seen[s]) continue;
        ++cycles;
        for (int t = s; !seen[t]; t = perm[t]) seen[t] = 1;
    }
    return cycles;
}

inline void pairing_rec(std::vector<int>& avail, const std::vector<int>& letters,
                        std::vector<int>& partner, moment_series& acc) {
    if (avail.empty()) {
        const int k = static_cast<int>(partner.size());
        std::vector<int> gp(k);
        for (int i = 0; i < k; ++i) gp[i] = (partner[i] + 1) % k;  // full cycle after pi
        const int genus2 = k / 2 + 1 - cycles_of(gp);              // = 2 * genus >= 0
        const std::size_t p = static_cast<std::size_t>(genus2 / 2);
        if (acc.size() <= p) acc.resize(p + 1, 0);
        acc[p] += 1;
        return;
    }
    const int first = avail[0];
    for (std::size_t j = 1; j < avail.size(); ++j) {
        const int other = avail[j];
        if (letters[first] != letters[other]) continue;
        partner[first] = other;
        partner[other] = first;
        std::vector<int> rest;
        rest.reserve(avail.size() - 2);
        for (std::size_t t = 1; t < avail.size(); ++t)
            if (t != j) rest.push_back(avail[t]);
        pairing_rec(rest, letters, partner, acc);
    }
}

}  // namespace detail

/// Integer coefficients of E[ts_N(word)] in powers of 1/N^2 (empty for odd
/// letter counts).  Word letters are slot indices in [1, d].
inline moment_series genus_expansion(const std::vector<int>& word_slots) {
    const int k = static_cast<int>(word_slots.size());
    if (k > caps::genus_word_len)
        throw capacity_error("genus_expansion: word length cap is " +
                             std::to_string(caps::genus_word_len));
    moment_series acc;
    if (k % 2 == 1) return acc;
    if (k == 0) return {bigint(1)};
    std::vector<int> avail(k), partner(k, -1);
    for (int i = 0; i < k; ++i) avail[i] = i;
    detail::pairing_rec(avail, word_slots, partner, acc);
    return acc;
}

inline bigrat evaluate_series(const moment_series& s, int N) {
    bigrat acc = 0;
    const bigint n2 = bigint(N) * N;
    bigrat pw = 1;
    for (const bigint& c : s) {
        acc += bigrat(c) / pw;
        pw *= bigrat(n2);
    }
    return acc;
}

inline bigrat gue_exact_mixed_moment(const std::vector<int>& word_slots, int N) {
    return evaluate_series(genus_expansion(word_slots), N);
}

/// Series coefficients of E[ts_N X^{2k}] for k = 0..k_max via the classical
/// three-term recursion (k+2) m_{k+1} = (4k+2) m_k + k(4k^2-1) N^{-2} m_{k-1},
/// cross-checked against the pairing oracle in exact arithmetic for k <= 7.
inline std::vector<moment_series> harer_zagier_series(int k_max) {
    if (k_max > caps::harer_zagier_k)
        throw capacity_error("harer_zagier: k cap is " + std::to_string(caps::harer_zagier_k));
    std::vector<moment_series> m(std::max(2, k_max + 1));
    m[0] = {bigint(1)};
    if (k_max >= 1) m[1] = {bigint(1)};
    for (int k = 1; k + 1 <= k_max; ++k) {
        moment_series next(k / 2 + 2, bigint(0));
        for (std::size_t p = 0; p < next.size(); ++p) {
            bigint acc = 0;
            if (p < m[k].size()) acc += bigint(4 * k + 2) * m[k][p];
            if (p >= 1 && p - 1 < m[k - 1].size())
                acc += bigint(k) * (4 * k * k - 1) * m[k - 1][p - 1];
            if (acc % (k + 2) != 0)
                throw consistency_error("harer_zagier: recursion left a remainder");
            next[p] = acc / (k + 2);
        }
        while (!next.empty() && next.back() == 0) next.pop_back();
        m[k + 1] = std::move(next);
    }
    m.resize(k_max + 1);
    for (int k = 0; k <= std::min(k_max, 7); ++k) {
        const moment_series direct = genus_expansion(std::vector<int>(2 * k, 1));
        if (direct != m[k])
            throw consistency_error("harer_zagier: disagreement with the pairing oracle at k = " +
                                    std::to_string(k));
    }
    return m;
}

inline std::vector<bigrat> harer_zagier_moments(int N, int k_max) {
    const auto series = harer_zagier_series(k_max);
    std::vector<bigrat> out;
    out.reserve(series.size());
    for (const auto& s : series) out.push_back(evaluate_series(s, N));
    return out;
}

/// The 1/N^{2p} coefficients of a mixed moment up to p_max; the constant term
/// must equal the free trace of the word (non-crossing pairings only).
inline std::vector<bigint> expansion_coefficients(const std::vector<int>& word_slots, int p_max) {
    moment_series s = genus_expansion(word_slots);
    const double free_side = wick::plain_semicircular_trace(word_slots);
    const double alpha0 = s.empty() ? 0.0 : static_cast<double>(s[0]);
    if (std::abs(alpha0 - free_side) > 1e-9)
        throw consistency_error("expansion_coefficients: constant term differs from free trace");
    s.resize(p_max + 1, bigint(0));
    return s;
}

// ---------------------------------------------------------------------------
// Monte Carlo tables.

struct mc_row {
    std::string key;
    int N = 0;
    int k = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    bool has_exact = false;
    double exact = 0.0;
};

namespace detail {

inline void check_mc_caps(int N, long samples) {
    if (N < 1 || N > caps::matrix_dim)
        throw capacity_error("monte carlo: N cap is " + std::to_string(caps::matrix_dim));
    if (samples < 1 || samples > caps::mc_samples)
        throw capacity_error("monte carlo: sample cap is " + std::to_string(caps::mc_samples));
}

/// Squared singular values; Hermitian inputs skip the Gram product.
inline Eigen::VectorXd squared_singular_values(const MatrixXcd& m) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs2();
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMax(0.0);
}

inline std::pair<double, double> mean_stderr(const std::vector<double>& v) {
    const double mean =
        pairwise_sum(std::vector<double>(v), 0.0) / static_cast<double>(v.size());
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    const double var =
        v.size() > 1 ? pairwise_sum(std::move(sq), 0.0) / (static_cast<double>(v.size()) - 1)
                     : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace detail

/// Per-sample values of ts((P P*)^k)^{1/2k} from the eigenvalues of the
/// evaluated polynomial, for several k at once (one eigensolve per sample).
template <class C>
std::vector<std::vector<double>> mc_lp_norm_samples(const nc_polynomial<C>& p,
                                                    const std::vector<int>& ks, int N,
                                                    long samples, const rng_spec& rng) {
    detail::check_mc_caps(N, samples);
    std::vector<std::vector<double>> vals(ks.size(), std::vector<double>(samples));
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
        const auto xs = sample_gue(N, p.num_x(), {rng.seed, rng.stream + s});
        const MatrixXcd m = eval_poly_matrices(p, xs);
        const Eigen::VectorXd sq = detail::squared_singular_values(m);
        for (std::size_t t = 0; t < ks.size(); ++t) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < sq.size(); ++i)
                acc += std::pow(sq[i], static_cast<double>(ks[t]));
            acc /= static_cast<double>(sq.size());
            vals[t][s] = std::pow(acc, 1.0 / (2.0 * ks[t]));
        }
    });
    return vals;
}

template <class C>
mc_row mc_lp_norm(const nc_polynomial<C>& p, int k, int N, long samples, const rng_spec& rng,
                  const std::string& key = "") {
    const auto vals = mc_lp_norm_samples(p, {k}, N, samples, rng);
    auto [mean, se] = detail::mean_stderr(vals[0]);
    return {key, N, k, samples, rng.seed, mean, se, false, 0.0};
}

/// Empirical mean of ts_N(P^k) for scalar coefficients.
template <class C>
mc_row mc_moment(const nc_polynomial<C>& p, int k, int N, long samples, const rng_spec& rng,
                 const std::string& key = "") {
    static_assert(!coeff_traits<C>::is_matrix, "matrix-valued moments: use mc_moment_matrix");
    detail::check_mc_caps(N, samples);
    std::vector<double> re(samples), im(samples);
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
        const auto xs = sample_gue(N, p.num_x(), {rng.seed, rng.stream + s});
        MatrixXcd m = eval_poly_matrices(p, xs);
        MatrixXcd pk = MatrixXcd::Identity(m.rows(), m.cols());
        for (int t = 0; t < k; ++t) pk = pk * m;
        const cplx v = pk.trace() / static_cast<double>(pk.rows());
        re[s] = v.real();
        im[s] = v.imag();
    });
    auto [mean_re, se_re] = detail::mean_stderr(re);
    auto [mean_im, se_im] = detail::mean_stderr(im);
    mc_row row{key, N, k, samples, rng.seed, mean_re, std::hypot(se_re, se_im), false, 0.0};
    (void)mean_im;
    return row;
}

/// Matrix-valued moment mean id_A (x) ts_N(P^k) with entrywise standard
/// errors.
struct mc_matrix_row {
    int N = 0, k = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    MatrixXcd mean;
    Eigen::MatrixXd stderr_entry;
};

inline mc_matrix_row mc_moment_matrix(const matrix_poly& p, int k, int N, long samples,
                                      const rng_spec& rng) {
    detail::check_mc_caps(N, samples);
    const int cd = p.coeff_dim();
    std::vector<MatrixXcd> vals(samples);
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
        const auto xs = sample_gue(N, p.num_x(), {rng.seed, rng.stream + s});
        MatrixXcd m = eval_poly_matrices(p, xs);
        MatrixXcd pk = MatrixXcd::Identity(m.rows(), m.cols());
        for (int t = 0; t < k; ++t) pk = pk * m;
        // partial trace over the N factor (coefficient is the slow index)
        MatrixXcd out = MatrixXcd::Zero(cd, cd);
        for (int a = 0; a < cd; ++a)
            for (int b = 0; b < cd; ++b) {
                cplx acc{};
                for (int i = 0; i < N; ++i) acc += pk(a * N + i, b * N + i);
                out(a, b) = acc / static_cast<double>(N);
            }
        vals[s] = out;
    });
    mc_matrix_row row;
    row.N = N;
    row.k = k;
    row.samples = samples;
    row.seed = rng.seed;
    row.mean = pairwise_sum(vals, MatrixXcd::Zero(cd, cd).eval()) / static_cast<double>(samples);
    row.stderr_entry = Eigen::MatrixXd::Zero(cd, cd);
    for (const auto& v : vals)
        row.stderr_entry += (v - row.mean).cwiseAbs2().real();
    if (samples > 1)
        row.stderr_entry =
            (row.stderr_entry / (samples - 1.0) / static_cast<double>(samples)).cwiseSqrt();
    return row;
}

// ---------------------------------------------------------------------------
// Strong convergence experiment: X^N (x) I_M against x (x) 1 with fixed
// deterministic M x M matrices on the other leg.

struct strongconv_row {
    int N = 0;
    double norm_mean = 0.0, norm_stderr = 0.0;
    double lpk_mean = 0.0, lpk_stderr = 0.0;
    double gap = 0.0;
};

struct strongconv_report {
    double free_norm = 0.0;
    double free_increment = 0.0;  // last depth-doubling change
    int free_depth = 0;
    std::vector<strongconv_row> rows;
};

namespace detail {

/// Folds the deterministic letters of P(X, Z) into M x M coefficients: each
/// monomial becomes (ordered product of Z matrices) (x) (X subword).  Valid
/// because the two legs of the tensor product commute.
inline matrix_poly fold_deterministic(const scalar_poly& p, const std::vector<MatrixXcd>& ys,
                                      int mdim) {
    matrix_poly out(p.num_x(), 0, mdim);
    for (const auto& [w, c] : p.terms()) {
        MatrixXcd coeff = MatrixXcd::Identity(mdim, mdim);
        std::vector<generator> xs;
        for (const auto& g : w.letters) {
            if (g.kind == gen_kind::semicircular) {
                xs.push_back(g);
            } else {
                if (g.index > static_cast<int>(ys.size()))
                    throw std::invalid_argument("strong convergence: missing Y matrix");
                coeff = coeff * ys[g.index - 1];
            }
        }
        out.add_term(word{std::move(xs)}, MatrixXcd(c * coeff));
    }
    return out;
}

}  // namespace detail

/// Free-side norm |P(x (x) 1, 1 (x) y)|: deterministic letters fold into the
/// coefficient algebra, and the depth doubles until successive truncated
/// norms stabilize within tol (truncations increase toward the limit).
inline std::tuple<double, double, int> free_side_norm(const matrix_poly& folded, double tol,
                                                      std::size_t dim_cap = 60000) {
    const int d = std::max(1, folded.num_x());
    double prev = -1.0, cur = 0.0, inc = 0.0;
    int depth = 8;
    for (;;) {
        const fock::fock_basis b(d, depth);
        cur = fock::op_norm(fock::evaluate_in_semicircular(b, folded));
        inc = prev < 0.0 ? cur : cur - prev;
        if (prev >= 0.0 && std::abs(inc) < tol) break;
        prev = cur;
        std::size_t next_dim;
        try {
            next_dim = fock::fock_basis(d, depth * 2).dim;
        } catch (const capacity_error&) {
            break;  // report the deepest affordable truncation
        }
        if (next_dim * folded.coeff_dim() > dim_cap) break;
        depth *= 2;
    }
    return {cur, inc, depth};
}

inline strongconv_report strong_convergence_experiment(const scalar_poly& p,
                                                       const std::vector<int>& Ns, int M,
                                                       const std::vector<MatrixXcd>& ys, int k,
                                                       long samples, const rng_spec& rng) {
    if (M > 8) throw capacity_error("strong convergence: M cap is 8");
    if (p.degree() > 4) throw capacity_error("strong convergence: degree cap is 4");
    for (const auto& y : ys)
        if (y.rows() != M || y.cols() != M)
            throw std::invalid_argument("strong convergence: Y matrices must be M x M");

    strongconv_report rep;
    const matrix_poly folded = detail::fold_deterministic(p, ys, M);
    std::tie(rep.free_norm, rep.free_increment, rep.free_depth) = free_side_norm(folded, 1e-3);

    const int d = std::max(1, p.num_x());
    for (int N : Ns) {
        detail::check_mc_caps(N, samples);
        std::vector<double> norms(samples), lpks(samples);
        parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
            const auto xs = sample_gue(N, d, {rng.seed, rng.stream + s});
            // X^N (x) I_M and I_N (x) Y_j
            std::vector<MatrixXcd> xts, yts;
            for (const auto& x : xs) xts.push_back(fock::kron(x, MatrixXcd::Identity(M, M)));
            for (const auto& y : ys) yts.push_back(fock::kron(MatrixXcd::Identity(N, N), y));
            fock::assignment a;
            a.x_ops = xts;
            a.z_ops = yts;
            const MatrixXcd m = fock::evaluate_poly(p, a);
            const Eigen::VectorXd sq = detail::squared_singular_values(m);
            norms[s] = std::sqrt(sq.maxCoeff());
            double acc = 0.0;
            for (Eigen::Index i = 0; i < sq.size(); ++i)
                acc += std::pow(sq[i], static_cast<double>(k));
            lpks[s] = std::pow(acc / static_cast<double>(sq.size()), 1.0 / (2.0 * k));
        });
        strongconv_row row;
        row.N = N;
        std::tie(row.norm_mean, row.norm_stderr) = detail::mean_stderr(norms);
        std::tie(row.lpk_mean, row.lpk_stderr) = detail::mean_stderr(lpks);
        row.gap = std::abs(row.norm_mean - rep.free_norm);
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Norm tail check.

struct tail_cell {
    double u = 0.0;
    double freq = 0.0;
    double wilson_lo = 0.0, wilson_hi = 0.0;
};

struct tail_row {
    int N = 0;
    std::vector<tail_cell> cells;
    double median_norm = 0.0;
};

/// Exceedance frequencies of |X^N| over 2 + u with Wilson intervals.
/// Frequencies must be non-increasing in u (nested events) and, across the
/// N grid, non-increasing in N for each u; the median norm concentrates near
/// the semicircle edge.
inline std::vector<tail_row> tail_check(const std::vector<int>& Ns, long samples,
                                        const rng_spec& rng) {
    const std::vector<double> us = {0.2, 0.5, 1.0};
    std::vector<tail_row> rows;
    for (int N : Ns) {
        detail::check_mc_caps(N, samples);
        std::vector<double> norms(samples);
        parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
            const auto xs = sample_gue(N, 1, {rng.seed, rng.stream + s});
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(xs[0], Eigen::EigenvaluesOnly);
            norms[s] = std::max(std::abs(es.eigenvalues().minCoeff()),
                                std::abs(es.eigenvalues().maxCoeff()));
        });
        tail_row row;
        row.N = N;
        std::vector<double> sorted = norms;
        std::sort(sorted.begin(), sorted.end());
        row.median_norm = sorted[sorted.size() / 2];
        for (double u : us) {
            long hits = 0;
            for (double v : norms) hits += v >= 2.0 + u;
            const double phat = static_cast<double>(hits) / static_cast<double>(samples);
            const double z = 1.959963984540054;
            const double n = static_cast<double>(samples);
            const double denom = 1.0 + z * z / n;
            const double center = (phat + z * z / (2.0 * n)) / denom;
            const double half =
                z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
            row.cells.push_back({u, phat, std::max(0.0, center - half), center + half});
        }
        for (std::size_t t = 1; t < row.cells.size(); ++t)
            if (row.cells[t].freq > row.cells[t - 1].freq + 1e-15)
                throw consistency_error("tail_check: frequencies increased in u");
        rows.push_back(std::move(row));
    }
    for (std::size_t r = 1; r < rows.size(); ++r)
        for (std::size_t t = 0; t < rows[r].cells.size(); ++t)
            if (rows[r].N > rows[r - 1].N &&
                rows[r].cells[t].freq > rows[r - 1].cells[t].freq + 1e-15)
                throw consistency_error("tail_check: frequencies increased in N");
    return rows;
}

}  // namespace freewick::rmt

#endif
