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

// The master operator inequality and coefficient recovery.
//
// For polynomials P_1..P_n with coefficients in a tracial algebra and the
// twisted product m_sigma (coefficients multiplied in order, words permuted
// by sigma), the norm of m_sigma(P_1 (x) ... (x) P_n)(x) is bounded by
// (80e)^n d^{3n} times a budgeted product of iterated-derivative norms:
// every factor picks a derivative order i with total order at most 3n, and
// the bound takes the best mixture.  The mixture optimum is a small LP
// solved here by a dual bisection on the budget multiplier.
//
// Coefficient recovery reads a_M back from compressions of an evaluated
// polynomial between the vacuum and a level-deg(M) basis vector, descending
// degree by degree; the recovery constant bounds max |a_M| / |P(x)|.

#ifndef FREEWICK_BOUNDS_HPP
#define FREEWICK_BOUNDS_HPP

#include <numbers>

#include "fock.hpp"

namespace freewick::bounds {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Twisted product.

/// m_sigma on simple tensors: coefficients in tensor order, words in sigma
/// order.  sigma maps positions 1..n to 1..n.
template <class C>
nc_polynomial<C> twisted_product(const std::vector<nc_polynomial<C>>& polys,
                                 const std::vector<int>& sigma) {
    const int n = static_cast<int>(polys.size());
    if (static_cast<int>(sigma.size()) != n)
        throw std::invalid_argument("twisted_product: permutation size mismatch");
    std::vector<char> seen(n, 0);
    for (int s : sigma) {
        if (s < 1 || s > n || seen[s - 1])
            throw std::invalid_argument("twisted_product: not a permutation");
        seen[s - 1] = 1;
    }
    for (int j = 1; j < n; ++j) polys[0].check_compatible(polys[j]);

    nc_polynomial<C> acc(polys[0].num_x(), polys[0].num_z(), polys[0].coeff_dim());
    using term_iter = typename std::map<word, C>::const_iterator;
    std::vector<term_iter> its(n), ends(n);
    for (int j = 0; j < n; ++j) {
        if (polys[j].is_zero()) return acc;
        its[j] = polys[j].terms().begin();
        ends[j] = polys[j].terms().end();
    }
    for (;;) {
        C coeff = its[0]->second;
        for (int j = 1; j < n; ++j) coeff = coeff * its[j]->second;
        word w = its[sigma[0] - 1]->first;
        for (int j = 1; j < n; ++j) w = w * its[sigma[j] - 1]->first;
        acc.add_term(w, coeff);
        int pos = n - 1;
        while (pos >= 0) {
            if (++its[pos] != ends[pos]) break;
            its[pos] = polys[pos].terms().begin();
            --pos;
        }
        if (pos < 0) break;
    }
    return acc;
}

/// Dense evaluation of m_sigma(P_1 (x) .. (x) P_n)(x) on a truncated Fock
/// space at depth sum of degrees (norms of compressions are certified lower
/// bounds).
template <class C>
MatrixXcd twisted_product_operator(const std::vector<nc_polynomial<C>>& polys,
                                   const std::vector<int>& sigma, int d) {
    int depth = 0;
    for (const auto& p : polys) depth += std::max(0, p.degree());
    const fock::fock_basis b(d, std::max(1, depth));
    return fock::evaluate_in_semicircular(b, twisted_product(polys, sigma));
}

// ---------------------------------------------------------------------------
// Tensored evaluation of derivative tensors, each slot on its own truncated
// Fock copy, with a matrix-free norm when the joint dimension is large.

namespace detail {

struct tensor_operator {
    std::vector<MatrixXcd> coeffs;              // per term (1x1 for scalars)
    std::vector<std::vector<MatrixXcd>> slots;  // per term, per slot
    std::vector<Eigen::Index> dims;             // coeff dim + slot dims

    Eigen::Index total_dim() const {
        Eigen::Index t = 1;
        for (auto d : dims) t *= d;
        return t;
    }

    /// Applies one slot operator (slot position s in dims) to v.
    static void apply_slot(const MatrixXcd& m, Eigen::Index pre, Eigen::Index dim,
                           Eigen::Index post, const VectorXcd& v, VectorXcd& out) {
        for (Eigen::Index p = 0; p < pre; ++p)
            for (Eigen::Index q = 0; q < post; ++q) {
                // gather the strided fiber, multiply, scatter
                for (Eigen::Index r = 0; r < dim; ++r) {
                    cplx acc{};
                    for (Eigen::Index c = 0; c < dim; ++c)
                        acc += m(r, c) * v[(p * dim + c) * post + q];
                    out[(p * dim + r) * post + q] = acc;
                }
            }
    }

    VectorXcd apply(const VectorXcd& v, bool adjoint) const {
        VectorXcd total = VectorXcd::Zero(v.size());
        for (std::size_t t = 0; t < coeffs.size(); ++t) {
            VectorXcd cur = v, next(v.size());
            Eigen::Index pre = 1, post = total_dim();
            for (std::size_t s = 0; s < dims.size(); ++s) {
                const MatrixXcd& m = s == 0 ? coeffs[t] : slots[t][s - 1];
                post /= dims[s];
                if (adjoint)
                    apply_slot(m.adjoint(), pre, dims[s], post, cur, next);
                else
                    apply_slot(m, pre, dims[s], post, cur, next);
                pre *= dims[s];
                cur.swap(next);
            }
            total += cur;
        }
        return total;
    }

    MatrixXcd dense() const {
        MatrixXcd acc = MatrixXcd::Zero(total_dim(), total_dim());
        for (std::size_t t = 0; t < coeffs.size(); ++t) {
            MatrixXcd m = coeffs[t];
            for (const auto& s : slots[t]) m = fock::kron(m, s);
            acc += m;
        }
        return acc;
    }

    double norm() const {
        if (coeffs.empty()) return 0.0;
        const Eigen::Index n = total_dim();
        if (n <= 512) return fock::op_norm(dense());
        const double top = fock::detail::psd_power_iteration(
            n, [&](const VectorXcd& v) { return apply(apply(v, false), true); },
            caps::norm_rel_tol, 20000);
        return std::sqrt(std::max(0.0, top));
    }
};

template <class C>
MatrixXcd as_matrix_coeff(const C& c) {
    if constexpr (coeff_traits<C>::is_matrix) {
        return c;
    } else {
        MatrixXcd m(1, 1);
        m(0, 0) = c;
        return m;
    }
}

/// The honest compression P_view W(x) P_view of a monomial: computed on a
/// basis deep enough that no path escapes (view depth + word length), then
/// restricted to the view block.  Its norm never exceeds the true norm.
inline MatrixXcd compressed_word_operator(int d, const word& w, int view_depth) {
    const int len = static_cast<int>(w.length());
    const fock::fock_basis deep(d, view_depth + len);
    const fock::fock_basis view(d, view_depth);
    MatrixXcd out(view.dim, view.dim);
    VectorXcd e = VectorXcd::Zero(deep.dim);
    std::vector<VectorXcd> units;
    for (int a = 0; a < d; ++a) units.push_back(fock::unit_base_vector(d, a));
    for (std::size_t c = 0; c < view.dim; ++c) {
        e[c] = 1.0;
        VectorXcd v = e;
        for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
            if (it->kind != gen_kind::semicircular)
                throw std::invalid_argument("profile: deterministic letters not supported");
            v = fock::apply_semicircular(deep, units[it->index - 1], v);
        }
        out.col(c) = v.head(view.dim);
        e[c] = 0.0;
    }
    return out;
}

/// Per-slot compressed evaluation of a tensor on independent Fock copies,
/// slot view depth = longest word in the slot plus padding.
template <class C>
tensor_operator evaluate_tensor(const tensor_polynomial<C>& t, int d, int pad) {
    tensor_operator op;
    if (t.is_zero()) return op;
    const int rank = t.rank();
    std::vector<int> view_depth(rank, 0);
    for (const auto& [slots, c] : t.terms())
        for (int s = 0; s < rank; ++s)
            view_depth[s] =
                std::max(view_depth[s], static_cast<int>(slots[s].length()) + pad);

    op.dims.push_back(coeff_traits<C>::is_matrix ? as_matrix_coeff(t.terms().begin()->second).rows()
                                                 : 1);
    for (int s = 0; s < rank; ++s) op.dims.push_back(fock::fock_basis(d, view_depth[s]).dim);

    for (const auto& [slots, c] : t.terms()) {
        op.coeffs.push_back(as_matrix_coeff(c));
        std::vector<MatrixXcd> ops;
        ops.reserve(rank);
        for (int s = 0; s < rank; ++s)
            ops.push_back(compressed_word_operator(d, slots[s], view_depth[s]));
        op.slots.push_back(std::move(ops));
    }
    return op;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Derivative norm profile: S_i = sup over index tuples of the norm of the
// (i+1)-slot tensored evaluation of the iterated derivative.

struct profile_params {
    int d = 1;
    int max_order = caps::derivative_slots;
    int depth_pad = 0;  // extra slot view depth beyond the word length
    int base_pad = 3;   // extra view depth for the plain norm S_0
};

template <class C>
std::vector<double> derivative_norm_profile(const nc_polynomial<C>& p, const profile_params& pp) {
    if (pp.max_order > caps::derivative_slots)
        throw capacity_error("derivative profile: order cap is " +
                             std::to_string(caps::derivative_slots));
    const int deg = std::max(0, p.degree());
    std::vector<double> s(pp.max_order + 1, 0.0);
    if (p.is_zero()) return s;

    s[0] = detail::evaluate_tensor(as_tensor(p), pp.d, pp.base_pad).norm();
    for (int order = 1; order <= pp.max_order; ++order) {
        if (order > deg) break;  // derivatives beyond the degree vanish
        std::vector<int> tuple(order, 1);
        double best = 0.0;
        for (;;) {
            const auto t = higher_derivative(p, std::span<const int>(tuple));
            if (!t.is_zero()) best = std::max(best, detail::evaluate_tensor(t, pp.d, pp.depth_pad).norm());
            int pos = 0;
            while (pos < order) {
                if (++tuple[pos] <= pp.d) break;
                tuple[pos] = 1;
                ++pos;
            }
            if (pos == order) break;
        }
        s[order] = best;
    }
    return s;
}

// ---------------------------------------------------------------------------
// The mixture LP: maximize sum alpha_{i,j} log S_{i,j} subject to
// alpha >= 0, sum_i alpha_{i,j} = 1 per j, sum_{i,j} i alpha_{i,j} <= budget.

struct lp_solution {
    double log_value = 0.0;
    bool feasible = true;
    std::map<std::pair<int, int>, double> alpha;  // (i, j) -> weight
};

/// Dual bisection on the budget multiplier: for fixed lambda every j picks
/// argmax_i (log S_{i,j} - lambda i); lambda is driven to the point where the
/// cheapest maximizers fit the budget, and ties split fractionally to land on
/// it exactly.
inline lp_solution profile_budget_optimum(const std::vector<std::vector<double>>& profiles,
                                          double budget) {
    const int n = static_cast<int>(profiles.size());
    lp_solution sol;

    std::vector<std::vector<std::pair<int, double>>> opts(n);  // (i, log S)
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < static_cast<int>(profiles[j].size()); ++i)
            if (profiles[j][i] > 0.0) opts[j].emplace_back(i, std::log(profiles[j][i]));
        if (opts[j].empty()) {
            sol.feasible = false;  // the zero polynomial: the bound is 0
            return sol;
        }
    }
    {
        double least = 0.0;
        for (int j = 0; j < n; ++j) least += opts[j].front().first;
        if (least > budget + 1e-12)
            throw std::invalid_argument("profile LP: budget below the least spend");
    }

    const auto min_budget_choice = [&](double lambda) {
        // per j: smallest i among the maximizers of log S - lambda i
        double used = 0.0, value = 0.0;
        for (int j = 0; j < n; ++j) {
            double best = -std::numeric_limits<double>::infinity();
            int pick = -1;
            for (const auto& [i, ls] : opts[j]) {
                const double v = ls - lambda * i;
                if (v > best + 1e-15 || (std::abs(v - best) <= 1e-15 && (pick < 0 || i < pick))) {
                    best = v;
                    pick = i;
                }
            }
            used += pick;
            value += best;
        }
        return std::pair{used, value};
    };

    if (min_budget_choice(0.0).first <= budget + 1e-12) {
        // budget slack: every j takes its best level outright
        for (int j = 0; j < n; ++j) {
            double best = -std::numeric_limits<double>::infinity();
            int pick = -1;
            for (const auto& [i, ls] : opts[j])
                if (ls > best) {
                    best = ls;
                    pick = i;
                }
            sol.alpha[{pick, j + 1}] = 1.0;
            sol.log_value += best;
        }
        return sol;
    }

    double lo = 0.0, hi = 1.0;
    while (min_budget_choice(hi).first > budget) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (min_budget_choice(mid).first > budget ? lo : hi) = mid;
    }
    const double lambda = hi;

    // at lambda the budget is met; the optimum value is the dual value
    const auto [used, value] = min_budget_choice(lambda);
    sol.log_value = value + lambda * budget;

    // primal weights: start every j at its cheapest maximizer and spend the
    // remaining budget raising tied coordinates toward dearer maximizers
    const double tie_tol = 1e-9;
    std::vector<int> low_pick(n), high_pick(n);
    for (int j = 0; j < n; ++j) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [i, ls] : opts[j]) best = std::max(best, ls - lambda * i);
        int lo_i = std::numeric_limits<int>::max(), hi_i = -1;
        for (const auto& [i, ls] : opts[j])
            if (ls - lambda * i >= best - tie_tol) {
                lo_i = std::min(lo_i, i);
                hi_i = std::max(hi_i, i);
            }
        low_pick[j] = lo_i;
        high_pick[j] = hi_i;
    }
    double slack = budget - used;
    for (int j = 0; j < n; ++j) {
        const double room = high_pick[j] - low_pick[j];
        if (room <= 0.0 || slack <= 1e-12) {
            sol.alpha[{low_pick[j], j + 1}] += 1.0;
            continue;
        }
        const double theta = std::min(1.0, slack / room);
        if (theta < 1.0) {
            sol.alpha[{low_pick[j], j + 1}] += 1.0 - theta;
            sol.alpha[{high_pick[j], j + 1}] += theta;
        } else {
            sol.alpha[{high_pick[j], j + 1}] += 1.0;
        }
        slack -= theta * room;
    }
    return sol;
}

inline double inequality_prefactor(int n, int d) {
    return std::pow(80.0 * std::numbers::e, n) * std::pow(static_cast<double>(d), 3 * n);
}

/// Right side of the inequality: (80e)^n d^{3n} exp(LP optimum).
inline double master_rhs(const std::vector<std::vector<double>>& profiles, int d) {
    const int n = static_cast<int>(profiles.size());
    const lp_solution sol = profile_budget_optimum(profiles, 3.0 * n);
    if (!sol.feasible) return 0.0;
    return inequality_prefactor(n, d) * std::exp(sol.log_value);
}

struct master_report {
    int n = 0;
    std::vector<int> sigma;
    double lhs = 0.0;
    double rhs = 0.0;
    std::map<std::pair<int, int>, double> alpha;
    bool pass = false;
};

/// Full inequality check: truncated |m_sigma(Q(x))| (a lower bound of the
/// true norm) against the profile bound.
template <class C>
master_report master_inequality_check(const std::vector<nc_polynomial<C>>& polys,
                                      const std::vector<int>& sigma, int d) {
    const int n = static_cast<int>(polys.size());
    master_report rep;
    rep.n = n;
    rep.sigma = sigma;
    rep.lhs = fock::op_norm(twisted_product_operator(polys, sigma, d));
    std::vector<std::vector<double>> profiles;
    profiles.reserve(n);
    profile_params pp;
    pp.d = d;
    for (const auto& p : polys)
        profiles.push_back(derivative_norm_profile(p, pp));
    const lp_solution sol = profile_budget_optimum(profiles, 3.0 * n);
    rep.rhs = sol.feasible ? inequality_prefactor(n, d) * std::exp(sol.log_value) : 0.0;
    rep.alpha = sol.alpha;
    rep.pass = rep.lhs <= rep.rhs + 1e-9;
    return rep;
}

// ---------------------------------------------------------------------------
// Coefficient recovery.

/// Reads the coefficients of P back from a dense evaluation T of P(x) on
/// coeff (x) Fock, by descending degree: at each level the compression
/// <e_word| T |vacuum> isolates the top remaining coefficients, which are
/// then subtracted.
inline matrix_poly coefficient_recovery(MatrixXcd t, const fock::fock_basis& b, int coeff_dim,
                                        int degree_bound, int d) {
    if (degree_bound > b.depth)
        throw std::invalid_argument("coefficient_recovery: depth smaller than the degree bound");
    matrix_poly rec(d, 0, coeff_dim);
    const std::size_t fdim = b.dim;
    for (int level = degree_bound; level >= 0; --level) {
        matrix_poly stage(d, 0, coeff_dim);
        std::vector<int> letters(level, 0);
        for (;;) {
            const std::size_t row = b.index_of(std::span<const int>(letters));
            MatrixXcd a(coeff_dim, coeff_dim);
            for (int r = 0; r < coeff_dim; ++r)
                for (int c = 0; c < coeff_dim; ++c) a(r, c) = t(r * fdim + row, c * fdim);
            if (a.cwiseAbs().maxCoeff() > 1e-10) {
                std::vector<generator> ls;
                for (int v : letters) ls.push_back(X(v + 1));
                stage.add_term(word{std::move(ls)}, a);
            }
            int pos = level - 1;
            while (pos >= 0) {
                if (++letters[pos] < d) break;
                letters[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
            if (level == 0) break;
        }
        if (!stage.is_zero()) {
            t -= fock::evaluate_in_semicircular(b, stage);
            rec = rec + stage;
        }
    }
    const double residual = t.cwiseAbs().maxCoeff();
    if (residual > 1e-8)
        throw consistency_error("coefficient_recovery: residual " + std::to_string(residual));
    return rec;
}

/// Worst-case recovery constant: max over degrees of the descending bound
/// B_l = 1 + sum_{m > l} (#monomials of degree m) 2^m B_m in units of |P(x)|.
inline double recovery_constant(int degree_bound, int d) {
    std::vector<double> b(degree_bound + 1, 0.0);
    double best = 1.0;
    for (int l = degree_bound; l >= 0; --l) {
        double acc = 1.0;
        for (int m = l + 1; m <= degree_bound; ++m)
            acc += std::pow(static_cast<double>(d), m) * std::pow(2.0, m) * b[m];
        b[l] = acc;
        best = std::max(best, acc);
    }
    return best;
}

}  // namespace freewick::bounds

#endif
