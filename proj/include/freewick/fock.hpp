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

// Depth-truncated full Fock space over an m-dimensional base space: graded
// basis of words, creation/annihilation/right-creation as vector maps and as
// dense matrices, vacuum expectations, operator norms, and correlated
// semicircular families realized from a PSD square root of a covariance.
//
// Truncation facts used throughout (and property-tested):
//  - a vacuum expectation of a product of L ladder factors is exact at any
//    depth >= L; components above floor(L/2) can never return to the vacuum,
//    so depth floor(L/2) already gives the exact value;
//  - applying a product of L ladder factors to the vacuum is exact as a
//    vector whenever the depth is at least L;
//  - compressions never increase operator norms, so truncated norms are
//    certified lower bounds.

#ifndef FREEWICK_FOCK_HPP
#define FREEWICK_FOCK_HPP

#include <Eigen/Dense>
#include <memory>
#include <numeric>
#include <span>

#include "ncalg.hpp"

namespace freewick::fock {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Graded basis of all words over [0, m) of length <= depth, vacuum first.
struct fock_basis {
    int base_dim;
    int depth;
    std::size_t dim;
    std::vector<std::size_t> offset;  // offset[l] = index of first level-l word
    std::vector<std::size_t> pw;      // pw[l] = m^l

    fock_basis(int m, int D, std::size_t cap = caps::basis_dim) : base_dim(m), depth(D) {
        if (m < 1 || D < 0) throw std::invalid_argument("fock_basis: need m >= 1, depth >= 0");
        offset.assign(D + 2, 0);
        pw.assign(D + 1, 1);
        std::size_t total = 0;
        for (int l = 0; l <= D; ++l) {
            if (l > 0) {
                if (pw[l - 1] > cap / static_cast<std::size_t>(m) + 1)
                    throw capacity_error("fock_basis: dimension exceeds cap");
                pw[l] = pw[l - 1] * static_cast<std::size_t>(m);
            }
            offset[l] = total;
            total += pw[l];
            if (total > cap) throw capacity_error("fock_basis: dimension exceeds cap");
        }
        offset[D + 1] = total;
        dim = total;
    }

    int level_of(std::size_t idx) const {
        int l = 0;
        while (idx >= offset[l + 1]) ++l;
        return l;
    }

    /// Index of the basis word with the given letters (values in [0, m)).
    std::size_t index_of(std::span<const int> letters) const {
        const int l = static_cast<int>(letters.size());
        if (l > depth) throw std::invalid_argument("fock_basis: word deeper than truncation");
        std::size_t v = 0;
        for (int t = 0; t < l; ++t) v = v * static_cast<std::size_t>(base_dim) + letters[t];
        return offset[l] + v;
    }

    VectorXcd vacuum() const {
        VectorXcd v = VectorXcd::Zero(dim);
        v[0] = 1.0;
        return v;
    }
};

// ---------------------------------------------------------------------------
// Vector maps.  All return a fresh vector; the base-letter variants avoid the
// inner product loop for unit vectors e_a.

inline VectorXcd apply_left_creation(const fock_basis& b, const VectorXcd& xi, const VectorXcd& v) {
    VectorXcd out = VectorXcd::Zero(b.dim);
    const int m = b.base_dim;
    for (int l = 0; l < b.depth; ++l)
        for (std::size_t k = 0; k < b.pw[l]; ++k) {
            const cplx src = v[b.offset[l] + k];
            if (src == cplx{}) continue;
            for (int a = 0; a < m; ++a)
                out[b.offset[l + 1] + static_cast<std::size_t>(a) * b.pw[l] + k] += xi[a] * src;
        }
    return out;
}

inline VectorXcd apply_left_annihilation(const fock_basis& b, const VectorXcd& xi,
                                         const VectorXcd& v) {
    VectorXcd out = VectorXcd::Zero(b.dim);
    const int m = b.base_dim;
    for (int l = 0; l < b.depth; ++l)
        for (int a = 0; a < m; ++a) {
            const cplx w = std::conj(xi[a]);
            if (w == cplx{}) continue;
            for (std::size_t k = 0; k < b.pw[l]; ++k)
                out[b.offset[l] + k] +=
                    w * v[b.offset[l + 1] + static_cast<std::size_t>(a) * b.pw[l] + k];
        }
    return out;
}

inline VectorXcd apply_right_creation(const fock_basis& b, const VectorXcd& xi,
                                      const VectorXcd& v) {
    VectorXcd out = VectorXcd::Zero(b.dim);
    const int m = b.base_dim;
    for (int l = 0; l < b.depth; ++l)
        for (std::size_t k = 0; k < b.pw[l]; ++k) {
            const cplx src = v[b.offset[l] + k];
            if (src == cplx{}) continue;
            for (int a = 0; a < m; ++a)
                out[b.offset[l + 1] + k * static_cast<std::size_t>(m) + a] += xi[a] * src;
        }
    return out;
}

inline VectorXcd apply_right_annihilation(const fock_basis& b, const VectorXcd& xi,
                                          const VectorXcd& v) {
    VectorXcd out = VectorXcd::Zero(b.dim);
    const int m = b.base_dim;
    for (int l = 0; l < b.depth; ++l)
        for (std::size_t k = 0; k < b.pw[l]; ++k)
            for (int a = 0; a < m; ++a)
                out[b.offset[l] + k] +=
                    std::conj(xi[a]) * v[b.offset[l + 1] + k * static_cast<std::size_t>(m) + a];
    return out;
}

/// x(xi) = l(xi) + l(xi)*; self-adjoint, semicircular of variance |xi|^2.
inline VectorXcd apply_semicircular(const fock_basis& b, const VectorXcd& xi, const VectorXcd& v) {
    return apply_left_creation(b, xi, v) + apply_left_annihilation(b, xi, v);
}

inline VectorXcd apply_level_projection(const fock_basis& b, int l, const VectorXcd& v) {
    if (l < 0 || l > b.depth) throw std::invalid_argument("level projection: level out of range");
    VectorXcd out = VectorXcd::Zero(b.dim);
    out.segment(b.offset[l], b.pw[l]) = v.segment(b.offset[l], b.pw[l]);
    return out;
}

/// Delta(kappa) = sum_{l>=1} kappa^l P_l (exact on the truncated space).
inline VectorXcd apply_delta(const fock_basis& b, double kappa, const VectorXcd& v) {
    VectorXcd out = VectorXcd::Zero(b.dim);
    double w = 1.0;
    for (int l = 1; l <= b.depth; ++l) {
        w *= kappa;
        out.segment(b.offset[l], b.pw[l]) = w * v.segment(b.offset[l], b.pw[l]);
    }
    return out;
}

inline VectorXcd unit_base_vector(int m, int a) {
    VectorXcd e = VectorXcd::Zero(m);
    e[a] = 1.0;
    return e;
}

// ---------------------------------------------------------------------------
// Dense operators.

struct fock_operator {
    std::shared_ptr<const fock_basis> basis;
    MatrixXcd mat;
};

template <class F>
MatrixXcd dense_from_map(const fock_basis& b, F&& apply) {
    MatrixXcd m(b.dim, b.dim);
    VectorXcd e = VectorXcd::Zero(b.dim);
    for (std::size_t c = 0; c < b.dim; ++c) {
        e[c] = 1.0;
        m.col(c) = apply(e);
        e[c] = 0.0;
    }
    return m;
}

inline MatrixXcd creation_matrix(const fock_basis& b, const VectorXcd& xi) {
    if (xi.size() != b.base_dim) throw std::invalid_argument("creation: dimension mismatch");
    return dense_from_map(b, [&](const VectorXcd& v) { return apply_left_creation(b, xi, v); });
}
inline MatrixXcd right_creation_matrix(const fock_basis& b, const VectorXcd& xi) {
    if (xi.size() != b.base_dim) throw std::invalid_argument("right creation: dimension mismatch");
    return dense_from_map(b, [&](const VectorXcd& v) { return apply_right_creation(b, xi, v); });
}
inline MatrixXcd semicircular_matrix(const fock_basis& b, const VectorXcd& xi) {
    if (xi.size() != b.base_dim) throw std::invalid_argument("semicircular: dimension mismatch");
    return dense_from_map(b, [&](const VectorXcd& v) { return apply_semicircular(b, xi, v); });
}
inline MatrixXcd level_projection_matrix(const fock_basis& b, int l) {
    MatrixXcd m = MatrixXcd::Zero(b.dim, b.dim);
    for (std::size_t k = b.offset[l]; k < b.offset[l + 1]; ++k) m(k, k) = 1.0;
    return m;
}
inline MatrixXcd delta_matrix(const fock_basis& b, double kappa) {
    if (std::abs(kappa) > 1.0 + 1e-12)
        throw std::invalid_argument("delta: |kappa| must be at most 1");
    MatrixXcd m = MatrixXcd::Zero(b.dim, b.dim);
    double w = 1.0;
    for (int l = 1; l <= b.depth; ++l) {
        w *= kappa;
        for (std::size_t k = b.offset[l]; k < b.offset[l + 1]; ++k) m(k, k) = w;
    }
    return m;
}

/// <T Omega, Omega>.
inline cplx vacuum_trace(const MatrixXcd& t) { return t(0, 0); }

/// Coefficient-valued partial vacuum trace of an operator on C^k (x) Fock
/// (coefficient index slow): (id (x) tau)(T)_{a,b} = T[(a, vac), (b, vac)].
inline MatrixXcd partial_vacuum_trace(const MatrixXcd& t, int coeff_dim) {
    const std::size_t fdim = static_cast<std::size_t>(t.rows()) / coeff_dim;
    MatrixXcd out(coeff_dim, coeff_dim);
    for (int a = 0; a < coeff_dim; ++a)
        for (int b = 0; b < coeff_dim; ++b) out(a, b) = t(a * fdim, b * fdim);
    return out;
}

/// kron(A, B) with A as the slow index (matches the M_N (x) M_k flattening
/// used for matrix models).
inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// ---------------------------------------------------------------------------
// Operator norm: largest singular value.  Dense eigendecomposition of T*T
// below the dimension switch, power iteration above.

inline constexpr int dense_norm_switch = 3000;

namespace detail {

inline VectorXcd deterministic_start(Eigen::Index n) {
    VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = cplx(2.0 * rng::uniform(0x5eedULL, 0, static_cast<std::uint64_t>(i)) - 1.0,
                    2.0 * rng::uniform(0x5eedULL, 1, static_cast<std::uint64_t>(i)) - 1.0);
    }
    v.normalize();
    return v;
}

/// Power iteration for the top eigenvalue of the PSD map v -> apply(v).
template <class F>
double psd_power_iteration(Eigen::Index n, F&& apply, double rel_tol, int max_iter) {
    VectorXcd v = deterministic_start(n);
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        VectorXcd w = apply(v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = std::real(v.dot(w));
        w /= nw;
        const bool settled = it > 0 && std::abs(next - lambda) <= rel_tol * std::max(next, 1e-300);
        lambda = next;
        v.swap(w);
        if (settled) return lambda;
    }
    throw std::runtime_error("op_norm: power iteration did not converge");
}

}  // namespace detail

inline double op_norm(const MatrixXcd& t) {
    if (t.rows() == 0) return 0.0;
    if (t.rows() < dense_norm_switch) {
        const MatrixXcd gram = t.adjoint() * t;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
        const double top = es.eigenvalues().maxCoeff();
        return std::sqrt(std::max(0.0, top));
    }
    const double top = detail::psd_power_iteration(
        t.rows(), [&](const VectorXcd& v) { return (t.adjoint() * (t * v)).eval(); },
        caps::norm_rel_tol, 20000);
    return std::sqrt(std::max(0.0, top));
}

inline double op_norm(const fock_operator& t) { return op_norm(t.mat); }

// ---------------------------------------------------------------------------
// Polynomial evaluation.

struct assignment {
    std::vector<MatrixXcd> x_ops;  // for X1..Xd
    std::vector<MatrixXcd> z_ops;  // for Z1..Zq
};

namespace detail {

inline const MatrixXcd& op_for(const assignment& a, const generator& g) {
    const auto& v = g.kind == gen_kind::semicircular ? a.x_ops : a.z_ops;
    if (g.index < 1 || g.index > static_cast<int>(v.size()))
        throw std::invalid_argument("evaluate_poly: unassigned generator");
    return v[g.index - 1];
}

}  // namespace detail

/// Dense evaluation sum a_M (x) M(assigned operators).  Scalar coefficients
/// stay on the operator space; matrix coefficients tensorize (coefficient
/// slow index).
template <class C>
MatrixXcd evaluate_poly(const nc_polynomial<C>& p, const assignment& a) {
    Eigen::Index dim = -1;
    for (const auto& m : a.x_ops) dim = std::max(dim, m.rows());
    for (const auto& m : a.z_ops) dim = std::max(dim, m.rows());
    if (dim < 0) throw std::invalid_argument("evaluate_poly: empty assignment");
    for (const auto& m : a.x_ops)
        if (m.rows() != dim || m.cols() != dim)
            throw std::invalid_argument("evaluate_poly: operator dimension mismatch");
    for (const auto& m : a.z_ops)
        if (m.rows() != dim || m.cols() != dim)
            throw std::invalid_argument("evaluate_poly: operator dimension mismatch");

    const int cd = p.coeff_dim();
    MatrixXcd acc = MatrixXcd::Zero(dim * cd, dim * cd);
    for (const auto& [w, c] : p.terms()) {
        MatrixXcd prod = MatrixXcd::Identity(dim, dim);
        for (const auto& g : w.letters) prod = prod * detail::op_for(a, g);
        if constexpr (coeff_traits<C>::is_matrix)
            acc += kron(c, prod);
        else
            acc += c * prod;
    }
    return acc;
}

/// Fast evaluation of an X-only polynomial in the standard semicircular
/// tuple x_i = l(e_i) + l(e_i)*, built column-by-column with the vector maps
/// (cheaper than chains of dense products).  Matrix coefficients tensorize.
template <class C>
MatrixXcd evaluate_in_semicircular(const fock_basis& b, const nc_polynomial<C>& p) {
    if (p.num_x() > b.base_dim)
        throw std::invalid_argument("evaluate_in_semicircular: base space too small");
    std::vector<VectorXcd> units;
    units.reserve(p.num_x());
    for (int i = 0; i < p.num_x(); ++i) units.push_back(unit_base_vector(b.base_dim, i));

    const int cd = p.coeff_dim();
    MatrixXcd acc = MatrixXcd::Zero(b.dim * cd, b.dim * cd);
    for (const auto& [w, c] : p.terms()) {
        for (const auto& g : w.letters)
            if (g.kind != gen_kind::semicircular)
                throw std::invalid_argument("evaluate_in_semicircular: deterministic letter");
        MatrixXcd mono = dense_from_map(b, [&](const VectorXcd& v) {
            VectorXcd u = v;
            for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
                u = apply_semicircular(b, units[it->index - 1], u);
            return u;
        });
        if constexpr (coeff_traits<C>::is_matrix)
            acc += kron(c, mono);
        else
            acc += c * mono;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Correlated semicircular families x^i_u = l(xi^i_u) + l(xi^i_u)* with
// <xi^i_u, xi^j_v> = delta_{u=v} kappa_{ij}, realized from the symmetric PSD
// square root of kappa on a base space of dimension families * slots.

struct gram_vectors {
    Eigen::MatrixXd root;  // symmetric square root of kappa
    int families = 0;
    int slots = 0;

    int base_dim() const { return families * slots; }

    /// xi for family i (1-based), slot u (1-based).
    VectorXcd xi(int i, int u) const {
        VectorXcd v = VectorXcd::Zero(base_dim());
        for (int r = 0; r < families; ++r) v[r * slots + (u - 1)] = root(r, i - 1);
        return v;
    }
};

inline gram_vectors correlated_families(const Eigen::MatrixXd& kappa, int slots) {
    const int n = static_cast<int>(kappa.rows());
    if (kappa.cols() != n) throw std::invalid_argument("covariance must be square");
    if ((kappa - kappa.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kappa);
    Eigen::VectorXd lam = es.eigenvalues();
    for (int i = 0; i < n; ++i) {
        if (lam[i] < -caps::psd_tol)
            throw std::invalid_argument("covariance is not positive semidefinite");
        lam[i] = std::sqrt(std::max(0.0, lam[i]));
    }
    gram_vectors g;
    g.root = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    g.families = n;
    g.slots = slots;
    // Gram structure must hold to near machine precision.
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            const double got = std::real(g.xi(i, 1).dot(g.xi(j, 1)));
            if (std::abs(got - kappa(i - 1, j - 1)) > 1e-12)
                throw consistency_error("correlated_families: Gram mismatch");
        }
    return g;
}

}  // namespace freewick::fock

#endif
