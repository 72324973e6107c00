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

// Noncommutative polynomials in semicircular letters X1..Xd and deterministic
// letters Z1..Zq, with scalar or matrix coefficients, plus the noncommutative
// derivative calculus (splitting a word at each occurrence of a letter).

#ifndef FREEWICK_NCALG_HPP
#define FREEWICK_NCALG_HPP

#include <Eigen/Dense>
#include <compare>
#include <map>
#include <span>
#include <sstream>
#include <vector>

#include "core.hpp"

namespace freewick {

enum class gen_kind : std::uint8_t { semicircular, deterministic };

struct generator {
    gen_kind kind;
    int index;  // 1-based slot within its alphabet

    friend auto operator<=>(const generator&, const generator&) = default;
};

inline generator X(int i) { return {gen_kind::semicircular, i}; }
inline generator Z(int j) { return {gen_kind::deterministic, j}; }

/// A monomial: a finite sequence of letters.  The empty word is the identity.
struct word {
    std::vector<generator> letters;

    word() = default;
    explicit word(std::vector<generator> ls) : letters(std::move(ls)) {}

    std::size_t length() const { return letters.size(); }
    std::size_t xdegree() const {
        std::size_t n = 0;
        for (const auto& g : letters) n += (g.kind == gen_kind::semicircular);
        return n;
    }
    bool empty() const { return letters.empty(); }

    word reversed() const {
        word w = *this;
        std::reverse(w.letters.begin(), w.letters.end());
        return w;
    }

    friend word operator*(const word& a, const word& b) {
        word w = a;
        w.letters.insert(w.letters.end(), b.letters.begin(), b.letters.end());
        return w;
    }

    // Canonical order: shorter words first, then lexicographic on letters.
    friend auto operator<=>(const word& a, const word& b) {
        if (auto c = a.letters.size() <=> b.letters.size(); c != 0) return c;
        return a.letters <=> b.letters;
    }
    friend bool operator==(const word&, const word&) = default;
};

inline word word_of(std::initializer_list<generator> ls) { return word{std::vector<generator>(ls)}; }

// ---------------------------------------------------------------------------
// Coefficient algebra: complex scalars or complex square matrices.

template <class C>
struct coeff_traits;

template <>
struct coeff_traits<cplx> {
    static constexpr bool is_matrix = false;
    static bool is_zero(const cplx& c, double tol = caps::coeff_zero_tol) {
        return std::abs(c.real()) <= tol && std::abs(c.imag()) <= tol;
    }
    static cplx adjoint(const cplx& c) { return std::conj(c); }
    static cplx identity(int /*dim*/) { return cplx{1.0, 0.0}; }
    static int dim(const cplx&) { return 1; }
    static double abs_max(const cplx& c) { return std::max(std::abs(c.real()), std::abs(c.imag())); }
};

template <>
struct coeff_traits<Eigen::MatrixXcd> {
    static constexpr bool is_matrix = true;
    static bool is_zero(const Eigen::MatrixXcd& c, double tol = caps::coeff_zero_tol) {
        return c.size() == 0 || c.cwiseAbs().maxCoeff() <= tol;
    }
    static Eigen::MatrixXcd adjoint(const Eigen::MatrixXcd& c) { return c.adjoint(); }
    static Eigen::MatrixXcd identity(int dim) { return Eigen::MatrixXcd::Identity(dim, dim); }
    static int dim(const Eigen::MatrixXcd& c) { return static_cast<int>(c.rows()); }
    static double abs_max(const Eigen::MatrixXcd& c) {
        return c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
    }
};

/// Noncommutative polynomial over a declared alphabet (d semicircular letters,
/// q deterministic letters).  Stored coefficients are never zero; terms are
/// kept in the canonical word order so printing and equality are
/// deterministic.  Values are immutable in spirit: all operations return new
/// polynomials.
template <class C>
class nc_polynomial {
  public:
    using coeff_type = C;
    using traits = coeff_traits<C>;

    nc_polynomial(int num_x, int num_z, int coeff_dim = 1)
        : num_x_(num_x), num_z_(num_z), coeff_dim_(coeff_dim) {
        if (num_x < 0 || num_z < 0 || coeff_dim < 1)
            throw std::invalid_argument("nc_polynomial: bad alphabet");
    }

    int num_x() const { return num_x_; }
    int num_z() const { return num_z_; }
    int coeff_dim() const { return coeff_dim_; }
    const std::map<word, C>& terms() const& { return terms_; }
    std::map<word, C> terms() && { return std::move(terms_); }  // keeps temporaries safe
    bool is_zero() const { return terms_.empty(); }

    /// Degree counts all letters; the zero polynomial reports -1 (the
    /// "minus infinity" sentinel).
    int degree() const {
        return terms_.empty() ? -1 : static_cast<int>(terms_.rbegin()->first.length());
    }
    int xdegree() const {
        int m = terms_.empty() ? -1 : 0;
        for (const auto& [w, c] : terms_) m = std::max(m, static_cast<int>(w.xdegree()));
        return m;
    }

    void add_term(const word& w, const C& c) {
        check_word(w);
        if (traits::is_zero(c)) return;
        auto [it, fresh] = terms_.try_emplace(w, c);
        if (!fresh) {
            it->second = it->second + c;
            if (traits::is_zero(it->second)) terms_.erase(it);
        }
    }

    static nc_polynomial constant(int num_x, int num_z, const C& c) {
        nc_polynomial p(num_x, num_z, traits::dim(c));
        p.add_term(word{}, c);
        return p;
    }
    static nc_polynomial identity_like(const nc_polynomial& ref) {
        return constant(ref.num_x_, ref.num_z_, traits::identity(ref.coeff_dim_));
    }

    friend nc_polynomial operator+(const nc_polynomial& a, const nc_polynomial& b) {
        a.check_compatible(b);
        nc_polynomial r = a;
        for (const auto& [w, c] : b.terms_) r.add_term(w, c);
        return r;
    }
    friend nc_polynomial operator-(const nc_polynomial& a, const nc_polynomial& b) {
        return a + (b * cplx{-1.0, 0.0});
    }
    friend nc_polynomial operator*(const nc_polynomial& a, const nc_polynomial& b) {
        a.check_compatible(b);
        nc_polynomial r(a.num_x_, a.num_z_, a.coeff_dim_);
        for (const auto& [wa, ca] : a.terms_)
            for (const auto& [wb, cb] : b.terms_) r.add_term(wa * wb, ca * cb);
        return r;
    }
    friend nc_polynomial operator*(const nc_polynomial& a, const cplx& s) {
        nc_polynomial r(a.num_x_, a.num_z_, a.coeff_dim_);
        for (const auto& [w, c] : a.terms_) r.add_term(w, C(c * s));
        return r;
    }
    friend nc_polynomial operator*(const cplx& s, const nc_polynomial& a) { return a * s; }

    /// Involution: a (x) M  ->  a* (x) reverse(M).
    nc_polynomial adjoint() const {
        nc_polynomial r(num_x_, num_z_, coeff_dim_);
        for (const auto& [w, c] : terms_) r.add_term(w.reversed(), traits::adjoint(c));
        return r;
    }

    friend bool operator==(const nc_polynomial& a, const nc_polynomial& b) {
        if (a.num_x_ != b.num_x_ || a.num_z_ != b.num_z_ || a.coeff_dim_ != b.coeff_dim_)
            return false;
        if (a.terms_.size() != b.terms_.size()) return false;
        auto ia = a.terms_.begin();
        for (auto ib = b.terms_.begin(); ib != b.terms_.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return false;
            if (!traits::is_zero(C(ia->second - ib->second), 0.0)) return false;
        }
        return true;
    }

    double max_coeff_deviation(const nc_polynomial& b) const {
        double m = 0.0;
        for (const auto& [w, c] : terms_) {
            auto it = b.terms_.find(w);
            m = std::max(m, it == b.terms_.end() ? traits::abs_max(c)
                                                 : traits::abs_max(C(c - it->second)));
        }
        for (const auto& [w, c] : b.terms_)
            if (!terms_.count(w)) m = std::max(m, traits::abs_max(c));
        return m;
    }

    void check_compatible(const nc_polynomial& b) const {
        if (num_x_ != b.num_x_ || num_z_ != b.num_z_)
            throw std::invalid_argument("nc_polynomial: alphabet mismatch");
        if (coeff_dim_ != b.coeff_dim_)
            throw std::invalid_argument("nc_polynomial: coefficient algebra mismatch");
    }

  private:
    void check_word(const word& w) const {
        for (const auto& g : w.letters) {
            const int bound = g.kind == gen_kind::semicircular ? num_x_ : num_z_;
            if (g.index < 1 || g.index > bound)
                throw std::invalid_argument("nc_polynomial: generator index out of bounds");
        }
    }

    int num_x_, num_z_, coeff_dim_;
    std::map<word, C> terms_;
};

using scalar_poly = nc_polynomial<cplx>;
using matrix_poly = nc_polynomial<Eigen::MatrixXcd>;

template <class C>
nc_polynomial<C> pow(const nc_polynomial<C>& p, int k) {
    if (k < 0) throw std::invalid_argument("pow: negative exponent");
    nc_polynomial<C> r = nc_polynomial<C>::identity_like(p);
    for (int t = 0; t < k; ++t) r = r * p;
    return r;
}

// ---------------------------------------------------------------------------
// Tensor polynomials: elements of A (x) C<X,Z>^{(x) rank}.  The coefficient
// rides on the leftmost slot.

template <class C>
class tensor_polynomial {
  public:
    using traits = coeff_traits<C>;

    tensor_polynomial(int num_x, int num_z, int coeff_dim, int rank)
        : num_x_(num_x), num_z_(num_z), coeff_dim_(coeff_dim), rank_(rank) {
        if (rank < 1) throw std::invalid_argument("tensor_polynomial: rank must be >= 1");
    }

    int rank() const { return rank_; }
    int num_x() const { return num_x_; }
    int num_z() const { return num_z_; }
    int coeff_dim() const { return coeff_dim_; }
    const std::map<std::vector<word>, C>& terms() const& { return terms_; }
    std::map<std::vector<word>, C> terms() && { return std::move(terms_); }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const std::vector<word>& slots, const C& c) {
        if (static_cast<int>(slots.size()) != rank_)
            throw std::invalid_argument("tensor_polynomial: slot count mismatch");
        if (traits::is_zero(c)) return;
        auto [it, fresh] = terms_.try_emplace(slots, c);
        if (!fresh) {
            it->second = it->second + c;
            if (traits::is_zero(it->second)) terms_.erase(it);
        }
    }

    friend tensor_polynomial operator+(const tensor_polynomial& a, const tensor_polynomial& b) {
        if (a.rank_ != b.rank_) throw std::invalid_argument("tensor add: rank mismatch");
        tensor_polynomial r = a;
        for (const auto& [s, c] : b.terms_) r.add_term(s, c);
        return r;
    }
    friend tensor_polynomial operator*(const tensor_polynomial& a, const cplx& s) {
        tensor_polynomial r(a.num_x_, a.num_z_, a.coeff_dim_, a.rank_);
        for (const auto& [sl, c] : a.terms_) r.add_term(sl, C(c * s));
        return r;
    }

    /// (a (x) M) . T : multiplies into the first slot, coefficient on the left.
    friend tensor_polynomial operator*(const nc_polynomial<C>& p, const tensor_polynomial& t) {
        tensor_polynomial r(t.num_x_, t.num_z_, t.coeff_dim_, t.rank_);
        for (const auto& [wp, cp] : p.terms())
            for (const auto& [sl, ct] : t.terms_) {
                auto slots = sl;
                slots.front() = wp * slots.front();
                r.add_term(slots, cp * ct);
            }
        return r;
    }
    /// T . (a (x) M) : multiplies into the last slot.
    friend tensor_polynomial operator*(const tensor_polynomial& t, const nc_polynomial<C>& p) {
        tensor_polynomial r(t.num_x_, t.num_z_, t.coeff_dim_, t.rank_);
        for (const auto& [sl, ct] : t.terms_)
            for (const auto& [wp, cp] : p.terms()) {
                auto slots = sl;
                slots.back() = slots.back() * wp;
                r.add_term(slots, ct * cp);
            }
        return r;
    }

    /// Product of tensors that merges the last slot of the left factor with
    /// the first slot of the right factor; ranks r1 and r2 combine to
    /// r1 + r2 - 1.  This is the multiplication convention under which a
    /// product of polynomials and derivative tensors flattens into a single
    /// tensor.
    friend tensor_polynomial merge_mul(const tensor_polynomial& a, const tensor_polynomial& b) {
        tensor_polynomial r(a.num_x_, a.num_z_, a.coeff_dim_, a.rank_ + b.rank_ - 1);
        for (const auto& [sa, ca] : a.terms_)
            for (const auto& [sb, cb] : b.terms_) {
                std::vector<word> slots;
                slots.reserve(r.rank_);
                slots.insert(slots.end(), sa.begin(), sa.end() - 1);
                slots.push_back(sa.back() * sb.front());
                slots.insert(slots.end(), sb.begin() + 1, sb.end());
                r.add_term(slots, ca * cb);
            }
        return r;
    }

    friend bool operator==(const tensor_polynomial& a, const tensor_polynomial& b) {
        if (a.rank_ != b.rank_ || a.terms_.size() != b.terms_.size()) return false;
        auto ia = a.terms_.begin();
        for (auto ib = b.terms_.begin(); ib != b.terms_.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return false;
            if (!traits::is_zero(C(ia->second - ib->second), 0.0)) return false;
        }
        return true;
    }

    double max_coeff_deviation(const tensor_polynomial& b) const {
        double m = 0.0;
        for (const auto& [s, c] : terms_) {
            auto it = b.terms_.find(s);
            m = std::max(m, it == b.terms_.end() ? traits::abs_max(c)
                                                 : traits::abs_max(C(c - it->second)));
        }
        for (const auto& [s, c] : b.terms_)
            if (!terms_.count(s)) m = std::max(m, traits::abs_max(c));
        return m;
    }

  private:
    int num_x_, num_z_, coeff_dim_, rank_;
    std::map<std::vector<word>, C> terms_;
};

template <class C>
tensor_polynomial<C> as_tensor(const nc_polynomial<C>& p) {
    tensor_polynomial<C> t(p.num_x(), p.num_z(), p.coeff_dim(), 1);
    for (const auto& [w, c] : p.terms()) t.add_term({w}, c);
    return t;
}

// ---------------------------------------------------------------------------
// Noncommutative derivatives.

namespace detail {

/// Splits the last slot of every term at each occurrence of X_i.
template <class C>
tensor_polynomial<C> differentiate_last_slot(const tensor_polynomial<C>& t, int i) {
    tensor_polynomial<C> r(t.num_x(), t.num_z(), t.coeff_dim(), t.rank() + 1);
    const generator xi = X(i);
    for (const auto& [slots, c] : t.terms()) {
        const word& w = slots.back();
        for (std::size_t p = 0; p < w.letters.size(); ++p) {
            if (w.letters[p] != xi) continue;
            std::vector<word> out(slots.begin(), slots.end() - 1);
            out.emplace_back(std::vector<generator>(w.letters.begin(), w.letters.begin() + p));
            out.emplace_back(std::vector<generator>(w.letters.begin() + p + 1, w.letters.end()));
            r.add_term(out, c);
        }
    }
    return r;
}

}  // namespace detail

/// d_i P = sum over splittings M = A X_i B of A (x) B, extended linearly.
/// Deterministic letters differentiate to zero.
template <class C>
tensor_polynomial<C> partial_derivative(const nc_polynomial<C>& p, int i) {
    if (i < 1 || i > p.num_x()) throw std::invalid_argument("partial_derivative: index out of range");
    return detail::differentiate_last_slot(as_tensor(p), i);
}

/// Iterated derivative of rank indices.size() + 1; each step differentiates
/// the last tensor slot.  Vanishes once the order exceeds the degree.
template <class C>
tensor_polynomial<C> higher_derivative(const nc_polynomial<C>& p, std::span<const int> indices) {
    for (int i : indices)
        if (i < 1 || i > p.num_x())
            throw std::invalid_argument("higher_derivative: index out of range");
    tensor_polynomial<C> t = as_tensor(p);
    for (int i : indices) t = detail::differentiate_last_slot(t, i);
    return t;
}

template <class C>
tensor_polynomial<C> higher_derivative(const nc_polynomial<C>& p, std::initializer_list<int> idx) {
    return higher_derivative(p, std::span<const int>(idx.begin(), idx.size()));
}

namespace detail {

inline void compositions(int total, int parts, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        if (total >= 1) {
            cur.push_back(total);
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    for (int first = 1; first + (parts - 1) <= total; ++first) {
        cur.push_back(first);
        compositions(total - first, parts - 1, cur, out);
        cur.pop_back();
    }
}

inline void increasing_tuples(int count, int lo, int hi, std::vector<int>& cur,
                              const std::function<void(const std::vector<int>&)>& emit) {
    if (count == 0) {
        emit(cur);
        return;
    }
    for (int v = lo; v <= hi - (count - 1); ++v) {
        cur.push_back(v);
        increasing_tuples(count - 1, v + 1, hi, cur, emit);
        cur.pop_back();
    }
}

}  // namespace detail

/// Expands the iterated derivative of P^k as a sum over the number of factors
/// hit (x), block sizes r_1+..+r_x = r, and hit positions k_1 < .. < k_x <= k:
/// plain powers of P interleaved with derivative blocks, flattened with
/// merge_mul.  Agrees with higher_derivative(pow(P,k), zs) termwise.
template <class C>
tensor_polynomial<C> power_derivative_expansion(const nc_polynomial<C>& p,
                                                std::span<const int> zs, int k) {
    const int r = static_cast<int>(zs.size());
    if (r < 1) throw std::invalid_argument("power_derivative_expansion: empty index list");
    if (k < 1) throw std::invalid_argument("power_derivative_expansion: power must be >= 1");

    std::vector<nc_polynomial<C>> pk;  // pk[t] = P^t
    pk.push_back(nc_polynomial<C>::identity_like(p));
    for (int t = 1; t <= k; ++t) pk.push_back(pk.back() * p);

    tensor_polynomial<C> result(p.num_x(), p.num_z(), p.coeff_dim(), r + 1);
    std::vector<std::vector<int>> blocks;
    for (int x = 1; x <= std::min(r, k); ++x) {
        blocks.clear();
        std::vector<int> scratch;
        detail::compositions(r, x, scratch, blocks);
        for (const auto& sizes : blocks) {
            // Derivative blocks: consecutive runs of zs of the given sizes.
            std::vector<tensor_polynomial<C>> dblocks;
            int at = 0;
            for (int s : sizes) {
                dblocks.push_back(higher_derivative(p, zs.subspan(at, s)));
                at += s;
            }
            std::vector<int> pos;
            detail::increasing_tuples(
                x, 1, k, pos, [&](const std::vector<int>& ks) {
                    tensor_polynomial<C> term = as_tensor(pk[ks[0] - 1]);
                    for (int t = 0; t < x; ++t) {
                        term = merge_mul(term, dblocks[t]);
                        const int gap = (t + 1 < x ? ks[t + 1] : k + 1) - ks[t] - 1;
                        term = merge_mul(term, as_tensor(pk[gap]));
                    }
                    result = result + term;
                });
        }
    }
    return result;
}

template <class C>
tensor_polynomial<C> power_derivative_expansion(const nc_polynomial<C>& p,
                                                std::initializer_list<int> zs, int k) {
    return power_derivative_expansion(p, std::span<const int>(zs.begin(), zs.size()), k);
}

}  // namespace freewick

#endif
