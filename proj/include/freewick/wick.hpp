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

// Trace calculus for semicircular families.
//
// A word in correlated semicircular variables traces to a sum over
// non-crossing pair matchings weighted by the covariance (the Wick formula).
// When the word is a product A_1(x^1)...A_n(x^n) of monomials in n families
// with tau(x^i_u x^j_v) = delta_{u=v} kappa_{ij}, the same trace factorizes
// over configurations: chord sets on the circle of factors.  Each chord
// {i,j} contributes a two-sided factor tau(S_i [l*] Delta_{ij} [r] S_j)
// built from consecutive subwords of A_i and A_j cut at split points, with
// Delta_{ij} = sum_{l>=1} kappa_{ij}^l P_l, and chord-free factors contribute
// tau(A_i(x)).  A third route reaches the same value through iterated
// noncommutative derivatives of the A_i.  All three routes are implemented
// and cross-checked.

#ifndef FREEWICK_WICK_HPP
#define FREEWICK_WICK_HPP

#include <map>
#include <optional>

#include "combin.hpp"
#include "fock.hpp"
#include "ncalg.hpp"

namespace freewick::wick {

using fock::VectorXcd;

/// Covariance between families: symmetric PSD, unit diagonal, entries in
/// [-1, 1].
struct covariance_spec {
    Eigen::MatrixXd kappa;

    explicit covariance_spec(Eigen::MatrixXd k) : kappa(std::move(k)) {
        const int n = static_cast<int>(kappa.rows());
        if (kappa.cols() != n || n < 1) throw std::invalid_argument("covariance must be square");
        if ((kappa - kappa.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw std::invalid_argument("covariance must be symmetric");
        for (int i = 0; i < n; ++i) {
            if (std::abs(kappa(i, i) - 1.0) > caps::psd_tol)
                throw std::invalid_argument("covariance diagonal must be 1");
            for (int j = 0; j < n; ++j)
                if (std::abs(kappa(i, j)) > 1.0 + caps::psd_tol)
                    throw std::invalid_argument("covariance entries must lie in [-1,1]");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kappa, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -caps::psd_tol)
            throw std::invalid_argument("covariance is not positive semidefinite");
    }

    static covariance_spec identity(int n) {
        return covariance_spec(Eigen::MatrixXd::Identity(n, n));
    }

    int families() const { return static_cast<int>(kappa.rows()); }
    double operator()(int i, int j) const { return kappa(i - 1, j - 1); }
};

struct family_letter {
    int family;  // 1-based
    int slot;    // 1-based
};
using family_word = std::vector<family_letter>;

/// A monomial in the slots of one family: letters in [1, d].
using slot_word = std::vector<int>;

// ---------------------------------------------------------------------------
// Wick formula: sum over non-crossing matchings, pair weight
// delta_{slot match} * kappa_{family pair}.  Zero for odd length, one for the
// empty word.

namespace detail {

class ncp_summer {
  public:
    ncp_summer(const family_word& w, const covariance_spec& cov) : w_(w), cov_(cov) {
        memo_.assign((w.size() + 1) * (w.size() + 1), std::nullopt);
    }

    double range(std::size_t lo, std::size_t hi) {
        if (lo >= hi) return 1.0;
        if ((hi - lo) % 2 == 1) return 0.0;
        auto& slot = memo_[lo * (w_.size() + 1) + hi];
        if (slot) return *slot;
        double total = 0.0;
        for (std::size_t t = lo + 1; t < hi; t += 2) {
            const double wgt = pair_weight(lo, t);
            if (wgt != 0.0) total += wgt * range(lo + 1, t) * range(t + 1, hi);
        }
        slot = total;
        return total;
    }

  private:
    double pair_weight(std::size_t p, std::size_t q) const {
        if (w_[p].slot != w_[q].slot) return 0.0;
        return cov_(w_[p].family, w_[q].family);
    }

    const family_word& w_;
    const covariance_spec& cov_;
    std::vector<std::optional<double>> memo_;
};

}  // namespace detail

inline double semicircular_trace(const family_word& w, const covariance_spec& cov) {
    for (const auto& l : w)
        if (l.family < 1 || l.family > cov.families() || l.slot < 1)
            throw std::invalid_argument("semicircular_trace: letter out of range");
    detail::ncp_summer s(w, cov);
    return s.range(0, w.size());
}

/// tau of a single-family monomial in a standard tuple (pair weight is the
/// slot match).
inline double plain_semicircular_trace(const slot_word& w) {
    family_word fw;
    fw.reserve(w.size());
    for (int s : w) fw.push_back({1, s});
    static const covariance_spec one = covariance_spec::identity(1);
    return semicircular_trace(fw, one);
}

// ---------------------------------------------------------------------------
// Linear extension over polynomials.

namespace detail {

inline slot_word to_slot_word(const word& w) {
    slot_word sw;
    sw.reserve(w.letters.size());
    for (const auto& g : w.letters) {
        if (g.kind != gen_kind::semicircular)
            throw std::invalid_argument("free trace: deterministic letters not allowed");
        sw.push_back(g.index);
    }
    return sw;
}

}  // namespace detail

inline cplx free_trace(const scalar_poly& p) {
    cplx acc{};
    for (const auto& [w, c] : p.terms())
        acc += c * plain_semicircular_trace(detail::to_slot_word(w));
    return acc;
}

/// Coefficient-valued trace id_A (x) tau.
inline Eigen::MatrixXcd operator_valued_free_trace(const matrix_poly& p) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(p.coeff_dim(), p.coeff_dim());
    for (const auto& [w, c] : p.terms())
        acc += c * plain_semicircular_trace(detail::to_slot_word(w));
    return acc;
}

// ---------------------------------------------------------------------------
// Chord trace factors.
//
// A factor is tau( L(x) [l*_a] P_l [r_b] R(x) ) for subwords L, R of words in
// a single standard d-tuple; the level profile (value for each l) is computed
// once on a small Fock basis and cached, then contracted against powers of a
// covariance entry to give the Delta factor.  Depth max(|L|,|R|)+1 is exact:
// each side is a ladder product applied to the vacuum.

class trace_calculator {
  public:
    explicit trace_calculator(int d) : d_(d) {
        if (d < 1) throw std::invalid_argument("trace_calculator: need d >= 1");
    }

    int slots() const { return d_; }

    double plain_trace(const slot_word& w) {
        auto [it, fresh] = plain_.try_emplace(w, 0.0);
        if (fresh) it->second = plain_semicircular_trace(w);
        return it->second;
    }

    /// Level profile of tau(L [l*] P_l [r] R); lstar/rcr are consumed letters
    /// in [1, d] or 0 for absent.
    const std::vector<double>& factor_profile(const slot_word& left, int lstar, int rcr,
                                              const slot_word& right) {
        factor_key key{left, right, lstar, rcr};
        auto it = profiles_.find(key);
        if (it != profiles_.end()) return it->second;
        return profiles_.emplace(std::move(key), compute_profile(left, lstar, rcr, right))
            .first->second;
    }

    /// tau(L [l*] Delta(kappa) [r] R) = sum_{l>=1} kappa^l profile[l].
    double delta_factor(const slot_word& left, int lstar, int rcr, const slot_word& right,
                        double kappa) {
        const auto& prof = factor_profile(left, lstar, rcr, right);
        double acc = 0.0;
        double kl = 1.0;
        for (std::size_t l = 1; l < prof.size(); ++l) {
            kl *= kappa;
            acc += kl * prof[l];
        }
        return acc;
    }

  private:
    struct factor_key {
        slot_word left, right;
        int lstar, rcr;
        friend auto operator<=>(const factor_key&, const factor_key&) = default;
    };

    std::vector<double> compute_profile(const slot_word& left, int lstar, int rcr,
                                        const slot_word& right) {
        const int depth = std::max({1, static_cast<int>(left.size()) + (lstar ? 1 : 0),
                                    static_cast<int>(right.size()) + (rcr ? 1 : 0)});
        const fock::fock_basis& b = basis(depth);
        VectorXcd v = b.vacuum();
        for (auto it = right.rbegin(); it != right.rend(); ++it)
            v = fock::apply_semicircular(b, unit(*it), v);
        if (rcr) v = fock::apply_right_creation(b, unit(rcr), v);

        std::vector<double> prof(depth + 1, 0.0);
        for (int l = 0; l <= depth; ++l) {
            VectorXcd u = fock::apply_level_projection(b, l, v);
            if (u.isZero(0.0)) continue;
            if (lstar) u = fock::apply_left_annihilation(b, unit(lstar), u);
            for (auto it = left.rbegin(); it != left.rend(); ++it)
                u = fock::apply_semicircular(b, unit(*it), u);
            prof[l] = std::real(u[0]);
        }
        return prof;
    }

    const fock::fock_basis& basis(int depth) {
        auto it = bases_.find(depth);
        if (it == bases_.end())
            it = bases_.emplace(depth, fock::fock_basis(d_, depth)).first;
        return it->second;
    }

    const VectorXcd& unit(int letter) {
        if (units_.empty())
            for (int a = 0; a < d_; ++a) units_.push_back(fock::unit_base_vector(d_, a));
        return units_.at(letter - 1);
    }

    int d_;
    std::map<int, fock::fock_basis> bases_;
    std::vector<VectorXcd> units_;
    std::map<slot_word, double> plain_;
    std::map<factor_key, std::vector<double>> profiles_;
};

// ---------------------------------------------------------------------------
// The mixed trace tau(A_1(x^1)...A_n(x^n)) and its two expansions.

namespace detail {

inline void check_words(const std::vector<slot_word>& words, int d) {
    int total = 0;
    for (const auto& w : words) {
        total += static_cast<int>(w.size());
        for (int s : w)
            if (s < 1 || s > d) throw std::invalid_argument("word letter out of slot range");
    }
    if (total > caps::mixed_trace_degree)
        throw capacity_error("mixed trace: total degree exceeds cap " +
                             std::to_string(caps::mixed_trace_degree));
}

}  // namespace detail

/// Direct evaluation, computed two independent ways (Wick matchings and Fock
/// numerics with correlated families) and cross-checked to 1e-9.
inline double mixed_trace(const std::vector<slot_word>& words, const covariance_spec& cov,
                          int d) {
    const int n = static_cast<int>(words.size());
    if (cov.families() != n) throw std::invalid_argument("mixed_trace: covariance size mismatch");
    detail::check_words(words, d);

    family_word flat;
    for (int i = 0; i < n; ++i)
        for (int s : words[i]) flat.push_back({i + 1, s});
    const double by_matchings = semicircular_trace(flat, cov);

    // Fock route: exact at depth floor(L/2) (deeper components cannot return
    // to the vacuum within the remaining letters).
    const int total = static_cast<int>(flat.size());
    double by_fock = 1.0;
    if (total > 0) {
        const fock::gram_vectors gram = fock::correlated_families(cov.kappa, d);
        const fock::fock_basis b(gram.base_dim(), std::max(1, total / 2));
        VectorXcd v = b.vacuum();
        for (auto it = flat.rbegin(); it != flat.rend(); ++it)
            v = fock::apply_semicircular(b, gram.xi(it->family, it->slot), v);
        by_fock = std::real(v[0]);
    }

    if (std::abs(by_matchings - by_fock) > caps::cross_check_tol)
        throw consistency_error("mixed_trace: Wick and Fock routes disagree (" +
                                std::to_string(by_matchings) + " vs " + std::to_string(by_fock) +
                                ")");
    return by_matchings;
}

/// One addend of the configuration expansion, for audit output.
struct chord_term {
    combin::configuration config;
    std::vector<std::vector<int>> splits;  // per point, aligned with split_sites
    double value;
};

struct chord_expansion_result {
    double value = 0.0;
    std::vector<chord_term> terms;
};

namespace detail {

struct side_spec {
    slot_word sub;
    int consumed = 0;  // letter taken by l* / r, 0 if the interval is closed
};

/// Subword of w over positions (lo, hi] (closed) or (lo, hi) plus the letter
/// at hi (consumed), positions 1-based.
inline side_spec chord_side(const slot_word& w, int lo, int hi, bool closed) {
    side_spec s;
    const int last = closed ? hi : hi - 1;
    for (int p = lo + 1; p <= last; ++p) s.sub.push_back(w[p - 1]);
    if (!closed) s.consumed = w[hi - 1];
    return s;
}

/// Split value k_{i,j}: 0 at the base point, deg A_i at the predecessor of
/// the base, otherwise the assigned strictly-increasing split point.
struct split_table {
    const combin::configuration* cfg;
    const std::vector<slot_word>* words;
    const std::vector<std::vector<int>>* assigned;  // per point, split_sites order

    int value(int i, int j) const {
        const auto& cyc = cfg->cycle_at(i);
        if (j == i) return 0;
        if (!cyc.isolated() && j == cyc.base_pred())
            return static_cast<int>((*words)[i - 1].size());
        const auto& sites = cyc.split_sites;
        for (std::size_t t = 0; t < sites.size(); ++t)
            if (sites[t] == j) return (*assigned)[i - 1][t];
        throw std::invalid_argument("split value requested off the cycle");
    }
};

/// Factor for chord {i,j}: subword sides cut at the split points, endpoint
/// letters consumed by l* / r exactly when the partner is not the last block
/// of the corresponding cycle.
inline double chord_factor(const combin::chord& c, const split_table& st,
                           const covariance_spec& cov, trace_calculator& calc) {
    const int i = c.a, j = c.b;
    const auto& ci = st.cfg->cycle_at(i);
    const auto& cj = st.cfg->cycle_at(j);
    const bool left_closed = ci.base_pred() == j;
    const bool right_closed = cj.base_pred() == i;
    const side_spec left = chord_side((*st.words)[i - 1], st.value(i, ci.pred_of(j)),
                                      st.value(i, j), left_closed);
    const side_spec right = chord_side((*st.words)[j - 1], st.value(j, cj.pred_of(i)),
                                       st.value(j, i), right_closed);
    return calc.delta_factor(left.sub, left.consumed, right.consumed, right.sub, cov(i, j));
}

template <class F>
void for_each_split(const std::vector<slot_word>& words, const combin::configuration& cfg,
                    std::vector<std::vector<int>>& assigned, std::size_t i, F&& visit) {
    if (i == words.size()) {
        visit();
        return;
    }
    const auto& sites = cfg.cycle_at(static_cast<int>(i) + 1).split_sites;
    const int deg = static_cast<int>(words[i].size());
    const int need = static_cast<int>(sites.size());
    if (need == 0) {
        assigned[i].clear();
        for_each_split(words, cfg, assigned, i + 1, visit);
        return;
    }
    if (need > deg - 1) return;  // no room for strictly increasing interior splits
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int picked, int lo) {
        if (picked == need) {
            assigned[i] = cur;
            for_each_split(words, cfg, assigned, i + 1, visit);
            return;
        }
        for (int v = lo; v <= deg - 1 - (need - picked - 1); ++v) {
            cur.push_back(v);
            rec(picked + 1, v + 1);
            cur.pop_back();
        }
    };
    rec(0, 1);
}

}  // namespace detail

/// Expands the mixed trace as a sum over configurations and split points of
/// products of chord factors.  Each enumerated (configuration, splits) term
/// is reported for audit.
inline chord_expansion_result mixed_trace_chord_expansion(const std::vector<slot_word>& words,
                                                          const covariance_spec& cov, int d,
                                                          trace_calculator& calc) {
    const int n = static_cast<int>(words.size());
    if (cov.families() != n)
        throw std::invalid_argument("chord expansion: covariance size mismatch");
    detail::check_words(words, d);

    chord_expansion_result result;
    combin::for_each_configuration(n, [&](const combin::configuration& cfg) {
        double free_product = 1.0;
        for (int i : cfg.free_points()) free_product *= calc.plain_trace(words[i - 1]);

        std::vector<std::vector<int>> assigned(n);
        detail::for_each_split(words, cfg, assigned, 0, [&]() {
            detail::split_table st{&cfg, &words, &assigned};
            double value = free_product;
            for (const auto& c : cfg.chords()) {
                if (value == 0.0) break;
                value *= detail::chord_factor(c, st, cov, calc);
            }
            result.terms.push_back({cfg, assigned, value});
            result.value += value;
        });
    });
    return result;
}

// ---------------------------------------------------------------------------
// Derivative route: the same trace as a sum over configurations and letter
// assignments of trace products applied to iterated-derivative tensors.

/// Letter assignment on the split sites: z[(i, j)] for j in split_sites(i).
using letter_assignment = std::map<std::pair<int, int>, int>;

/// Product of chord trace factors for one configuration applied to per-point
/// subword tensors (rank = |tail of the cycle|; the tensor slots follow the
/// tail order).  Chord-free points contribute tau of their single slot.
inline double config_tensor_trace(const combin::configuration& cfg, const letter_assignment& z,
                                  const std::vector<tensor_polynomial<cplx>>& tensors,
                                  const covariance_spec& cov, trace_calculator& calc) {
    const int n = cfg.points();
    if (static_cast<int>(tensors.size()) != n)
        throw std::invalid_argument("config_tensor_trace: need one tensor per point");
    for (int i = 1; i <= n; ++i)
        if (tensors[i - 1].rank() != static_cast<int>(cfg.cycle_at(i).tail.size()))
            throw std::invalid_argument("config_tensor_trace: tensor rank mismatch at point " +
                                        std::to_string(i));

    // slot position of partner j inside the tail of i's cycle
    auto slot_of = [&](int i, int j) {
        const auto& tail = cfg.cycle_at(i).tail;
        for (std::size_t t = 0; t < tail.size(); ++t)
            if (tail[t] == j) return t;
        throw std::invalid_argument("config_tensor_trace: partner not on cycle");
    };
    auto z_at = [&](int i, int j) {
        auto it = z.find({i, j});
        if (it == z.end())
            throw std::invalid_argument("config_tensor_trace: missing letter assignment");
        return it->second;
    };

    // iterate over one term from each tensor
    using term_iter = std::map<std::vector<word>, cplx>::const_iterator;
    std::vector<term_iter> its(n), ends(n);
    for (int i = 0; i < n; ++i) {
        if (tensors[i].terms().empty()) return 0.0;
        its[i] = tensors[i].terms().begin();
        ends[i] = tensors[i].terms().end();
    }

    double total = 0.0;
    for (;;) {
        cplx coeff{1.0, 0.0};
        for (int i = 0; i < n; ++i) coeff *= its[i]->second;
        double value = 1.0;
        for (int i = 1; i <= n && value != 0.0; ++i)
            if (cfg.cycle_at(i).isolated())
                value *= calc.plain_trace(detail::to_slot_word(its[i - 1]->first[0]));
        for (const auto& c : cfg.chords()) {
            if (value == 0.0) break;
            const int i = c.a, j = c.b;
            const auto& ci = cfg.cycle_at(i);
            const auto& cj = cfg.cycle_at(j);
            const bool left_closed = ci.base_pred() == j;
            const bool right_closed = cj.base_pred() == i;
            const slot_word left =
                detail::to_slot_word(its[i - 1]->first[slot_of(i, j)]);
            const slot_word right =
                detail::to_slot_word(its[j - 1]->first[slot_of(j, i)]);
            value *= calc.delta_factor(left, left_closed ? 0 : z_at(i, j),
                                       right_closed ? 0 : z_at(j, i), right, cov(i, j));
        }
        total += std::real(coeff) * value;

        int pos = n - 1;
        while (pos >= 0) {
            if (++its[pos] != ends[pos]) break;
            its[pos] = tensors[pos].terms().begin();
            --pos;
        }
        if (pos < 0) break;
    }
    return total;
}

/// Full derivative route: sum over configurations and letter assignments of
/// config_tensor_trace applied to the iterated derivatives of the words,
/// differentiated along the split sites of each cycle.
inline double mixed_trace_derivative_route(const std::vector<slot_word>& words,
                                           const covariance_spec& cov, int d,
                                           trace_calculator& calc) {
    const int n = static_cast<int>(words.size());
    if (cov.families() != n)
        throw std::invalid_argument("derivative route: covariance size mismatch");
    detail::check_words(words, d);

    std::vector<scalar_poly> polys;
    polys.reserve(n);
    for (const auto& w : words) {
        scalar_poly p(d, 0);
        std::vector<generator> ls;
        for (int s : w) ls.push_back(X(s));
        p.add_term(word{std::move(ls)}, cplx{1.0, 0.0});
        polys.push_back(std::move(p));
    }

    double total = 0.0;
    combin::for_each_configuration(n, [&](const combin::configuration& cfg) {
        std::vector<std::pair<int, int>> sites;  // flattened split sites (i, j)
        for (int i = 1; i <= n; ++i)
            for (int j : cfg.cycle_at(i).split_sites) sites.emplace_back(i, j);

        std::vector<int> letters(sites.size(), 1);
        for (;;) {
            letter_assignment z;
            for (std::size_t t = 0; t < sites.size(); ++t) z[sites[t]] = letters[t];

            std::vector<tensor_polynomial<cplx>> tensors;
            tensors.reserve(n);
            for (int i = 1; i <= n; ++i) {
                std::vector<int> idx;
                for (int j : cfg.cycle_at(i).split_sites) idx.push_back(z.at({i, j}));
                tensors.push_back(higher_derivative(polys[i - 1], std::span<const int>(idx)));
            }
            total += config_tensor_trace(cfg, z, tensors, cov, calc);

            std::size_t pos = 0;
            while (pos < letters.size()) {
                if (++letters[pos] <= d) break;
                letters[pos] = 1;
                ++pos;
            }
            if (pos == letters.size()) break;
        }
    });
    return total;
}

}  // namespace freewick::wick

#endif
