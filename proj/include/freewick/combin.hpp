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

// Circle sets (finite cyclically ordered label sets), non-crossing pair
// partitions, and configurations: chord sets on a circle in which every two
// chords are nested or disjoint (shared endpoints allowed).  Configurations
// generalize non-crossing pair partitions by letting a point carry several
// chords or none.

#ifndef FREEWICK_COMBIN_HPP
#define FREEWICK_COMBIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core.hpp"

namespace freewick::combin {

/// Labels 1..n in counter-clockwise order, with cyclic successor/predecessor.
struct circle_set {
    int n;

    explicit circle_set(int n_) : n(n_) {
        if (n < 1) throw std::invalid_argument("circle_set: need at least one point");
    }
    int succ(int i) const { return i == n ? 1 : i + 1; }
    int pred(int i) const { return i == 1 ? n : i - 1; }

    /// Elements strictly (open) or weakly (closed) between i and j following
    /// the successor order, wrapping around.
    std::vector<int> interval(int i, int j, bool closed) const {
        if (i == j) throw std::invalid_argument("circle interval: endpoints coincide");
        std::vector<int> out;
        if (closed) out.push_back(i);
        for (int k = succ(i); k != j; k = succ(k)) out.push_back(k);
        if (closed) out.push_back(j);
        return out;
    }

    /// True iff x lies on the closed arc from a to b (successor direction).
    bool on_closed_arc(int x, int a, int b) const {
        const int fwd = ((x - a) % n + n) % n;
        const int len = ((b - a) % n + n) % n;
        return fwd <= len;
    }
};

// ---------------------------------------------------------------------------
// Non-crossing pair partitions of [1, k].

struct pair_partition {
    std::vector<std::pair<int, int>> pairs;  // each (a, b) with a < b
};

inline bool is_noncrossing(const pair_partition& pp) {
    for (std::size_t s = 0; s < pp.pairs.size(); ++s)
        for (std::size_t t = s + 1; t < pp.pairs.size(); ++t) {
            auto [a, b] = pp.pairs[s];
            auto [c, d] = pp.pairs[t];
            if (c < a) {
                std::swap(a, c);
                std::swap(b, d);
            }
            if (a < c && c < b && b < d) return false;
        }
    return true;
}

namespace detail {

inline void ncp_rec(std::vector<int>& points, pair_partition& cur,
                    std::vector<pair_partition>& out) {
    if (points.empty()) {
        out.push_back(cur);
        return;
    }
    const int first = points[0];
    // first pairs with an element leaving an even count on each side
    for (std::size_t j = 1; j < points.size(); j += 2) {
        const int partner = points[j];
        cur.pairs.emplace_back(first, partner);
        std::vector<int> inner(points.begin() + 1, points.begin() + j);
        std::vector<int> outer(points.begin() + j + 1, points.end());
        if (inner.empty()) {
            ncp_rec(outer, cur, out);
        } else {
            // recurse on inner, then outer, sharing the partial partition
            std::vector<pair_partition> tmp;
            pair_partition saved = cur;
            ncp_rec(inner, cur, tmp);
            for (auto& t : tmp) {
                pair_partition next = t;
                ncp_rec(outer, next, out);
            }
            cur = saved;
        }
        cur.pairs.pop_back();
    }
}

}  // namespace detail

/// All non-crossing perfect matchings of [1, k]; Catalan(k/2) of them.
/// Odd k yields the empty list.
inline std::vector<pair_partition> enumerate_ncp(int k) {
    if (k > caps::ncp_points)
        throw capacity_error("enumerate_ncp: k exceeds cap " + std::to_string(caps::ncp_points));
    if (k < 0) throw std::invalid_argument("enumerate_ncp: negative k");
    if (k % 2 == 1) return {};
    std::vector<int> pts(k);
    for (int i = 0; i < k; ++i) pts[i] = i + 1;
    std::vector<pair_partition> out;
    pair_partition cur;
    detail::ncp_rec(pts, cur, out);
    for (const auto& pp : out)
        if (!is_noncrossing(pp)) throw consistency_error("enumerate_ncp produced a crossing");
    return out;
}

// ---------------------------------------------------------------------------
// Configurations.

struct chord {
    int a, b;  // normalized a < b

    chord(int i, int j) : a(std::min(i, j)), b(std::max(i, j)) {
        if (i == j) throw std::invalid_argument("chord: endpoints coincide");
    }
    friend auto operator<=>(const chord&, const chord&) = default;
};

/// Nesting test: {i,j} and {k,l} are compatible iff both i and j lie on one
/// of the two closed arcs cut by {k,l}.
inline bool chords_compatible(const circle_set& e, const chord& c1, const chord& c2) {
    const bool fwd = e.on_closed_arc(c1.a, c2.a, c2.b) && e.on_closed_arc(c1.b, c2.a, c2.b);
    const bool bwd = e.on_closed_arc(c1.a, c2.b, c2.a) && e.on_closed_arc(c1.b, c2.b, c2.a);
    return fwd || bwd;
}

/// The cyclic neighborhood of a point i in a configuration: its chord
/// partners listed against the circle order with i closing the cycle (the
/// reversed ordering).  The split sites are the partners that carry free
/// split points when a word sitting at i is cut up among its chords.
struct chord_cycle {
    std::vector<int> cycle;        // (k_m, ..., k_2, i): partners reversed, base last
    std::vector<int> tail;         // cycle without the base point, or {i} if isolated
    std::vector<int> split_sites;  // cycle minus {i, predecessor-of-i}

    int base() const { return cycle.back(); }
    bool isolated() const { return cycle.size() == 1; }
    /// Predecessor of the base point: the partner first reached from i in
    /// circle order.  Only defined when not isolated.
    int base_pred() const { return cycle[cycle.size() - 2]; }
    /// Predecessor of j within the cyclic list.
    int pred_of(int j) const {
        for (std::size_t t = 0; t < cycle.size(); ++t)
            if (cycle[t] == j) return cycle[(t + cycle.size() - 1) % cycle.size()];
        throw std::invalid_argument("chord_cycle: point not in cycle");
    }
};

class configuration {
  public:
    configuration(int n, std::vector<chord> chords) : n_(n), chords_(std::move(chords)) {
        std::sort(chords_.begin(), chords_.end());
        chords_.erase(std::unique(chords_.begin(), chords_.end()), chords_.end());
        const circle_set e(n_);
        for (const auto& c : chords_)
            if (c.a < 1 || c.b > n_) throw std::invalid_argument("configuration: chord off circle");
        for (std::size_t s = 0; s < chords_.size(); ++s)
            for (std::size_t t = s + 1; t < chords_.size(); ++t)
                if (!chords_compatible(e, chords_[s], chords_[t]))
                    throw std::invalid_argument(
                        "configuration: crossing chords {" + std::to_string(chords_[s].a) + "," +
                        std::to_string(chords_[s].b) + "} and {" + std::to_string(chords_[t].a) +
                        "," + std::to_string(chords_[t].b) + "}");
        build_cache();
    }

    int points() const { return n_; }
    const std::vector<chord>& chords() const { return chords_; }
    /// Sum over points of the number of chords at that point.
    int chord_weight() const { return c_k_; }
    /// Points carrying no chord.
    const std::vector<int>& free_points() const { return free_points_; }
    const chord_cycle& cycle_at(int i) const { return cycles_.at(i - 1); }
    bool has_chord(int i, int j) const {
        return std::binary_search(chords_.begin(), chords_.end(), chord(i, j));
    }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t t = 0; t < chords_.size(); ++t) {
            if (t) s += ",";
            s += "{" + std::to_string(chords_[t].a) + "," + std::to_string(chords_[t].b) + "}";
        }
        return s + "}";
    }

  private:
    void build_cache() {
        c_k_ = 0;
        cycles_.clear();
        cycles_.reserve(n_);
        free_points_.clear();
        for (int i = 1; i <= n_; ++i) {
            std::vector<int> partners;
            for (const auto& c : chords_) {
                if (c.a == i) partners.push_back(c.b);
                if (c.b == i) partners.push_back(c.a);
            }
            c_k_ += static_cast<int>(partners.size());
            if (partners.empty()) free_points_.push_back(i);
            // sort partners by cyclic distance from i, then reverse
            std::sort(partners.begin(), partners.end(), [&](int a, int b) {
                return ((a - i) % n_ + n_) % n_ < ((b - i) % n_ + n_) % n_;
            });
            chord_cycle cc;
            cc.cycle.assign(partners.rbegin(), partners.rend());
            cc.cycle.push_back(i);
            if (partners.empty()) {
                cc.tail = {i};
            } else {
                cc.tail.assign(cc.cycle.begin(), cc.cycle.end() - 1);
                cc.split_sites.assign(cc.cycle.begin(), cc.cycle.end() - 2);
            }
            cycles_.push_back(std::move(cc));
        }
    }

    int n_;
    std::vector<chord> chords_;
    int c_k_ = 0;
    std::vector<int> free_points_;
    std::vector<chord_cycle> cycles_;
};

inline chord_cycle chord_cycles(const configuration& k, int i) { return k.cycle_at(i); }

namespace detail {

template <class F>
void config_dfs(int n, const std::vector<chord>& all,
                const std::vector<std::vector<char>>& compat, std::vector<int>& chosen,
                std::size_t from, F&& visit) {
    {
        std::vector<chord> cs;
        cs.reserve(chosen.size());
        for (int idx : chosen) cs.push_back(all[idx]);
        visit(configuration(n, std::move(cs)));
    }
    for (std::size_t c = from; c < all.size(); ++c) {
        bool ok = true;
        for (int idx : chosen)
            if (!compat[idx][c]) {
                ok = false;
                break;
            }
        if (!ok) continue;
        chosen.push_back(static_cast<int>(c));
        config_dfs(n, all, compat, chosen, c + 1, visit);
        chosen.pop_back();
    }
}

}  // namespace detail

/// Visits every configuration on n points exactly once (the empty one first).
template <class F>
void for_each_configuration(int n, F&& visit) {
    if (n < 1) throw std::invalid_argument("for_each_configuration: n must be >= 1");
    if (n > caps::config_points)
        throw capacity_error("configuration enumeration capped at n = " +
                             std::to_string(caps::config_points));
    const circle_set e(n);
    std::vector<chord> all;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) all.emplace_back(i, j);
    std::vector<std::vector<char>> compat(all.size(), std::vector<char>(all.size(), 0));
    for (std::size_t s = 0; s < all.size(); ++s)
        for (std::size_t t = 0; t < all.size(); ++t)
            compat[s][t] = chords_compatible(e, all[s], all[t]);
    std::vector<int> chosen;
    detail::config_dfs(n, all, compat, chosen, 0, visit);
}

inline std::vector<configuration> enumerate_configurations(int n) {
    std::vector<configuration> out;
    for_each_configuration(n, [&](configuration k) { out.push_back(std::move(k)); });
    return out;
}

// ---------------------------------------------------------------------------
// Certified bounds over the full enumeration.

struct bounds_report {
    int n = 0;
    std::uint64_t count = 0;
    int max_chord_weight = 0;
    int weight_bound = 0;      // 4n - 6
    double count_bound = 0.0;  // (80e)^n
    bool weight_bound_attained = false;
};

/// The chord set attaining weight 4n-6: the star at 1 plus the boundary ring.
inline std::vector<chord> extremal_chords(int n) {
    std::vector<chord> cs;
    for (int j = 2; j <= n; ++j) cs.emplace_back(1, j);
    for (int j = 1; j < n; ++j) cs.emplace_back(j, j + 1);
    cs.emplace_back(n, 1);
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    return cs;
}

/// Exhaustively checks chord_weight <= 4n-6 (attained by the extremal set)
/// and count <= (80e)^n.  Throws naming a witness if either bound fails.
inline bounds_report verify_bounds(int n) {
    if (n < 2) throw std::invalid_argument("verify_bounds: n must be >= 2");
    bounds_report rep;
    rep.n = n;
    rep.weight_bound = 4 * n - 6;
    rep.count_bound = std::pow(80.0 * std::exp(1.0), n);
    for_each_configuration(n, [&](const configuration& k) {
        ++rep.count;
        if (k.chord_weight() > rep.weight_bound)
            throw consistency_error("chord weight bound violated by " + k.to_string());
        rep.max_chord_weight = std::max(rep.max_chord_weight, k.chord_weight());
    });
    if (static_cast<double>(rep.count) > rep.count_bound)
        throw consistency_error("configuration count bound violated at n = " + std::to_string(n));
    const configuration star_ring(n, extremal_chords(n));
    rep.weight_bound_attained = star_ring.chord_weight() == rep.weight_bound;
    if (!rep.weight_bound_attained)
        throw consistency_error("extremal configuration " + star_ring.to_string() +
                                " does not attain 4n-6");
    return rep;
}

}  // namespace freewick::combin

#endif
