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

#ifndef FREEWICK_CORE_HPP
#define FREEWICK_CORE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace freewick {

using cplx = std::complex<double>;

/// Thrown when a request exceeds one of the documented desk-scale caps.
class capacity_error : public std::runtime_error {
  public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by internal cross-checks that are expected to hold exactly.
class consistency_error : public std::logic_error {
  public:
    explicit consistency_error(const std::string& what) : std::logic_error(what) {}
};

namespace caps {
inline constexpr double coeff_zero_tol = 1e-12;   // coefficient drop threshold
inline constexpr double psd_tol = 1e-10;          // covariance PSD slack
inline constexpr double cross_check_tol = 1e-9;   // dual-route trace agreement
inline constexpr double norm_rel_tol = 1e-8;      // power-iteration stop
inline constexpr std::size_t basis_dim = 200000;  // Fock basis size
inline constexpr int ncp_points = 24;             // pair-partition enumeration
inline constexpr int config_points = 7;           // configuration enumeration
inline constexpr int mixed_trace_degree = 12;     // sum of word degrees
inline constexpr int genus_word_len = 14;         // exact Wick oracle
inline constexpr int harer_zagier_k = 30;
inline constexpr int derivative_slots = 3;        // tensored-norm slot cap
inline constexpr int matrix_dim = 512;            // Monte Carlo N
inline constexpr long mc_samples = 1000000;
}  // namespace caps

// ---------------------------------------------------------------------------
// Deterministic hashing / counter-based random numbers.
//
// Every random quantity in the library is a pure function of (seed, stream,
// counter), so sampling is reproducible bit-for-bit on one platform and can
// be split across workers without coordination.

namespace rng {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t keyed(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = mix64(seed ^ 0x8e9c1d2b3a475968ULL);
    h = mix64(h ^ (stream * 0xd1342543de82ef95ULL));
    h = mix64(h ^ (counter * 0xad93d23594c935a9ULL));
    return h;
}

/// Uniform double in (0,1], using the top 53 bits.
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>((keyed(seed, stream, counter) >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; one value per counter.
inline double gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = uniform(seed, stream, 2 * counter);
    const double u2 = uniform(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace rng

// ---------------------------------------------------------------------------
// Worker-pool helpers.  Results are gathered by index and reduced with a
// fixed pairwise tree, so the outcome does not depend on the thread count.

namespace threads {

inline int& count_ref() {
    static int n = [] {
        if (const char* env = std::getenv("FREEWICK_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) return v;
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }();
    return n;
}

inline int count() { return count_ref(); }
inline void set_count(int n) { count_ref() = n < 1 ? 1 : n; }

}  // namespace threads

/// Runs fn(i) for i in [0, n); fn must only touch its own slot of any output.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
    const int workers = threads::count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t t_count = std::min<std::size_t>(workers, n);
    std::atomic<std::size_t> next{0};
    pool.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

/// Pairwise (tree) sum: deterministic regardless of how values were produced.
template <class T>
T pairwise_sum(std::vector<T> v, const T& zero) {
    if (v.empty()) return zero;
    while (v.size() > 1) {
        std::size_t half = v.size() / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (v.size() % 2 == 1) {
            v[half] = v.back();
            v.resize(half + 1);
        } else {
            v.resize(half);
        }
    }
    return v[0];
}

}  // namespace freewick

#endif
