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

// Command-line driver.  Subcommands mirror the library modules: moments,
// configs, wick-verify, masterineq, mc, strongconv, tail.  All randomness is
// counter-based, so identical invocations with identical seeds produce
// byte-identical output regardless of --threads.
//
// Exit codes: 0 pass, 1 assertion failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <freewick/bounds.hpp>
#include <freewick/combin.hpp>
#include <freewick/parse.hpp>
#include <freewick/rmt.hpp>
#include <freewick/wick.hpp>

#include <cinttypes>
#include <iostream>

namespace fw = freewick;
using nlohmann::json;

namespace {

struct output_options {
    std::string format = "table";
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& tok : split_list(s)) out.push_back(std::stoi(tok));
    return out;
}

std::vector<std::string> split_semi(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ';') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

fw::word parse_word(const std::string& text, int d) {
    const auto p = fw::parse_polynomial(text, d, 0);
    if (p.terms().size() != 1 || std::abs(p.terms().begin()->second - fw::cplx{1.0, 0.0}) > 0)
        throw CLI::ValidationError("--word", "expected a plain monomial like X1^4 or X1X2");
    return p.terms().begin()->first;
}

std::vector<int> slots_of(const fw::word& w) {
    std::vector<int> slots;
    for (const auto& g : w.letters) {
        if (g.kind != fw::gen_kind::semicircular)
            throw CLI::ValidationError("--word", "only X letters are allowed here");
        slots.push_back(g.index);
    }
    return slots;
}

Eigen::MatrixXd parse_kappa(std::string text, double cval, bool has_c) {
    if (has_c) {
        std::string out;
        for (std::size_t i = 0; i < text.size(); ++i) {
            const bool standalone =
                text[i] == 'c' && (i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]))) &&
                (i + 1 == text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 1])));
            if (standalone)
                out += fw::detail::format_double(cval);
            else
                out += text[i];
        }
        text = std::move(out);
    }
    const json j = json::parse(text);
    const int n = static_cast<int>(j.size());
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < n; ++c) k(i, c) = j.at(i).at(c).get<double>();
    return k;
}

Eigen::MatrixXcd parse_matrix(const std::string& text) {
    if (text.rfind("diag(", 0) == 0 && text.back() == ')') {
        const auto entries = split_list(text.substr(5, text.size() - 6));
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(entries.size(), entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = std::stod(entries[i]);
        return m;
    }
    const json j = json::parse(text);
    const int n = static_cast<int>(j.size());
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const auto& e = j.at(r).at(c);
            m(r, c) = e.is_array() ? fw::cplx(e.at(0).get<double>(), e.at(1).get<double>())
                                   : fw::cplx(e.get<double>(), 0.0);
        }
    return m;
}

void emit(const output_options& opt, const json& doc,
          const std::function<void()>& print_table) {
    if (opt.format == "json")
        std::cout << doc.dump(2) << "\n";
    else
        print_table();
}

int max_x_index(const fw::word& w) {
    int d = 1;
    for (const auto& g : w.letters)
        if (g.kind == fw::gen_kind::semicircular) d = std::max(d, g.index);
    return d;
}

// ---------------------------------------------------------------------------

int cmd_moments(const std::string& word_text, int N, long mc, std::uint64_t seed, int pmax,
                const output_options& opt) {
    const fw::word w = parse_word(word_text, 9);
    const auto slots = slots_of(w);
    const auto coeffs = fw::rmt::expansion_coefficients(slots, pmax);
    const auto exact = fw::rmt::gue_exact_mixed_moment(slots, N);
    const double free_side = fw::wick::plain_semicircular_trace(slots);

    json doc;
    doc["word"] = word_text;
    doc["N"] = N;
    doc["free_trace"] = free_side;
    doc["exact"] = exact.str();
    doc["exact_value"] = exact.convert_to<double>();
    doc["coefficients"] = json::array();
    for (const auto& c : coeffs) doc["coefficients"].push_back(c.str());

    fw::rmt::mc_row row;
    if (mc > 0) {
        fw::scalar_poly p(max_x_index(w), 0);
        p.add_term(w, fw::cplx{1.0, 0.0});
        row = fw::rmt::mc_moment(p, 1, N, mc, {seed, 0}, word_text);
        row.has_exact = true;
        row.exact = exact.convert_to<double>();
        doc["mc_mean"] = row.mc_mean;
        doc["mc_stderr"] = row.mc_stderr;
        doc["samples"] = mc;
        doc["seed"] = seed;
    }
    emit(opt, doc, [&] {
        if (opt.format == "csv") {
            std::printf("key,N,k,exact,mc_mean,mc_stderr,samples,seed\n");
            std::printf("%s,%d,1,%.17g,%.17g,%.17g,%ld,%" PRIu64 "\n", word_text.c_str(), N,
                        exact.convert_to<double>(), mc > 0 ? row.mc_mean : 0.0,
                        mc > 0 ? row.mc_stderr : 0.0, mc, seed);
            return;
        }
        std::printf("word          %s\n", word_text.c_str());
        std::printf("free trace    %.17g\n", free_side);
        std::printf("exact (N=%d)  %s = %.17g\n", N, exact.str().c_str(),
                    exact.convert_to<double>());
        std::printf("coefficients ");
        for (const auto& c : coeffs) std::printf(" %s", c.str().c_str());
        std::printf("\n");
        if (mc > 0)
            std::printf("mc            %.17g +- %.17g  (samples %ld, seed %" PRIu64 ")\n",
                        row.mc_mean, row.mc_stderr, mc, seed);
    });
    return 0;
}

int cmd_configs(int n, bool check_remark, bool dump, const output_options& opt) {
    const auto rep = fw::combin::verify_bounds(n);
    json doc;
    doc["n"] = rep.n;
    doc["count"] = rep.count;
    doc["max_cK"] = rep.max_chord_weight;
    doc["bound_4n6"] = rep.weight_bound;
    doc["bound_80e"] = rep.count_bound;
    doc["remark_attained"] = rep.weight_bound_attained;
    if (check_remark) {
        const fw::combin::configuration star(n, fw::combin::extremal_chords(n));
        json chords = json::array();
        for (const auto& c : star.chords()) chords.push_back({c.a, c.b});
        doc["remark_chords"] = chords;
        doc["remark_cK"] = star.chord_weight();
    }
    if (dump) {
        json configs = json::array();
        fw::combin::for_each_configuration(n, [&](const fw::combin::configuration& k) {
            json chords = json::array();
            for (const auto& c : k.chords()) chords.push_back({c.a, c.b});
            configs.push_back({{"n", n}, {"chords", chords}});
        });
        doc["configurations"] = configs;
    }
    emit(opt, doc, [&] {
        std::printf("n         %d\n", rep.n);
        std::printf("count     %" PRIu64 "  (bound (80e)^n = %.6g)\n", rep.count,
                    rep.count_bound);
        std::printf("max c_K   %d  (bound 4n-6 = %d, attained: %s)\n", rep.max_chord_weight,
                    rep.weight_bound, rep.weight_bound_attained ? "yes" : "no");
        if (check_remark) std::printf("remark    c_K = %d\n", doc["remark_cK"].get<int>());
    });
    return 0;
}

int cmd_wick_verify(const std::string& words_text, const std::string& kappa_text, double cval,
                    bool has_c, int d, double tol, bool audit, bool random_mode, int rn,
                    int maxdeg, int trials, std::uint64_t seed, const output_options& opt) {
    json doc;
    bool all_pass = true;

    const auto run_instance = [&](const std::vector<fw::wick::slot_word>& words,
                                  const fw::wick::covariance_spec& cov, json& out) {
        fw::wick::trace_calculator calc(d);
        const double lhs = fw::wick::mixed_trace(words, cov, d);
        const auto rhs = fw::wick::mixed_trace_chord_expansion(words, cov, d, calc);
        const double deriv = fw::wick::mixed_trace_derivative_route(words, cov, d, calc);
        const bool pass = std::abs(lhs - rhs.value) <= tol && std::abs(lhs - deriv) <= tol;
        out["lhs"] = lhs;
        out["rhs"] = rhs.value;
        out["derivative_route"] = deriv;
        out["pass"] = pass;
        if (audit) {
            json terms = json::array();
            for (const auto& t : rhs.terms) {
                json chords = json::array();
                for (const auto& c : t.config.chords()) chords.push_back({c.a, c.b});
                terms.push_back(
                    {{"K", chords}, {"splits", t.splits}, {"value", t.value}});
            }
            out["terms"] = terms;
        }
        return pass;
    };

    if (random_mode) {
        json runs = json::array();
        std::uint64_t ctr = 0;
        for (int t = 0; t < trials; ++t) {
            const int nn = 1 + static_cast<int>(fw::rng::uniform(seed, 1, ctr++) * rn) % rn;
            std::vector<fw::wick::slot_word> words(nn);
            for (auto& w : words) {
                const int deg =
                    static_cast<int>(fw::rng::uniform(seed, 1, ctr++) * (maxdeg + 1)) %
                    (maxdeg + 1);
                for (int l = 0; l < deg; ++l)
                    w.push_back(1 + static_cast<int>(fw::rng::uniform(seed, 1, ctr++) * d) % d);
            }
            Eigen::MatrixXd a(nn, nn);
            for (int i = 0; i < nn; ++i)
                for (int j = 0; j < nn; ++j)
                    a(i, j) = 2.0 * fw::rng::uniform(seed, 2, ctr++) - 1.0;
            Eigen::MatrixXd k = a * a.transpose();
            Eigen::VectorXd dg = k.diagonal().cwiseSqrt().cwiseInverse();
            k = dg.asDiagonal() * k * dg.asDiagonal();
            json run;
            run["words"] = words;
            all_pass = run_instance(words, fw::wick::covariance_spec(k), run) && all_pass;
            runs.push_back(run);
        }
        doc["trials"] = runs;
        doc["pass"] = all_pass;
    } else {
        std::vector<fw::wick::slot_word> words;
        for (const auto& tok : split_list(words_text))
            words.push_back(slots_of(parse_word(tok, d)));
        const fw::wick::covariance_spec cov(parse_kappa(kappa_text, cval, has_c));
        all_pass = run_instance(words, cov, doc);
    }

    emit(opt, doc, [&] {
        if (!random_mode) {
            std::printf("lhs   %.12g\nrhs   %.12g\nderiv %.12g\npass  %s\n",
                        doc["lhs"].get<double>(), doc["rhs"].get<double>(),
                        doc["derivative_route"].get<double>(), all_pass ? "yes" : "no");
            if (audit)
                for (const auto& t : doc["terms"])
                    std::printf("  K=%s splits=%s value=%.12g\n", t["K"].dump().c_str(),
                                t["splits"].dump().c_str(), t["value"].get<double>());
        } else {
            std::printf("trials %d, all pass: %s\n",
                        static_cast<int>(doc["trials"].size()), all_pass ? "yes" : "no");
        }
    });
    return all_pass ? 0 : 1;
}

int cmd_masterineq(const std::string& polys_text, const std::string& sigma_text, int d,
                   bool random_mode, int trials, std::uint64_t seed, const output_options& opt) {
    bool all_pass = true;
    json doc;

    const auto report_json = [](const fw::bounds::master_report& rep) {
        json r;
        r["n"] = rep.n;
        r["sigma"] = rep.sigma;
        r["lhs"] = rep.lhs;
        r["rhs"] = rep.rhs;
        r["pass"] = rep.pass;
        json alpha = json::object();
        for (const auto& [key, v] : rep.alpha)
            alpha["i=" + std::to_string(key.first) + ",j=" + std::to_string(key.second)] = v;
        r["alpha"] = alpha;
        return r;
    };

    if (random_mode) {
        json runs = json::array();
        std::uint64_t ctr = 0;
        for (int t = 0; t < trials; ++t) {
            const int n = 1 + static_cast<int>(fw::rng::uniform(seed, 5, ctr++) * 3) % 3;
            std::vector<fw::scalar_poly> polys;
            for (int j = 0; j < n; ++j) {
                fw::scalar_poly p(d, 0);
                const int terms = 1 + static_cast<int>(fw::rng::uniform(seed, 5, ctr++) * 3) % 3;
                for (int tm = 0; tm < terms; ++tm) {
                    const int deg =
                        static_cast<int>(fw::rng::uniform(seed, 5, ctr++) * 4) % 4;
                    std::vector<fw::generator> ls;
                    for (int l = 0; l < deg; ++l)
                        ls.push_back(
                            fw::X(1 + static_cast<int>(fw::rng::uniform(seed, 5, ctr++) * d) % d));
                    const double re = 2.0 * fw::rng::uniform(seed, 5, ctr++) - 1.0;
                    p.add_term(fw::word{std::move(ls)}, fw::cplx(re, 0.0));
                }
                if (p.is_zero()) p = fw::scalar_poly::constant(d, 0, fw::cplx{1.0, 0.0});
                polys.push_back(std::move(p));
            }
            std::vector<int> sigma(n);
            for (int j = 0; j < n; ++j) sigma[j] = j + 1;
            for (int j = n - 1; j > 0; --j)
                std::swap(sigma[j],
                          sigma[static_cast<int>(fw::rng::uniform(seed, 6, ctr++) * (j + 1)) %
                                (j + 1)]);
            const auto rep = fw::bounds::master_inequality_check(polys, sigma, d);
            all_pass = rep.pass && all_pass;
            runs.push_back(report_json(rep));
        }
        doc["trials"] = runs;
        doc["pass"] = all_pass;
        emit(opt, doc, [&] {
            std::printf("trials %d, all pass: %s\n", trials, all_pass ? "yes" : "no");
        });
    } else {
        std::vector<fw::scalar_poly> polys;
        for (const auto& tok : split_list(polys_text))
            polys.push_back(fw::parse_polynomial(tok, d, 0));
        const auto sigma = parse_int_list(sigma_text);
        const auto rep = fw::bounds::master_inequality_check(polys, sigma, d);
        all_pass = rep.pass;
        doc = report_json(rep);
        emit(opt, doc, [&] {
            std::printf("n     %d\nlhs   %.12g\nrhs   %.12g\npass  %s\n", rep.n, rep.lhs,
                        rep.rhs, rep.pass ? "yes" : "no");
        });
    }
    return all_pass ? 0 : 1;
}

int cmd_mc(const std::string& poly_text, const std::string& n_list, int k, long samples,
           std::uint64_t seed, bool moment_mode, const output_options& opt) {
    const auto p = fw::parse_polynomial(poly_text, 9, 0);
    int d = 1;
    for (const auto& [w, c] : p.terms()) d = std::max(d, max_x_index(w));
    fw::scalar_poly pd(d, 0);
    for (const auto& [w, c] : p.terms()) pd.add_term(w, c);

    json rows = json::array();
    std::vector<fw::rmt::mc_row> table;
    for (int N : parse_int_list(n_list)) {
        fw::rmt::mc_row row;
        if (moment_mode) {
            row = fw::rmt::mc_moment(pd, k, N, samples, {seed, 0}, poly_text);
            if (pd.terms().size() == 1 &&
                std::abs(pd.terms().begin()->second - fw::cplx{1.0, 0.0}) == 0.0) {
                std::vector<int> slots;
                for (int t = 0; t < k; ++t) {
                    const auto s = slots_of(pd.terms().begin()->first);
                    slots.insert(slots.end(), s.begin(), s.end());
                }
                if (static_cast<int>(slots.size()) <= fw::caps::genus_word_len) {
                    row.has_exact = true;
                    row.exact =
                        fw::rmt::gue_exact_mixed_moment(slots, N).convert_to<double>();
                }
            }
        } else {
            row = fw::rmt::mc_lp_norm(pd, k, N, samples, {seed, 0}, poly_text);
        }
        table.push_back(row);
        json r;
        r["key"] = row.key;
        r["N"] = row.N;
        r["k"] = row.k;
        if (row.has_exact) r["exact"] = row.exact;
        r["mc_mean"] = row.mc_mean;
        r["mc_stderr"] = row.mc_stderr;
        r["samples"] = row.samples;
        r["seed"] = row.seed;
        rows.push_back(r);
    }
    json doc;
    doc["rows"] = rows;
    emit(opt, doc, [&] {
        std::printf("key,N,k,exact,mc_mean,mc_stderr,samples,seed\n");
        for (const auto& row : table) {
            if (row.has_exact)
                std::printf("%s,%d,%d,%.17g,%.17g,%.17g,%ld,%" PRIu64 "\n", row.key.c_str(),
                            row.N, row.k, row.exact, row.mc_mean, row.mc_stderr, row.samples,
                            row.seed);
            else
                std::printf("%s,%d,%d,,%.17g,%.17g,%ld,%" PRIu64 "\n", row.key.c_str(), row.N,
                            row.k, row.mc_mean, row.mc_stderr, row.samples, row.seed);
        }
    });
    return 0;
}

int cmd_strongconv(const std::string& poly_text, const std::string& y_text,
                   const std::string& n_list, int M, int k, long samples, std::uint64_t seed,
                   const output_options& opt) {
    std::vector<Eigen::MatrixXcd> ys;
    if (!y_text.empty())
        for (const auto& tok : split_semi(y_text)) ys.push_back(parse_matrix(tok));
    const int q = static_cast<int>(ys.size());
    const auto p0 = fw::parse_polynomial(poly_text, 9, std::max(1, q));
    int d = 1;
    for (const auto& [w, c] : p0.terms()) d = std::max(d, max_x_index(w));
    fw::scalar_poly p(d, std::max(1, q));
    for (const auto& [w, c] : p0.terms()) p.add_term(w, c);
    if (!ys.empty() && ys[0].rows() != M) M = static_cast<int>(ys[0].rows());

    const auto rep =
        fw::rmt::strong_convergence_experiment(p, parse_int_list(n_list), M, ys, k, samples,
                                               {seed, 0});
    json doc;
    doc["free_norm"] = rep.free_norm;
    doc["free_increment"] = rep.free_increment;
    doc["free_depth"] = rep.free_depth;
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"N", r.N},
                        {"norm_mean", r.norm_mean},
                        {"norm_stderr", r.norm_stderr},
                        {"lpk_mean", r.lpk_mean},
                        {"lpk_stderr", r.lpk_stderr},
                        {"gap", r.gap}});
    doc["rows"] = rows;
    emit(opt, doc, [&] {
        std::printf("free norm %.9g (depth %d, last increment %.3g)\n", rep.free_norm,
                    rep.free_depth, rep.free_increment);
        std::printf("N,norm_mean,norm_stderr,L2k_mean,L2k_stderr,gap\n");
        for (const auto& r : rep.rows)
            std::printf("%d,%.9g,%.3g,%.9g,%.3g,%.9g\n", r.N, r.norm_mean, r.norm_stderr,
                        r.lpk_mean, r.lpk_stderr, r.gap);
    });
    return 0;
}

int cmd_tail(const std::string& n_list, long samples, std::uint64_t seed,
             const output_options& opt) {
    const auto rows = fw::rmt::tail_check(parse_int_list(n_list), samples, {seed, 0});
    json doc;
    json jr = json::array();
    for (const auto& r : rows) {
        json cells = json::array();
        for (const auto& c : r.cells)
            cells.push_back({{"u", c.u},
                             {"freq", c.freq},
                             {"wilson_lo", c.wilson_lo},
                             {"wilson_hi", c.wilson_hi}});
        jr.push_back({{"N", r.N}, {"median", r.median_norm}, {"cells", cells}});
    }
    doc["rows"] = jr;
    emit(opt, doc, [&] {
        std::printf("N,median,u,freq,wilson_lo,wilson_hi\n");
        for (const auto& r : rows)
            for (const auto& c : r.cells)
                std::printf("%d,%.6g,%.2g,%.6g,%.6g,%.6g\n", r.N, r.median_norm, c.u, c.freq,
                            c.wilson_lo, c.wilson_hi);
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"free-probability and random-matrix toolkit"};
    app.require_subcommand(1);

    output_options opt;
    int threads = 0;
    app.add_option("--format", opt.format, "table|json|csv")->default_val("table");
    app.add_option("--threads", threads, "worker threads (FREEWICK_THREADS overrides)");

    // moments
    std::string word_text = "X1^2";
    int N = 64, pmax = 3;
    long mc_samples = 0;
    std::uint64_t seed = 0;
    auto* moments = app.add_subcommand("moments", "exact and Monte Carlo word moments");
    moments->add_option("--word", word_text, "monomial, e.g. X1^4 or X1X2X1X2")->required();
    moments->add_option("--N", N, "matrix size");
    moments->add_option("--mc", mc_samples, "Monte Carlo samples (0 = off)");
    moments->add_option("--seed", seed, "random seed");
    moments->add_option("--pmax", pmax, "number of expansion coefficients");

    // configs
    int cfg_n = 3;
    bool check_remark = false, dump = false;
    auto* configs = app.add_subcommand("configs", "configuration enumeration and bounds");
    configs->add_option("--n", cfg_n, "circle size (2..7)")->required();
    configs->add_flag("--check-remark", check_remark, "report the extremal chord set");
    configs->add_flag("--dump", dump, "include all configurations in JSON output");

    // wick-verify
    std::string words_text, kappa_text = "[[1]]";
    double cval = 0.0;
    int wv_d = 2, wv_n = 3, wv_maxdeg = 3, wv_trials = 20;
    double tol = 1e-8;
    bool audit = false, wv_random = false;
    auto* wick = app.add_subcommand("wick-verify", "dual-route mixed trace verification");
    wick->add_option("--words", words_text, "comma-separated monomials, e.g. X1X1,X1X1");
    wick->add_option("--kappa", kappa_text, "covariance JSON, may use the symbol c");
    auto* copt = wick->add_option("--c", cval, "value substituted for c in --kappa");
    wick->add_option("--d", wv_d, "slot count");
    wick->add_option("--tol", tol, "agreement tolerance");
    wick->add_flag("--audit", audit, "emit per-configuration terms");
    wick->add_flag("--random", wv_random, "random instance grid");
    wick->add_option("--n", wv_n, "max words per instance (random mode)");
    wick->add_option("--maxdeg", wv_maxdeg, "max degree per word (random mode)");
    wick->add_option("--trials", wv_trials, "random instances");
    wick->add_option("--seed", seed, "random seed");

    // masterineq
    std::string polys_text, sigma_text = "1";
    int mi_d = 2, mi_trials = 20;
    bool mi_random = false;
    auto* mi = app.add_subcommand("masterineq", "twisted-product norm inequality");
    mi->add_option("--polys", polys_text, "comma-separated polynomials");
    mi->add_option("--sigma", sigma_text, "permutation images, e.g. 2,1");
    mi->add_option("--d", mi_d, "slot count");
    mi->add_flag("--random", mi_random, "random instance grid");
    mi->add_option("--trials", mi_trials, "random instances");
    mi->add_option("--seed", seed, "random seed");

    // mc
    std::string mc_poly = "X1", mc_ns = "64";
    int mc_k = 2;
    long mc_n_samples = 10000;
    bool moment_mode = false;
    auto* mc = app.add_subcommand("mc", "Monte Carlo L^{2k} norms and moments");
    mc->add_option("--poly", mc_poly, "polynomial")->required();
    mc->add_option("--N", mc_ns, "comma-separated matrix sizes")->required();
    mc->add_option("--k", mc_k, "half-exponent k of L^{2k}");
    mc->add_option("--samples", mc_n_samples, "samples per size");
    mc->add_option("--seed", seed, "random seed");
    mc->add_flag("--moment", moment_mode, "report ts(P^k) instead of the L^{2k} norm");

    // strongconv
    std::string sc_poly = "X1", sc_y, sc_ns = "64,128";
    int sc_m = 2, sc_k = 4;
    long sc_samples = 200;
    auto* sc = app.add_subcommand("strongconv", "strong convergence experiment");
    sc->add_option("--poly", sc_poly, "polynomial in X and Y letters")->required();
    sc->add_option("--Y", sc_y, "semicolon-separated matrices, e.g. diag(1,-1)");
    sc->add_option("--N", sc_ns, "comma-separated matrix sizes");
    sc->add_option("--M", sc_m, "deterministic matrix size");
    sc->add_option("--k", sc_k, "L^{2k} half-exponent");
    sc->add_option("--samples", sc_samples, "samples per size");
    sc->add_option("--seed", seed, "random seed");

    // tail
    std::string tail_ns = "64,128";
    long tail_samples = 2000;
    auto* tail = app.add_subcommand("tail", "norm tail exceedance frequencies");
    tail->add_option("--N", tail_ns, "comma-separated matrix sizes");
    tail->add_option("--samples", tail_samples, "samples per size");
    tail->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (threads > 0 && !std::getenv("FREEWICK_THREADS")) fw::threads::set_count(threads);

    try {
        if (*moments) return cmd_moments(word_text, N, mc_samples, seed, pmax, opt);
        if (*configs) return cmd_configs(cfg_n, check_remark, dump, opt);
        if (*wick)
            return cmd_wick_verify(words_text, kappa_text, cval, copt->count() > 0, wv_d, tol,
                                   audit, wv_random, wv_n, wv_maxdeg, wv_trials, seed, opt);
        if (*mi)
            return cmd_masterineq(polys_text, sigma_text, mi_d, mi_random, mi_trials, seed, opt);
        if (*mc) return cmd_mc(mc_poly, mc_ns, mc_k, mc_n_samples, seed, moment_mode, opt);
        if (*sc) return cmd_strongconv(sc_poly, sc_y, sc_ns, sc_m, sc_k, sc_samples, seed, opt);
        if (*tail) return cmd_tail(tail_ns, tail_samples, seed, opt);
    } catch (const fw::capacity_error& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 2;
    } catch (const fw::parse_error& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "assertion failure: %s\n", e.what());
        return 1;
    }
    return 2;
}
