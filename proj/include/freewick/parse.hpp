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

// Text form for polynomials: terms joined by +/-, factors joined by * (or
// juxtaposed), generators X<k> and Z<k> (Y<k> is an alias for Z<k>), powers
// ^<n>, scalars `a`, `ai`, `(a+bi)`.  Matrix coefficients travel only through
// the JSON form.

#ifndef FREEWICK_PARSE_HPP
#define FREEWICK_PARSE_HPP

#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ncalg.hpp"

namespace freewick {

class parse_error : public std::runtime_error {
  public:
    parse_error(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

  private:
    std::size_t pos_;
};

namespace detail {

class poly_parser {
  public:
    poly_parser(std::string_view text, int d, int q) : text_(text), d_(d), q_(q) {}

    scalar_poly run() {
        scalar_poly p = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw parse_error("trailing input", pos_);
        return p;
    }

  private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    scalar_poly parse_sum() {
        scalar_poly acc(d_, q_);
        bool neg = false;
        if (peek() == '+' || peek() == '-') neg = text_[pos_++] == '-';
        acc = acc + parse_product() * cplx(neg ? -1.0 : 1.0, 0.0);
        while (peek() == '+' || peek() == '-') {
            neg = text_[pos_++] == '-';
            acc = acc + parse_product() * cplx(neg ? -1.0 : 1.0, 0.0);
        }
        return acc;
    }

    scalar_poly parse_product() {
        scalar_poly acc = parse_factor();
        for (;;) {
            const char c = peek();
            if (c == '*') {
                ++pos_;
                acc = acc * parse_factor();
            } else if (starts_factor(c)) {
                acc = acc * parse_factor();  // juxtaposition, e.g. X1X2
            } else {
                return acc;
            }
        }
    }

    static bool is_gen_char(char c) { return c == 'X' || c == 'Z' || c == 'Y'; }
    static bool starts_factor(char c) {
        return is_gen_char(c) || c == '(' || std::isdigit(static_cast<unsigned char>(c)) ||
               c == '.';
    }

    scalar_poly parse_factor() {
        scalar_poly base = parse_primary();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            const std::size_t at = pos_;
            long n = parse_uint();
            if (n > 64) throw parse_error("exponent too large", at);
            return pow(base, static_cast<int>(n));
        }
        return base;
    }

    scalar_poly parse_primary() {
        const char c = peek();
        const std::size_t at = pos_;
        if (is_gen_char(c)) {
            ++pos_;
            const long idx = parse_uint();
            generator g = c == 'X' ? X(static_cast<int>(idx)) : Z(static_cast<int>(idx));
            const int bound = g.kind == gen_kind::semicircular ? d_ : q_;
            if (idx < 1 || idx > bound) throw parse_error("generator index out of bounds", at);
            scalar_poly p(d_, q_);
            p.add_term(word_of({g}), cplx(1.0, 0.0));
            return p;
        }
        if (c == '(') {
            ++pos_;
            const cplx v = parse_complex_body();
            if (peek() != ')') throw parse_error("expected ')'", pos_);
            ++pos_;
            return scalar_poly::constant(d_, q_, v);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = parse_number();
            if (pos_ < text_.size() && text_[pos_] == 'i') {
                ++pos_;
                return scalar_poly::constant(d_, q_, cplx(0.0, v));
            }
            return scalar_poly::constant(d_, q_, cplx(v, 0.0));
        }
        throw parse_error("expected a factor", pos_);
    }

    // body of "(a+bi)"-style literals, also accepting "(a)", "(bi)", signs
    cplx parse_complex_body() {
        double re = 0.0, im = 0.0;
        bool neg = false;
        if (peek() == '+' || peek() == '-') neg = text_[pos_++] == '-';
        skip_ws();
        double v = parse_number() * (neg ? -1.0 : 1.0);
        if (pos_ < text_.size() && text_[pos_] == 'i') {
            ++pos_;
            im = v;
        } else {
            re = v;
        }
        if (peek() == '+' || peek() == '-') {
            neg = text_[pos_++] == '-';
            skip_ws();
            const std::size_t at = pos_;
            v = parse_number() * (neg ? -1.0 : 1.0);
            if (pos_ < text_.size() && text_[pos_] == 'i') {
                ++pos_;
                im = v;
            } else {
                throw parse_error("expected imaginary part", at);
            }
        }
        return {re, im};
    }

    long parse_uint() {
        skip_ws();
        const std::size_t at = pos_;
        long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_++] - '0');
            if (v > 1000000) throw parse_error("integer too large", at);
        }
        if (pos_ == at) throw parse_error("expected an integer", at);
        return v;
    }

    double parse_number() {
        skip_ws();
        const std::size_t at = pos_;
        std::size_t n = pos_;
        while (n < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[n])) ||
                                    text_[n] == '.'))
            ++n;
        if (n < text_.size() && (text_[n] == 'e' || text_[n] == 'E')) {
            std::size_t e = n + 1;
            if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
            if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                ++e;
                while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
                n = e;
            }
        }
        if (n == pos_) throw parse_error("expected a number", at);
        const std::string token(text_.substr(pos_, n - pos_));
        pos_ = n;
        try {
            return std::stod(token);
        } catch (const std::exception&) {
            throw parse_error("malformed number", at);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int d_, q_;
};

// shortest representation that round-trips exactly
inline std::string format_double(double v) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace detail

/// Parses the polynomial text form over the alphabet (d, q).
inline scalar_poly parse_polynomial(std::string_view text, int d, int q = 0) {
    return detail::poly_parser(text, d, q).run();
}

inline std::string generator_name(const generator& g) {
    return (g.kind == gen_kind::semicircular ? "X" : "Z") + std::to_string(g.index);
}

inline std::string format_coefficient(const cplx& c) {
    if (c.imag() == 0.0) return detail::format_double(c.real());
    if (c.real() == 0.0) return detail::format_double(c.imag()) + "i";
    const double im = c.imag();
    return "(" + detail::format_double(c.real()) + (im < 0 ? "-" : "+") +
           detail::format_double(std::abs(im)) + "i)";
}

/// Canonical printing; parse_polynomial(print_polynomial(p)) == p.
inline std::string print_polynomial(const scalar_poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (const auto& [w, c] : p.terms()) {
        std::string coeff = format_coefficient(c);
        bool neg = false;
        if (coeff.front() == '-') {
            neg = true;
            coeff.erase(coeff.begin());
        }
        if (!w.empty() && coeff == "1") coeff.clear();
        if (!out.empty())
            out += neg ? " - " : " + ";
        else if (neg)
            out += "-";
        std::string mono;
        for (const auto& g : w.letters) {
            if (!mono.empty()) mono += "*";
            mono += generator_name(g);
        }
        if (!coeff.empty() && !mono.empty())
            out += coeff + "*" + mono;
        else
            out += coeff + mono;
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON form: {"terms":[{"coeff": ..., "word": ["X1","Z2",...]}]}.  Scalar
// coefficients are [re, im] pairs (a bare number is accepted); matrix
// coefficients are row-major arrays of [re, im] pairs.

inline generator generator_from_name(const std::string& s) {
    if (s.size() < 2 || (s[0] != 'X' && s[0] != 'Z' && s[0] != 'Y'))
        throw std::invalid_argument("bad generator name: " + s);
    const int idx = std::stoi(s.substr(1));
    return s[0] == 'X' ? X(idx) : Z(idx);
}

inline word word_from_json(const nlohmann::json& jw) {
    std::vector<generator> ls;
    for (const auto& s : jw) ls.push_back(generator_from_name(s.get<std::string>()));
    return word{std::move(ls)};
}

inline scalar_poly scalar_poly_from_json(const nlohmann::json& j, int d, int q = 0) {
    scalar_poly p(d, q);
    for (const auto& t : j.at("terms")) {
        const auto& jc = t.at("coeff");
        cplx c = jc.is_number() ? cplx(jc.get<double>(), 0.0)
                                : cplx(jc.at(0).get<double>(), jc.at(1).get<double>());
        p.add_term(word_from_json(t.at("word")), c);
    }
    return p;
}

inline matrix_poly matrix_poly_from_json(const nlohmann::json& j, int d, int q = 0) {
    int dim = -1;
    matrix_poly p(d, q);
    for (const auto& t : j.at("terms")) {
        const auto& jc = t.at("coeff");
        const int rows = static_cast<int>(jc.size());
        if (dim == -1) {
            dim = rows;
            p = matrix_poly(d, q, dim);
        }
        if (rows != dim) throw std::invalid_argument("matrix coefficients of mixed dimension");
        Eigen::MatrixXcd c(rows, rows);
        for (int r = 0; r < rows; ++r) {
            if (static_cast<int>(jc.at(r).size()) != rows)
                throw std::invalid_argument("matrix coefficient not square");
            for (int s = 0; s < rows; ++s)
                c(r, s) = cplx(jc.at(r).at(s).at(0).get<double>(),
                               jc.at(r).at(s).at(1).get<double>());
        }
        p.add_term(word_from_json(t.at("word")), c);
    }
    return p;
}

inline nlohmann::json poly_to_json(const scalar_poly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [w, c] : p.terms()) {
        nlohmann::json jw = nlohmann::json::array();
        for (const auto& g : w.letters) jw.push_back(generator_name(g));
        terms.push_back({{"coeff", {c.real(), c.imag()}}, {"word", jw}});
    }
    return {{"terms", terms}};
}

}  // namespace freewick

#endif
