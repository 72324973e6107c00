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

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

namespace {

struct run_result {
    int exit_code;
    std::string out;
};

run_result run_cli(const std::string& args) {
    const std::string cmd = std::string(FREEWICK_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("moments subcommand") {
    auto r = run_cli("moments --word X1^2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("free trace    1") != std::string::npos);

    auto r4 = run_cli("--format json moments --word X1^4 --N 64 --mc 2000 --seed 7");
    CHECK(r4.exit_code == 0);
    const auto doc = nlohmann::json::parse(r4.out);
    CHECK(doc["exact"] == "8193/4096");  // 2 + 1/64^2
    CHECK(doc["free_trace"] == 2.0);
    const double mean = doc["mc_mean"].get<double>();
    const double se = doc["mc_stderr"].get<double>();
    CHECK(std::abs(mean - 8193.0 / 4096.0) <= 4.0 * se);

    auto rw = run_cli("--format json moments --word X1X2X1X2");
    CHECK(rw.exit_code == 0);
    const auto dw = nlohmann::json::parse(rw.out);
    CHECK(dw["free_trace"] == 0.0);
    CHECK(dw["coefficients"][0] == "0");
    CHECK(dw["coefficients"][1] == "1");
}

TEST_CASE("configs subcommand") {
    auto r3 = run_cli("--format json configs --n 3");
    CHECK(r3.exit_code == 0);
    auto doc = nlohmann::json::parse(r3.out);
    CHECK(doc["count"] == 8);
    CHECK(doc["max_cK"] == 6);

    auto r2 = run_cli("--format json configs --n 2");
    CHECK(nlohmann::json::parse(r2.out)["count"] == 2);

    auto r5 = run_cli("--format json configs --n 5 --check-remark");
    auto doc5 = nlohmann::json::parse(r5.out);
    CHECK(doc5["remark_cK"] == 14);

    CHECK(run_cli("configs --n 9").exit_code == 2);  // capacity: usage error
}

TEST_CASE("wick-verify subcommand") {
    auto r = run_cli("--format json wick-verify --words X1,X1 --kappa \"[[1,0.5],[0.5,1]]\"");
    CHECK(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["lhs"].get<double>() == Catch::Approx(0.5).margin(1e-12));
    CHECK(doc["rhs"].get<double>() == Catch::Approx(0.5).margin(1e-12));
    CHECK(doc["pass"] == true);

    auto rc = run_cli(
        "--format json wick-verify --words X1X1,X1X1 --kappa \"[[1,c],[c,1]]\" --c 0.3");
    auto dc = nlohmann::json::parse(rc.out);
    CHECK(dc["lhs"].get<double>() == Catch::Approx(1.09).margin(1e-9));

    auto rr = run_cli("wick-verify --random --n 3 --maxdeg 3 --trials 5 --seed 1");
    CHECK(rr.exit_code == 0);
    CHECK(rr.out.find("all pass: yes") != std::string::npos);

    auto raudit =
        run_cli("--format json wick-verify --words X1,X1 --kappa \"[[1,0.4],[0.4,1]]\" --audit");
    auto da = nlohmann::json::parse(raudit.out);
    CHECK(da["terms"].size() == 2);
}

TEST_CASE("masterineq subcommand") {
    auto r = run_cli("--format json masterineq --polys \"X1*X2\",\"X2\" --sigma 2,1");
    CHECK(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["pass"] == true);
    CHECK(doc["lhs"].get<double>() <= doc["rhs"].get<double>());

    auto rr = run_cli("masterineq --random --trials 3 --seed 5");
    CHECK(rr.exit_code == 0);
}

TEST_CASE("mc subcommand") {
    auto r = run_cli("mc --poly X1 --N 24,32 --k 2 --samples 400 --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("key,N,k,exact,mc_mean,mc_stderr,samples,seed") != std::string::npos);

    auto rm = run_cli("--format json mc --poly X1 --N 32 --k 2 --samples 1000 --seed 3 --moment");
    auto doc = nlohmann::json::parse(rm.out);
    const auto& row = doc["rows"][0];
    CHECK(std::abs(row["mc_mean"].get<double>() - row["exact"].get<double>()) <=
          4.0 * row["mc_stderr"].get<double>());
}

TEST_CASE("strongconv subcommand") {
    auto r = run_cli(
        "--format json strongconv --poly \"X1 + Y1\" --Y \"diag(1,-1)\" --N 24,48 --samples 30 "
        "--seed 2");
    CHECK(r.exit_code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["free_norm"].get<double>() == Catch::Approx(3.0).margin(0.01));
    CHECK(doc["rows"].size() == 2);
}

TEST_CASE("tail subcommand") {
    auto r = run_cli("tail --N 24 --samples 300 --seed 4");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("N,median,u,freq") != std::string::npos);
}

TEST_CASE("byte-identical reruns and exit codes") {
    const std::string cmd = "--format json mc --poly X1 --N 24 --k 2 --samples 200 --seed 11";
    auto a = run_cli(cmd);
    auto b = run_cli(cmd);
    CHECK(a.out == b.out);

    // FREEWICK_THREADS must not change the bytes
    auto c = run_cli("--threads 4 " + cmd);
    CHECK(a.out == c.out);

    CHECK(run_cli("mc --poly \"X1 +\" --N 8").exit_code == 2);  // parse error
    CHECK(run_cli("nonsense").exit_code == 2);
}
