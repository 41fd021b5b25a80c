#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using spectral::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "spectral-cli-tests";
    std::filesystem::create_directories(dir);
    std::filesystem::remove(dir / name);
    return dir / name;
}

}  // namespace

TEST_CASE("classify output") {
    auto r = invoke({"classify", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "3: INCOMPLETE (primitive), witness cycle (1) digits (3), rule=oracle\n");
    r = invoke({"classify", "25"});
    CHECK(r.out == "25: COMPLETE, rule=prime-power\n");
    r = invoke({"classify", "15"});
    CHECK(r.out == "15: INCOMPLETE, witness cycle (5) digits (15), rule=divisor-witness\n");
}

TEST_CASE("order output") {
    const auto r = invoke({"order", "1093"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("o4=182\n", 0) == 0);
    CHECK(r.out.find("1093: o4=182 iota4=2") != std::string::npos);
}

TEST_CASE("cycles output") {
    const auto r = invoke({"cycles", "85"});
    CHECK(r.out == "m=85 cycles=1 points=4\n(7, 23, 27, 28) digits (85, 85, 85, 0)\n");
}

TEST_CASE("sieve CSV matches the table layout") {
    const auto csv = temp_path("t1.csv");
    const auto r = invoke({"sieve", "--max", "500", "--csv", csv.string()});
    CHECK(r.code == 0);
    CHECK(read_all(csv) ==
          "m,prime_decomposition,o4_per_prime\n3,3,1\n85,\"5,17\",\"2,4\"\n341,\"11,31\",\"5,5\"\n"
          "455,\"5,7,13\",\"2,3,6\"\n");
    CHECK(r.err.find("primitives up to 500") != std::string::npos);
    CHECK(r.out.find(" s ") == std::string::npos);
}

TEST_CASE("identical invocations give identical output") {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"sieve", "--max", "20000", "--json"}, {"table2", "--max", "200"},
          {"conjectures", "--max", "20000"}, {"gram", "--m", "3", "--level", "2"}, {"witness", "--n", "40"}}) {
        const auto a = invoke(args);
        const auto b = invoke(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("json output is one object that round-trips") {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"classify", "85", "--json"}, {"cycles", "341", "--json"}, {"order", "455", "--json"},
          {"sieve", "--max", "10000", "--json"}, {"table2", "--max", "100", "--json"}, {"witness", "--n", "50", "--json"},
          {"conjectures", "--max", "10000", "--json"}, {"muhat", "--t", "0.3", "--json"},
          {"gram", "--m", "1", "--level", "2", "--json"}}) {
        const auto r = invoke(args);
        REQUIRE(r.code == 0);
        CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.is_object());
        CHECK(j.at("command") == args[0]);
        CHECK(j.at("format") == "json");
        CHECK(j.dump() + "\n" == r.out);
    }
    const auto w = nlohmann::json::parse(invoke({"witness", "--n", "40", "--json"}).out);
    CHECK(w["result"]["m"] == "1611901092819505566274901");
    CHECK(w["result"]["verified"] == true);
}

TEST_CASE("witness prints big moduli in decimal") {
    const auto r = invoke({"witness", "--n", "40"});
    CHECK(r.out == "n=40 m=1611901092819505566274901 verified=true cycle_length=41\n");
}

TEST_CASE("exit codes") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"classify"}).code == 2);
    CHECK(invoke({"classify", "3", "--bogus"}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    const auto even = invoke({"classify", "4"});
    CHECK(even.code == 2);
    CHECK(even.err.find("odd") != std::string::npos);
    CHECK(invoke({"sieve", "--max", "2"}).code == 2);
    CHECK(invoke({"witness", "--n", "2"}).code == 2);
    CHECK(invoke({"gram", "--m", "3", "--level", "3", "--depth", "2"}).code == 2);
    const auto help = invoke({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("sieve") != std::string::npos);
}

TEST_CASE("cache flag and environment fallback") {
    const auto path = temp_path("cli-cache.jsonl");
    CHECK(invoke({"sieve", "--max", "1000", "--cache", path.string()}).code == 0);
    const std::string first = read_all(path);
    CHECK(first.find("\"checkpoint\"") != std::string::npos);
    ::setenv("SPECTRAL_CACHE", path.string().c_str(), 1);
    CHECK(invoke({"sieve", "--max", "2000"}).code == 0);
    const auto c = invoke({"classify", "1705"});
    ::unsetenv("SPECTRAL_CACHE");
    CHECK(read_all(path).size() > first.size());
    CHECK(c.out == "1705: INCOMPLETE, witness cycle (35, 435, 535, 560, 140) digits (1705, 1705, 1705, 0, 0), rule=divisor-witness\n");
}

TEST_CASE("muhat grid dump") {
    const auto r = invoke({"muhat", "--t", "0", "--to", "1", "--points", "3", "--depth", "10"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("t,re,im,abs\n0,1,0,1\n", 0) == 0);
    CHECK(r.out.find("\n1,0,0,0\n") != std::string::npos);
}

TEST_CASE("csv quoting") {
    CHECK(spectral::cli::csv_field("3") == "3");
    CHECK(spectral::cli::csv_field("5,17") == "\"5,17\"");
    CHECK(spectral::cli::csv_field("a\"b") == "\"a\"\"b\"");
}
