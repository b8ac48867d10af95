#include "cli.hpp"

#include "reebkit/indices.hpp"
#include "reebkit/orbits.hpp"
#include "reebkit/recurrence.hpp"
#include "reebkit/serialization.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace reebkit;

namespace {

const std::string kData = REEBKIT_DATA_DIR;

struct Result {
    int status;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<Json> json_lines(const std::string& text) {
    std::vector<Json> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(Json::parse(line));
    return lines;
}

std::string temp_file(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / ("reebkit_cli_" + name);
    std::ofstream(path) << contents;
    return path.string();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
    CHECK(run({}).status == cli::Usage);
    CHECK(run({"frobnicate"}).status == cli::Usage);
    CHECK(run({"recurrence", "--system", data("missing.json")}).status == cli::Usage);
    CHECK(run({"recurrence", "--system", data("golden.json"), "--eta", "1"}).status == cli::AuditFailed);
    CHECK(run({"recurrence", "--system", data("golden.json"), "--ell0", "0"}).status == cli::Usage);

    const Result empty = run({"recurrence", "--system", temp_file("empty.json", R"({"orbits":[]})")});
    CHECK(empty.status == cli::ParseError);
    CHECK(empty.err.rfind("error code=parse message=", 0) == 0);
    CHECK(run({"indices", "--path", "{not json"}).status == cli::ParseError);

    const Result guarded =
        run({"indices", "--path", R"({"loop":0,"blocks":[{"type":"rotation","lambda":{"kind":"guarded","value":"1/3","guard":"1/1000"}}]})",
             "--kmax", "3"});
    CHECK(guarded.status == cli::PrecisionError);
    CHECK(guarded.err.find("code=precision") != std::string::npos);

    const Result resonant = run({"compare", "--system", data("resonant.json")});
    CHECK(resonant.status == cli::AuditFailed);
    CHECK(resonant.err.find("code=non_resonance_failed") != std::string::npos);
    CHECK(resonant.err.find("coincide modulo Z") != std::string::npos);

    CHECK(run({"--help"}).status == cli::Ok);
}

TEST_CASE("golden recurrence matches the oracle") {
    const Result r = run({"recurrence", "--system", data("golden.json"), "--events", "3", "--kmax", "200"});
    REQUIRE(r.status == cli::Ok);
    const auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 4);
    const Json& first = lines.front();

    const OrbitSystem sys = system_from_json(parse_json(slurp(data("golden.json")), "golden"));
    const oracle::SingleEvent want = oracle::first_certified_event(
        sys.orbit(0).path, exact_from_json(first.at("epsilon")), oracle::Dec("0.2"), 1, 200);
    CHECK(first.at("k").at(0).get<std::int64_t>() == want.k);
    CHECK(first.at("d").at(0).get<std::int64_t>() == want.d);
    CHECK(first.at("passed").get<bool>());
    const Json& summary = lines.back().at("summary");
    CHECK(summary.at("events").get<int>() == 3);
    CHECK(summary.at("passed").get<bool>());
}

TEST_CASE("ellipsoid staircase matches the degree oracle") {
    const Result r = run({"ellipsoid", "--deltas", "1,sqrt2", "--count", "5"});
    REQUIRE(r.status == cli::Ok);
    const Json j = Json::parse(r.out);
    const auto want = oracle::ellipsoid_iterates({ExactReal(1), ExactReal::sqrt(2)}, 5);
    const Barcode bc = barcode_from_json(j.at("barcode"));
    REQUIRE(bc.bars.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(abs(oracle::dec(*bc.bars[i].death) - want[i].action) < oracle::Dec("1e-80"));
        CHECK(bc.bars[i].degree == want[i].degree - 1);
    }
}

TEST_CASE("indices table agrees with the oracle") {
    const Result r = run({"indices", "--path", data("mixed_path.json"), "--kmax", "30", "--format", "csv"});
    REQUIRE(r.status == cli::Ok);
    const BlockPath p = path_from_json(parse_json(R"({"loop":1,"blocks":[{"type":"rotation","lambda":"3/10"},
        {"type":"hyperbolic","h":1,"neg":true},{"type":"shear","form":"q+","d":1}]})", "t"));
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "k,mean_index,mu_minus,mu_plus,degenerate");
    for (std::int64_t k = 1; k <= 30; ++k) {
        REQUIRE(std::getline(in, line));
        const oracle::Index o = oracle::index(p, k);
        std::ostringstream want;
        want << k << "," << (mean_index(p) * ExactReal(static_cast<long>(k))).to_string() << "," << o.mu_minus << ","
             << o.mu_plus << "," << (o.degenerate ? "true" : "false");
        CHECK(line == want.str());
    }
}

TEST_CASE("barcode, audit and svg") {
    const Result b3 = run({"barcode", "--complex", data("pair.json"), "--field", "3"});
    REQUIRE(b3.status == cli::Ok);
    CHECK(Json::parse(b3.out).at("bars").size() == 1);
    const Result b2 = run({"barcode", "--complex", data("pair.json"), "--field", "2"});
    CHECK(Json::parse(b2.out).at("bars").size() == 2);

    const std::string bc = temp_file("stair.json", run({"ellipsoid", "--deltas", "1,sqrt2", "--count", "12"}).out);
    const std::string bars = temp_file("bars.json", Json::parse(slurp(bc)).at("barcode").dump());
    const Result ok = run({"audit", "--barcode", bars, "--n", "2", "--chi", "1", "--primes", "2,3,5"});
    CHECK(ok.status == cli::Ok);
    const Result odd = run({"audit", "--barcode", bars, "--n", "3", "--chi", "1"});
    CHECK(odd.status == cli::AuditFailed);

    const Result svg = run({"--format", "svg", "barcode", "--complex", data("pair.json"), "--field", "3"});
    REQUIRE(svg.status == cli::Ok);
    CHECK(svg.out.rfind("<svg", 0) == 0);
    CHECK(svg.out.find("deg 2") != std::string::npos);
}

TEST_CASE("audit-mult and compare") {
    const Result ev = run({"recurrence", "--system", data("e12.json"), "--eta", "0.15", "--search", "exhaustive",
                           "--kmax", "100"});
    REQUIRE(ev.status == cli::Ok);
    const std::string events = temp_file("events.jsonl", ev.out);
    const Result m = run({"audit-mult", "--system", data("e12.json"), "--event", events, "--kmax", "100"});
    REQUIRE(m.status == cli::Ok);
    const Json j = Json::parse(m.out);
    CHECK(j.at("distinct_primes").get<int>() == 2);
    CHECK(j.at("slots").size() == 2);

    const Result searched = run({"audit-mult", "--system", data("e12_scaled.json")});
    CHECK(searched.status == cli::Ok);
    const Json js = Json::parse(searched.out);
    for (const auto& k : js.at("event").at("k")) CHECK(k.get<std::int64_t>() % 2 == 0);

    CHECK(run({"compare", "--system", data("e12_scaled.json")}).status == cli::Ok);
    const Result raw = run({"compare", "--system", data("e12.json")});
    CHECK(raw.status == cli::AuditFailed);
    CHECK(Json::parse(raw.out).at("first_discrepancy").get<std::string>().rfind("scaling", 0) == 0);
}

TEST_CASE("outputs are deterministic") {
    const std::vector<std::string> args{"recurrence", "--system", data("e12.json"), "--events", "3"};
    const Result a = run(args);
    const Result b = run(args);
    std::vector<std::string> threaded{"--threads", "4"};
    threaded.insert(threaded.end(), args.begin(), args.end());
    const Result c = run(threaded);
    CHECK(a.status == cli::Ok);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);

    CHECK(run({"--seed", "7", "gen-system", "--n", "3"}).out == run({"--seed", "7", "gen-system", "--n", "3"}).out);
    CHECK(run({"--seed", "7", "gen-system", "--n", "3"}).out != run({"--seed", "8", "gen-system", "--n", "3"}).out);
}

TEST_CASE("--out writes the main output") {
    const auto path = std::filesystem::temp_directory_path() / "reebkit_cli_out.json";
    std::filesystem::remove(path);
    const Result r = run({"--out", path.string(), "barcode", "--complex", data("pair.json")});
    CHECK(r.status == cli::Ok);
    CHECK(r.out.empty());
    CHECK(Json::parse(slurp(path.string())).at("bars").size() == 1);
}

} // TEST_SUITE
