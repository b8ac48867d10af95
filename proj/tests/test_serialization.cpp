#include "reebkit/error.hpp"
#include "reebkit/indices.hpp"
#include "reebkit/orbits.hpp"
#include "reebkit/serialization.hpp"

#include "generators.hpp"

#include <doctest.h>

using namespace reebkit;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

// Round trip through text so that formatting and parsing are both exercised.
Json reparse(const Json& j) { return parse_json(j.dump(), "test"); }

} // namespace

TEST_SUITE("serialization") {

TEST_CASE("exact reals round-trip") {
    const std::vector<ExactReal> values{ExactReal(0),
                                        ExactReal::ratio(-7, 3),
                                        ExactReal::parse("-1/2+1/2*sqrt5"),
                                        ExactReal::sqrt(2) + ExactReal::sqrt(3) * ExactReal::ratio(2, 5),
                                        ExactReal::guarded(mpq_class(1, 3), mpq_class(1, 100))};
    for (const auto& v : values) {
        const ExactReal back = exact_from_json(reparse(to_json(v)));
        CHECK(back.kind() == v.kind());
        CHECK(back.to_string() == v.to_string());
    }
    CHECK(to_json(ExactReal::ratio(3, 4)) == Json("3/4"));
    CHECK(exact_from_json(Json(5)) == ExactReal(5));
    CHECK(exact_from_json(Json("sqrt2")) == ExactReal::sqrt(2));
    CHECK(exact_from_json(parse_json(R"({"kind":"rat","value":"2/6"})", "t")) == ExactReal::ratio(1, 3));
    CHECK(exact_from_json(parse_json(R"({"kind":"quad","a":"1","b":"1/2","d":8})", "t")) == ExactReal(1) + ExactReal::sqrt(2));
}

TEST_CASE("paths round-trip") {
    gen::Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const BlockPath p = gen::path(rng);
        CHECK(path_from_json(reparse(to_json(p))) == p);
        const BlockPath it = iterate(p, gen::uniform(rng, 1, 12));
        CHECK(path_from_json(reparse(to_json(it))) == it);
    }
    const Json j = parse_json(R"({"loop":1,"blocks":[{"type":"shear","form":"qplus","d":1},
        {"type":"hyperbolic","h":3,"neg":true},{"type":"turn","w":2}]})", "t");
    const BlockPath p = path_from_json(j);
    CHECK(p.half_dim() == 3);
    CHECK(mean_index(p) == ExactReal(2 + 3 + 4));
}

TEST_CASE("systems, events and reports round-trip") {
    const OrbitSystem sys = ellipsoid_system({ExactReal(1), ExactReal::sqrt(2)});
    const OrbitSystem back = system_from_json(reparse(to_json(sys)));
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.orbit(i).name == sys.orbit(i).name);
        CHECK(back.orbit(i).path == sys.orbit(i).path);
        CHECK(back.orbit(i).action == sys.orbit(i).action);
    }
    const OrbitSystem mean = system_from_json(parse_json(
        R"({"orbits":[{"name":"g","path":{"loop":0,"blocks":[{"type":"rotation","lambda":"-1/2+1/2*sqrt5"}]},"action":"mean"}]})", "t"));
    CHECK(mean.orbit(0).action == mean.mean_index(0));

    RecurrenceParams params;
    params.eta = ExactReal::parse("0.15");
    params.mode = SearchMode::Exhaustive;
    params.k_ceiling = 100;
    const RecurrenceEvent ev = find_recurrence_events(sys, params).front();
    const RecurrenceEvent ev2 = event_from_json(reparse(to_json(ev)));
    CHECK(ev2.k == ev.k);
    CHECK(ev2.d == ev.d);
    CHECK(ev2.C == ev.C);
    CHECK(ev2.eta == ev.eta);
    CHECK(verify_event(sys, ev2, params, 100).passed());

    const Json rep = reparse(to_json(multiplicity_audit(sys, ev, 100)));
    CHECK(rep.at("passed").get<bool>());
    CHECK(rep.at("distinct_primes").get<int>() == 2);
}

TEST_CASE("barcodes and complexes round-trip") {
    gen::Rng rng(2);
    for (int field : {0, 2, 3}) {
        for (int i = 0; i < 20; ++i) {
            const FilteredComplex cx = gen::filtered_complex(rng, 20, field);
            const FilteredComplex cx2 = complex_from_json(reparse(to_json(cx)));
            REQUIRE(cx2.generators.size() == cx.generators.size());
            const Barcode a = barcode_from_filtered_complex(cx);
            const Barcode b = barcode_from_filtered_complex(cx2);
            CHECK(to_json(a) == to_json(b));
            const Barcode c = barcode_from_json(reparse(to_json(a)));
            CHECK(to_json(c) == to_json(a));
        }
    }
    const Staircase st = staircase_barcode(ellipsoid_system({ExactReal(1), ExactReal::sqrt(2)}), 5);
    const Barcode bc = barcode_from_json(reparse(to_json(st.barcode)));
    REQUIRE(bc.horizon);
    CHECK(*bc.horizon == ExactReal(3));
    for (const auto& h : st.homology) {
        const OrbitHomology back = orbit_homology_from_json(reparse(to_json(h)));
        CHECK(back.label == h.label);
        CHECK(back.dims == h.dims);
        CHECK(back.action == h.action);
    }
}

TEST_CASE("malformed input raises Parse") {
    CHECK(code_of([] { parse_json("{", "t"); }) == ErrorCode::Parse);
    CHECK(code_of([] { system_from_json(parse_json(R"({"orbits":[]})", "t")); }) == ErrorCode::Parse);
    CHECK(code_of([] { path_from_json(parse_json(R"({"loop":0,"blocks":[{"type":"spiral"}]})", "t")); }) == ErrorCode::Parse);
    CHECK(code_of([] { path_from_json(parse_json(R"({"orbits":[]})", "t")); }) == ErrorCode::Parse);
    CHECK(code_of([] { path_from_json(parse_json(R"({"loop":1})", "t")); }) == ErrorCode::Parse);
    CHECK(code_of([] { path_from_json(parse_json("[]", "t")); }) == ErrorCode::Parse);
    CHECK(code_of([] { exact_from_json(parse_json(R"("1/0")", "t")); }) == ErrorCode::Parse);
    CHECK(code_of([] { exact_from_json(parse_json(R"({"kind":"quad","a":"1"})", "t")); }) == ErrorCode::Parse);
    CHECK(code_of([] { barcode_from_json(parse_json(R"({"field":0,"bars":[{"a":"x","b":null,"deg":1}]})", "t")); }) ==
          ErrorCode::Parse);
}

TEST_CASE("invalid blocks are parse errors; system errors keep their code") {
    CHECK(code_of([] { path_from_json(parse_json(R"({"loop":0,"blocks":[{"type":"rotation","lambda":"2"}]})", "t")); }) ==
          ErrorCode::Parse);
    CHECK(code_of([] {
              system_from_json(parse_json(
                  R"({"orbits":[{"name":"h","path":{"loop":0,"blocks":[{"type":"hyperbolic","h":-1,"neg":true}]},"action":"1"}]})",
                  "t"));
          }) == ErrorCode::NonpositiveMeanIndex);
}

} // TEST_SUITE
