#include "reebkit/error.hpp"
#include "reebkit/exact_real.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

using reebkit::ErrorCode;
using reebkit::ExactReal;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const reebkit::Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_SUITE("exact_real") {

TEST_CASE("rationals are reduced and compare by value") {
    CHECK(ExactReal::ratio(6, 4) == ExactReal::ratio(3, 2));
    CHECK(ExactReal::ratio(-1, -2) == ExactReal::ratio(1, 2));
    CHECK(ExactReal::ratio(3, 2).kind() == ExactReal::Kind::Rational);
    CHECK(ExactReal::parse("0.3") == ExactReal::ratio(3, 10));
    CHECK(ExactReal::ratio(1, 3) < ExactReal::ratio(1, 2));
}

TEST_CASE("square roots pull out square factors") {
    CHECK(ExactReal::sqrt(8) == ExactReal(2) * ExactReal::sqrt(2));
    CHECK(ExactReal::sqrt(9) == ExactReal(3));
    CHECK(ExactReal::sqrt(2) * ExactReal::sqrt(2) == ExactReal(2));
    CHECK(ExactReal::sqrt(2).kind() == ExactReal::Kind::Quadratic);
    CHECK((ExactReal::sqrt(2) + ExactReal::sqrt(3)).kind() == ExactReal::Kind::Surd);
}

TEST_CASE("parse accepts the documented syntaxes") {
    CHECK(ExactReal::parse("sqrt2") == ExactReal::sqrt(2));
    CHECK(ExactReal::parse("1/2+1/2*sqrt5") == ExactReal::quadratic(mpq_class(1, 2), mpq_class(1, 2), 5));
    CHECK(ExactReal::parse("-1/2+1/2*sqrt5") + ExactReal(1) == ExactReal::parse("1/2+1/2*sqrt5"));
    CHECK(ExactReal::parse("3-2*sqrt2") == ExactReal(3) - ExactReal(2) * ExactReal::sqrt(2));
    CHECK(ExactReal::parse("1.5~0.01").is_guarded());
    CHECK_THROWS_AS(ExactReal::parse("sqrt"), reebkit::Error);
    CHECK_THROWS_AS(ExactReal::parse("1/0"), reebkit::Error);
}

TEST_CASE("to_string and parse round-trip") {
    gen::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        ExactReal x = gen::rotation_number(rng) + gen::rotation_number(rng) * gen::rotation_number(rng);
        CHECK(ExactReal::parse(x.to_string()) == x);
    }
}

TEST_CASE("golden iterate 13 is exact") {
    const ExactReal golden = ExactReal::parse("-1/2+1/2*sqrt5");
    CHECK(golden * ExactReal(13) == ExactReal::quadratic(mpq_class(-13, 2), mpq_class(13, 2), 5));
    CHECK(abs(oracle::dec(golden * ExactReal(13)) - oracle::dec(golden) * 13) < oracle::Dec("1e-90"));
}

TEST_CASE("floor, nearest and distance agree with the decimal oracle") {
    gen::Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        ExactReal x = gen::rotation_number(rng, true) * ExactReal(static_cast<long>(gen::uniform(rng, 1, 5000)));
        if (i % 3 == 0) x = x * gen::rotation_number(rng, true);
        const oracle::Dec v = oracle::dec(x);
        CHECK(reebkit::floor_int(x) == oracle::safe_floor(v));
        CHECK(reebkit::nearest_int(x) == oracle::nearest(v));
        CHECK(abs(oracle::dec(x.dist_to_int()) - oracle::dist_to_int(v)) < oracle::Dec("1e-60"));
        CHECK(x.sign() == (v > 0 ? 1 : -1));
    }
}

TEST_CASE("sign of sums of several radicals") {
    // sqrt2 + sqrt3 - sqrt5 - sqrt6/2 and friends, against the decimal oracle
    gen::Rng rng(17);
    const std::uint64_t rad[] = {2, 3, 5, 6, 7, 10};
    for (int i = 0; i < 200; ++i) {
        ExactReal x(static_cast<long>(gen::uniform(rng, -3, 3)));
        for (auto r : rad) x += ExactReal::quadratic(0, mpq_class(gen::uniform(rng, -5, 5), gen::uniform(rng, 1, 4)), r);
        const oracle::Dec v = oracle::dec(x);
        const int want = v > oracle::Dec("1e-90") ? 1 : (v < oracle::Dec("-1e-90") ? -1 : 0);
        CHECK(x.sign() == want);
    }
}

TEST_CASE("arithmetic matches the decimal oracle") {
    gen::Rng rng(23);
    for (int i = 0; i < 300; ++i) {
        ExactReal a = gen::rotation_number(rng), b = gen::rotation_number(rng);
        const oracle::Dec tol("1e-70");
        CHECK(abs(oracle::dec(a + b) - (oracle::dec(a) + oracle::dec(b))) < tol);
        CHECK(abs(oracle::dec(a * b) - oracle::dec(a) * oracle::dec(b)) < tol);
        if (!b.is_zero()) CHECK(abs(oracle::dec(a / b) - oracle::dec(a) / oracle::dec(b)) < tol);
        CHECK(abs(oracle::dec(a.fractional()) - (oracle::dec(a) - floor(oracle::dec(a)))) < tol);
    }
}

TEST_CASE("half-integers make nearest ambiguous") {
    CHECK(code_of([] { (void)ExactReal::ratio(5, 2).nearest(); }) == ErrorCode::HalfIntegerAmbiguity);
    CHECK(reebkit::nearest_int(ExactReal::ratio(7, 3)) == 2);
}

TEST_CASE("guarded decimals refuse undecidable queries") {
    const ExactReal g = ExactReal::guarded(mpq_class(2, 1), mpq_class(1, 100));
    CHECK(code_of([&] { (void)g.floor(); }) == ErrorCode::Precision);
    const ExactReal h = ExactReal::guarded(mpq_class(5, 2), mpq_class(1, 100));
    CHECK(h.floor() == 2);
    CHECK(code_of([&] { (void)h.nearest(); }) == ErrorCode::Precision);
    CHECK(code_of([&] { (void)(h < ExactReal::parse("2.505")); }) == ErrorCode::Precision);
    CHECK(h < ExactReal(3));
}

TEST_CASE("int64 conversion overflow is reported") {
    const ExactReal big = ExactReal::parse("100000000000000000000000");
    CHECK(code_of([&] { (void)reebkit::floor_int(big); }) == ErrorCode::Overflow);
}

} // TEST_SUITE
