#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace reebkit {

/// Real number a + sum_D b_D * sqrt(D) over distinct square-free radicands
/// D >= 2 with rational coefficients, or a guarded decimal (value v known to
/// within radius g). The exact form is canonical, so structural equality is
/// value equality. Guarded values refuse any query they cannot decide.
class ExactReal {
public:
    enum class Kind { Rational, Quadratic, Surd, Guarded };

    struct Term {
        std::uint64_t radicand;
        mpq_class coeff;
    };

    ExactReal() = default;
    ExactReal(int v) : rational_(v) {}
    ExactReal(long v) : rational_(v) {}
    ExactReal(long long v);
    explicit ExactReal(mpq_class v);

    static ExactReal ratio(long long num, long long den);
    /// sqrt(n) with square factors pulled out.
    static ExactReal sqrt(std::uint64_t n);
    static ExactReal quadratic(const mpq_class& a, const mpq_class& b, std::uint64_t d);
    static ExactReal guarded(const mpq_class& value, const mpq_class& guard);
    /// Accepts "p/q", decimals, "sqrtD", "a+b*sqrtD" sums and "v~g" guarded decimals.
    static ExactReal parse(std::string_view text);

    [[nodiscard]] Kind kind() const noexcept;
    [[nodiscard]] bool is_rational() const noexcept { return terms_.empty() && !guard_; }
    [[nodiscard]] bool is_guarded() const noexcept { return guard_.has_value(); }
    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] const mpq_class& rational_part() const noexcept { return rational_; }
    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }
    [[nodiscard]] const std::optional<mpq_class>& guard() const noexcept { return guard_; }

    [[nodiscard]] int sign() const;
    [[nodiscard]] mpz_class floor() const;
    [[nodiscard]] mpz_class ceil() const;
    /// Closest integer; throws HalfIntegerAmbiguity on exact half-integers.
    [[nodiscard]] mpz_class nearest() const;
    [[nodiscard]] bool is_integer() const;
    [[nodiscard]] ExactReal fractional() const;
    /// Distance to the nearest integer.
    [[nodiscard]] ExactReal dist_to_int() const;
    [[nodiscard]] ExactReal abs() const;
    [[nodiscard]] ExactReal inverse() const;
    [[nodiscard]] double to_double() const;
    [[nodiscard]] std::string to_string() const;

    /// Rational interval [lo, hi] of width at most 2^-bits containing the value.
    [[nodiscard]] std::pair<mpq_class, mpq_class> enclose(unsigned bits) const;

    ExactReal operator-() const;
    ExactReal& operator+=(const ExactReal& o);
    ExactReal& operator-=(const ExactReal& o);
    ExactReal& operator*=(const ExactReal& o);
    ExactReal& operator/=(const ExactReal& o);

    friend ExactReal operator+(ExactReal a, const ExactReal& b) { return a += b; }
    friend ExactReal operator-(ExactReal a, const ExactReal& b) { return a -= b; }
    friend ExactReal operator*(ExactReal a, const ExactReal& b) { return a *= b; }
    friend ExactReal operator/(ExactReal a, const ExactReal& b) { return a /= b; }

    /// Structural equality (value equality for exact kinds).
    friend bool operator==(const ExactReal& a, const ExactReal& b);
    /// Value ordering; throws Precision for undecidable guarded comparisons.
    friend std::strong_ordering operator<=>(const ExactReal& a, const ExactReal& b);

private:
    mpq_class rational_;
    std::vector<Term> terms_; // sorted by radicand, nonzero coefficients
    std::optional<mpq_class> guard_;

    void scale(const mpq_class& c);
    void to_guarded();
    [[nodiscard]] int exact_sign() const;
};

/// floor/nearest as int64, throwing Overflow when out of range.
std::int64_t to_int64(const mpz_class& z);
std::int64_t floor_int(const ExactReal& x);
std::int64_t nearest_int(const ExactReal& x);

std::string rational_to_string(const mpq_class& q);
mpq_class parse_rational(std::string_view text);

} // namespace reebkit
