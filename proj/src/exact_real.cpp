#include "reebkit/exact_real.hpp"

#include "reebkit/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

namespace reebkit {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Precision: return "precision";
    case ErrorCode::HalfIntegerAmbiguity: return "half_integer_ambiguity";
    case ErrorCode::DegenerateIterate: return "degenerate_iterate";
    case ErrorCode::EmptyWindow: return "empty_window";
    case ErrorCode::ParamTooTight: return "param_too_tight";
    case ErrorCode::NonpositiveMeanIndex: return "nonpositive_mean_index";
    case ErrorCode::RationalRatio: return "rational_ratio";
    case ErrorCode::NonResonanceFailed: return "non_resonance_failed";
    case ErrorCode::HypothesisViolation: return "hypothesis_violation";
    case ErrorCode::EventMismatch: return "event_mismatch";
    case ErrorCode::ClassificationUndefined: return "classification_undefined";
    case ErrorCode::NotApplicable: return "not_applicable";
    case ErrorCode::Undefined: return "undefined";
    case ErrorCode::BoundaryNotSquareZero: return "boundary_not_square_zero";
    case ErrorCode::FiltrationViolation: return "filtration_violation";
    case ErrorCode::ZetaMismatch: return "zeta_mismatch";
    case ErrorCode::Overflow: return "overflow";
    }
    return "unknown";
}

namespace {

using Terms = std::vector<ExactReal::Term>;

mpz_class to_mpz(std::uint64_t v) {
    mpz_class z;
    mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
    return z;
}

// sqrt(a*b) = g*sqrt(r) for square-free a, b.
std::pair<std::uint64_t, std::uint64_t> radical_product(std::uint64_t a, std::uint64_t b) {
    std::uint64_t g = std::gcd(a, b);
    __extension__ unsigned __int128 r = static_cast<unsigned __int128>(a / g) * (b / g);
    if (r > UINT64_MAX) fail(ErrorCode::Overflow, "radicand product overflows 64 bits");
    return {g, static_cast<std::uint64_t>(r)};
}

Terms merge_terms(const Terms& x, const Terms& y, bool subtract) {
    Terms out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].radicand < y[j].radicand)) {
            out.push_back(x[i++]);
        } else if (i == x.size() || y[j].radicand < x[i].radicand) {
            out.push_back({y[j].radicand, subtract ? mpq_class(-y[j].coeff) : y[j].coeff});
            ++j;
        } else {
            mpq_class c = subtract ? mpq_class(x[i].coeff - y[j].coeff) : mpq_class(x[i].coeff + y[j].coeff);
            if (c != 0) out.push_back({x[i].radicand, c});
            ++i;
            ++j;
        }
    }
    return out;
}

mpz_class pow2(unsigned long p) {
    mpz_class z = 1;
    mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), p);
    return z;
}

// Integer bounds lo <= x*2^p <= hi for an exact value.
void scaled_bounds(const mpq_class& a, const Terms& terms, unsigned long p, mpz_class& lo, mpz_class& hi) {
    mpz_class scale = pow2(p);
    mpq_class as = a * scale;
    mpz_fdiv_q(lo.get_mpz_t(), as.get_num_mpz_t(), as.get_den_mpz_t());
    mpz_cdiv_q(hi.get_mpz_t(), as.get_num_mpz_t(), as.get_den_mpz_t());
    mpz_class s4 = pow2(2 * p);
    for (const auto& t : terms) {
        mpz_class rs = to_mpz(t.radicand) * s4;
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), rs.get_mpz_t());
        // sqrt(D)*2^p lies in (s, s+1)
        const mpz_class& n = t.coeff.get_num();
        const mpz_class& d = t.coeff.get_den();
        mpz_class l, h;
        if (n > 0) {
            mpz_class nl = n * s, nh = n * (s + 1);
            mpz_fdiv_q(l.get_mpz_t(), nl.get_mpz_t(), d.get_mpz_t());
            mpz_cdiv_q(h.get_mpz_t(), nh.get_mpz_t(), d.get_mpz_t());
        } else {
            mpz_class nl = n * (s + 1), nh = n * s;
            mpz_fdiv_q(l.get_mpz_t(), nl.get_mpz_t(), d.get_mpz_t());
            mpz_cdiv_q(h.get_mpz_t(), nh.get_mpz_t(), d.get_mpz_t());
        }
        lo += l;
        hi += h;
    }
}

mpq_class abs_q(const mpq_class& q) { return q < 0 ? mpq_class(-q) : q; }

mpz_class floor_q(const mpq_class& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

std::uint64_t smallest_prime_factor(std::uint64_t n) {
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return p;
    return n;
}

} // namespace

ExactReal::ExactReal(long long v) : rational_(static_cast<long>(v)) {}

ExactReal::ExactReal(mpq_class v) : rational_(std::move(v)) { rational_.canonicalize(); }

ExactReal ExactReal::ratio(long long num, long long den) {
    if (den == 0) fail(ErrorCode::InvalidArgument, "zero denominator");
    mpq_class q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
    q.canonicalize();
    return ExactReal(q);
}

ExactReal ExactReal::sqrt(std::uint64_t n) {
    if (n == 0) return ExactReal();
    std::uint64_t square = 1, rest = n;
    for (std::uint64_t p = 2; p * p <= rest; ++p) {
        while (rest % (p * p) == 0) {
            rest /= p * p;
            square *= p;
        }
    }
    ExactReal r;
    if (rest == 1) {
        r.rational_ = mpq_class(to_mpz(square));
    } else {
        r.terms_.push_back({rest, mpq_class(to_mpz(square))});
    }
    return r;
}

ExactReal ExactReal::quadratic(const mpq_class& a, const mpq_class& b, std::uint64_t d) {
    return ExactReal(a) + ExactReal(b) * sqrt(d);
}

ExactReal ExactReal::guarded(const mpq_class& value, const mpq_class& guard) {
    if (guard <= 0) fail(ErrorCode::InvalidArgument, "guard radius must be positive");
    ExactReal r;
    r.rational_ = value;
    r.rational_.canonicalize();
    r.guard_ = guard;
    r.guard_->canonicalize();
    return r;
}

ExactReal::Kind ExactReal::kind() const noexcept {
    if (guard_) return Kind::Guarded;
    if (terms_.empty()) return Kind::Rational;
    return terms_.size() == 1 ? Kind::Quadratic : Kind::Surd;
}

bool ExactReal::is_zero() const noexcept {
    return !guard_ && terms_.empty() && rational_ == 0;
}

void ExactReal::scale(const mpq_class& c) {
    if (c == 0) {
        rational_ = 0;
        terms_.clear();
        guard_.reset();
        return;
    }
    rational_ *= c;
    for (auto& t : terms_) t.coeff *= c;
    if (guard_) *guard_ *= abs_q(c);
}

void ExactReal::to_guarded() {
    if (guard_) return;
    auto [lo, hi] = enclose(192);
    rational_ = (lo + hi) / 2;
    mpq_class g = (hi - lo) / 2 + mpq_class(1, 1) / mpq_class(pow2(200));
    terms_.clear();
    guard_ = g;
}

std::pair<mpq_class, mpq_class> ExactReal::enclose(unsigned bits) const {
    if (guard_) return {rational_ - *guard_, rational_ + *guard_};
    if (terms_.empty()) return {rational_, rational_};
    mpq_class total = 1;
    for (const auto& t : terms_) total += abs_q(t.coeff);
    unsigned long extra = mpz_sizeinbase(floor_q(total).get_mpz_t(), 2) + 2;
    unsigned long p = bits + extra;
    mpz_class lo, hi;
    scaled_bounds(rational_, terms_, p, lo, hi);
    mpz_class den = pow2(p);
    mpq_class l(lo, den), h(hi, den);
    l.canonicalize();
    h.canonicalize();
    return {l, h};
}

int ExactReal::exact_sign() const {
    if (terms_.empty()) return sgn(rational_);
    if (terms_.size() == 1) {
        int sa = sgn(rational_);
        int sb = sgn(terms_[0].coeff);
        if (sa == 0 || sa == sb) return sb;
        mpq_class a2 = rational_ * rational_;
        mpq_class b2 = terms_[0].coeff * terms_[0].coeff * mpq_class(to_mpz(terms_[0].radicand));
        return a2 > b2 ? sa : sb;
    }
    for (unsigned long p = 64;; p *= 2) {
        mpz_class lo, hi;
        scaled_bounds(rational_, terms_, p, lo, hi);
        if (lo > 0) return 1;
        if (hi < 0) return -1;
        if (p > (1UL << 22)) fail(ErrorCode::Precision, "sign refinement did not terminate");
    }
}

int ExactReal::sign() const {
    if (guard_) {
        if (abs_q(rational_) > *guard_) return sgn(rational_);
        fail(ErrorCode::Precision, "sign of guarded value " + to_string() + " is undecidable");
    }
    return exact_sign();
}

mpz_class ExactReal::floor() const {
    if (guard_) {
        mpz_class n = floor_q(rational_);
        if (rational_ - n <= *guard_ || mpq_class(n + 1) - rational_ <= *guard_)
            fail(ErrorCode::Precision, "floor of guarded value " + to_string() + " is within guard of an integer");
        return n;
    }
    if (terms_.empty()) return floor_q(rational_);
    if (terms_.size() == 1) {
        const mpq_class& a = rational_;
        const mpq_class& b = terms_[0].coeff;
        mpz_class q = a.get_den() * b.get_den();
        mpz_class A = a.get_num() * b.get_den();
        mpz_class B = b.get_num() * a.get_den();
        mpz_class sq = B * B * to_mpz(terms_[0].radicand);
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), sq.get_mpz_t());
        mpz_class num = B > 0 ? mpz_class(A + s) : mpz_class(A - s - 1);
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), q.get_mpz_t());
        return r;
    }
    auto [lo, hi] = enclose(8);
    mpz_class n = floor_q(lo);
    while (true) {
        ExactReal diff = *this - ExactReal(mpq_class(n + 1));
        if (diff.exact_sign() < 0) break;
        ++n;
    }
    while ((*this - ExactReal(mpq_class(n))).exact_sign() < 0) --n;
    return n;
}

mpz_class ExactReal::ceil() const { return -(-*this).floor(); }

mpz_class ExactReal::nearest() const {
    if (guard_) {
        mpz_class n = floor_q(rational_);
        mpq_class half = mpq_class(n) + mpq_class(1, 2);
        if (abs_q(rational_ - half) <= *guard_)
            fail(ErrorCode::Precision, "nearest integer of guarded value " + to_string() + " is ambiguous");
        return floor_q(rational_ + mpq_class(1, 2));
    }
    if (terms_.empty()) {
        mpq_class twice = rational_ * 2;
        if (twice.get_den() == 1 && mpz_odd_p(twice.get_num_mpz_t()))
            fail(ErrorCode::HalfIntegerAmbiguity, "nearest integer of half-integer " + to_string());
        return floor_q(rational_ + mpq_class(1, 2));
    }
    return (*this + ExactReal(mpq_class(1, 2))).floor();
}

bool ExactReal::is_integer() const {
    if (guard_) {
        (void)floor();
        return false;
    }
    return terms_.empty() && rational_.get_den() == 1;
}

ExactReal ExactReal::fractional() const { return *this - ExactReal(mpq_class(floor())); }

ExactReal ExactReal::dist_to_int() const {
    ExactReal f = fractional();
    ExactReal g = ExactReal(1) - f;
    return f < g ? f : g;
}

ExactReal ExactReal::abs() const { return sign() < 0 ? -*this : *this; }

ExactReal ExactReal::inverse() const {
    if (guard_) {
        mpq_class av = abs_q(rational_);
        if (av <= *guard_) fail(ErrorCode::Precision, "inverse of guarded value " + to_string() + " is undecidable");
        return guarded(1 / rational_, *guard_ / (av * (av - *guard_)));
    }
    if (is_zero()) fail(ErrorCode::InvalidArgument, "division by zero");
    if (terms_.empty()) return ExactReal(mpq_class(1 / rational_));
    std::uint64_t p = UINT64_MAX;
    for (const auto& t : terms_) p = std::min(p, smallest_prime_factor(t.radicand));
    // x = u + v*sqrt(p), 1/x = (u - v*sqrt(p)) / (u^2 - p v^2)
    ExactReal u(rational_), v;
    for (const auto& t : terms_) {
        if (t.radicand % p == 0) {
            ExactReal piece = t.radicand / p == 1 ? ExactReal(t.coeff) : ExactReal(t.coeff) * sqrt(t.radicand / p);
            v += piece;
        } else {
            u.terms_.push_back(t);
        }
    }
    ExactReal root = sqrt(p);
    ExactReal conj = u - v * root;
    ExactReal norm = u * u - ExactReal(mpq_class(to_mpz(p))) * v * v;
    return conj * norm.inverse();
}

double ExactReal::to_double() const {
    if (guard_ || terms_.empty()) return rational_.get_d();
    auto [lo, hi] = enclose(64);
    return mpq_class((lo + hi) / 2).get_d();
}

std::string rational_to_string(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string ExactReal::to_string() const {
    if (guard_) return rational_to_string(rational_) + "~" + rational_to_string(*guard_);
    std::string out;
    if (rational_ != 0 || terms_.empty()) out = rational_to_string(rational_);
    for (const auto& t : terms_) {
        std::string radical = "sqrt" + std::to_string(t.radicand);
        bool negative = t.coeff < 0;
        if (negative) out += "-";
        else if (!out.empty()) out += "+";
        mpq_class mag = abs_q(t.coeff);
        if (mag != 1) out += rational_to_string(mag) + "*";
        out += radical;
    }
    return out;
}

ExactReal ExactReal::operator-() const {
    ExactReal r = *this;
    r.rational_ = -r.rational_;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

ExactReal& ExactReal::operator+=(const ExactReal& o) {
    if (guard_ || o.guard_) {
        ExactReal b = o;
        to_guarded();
        b.to_guarded();
        rational_ += b.rational_;
        *guard_ += *b.guard_;
        return *this;
    }
    rational_ += o.rational_;
    if (!o.terms_.empty()) terms_ = merge_terms(terms_, o.terms_, false);
    return *this;
}

ExactReal& ExactReal::operator-=(const ExactReal& o) {
    if (guard_ || o.guard_) return *this += -o;
    rational_ -= o.rational_;
    if (!o.terms_.empty()) terms_ = merge_terms(terms_, o.terms_, true);
    return *this;
}

ExactReal& ExactReal::operator*=(const ExactReal& o) {
    if (guard_ || o.guard_) {
        ExactReal b = o;
        to_guarded();
        b.to_guarded();
        mpq_class g = abs_q(rational_) * *b.guard_ + abs_q(b.rational_) * *guard_ + *guard_ * *b.guard_;
        rational_ *= b.rational_;
        guard_ = g;
        return *this;
    }
    if (o.terms_.empty()) {
        scale(o.rational_);
        return *this;
    }
    if (terms_.empty()) {
        mpq_class c = rational_;
        *this = o;
        scale(c);
        return *this;
    }
    std::map<std::uint64_t, mpq_class> acc;
    mpq_class rat = rational_ * o.rational_;
    for (const auto& t : o.terms_) acc[t.radicand] += rational_ * t.coeff;
    for (const auto& t : terms_) acc[t.radicand] += o.rational_ * t.coeff;
    for (const auto& x : terms_) {
        for (const auto& y : o.terms_) {
            auto [g, r] = radical_product(x.radicand, y.radicand);
            mpq_class c = x.coeff * y.coeff * mpq_class(to_mpz(g));
            if (r == 1) rat += c;
            else acc[r] += c;
        }
    }
    rational_ = rat;
    terms_.clear();
    for (auto& [r, c] : acc)
        if (c != 0) terms_.push_back({r, c});
    return *this;
}

ExactReal& ExactReal::operator/=(const ExactReal& o) {
    if (!o.guard_ && o.terms_.empty()) {
        if (o.rational_ == 0) fail(ErrorCode::InvalidArgument, "division by zero");
        scale(1 / o.rational_);
        return *this;
    }
    return *this *= o.inverse();
}

bool operator==(const ExactReal& a, const ExactReal& b) {
    if (a.guard_.has_value() != b.guard_.has_value()) return false;
    if (a.guard_ && *a.guard_ != *b.guard_) return false;
    if (a.rational_ != b.rational_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].radicand != b.terms_[i].radicand || a.terms_[i].coeff != b.terms_[i].coeff) return false;
    return true;
}

std::strong_ordering operator<=>(const ExactReal& a, const ExactReal& b) {
    if (!a.guard_ && !b.guard_ && a == b) return std::strong_ordering::equal;
    int s = (a - b).sign();
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::int64_t to_int64(const mpz_class& z) {
    if (!z.fits_slong_p()) fail(ErrorCode::Overflow, "integer " + z.get_str() + " exceeds 64 bits");
    return z.get_si();
}

std::int64_t floor_int(const ExactReal& x) { return to_int64(x.floor()); }
std::int64_t nearest_int(const ExactReal& x) { return to_int64(x.nearest()); }

// ---- parsing ----

mpq_class parse_rational(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) fail(ErrorCode::Parse, "empty number");
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            mpz_class num(s.substr(0, slash), 10), den(s.substr(slash + 1), 10);
            if (den == 0) fail(ErrorCode::Parse, "zero denominator in '" + s + "'");
            mpq_class q(num, den);
            q.canonicalize();
            return q;
        }
        bool negative = false;
        std::size_t pos = 0;
        if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
        std::string mantissa, exponent;
        auto e = s.find_first_of("eE", pos);
        mantissa = s.substr(pos, e == std::string::npos ? std::string::npos : e - pos);
        if (e != std::string::npos) exponent = s.substr(e + 1);
        auto dot = mantissa.find('.');
        std::string digits = mantissa;
        long scale = 0;
        if (dot != std::string::npos) {
            digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
            scale = static_cast<long>(mantissa.size() - dot - 1);
        }
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
            fail(ErrorCode::Parse, "malformed number '" + s + "'");
        if (!exponent.empty()) {
            std::size_t used = 0;
            long ex = std::stol(exponent, &used);
            if (used != exponent.size()) fail(ErrorCode::Parse, "malformed exponent in '" + s + "'");
            scale -= ex;
        }
        mpz_class num(digits, 10);
        if (negative) num = -num;
        mpz_class ten = 10, p;
        mpz_pow_ui(p.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(scale < 0 ? -scale : scale));
        mpq_class q = scale >= 0 ? mpq_class(num, p) : mpq_class(num * p);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        fail(ErrorCode::Parse, "malformed number '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(ErrorCode::Parse, "number out of range '" + s + "'");
    }
}

namespace {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : s_(text) {}

    ExactReal run() {
        ExactReal v = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected trailing input");
        return v;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& what) {
        fail(ErrorCode::Parse, what + " in '" + std::string(s_) + "' at offset " + std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExactReal expr() {
        ExactReal v;
        bool negative = false;
        if (eat('-')) negative = true;
        else eat('+');
        v = term();
        if (negative) v = -v;
        while (true) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else break;
        }
        return v;
    }

    ExactReal term() {
        ExactReal v = factor();
        while (true) {
            skip();
            if (eat('*')) v *= factor();
            else if (eat('/')) v /= factor();
            else if (pos_ < s_.size() && (s_[pos_] == 's' || s_[pos_] == '(')) v *= factor();
            else break;
        }
        return v;
    }

    ExactReal factor() {
        skip();
        if (eat('(')) {
            ExactReal v = expr();
            if (!eat(')')) error("missing ')'");
            return v;
        }
        if (s_.substr(pos_, 4) == "sqrt") {
            pos_ += 4;
            bool paren = eat('(');
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) error("expected integer after sqrt");
            std::string digits(s_.substr(start, pos_ - start));
            if (digits.size() > 18) error("radicand too large");
            if (paren && !eat(')')) error("missing ')'");
            return ExactReal::sqrt(std::stoull(digits));
        }
        std::size_t start = pos_;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                ++pos_;
            } else if ((c == 'e' || c == 'E') && pos_ > start) {
                ++pos_;
                if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
            } else {
                break;
            }
        }
        if (start == pos_) error("expected number");
        return ExactReal(parse_rational(s_.substr(start, pos_ - start)));
    }
};

} // namespace

ExactReal ExactReal::parse(std::string_view text) {
    auto tilde = text.find('~');
    if (tilde != std::string_view::npos)
        return guarded(parse_rational(text.substr(0, tilde)), parse_rational(text.substr(tilde + 1)));
    return ExprParser(text).run();
}

} // namespace reebkit
