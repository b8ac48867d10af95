#include "reebkit/indices.hpp"

#include "reebkit/error.hpp"

namespace reebkit {

namespace {

__extension__ typedef __int128 i128;

std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) fail(ErrorCode::Overflow, "index overflows 64 bits");
    return r;
}

std::int64_t floor_div(i128 n, std::int64_t d) {
    i128 q = n / d;
    if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
    if (q > INT64_MAX || q < INT64_MIN) fail(ErrorCode::Overflow, "index overflows 64 bits");
    return static_cast<std::int64_t>(q);
}

} // namespace

IndexSequence::IndexSequence(const BlockPath& path)
    : loop_shift_(path.loop_shift()), half_dim_(path.half_dim()), mean_index_(reebkit::mean_index(path)) {
    for (const auto& b : path.blocks()) {
        if (const auto* r = std::get_if<Rotation>(&b)) {
            Prepared prep;
            const ExactReal& l = r->lambda;
            if (l.is_rational() && l.rational_part().get_num().fits_slong_p() &&
                l.rational_part().get_den().fits_slong_p()) {
                prep.kind = Prepared::Kind::Rational;
                prep.p = l.rational_part().get_num().get_si();
                prep.q = l.rational_part().get_den().get_si();
            } else if (l.kind() == ExactReal::Kind::Quadratic) {
                // (an/ad) + (bn/bd) sqrt(D) = (an*bd + bn*ad*sqrt(D)) / (ad*bd)
                const mpq_class& a = l.rational_part();
                const auto& t = l.terms().front();
                prep.kind = Prepared::Kind::Quadratic;
                prep.q_big = a.get_den() * t.coeff.get_den();
                prep.a = a.get_num() * t.coeff.get_den();
                mpz_class bb = t.coeff.get_num() * a.get_den();
                prep.b_sign = sgn(bb);
                prep.b2d = bb * bb * mpz_class(static_cast<unsigned long>(t.radicand));
            } else {
                prep.kind = Prepared::Kind::General;
                prep.general = l;
            }
            rotations_.push_back(std::move(prep));
        } else if (const auto* f = std::get_if<FullTurn>(&b)) {
            fixed_turns_ += f->turns;
            fixed_turn_blocks_ += 1;
        } else if (const auto* h = std::get_if<Hyperbolic>(&b)) {
            hyperbolic_ += h->h;
        } else {
            const auto& sh = std::get<Shear>(b);
            has_shear_ = true;
            switch (sh.form) {
            case ShearForm::Zero: shear_beta_.nu0 += sh.size; break;
            case ShearForm::Q0: shear_beta_.b0 += 1; break;
            case ShearForm::QPlus: shear_beta_.b_plus += 1; break;
            case ShearForm::QMinus: shear_beta_.b_minus += 1; break;
            }
        }
    }
}

IndexSequence::Split IndexSequence::split(std::int64_t k) const {
    if (k < 1) fail(ErrorCode::InvalidArgument, "iterate needs k >= 1");
    Split s;
    s.beta = shear_beta_;
    s.degenerate = has_shear_ || fixed_turn_blocks_ > 0;
    s.beta.nu0 += fixed_turn_blocks_;
    s.base = mul(2, mul(loop_shift_ + fixed_turns_, k)) + mul(hyperbolic_, k);
    for (const auto& r : rotations_) {
        switch (r.kind) {
        case Prepared::Kind::Rational: {
            i128 num = static_cast<i128>(k) * r.p;
            if (num % r.q == 0) {
                s.base += 2 * static_cast<std::int64_t>(num / r.q);
                s.beta.nu0 += 1;
                s.degenerate = true;
            } else {
                // sign(x)(2 floor|x| + 1) = 2 floor(x) + 1 for non-integer x
                s.base += 2 * floor_div(num, r.q) + 1;
            }
            break;
        }
        case Prepared::Kind::Quadratic: {
            mpz_class kk(static_cast<long>(k));
            mpz_class rad = r.b2d * kk * kk;
            mpz_class root;
            mpz_sqrt(root.get_mpz_t(), rad.get_mpz_t());
            mpz_class num = r.b_sign > 0 ? mpz_class(kk * r.a + root) : mpz_class(kk * r.a - root - 1);
            mpz_class fl;
            mpz_fdiv_q(fl.get_mpz_t(), num.get_mpz_t(), r.q_big.get_mpz_t());
            s.base += 2 * to_int64(fl) + 1;
            break;
        }
        case Prepared::Kind::General: {
            ExactReal kl = r.general * ExactReal(static_cast<long>(k));
            s.base += 2 * floor_int(kl) + 1; // guarded values fail near integers
            break;
        }
        }
    }
    return s;
}

MuPair IndexSequence::mu_pm(std::int64_t k) const {
    Split s = split(k);
    return {s.base - s.beta.beta_minus(), s.base + s.beta.beta_plus()};
}

BetaInvariants IndexSequence::beta(std::int64_t k) const { return split(k).beta; }

bool IndexSequence::nondegenerate(std::int64_t k) const { return !split(k).degenerate; }

ExactReal mean_index(const BlockPath& path) {
    ExactReal total(static_cast<long>(2 * path.loop_shift()));
    for (const auto& b : path.blocks()) {
        if (const auto* r = std::get_if<Rotation>(&b)) total += r->lambda * ExactReal(2);
        else if (const auto* f = std::get_if<FullTurn>(&b)) total += ExactReal(static_cast<long>(2 * f->turns));
        else if (const auto* h = std::get_if<Hyperbolic>(&b)) total += ExactReal(static_cast<long>(h->h));
    }
    return total;
}

std::int64_t cz_index(const BlockPath& path, std::int64_t k) {
    IndexSequence::Split s = IndexSequence(path).split(k);
    if (s.degenerate)
        fail(ErrorCode::DegenerateIterate, "iterate " + std::to_string(k) + " has eigenvalue 1");
    return s.base;
}

MuPair mu_pm(const BlockPath& path, std::int64_t k) {
    IndexSequence::Split s = IndexSequence(path).split(k);
    return {s.base - s.beta.beta_minus(), s.base + s.beta.beta_plus()};
}

BetaInvariants beta_invariants(const BlockPath& path, std::int64_t k) { return IndexSequence(path).beta(k); }

bool is_nondegenerate(const BlockPath& path, std::int64_t k) { return IndexSequence(path).nondegenerate(k); }

IndexBundle index_bundle(const BlockPath& path, std::int64_t k) {
    IndexSequence::Split s = IndexSequence(path).split(k);
    IndexBundle b;
    b.mean_index = mean_index(path) * ExactReal(static_cast<long>(k));
    if (!s.degenerate) b.cz_index = s.base;
    b.mu_minus = s.base - s.beta.beta_minus();
    b.mu_plus = s.base + s.beta.beta_plus();
    b.nu0 = s.beta.nu0;
    b.b0 = s.beta.b0;
    b.b_plus = s.beta.b_plus;
    b.b_minus = s.beta.b_minus;
    b.beta_plus = s.beta.beta_plus();
    b.beta_minus = s.beta.beta_minus();
    b.half_dim = path.half_dim();
    return b;
}

bool is_dynamically_convex(const BlockPath& path) { return mu_pm(path, 1).minus >= path.half_dim() + 2; }

DcIterationReport dc_iteration_check(const BlockPath& path, std::int64_t k_max) {
    DcIterationReport report;
    const std::int64_t m = path.half_dim();
    const IndexSequence seq(path);
    const std::int64_t mu1 = seq.mu_pm(1).minus;
    const bool dc = mu1 >= m + 2;
    std::int64_t prev = mu1;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        std::int64_t cur = k == 1 ? mu1 : seq.mu_pm(k).minus;
        if (k > 1 && cur < prev + (mu1 - m)) {
            report.passed = false;
            report.first_violation = k;
            report.message = "mu-(k) < mu-(k-1) + mu-(1) - m at k=" + std::to_string(k);
            return report;
        }
        if (dc && cur < 2 * k + m) {
            report.passed = false;
            report.first_violation = k;
            report.message = "mu-(k) < 2k + m at k=" + std::to_string(k);
            return report;
        }
        prev = cur;
    }
    return report;
}

} // namespace reebkit
