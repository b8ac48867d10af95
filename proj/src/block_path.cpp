#include "reebkit/block_path.hpp"

#include "reebkit/error.hpp"

#include <numeric>

namespace reebkit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) fail(ErrorCode::Overflow, "iterate overflows 64-bit index data");
    return r;
}

} // namespace

ElementaryBlock rotation(ExactReal lambda) {
    if (lambda.is_zero() || lambda.is_integer())
        fail(ErrorCode::InvalidArgument, "rotation number must be a non-integer, got " + lambda.to_string());
    return Rotation{std::move(lambda)};
}

ElementaryBlock full_turn(std::int64_t turns) {
    if (turns == 0) fail(ErrorCode::InvalidArgument, "full turn must be nonzero");
    return FullTurn{turns};
}

ElementaryBlock hyperbolic(std::int64_t h, bool negative) {
    if ((h % 2 != 0) != negative)
        fail(ErrorCode::InvalidArgument, "hyperbolic index parity must match negative eigenvalues");
    return Hyperbolic{h, negative};
}

ElementaryBlock shear(ShearForm form, std::int64_t size) {
    if (size <= 0) fail(ErrorCode::InvalidArgument, "shear size must be positive");
    if (form == ShearForm::Q0 && size % 2 == 0) fail(ErrorCode::InvalidArgument, "Q0 shear needs odd d");
    return Shear{form, size};
}

std::int64_t block_half_dim(const ElementaryBlock& block) {
    return std::visit(overloaded{[](const Shear& s) { return s.size; }, [](const auto&) { return std::int64_t{1}; }},
                      block);
}

BlockPath::BlockPath(std::int64_t loop_shift, std::vector<ElementaryBlock> blocks)
    : loop_shift_(loop_shift), blocks_(std::move(blocks)) {}

std::int64_t BlockPath::half_dim() const noexcept {
    std::int64_t m = 0;
    for (const auto& b : blocks_) m += block_half_dim(b);
    return m;
}

BlockPath BlockPath::with(ElementaryBlock block) const {
    BlockPath r = *this;
    r.blocks_.push_back(std::move(block));
    return r;
}

bool operator==(const Rotation& a, const Rotation& b) { return a.lambda == b.lambda; }
bool operator==(const FullTurn& a, const FullTurn& b) { return a.turns == b.turns; }
bool operator==(const Hyperbolic& a, const Hyperbolic& b) { return a.h == b.h && a.negative == b.negative; }
bool operator==(const Shear& a, const Shear& b) { return a.form == b.form && a.size == b.size; }

bool operator==(const BlockPath& a, const BlockPath& b) {
    return a.loop_shift_ == b.loop_shift_ && a.blocks_ == b.blocks_;
}

BlockPath iterate(const BlockPath& path, std::int64_t k) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "iterate needs k >= 1");
    std::vector<ElementaryBlock> blocks;
    blocks.reserve(path.blocks().size());
    for (const auto& b : path.blocks()) {
        blocks.push_back(std::visit(
            overloaded{
                [k](const Rotation& r) -> ElementaryBlock {
                    ExactReal kl = r.lambda * ExactReal(static_cast<long>(k));
                    if (kl.is_integer()) return FullTurn{floor_int(kl)};
                    return Rotation{std::move(kl)};
                },
                [k](const FullTurn& f) -> ElementaryBlock { return FullTurn{checked_mul(f.turns, k)}; },
                [k](const Hyperbolic& h) -> ElementaryBlock {
                    return Hyperbolic{checked_mul(h.h, k), h.negative && k % 2 == 1};
                },
                [](const Shear& s) -> ElementaryBlock { return s; },
            },
            b));
    }
    return BlockPath(checked_mul(path.loop_shift(), k), std::move(blocks));
}

BlockPath direct_sum(const BlockPath& a, const BlockPath& b) {
    std::vector<ElementaryBlock> blocks = a.blocks();
    blocks.insert(blocks.end(), b.blocks().begin(), b.blocks().end());
    return BlockPath(a.loop_shift() + b.loop_shift(), std::move(blocks));
}

BlockPath nondegenerate_part(const BlockPath& path) {
    std::int64_t shift = path.loop_shift();
    std::vector<ElementaryBlock> blocks;
    for (const auto& b : path.blocks()) {
        if (const auto* f = std::get_if<FullTurn>(&b)) shift += f->turns;
        else if (!std::holds_alternative<Shear>(b)) blocks.push_back(b);
    }
    return BlockPath(shift, std::move(blocks));
}

bool is_totally_degenerate(const BlockPath& path) {
    for (const auto& b : path.blocks())
        if (std::holds_alternative<Rotation>(b) || std::holds_alternative<Hyperbolic>(b)) return false;
    return true;
}

std::vector<std::int64_t> root_of_unity_degrees(const BlockPath& path) {
    std::vector<std::int64_t> out;
    for (const auto& b : path.blocks()) {
        const auto* r = std::get_if<Rotation>(&b);
        if (r && r->lambda.is_rational()) {
            const mpz_class& den = r->lambda.rational_part().get_den();
            out.push_back(to_int64(den));
        }
    }
    return out;
}

std::int64_t root_of_unity_lcm(const BlockPath& path) {
    std::int64_t l = 1;
    for (auto q : root_of_unity_degrees(path)) l = std::lcm(l, q);
    return l;
}

bool is_admissible(const BlockPath& path, std::int64_t k) {
    for (auto q : root_of_unity_degrees(path))
        if (k % q == 0) return false;
    return true;
}

EigenSummary eigenvalue_summary(const BlockPath& path, std::int64_t k) {
    EigenSummary s;
    const ExactReal half = ExactReal::ratio(1, 2);
    const BlockPath iterated = iterate(path, k);
    for (const auto& b : iterated.blocks()) {
        std::visit(overloaded{
                       [&](const Rotation& r) {
                           ExactReal frac = r.lambda.fractional();
                           if (frac == half) {
                               s.equal_minus_one += 2;
                           } else {
                               s.elliptic.push_back({frac, r.lambda.sign()});
                           }
                       },
                       [&](const FullTurn&) {
                           s.equal_one += 2;
                           s.nu0 += 1;
                       },
                       [&](const Hyperbolic& h) {
                           if (h.negative) {
                               s.hyperbolic_negative += 1;
                               s.in_minus_one_zero += 1;
                           } else {
                               s.hyperbolic_positive += 1;
                           }
                       },
                       [&](const Shear& sh) {
                           s.equal_one += 2 * sh.size;
                           switch (sh.form) {
                           case ShearForm::Zero: s.nu0 += sh.size; break;
                           case ShearForm::Q0: s.b0 += 1; break;
                           case ShearForm::QPlus: s.b_plus += 1; break;
                           case ShearForm::QMinus: s.b_minus += 1; break;
                           }
                       },
                   },
                   b);
    }
    return s;
}

} // namespace reebkit
