#pragma once

#include "reebkit/block_path.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace reebkit {

struct BetaInvariants {
    std::int64_t nu0 = 0, b0 = 0, b_plus = 0, b_minus = 0;

    [[nodiscard]] std::int64_t beta_plus() const { return nu0 + b0 + b_plus; }
    [[nodiscard]] std::int64_t beta_minus() const { return nu0 + b0 + b_minus; }
};

struct MuPair {
    std::int64_t minus;
    std::int64_t plus;
};

struct IndexBundle {
    ExactReal mean_index;
    std::optional<std::int64_t> cz_index;
    std::int64_t mu_minus = 0, mu_plus = 0;
    std::int64_t nu0 = 0, b0 = 0, b_plus = 0, b_minus = 0;
    std::int64_t beta_plus = 0, beta_minus = 0;
    std::int64_t half_dim = 0;

    friend bool operator==(const IndexBundle&, const IndexBundle&) = default;
};

ExactReal mean_index(const BlockPath& path);

/// Precomputed block data for evaluating indices of many iterates of one path.
class IndexSequence {
public:
    explicit IndexSequence(const BlockPath& path);

    [[nodiscard]] MuPair mu_pm(std::int64_t k) const;
    [[nodiscard]] BetaInvariants beta(std::int64_t k) const;
    [[nodiscard]] bool nondegenerate(std::int64_t k) const;
    [[nodiscard]] std::int64_t half_dim() const noexcept { return half_dim_; }
    [[nodiscard]] const ExactReal& mean_index() const noexcept { return mean_index_; }

    struct Split {
        std::int64_t base = 0; // mu(Psi) + hmu(Phi0)
        BetaInvariants beta;
        bool degenerate = false;
    };
    [[nodiscard]] Split split(std::int64_t k) const;

private:
    struct Prepared {
        enum class Kind { Rational, Quadratic, General } kind;
        std::int64_t p = 0, q = 1;        // rational p/q
        mpz_class a, q_big, b2d;          // quadratic (a + s*sqrt(b2d))/q_big
        int b_sign = 0;
        ExactReal general;
    };
    std::int64_t loop_shift_ = 0;
    std::int64_t half_dim_ = 0;
    ExactReal mean_index_;
    std::vector<Prepared> rotations_;
    std::int64_t fixed_turns_ = 0;
    std::int64_t fixed_turn_blocks_ = 0;
    std::int64_t hyperbolic_ = 0;
    BetaInvariants shear_beta_;
    bool has_shear_ = false;
};

/// Conley-Zehnder index of the k-th iterate; DegenerateIterate if it has eigenvalue 1.
std::int64_t cz_index(const BlockPath& path, std::int64_t k = 1);

MuPair mu_pm(const BlockPath& path, std::int64_t k = 1);
BetaInvariants beta_invariants(const BlockPath& path, std::int64_t k = 1);
bool is_nondegenerate(const BlockPath& path, std::int64_t k = 1);
IndexBundle index_bundle(const BlockPath& path, std::int64_t k = 1);

bool is_dynamically_convex(const BlockPath& path);

struct DcIterationReport {
    bool passed = true;
    std::int64_t first_violation = 0; // k at which a check failed, 0 if none
    std::string message;
};

DcIterationReport dc_iteration_check(const BlockPath& path, std::int64_t k_max);

} // namespace reebkit
