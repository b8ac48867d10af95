#pragma once

#include "reebkit/exact_real.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace reebkit {

/// Elliptic block rotating by lambda turns; lambda is never an integer.
struct Rotation {
    ExactReal lambda;
};

/// A rotation block whose iterate reached an integer number of turns: the
/// end map is the identity on R^2 and the block only carries mean index 2w.
struct FullTurn {
    std::int64_t turns;
};

struct Hyperbolic {
    std::int64_t h;
    bool negative;
};

enum class ShearForm { Zero, Q0, QPlus, QMinus };

/// Totally degenerate block. For Zero, size is the nu0 contribution; for the
/// other forms it is the half-dimension d.
struct Shear {
    ShearForm form;
    std::int64_t size;
};

using ElementaryBlock = std::variant<Rotation, FullTurn, Hyperbolic, Shear>;

ElementaryBlock rotation(ExactReal lambda);
ElementaryBlock full_turn(std::int64_t turns);
ElementaryBlock hyperbolic(std::int64_t h, bool negative);
ElementaryBlock shear(ShearForm form, std::int64_t size);

std::int64_t block_half_dim(const ElementaryBlock& block);

class BlockPath {
public:
    BlockPath() = default;
    explicit BlockPath(std::int64_t loop_shift, std::vector<ElementaryBlock> blocks = {});

    [[nodiscard]] std::int64_t loop_shift() const noexcept { return loop_shift_; }
    [[nodiscard]] const std::vector<ElementaryBlock>& blocks() const noexcept { return blocks_; }
    [[nodiscard]] std::int64_t half_dim() const noexcept;

    [[nodiscard]] BlockPath with(ElementaryBlock block) const;

    friend bool operator==(const BlockPath& a, const BlockPath& b);

private:
    std::int64_t loop_shift_ = 0;
    std::vector<ElementaryBlock> blocks_;
};

bool operator==(const Rotation& a, const Rotation& b);
bool operator==(const FullTurn& a, const FullTurn& b);
bool operator==(const Hyperbolic& a, const Hyperbolic& b);
bool operator==(const Shear& a, const Shear& b);

BlockPath iterate(const BlockPath& path, std::int64_t k);
BlockPath direct_sum(const BlockPath& a, const BlockPath& b);

/// Nondegenerate part Psi: rotations and hyperbolic blocks, with the turns of
/// FullTurn blocks moved into the loop shift so that hmu(Psi) = hmu(path).
BlockPath nondegenerate_part(const BlockPath& path);

/// True when every block is a Shear or FullTurn (all eigenvalues equal 1).
bool is_totally_degenerate(const BlockPath& path);

/// Denominators q >= 2 of exactly rational rotation numbers.
std::vector<std::int64_t> root_of_unity_degrees(const BlockPath& path);
std::int64_t root_of_unity_lcm(const BlockPath& path);

bool is_admissible(const BlockPath& path, std::int64_t k);

struct EllipticEigen {
    ExactReal rotation; // first-Krein eigenvalue exp(2 pi i rotation), rotation in (0,1)
    int krein;          // sign of the signed rotation number
};

struct EigenSummary {
    std::int64_t equal_one = 0;
    std::int64_t nu0 = 0, b0 = 0, b_plus = 0, b_minus = 0;
    std::int64_t equal_minus_one = 0;
    std::int64_t in_minus_one_zero = 0;
    std::vector<EllipticEigen> elliptic;
    std::int64_t hyperbolic_positive = 0; // pairs {alpha, 1/alpha}, alpha > 0
    std::int64_t hyperbolic_negative = 0; // pairs with alpha < 0
};

EigenSummary eigenvalue_summary(const BlockPath& path, std::int64_t k);

} // namespace reebkit
