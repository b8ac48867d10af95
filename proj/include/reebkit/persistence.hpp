#pragma once

#include "reebkit/audit.hpp"
#include "reebkit/exact_real.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace reebkit {

/// Half-open bar (birth, death] in a fixed degree; no death means infinite.
struct Bar {
    ExactReal birth;
    std::optional<ExactReal> death;
    std::int64_t degree = 0;
};

struct Barcode {
    int field = 0; // 0 or a prime
    std::vector<Bar> bars;
    /// Set when the barcode is a truncation: bars are only complete below this action.
    std::optional<ExactReal> horizon;

    /// Sorted distinct endpoint values.
    [[nodiscard]] std::vector<ExactReal> spectrum() const;
};

/// Throws InvalidArgument unless a < b, b > 0 and the field is 0 or prime.
void validate_barcode(const Barcode& bc);

struct Generator {
    std::string id;
    std::int64_t degree = 0;
    ExactReal filtration;
};

struct FilteredComplex {
    std::vector<Generator> generators;
    /// boundary[j] lists (row, coefficient) pairs of the boundary of generator j.
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> boundary;
    int field = 0;
};

/// Column reduction over Q or F_p. Zero-length bars are dropped.
Barcode barcode_from_filtered_complex(const FilteredComplex& cx);

/// Number of bars with a < t <= b, optionally restricted to one degree.
std::size_t dim_at(const Barcode& bc, const ExactReal& t, std::optional<std::int64_t> degree = std::nullopt);

/// Sorted endpoint index for repeated dim_at queries on one barcode.
class BarcodeIndex {
public:
    explicit BarcodeIndex(const Barcode& bc);

    [[nodiscard]] std::size_t dim_at(const ExactReal& t) const;
    [[nodiscard]] std::size_t dim_at(const ExactReal& t, std::int64_t degree) const;
    /// Per-degree dims at t (degrees with nonzero dimension only).
    [[nodiscard]] std::map<std::int64_t, std::size_t> profile(const ExactReal& t) const;

private:
    struct Endpoints {
        std::vector<std::pair<double, ExactReal>> births;
        std::vector<std::pair<double, ExactReal>> deaths; // finite only
    };
    Endpoints all_;
    std::map<std::int64_t, Endpoints> by_degree_;

    static std::size_t count(const Endpoints& e, double td, const ExactReal& t);
};

struct Zeta {
    std::int64_t minus = 0; // bars of degree m-1 ending at a
    std::int64_t plus = 0;  // bars of degree m beginning at a
    [[nodiscard]] std::int64_t total() const { return minus + plus; }
};

std::map<std::int64_t, Zeta> zeta_counts(const Barcode& bc, const ExactReal& a);

/// Local homology of one orbit (or of a synthetic action-zero element).
struct OrbitHomology {
    std::string label;
    ExactReal action;
    std::map<std::int64_t, std::int64_t> dims; // degree -> dim SH_m(x)
    std::int64_t mu_minus = 0;
    std::int64_t mu_plus = 0;
    std::optional<std::size_t> cluster;
};

struct BegEnd {
    /// Orbit homology entries used (input plus synthetic action-zero elements).
    std::vector<OrbitHomology> orbits;
    std::vector<std::size_t> beg;               // per bar, index into orbits
    std::vector<std::optional<std::size_t>> en; // per bar; empty for infinite bars
    /// Orbits below the horizon where bars of degree m-1 ending at x plus bars
    /// of degree m beginning at x differ from dim SH_m(x).
    std::vector<std::string> refinement_gaps;
};

/// Slot-consuming construction of beg and en. Bars born at 0 without a
/// supplied action-zero orbit get one synthetic element each. Throws
/// ZetaMismatch when the bar counts disagree with the orbit dimensions.
BegEnd beg_end_assignment(const Barcode& bc, const std::vector<OrbitHomology>& orbits);

/// Action matching, support membership and the index inequalities.
std::vector<AuditItem> check_beg_end(const Barcode& bc, const BegEnd& be);

struct BarcodeAuditOptions {
    std::optional<std::int64_t> n;   // Euler check needs n and chi
    std::optional<std::int64_t> chi;
    std::optional<ExactReal> cbar;   // boundary depth bound
    bool vanishing = false;          // forbid infinite bars
    std::vector<std::int64_t> primes;
    std::size_t samples = 200;
    std::optional<ExactReal> t_max;  // default: horizon, else largest finite endpoint
    // Inter-cluster check: per-bar clusters of beg and en, and Kbar = cbar + k_bound.
    std::vector<std::optional<std::size_t>> begin_cluster;
    std::vector<std::optional<std::size_t>> end_cluster;
    std::optional<ExactReal> k_bound;
};

struct BarcodeAuditReport {
    std::vector<AuditItem> items;
    std::optional<ExactReal> boundary_depth;
    std::size_t sampled = 0;

    [[nodiscard]] bool passed() const { return all_passed(items); }
};

BarcodeAuditReport barcode_audit(const Barcode& bc, const BarcodeAuditOptions& options);

/// Deterministic sample points in (0, t_max]: uniform grid plus the spectrum
/// points and the midpoints between consecutive spectrum points.
std::vector<ExactReal> sample_points(const Barcode& bc, const ExactReal& t_max, std::size_t samples);

} // namespace reebkit
