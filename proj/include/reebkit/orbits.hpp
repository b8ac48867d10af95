#pragma once

#include "reebkit/audit.hpp"
#include "reebkit/block_path.hpp"
#include "reebkit/persistence.hpp"
#include "reebkit/recurrence.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reebkit {

struct Classification {
    bool nondegenerate = true; // of the k-th iterate
    bool alternating = false;  // of the prime
    bool good = true;          // false only for nondegenerate even iterates of alternating primes
    std::int64_t prime_negative_count = 0;
};

/// Throws ClassificationUndefined instead of labelling a prime alternating
/// when it also has an even-degree root of unity among its eigenvalues.
Classification classify_orbit(const BlockPath& prime, std::int64_t k);

struct ClosedOrbitRecord {
    std::string label;
    std::int64_t iterate = 1;
    BlockPath prime;
    BlockPath path; // iterate(prime, iterate)
    ExactReal action;
    Classification classification;
    std::optional<std::int64_t> degree;
    /// Equivariant local homology over Q supplied by the caller for degenerate orbits.
    std::optional<std::map<std::int64_t, std::int64_t>> declared_ch;
};

ClosedOrbitRecord make_record(std::string label, const BlockPath& prime, const ExactReal& prime_action,
                              std::int64_t k);

enum class SupportPrecision { Exact, Bounds, Undetermined };

std::string_view support_precision_name(SupportPrecision p) noexcept;

struct LocalHomology {
    std::vector<std::int64_t> sh_support; // listed when exact
    SupportPrecision sh_precision = SupportPrecision::Exact;
    std::int64_t sh_lo = 0, sh_hi = 0; // support lies in [sh_lo, sh_hi]
    std::vector<std::int64_t> ch_support;
    SupportPrecision ch_precision = SupportPrecision::Exact;
    std::int64_t ch_lo = 0, ch_hi = 0;
};

LocalHomology local_homology(const ClosedOrbitRecord& rec, int field = 0);

/// Equivariant Euler characteristic over Q; Undefined when only bounds are known.
std::int64_t chieq(const ClosedOrbitRecord& rec);

/// Orbit j has action delta_j and path loop(1) + sum_{i != j} R(delta_j / delta_i).
/// Throws RationalRatio if some ratio is rational.
OrbitSystem ellipsoid_system(const std::vector<ExactReal>& deltas);

/// Copy of the system with every action replaced by the orbit's mean index.
OrbitSystem rescale_to_mean_index(const OrbitSystem& system);

struct StaircaseOrbit {
    std::size_t orbit; // index into the system
    std::int64_t k;
    std::string label;
    ExactReal action;
    std::int64_t degree;
};

struct Staircase {
    Barcode barcode;
    std::vector<StaircaseOrbit> orbits;   // by increasing action
    std::vector<OrbitHomology> homology;  // [W] first, then the orbits
    std::int64_t n = 0;
};

/// First `count` Q-visible iterates by action with degrees n+1, n+3, ... and
/// bars (A_i, A_{i+1}] of degree n+2i starting from [W] at action 0.
Staircase staircase_barcode(const OrbitSystem& system, std::size_t count);

/// D1 for totally degenerate orbits, D2 (k admissible and odd) otherwise.
std::int64_t degree_shift_predict(const BlockPath& orbit, std::int64_t degree, std::int64_t k);

enum class Group { Minus, Zero, Plus };

std::string_view group_name(Group g) noexcept;

struct GroupMember {
    std::size_t orbit;
    std::int64_t k;
    Group group;
    std::int64_t mu_minus, mu_plus;
    std::optional<std::int64_t> degree; // known for nondegenerate iterates
};

struct MultiplicityReport {
    RecurrenceEvent event;
    std::int64_t n = 0;
    std::int64_t d = 0;
    std::vector<GroupMember> members; // Q-visible iterates up to the ceiling
    std::int64_t interval_lo = 0, interval_hi = 0;
    std::vector<std::int64_t> slots;
    std::map<std::int64_t, std::vector<std::size_t>> fillers; // slot -> indices into members
    std::size_t distinct_primes = 0;
    std::int64_t root_lcm = 1;
    std::vector<std::int64_t> s; // s_j per orbit (0 for the least-action orbit)
    mpz_class required_divisor;  // 2 p prod s_j!
    std::vector<AuditItem> items;

    [[nodiscard]] bool passed() const { return all_passed(items); }
};

/// Throws EventMismatch when the event does not verify against the system.
MultiplicityReport multiplicity_audit(const OrbitSystem& system, const RecurrenceEvent& event,
                                      std::int64_t k_ceiling);

/// Throws NonResonanceFailed naming the first coinciding pair.
void check_non_resonance(const std::vector<ExactReal>& deltas);

struct ComparisonReport {
    std::vector<ExactReal> deltas; // mean indices, increasing
    std::vector<AuditItem> items;
    std::string first_discrepancy;

    [[nodiscard]] bool passed() const { return all_passed(items); }
};

ComparisonReport ellipsoid_comparison(const OrbitSystem& system, std::int64_t k_max);

} // namespace reebkit
