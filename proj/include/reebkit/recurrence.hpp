#pragma once

#include "reebkit/audit.hpp"
#include "reebkit/block_path.hpp"
#include "reebkit/exact_real.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace reebkit {

struct OrbitEntry {
    std::string name;
    BlockPath path;
    ExactReal action;
};

/// 1-based cluster index i and member index j.
struct OrbitLabel {
    std::size_t cluster;
    std::size_t member;
};

struct ClusterPartition {
    std::vector<std::vector<std::size_t>> clusters; // orbit indices, clusters sorted by a/hmu
    std::vector<OrbitLabel> labels;                 // per orbit, in input order
};

/// Exact partition by the ratio action / mean index.
ClusterPartition cluster_orbits(const std::vector<OrbitEntry>& orbits);

class OrbitSystem {
public:
    explicit OrbitSystem(std::vector<OrbitEntry> orbits);

    [[nodiscard]] std::size_t size() const noexcept { return orbits_.size(); }
    [[nodiscard]] const std::vector<OrbitEntry>& orbits() const noexcept { return orbits_; }
    [[nodiscard]] const OrbitEntry& orbit(std::size_t i) const { return orbits_.at(i); }
    [[nodiscard]] const ExactReal& mean_index(std::size_t i) const { return mean_indices_.at(i); }
    [[nodiscard]] const ClusterPartition& partition() const noexcept { return partition_; }
    [[nodiscard]] std::size_t cluster_of(std::size_t i) const { return partition_.labels.at(i).cluster - 1; }
    /// rho_i = hmu / action for cluster i (0-based).
    [[nodiscard]] ExactReal cluster_rho(std::size_t i) const;
    /// Whether t lies in the union of the sequences a_ij * N.
    [[nodiscard]] bool on_spectrum(const ExactReal& t) const;

private:
    std::vector<OrbitEntry> orbits_;
    std::vector<ExactReal> mean_indices_;
    ClusterPartition partition_;
};

enum class SearchMode {
    Certified,  // candidates must satisfy the sufficient system with (epsilon, sigma)
    Exhaustive, // every candidate passing exact verification
};

struct RecurrenceParams {
    ExactReal eta = ExactReal::ratio(1, 5);
    std::int64_t ell0 = 1;
    std::int64_t divisor = 1;
    std::int64_t event_count = 1;
    std::int64_t k_ceiling = 10000;
    /// Range for the global checks (IR5 neighbours, IR2'/IR3'); 0 means 2*max k + ell0.
    std::int64_t verify_ceiling = 0;
    std::optional<ExactReal> epsilon;
    std::optional<ExactReal> sigma;
    unsigned threads = 1;
    SearchMode mode = SearchMode::Certified;
};

struct DerivedParams {
    std::optional<ExactReal> eps0; // absent when no orbit has an elliptic block
    ExactReal epsilon;
    ExactReal sigma;
    std::int64_t max_elliptic = 0;
    ExactReal max_rho;
    ExactReal min_action;
    std::int64_t root_lcm = 1;
};

/// Checks eta/ell0/divisor and derives eps and sigma (defaults or validated overrides).
DerivedParams derive_parameters(const OrbitSystem& system, const RecurrenceParams& params);

struct EventAudit {
    std::vector<AuditItem> items;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] const AuditItem* find(const std::string& name) const;
    [[nodiscard]] const AuditItem* first_failure() const;
};

struct RecurrenceEvent {
    ExactReal C;
    std::vector<std::int64_t> d; // per cluster
    std::vector<std::int64_t> k; // per orbit, input order
    ExactReal eta;
    std::int64_t ell0 = 1;
    std::int64_t divisor = 1;
    ExactReal epsilon;
    ExactReal sigma;
    bool certified = false; // satisfies the sufficient system with (epsilon, sigma)
    EventAudit audit;
};

struct TorusReturns {
    std::vector<std::int64_t> ks;
    std::int64_t max_gap = 0;
};

/// All k <= k_ceiling divisible by divisor with ||k lambda_q|| < eps for every q.
TorusReturns torus_returns(const std::vector<ExactReal>& lambdas, const ExactReal& eps, std::int64_t divisor,
                           std::int64_t k_ceiling);

struct LinearForm {
    std::vector<ExactReal> coeffs;
};

struct MinkowskiResult {
    std::vector<std::vector<std::int64_t>> solutions;
    std::int64_t max_gap = 0; // largest sup-norm step between consecutive solutions
};

/// Nonzero integer vectors with |f_s(K)| < delta_s, components divisible by
/// divisor, ordered by sup-norm then lexicographically, first nonzero
/// coordinate positive. Coordinates listed in `positive` must be > 0.
MinkowskiResult minkowski_solutions(const std::vector<LinearForm>& forms, const std::vector<ExactReal>& deltas,
                                    std::size_t variables, std::int64_t divisor, std::size_t count,
                                    std::int64_t box_ceiling, const std::vector<std::size_t>& positive = {});

/// C = hi - (hi - lo)/2^j for the first j >= 4 keeping C off the spectrum,
/// with lo = max k a - eta and hi = min k a.
ExactReal choose_threshold(const OrbitSystem& system, const std::vector<std::int64_t>& k, const ExactReal& eta);

std::vector<RecurrenceEvent> find_recurrence_events(const OrbitSystem& system, const RecurrenceParams& params);

EventAudit verify_event(const OrbitSystem& system, const RecurrenceEvent& event, const RecurrenceParams& params,
                        std::int64_t k_ceiling);

} // namespace reebkit
