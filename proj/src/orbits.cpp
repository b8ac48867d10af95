#include "reebkit/orbits.hpp"

#include "reebkit/error.hpp"
#include "reebkit/indices.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace reebkit {

namespace {

std::int64_t uniform_half_dim(const OrbitSystem& system) {
    const std::int64_t m = system.orbit(0).path.half_dim();
    for (const auto& o : system.orbits())
        if (o.path.half_dim() != m)
            fail(ErrorCode::HypothesisViolation, "orbits must share one half-dimension (orbit '" + o.name + "')");
    return m;
}

void require_dc(const OrbitSystem& system) {
    for (const auto& o : system.orbits())
        if (!is_dynamically_convex(o.path))
            fail(ErrorCode::HypothesisViolation, "orbit '" + o.name + "' is not dynamically convex");
}

std::string iterate_label(const std::string& name, std::int64_t k) {
    return k == 1 ? name : name + "^" + std::to_string(k);
}

std::int64_t parity_sign(std::int64_t m) { return m % 2 == 0 ? 1 : -1; }

} // namespace

Classification classify_orbit(const BlockPath& prime, std::int64_t k) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "iterate needs k >= 1");
    Classification c;
    c.prime_negative_count = eigenvalue_summary(prime, 1).in_minus_one_zero;
    c.alternating = c.prime_negative_count % 2 == 1;
    if (c.alternating)
        for (auto q : root_of_unity_degrees(prime))
            if (q % 2 == 0)
                fail(ErrorCode::ClassificationUndefined,
                     "alternating prime has a root of unity of even degree " + std::to_string(q) +
                         " among its eigenvalues");
    c.nondegenerate = IndexSequence(prime).nondegenerate(k);
    c.good = !(c.nondegenerate && c.alternating && k % 2 == 0);
    return c;
}

ClosedOrbitRecord make_record(std::string label, const BlockPath& prime, const ExactReal& prime_action,
                              std::int64_t k) {
    ClosedOrbitRecord r;
    r.label = std::move(label);
    r.iterate = k;
    r.prime = prime;
    r.path = iterate(prime, k);
    r.action = prime_action * ExactReal(static_cast<long>(k));
    r.classification = classify_orbit(prime, k);
    return r;
}

std::string_view support_precision_name(SupportPrecision p) noexcept {
    switch (p) {
    case SupportPrecision::Exact: return "exact";
    case SupportPrecision::Bounds: return "bounds";
    case SupportPrecision::Undetermined: return "undetermined";
    }
    return "?";
}

LocalHomology local_homology(const ClosedOrbitRecord& rec, int field) {
    const MuPair mu = mu_pm(rec.prime, rec.iterate);
    LocalHomology h;
    const bool p_divides = field > 0 && rec.iterate % field == 0;
    if (rec.classification.nondegenerate) {
        h.sh_support = {mu.minus, mu.minus + 1};
        h.sh_lo = mu.minus;
        h.sh_hi = mu.minus + 1;
        h.ch_lo = h.ch_hi = mu.minus;
        if (p_divides) {
            h.ch_precision = SupportPrecision::Undetermined;
        } else if (rec.classification.good) {
            h.ch_support = {mu.minus};
        }
        return h;
    }
    h.sh_precision = SupportPrecision::Bounds;
    h.sh_lo = mu.minus;
    h.sh_hi = mu.plus + 1;
    h.ch_lo = mu.minus;
    h.ch_hi = mu.plus;
    if (field != 0) {
        h.ch_precision = SupportPrecision::Undetermined;
    } else if (rec.declared_ch) {
        for (auto [m, d] : *rec.declared_ch)
            if (d != 0) h.ch_support.push_back(m);
    } else {
        h.ch_precision = SupportPrecision::Bounds;
    }
    return h;
}

std::int64_t chieq(const ClosedOrbitRecord& rec) {
    if (rec.classification.nondegenerate) {
        if (!rec.classification.good) return 0;
        return parity_sign(mu_pm(rec.prime, rec.iterate).minus);
    }
    if (!rec.declared_ch) fail(ErrorCode::Undefined, "equivariant homology of degenerate '" + rec.label + "' is only bounded");
    std::int64_t chi = 0;
    for (auto [m, d] : *rec.declared_ch) chi += parity_sign(m) * d;
    return chi;
}

OrbitSystem ellipsoid_system(const std::vector<ExactReal>& deltas) {
    if (deltas.empty()) fail(ErrorCode::InvalidArgument, "ellipsoid needs at least one delta");
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        if (deltas[j].sign() <= 0) fail(ErrorCode::InvalidArgument, "deltas must be positive");
        if (j > 0 && !(deltas[j - 1] < deltas[j])) fail(ErrorCode::InvalidArgument, "deltas must be strictly increasing");
    }
    std::vector<OrbitEntry> orbits;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        std::vector<ElementaryBlock> blocks;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            if (i == j) continue;
            ExactReal ratio = deltas[j] / deltas[i];
            if (ratio.is_rational())
                fail(ErrorCode::RationalRatio, "delta_" + std::to_string(j + 1) + "/delta_" + std::to_string(i + 1) +
                                                   " = " + ratio.to_string() + " is rational");
            blocks.push_back(rotation(ratio));
        }
        orbits.push_back({"y" + std::to_string(j + 1), BlockPath(1, std::move(blocks)), deltas[j]});
    }
    return OrbitSystem(std::move(orbits));
}

OrbitSystem rescale_to_mean_index(const OrbitSystem& system) {
    std::vector<OrbitEntry> orbits = system.orbits();
    for (std::size_t i = 0; i < orbits.size(); ++i) orbits[i].action = system.mean_index(i);
    return OrbitSystem(std::move(orbits));
}

Staircase staircase_barcode(const OrbitSystem& system, std::size_t count) {
    if (count == 0) fail(ErrorCode::InvalidArgument, "staircase needs count >= 1");
    const std::int64_t m = uniform_half_dim(system);
    require_dc(system);
    Staircase out;
    out.n = m + 1;

    struct Item {
        double key;
        ExactReal action;
        std::size_t orbit;
        std::int64_t k;
    };
    auto later = [](const Item& a, const Item& b) {
        double tol = 1e-12 * (1.0 + std::fabs(a.key) + std::fabs(b.key));
        if (a.key > b.key + tol) return true;
        if (a.key < b.key - tol) return false;
        if (a.action != b.action) return b.action < a.action;
        return a.orbit > b.orbit;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(later)> heap(later);
    for (std::size_t o = 0; o < system.size(); ++o)
        heap.push({system.orbit(o).action.to_double(), system.orbit(o).action, o, 1});

    std::vector<IndexSequence> seqs;
    for (const auto& o : system.orbits()) seqs.emplace_back(o.path);

    while (out.orbits.size() < count) {
        Item it = heap.top();
        heap.pop();
        const auto& entry = system.orbit(it.orbit);
        ExactReal next = entry.action * ExactReal(static_cast<long>(it.k + 1));
        heap.push({next.to_double(), next, it.orbit, it.k + 1});

        Classification cls = classify_orbit(entry.path, it.k);
        const std::string label = iterate_label(entry.name, it.k);
        if (!cls.nondegenerate) fail(ErrorCode::HypothesisViolation, label + " is degenerate");
        if (!cls.good) continue;
        if (!out.orbits.empty() && out.orbits.back().action == it.action)
            fail(ErrorCode::HypothesisViolation,
                 label + " and " + out.orbits.back().label + " share the action " + it.action.to_string());
        const std::int64_t deg = seqs[it.orbit].mu_pm(it.k).minus;
        const std::int64_t want = out.n + 1 + 2 * static_cast<std::int64_t>(out.orbits.size());
        if (deg != want)
            fail(ErrorCode::HypothesisViolation, label + " has degree " + std::to_string(deg) + ", the staircase needs " +
                                                     std::to_string(want));
        out.orbits.push_back({it.orbit, it.k, label, it.action, deg});
    }

    out.barcode.field = 0;
    OrbitHomology w;
    w.label = "[W]";
    w.action = ExactReal(0);
    w.dims[out.n] = 1;
    w.mu_minus = w.mu_plus = out.n;
    w.cluster = std::nullopt;
    out.homology.push_back(std::move(w));
    ExactReal prev(0);
    for (std::size_t i = 0; i < out.orbits.size(); ++i) {
        const auto& o = out.orbits[i];
        out.barcode.bars.push_back({prev, o.action, out.n + 2 * static_cast<std::int64_t>(i)});
        prev = o.action;
        OrbitHomology h;
        h.label = o.label;
        h.action = o.action;
        h.dims[o.degree] = 1;
        h.dims[o.degree + 1] = 1;
        h.mu_minus = h.mu_plus = o.degree;
        h.cluster = system.cluster_of(o.orbit);
        out.homology.push_back(std::move(h));
    }
    out.barcode.horizon = prev;
    try {
        (void)beg_end_assignment(out.barcode, out.homology);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ZetaMismatch) throw;
        fail(ErrorCode::HypothesisViolation, std::string("staircase breaks the bar count identity: ") + e.what());
    }
    return out;
}

std::int64_t degree_shift_predict(const BlockPath& orbit, std::int64_t degree, std::int64_t k) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "iterate needs k >= 1");
    if (is_totally_degenerate(orbit)) {
        ExactReal h = mean_index(orbit);
        if (!h.is_integer()) fail(ErrorCode::HypothesisViolation, "totally degenerate orbit with non-integer mean index");
        std::int64_t r;
        if (__builtin_mul_overflow(k - 1, floor_int(h), &r) || __builtin_add_overflow(r, degree, &r))
            fail(ErrorCode::Overflow, "predicted degree overflows");
        return r;
    }
    if (!is_admissible(orbit, k)) fail(ErrorCode::NotApplicable, "k=" + std::to_string(k) + " is not admissible");
    if (k % 2 == 0) fail(ErrorCode::NotApplicable, "k=" + std::to_string(k) + " is even");
    const BlockPath psi = nondegenerate_part(orbit);
    return degree + cz_index(psi, k) - cz_index(psi, 1);
}

std::string_view group_name(Group g) noexcept {
    switch (g) {
    case Group::Minus: return "minus";
    case Group::Zero: return "zero";
    case Group::Plus: return "plus";
    }
    return "?";
}

MultiplicityReport multiplicity_audit(const OrbitSystem& system, const RecurrenceEvent& event,
                                      std::int64_t k_ceiling) {
    const std::int64_t m = uniform_half_dim(system);
    require_dc(system);
    if (system.partition().clusters.size() != 1)
        fail(ErrorCode::HypothesisViolation, "multiplicity audit needs a single cluster");
    if (event.k.size() != system.size() || event.d.size() != 1)
        fail(ErrorCode::EventMismatch, "event does not match the system's orbits and clusters");
    const std::int64_t max_k = *std::max_element(event.k.begin(), event.k.end());
    if (k_ceiling < max_k + event.ell0)
        fail(ErrorCode::InvalidArgument, "k ceiling must be at least max k + ell0 = " + std::to_string(max_k + event.ell0));

    RecurrenceParams params;
    params.eta = event.eta;
    params.ell0 = event.ell0;
    params.divisor = event.divisor;
    EventAudit verified = verify_event(system, event, params, k_ceiling);
    if (!verified.passed()) {
        const AuditItem* f = verified.first_failure();
        fail(ErrorCode::EventMismatch, "event fails " + f->name + ": " + f->detail);
    }

    MultiplicityReport rep;
    rep.event = event;
    rep.n = m + 1;
    rep.d = event.d.front();
    const std::int64_t n = rep.n, d = rep.d;

    bool all_nondegenerate = true;
    std::vector<Classification> prime_cls;
    for (std::size_t o = 0; o < system.size(); ++o) {
        const BlockPath& path = system.orbit(o).path;
        prime_cls.push_back(classify_orbit(path, 1));
        const IndexSequence seq(path);
        for (std::int64_t k = 1; k <= k_ceiling; ++k) {
            IndexSequence::Split s = seq.split(k);
            const bool nondeg = !s.degenerate;
            if (nondeg && prime_cls[o].alternating && k % 2 == 0) continue; // bad, invisible over Q
            if (!nondeg) all_nondegenerate = false;
            GroupMember g;
            g.orbit = o;
            g.k = k;
            g.group = k < event.k[o] ? Group::Minus : (k == event.k[o] ? Group::Zero : Group::Plus);
            g.mu_minus = s.base - s.beta.beta_minus();
            g.mu_plus = s.base + s.beta.beta_plus();
            if (nondeg) g.degree = s.base;
            rep.members.push_back(g);
        }
    }

    auto member_text = [&](const GroupMember& g) {
        return iterate_label(system.orbit(g.orbit).name, g.k) + " [" + std::to_string(g.mu_minus) + ", " +
               std::to_string(g.mu_plus) + "]";
    };
    AuditItem plus{"gamma-plus", true, false, "mu- >= " + std::to_string(d + n + 1)};
    AuditItem zero{"gamma-zero", true, false, "within [" + std::to_string(d - n + 1) + ", " + std::to_string(d + n - 1) + "]"};
    AuditItem minus{"gamma-minus", true, false, "mu+ <= " + std::to_string(d - 2)};
    AuditItem spot{"spot", true, false, "degrees of the minus group <= " + std::to_string(d - n)};
    AuditItem spot_bounds{"spot-bounds", true, true, "degenerate minus-group windows stay below the slots"};
    auto flag = [](AuditItem& item, const std::string& msg) {
        if (!item.passed) return;
        item.passed = false;
        item.detail = msg;
    };
    for (const auto& g : rep.members) {
        switch (g.group) {
        case Group::Plus:
            if (g.mu_minus < d + n + 1) flag(plus, member_text(g) + " has mu- < " + std::to_string(d + n + 1));
            break;
        case Group::Zero:
            if (g.mu_minus < d - n + 1 || g.mu_plus > d + n - 1) flag(zero, member_text(g) + " leaves the interval");
            break;
        case Group::Minus:
            if (g.mu_plus > d - 2) flag(minus, member_text(g) + " has mu+ > " + std::to_string(d - 2));
            if (g.degree && *g.degree > d - n) flag(spot, member_text(g) + " has degree " + std::to_string(*g.degree));
            if (!g.degree && g.mu_plus > d - n) flag(spot_bounds, member_text(g) + " may reach the slots");
            break;
        }
    }

    AuditItem parity{"parity", true, true, "d and all k even"};
    if (d % 2 != 0) flag(parity, "d = " + std::to_string(d) + " is odd");
    for (std::size_t o = 0; o < system.size(); ++o)
        if (event.k[o] % 2 != 0) flag(parity, "k for " + system.orbit(o).name + " is odd");

    // divisor 2 p prod s_j! from the least-action prime
    for (const auto& o : system.orbits()) rep.root_lcm = std::lcm(rep.root_lcm, root_of_unity_lcm(o.path));
    std::size_t x0 = 0;
    for (std::size_t o = 1; o < system.size(); ++o)
        if (system.orbit(o).action < system.orbit(x0).action) x0 = o;
    rep.required_divisor = 2 * rep.root_lcm;
    rep.s.assign(system.size(), 0);
    for (std::size_t o = 0; o < system.size(); ++o) {
        if (o == x0) continue;
        ExactReal q = system.orbit(x0).action / system.orbit(o).action;
        std::int64_t s = floor_int(q);
        if (s > 20) fail(ErrorCode::Overflow, "s_j = " + std::to_string(s) + " exceeds the factorial cap of 20");
        rep.s[o] = s;
        for (std::int64_t f = 2; f <= s; ++f) rep.required_divisor *= f;
    }
    AuditItem divisor{"divisor", true, true, "k divisible by " + rep.required_divisor.get_str()};
    for (std::size_t o = 0; o < system.size(); ++o)
        if (mpz_class(static_cast<long>(event.k[o])) % rep.required_divisor != 0)
            flag(divisor, "k for " + system.orbit(o).name + " is not divisible by " + rep.required_divisor.get_str());

    rep.interval_lo = d - n + 1;
    rep.interval_hi = d + n - 1;
    for (std::int64_t v = rep.interval_lo; v <= rep.interval_hi; ++v)
        if (((v - (n + 1)) % 2 + 2) % 2 == 0) rep.slots.push_back(v);
    for (std::size_t i = 0; i < rep.members.size(); ++i) {
        const auto& g = rep.members[i];
        if (g.degree && std::binary_search(rep.slots.begin(), rep.slots.end(), *g.degree))
            rep.fillers[*g.degree].push_back(i);
    }
    AuditItem filled{"slots-filled", true, false, std::to_string(rep.slots.size()) + " slots"};
    AuditItem only_zero{"fillers-gamma-zero", true, false, "slot fillers come from the zero group"};
    AuditItem non_alt{"fillers-non-alternating", true, false, "slot fillers have non-alternating primes"};
    std::set<std::size_t> primes;
    for (auto v : rep.slots) {
        auto it = rep.fillers.find(v);
        if (it == rep.fillers.end()) {
            flag(filled, "slot " + std::to_string(v) + " is empty");
            continue;
        }
        if (all_nondegenerate && it->second.size() > 1) flag(filled, "slot " + std::to_string(v) + " has several orbits");
        for (auto i : it->second) {
            const auto& g = rep.members[i];
            primes.insert(g.orbit);
            if (g.group != Group::Zero) flag(only_zero, member_text(g) + " fills slot " + std::to_string(v));
            if (prime_cls[g.orbit].alternating) flag(non_alt, member_text(g) + " has an alternating prime");
        }
    }
    rep.distinct_primes = primes.size();
    AuditItem count{"distinct-primes", true, false, ""};
    count.detail = std::to_string(rep.distinct_primes) + (all_nondegenerate ? " == " : " >= ") + std::to_string(n);
    const auto need = static_cast<std::size_t>(n);
    if (all_nondegenerate ? rep.distinct_primes != need : rep.distinct_primes < need) {
        count.passed = false;
        count.detail = "found " + std::to_string(rep.distinct_primes) + " primes, expected " +
                       (all_nondegenerate ? "exactly " : "at least ") + std::to_string(n);
    }
    rep.items = {plus, zero, minus, spot, spot_bounds, parity, divisor, filled, only_zero, non_alt, count};
    return rep;
}

void check_non_resonance(const std::vector<ExactReal>& deltas) {
    const std::size_t n = deltas.size();
    auto name = [](std::size_t j, std::size_t i, bool neg) {
        return std::string(neg ? "-" : "+") + "delta_" + std::to_string(j + 1) + "/delta_" + std::to_string(i + 1);
    };
    // Integer ratios first: they collapse +r and -r onto 0.
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            ExactReal r = deltas[j] / deltas[i];
            if (r.is_integer())
                fail(ErrorCode::NonResonanceFailed, name(j, i, false) + " = " + r.to_string() + " and " + name(j, i, true) +
                                                        " = " + (-r).to_string() + " coincide modulo Z (both 0)");
        }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::pair<std::string, ExactReal>> vals;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            ExactReal r = deltas[j] / deltas[i];
            vals.emplace_back(name(j, i, false), r);
            vals.emplace_back(name(j, i, true), -r);
        }
        for (std::size_t a = 0; a < vals.size(); ++a)
            for (std::size_t b = a + 1; b < vals.size(); ++b)
                if ((vals[a].second - vals[b].second).is_integer())
                    fail(ErrorCode::NonResonanceFailed, vals[a].first + " = " + vals[a].second.to_string() + " and " +
                                                            vals[b].first + " = " + vals[b].second.to_string() +
                                                            " coincide modulo Z");
    }
}

ComparisonReport ellipsoid_comparison(const OrbitSystem& system, std::int64_t k_max) {
    if (k_max < 1) fail(ErrorCode::InvalidArgument, "kmax must be positive");
    const std::int64_t m = uniform_half_dim(system);
    ComparisonReport rep;
    auto add = [&](AuditItem item) {
        if (!item.passed && rep.first_discrepancy.empty()) rep.first_discrepancy = item.name + ": " + item.detail;
        rep.items.push_back(std::move(item));
    };

    AuditItem count{"prime-count", true, false, std::to_string(system.size()) + " primes"};
    if (static_cast<std::int64_t>(system.size()) != m + 1) {
        count.passed = false;
        count.detail = std::to_string(system.size()) + " primes in dimension 2n-1 with n = " + std::to_string(m + 1);
    }
    add(count);

    AuditItem scaling{"scaling", true, false, "action equals mean index"};
    for (std::size_t i = 0; i < system.size() && scaling.passed; ++i)
        if (system.orbit(i).action != system.mean_index(i)) {
            scaling.passed = false;
            scaling.detail = system.orbit(i).name + " has action " + system.orbit(i).action.to_string() +
                             " but mean index " + system.mean_index(i).to_string();
        }
    add(scaling);

    std::vector<std::size_t> order(system.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return system.mean_index(a) < system.mean_index(b); });
    for (auto o : order) rep.deltas.push_back(system.mean_index(o));
    for (std::size_t j = 1; j < rep.deltas.size(); ++j)
        if (!(rep.deltas[j - 1] < rep.deltas[j])) {
            add({"increasing", false, false, "mean indices are not distinct"});
            return rep;
        }
    check_non_resonance(rep.deltas);
    const OrbitSystem model = ellipsoid_system(rep.deltas);

    AuditItem hmu{"mean-index", true, false, "hmu(x_j) = hmu(y_j)"};
    AuditItem idx{"indices", true, false, "mu+-(x_j^k) = mu+-(y_j^k) for k <= " + std::to_string(k_max)};
    AuditItem rot{"rotation-multisets", true, false, "first Krein rotation numbers agree modulo Z"};
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& x = system.orbit(order[j]);
        const auto& y = model.orbit(j);
        const std::string tag = x.name + " vs " + y.name;
        if (hmu.passed && system.mean_index(order[j]) != model.mean_index(j)) {
            hmu.passed = false;
            hmu.detail = tag + ": " + system.mean_index(order[j]).to_string() + " vs " + model.mean_index(j).to_string();
        }
        const IndexSequence sx(x.path), sy(y.path);
        for (std::int64_t k = 1; k <= k_max && idx.passed; ++k) {
            MuPair a = sx.mu_pm(k), b = sy.mu_pm(k);
            if (a.minus != b.minus || a.plus != b.plus) {
                idx.passed = false;
                idx.detail = tag + " at k=" + std::to_string(k) + ": [" + std::to_string(a.minus) + ", " +
                             std::to_string(a.plus) + "] vs [" + std::to_string(b.minus) + ", " + std::to_string(b.plus) +
                             "]";
            }
        }
        if (!rot.passed) continue;
        auto residues = [](const BlockPath& p, std::int64_t& other) {
            EigenSummary s = eigenvalue_summary(p, 1);
            std::vector<ExactReal> r;
            for (const auto& e : s.elliptic) r.push_back(e.rotation);
            std::sort(r.begin(), r.end());
            other = s.equal_one + s.equal_minus_one + s.hyperbolic_positive + s.hyperbolic_negative;
            return r;
        };
        std::int64_t ox = 0, oy = 0;
        auto rx = residues(x.path, ox), ry = residues(y.path, oy);
        if (rx != ry || ox != oy) {
            auto join = [](const std::vector<ExactReal>& v) {
                std::string s = "{";
                for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].to_string();
                return s + "}";
            };
            rot.passed = false;
            rot.detail = tag + ": " + join(rx) + " vs " + join(ry);
            if (ox != oy) rot.detail += " (non-elliptic eigenvalues differ)";
        }
    }
    add(hmu);
    add(idx);
    add(rot);
    return rep;
}

} // namespace reebkit
