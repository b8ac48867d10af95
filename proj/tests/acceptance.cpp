// Acceptance suite: one PASS/FAIL line per criterion, timed against its limit.

#include "reebkit/error.hpp"
#include "reebkit/indices.hpp"
#include "reebkit/orbits.hpp"
#include "reebkit/persistence.hpp"
#include "reebkit/recurrence.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace reebkit;
using oracle::Dec;

namespace {

// Collects the first few failures of a criterion.
class Failures {
public:
    template <class F>
    void expect(bool ok, F&& describe) {
        if (ok) return;
        ++count_;
        if (count_ <= 3) {
            if (!text_.empty()) text_ += "; ";
            text_ += describe();
        }
    }
    [[nodiscard]] std::string summary() const {
        if (count_ == 0) return {};
        return text_ + (count_ > 3 ? " (+" + std::to_string(count_ - 3) + " more)" : "");
    }

private:
    std::size_t count_ = 0;
    std::string text_;
};

std::string str(std::int64_t v) { return std::to_string(v); }
ExactReal er(std::int64_t v) { return ExactReal(static_cast<long>(v)); }

struct Ellipsoid {
    std::vector<ExactReal> deltas;
    OrbitSystem system;
};

// The ellipsoids shared by criteria 4, 5, 7 and 9.
const std::vector<Ellipsoid>& ellipsoids() {
    static const std::vector<Ellipsoid> list = [] {
        std::vector<Ellipsoid> out;
        gen::Rng rng(20240601);
        for (int i = 0; i < 20; ++i) {
            const auto n = static_cast<std::size_t>(2 + i % 3);
            auto deltas = gen::ellipsoid_deltas(rng, n);
            OrbitSystem sys = rescale_to_mean_index(ellipsoid_system(deltas));
            out.push_back({std::move(deltas), std::move(sys)});
        }
        return out;
    }();
    return list;
}

// ------------------------------------------------------------------ 1

std::string index_formulas() {
    Failures f;
    gen::Rng rng(1);
    std::vector<BlockPath> paths;
    for (int i = 0; i < 1000; ++i) paths.push_back(gen::path(rng));
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const BlockPath& p = paths[i];
        const BlockPath& q = paths[(i + 1) % paths.size()];
        const IndexSequence sp(p), sq(q), ss(direct_sum(p, q));
        const std::int64_t m = p.half_dim();
        const ExactReal hmu = mean_index(p);
        const BetaInvariants b1 = sp.beta(1);
        for (std::int64_t k = 1; k <= 100; ++k) {
            const MuPair mu = sp.mu_pm(k);
            const oracle::Index o = oracle::index(p, k);
            f.expect(mu.minus == o.mu_minus && mu.plus == o.mu_plus, [&] { return "mu mismatch path " + str(i) + " k=" + str(k); });
            const ExactReal hk = hmu * er(k);
            f.expect(hk - er(m) <= er(mu.minus) && mu.minus <= mu.plus && er(mu.plus) <= hk + er(m),
                     [&] { return "mean index bounds path " + str(i) + " k=" + str(k); });
            const MuPair mq = sq.mu_pm(k), ms = ss.mu_pm(k);
            f.expect(ms.minus == mu.minus + mq.minus && ms.plus == mu.plus + mq.plus,
                     [&] { return "additivity path " + str(i) + " k=" + str(k); });
            const BetaInvariants b = sp.beta(k);
            f.expect(std::abs(b.beta_plus() - b.beta_minus()) <= m, [&] { return "beta gap path " + str(i); });
            if (is_admissible(p, k))
                f.expect(b.beta_plus() == b1.beta_plus() && b.beta_minus() == b1.beta_minus(),
                         [&] { return "beta under admissible iteration path " + str(i) + " k=" + str(k); });
            if (k % 10 == 0)
                f.expect(mean_index(iterate(p, k)) == hk, [&] { return "homogeneity path " + str(i) + " k=" + str(k); });
        }
    }
    return f.summary();
}

// ------------------------------------------------------------------ 2

std::string golden_recurrence() {
    Failures f;
    const ExactReal golden = ExactReal::parse("-1/2+1/2*sqrt5");
    const BlockPath p(0, {rotation(golden)});
    const OrbitSystem sys({{"x", p, mean_index(p)}});
    RecurrenceParams params;
    params.event_count = 3;
    params.k_ceiling = 200;
    const DerivedParams derived = derive_parameters(sys, params);
    const oracle::SingleEvent want = oracle::first_certified_event(p, derived.epsilon, Dec("0.2"), 1, 200);
    f.expect(want.k > 0, [] { return std::string("oracle found no event"); });
    const auto events = find_recurrence_events(sys, params);
    const RecurrenceEvent& ev = events.front();
    f.expect(ev.k[0] == want.k && ev.d[0] == want.d, [&] {
        return "first event k=" + str(ev.k[0]) + " d=" + str(ev.d[0]) + ", oracle k=" + str(want.k) + " d=" + str(want.d);
    });
    const EventAudit audit = verify_event(sys, ev, params, 200);
    for (const char* item : {"IR1", "IR2", "IR3"}) {
        const AuditItem* a = audit.find(item);
        f.expect(a && a->passed, [&] { return std::string(item) + " failed"; });
    }
    f.expect(oracle::ir_holds(p, ev.k[0], ev.d[0], 1, Dec("0.2")), [] { return std::string("oracle rejects the event"); });
    for (std::int64_t k = 1; k <= 200; ++k) {
        const MuPair mu = mu_pm(p, k);
        const oracle::Index o = oracle::index(p, k);
        f.expect(mu.minus == o.mu_minus && mu.plus == o.mu_plus, [&] { return "index mismatch at k=" + str(k); });
    }
    std::vector<std::int64_t> brute;
    for (std::int64_t k = 1; brute.size() < 3 && k <= 1000; ++k)
        if (oracle::dist_to_int(oracle::dec(golden) * k) < Dec("0.05")) brute.push_back(k);
    const TorusReturns tr = torus_returns({golden}, ExactReal::ratio(1, 20), 1, 1000);
    f.expect(tr.ks.size() >= 3 && std::vector<std::int64_t>(tr.ks.begin(), tr.ks.begin() + 3) == brute,
             [] { return std::string("torus returns differ from brute force"); });
    return f.summary();
}

// ------------------------------------------------------------------ 3

std::string multi_orbit_event() {
    Failures f;
    const OrbitSystem sys = ellipsoid_system({ExactReal(1), ExactReal::sqrt(2)});
    const Dec eta("0.15");
    // oracle: least max k a among pairs with shared d satisfying IR1-IR3 and an action window narrower than eta
    std::int64_t k1 = 0, k2 = 0, d = 0;
    Dec best(1e9);
    for (std::int64_t a = 2; a <= 100; ++a)
        for (std::int64_t b = 2; b <= 100; ++b) {
            const Dec x = oracle::dec(sys.orbit(0).action) * a, y = oracle::dec(sys.orbit(1).action) * b;
            if (abs(x - y) >= eta) continue;
            const std::int64_t dd = oracle::nearest(oracle::dec(sys.mean_index(0)) * a);
            if (!oracle::ir_holds(sys.orbit(0).path, a, dd, 1, eta) || !oracle::ir_holds(sys.orbit(1).path, b, dd, 1, eta))
                continue;
            const Dec top = x > y ? x : y;
            if (top < best) {
                best = top;
                k1 = a;
                k2 = b;
                d = dd;
            }
        }
    f.expect(k1 > 0, [] { return std::string("oracle found no event"); });
    RecurrenceParams params;
    params.eta = ExactReal::parse("0.15");
    params.mode = SearchMode::Exhaustive;
    params.k_ceiling = 100;
    params.verify_ceiling = 100;
    const auto events = find_recurrence_events(sys, params);
    const RecurrenceEvent& ev = events.front();
    f.expect(ev.k == std::vector<std::int64_t>{k1, k2} && ev.d[0] == d, [&] {
        return "event k=(" + str(ev.k[0]) + "," + str(ev.k[1]) + ") d=" + str(ev.d[0]) + ", oracle (" + str(k1) + "," +
               str(k2) + ") d=" + str(d);
    });
    const Dec c = oracle::dec(ev.C);
    f.expect(best - eta < c && c < best, [] { return std::string("C outside (max k a - eta, max k a)"); });
    for (std::size_t o = 0; o < 2; ++o) {
        const Dec ratio = c / oracle::dec(sys.orbit(o).action);
        f.expect(oracle::dist_to_int(ratio) > Dec("1e-60"), [] { return std::string("C on the spectrum"); });
        for (std::int64_t j = 1; j <= 100; ++j) {
            const Dec ja = oracle::dec(sys.orbit(o).action) * j;
            if (j < ev.k[o]) f.expect(ja < c, [&] { return "earlier iterate above C"; });
            if (j > ev.k[o]) f.expect(ja > c + eta, [&] { return "later iterate inside the window"; });
            const oracle::Index ij = oracle::index(sys.orbit(o).path, j);
            if (j > ev.k[o]) f.expect(ij.mu_minus >= d + 3, [&] { return "IR2' fails at j=" + str(j); });
            if (j < ev.k[o]) f.expect(ij.mu_plus <= d - 2, [&] { return "IR3' fails at j=" + str(j); });
        }
    }
    for (const char* item : {"IR5", "IR2'", "IR3'"}) {
        const AuditItem* a = ev.audit.find(item);
        f.expect(a && a->passed, [&] { return std::string(item) + " not confirmed by verify_event"; });
    }
    return f.summary();
}

// ------------------------------------------------------------------ 4

std::string staircases() {
    Failures f;
    gen::Rng rng(4);
    for (std::size_t e = 0; e < ellipsoids().size(); ++e) {
        const auto& [deltas, sys] = ellipsoids()[e];
        const auto n = static_cast<std::int64_t>(deltas.size());
        const Staircase st = staircase_barcode(sys, 100);
        std::vector<ExactReal> raw;
        for (const auto& x : deltas) raw.push_back(x);
        const auto want = oracle::ellipsoid_iterates(raw, 100);
        const ExactReal scale = sys.orbit(0).action / deltas[0];
        f.expect(st.orbits.size() == want.size(), [&] { return "ellipsoid " + str(e) + ": orbit count"; });
        for (std::size_t i = 0; i < std::min(st.orbits.size(), want.size()); ++i) {
            f.expect(st.orbits[i].orbit == want[i].orbit && st.orbits[i].k == want[i].k,
                     [&] { return "ellipsoid " + str(e) + ": action order differs at " + str(i); });
            f.expect(st.orbits[i].degree == want[i].degree && want[i].degree == n + 1 + 2 * static_cast<std::int64_t>(i),
                     [&] { return "ellipsoid " + str(e) + ": orbit degree at " + str(i); });
            f.expect(st.barcode.bars[i].degree == n + 2 * static_cast<std::int64_t>(i),
                     [&] { return "ellipsoid " + str(e) + ": bar degree at " + str(i); });
            f.expect(abs(oracle::dec(st.orbits[i].action / scale) - want[i].action) < Dec("1e-70"),
                     [&] { return "ellipsoid " + str(e) + ": action at " + str(i); });
        }
        const ExactReal horizon = *st.barcode.horizon;
        const BarcodeIndex index(st.barcode);
        for (int s = 0; s < 10000 / static_cast<int>(ellipsoids().size()); ++s) {
            const ExactReal t = horizon * ExactReal::ratio(gen::uniform(rng, 1, 1000000), 1000000);
            f.expect(index.dim_at(t) == 1, [&] { return "ellipsoid " + str(e) + ": dim_at != 1"; });
        }
        BarcodeAuditOptions opt;
        opt.n = n;
        opt.chi = 1;
        opt.primes = {2, 3, 5};
        opt.vanishing = true;
        for (const auto& item : barcode_audit(st.barcode, opt).items)
            f.expect(item.passed, [&] { return "ellipsoid " + str(e) + ": " + item.name + " " + item.detail; });
    }
    return f.summary();
}

// ------------------------------------------------------------------ 5

std::string multiplicity() {
    Failures f;
    for (std::size_t e = 0; e < ellipsoids().size(); ++e) {
        const auto& [deltas, sys] = ellipsoids()[e];
        const auto n = static_cast<std::int64_t>(deltas.size());
        RecurrenceParams params;
        params.divisor = 2;
        params.k_ceiling = 200000;
        params.mode = SearchMode::Exhaustive;
        const RecurrenceEvent ev = find_recurrence_events(sys, params).front();
        const std::int64_t d = ev.d[0];
        std::int64_t ceiling = 0;
        for (auto k : ev.k) ceiling = std::max(ceiling, k + ev.ell0);
        f.expect(d % 2 == 0, [&] { return "ellipsoid " + str(e) + ": odd d"; });
        for (auto k : ev.k) f.expect(k % 2 == 0, [&] { return "ellipsoid " + str(e) + ": odd k"; });
        const MultiplicityReport rep = multiplicity_audit(sys, ev, ceiling);
        for (const auto& item : rep.items)
            f.expect(item.passed, [&] { return "ellipsoid " + str(e) + ": " + item.name + " " + item.detail; });
        f.expect(rep.interval_lo == d - n + 1 && rep.interval_hi == d + n - 1, [&] { return "ellipsoid " + str(e) + ": interval"; });
        std::vector<std::int64_t> slots;
        for (std::int64_t v = d - n + 1; v <= d + n - 1; ++v)
            if ((v - n - 1) % 2 == 0) slots.push_back(v);
        f.expect(rep.slots == slots && static_cast<std::int64_t>(slots.size()) == n,
                 [&] { return "ellipsoid " + str(e) + ": slots"; });
        // brute force: the zero-group iterates fill the slots with n distinct non-alternating primes
        std::map<std::int64_t, std::size_t> filler;
        for (std::size_t o = 0; o < sys.size(); ++o) {
            const BlockPath& p = sys.orbit(o).path;
            f.expect(oracle::negative_count(p, 1) % 2 == 0, [&] { return "ellipsoid " + str(e) + ": alternating prime"; });
            const std::int64_t mu = oracle::index(p, ev.k[o]).mu_minus;
            f.expect(filler.emplace(mu, o).second, [&] { return "ellipsoid " + str(e) + ": slot filled twice"; });
            // the closed form is strictly increasing in j, so the neighbours of the event bound each group
            const std::int64_t k = ev.k[o];
            if (k > 1)
                f.expect(oracle::ellipsoid_degree(deltas, o, k - 1) <= d - 2, [&] { return "ellipsoid " + str(e) + ": minus group"; });
            f.expect(oracle::ellipsoid_degree(deltas, o, k + 1) >= d + n + 1, [&] { return "ellipsoid " + str(e) + ": plus group"; });
            for (std::int64_t j = std::max<std::int64_t>(1, k - 3); j <= k + 3; ++j) {
                const oracle::Index ij = oracle::index(p, j);
                f.expect(ij.mu_minus == ij.mu_plus && ij.mu_minus == oracle::ellipsoid_degree(deltas, o, j),
                         [&] { return "ellipsoid " + str(e) + ": closed form disagrees at j=" + str(j); });
            }
        }
        std::vector<std::int64_t> filled;
        for (auto [mu, o] : filler) filled.push_back(mu);
        f.expect(filled == slots, [&] { return "ellipsoid " + str(e) + ": zero group misses the slots"; });
        f.expect(rep.distinct_primes == deltas.size(), [&] { return "ellipsoid " + str(e) + ": prime count"; });
    }
    return f.summary();
}

// ------------------------------------------------------------------ 6

std::string persistence_oracle() {
    Failures f;
    gen::Rng rng(6);
    const int fields[] = {0, 2, 3, 5};
    for (int i = 0; i < 200; ++i) {
        const int field = fields[i % 4];
        const FilteredComplex cx = gen::filtered_complex(rng, 40, field);
        const Barcode bc = barcode_from_filtered_complex(cx);
        const BarcodeIndex index(bc);
        ExactReal top(1);
        for (const auto& g : cx.generators)
            if (top < g.filtration) top = g.filtration;
        std::vector<ExactReal> pts = sample_points(bc, top + ExactReal(1), 150);
        while (pts.size() < 200) pts.push_back(top * ExactReal::ratio(gen::uniform(rng, 1, 1200), 1000));
        // homology below t depends only on which generators are included
        std::map<std::size_t, std::map<std::int64_t, std::size_t>> cache;
        for (const auto& t : pts) {
            std::size_t included = 0;
            for (const auto& g : cx.generators) included += g.filtration < t ? 1 : 0;
            auto it = cache.find(included);
            if (it == cache.end()) {
                std::map<std::int64_t, std::size_t> ranks;
                for (std::int64_t m = 0; m <= 3; ++m) ranks[m] = oracle::homology_rank(cx, t, m);
                it = cache.emplace(included, ranks).first;
            }
            for (auto [m, r] : it->second)
                f.expect(index.dim_at(t, m) == r, [&] {
                    return "complex " + str(i) + " char " + str(field) + " t=" + t.to_string() + " deg " + str(m);
                });
        }
    }
    return f.summary();
}

// ------------------------------------------------------------------ 7

std::string beg_end() {
    Failures f;
    gen::Rng rng(7);
    std::size_t controls = 0;
    for (std::size_t e = 0; e < ellipsoids().size(); ++e) {
        const Staircase st = staircase_barcode(ellipsoids()[e].system, 60);
        const BegEnd be = beg_end_assignment(st.barcode, st.homology);
        for (const auto& item : check_beg_end(st.barcode, be))
            f.expect(item.passed, [&] { return "ellipsoid " + str(e) + ": " + item.name + " " + item.detail; });
        for (std::size_t i = 0; i < st.barcode.bars.size(); ++i) {
            // consecutive orbits by action: beg at A_i, en at A_{i+1}
            f.expect(be.orbits[be.beg[i]].action == st.barcode.bars[i].birth && be.en[i] &&
                         be.orbits[*be.en[i]].action == *st.barcode.bars[i].death,
                     [&] { return "ellipsoid " + str(e) + ": non-adjacent beg/en"; });
        }
        auto mutate = [&](auto&& change) {
            auto homology = st.homology;
            change(homology);
            ++controls;
            try {
                beg_end_assignment(st.barcode, homology);
                f.expect(false, [&] { return "ellipsoid " + str(e) + ": mutation accepted"; });
            } catch (const Error& err) {
                f.expect(err.code() == ErrorCode::ZetaMismatch, [&] { return "ellipsoid " + str(e) + ": wrong error"; });
            }
        };
        const auto pick = [&] { return static_cast<std::size_t>(gen::uniform(rng, 1, 58)); };
        mutate([&](auto& h) {
            for (auto& [m, d] : h[pick()].dims) d *= 2;
        });
        mutate([&](auto& h) { h.erase(h.begin() + static_cast<std::ptrdiff_t>(pick())); });
        mutate([&](auto& h) {
            auto& x = h[pick()];
            std::map<std::int64_t, std::int64_t> shifted;
            for (auto [m, d] : x.dims) shifted[m + 2] = d;
            x.dims = shifted;
        });
        mutate([&](auto& h) {
            auto& x = h[pick()];
            x.action = x.action + ExactReal::ratio(1, 1000);
        });
    }
    f.expect(controls == 4 * ellipsoids().size(), [] { return std::string("controls skipped"); });
    return f.summary();
}

// ------------------------------------------------------------------ 8

std::string chieq_and_degrees() {
    Failures f;
    gen::Rng rng(8);
    std::size_t records = 0, checks = 0;
    while (records < 500) {
        gen::PathOptions opt;
        opt.degenerate_blocks = records % 2 == 1;
        const BlockPath p = gen::path(rng, opt);
        const bool nondeg = is_nondegenerate(p);
        if (!nondeg && is_totally_degenerate(p)) continue;
        ClosedOrbitRecord x;
        try {
            x = make_record("x", p, ExactReal(1), 1);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ClassificationUndefined) continue;
            throw;
        }
        ++records;
        const BlockPath psi = oracle::strip_degenerate(p);
        const std::int64_t deg = nondeg ? oracle::index(p, 1).mu_minus : 5;
        for (std::int64_t k = 1; k <= 99; k += 2) {
            if (!is_admissible(p, k)) continue;
            ++checks;
            const std::int64_t predicted = degree_shift_predict(p, deg, k);
            const std::int64_t want = deg + oracle::index(psi, k).mu_minus - oracle::index(psi, 1).mu_minus;
            f.expect(predicted == want, [&] { return "degree shift record " + str(records) + " k=" + str(k); });
            if (nondeg) {
                f.expect(want == oracle::index(p, k).mu_minus, [&] { return "oracle D2 disagrees with mu"; });
                const ClosedOrbitRecord xk = make_record("x", p, ExactReal(1), k);
                const std::int64_t sign = oracle::index(p, k).mu_minus % 2 == 0 ? 1 : -1;
                f.expect(chieq(xk) == chieq(x) && chieq(xk) == sign,
                         [&] { return "chieq record " + str(records) + " k=" + str(k); });
            }
        }
    }
    f.expect(checks > 5000, [&] { return "only " + str(static_cast<std::int64_t>(checks)) + " checks"; });
    return f.summary();
}

// ------------------------------------------------------------------ 9

std::string comparison() {
    Failures f;
    for (std::size_t e = 0; e < ellipsoids().size(); ++e) {
        const ComparisonReport rep = ellipsoid_comparison(ellipsoids()[e].system, 200);
        f.expect(rep.passed() && rep.first_discrepancy.empty(),
                 [&] { return "ellipsoid " + str(e) + ": " + rep.first_discrepancy; });
    }
    const OrbitSystem resonant({{"x1", BlockPath(0, {hyperbolic(1, true)}), ExactReal(1)},
                                {"x2", BlockPath(0, {hyperbolic(2, false)}), ExactReal(2)}});
    try {
        ellipsoid_comparison(resonant, 50);
        f.expect(false, [] { return std::string("delta = (1,2) accepted"); });
    } catch (const Error& err) {
        const std::string msg = err.what();
        f.expect(err.code() == ErrorCode::NonResonanceFailed, [] { return std::string("wrong error code"); });
        f.expect(msg.find("delta_2/delta_1") != std::string::npos && msg.find("coincide modulo Z") != std::string::npos,
                 [&] { return "diagnostic: " + msg; });
    }
    return f.summary();
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<std::string()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "index formula suite", 5, index_formulas},
        {2, "golden-rotation recurrence", 1, golden_recurrence},
        {3, "multi-orbit event with action matching", 2, multi_orbit_event},
        {4, "staircase barcodes of random ellipsoids", 10, staircases},
        {5, "multiplicity audit", 10, multiplicity},
        {6, "persistence oracle", 10, persistence_oracle},
        {7, "beg/end contract", 30, beg_end},
        {8, "chieq invariance and degree shifts", 30, chieq_and_degrees},
        {9, "ellipsoid comparison", 30, comparison},
    };
    (void)ellipsoids(); // generation is shared setup, not part of any timing
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string problem;
        try {
            problem = c.run();
        } catch (const std::exception& e) {
            problem = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (problem.empty() && secs > c.limit_s) problem = "over the time limit";
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2fs (limit %.0fs)", secs, c.limit_s);
        std::cout << (problem.empty() ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " " << timing;
        if (!problem.empty()) std::cout << " -- " << problem;
        std::cout << "\n";
        failed += problem.empty() ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
