#include "reebkit/recurrence.hpp"

#include "reebkit/error.hpp"
#include "reebkit/indices.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

namespace reebkit {

// ---------------------------------------------------------------- clusters

ClusterPartition cluster_orbits(const std::vector<OrbitEntry>& orbits) {
    std::vector<ExactReal> hmu;
    hmu.reserve(orbits.size());
    for (const auto& o : orbits) {
        ExactReal h = mean_index(o.path);
        if (h.sign() <= 0)
            fail(ErrorCode::NonpositiveMeanIndex, "orbit '" + o.name + "' has mean index " + h.to_string());
        hmu.push_back(std::move(h));
    }
    // a/h == a'/h'  <=>  a h' == a' h
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        bool placed = false;
        for (auto& g : groups) {
            std::size_t r = g.front();
            if (orbits[i].action * hmu[r] == orbits[r].action * hmu[i]) {
                g.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({i});
    }
    std::stable_sort(groups.begin(), groups.end(), [&](const auto& x, const auto& y) {
        std::size_t a = x.front(), b = y.front();
        return orbits[a].action * hmu[b] < orbits[b].action * hmu[a];
    });
    ClusterPartition p;
    p.labels.resize(orbits.size());
    for (std::size_t c = 0; c < groups.size(); ++c)
        for (std::size_t j = 0; j < groups[c].size(); ++j) p.labels[groups[c][j]] = {c + 1, j + 1};
    p.clusters = std::move(groups);
    return p;
}

OrbitSystem::OrbitSystem(std::vector<OrbitEntry> orbits) : orbits_(std::move(orbits)) {
    if (orbits_.empty()) fail(ErrorCode::InvalidArgument, "orbit system is empty");
    for (const auto& o : orbits_) {
        if (o.action.sign() <= 0)
            fail(ErrorCode::InvalidArgument, "orbit '" + o.name + "' has nonpositive action");
        mean_indices_.push_back(reebkit::mean_index(o.path));
    }
    partition_ = cluster_orbits(orbits_);
}

ExactReal OrbitSystem::cluster_rho(std::size_t i) const {
    std::size_t o = partition_.clusters.at(i).front();
    return mean_indices_[o] / orbits_[o].action;
}

bool OrbitSystem::on_spectrum(const ExactReal& t) const {
    if (t.sign() <= 0) return false;
    for (const auto& o : orbits_) {
        ExactReal q = t / o.action;
        if (q.is_integer()) return true;
    }
    return false;
}

// -------------------------------------------------------------- parameters

namespace {

std::int64_t elliptic_count(const BlockPath& p) {
    std::int64_t n = 0;
    for (const auto& b : p.blocks())
        if (std::holds_alternative<Rotation>(b)) ++n;
    return n;
}

const ExactReal& min_of(const ExactReal& a, const ExactReal& b) { return b < a ? b : a; }

} // namespace

DerivedParams derive_parameters(const OrbitSystem& system, const RecurrenceParams& params) {
    if (params.ell0 < 1) fail(ErrorCode::InvalidArgument, "ell0 must be positive");
    if (params.divisor < 1) fail(ErrorCode::InvalidArgument, "divisor must be positive");
    if (params.event_count < 1) fail(ErrorCode::InvalidArgument, "event count must be positive");
    if (params.k_ceiling < 1) fail(ErrorCode::InvalidArgument, "k ceiling must be positive");
    if (params.eta.sign() <= 0) fail(ErrorCode::InvalidArgument, "eta must be positive");
    const ExactReal half = ExactReal::ratio(1, 2);
    if (params.eta >= half) fail(ErrorCode::ParamTooTight, "eta must be below 1/2");

    DerivedParams out;
    out.min_action = system.orbit(0).action;
    for (const auto& o : system.orbits()) out.min_action = min_of(out.min_action, o.action);
    if (params.eta >= out.min_action) fail(ErrorCode::ParamTooTight, "eta must be below the smallest action");

    for (const auto& o : system.orbits()) {
        out.max_elliptic = std::max(out.max_elliptic, elliptic_count(o.path));
        out.root_lcm = std::lcm(out.root_lcm, root_of_unity_lcm(o.path));
        for (const auto& b : o.path.blocks()) {
            const auto* r = std::get_if<Rotation>(&b);
            if (!r) continue;
            for (std::int64_t l = 1; l <= params.ell0; ++l) {
                ExactReal v = r->lambda * ExactReal(static_cast<long>(l));
                if (v.is_integer()) continue;
                ExactReal dist = v.dist_to_int();
                out.eps0 = out.eps0 ? min_of(*out.eps0, dist) : dist;
            }
        }
    }
    out.max_rho = system.cluster_rho(0);
    for (std::size_t i = 1; i < system.partition().clusters.size(); ++i)
        if (system.cluster_rho(i) > out.max_rho) out.max_rho = system.cluster_rho(i);

    ExactReal eps_bound = out.eps0 ? *out.eps0 : half;
    ExactReal eta_share = out.max_elliptic > 0 ? params.eta / ExactReal(static_cast<long>(2 * out.max_elliptic))
                                               : params.eta;
    auto eps_ok = [&](const ExactReal& e) {
        return e.sign() > 0 && e <= eps_bound &&
               ExactReal(static_cast<long>(2 * out.max_elliptic)) * e < params.eta;
    };
    ExactReal sigma_cap = min_of(min_of(out.min_action, ExactReal(1) / (ExactReal(8) * out.max_rho)), params.eta * half);
    auto sigma_ok = [&](const ExactReal& s) {
        return s.sign() > 0 && s < out.min_action && s * out.max_rho < ExactReal::ratio(1, 8) &&
               ExactReal(2) * s < params.eta;
    };

    out.epsilon = params.epsilon ? *params.epsilon : min_of(eps_bound, eta_share) * half;
    out.sigma = params.sigma ? *params.sigma : sigma_cap * half;
    for (int tries = 0; !eps_ok(out.epsilon); ++tries) {
        if (tries > 64 || out.epsilon.sign() <= 0) fail(ErrorCode::ParamTooTight, "epsilon cannot satisfy its bounds");
        out.epsilon *= half;
    }
    for (int tries = 0; !sigma_ok(out.sigma); ++tries) {
        if (tries > 64 || out.sigma.sign() <= 0) fail(ErrorCode::ParamTooTight, "sigma cannot satisfy its bounds");
        out.sigma *= half;
    }
    return out;
}

// ------------------------------------------------------------ torus search

TorusReturns torus_returns(const std::vector<ExactReal>& lambdas, const ExactReal& eps, std::int64_t divisor,
                           std::int64_t k_ceiling) {
    if (eps.sign() <= 0) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (divisor < 1) fail(ErrorCode::InvalidArgument, "divisor must be positive");
    std::vector<double> ld;
    for (const auto& l : lambdas) ld.push_back(l.to_double());
    const double ed = eps.to_double();
    TorusReturns out;
    std::int64_t prev = 0;
    for (std::int64_t k = divisor; k <= k_ceiling; k += divisor) {
        bool ok = true;
        for (std::size_t q = 0; q < lambdas.size() && ok; ++q) {
            double x = ld[q] * static_cast<double>(k);
            double dist = std::fabs(x - std::nearbyint(x));
            double slack = 1e-9 * (1.0 + std::fabs(x));
            if (dist > ed + slack) ok = false;
            else if (dist >= ed - slack) ok = (lambdas[q] * ExactReal(static_cast<long>(k))).dist_to_int() < eps;
        }
        if (!ok) continue;
        out.max_gap = std::max(out.max_gap, k - prev);
        prev = k;
        out.ks.push_back(k);
    }
    if (out.ks.empty())
        fail(ErrorCode::EmptyWindow, "no torus return up to " + std::to_string(k_ceiling));
    return out;
}

MinkowskiResult minkowski_solutions(const std::vector<LinearForm>& forms, const std::vector<ExactReal>& deltas,
                                    std::size_t variables, std::int64_t divisor, std::size_t count,
                                    std::int64_t box_ceiling, const std::vector<std::size_t>& positive) {
    if (forms.size() != deltas.size()) fail(ErrorCode::InvalidArgument, "one bound per form is required");
    if (forms.size() >= variables) fail(ErrorCode::InvalidArgument, "need fewer forms than variables");
    if (divisor < 1) fail(ErrorCode::InvalidArgument, "divisor must be positive");
    for (const auto& f : forms)
        if (f.coeffs.size() != variables) fail(ErrorCode::InvalidArgument, "form arity mismatch");
    for (auto p : positive)
        if (p >= variables) fail(ErrorCode::InvalidArgument, "positive coordinate out of range");

    std::vector<std::vector<double>> cd;
    std::vector<double> scale;
    for (const auto& f : forms) {
        std::vector<double> row;
        double s = 0;
        for (const auto& c : f.coeffs) {
            row.push_back(c.to_double());
            s += std::fabs(row.back());
        }
        cd.push_back(std::move(row));
        scale.push_back(s);
    }
    std::vector<double> dd;
    for (const auto& d : deltas) dd.push_back(d.to_double());

    MinkowskiResult out;
    std::int64_t prev_norm = 0;
    std::vector<std::int64_t> v(variables);
    for (std::int64_t r = 1; r <= box_ceiling && out.solutions.size() < count; ++r) {
        // enumerate the shell max|v_i| = r of the lattice (divisor*Z)^n in lexicographic order
        std::fill(v.begin(), v.end(), -r);
        while (true) {
            std::int64_t norm = 0;
            for (auto x : v) norm = std::max(norm, std::abs(x));
            std::size_t first = 0;
            while (first < variables && v[first] == 0) ++first;
            bool canonical = norm == r && first < variables && v[first] > 0;
            if (canonical) {
                for (auto p : positive)
                    if (v[p] <= 0) canonical = false;
            }
            if (canonical) {
                bool ok = true;
                for (std::size_t s = 0; s < forms.size() && ok; ++s) {
                    double f = 0;
                    for (std::size_t i = 0; i < variables; ++i) f += cd[s][i] * static_cast<double>(v[i] * divisor);
                    double slack = 1e-9 * (1.0 + scale[s] * static_cast<double>(r * divisor));
                    double af = std::fabs(f);
                    if (af > dd[s] + slack) ok = false;
                    else if (af >= dd[s] - slack) {
                        ExactReal e;
                        for (std::size_t i = 0; i < variables; ++i)
                            e += forms[s].coeffs[i] * ExactReal(static_cast<long>(v[i] * divisor));
                        ok = e.abs() < deltas[s];
                    }
                }
                if (ok) {
                    std::vector<std::int64_t> sol(variables);
                    for (std::size_t i = 0; i < variables; ++i) sol[i] = v[i] * divisor;
                    out.max_gap = std::max(out.max_gap, (r - prev_norm) * divisor);
                    prev_norm = r;
                    out.solutions.push_back(std::move(sol));
                    if (out.solutions.size() >= count) break;
                }
            }
            std::size_t i = variables;
            while (i > 0) {
                --i;
                if (v[i] < r) {
                    ++v[i];
                    break;
                }
                v[i] = -r;
                if (i == 0) {
                    i = variables + 1;
                    break;
                }
            }
            if (i == variables + 1) break;
        }
    }
    if (out.solutions.empty())
        fail(ErrorCode::EmptyWindow, "no solution within box " + std::to_string(box_ceiling));
    return out;
}

// ------------------------------------------------------------------ events

ExactReal choose_threshold(const OrbitSystem& system, const std::vector<std::int64_t>& k, const ExactReal& eta) {
    if (k.size() != system.size()) fail(ErrorCode::InvalidArgument, "one iterate per orbit is required");
    std::optional<ExactReal> lo, hi;
    for (std::size_t o = 0; o < k.size(); ++o) {
        ExactReal ka = system.orbit(o).action * ExactReal(static_cast<long>(k[o]));
        if (!lo || ka > *lo) lo = ka;
        if (!hi || ka < *hi) hi = ka;
    }
    *lo -= eta;
    if (*lo >= *hi) fail(ErrorCode::EmptyWindow, "actions do not fit in a window of width eta");
    ExactReal width = *hi - *lo;
    ExactReal step = width / ExactReal(16);
    for (int j = 4; j < 256; ++j) {
        ExactReal c = *hi - step;
        if (!system.on_spectrum(c)) return c;
        step /= ExactReal(2);
    }
    fail(ErrorCode::EmptyWindow, "no off-spectrum threshold found");
}

namespace {

struct OrbitContext {
    IndexSequence seq;
    IndexSequence psi;
    ExactReal hmu;
    ExactReal action;
    double hmu_d;
    double action_d;
    bool dc;
    bool strongly_nondegenerate;
    std::size_t cluster;
};

struct Context {
    const OrbitSystem& system;
    std::vector<OrbitContext> orbits;
    bool all_dc = true;

    explicit Context(const OrbitSystem& s) : system(s) {
        for (std::size_t o = 0; o < s.size(); ++o) {
            const auto& entry = s.orbit(o);
            BlockPath psi = nondegenerate_part(entry.path);
            bool dc = is_dynamically_convex(entry.path);
            all_dc = all_dc && dc;
            bool strong = psi.blocks().size() == entry.path.blocks().size() && root_of_unity_degrees(entry.path).empty();
            orbits.push_back(OrbitContext{IndexSequence(entry.path), IndexSequence(psi), s.mean_index(o), entry.action,
                                          s.mean_index(o).to_double(), entry.action.to_double(), dc, strong,
                                          s.cluster_of(o)});
        }
    }
};

class ItemBuilder {
public:
    explicit ItemBuilder(std::string name, bool advisory = false) {
        item_.name = std::move(name);
        item_.advisory = advisory;
    }
    void check(bool ok, const std::function<std::string()>& detail) {
        if (!ok && item_.passed) {
            item_.passed = false;
            item_.detail = detail();
        }
    }
    [[nodiscard]] bool failed() const { return !item_.passed; }
    AuditItem done() {
        if (item_.passed && item_.detail.empty()) item_.detail = "ok";
        return item_;
    }

private:
    AuditItem item_;
};

std::string orbit_tag(const OrbitSystem& s, std::size_t o) {
    const auto& l = s.partition().labels[o];
    return "orbit '" + s.orbit(o).name + "' (" + std::to_string(l.cluster) + "," + std::to_string(l.member) + ")";
}

// IR1-IR4 plus divisibility; cheap, only touches iterates within ell0 of k.
void local_checks(const Context& ctx, const RecurrenceEvent& ev, std::vector<AuditItem>& items) {
    const auto& sys = ctx.system;
    ItemBuilder ir1("IR1"), ir2("IR2"), ir3("IR3"), ir4("IR4");
    for (std::size_t o = 0; o < sys.size(); ++o) {
        const auto& oc = ctx.orbits[o];
        const std::int64_t k = ev.k[o];
        const std::int64_t d = ev.d[oc.cluster];
        const std::string tag = orbit_tag(sys, o);
        ExactReal hk = oc.hmu * ExactReal(static_cast<long>(k));
        try {
            std::int64_t nearest = nearest_int(hk);
            ir1.check(nearest == d, [&] { return tag + ": [hmu k] = " + std::to_string(nearest) + " != d = " + std::to_string(d); });
        } catch (const Error& e) {
            if (e.code() != ErrorCode::HalfIntegerAmbiguity) throw;
            ir1.check(false, [&] { return tag + ": hmu k = " + hk.to_string() + " is a half-integer"; });
        }
        ir1.check((hk - ExactReal(static_cast<long>(d))).abs() < ev.eta,
                  [&] { return tag + ": |hmu k - d| >= eta"; });
        for (int part = 0; part < 2; ++part) {
            const IndexSequence& seq = part == 0 ? oc.seq : oc.psi;
            ItemBuilder& b1 = part == 0 ? ir1 : ir4;
            ItemBuilder& b2 = part == 0 ? ir2 : ir4;
            ItemBuilder& b3 = part == 0 ? ir3 : ir4;
            const std::string which = part == 0 ? tag : tag + " nondegenerate part";
            const std::int64_t m = seq.half_dim();
            MuPair mk = seq.mu_pm(k);
            b1.check(d - m <= mk.minus && mk.plus <= d + m, [&] {
                return which + ": mu at k=" + std::to_string(k) + " is [" + std::to_string(mk.minus) + "," +
                       std::to_string(mk.plus) + "], outside [d-m, d+m]";
            });
            for (std::int64_t l = 1; l <= ev.ell0; ++l) {
                MuPair ml = seq.mu_pm(l);
                MuPair up = seq.mu_pm(k + l);
                b2.check(up.minus == d + ml.minus && up.plus == d + ml.plus, [&] {
                    return which + ": mu(k+" + std::to_string(l) + ") = [" + std::to_string(up.minus) + "," +
                           std::to_string(up.plus) + "] != d + mu(" + std::to_string(l) + ")";
                });
                if (k <= ev.ell0) {
                    b3.check(false, [&] { return which + ": k=" + std::to_string(k) + " does not exceed ell0"; });
                    continue;
                }
                BetaInvariants bl = seq.beta(l);
                MuPair down = seq.mu_pm(k - l);
                std::int64_t want = d - ml.minus + (bl.beta_plus() - bl.beta_minus());
                b3.check(down.plus == want, [&] {
                    return which + ": mu+(k-" + std::to_string(l) + ") = " + std::to_string(down.plus) + " != " +
                           std::to_string(want);
                });
            }
        }
    }
    items.push_back(ir1.done());
    items.push_back(ir2.done());
    items.push_back(ir3.done());
    items.push_back(ir4.done());
    if (ev.divisor > 1) {
        ItemBuilder div("DIV");
        for (std::size_t o = 0; o < sys.size(); ++o)
            div.check(ev.k[o] % ev.divisor == 0, [&] { return orbit_tag(sys, o) + ": k not divisible by N"; });
        for (std::size_t c = 0; c < ev.d.size(); ++c)
            div.check(ev.d[c] % ev.divisor == 0, [&] { return "cluster " + std::to_string(c + 1) + ": d not divisible by N"; });
        items.push_back(div.done());
    }
}

void global_checks(const Context& ctx, const RecurrenceEvent& ev, std::int64_t ceiling, std::vector<AuditItem>& items) {
    const auto& sys = ctx.system;
    ItemBuilder ir5("IR5");
    ir5.check(!sys.on_spectrum(ev.C), [&] { return "C = " + ev.C.to_string() + " lies on the spectrum"; });
    const ExactReal upper = ev.C + ev.eta;
    for (std::size_t o = 0; o < sys.size(); ++o) {
        const auto& oc = ctx.orbits[o];
        const std::int64_t k = ev.k[o];
        ExactReal ka = oc.action * ExactReal(static_cast<long>(k));
        const std::string tag = orbit_tag(sys, o);
        ir5.check(ev.C < ka && ka < upper, [&] { return tag + ": k a not in (C, C + eta)"; });
        // monotone in k, so the neighbours decide every k <= ceiling
        if (k > 1)
            ir5.check(ka - oc.action < ev.C, [&] { return tag + ": (k-1) a >= C"; });
        ir5.check(ka + oc.action > upper, [&] { return tag + ": (k+1) a <= C + eta"; });
    }
    items.push_back(ir5.done());

    if (!ctx.all_dc) return;
    std::int64_t max_m = 0;
    for (const auto& oc : ctx.orbits) max_m = std::max(max_m, oc.seq.half_dim());
    const bool advisory = 2 * ev.ell0 < 3 * (max_m + 1);
    ItemBuilder up("IR2'", advisory), down("IR3'", advisory);
    for (std::size_t o = 0; o < sys.size(); ++o) {
        const auto& oc = ctx.orbits[o];
        const std::int64_t k = ev.k[o];
        const std::int64_t d = ev.d[oc.cluster];
        const std::int64_t m = oc.seq.half_dim();
        const std::string tag = orbit_tag(sys, o);
        for (std::int64_t j = 1; j <= ceiling; ++j) {
            if (j == k) continue;
            MuPair mj = oc.seq.mu_pm(j);
            if (j > k) {
                up.check(mj.minus >= d + m + 2, [&] {
                    return tag + ": mu-(" + std::to_string(j) + ") = " + std::to_string(mj.minus) + " < d + m + 2";
                });
            } else {
                down.check(mj.plus <= d - 2, [&] {
                    return tag + ": mu+(" + std::to_string(j) + ") = " + std::to_string(mj.plus) + " > d - 2";
                });
                if (oc.strongly_nondegenerate)
                    down.check(mj.plus <= d - m - 2, [&] {
                        return tag + ": mu(" + std::to_string(j) + ") = " + std::to_string(mj.plus) + " > d - m - 2";
                    });
            }
            if (up.failed() && down.failed()) break;
        }
    }
    items.push_back(up.done());
    items.push_back(down.done());
}

std::int64_t effective_ceiling(const RecurrenceEvent& ev, std::int64_t requested) {
    if (requested > 0) return requested;
    std::int64_t mk = 0;
    for (auto k : ev.k) mk = std::max(mk, k);
    return 2 * mk + ev.ell0;
}

bool is_certified(const Context& ctx, const RecurrenceEvent& ev, std::size_t o11) {
    const auto& sys = ctx.system;
    ExactReal base = sys.orbit(o11).action * ExactReal(static_cast<long>(ev.k[o11]));
    for (std::size_t o = 0; o < sys.size(); ++o) {
        ExactReal kk(static_cast<long>(ev.k[o]));
        for (const auto& b : sys.orbit(o).path.blocks())
            if (const auto* r = std::get_if<Rotation>(&b))
                if (!((r->lambda * kk).dist_to_int() < ev.epsilon)) return false;
        if (o != o11 && !((base - sys.orbit(o).action * kk).abs() < ev.sigma)) return false;
    }
    return true;
}

// Candidate events whose first orbit iterate lies in [k_lo, k_hi]; local checks only.
std::vector<RecurrenceEvent> scan_range(const Context& ctx, const RecurrenceEvent& proto, std::size_t o11,
                                        std::int64_t k_lo, std::int64_t k_hi, bool certified_only) {
    const auto& sys = ctx.system;
    const std::size_t n = sys.size();
    const std::int64_t N = proto.divisor;
    const double eta_d = proto.eta.to_double();
    const std::size_t nclusters = sys.partition().clusters.size();
    std::vector<RecurrenceEvent> found;
    std::vector<std::vector<std::int64_t>> cand(n);
    for (std::int64_t k11 = k_lo; k11 <= k_hi; k11 += N) {
        if (k11 <= proto.ell0) continue;
        const double x = static_cast<double>(k11) * ctx.orbits[o11].action_d;
        bool any_empty = false;
        for (std::size_t o = 0; o < n && !any_empty; ++o) {
            cand[o].clear();
            if (o == o11) {
                cand[o].push_back(k11);
                continue;
            }
            const double a = ctx.orbits[o].action_d;
            auto lo = static_cast<std::int64_t>(std::ceil((x - eta_d) / a - 1e-9));
            auto hi = static_cast<std::int64_t>(std::floor((x + eta_d) / a + 1e-9));
            for (std::int64_t k = std::max<std::int64_t>(lo, 1); k <= hi; ++k)
                if (k % N == 0 && k > proto.ell0) cand[o].push_back(k);
            any_empty = cand[o].empty();
        }
        if (any_empty) continue;
        // cheap rejection on the nearest-integer condition
        bool near = true;
        for (std::size_t o = 0; o < n && near; ++o) {
            bool some = false;
            for (auto k : cand[o]) {
                double h = ctx.orbits[o].hmu_d * static_cast<double>(k);
                if (std::fabs(h - std::nearbyint(h)) < eta_d + 1e-9) some = true;
            }
            near = some;
        }
        if (!near) continue;

        std::vector<std::size_t> pick(n, 0);
        while (true) {
            RecurrenceEvent ev = proto;
            ev.k.resize(n);
            for (std::size_t o = 0; o < n; ++o) ev.k[o] = cand[o][pick[o]];
            bool ok = true;
            std::vector<std::optional<std::int64_t>> dvals(nclusters);
            for (std::size_t o = 0; o < n && ok; ++o) {
                ExactReal hk = ctx.orbits[o].hmu * ExactReal(static_cast<long>(ev.k[o]));
                std::int64_t d;
                try {
                    d = nearest_int(hk);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::HalfIntegerAmbiguity) throw;
                    ok = false;
                    break;
                }
                if (!((hk - ExactReal(static_cast<long>(d))).abs() < proto.eta) || d % N != 0) ok = false;
                auto& slot = dvals[ctx.orbits[o].cluster];
                if (slot && *slot != d) ok = false;
                slot = d;
            }
            if (ok) {
                ev.d.clear();
                for (auto& v : dvals) ev.d.push_back(*v);
                try {
                    ev.C = choose_threshold(sys, ev.k, proto.eta);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::EmptyWindow) throw;
                    ok = false;
                }
            }
            if (ok && certified_only) ok = is_certified(ctx, ev, o11);
            if (ok) {
                std::vector<AuditItem> items;
                local_checks(ctx, ev, items);
                ok = all_passed(items);
            }
            if (ok) found.push_back(std::move(ev));
            std::size_t o = 0;
            while (o < n && ++pick[o] == cand[o].size()) pick[o++] = 0;
            if (o == n) break;
        }
    }
    return found;
}

bool strictly_after(const RecurrenceEvent& a, const RecurrenceEvent& prev) {
    if (!(a.C > prev.C)) return false;
    for (std::size_t i = 0; i < a.k.size(); ++i)
        if (a.k[i] <= prev.k[i]) return false;
    for (std::size_t i = 0; i < a.d.size(); ++i)
        if (a.d[i] <= prev.d[i]) return false;
    return true;
}

} // namespace

bool all_passed(const std::vector<AuditItem>& items) {
    return std::all_of(items.begin(), items.end(), [](const AuditItem& i) { return i.passed || i.advisory; });
}

bool EventAudit::passed() const { return all_passed(items); }

const AuditItem* EventAudit::find(const std::string& name) const {
    for (const auto& i : items)
        if (i.name == name) return &i;
    return nullptr;
}

const AuditItem* EventAudit::first_failure() const {
    for (const auto& i : items)
        if (!i.passed && !i.advisory) return &i;
    return nullptr;
}

EventAudit verify_event(const OrbitSystem& system, const RecurrenceEvent& event, const RecurrenceParams& params,
                        std::int64_t k_ceiling) {
    (void)params;
    EventAudit audit;
    if (event.k.size() != system.size() || event.d.size() != system.partition().clusters.size()) {
        audit.items.push_back({"SHAPE", false, false, "event does not match the system's orbits and clusters"});
        return audit;
    }
    for (auto k : event.k)
        if (k < 1) {
            audit.items.push_back({"SHAPE", false, false, "iterates must be positive"});
            return audit;
        }
    Context ctx(system);
    local_checks(ctx, event, audit.items);
    global_checks(ctx, event, effective_ceiling(event, k_ceiling), audit.items);
    return audit;
}

std::vector<RecurrenceEvent> find_recurrence_events(const OrbitSystem& system, const RecurrenceParams& params) {
    DerivedParams derived = derive_parameters(system, params);
    Context ctx(system);
    const std::size_t o11 = system.partition().clusters.front().front();

    RecurrenceEvent proto;
    proto.eta = params.eta;
    proto.ell0 = params.ell0;
    proto.divisor = params.divisor;
    proto.epsilon = derived.epsilon;
    proto.sigma = derived.sigma;

    const bool certified_only = params.mode == SearchMode::Certified;
    const std::int64_t N = params.divisor;
    const std::int64_t chunk = 4096 * N;
    const unsigned threads = std::max(1u, params.threads);
    std::vector<RecurrenceEvent> accepted;
    for (std::int64_t start = N; start <= params.k_ceiling; start += chunk * threads) {
        std::vector<std::vector<RecurrenceEvent>> results(threads);
        auto work = [&](unsigned t) {
            std::int64_t lo = start + static_cast<std::int64_t>(t) * chunk;
            std::int64_t hi = std::min(params.k_ceiling, lo + chunk - 1);
            if (lo <= hi) results[t] = scan_range(ctx, proto, o11, lo, hi, certified_only);
        };
        if (threads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        for (auto& batch : results) {
            for (auto& ev : batch) {
                if (!accepted.empty() && !strictly_after(ev, accepted.back())) continue;
                global_checks(ctx, ev, effective_ceiling(ev, params.verify_ceiling), ev.audit.items);
                std::vector<AuditItem> local;
                local_checks(ctx, ev, local);
                local.insert(local.end(), ev.audit.items.begin(), ev.audit.items.end());
                ev.audit.items = std::move(local);
                if (!ev.audit.passed()) continue;
                ev.certified = is_certified(ctx, ev, o11);
                accepted.push_back(std::move(ev));
                if (static_cast<std::int64_t>(accepted.size()) >= params.event_count) return accepted;
            }
        }
    }
    if (accepted.empty())
        fail(ErrorCode::ParamTooTight, "no recurrence event with k <= " + std::to_string(params.k_ceiling));
    return accepted;
}

} // namespace reebkit
