#include "reebkit/persistence.hpp"

#include "reebkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reebkit {

namespace {

struct ExactLess {
    bool operator()(const ExactReal& a, const ExactReal& b) const { return a < b; }
};

bool is_prime(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

void check_field(int field) {
    if (field != 0 && !(field < (1 << 30) && is_prime(field)))
        fail(ErrorCode::InvalidArgument, "field characteristic must be 0 or a prime, got " + std::to_string(field));
}

// a < t, deciding by doubles unless the two are too close to call.
bool less_fast(double ad, const ExactReal& a, double td, const ExactReal& t) {
    double tol = 1e-12 * (1.0 + std::fabs(ad) + std::fabs(td));
    if (ad < td - tol) return true;
    if (ad > td + tol) return false;
    return a < t;
}

struct RationalField {
    using T = mpq_class;
    T from(std::int64_t v) const { return T(static_cast<long>(v)); }
    static bool zero(const T& v) { return v == 0; }
    static T add(const T& a, const T& b) { return a + b; }
    static T mul(const T& a, const T& b) { return a * b; }
    static T neg(const T& a) { return -a; }
    static T inv(const T& a) { return 1 / a; }
};

struct PrimeField {
    using T = std::int64_t;
    std::int64_t p;
    T from(std::int64_t v) const { return ((v % p) + p) % p; }
    static bool zero(T v) { return v == 0; }
    T add(T a, T b) const { return (a + b) % p; }
    T mul(T a, T b) const { return (a * b) % p; }
    T neg(T a) const { return (p - a) % p; }
    T inv(T a) const {
        // Fermat: a^(p-2)
        T r = 1, base = a, e = p - 2;
        while (e > 0) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }
};

template <class F>
using Column = std::vector<std::pair<std::size_t, typename F::T>>; // sorted by row

template <class F>
Column<F> axpy(const F& f, const Column<F>& x, const typename F::T& c, const Column<F>& y) {
    // x + c*y
    Column<F> out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            out.push_back(x[i++]);
        } else if (i == x.size() || y[j].first < x[i].first) {
            out.emplace_back(y[j].first, f.mul(c, y[j].second));
            ++j;
        } else {
            auto v = f.add(x[i].second, f.mul(c, y[j].second));
            if (!F::zero(v)) out.emplace_back(x[i].first, v);
            ++i;
            ++j;
        }
    }
    return out;
}

template <class F>
std::vector<Column<F>> field_columns(const F& f, const FilteredComplex& cx, const std::vector<std::size_t>& pos) {
    const std::size_t n = cx.generators.size();
    std::vector<Column<F>> cols(n);
    for (std::size_t j = 0; j < n && j < cx.boundary.size(); ++j) {
        std::map<std::size_t, typename F::T> acc;
        for (auto [row, c] : cx.boundary[j]) {
            auto v = f.from(c);
            auto it = acc.find(pos[row]);
            if (it == acc.end()) acc.emplace(pos[row], v);
            else it->second = f.add(it->second, v);
        }
        for (auto& [r, v] : acc)
            if (!F::zero(v)) cols[pos[j]].emplace_back(r, v);
    }
    return cols;
}

template <class F>
Barcode reduce(const F& f, const FilteredComplex& cx) {
    const auto& gens = cx.generators;
    const std::size_t n = gens.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (gens[a].filtration != gens[b].filtration) return gens[a].filtration < gens[b].filtration;
        return gens[a].degree < gens[b].degree;
    });
    std::vector<std::size_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;

    std::vector<Column<F>> cols = field_columns(f, cx, pos);

    // d^2 = 0 over the field
    for (std::size_t j = 0; j < n; ++j) {
        Column<F> acc;
        for (const auto& [r, c] : cols[j]) acc = axpy(f, acc, c, cols[r]);
        if (!acc.empty())
            fail(ErrorCode::BoundaryNotSquareZero,
                 "boundary of boundary of '" + gens[order[j]].id + "' is nonzero over the field");
    }

    std::vector<std::optional<std::size_t>> owner(n); // low row -> column
    std::vector<bool> negative(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        auto& col = cols[j];
        while (!col.empty()) {
            std::size_t low = col.back().first;
            if (!owner[low]) break;
            const auto& other = cols[*owner[low]];
            auto c = f.neg(f.mul(col.back().second, f.inv(other.back().second)));
            col = axpy(f, col, c, other);
        }
        if (!col.empty()) {
            owner[col.back().first] = j;
            negative[j] = true;
        }
    }

    Barcode bc;
    bc.field = cx.field;
    for (std::size_t i = 0; i < n; ++i) {
        if (negative[i]) continue;
        const Generator& g = gens[order[i]];
        if (owner[i]) {
            const Generator& killer = gens[order[*owner[i]]];
            if (killer.filtration != g.filtration) bc.bars.push_back({g.filtration, killer.filtration, g.degree});
        } else {
            bc.bars.push_back({g.filtration, std::nullopt, g.degree});
        }
    }
    return bc;
}

std::string bar_text(const Bar& b) {
    return "(" + b.birth.to_string() + ", " + (b.death ? b.death->to_string() : std::string("inf")) + "] deg " +
           std::to_string(b.degree);
}

} // namespace

std::vector<ExactReal> Barcode::spectrum() const {
    std::vector<ExactReal> pts;
    for (const auto& b : bars) {
        pts.push_back(b.birth);
        if (b.death) pts.push_back(*b.death);
    }
    std::sort(pts.begin(), pts.end(), ExactLess{});
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

void validate_barcode(const Barcode& bc) {
    check_field(bc.field);
    for (const auto& b : bc.bars) {
        if (b.birth.sign() < 0) fail(ErrorCode::InvalidArgument, "bar born below 0: " + bar_text(b));
        if (b.death && !(b.birth < *b.death)) fail(ErrorCode::InvalidArgument, "bar needs a < b: " + bar_text(b));
    }
}

Barcode barcode_from_filtered_complex(const FilteredComplex& cx) {
    check_field(cx.field);
    const auto& gens = cx.generators;
    if (!cx.boundary.empty() && cx.boundary.size() != gens.size())
        fail(ErrorCode::InvalidArgument, "boundary needs one column per generator");
    for (const auto& g : gens)
        if (g.filtration.sign() < 0) fail(ErrorCode::FiltrationViolation, "negative filtration on '" + g.id + "'");
    for (std::size_t j = 0; j < cx.boundary.size(); ++j) {
        for (auto [row, c] : cx.boundary[j]) {
            if (row >= gens.size()) fail(ErrorCode::InvalidArgument, "boundary row out of range");
            if (c == 0) continue;
            if (gens[row].degree != gens[j].degree - 1)
                fail(ErrorCode::FiltrationViolation,
                     "boundary of '" + gens[j].id + "' must lower degree by one (hits '" + gens[row].id + "')");
            if (gens[j].filtration < gens[row].filtration)
                fail(ErrorCode::FiltrationViolation,
                     "boundary of '" + gens[j].id + "' raises filtration (hits '" + gens[row].id + "')");
        }
    }
    if (cx.field == 0) return reduce(RationalField{}, cx);
    return reduce(PrimeField{cx.field}, cx);
}

std::size_t dim_at(const Barcode& bc, const ExactReal& t, std::optional<std::int64_t> degree) {
    std::size_t n = 0;
    for (const auto& b : bc.bars) {
        if (degree && b.degree != *degree) continue;
        if (b.birth < t && (!b.death || t <= *b.death)) ++n;
    }
    return n;
}

BarcodeIndex::BarcodeIndex(const Barcode& bc) {
    for (const auto& b : bc.bars) {
        double a = b.birth.to_double();
        all_.births.emplace_back(a, b.birth);
        by_degree_[b.degree].births.emplace_back(a, b.birth);
        if (b.death) {
            double d = b.death->to_double();
            all_.deaths.emplace_back(d, *b.death);
            by_degree_[b.degree].deaths.emplace_back(d, *b.death);
        }
    }
    auto sort_side = [](std::vector<std::pair<double, ExactReal>>& v) {
        std::sort(v.begin(), v.end(),
                  [](const auto& x, const auto& y) { return less_fast(x.first, x.second, y.first, y.second); });
    };
    auto sort_all = [&](Endpoints& e) {
        sort_side(e.births);
        sort_side(e.deaths);
    };
    sort_all(all_);
    for (auto& [deg, e] : by_degree_) sort_all(e);
}

std::size_t BarcodeIndex::count(const Endpoints& e, double td, const ExactReal& t) {
    auto below = [&](const std::vector<std::pair<double, ExactReal>>& v) {
        auto it = std::partition_point(v.begin(), v.end(),
                                       [&](const auto& x) { return less_fast(x.first, x.second, td, t); });
        return static_cast<std::size_t>(it - v.begin());
    };
    return below(e.births) - below(e.deaths);
}

std::size_t BarcodeIndex::dim_at(const ExactReal& t) const { return count(all_, t.to_double(), t); }

std::size_t BarcodeIndex::dim_at(const ExactReal& t, std::int64_t degree) const {
    auto it = by_degree_.find(degree);
    return it == by_degree_.end() ? 0 : count(it->second, t.to_double(), t);
}

std::map<std::int64_t, std::size_t> BarcodeIndex::profile(const ExactReal& t) const {
    std::map<std::int64_t, std::size_t> out;
    const double td = t.to_double();
    for (const auto& [deg, e] : by_degree_)
        if (auto c = count(e, td, t); c > 0) out[deg] = c;
    return out;
}

std::map<std::int64_t, Zeta> zeta_counts(const Barcode& bc, const ExactReal& a) {
    std::map<std::int64_t, Zeta> out;
    for (const auto& b : bc.bars) {
        if (b.birth == a) out[b.degree].plus += 1;
        if (b.death && *b.death == a) out[b.degree + 1].minus += 1;
    }
    return out;
}

BegEnd beg_end_assignment(const Barcode& bc, const std::vector<OrbitHomology>& orbits) {
    validate_barcode(bc);
    BegEnd out;
    out.orbits = orbits;
    const ExactReal zero(0);
    bool has_zero = std::any_of(orbits.begin(), orbits.end(), [&](const auto& o) { return o.action.is_zero(); });
    if (!has_zero) {
        for (std::size_t i = 0; i < bc.bars.size(); ++i) {
            const Bar& b = bc.bars[i];
            if (!b.birth.is_zero()) continue;
            OrbitHomology w;
            w.label = "start(" + std::to_string(i) + ")";
            w.action = zero;
            w.dims[b.degree] = 1;
            w.mu_minus = w.mu_plus = b.degree;
            out.orbits.push_back(std::move(w));
        }
    }
    const auto& horizon = bc.horizon;
    auto below_horizon = [&](const ExactReal& a) { return !horizon || a < *horizon; };

    // (action, degree) -> orbit slots, each orbit repeated dim SH_m times
    std::map<ExactReal, std::map<std::int64_t, std::vector<std::size_t>>, ExactLess> slots;
    for (std::size_t o = 0; o < out.orbits.size(); ++o) {
        const auto& x = out.orbits[o];
        if (horizon && *horizon < x.action) continue;
        auto& by_deg = slots[x.action];
        for (auto [m, d] : x.dims)
            for (std::int64_t r = 0; r < d; ++r) by_deg[m].push_back(o);
    }
    std::map<ExactReal, std::map<std::int64_t, Zeta>, ExactLess> zeta;
    for (const auto& b : bc.bars) {
        if (horizon && (*horizon < b.birth || (b.death && *horizon < *b.death)))
            fail(ErrorCode::ZetaMismatch, "bar extends past the horizon: " + bar_text(b));
        zeta[b.birth][b.degree].plus += 1;
        if (b.death) zeta[*b.death][b.degree + 1].minus += 1;
    }
    // eq. (Morse theory) at every action carrying bars or orbits
    std::vector<ExactReal> actions;
    for (const auto& [a, _] : slots) actions.push_back(a);
    for (const auto& [a, _] : zeta) actions.push_back(a);
    for (const auto& a : actions) {
        std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> cmp; // m -> (zeta, sum dims)
        if (auto it = zeta.find(a); it != zeta.end())
            for (const auto& [m, z] : it->second) cmp[m].first = z.total();
        if (auto it = slots.find(a); it != slots.end())
            for (const auto& [m, s] : it->second) cmp[m].second = static_cast<std::int64_t>(s.size());
        const bool exact = below_horizon(a);
        for (const auto& [m, p] : cmp) {
            if (exact ? p.first == p.second : p.first <= p.second) continue;
            fail(ErrorCode::ZetaMismatch, "at action " + a.to_string() + " degree " + std::to_string(m) + ": bars give " +
                                              std::to_string(p.first) + ", orbits give " + std::to_string(p.second));
        }
    }

    std::vector<std::size_t> order(bc.bars.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const Bar& x = bc.bars[i];
        const Bar& y = bc.bars[j];
        if (x.birth != y.birth) return x.birth < y.birth;
        if (x.degree != y.degree) return x.degree < y.degree;
        if (!x.death || !y.death) return x.death.has_value() && !y.death.has_value();
        return *x.death < *y.death;
    });
    std::map<ExactReal, std::map<std::int64_t, std::size_t>, ExactLess> used;
    auto take = [&](const ExactReal& a, std::int64_t m) -> std::size_t {
        auto& s = slots[a][m];
        std::size_t& u = used[a][m];
        if (u >= s.size())
            fail(ErrorCode::ZetaMismatch, "no orbit left in degree " + std::to_string(m) + " at action " + a.to_string());
        return s[u++];
    };
    out.beg.assign(bc.bars.size(), 0);
    out.en.assign(bc.bars.size(), std::nullopt);
    for (std::size_t i : order) {
        const Bar& b = bc.bars[i];
        out.beg[i] = take(b.birth, b.degree);
        if (b.death) out.en[i] = take(*b.death, b.degree + 1);
    }

    // Refinement of the Morse identity per orbit.
    std::vector<std::map<std::int64_t, std::int64_t>> hits(out.orbits.size());
    for (std::size_t i = 0; i < bc.bars.size(); ++i) {
        hits[out.beg[i]][bc.bars[i].degree] += 1;
        if (out.en[i]) hits[*out.en[i]][bc.bars[i].degree + 1] += 1;
    }
    for (std::size_t o = 0; o < out.orbits.size(); ++o) {
        const auto& x = out.orbits[o];
        if (!below_horizon(x.action)) continue;
        std::map<std::int64_t, std::int64_t> want;
        for (auto [m, d] : x.dims)
            if (d != 0) want[m] = d;
        std::map<std::int64_t, std::int64_t> got;
        for (auto [m, c] : hits[o])
            if (c != 0) got[m] = c;
        if (want != got) out.refinement_gaps.push_back(x.label);
    }
    return out;
}

std::vector<AuditItem> check_beg_end(const Barcode& bc, const BegEnd& be) {
    AuditItem action{"action", true, false, ""};
    AuditItem support{"support", true, false, ""};
    AuditItem ends{"ends", true, false, ""};
    AuditItem window{"index-window", true, false, ""};
    AuditItem gap{"index-gap", true, false, ""};
    auto flag = [](AuditItem& item, const std::string& msg) {
        if (!item.passed) return;
        item.passed = false;
        item.detail = msg;
    };
    auto dim = [](const OrbitHomology& x, std::int64_t m) {
        auto it = x.dims.find(m);
        return it == x.dims.end() ? 0 : it->second;
    };
    if (be.beg.size() != bc.bars.size() || be.en.size() != bc.bars.size()) {
        flag(ends, "maps do not cover the barcode");
        return {ends};
    }
    for (std::size_t i = 0; i < bc.bars.size(); ++i) {
        const Bar& b = bc.bars[i];
        const std::string where = bar_text(b);
        const OrbitHomology& x = be.orbits.at(be.beg[i]);
        if (x.action != b.birth) flag(action, where + ": beg has action " + x.action.to_string());
        if (dim(x, b.degree) <= 0) flag(support, where + ": degree missing from SH(" + x.label + ")");
        if (!(x.mu_minus <= b.degree && b.degree <= x.mu_plus + 1))
            flag(window, where + ": outside [mu-(x), mu+(x)+1] for " + x.label);
        if (b.death.has_value() != be.en[i].has_value()) {
            flag(ends, where + ": en must exist exactly for finite bars");
            continue;
        }
        if (!b.death) continue;
        const OrbitHomology& y = be.orbits.at(*be.en[i]);
        if (y.action != *b.death) flag(action, where + ": en has action " + y.action.to_string());
        if (dim(y, b.degree + 1) <= 0) flag(support, where + ": degree+1 missing from SH(" + y.label + ")");
        if (!(y.mu_minus - 1 <= b.degree && b.degree <= y.mu_plus))
            flag(window, where + ": outside [mu-(y)-1, mu+(y)] for " + y.label);
        const std::int64_t diff = y.mu_minus - x.mu_plus;
        if (diff > 2) flag(gap, where + ": mu-(y) - mu+(x) = " + std::to_string(diff));
        if (diff == 2 && !(b.degree == x.mu_plus + 1 && b.degree == y.mu_minus - 1))
            flag(gap, where + ": equality case needs deg = mu+(x)+1 = mu-(y)-1");
    }
    return {action, support, ends, window, gap};
}

std::vector<ExactReal> sample_points(const Barcode& bc, const ExactReal& t_max, std::size_t samples) {
    std::vector<ExactReal> pts;
    pts.reserve(samples * 2);
    for (std::size_t s = 0; s < samples; ++s)
        pts.push_back(t_max * ExactReal::ratio(static_cast<long long>(2 * s + 1), static_cast<long long>(2 * samples)));
    std::vector<ExactReal> spectrum = bc.spectrum();
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (t_max < spectrum[i]) break;
        if (spectrum[i].sign() > 0) pts.push_back(spectrum[i]);
        if (i + 1 < spectrum.size() && spectrum[i + 1] <= t_max)
            pts.push_back((spectrum[i] + spectrum[i + 1]) * ExactReal::ratio(1, 2));
    }
    return pts;
}

BarcodeAuditReport barcode_audit(const Barcode& bc, const BarcodeAuditOptions& opt) {
    validate_barcode(bc);
    BarcodeAuditReport rep;
    ExactReal t_max(1);
    if (opt.t_max) {
        t_max = *opt.t_max;
    } else if (bc.horizon) {
        t_max = *bc.horizon;
    } else {
        bool any = false;
        for (const auto& b : bc.bars)
            for (const ExactReal* v : {&b.birth, b.death ? &*b.death : nullptr})
                if (v && (!any || t_max < *v)) {
                    t_max = *v;
                    any = true;
                }
        if (!any || t_max.sign() <= 0) t_max = ExactReal(1);
    }
    const BarcodeIndex index(bc);
    const std::vector<ExactReal> pts = sample_points(bc, t_max, opt.samples);
    rep.sampled = pts.size();

    if (opt.n && opt.chi) {
        AuditItem item{"euler", true, false, ""};
        const std::int64_t want = (*opt.n % 2 == 0 ? 1 : -1) * *opt.chi;
        item.detail = "expected " + std::to_string(want);
        for (const auto& t : pts) {
            std::int64_t e = 0;
            for (auto [m, d] : index.profile(t)) e += (m % 2 == 0 ? 1 : -1) * static_cast<std::int64_t>(d);
            if (e != want) {
                item.passed = false;
                item.detail = "at t=" + t.to_string() + " Euler characteristic " + std::to_string(e) + ", expected " +
                              std::to_string(want);
                break;
            }
        }
        rep.items.push_back(std::move(item));
    }

    {
        AuditItem item{"boundary-depth", true, false, ""};
        for (const auto& b : bc.bars) {
            if (!b.death) continue;
            ExactReal len = *b.death - b.birth;
            if (!rep.boundary_depth || *rep.boundary_depth < len) rep.boundary_depth = len;
        }
        item.detail = rep.boundary_depth ? "max finite bar length " + rep.boundary_depth->to_string() : "no finite bars";
        if (opt.cbar && rep.boundary_depth && *opt.cbar < *rep.boundary_depth) {
            item.passed = false;
            item.detail += " exceeds " + opt.cbar->to_string();
        }
        rep.items.push_back(std::move(item));
    }

    if (opt.vanishing) {
        AuditItem item{"vanishing", true, false, "no infinite bars"};
        for (const auto& b : bc.bars)
            if (!b.death) {
                item.passed = false;
                item.detail = "infinite bar " + bar_text(b);
                break;
            }
        rep.items.push_back(std::move(item));
    }

    for (auto p : opt.primes) {
        if (!is_prime(p)) fail(ErrorCode::InvalidArgument, "Smith check needs primes, got " + std::to_string(p));
        AuditItem item{"smith-" + std::to_string(p), true, false, ""};
        const ExactReal pp(static_cast<long>(p));
        std::size_t checked = 0;
        for (const auto& t : pts) {
            ExactReal pt = t * pp;
            if (bc.horizon && *bc.horizon < pt) continue;
            ++checked;
            std::size_t lo = index.dim_at(t), hi = index.dim_at(pt);
            if (hi < lo) {
                item.passed = false;
                item.detail = "dim at " + pt.to_string() + " is " + std::to_string(hi) + " < " + std::to_string(lo) +
                              " at " + t.to_string();
                break;
            }
        }
        if (item.passed) item.detail = std::to_string(checked) + " samples";
        rep.items.push_back(std::move(item));
    }

    if (!opt.begin_cluster.empty() || !opt.end_cluster.empty()) {
        AuditItem item{"inter-cluster", true, false, ""};
        if (opt.begin_cluster.size() != bc.bars.size() || opt.end_cluster.size() != bc.bars.size()) {
            item.passed = false;
            item.detail = "cluster labels must be given per bar";
        } else {
            ExactReal kbar(0);
            if (opt.cbar) kbar += *opt.cbar;
            if (opt.k_bound) kbar += *opt.k_bound;
            item.detail = "bars born above " + kbar.to_string() + " stay in one cluster";
            for (std::size_t i = 0; i < bc.bars.size() && item.passed; ++i) {
                const Bar& b = bc.bars[i];
                if (!b.death || !(kbar < b.birth)) continue;
                const auto& x = opt.begin_cluster[i];
                const auto& y = opt.end_cluster[i];
                if (!x || !y || *x != *y) {
                    item.passed = false;
                    item.detail = "bar " + bar_text(b) + " joins different clusters";
                }
            }
        }
        rep.items.push_back(std::move(item));
    }
    return rep;
}

} // namespace reebkit
