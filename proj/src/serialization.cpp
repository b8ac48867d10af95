#include "reebkit/serialization.hpp"

#include "reebkit/error.hpp"

#include <map>
#include <type_traits>

namespace reebkit {

namespace {

template <class F>
auto parsing(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Json::exception& e) {
        fail(ErrorCode::Parse, std::string(what) + ": " + e.what());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidArgument) throw;
        fail(ErrorCode::Parse, std::string(what) + ": " + e.what());
    }
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorCode::Parse, std::string("missing field '") + key + "'");
    return j.at(key);
}

std::int64_t int_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_integer()) fail(ErrorCode::Parse, std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

mpq_class rational_from(const Json& j) {
    if (j.is_number_integer()) return mpq_class(std::to_string(j.get<std::int64_t>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
    fail(ErrorCode::Parse, "expected a rational string");
}

std::string shear_form_name(ShearForm f) {
    switch (f) {
    case ShearForm::Zero: return "zero";
    case ShearForm::Q0: return "q0";
    case ShearForm::QPlus: return "q+";
    case ShearForm::QMinus: return "q-";
    }
    return "?";
}

ShearForm shear_form_from(const std::string& s) {
    if (s == "zero") return ShearForm::Zero;
    if (s == "q0") return ShearForm::Q0;
    if (s == "q+" || s == "qplus") return ShearForm::QPlus;
    if (s == "q-" || s == "qminus") return ShearForm::QMinus;
    fail(ErrorCode::Parse, "unknown shear form '" + s + "'");
}

Json optional_exact(const std::optional<ExactReal>& x) { return x ? to_json(*x) : Json(nullptr); }

} // namespace

Json to_json(const ExactReal& x) {
    switch (x.kind()) {
    case ExactReal::Kind::Rational:
        return rational_to_string(x.rational_part());
    case ExactReal::Kind::Quadratic: {
        const auto& t = x.terms().front();
        return Json{{"kind", "quad"},
                    {"a", rational_to_string(x.rational_part())},
                    {"b", rational_to_string(t.coeff)},
                    {"d", t.radicand}};
    }
    case ExactReal::Kind::Surd: {
        Json terms = Json::array();
        for (const auto& t : x.terms()) terms.push_back({{"b", rational_to_string(t.coeff)}, {"d", t.radicand}});
        return Json{{"kind", "surd"}, {"a", rational_to_string(x.rational_part())}, {"terms", terms}};
    }
    case ExactReal::Kind::Guarded:
        return Json{{"kind", "guarded"},
                    {"value", rational_to_string(x.rational_part())},
                    {"guard", rational_to_string(*x.guard())}};
    }
    return nullptr;
}

ExactReal exact_from_json(const Json& j) {
    return parsing("exact real", [&]() -> ExactReal {
        if (j.is_number_integer()) return ExactReal(static_cast<long long>(j.get<std::int64_t>()));
        if (j.is_string()) return ExactReal::parse(j.get<std::string>());
        if (!j.is_object()) fail(ErrorCode::Parse, "expected a string or an object");
        const std::string kind = field(j, "kind").get<std::string>();
        if (kind == "rat") return ExactReal(rational_from(field(j, "value")));
        if (kind == "quad")
            return ExactReal::quadratic(rational_from(field(j, "a")), rational_from(field(j, "b")),
                                        field(j, "d").get<std::uint64_t>());
        if (kind == "surd") {
            ExactReal x(rational_from(field(j, "a")));
            for (const auto& t : field(j, "terms"))
                x += ExactReal::quadratic(0, rational_from(field(t, "b")), field(t, "d").get<std::uint64_t>());
            return x;
        }
        if (kind == "guarded") return ExactReal::guarded(rational_from(field(j, "value")), rational_from(field(j, "guard")));
        fail(ErrorCode::Parse, "unknown kind '" + kind + "'");
    });
}

Json to_json(const ElementaryBlock& b) {
    return std::visit(
        [](const auto& blk) -> Json {
            using T = std::decay_t<decltype(blk)>;
            if constexpr (std::is_same_v<T, Rotation>) return {{"type", "rotation"}, {"lambda", to_json(blk.lambda)}};
            else if constexpr (std::is_same_v<T, FullTurn>) return {{"type", "turn"}, {"w", blk.turns}};
            else if constexpr (std::is_same_v<T, Hyperbolic>) return {{"type", "hyperbolic"}, {"h", blk.h}, {"neg", blk.negative}};
            else return {{"type", "shear"}, {"form", shear_form_name(blk.form)}, {"d", blk.size}};
        },
        b);
}

ElementaryBlock block_from_json(const Json& j) {
    return parsing("block", [&]() -> ElementaryBlock {
        const std::string type = field(j, "type").get<std::string>();
        if (type == "rotation") return rotation(exact_from_json(field(j, "lambda")));
        if (type == "turn") return full_turn(int_field(j, "w"));
        if (type == "hyperbolic") return hyperbolic(int_field(j, "h"), field(j, "neg").get<bool>());
        if (type == "shear") return shear(shear_form_from(field(j, "form").get<std::string>()), int_field(j, "d"));
        fail(ErrorCode::Parse, "unknown block type '" + type + "'");
    });
}

Json to_json(const BlockPath& p) {
    Json blocks = Json::array();
    for (const auto& b : p.blocks()) blocks.push_back(to_json(b));
    return {{"loop", p.loop_shift()}, {"blocks", blocks}};
}

BlockPath path_from_json(const Json& j) {
    return parsing("path", [&] {
        if (!j.is_object()) fail(ErrorCode::Parse, "expected an object");
        for (const auto& [key, value] : j.items())
            if (key != "loop" && key != "blocks") fail(ErrorCode::Parse, "unknown key '" + key + "'");
        std::vector<ElementaryBlock> blocks;
        for (const auto& b : field(j, "blocks")) blocks.push_back(block_from_json(b));
        return BlockPath(j.contains("loop") ? int_field(j, "loop") : 0, std::move(blocks));
    });
}

Json to_json(const IndexBundle& b) {
    return {{"mean_index", to_json(b.mean_index)},
            {"cz_index", b.cz_index ? Json(*b.cz_index) : Json(nullptr)},
            {"mu_minus", b.mu_minus},
            {"mu_plus", b.mu_plus},
            {"nu0", b.nu0},
            {"b0", b.b0},
            {"b_plus", b.b_plus},
            {"b_minus", b.b_minus},
            {"beta_plus", b.beta_plus},
            {"beta_minus", b.beta_minus},
            {"half_dim", b.half_dim}};
}

Json to_json(const OrbitSystem& s) {
    Json orbits = Json::array();
    for (const auto& o : s.orbits())
        orbits.push_back({{"name", o.name}, {"path", to_json(o.path)}, {"action", to_json(o.action)}});
    return {{"orbits", orbits}};
}

OrbitSystem system_from_json(const Json& j) {
    return parsing("orbit system", [&] {
        const Json& list = field(j, "orbits");
        if (!list.is_array() || list.empty()) fail(ErrorCode::Parse, "orbit system has no orbits");
        std::vector<OrbitEntry> orbits;
        for (const auto& o : list) {
            OrbitEntry e;
            e.name = o.contains("name") ? o.at("name").get<std::string>() : "x" + std::to_string(orbits.size() + 1);
            e.path = path_from_json(field(o, "path"));
            const Json& a = field(o, "action");
            e.action = (a.is_string() && a.get<std::string>() == "mean") ? mean_index(e.path) : exact_from_json(a);
            orbits.push_back(std::move(e));
        }
        return OrbitSystem(std::move(orbits));
    });
}

Json to_json(const AuditItem& item) {
    Json j{{"name", item.name}, {"passed", item.passed}};
    if (item.advisory) j["advisory"] = true;
    j["detail"] = item.detail;
    return j;
}

Json to_json(const std::vector<AuditItem>& items) {
    Json arr = Json::array();
    for (const auto& i : items) arr.push_back(to_json(i));
    return arr;
}

Json to_json(const RecurrenceEvent& e) {
    return {{"C", to_json(e.C)},
            {"C_approx", e.C.to_double()},
            {"d", e.d},
            {"k", e.k},
            {"eta", to_json(e.eta)},
            {"ell0", e.ell0},
            {"divisor", e.divisor},
            {"epsilon", to_json(e.epsilon)},
            {"sigma", to_json(e.sigma)},
            {"certified", e.certified},
            {"passed", e.audit.passed()},
            {"audit", to_json(e.audit.items)}};
}

RecurrenceEvent event_from_json(const Json& j) {
    return parsing("event", [&] {
        RecurrenceEvent e;
        e.C = exact_from_json(field(j, "C"));
        e.d = field(j, "d").get<std::vector<std::int64_t>>();
        e.k = field(j, "k").get<std::vector<std::int64_t>>();
        e.eta = exact_from_json(field(j, "eta"));
        e.ell0 = j.contains("ell0") ? int_field(j, "ell0") : 1;
        e.divisor = j.contains("divisor") ? int_field(j, "divisor") : 1;
        if (j.contains("epsilon")) e.epsilon = exact_from_json(j.at("epsilon"));
        if (j.contains("sigma")) e.sigma = exact_from_json(j.at("sigma"));
        if (j.contains("certified")) e.certified = j.at("certified").get<bool>();
        return e;
    });
}

Json to_json(const Barcode& bc) {
    Json bars = Json::array();
    for (const auto& b : bc.bars) bars.push_back({{"a", to_json(b.birth)}, {"b", optional_exact(b.death)}, {"deg", b.degree}});
    Json j{{"field", bc.field}, {"bars", bars}};
    if (bc.horizon) j["horizon"] = to_json(*bc.horizon);
    return j;
}

Barcode barcode_from_json(const Json& j) {
    return parsing("barcode", [&] {
        Barcode bc;
        bc.field = j.contains("field") ? static_cast<int>(int_field(j, "field")) : 0;
        for (const auto& b : field(j, "bars")) {
            Bar bar;
            bar.birth = exact_from_json(field(b, "a"));
            if (b.contains("b") && !b.at("b").is_null()) bar.death = exact_from_json(b.at("b"));
            bar.degree = int_field(b, "deg");
            bc.bars.push_back(std::move(bar));
        }
        if (j.contains("horizon") && !j.at("horizon").is_null()) bc.horizon = exact_from_json(j.at("horizon"));
        validate_barcode(bc);
        return bc;
    });
}

Json to_json(const FilteredComplex& cx) {
    Json gens = Json::array();
    for (std::size_t i = 0; i < cx.generators.size(); ++i) {
        const auto& g = cx.generators[i];
        Json bd = Json::array();
        if (i < cx.boundary.size())
            for (auto [row, c] : cx.boundary[i]) bd.push_back({{"id", cx.generators.at(row).id}, {"c", c}});
        gens.push_back({{"id", g.id}, {"deg", g.degree}, {"filt", to_json(g.filtration)}, {"boundary", bd}});
    }
    return {{"field", cx.field}, {"generators", gens}};
}

FilteredComplex complex_from_json(const Json& j) {
    return parsing("filtered complex", [&] {
        FilteredComplex cx;
        cx.field = j.contains("field") ? static_cast<int>(int_field(j, "field")) : 0;
        std::map<std::string, std::size_t> ids;
        const Json& gens = field(j, "generators");
        for (const auto& g : gens) {
            Generator gen{field(g, "id").get<std::string>(), int_field(g, "deg"), exact_from_json(field(g, "filt"))};
            if (!ids.emplace(gen.id, cx.generators.size()).second) fail(ErrorCode::Parse, "duplicate generator id '" + gen.id + "'");
            cx.generators.push_back(std::move(gen));
        }
        for (const auto& g : gens) {
            std::vector<std::pair<std::size_t, std::int64_t>> col;
            if (g.contains("boundary"))
                for (const auto& t : g.at("boundary")) {
                    const std::string id = field(t, "id").get<std::string>();
                    auto it = ids.find(id);
                    if (it == ids.end()) fail(ErrorCode::Parse, "unknown generator id '" + id + "'");
                    col.emplace_back(it->second, t.contains("c") ? int_field(t, "c") : 1);
                }
            cx.boundary.push_back(std::move(col));
        }
        return cx;
    });
}

Json to_json(const OrbitHomology& h) {
    Json dims = Json::object();
    for (auto [deg, d] : h.dims) dims[std::to_string(deg)] = d;
    Json j{{"label", h.label}, {"action", to_json(h.action)}, {"dims", dims}, {"mu_minus", h.mu_minus}, {"mu_plus", h.mu_plus}};
    if (h.cluster) j["cluster"] = *h.cluster;
    return j;
}

OrbitHomology orbit_homology_from_json(const Json& j) {
    return parsing("orbit homology", [&] {
        OrbitHomology h;
        h.label = field(j, "label").get<std::string>();
        h.action = exact_from_json(field(j, "action"));
        for (const auto& [deg, d] : field(j, "dims").items()) h.dims[std::stoll(deg)] = d.get<std::int64_t>();
        h.mu_minus = int_field(j, "mu_minus");
        h.mu_plus = int_field(j, "mu_plus");
        if (j.contains("cluster") && !j.at("cluster").is_null()) h.cluster = j.at("cluster").get<std::size_t>();
        return h;
    });
}

Json to_json(const BegEnd& be) {
    Json bars = Json::array();
    for (std::size_t i = 0; i < be.beg.size(); ++i) {
        Json b{{"beg", be.orbits.at(be.beg[i]).label}};
        b["end"] = be.en[i] ? Json(be.orbits.at(*be.en[i]).label) : Json(nullptr);
        bars.push_back(std::move(b));
    }
    return {{"assignment", bars}, {"refinement_gaps", be.refinement_gaps}};
}

Json to_json(const BarcodeAuditReport& r) {
    return {{"passed", r.passed()},
            {"boundary_depth", optional_exact(r.boundary_depth)},
            {"sampled", r.sampled},
            {"items", to_json(r.items)}};
}

Json to_json(const Staircase& s) {
    Json orbits = Json::array();
    for (const auto& o : s.orbits)
        orbits.push_back({{"label", o.label}, {"k", o.k}, {"action", to_json(o.action)}, {"degree", o.degree}});
    return {{"n", s.n}, {"orbits", orbits}, {"barcode", to_json(s.barcode)}};
}

Json to_json(const MultiplicityReport& r) {
    Json members = Json::array();
    for (const auto& m : r.members) {
        if (m.mu_plus < r.interval_lo - 2 || m.mu_minus > r.interval_hi + 2) continue;
        members.push_back({{"orbit", m.orbit},
                           {"k", m.k},
                           {"group", group_name(m.group)},
                           {"mu_minus", m.mu_minus},
                           {"mu_plus", m.mu_plus},
                           {"degree", m.degree ? Json(*m.degree) : Json(nullptr)}});
    }
    Json fillers = Json::object();
    for (const auto& [slot, idx] : r.fillers) {
        Json list = Json::array();
        for (auto i : idx) list.push_back({{"orbit", r.members[i].orbit}, {"k", r.members[i].k}});
        fillers[std::to_string(slot)] = list;
    }
    return {{"passed", r.passed()},
            {"n", r.n},
            {"d", r.d},
            {"interval", {r.interval_lo, r.interval_hi}},
            {"slots", r.slots},
            {"fillers", fillers},
            {"distinct_primes", r.distinct_primes},
            {"root_lcm", r.root_lcm},
            {"s", r.s},
            {"required_divisor", r.required_divisor.get_str()},
            {"items", to_json(r.items)},
            {"near_members", members}};
}

Json to_json(const ComparisonReport& r) {
    Json deltas = Json::array();
    for (const auto& d : r.deltas) deltas.push_back(to_json(d));
    Json j{{"passed", r.passed()}, {"deltas", deltas}, {"items", to_json(r.items)}};
    if (!r.first_discrepancy.empty()) j["first_discrepancy"] = r.first_discrepancy;
    return j;
}

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::Parse, source + ": " + e.what());
    }
}

} // namespace reebkit
