#include "cli.hpp"

#include "reebkit/error.hpp"
#include "reebkit/indices.hpp"
#include "reebkit/orbits.hpp"
#include "reebkit/persistence.hpp"
#include "reebkit/recurrence.hpp"
#include "reebkit/serialization.hpp"
#include "reebkit/svg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace reebkit::cli {

namespace {

struct Global {
    std::string out;
    std::string format;
    unsigned threads = 1;
    std::uint64_t seed = 1;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) fail(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
}

Json load_json(const std::string& path) { return parse_json(read_file(path), path); }

/// Whole-file JSON, or the first line of a JSON Lines file.
Json load_json_or_first_line(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error&) {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos) return parse_json(line, path);
        fail(ErrorCode::Parse, path + ": empty file");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> v;
    for (const auto& p : split(s, ',')) {
        std::size_t used = 0;
        std::int64_t x = 0;
        try {
            x = std::stoll(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != p.size()) fail(ErrorCode::Parse, "'" + p + "' is not an integer");
        v.push_back(x);
    }
    return v;
}

std::vector<ExactReal> parse_exact_list(const std::string& s) {
    std::vector<ExactReal> v;
    for (const auto& p : split(s, ',')) v.push_back(ExactReal::parse(p));
    return v;
}

std::string csv_cell(const std::string& s) {
    return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

void require_format(const Global& g, std::initializer_list<const char*> allowed) {
    if (g.format.empty()) return;
    for (const char* f : allowed)
        if (g.format == f) return;
    fail(ErrorCode::InvalidArgument, "format '" + g.format + "' is not available for this command");
}

// ---- indices

struct IndicesOpts {
    std::string path;
    std::int64_t kmax = 10;
};

int cmd_indices(const IndicesOpts& o, const Global& g, std::ostream& out) {
    require_format(g, {"csv", "json"});
    if (o.kmax < 1) fail(ErrorCode::InvalidArgument, "--kmax must be positive");
    const Json pj = o.path.rfind('{', 0) == 0 ? parse_json(o.path, "--path") : load_json(o.path);
    const BlockPath path = path_from_json(pj);
    if (g.format == "json") {
        Json rows = Json::array();
        for (std::int64_t k = 1; k <= o.kmax; ++k) {
            Json row{{"k", k}};
            row.update(to_json(index_bundle(path, k)));
            rows.push_back(std::move(row));
        }
        out << rows.dump(2) << "\n";
        return Ok;
    }
    out << "k,mean_index,mu_minus,mu_plus,degenerate\n";
    for (std::int64_t k = 1; k <= o.kmax; ++k) {
        IndexBundle b = index_bundle(path, k);
        out << k << "," << csv_cell(b.mean_index.to_string()) << "," << b.mu_minus << "," << b.mu_plus << ","
            << (b.cz_index ? "false" : "true") << "\n";
    }
    return Ok;
}

// ---- recurrence

struct RecurrenceOpts {
    std::string system;
    std::string eta = "1/5";
    std::int64_t ell0 = 1;
    std::int64_t divisor = 1;
    std::int64_t events = 1;
    std::int64_t kmax = 10000;
    std::int64_t verify_kmax = 0;
    std::string epsilon, sigma;
    std::string search = "certified";
};

int cmd_recurrence(const RecurrenceOpts& o, const Global& g, std::ostream& out) {
    require_format(g, {"json"});
    const OrbitSystem system = system_from_json(load_json(o.system));
    RecurrenceParams p;
    p.eta = ExactReal::parse(o.eta);
    p.ell0 = o.ell0;
    p.divisor = o.divisor;
    p.event_count = o.events;
    p.k_ceiling = o.kmax;
    p.verify_ceiling = o.verify_kmax;
    if (!o.epsilon.empty()) p.epsilon = ExactReal::parse(o.epsilon);
    if (!o.sigma.empty()) p.sigma = ExactReal::parse(o.sigma);
    p.threads = g.threads;
    p.mode = o.search == "exhaustive" ? SearchMode::Exhaustive : SearchMode::Certified;

    const auto events = find_recurrence_events(system, p);
    bool passed = static_cast<std::int64_t>(events.size()) == o.events;
    Json table = Json::array();
    for (const auto& e : events) {
        out << to_json(e).dump() << "\n";
        Json failed = Json::array();
        for (const auto& i : e.audit.items)
            if (!i.passed && !i.advisory) failed.push_back(i.name);
        passed = passed && e.audit.passed();
        table.push_back({{"k", e.k}, {"d", e.d}, {"C_approx", e.C.to_double()}, {"certified", e.certified},
                         {"passed", e.audit.passed()}, {"failed", failed}});
    }
    Json summary{{"events", events.size()}, {"requested", o.events}, {"search", o.search}, {"passed", passed},
                 {"table", table}};
    out << Json{{"summary", summary}}.dump() << "\n";
    return passed ? Ok : AuditFailed;
}

// ---- barcode

struct BarcodeOpts {
    std::string complex;
    int field = -1;
    std::string svg;
};

int cmd_barcode(const BarcodeOpts& o, const Global& g, std::ostream& out) {
    require_format(g, {"json", "svg"});
    FilteredComplex cx = complex_from_json(load_json(o.complex));
    if (o.field >= 0) cx.field = o.field;
    const Barcode bc = barcode_from_filtered_complex(cx);
    if (!o.svg.empty()) write_file(o.svg, barcode_svg(bc));
    if (g.format == "svg") out << barcode_svg(bc);
    else out << to_json(bc).dump(2) << "\n";
    return Ok;
}

// ---- audit

struct AuditOpts {
    std::string barcode;
    std::optional<std::int64_t> n, chi;
    std::string cbar, primes, tmax, orbits, kbound;
    bool vanishing = false;
    std::size_t samples = 200;
};

int cmd_audit(const AuditOpts& o, const Global& g, std::ostream& out) {
    require_format(g, {"json"});
    const Barcode bc = barcode_from_json(load_json(o.barcode));
    if (o.n.has_value() != o.chi.has_value()) fail(ErrorCode::InvalidArgument, "--n and --chi go together");
    BarcodeAuditOptions opt;
    opt.n = o.n;
    opt.chi = o.chi;
    if (!o.cbar.empty()) opt.cbar = ExactReal::parse(o.cbar);
    if (!o.tmax.empty()) opt.t_max = ExactReal::parse(o.tmax);
    if (!o.kbound.empty()) opt.k_bound = ExactReal::parse(o.kbound);
    if (!o.primes.empty()) opt.primes = parse_int_list(o.primes);
    opt.vanishing = o.vanishing;
    opt.samples = o.samples;

    Json report;
    bool passed = true;
    if (!o.orbits.empty()) {
        std::vector<OrbitHomology> orbits;
        const Json oj = load_json(o.orbits);
        if (!oj.is_array()) fail(ErrorCode::Parse, o.orbits + ": expected an array of orbit records");
        for (const auto& h : oj) orbits.push_back(orbit_homology_from_json(h));
        Json be;
        try {
            BegEnd assignment = beg_end_assignment(bc, orbits);
            const auto items = check_beg_end(bc, assignment);
            for (std::size_t i = 0; i < bc.bars.size(); ++i) {
                opt.begin_cluster.push_back(assignment.orbits[assignment.beg[i]].cluster);
                opt.end_cluster.push_back(assignment.en[i] ? assignment.orbits[*assignment.en[i]].cluster : std::nullopt);
            }
            be = to_json(assignment);
            be["items"] = to_json(items);
            passed = all_passed(items);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZetaMismatch) throw;
            be = {{"items", Json::array({to_json(AuditItem{"zeta", false, false, e.what()})})}};
            passed = false;
        }
        const BarcodeAuditReport r = barcode_audit(bc, opt);
        report = to_json(r);
        report["beg_end"] = be;
        passed = passed && r.passed();
        report["passed"] = passed;
    } else {
        const BarcodeAuditReport r = barcode_audit(bc, opt);
        report = to_json(r);
        passed = r.passed();
    }
    out << report.dump(2) << "\n";
    return passed ? Ok : AuditFailed;
}

// ---- ellipsoid

struct EllipsoidOpts {
    std::string deltas;
    std::size_t count = 50;
    std::string barcode, svg;
};

int cmd_ellipsoid(const EllipsoidOpts& o, const Global& g, std::ostream& out) {
    require_format(g, {"json", "svg"});
    const auto deltas = parse_exact_list(o.deltas);
    const Staircase s = staircase_barcode(ellipsoid_system(deltas), o.count);
    const std::string title = "E(" + o.deltas + "), first " + std::to_string(o.count) + " bars";
    if (!o.barcode.empty()) write_file(o.barcode, to_json(s.barcode).dump(2) + "\n");
    if (!o.svg.empty()) write_file(o.svg, barcode_svg(s.barcode, title));
    if (g.format == "svg") out << barcode_svg(s.barcode, title);
    else out << to_json(s).dump(2) << "\n";
    return Ok;
}

// ---- audit-mult

struct MultOpts {
    std::string system, event;
    std::int64_t kmax = 0; // 0: max k + ell0
    std::string eta = "1/5";
    std::int64_t divisor = 2;
    std::int64_t search_kmax = 1000000;
    std::string search = "exhaustive";
};

int cmd_audit_mult(const MultOpts& o, const Global& g, std::ostream& out) {
    require_format(g, {"json"});
    const OrbitSystem system = system_from_json(load_json(o.system));
    RecurrenceEvent event;
    if (!o.event.empty()) {
        event = event_from_json(load_json_or_first_line(o.event));
    } else {
        RecurrenceParams p;
        p.eta = ExactReal::parse(o.eta);
        p.divisor = o.divisor;
        p.k_ceiling = o.search_kmax;
        p.threads = g.threads;
        p.mode = o.search == "exhaustive" ? SearchMode::Exhaustive : SearchMode::Certified;
        event = find_recurrence_events(system, p).front();
    }
    std::int64_t ceiling = o.kmax;
    if (ceiling == 0)
        for (auto k : event.k) ceiling = std::max(ceiling, k + event.ell0);
    const MultiplicityReport r = multiplicity_audit(system, event, ceiling);
    Json j = to_json(r);
    j["event"] = {{"k", event.k}, {"d", event.d}, {"C", to_json(event.C)}};
    out << j.dump(2) << "\n";
    return r.passed() ? Ok : AuditFailed;
}

// ---- compare

struct CompareOpts {
    std::string system;
    std::int64_t kmax = 200;
};

int cmd_compare(const CompareOpts& o, const Global& g, std::ostream& out) {
    require_format(g, {"json"});
    const OrbitSystem system = system_from_json(load_json(o.system));
    const ComparisonReport r = ellipsoid_comparison(system, o.kmax);
    out << to_json(r).dump(2) << "\n";
    return r.passed() ? Ok : AuditFailed;
}

// ---- gen-system

struct GenOpts {
    std::int64_t n = 2;
};

int cmd_gen_system(const GenOpts& o, const Global& g, std::ostream& out) {
    require_format(g, {"json"});
    if (o.n < 1 || o.n > 8) fail(ErrorCode::InvalidArgument, "--n must lie in [1, 8]");
    std::mt19937_64 rng(g.seed);
    // Engine output is portable; std distributions are not.
    auto draw = [&](std::uint64_t lo, std::uint64_t hi) { return static_cast<long>(lo + rng() % (hi - lo + 1)); };
    // delta_j = r_j (1 + sqrt2)^e_j with distinct e_j, so every ratio is irrational with a small denominator
    const ExactReal unit = ExactReal(1) + ExactReal::sqrt(2);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::int64_t> exps;
        for (std::int64_t e = -(o.n / 2); static_cast<std::int64_t>(exps.size()) < o.n; ++e) exps.push_back(e);
        for (std::size_t i = exps.size(); i > 1; --i) std::swap(exps[i - 1], exps[static_cast<std::size_t>(draw(0, i - 1))]);
        std::vector<ExactReal> deltas;
        for (auto e : exps) {
            ExactReal v = ExactReal::ratio(draw(2, 4), 2);
            for (std::int64_t i = 0; i < std::abs(e); ++i) v = e > 0 ? v * unit : v / unit;
            deltas.push_back(v);
        }
        std::sort(deltas.begin(), deltas.end());
        const ExactReal lowest = deltas.front();
        for (auto& v : deltas) v = v / lowest;
        try {
            check_non_resonance(deltas);
            const OrbitSystem s = rescale_to_mean_index(ellipsoid_system(deltas));
            out << to_json(s).dump(2) << "\n";
            return Ok;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonResonanceFailed && e.code() != ErrorCode::RationalRatio) throw;
        }
    }
    fail(ErrorCode::InvalidArgument, "no admissible system found for this seed");
}

std::string diagnostic(std::string_view code, const std::string& message) {
    std::ostringstream s;
    s << "error code=" << code << " message=" << std::quoted(message);
    return s.str();
}

int status_for(ErrorCode c) {
    switch (c) {
    case ErrorCode::InvalidArgument: return Usage;
    case ErrorCode::Parse: return ParseError;
    case ErrorCode::Precision:
    case ErrorCode::HalfIntegerAmbiguity:
    case ErrorCode::Overflow: return PrecisionError;
    default: return AuditFailed;
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"reebkit: index theory, recurrence events and persistence audits for Reeb orbit systems", "reebkit"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--out", g.out, "Write the main output to this file");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "svg"}));
    app.add_option("--threads", g.threads, "Worker threads for the recurrence search")->check(CLI::Range(1, 256));
    app.add_option("--seed", g.seed, "Seed for gen-system");

    IndicesOpts io;
    auto* indices = app.add_subcommand("indices", "k-table of mean index and mu+- for a block path");
    indices->add_option("--path", io.path, "Block path JSON file or inline JSON")->required();
    indices->add_option("--kmax", io.kmax, "Largest iterate");

    RecurrenceOpts ro;
    auto* rec = app.add_subcommand("recurrence", "Find and verify index recurrence events");
    rec->add_option("--system", ro.system, "Orbit system JSON")->required()->check(CLI::ExistingFile);
    rec->add_option("--eta", ro.eta, "Action window eta");
    rec->add_option("--ell0", ro.ell0, "Order bound ell0");
    rec->add_option("--div", ro.divisor, "Divisor N for k and d");
    rec->add_option("--events", ro.events, "Number of events");
    rec->add_option("--kmax", ro.kmax, "Search ceiling for k");
    rec->add_option("--verify-kmax", ro.verify_kmax, "Range for the global checks (0: automatic)");
    rec->add_option("--epsilon", ro.epsilon, "Override epsilon");
    rec->add_option("--sigma", ro.sigma, "Override sigma");
    rec->add_option("--search", ro.search, "certified or exhaustive")->check(CLI::IsMember({"certified", "exhaustive"}));

    BarcodeOpts bo;
    auto* bar = app.add_subcommand("barcode", "Barcode of a filtered complex");
    bar->add_option("--complex", bo.complex, "Filtered complex JSON")->required()->check(CLI::ExistingFile);
    bar->add_option("--field", bo.field, "Override the coefficient field (0 or a prime)");
    bar->add_option("--svg", bo.svg, "Also write an SVG plot");

    AuditOpts ao;
    auto* aud = app.add_subcommand("audit", "Audit a barcode");
    aud->add_option("--barcode", ao.barcode, "Barcode JSON")->required()->check(CLI::ExistingFile);
    aud->add_option("--n", ao.n, "Half-dimension n for the Euler check");
    aud->add_option("--chi", ao.chi, "Expected Euler characteristic");
    aud->add_option("--cbar", ao.cbar, "Boundary depth bound");
    aud->add_option("--primes", ao.primes, "Primes for the Smith check, e.g. 2,3,5");
    aud->add_option("--samples", ao.samples, "Uniform sample count");
    aud->add_option("--tmax", ao.tmax, "Largest sampled action");
    aud->add_option("--orbits", ao.orbits, "Orbit homology JSON for the beg/end check")->check(CLI::ExistingFile);
    aud->add_option("--kbound", ao.kbound, "Inter-cluster bound added to cbar");
    aud->add_flag("--vanishing", ao.vanishing, "Forbid infinite bars");

    EllipsoidOpts eo;
    auto* ell = app.add_subcommand("ellipsoid", "Staircase barcode of an irrational ellipsoid");
    ell->add_option("--deltas", eo.deltas, "Comma-separated deltas, e.g. 1,sqrt2")->required();
    ell->add_option("--count", eo.count, "Number of bars")->check(CLI::PositiveNumber);
    ell->add_option("--barcode", eo.barcode, "Also write the barcode JSON");
    ell->add_option("--svg", eo.svg, "Also write an SVG plot");

    MultOpts mo;
    auto* mult = app.add_subcommand("audit-mult", "Multiplicity audit at a recurrence event");
    mult->add_option("--system", mo.system, "Orbit system JSON")->required()->check(CLI::ExistingFile);
    mult->add_option("--event", mo.event, "Event JSON (or the recurrence JSON Lines output)")->check(CLI::ExistingFile);
    mult->add_option("--kmax", mo.kmax, "Iterate ceiling for the audit (default max k + ell0)");
    mult->add_option("--eta", mo.eta, "eta for the event search when --event is absent");
    mult->add_option("--div", mo.divisor, "Divisor for the event search when --event is absent");
    mult->add_option("--search-kmax", mo.search_kmax, "Search ceiling when --event is absent");
    mult->add_option("--search", mo.search, "certified or exhaustive event search")->check(CLI::IsMember({"certified", "exhaustive"}));

    CompareOpts co;
    auto* cmp = app.add_subcommand("compare", "Compare a system with the ellipsoid of its mean indices");
    cmp->add_option("--system", co.system, "Orbit system JSON")->required()->check(CLI::ExistingFile);
    cmp->add_option("--kmax", co.kmax, "Largest compared iterate");

    GenOpts go;
    auto* gen = app.add_subcommand("gen-system", "Random ellipsoid-type orbit system (uses --seed)");
    gen->add_option("--n", go.n, "Number of orbits");

    for (auto* sub : {indices, rec, bar, aud, ell, mult, cmp, gen}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << diagnostic("usage", e.what()) << "\n";
        return Usage;
    }

    std::ostringstream buffer;
    int status = Ok;
    try {
        if (*indices) status = cmd_indices(io, g, buffer);
        else if (*rec) status = cmd_recurrence(ro, g, buffer);
        else if (*bar) status = cmd_barcode(bo, g, buffer);
        else if (*aud) status = cmd_audit(ao, g, buffer);
        else if (*ell) status = cmd_ellipsoid(eo, g, buffer);
        else if (*mult) status = cmd_audit_mult(mo, g, buffer);
        else if (*cmp) status = cmd_compare(co, g, buffer);
        else if (*gen) status = cmd_gen_system(go, g, buffer);
        if (g.out.empty()) out << buffer.str();
        else write_file(g.out, buffer.str());
    } catch (const Error& e) {
        out << buffer.str();
        err << diagnostic(error_code_name(e.code()), e.what()) << "\n";
        return status_for(e.code());
    } catch (const std::exception& e) {
        err << diagnostic("internal", e.what()) << "\n";
        return AuditFailed;
    }
    return status;
}

} // namespace reebkit::cli
