#pragma once

#include "reebkit/block_path.hpp"
#include "reebkit/exact_real.hpp"
#include "reebkit/indices.hpp"
#include "reebkit/orbits.hpp"
#include "reebkit/persistence.hpp"
#include "reebkit/recurrence.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace reebkit {

using Json = nlohmann::ordered_json;

// All *_from_json functions throw Error(Parse) on malformed input.

/// Rationals as "p/q" strings; irrationals as {"kind":"quad"|"surd"|"guarded",...}.
Json to_json(const ExactReal& x);
ExactReal exact_from_json(const Json& j);

Json to_json(const ElementaryBlock& b);
ElementaryBlock block_from_json(const Json& j);
Json to_json(const BlockPath& p);
BlockPath path_from_json(const Json& j);

Json to_json(const IndexBundle& b);

/// {"orbits":[{"name":..,"path":..,"action":..}]}; "action":"mean" uses the mean index.
Json to_json(const OrbitSystem& s);
OrbitSystem system_from_json(const Json& j);

Json to_json(const AuditItem& item);
Json to_json(const std::vector<AuditItem>& items);
Json to_json(const RecurrenceEvent& e);
RecurrenceEvent event_from_json(const Json& j);

Json to_json(const Barcode& bc);
Barcode barcode_from_json(const Json& j);

/// {"field":p,"generators":[{"id":..,"deg":..,"filt":..,"boundary":[{"id":..,"c":..}]}]}
Json to_json(const FilteredComplex& cx);
FilteredComplex complex_from_json(const Json& j);

Json to_json(const OrbitHomology& h);
OrbitHomology orbit_homology_from_json(const Json& j);
Json to_json(const BegEnd& be);

Json to_json(const BarcodeAuditReport& r);
Json to_json(const Staircase& s);
Json to_json(const MultiplicityReport& r);
Json to_json(const ComparisonReport& r);

/// Parses text into JSON, mapping syntax errors to Error(Parse).
Json parse_json(const std::string& text, const std::string& source);

} // namespace reebkit
