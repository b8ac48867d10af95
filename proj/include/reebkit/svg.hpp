#pragma once

#include "reebkit/persistence.hpp"

#include <string>

namespace reebkit {

/// Static SVG of a barcode: action axis, one rectangle per bar, degree labels.
std::string barcode_svg(const Barcode& bc, const std::string& title = "");

} // namespace reebkit
