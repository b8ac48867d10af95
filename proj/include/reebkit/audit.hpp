#pragma once

#include <string>
#include <vector>

namespace reebkit {

struct AuditItem {
    std::string name;
    bool passed = true;
    bool advisory = false; // failure reported but not counted
    std::string detail;
};

/// True when every non-advisory item passed.
bool all_passed(const std::vector<AuditItem>& items);

} // namespace reebkit
