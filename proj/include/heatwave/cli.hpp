#pragma once

#include <string>
#include <vector>

namespace heatwave::cli {

// Executes one pipeline stage. Returns 0 on success, 1 on usage errors,
// 2 on data/validation errors.
int run(const std::vector<std::string>& args);

}  // namespace heatwave::cli
