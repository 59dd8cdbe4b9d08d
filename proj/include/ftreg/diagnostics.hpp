#pragma once

#include <functional>
#include <string>

namespace ftreg {

// Non-fatal diagnostics (degenerate ranks, quasi-uniformity violations,
// solver jitter). Defaults to stderr; tests install their own sink.
using WarningHandler = std::function<void(const std::string&)>;

void set_warning_handler(WarningHandler handler);  // empty resets to default
void warn(const std::string& message);

}  // namespace ftreg
