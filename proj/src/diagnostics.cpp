#include "ftreg/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace ftreg {

namespace {
std::mutex handler_mutex;
WarningHandler& handler_slot() {
  static WarningHandler handler;
  return handler;
}
}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(handler_mutex);
  handler_slot() = std::move(handler);
}

void warn(const std::string& message) {
  WarningHandler copy;
  {
    std::lock_guard<std::mutex> lock(handler_mutex);
    copy = handler_slot();
  }
  if (copy) {
    copy(message);
  } else {
    std::cerr << "[ftreg warning] " << message << '\n';
  }
}

}  // namespace ftreg
