#include "trajstitch/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace trajstitch {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink() {
  static WarningSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return s;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(message);
}

WarningSink set_warning_sink(WarningSink next) {
  std::lock_guard lock(sink_mutex());
  return std::exchange(sink(), std::move(next));
}

WarningCapture::WarningCapture() {
  previous_ = set_warning_sink([this](std::string_view msg) { messages_.emplace_back(msg); });
}

WarningCapture::~WarningCapture() { set_warning_sink(std::move(previous_)); }

bool WarningCapture::contains(std::string_view needle) const {
  for (const auto& m : messages_) {
    if (m.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace trajstitch
