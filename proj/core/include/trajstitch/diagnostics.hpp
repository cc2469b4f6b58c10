#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace trajstitch {

using WarningSink = std::function<void(std::string_view)>;

// Emits a warning through the installed sink (stderr by default).
void warn(std::string_view message);

// Replaces the process-wide sink; returns the previous one.
WarningSink set_warning_sink(WarningSink sink);

// Collects warnings for the lifetime of the object, restoring the previous
// sink on destruction.
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(std::string_view needle) const;

 private:
  std::vector<std::string> messages_;
  WarningSink previous_;
};

}  // namespace trajstitch
