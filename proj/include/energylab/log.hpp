#pragma once

#include <functional>
#include <string_view>

namespace energylab {

using LogSink = std::function<void(std::string_view)>;

// Warnings go to stderr unless a sink is installed. Thread-safe.
void log_warning(std::string_view message);

// Returns the previous sink. Passing an empty function restores stderr.
LogSink set_warning_sink(LogSink sink);

}  // namespace energylab
