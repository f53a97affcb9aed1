#include "energylab/log.hpp"

#include <iostream>
#include <mutex>

namespace energylab {

namespace {
std::mutex g_log_mutex;
LogSink g_sink;
}  // namespace

void log_warning(std::string_view message) {
    std::lock_guard lock(g_log_mutex);
    if (g_sink) {
        g_sink(message);
        return;
    }
    std::cerr << "warning: " << message << '\n';
}

LogSink set_warning_sink(LogSink sink) {
    std::lock_guard lock(g_log_mutex);
    auto previous = std::move(g_sink);
    g_sink = std::move(sink);
    return previous;
}

}  // namespace energylab
