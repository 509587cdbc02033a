#pragma once

#include <functional>
#include <string>

namespace sobvem {

using MessageHandler = std::function<void(const std::string&)>;

/// Replaces the sink for warnings and notices. The default writes to stderr.
/// Passing an empty handler restores the default.
void set_message_handler(MessageHandler handler);

void warn(const std::string& message);
void notice(const std::string& message);

} // namespace sobvem
