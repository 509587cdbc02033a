#include "sobvem/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace sobvem {

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

MessageHandler& handler() {
  static MessageHandler h;
  return h;
}

void emit(const std::string& line) {
  std::lock_guard lock(handler_mutex());
  if (handler()) {
    handler()(line);
  } else {
    std::cerr << line << '\n';
  }
}

} // namespace

void set_message_handler(MessageHandler h) {
  std::lock_guard lock(handler_mutex());
  handler() = std::move(h);
}

void warn(const std::string& message) { emit("warning: " + message); }

void notice(const std::string& message) { emit("note: " + message); }

} // namespace sobvem
