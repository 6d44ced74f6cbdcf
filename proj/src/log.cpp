#include "spectralign/log.hpp"

#include <cstdarg>
#include <cstdlib>
#include <cstring>

namespace spectralign::log {

Level level() {
  static Level lvl = [] {
    const char* env = std::getenv("SPECTRALIGN_LOG");
    if (!env) return Level::error;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    if (std::strcmp(env, "info") == 0) return Level::info;
    return Level::error;
  }();
  return lvl;
}

void message(Level lvl, const char* fmt, ...) {
  if (static_cast<int>(lvl) > static_cast<int>(level())) return;
  const char* tag = lvl == Level::error ? "error" : (lvl == Level::info ? "info" : "debug");
  std::fprintf(stderr, "[%s] ", tag);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace spectralign::log
