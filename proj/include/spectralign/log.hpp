#pragma once

#include <cstdio>

namespace spectralign::log {

enum class Level { error = 0, info = 1, debug = 2 };

// Reads SPECTRALIGN_LOG ({error,info,debug}) on first use; defaults to error.
Level level();

void message(Level lvl, const char* fmt, ...);

#define SPECTRALIGN_LOG_INFO(...) \
  ::spectralign::log::message(::spectralign::log::Level::info, __VA_ARGS__)
#define SPECTRALIGN_LOG_DEBUG(...) \
  ::spectralign::log::message(::spectralign::log::Level::debug, __VA_ARGS__)
#define SPECTRALIGN_LOG_ERROR(...) \
  ::spectralign::log::message(::spectralign::log::Level::error, __VA_ARGS__)

}  // namespace spectralign::log
