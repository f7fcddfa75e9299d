#include "logging.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>

namespace preffend {

namespace {

std::atomic<int> g_level{-1};  // -1: not yet initialized from env
std::atomic<std::size_t> g_warnings{0};
std::mutex g_io_mutex;

int level_from_name(const std::string& name) {
  if (name == "error") return 0;
  if (name == "info") return 1;
  if (name == "debug") return 2;
  return -1;
}

int current_level() {
  int lvl = g_level.load(std::memory_order_relaxed);
  if (lvl >= 0) return lvl;
  const char* env = std::getenv("PREFFEND_LOG");
  int from_env = env ? level_from_name(env) : 1;
  if (from_env < 0) from_env = 1;
  g_level.store(from_env, std::memory_order_relaxed);
  return from_env;
}

void emit(const char* tag, const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_io_mutex);
  std::fprintf(stderr, "preffend %s: %s\n", tag, msg.c_str());
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(current_level()); }

bool set_log_level(const std::string& name) {
  int lvl = level_from_name(name);
  if (lvl < 0) return false;
  g_level.store(lvl, std::memory_order_relaxed);
  return true;
}

void set_log_level(LogLevel level) {
  g_level.store(static_cast<int>(level), std::memory_order_relaxed);
}

void log_error(const std::string& msg) { emit("error", msg); }

void log_warn(const std::string& msg) {
  g_warnings.fetch_add(1, std::memory_order_relaxed);
  if (current_level() >= 1) emit("warn", msg);
}

void log_info(const std::string& msg) {
  if (current_level() >= 1) emit("info", msg);
}

void log_debug(const std::string& msg) {
  if (current_level() >= 2) emit("debug", msg);
}

std::size_t warning_count() {
  return g_warnings.load(std::memory_order_relaxed);
}

}  // namespace preffend
