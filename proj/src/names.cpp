#include "rw/names.hpp"

#include <atomic>
#include <mutex>
#include <unordered_set>

namespace rw {

namespace {

// Node-based set: element addresses are stable across rehashing.
struct Interner {
  std::mutex mutex;
  std::unordered_set<std::string> pool;

  const std::string* intern(std::string_view text) {
    std::lock_guard lock(mutex);
    return &*pool.emplace(text).first;
  }
};

Interner& interner() {
  static Interner instance;
  return instance;
}

std::atomic<std::uint64_t> next_var_id{1};

}  // namespace

Name::Name() {
  static const std::string* const empty = interner().intern("");
  text_ = empty;
}

Name::Name(std::string_view text) : text_(interner().intern(text)) {}

VarId fresh_id() { return VarId{next_var_id.fetch_add(1, std::memory_order_relaxed)}; }

Var fresh_var(Name hint) { return Var{fresh_id(), hint}; }

}  // namespace rw
