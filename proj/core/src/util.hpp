#pragma once

#include <cstdint>
#include <cstring>
#include <exception>
#include <string>
#include <unordered_map>
#include <vector>

namespace dyngame::detail {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::uint32_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

template <class V>
using VecMap = std::unordered_map<std::vector<int>, V, VecHash>;

// Insertion-ordered index of fixed-width integer keys.
class KeyIndex {
 public:
  explicit KeyIndex(int width = 0) : width_(width) {}
  int width() const { return width_; }
  // Returns the slot for key, creating it if needed.
  std::size_t insert(const int* key) {
    scratch_.assign(key, key + width_);
    auto [it, fresh] = map_.try_emplace(scratch_, map_.size());
    if (fresh) keys_.insert(keys_.end(), key, key + width_);
    return it->second;
  }
  std::size_t size() const { return map_.size(); }
  std::vector<int>& keys() { return keys_; }

 private:
  int width_;
  std::vector<int> keys_;
  std::vector<int> scratch_;
  VecMap<std::size_t> map_;
};

inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace dyngame::detail

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace dyngame::detail {

// Worker count from DYNGAME_THREADS, defaulting to the hardware count.
inline int thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DYNGAME_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) n = v;
  }
  return std::max(1, n);
}

// Runs f(0..n-1). Callers write results into per-index slots so the
// outcome does not depend on scheduling.
template <class F>
void parallel_for(int n, F&& f) {
  int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int k = 0; k < n; ++k) f(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int k = w; k < n; k += workers) f(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dyngame::detail
