#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "specklepuf/binary_key.hpp"
#include "specklepuf/rng.hpp"

namespace specklepuf::testing {

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("specklepuf_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline BinaryKey random_key(Dims dims, std::uint64_t seed) {
  BinaryKey key(dims);
  CounterRng rng(seed, Stream::kKeys);
  for (std::size_t i = 0; i < key.length(); ++i) key.set(i, (rng.next_u64() >> 63) != 0);
  return key;
}

}  // namespace specklepuf::testing
