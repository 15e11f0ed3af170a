#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace depot3d {

/// Incremental SHA-256 (OpenSSL EVP underneath).
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view bytes);
  /// Lower-case hex digest. The hasher cannot be reused afterwards.
  std::string hex_digest();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// True for exactly 64 lower-case hex characters.
bool is_sha256_hex(std::string_view s) noexcept;

}  // namespace depot3d
