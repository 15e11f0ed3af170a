#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace depot3d {

enum class PidKind { Deposit, Object };

/// Letter used in the local part: 'd' for deposits, 'o' for virtual objects.
char kind_letter(PidKind kind) noexcept;
std::string_view to_string(PidKind kind) noexcept;

inline constexpr std::string_view kDefaultPidPrefix = "10.34969";
inline constexpr std::string_view kDefaultPidNamespace = "CND3D";
inline constexpr std::string_view kDoiResolver = "https://doi.org/";

/// DOI-shaped identifier `<prefix>/<namespace>/<local_id>.<d|o>.<year>`.
struct PersistentIdentifier {
  std::string prefix{kDefaultPidPrefix};
  std::string ns{kDefaultPidNamespace};
  std::uint64_t local_id = 0;
  PidKind kind = PidKind::Deposit;
  int year = 0;

  auto operator<=>(const PersistentIdentifier&) const = default;
};

std::string format(const PersistentIdentifier& pid);

/// Accepts the canonical form, optionally wrapped in surrounding whitespace
/// or preceded by "doi:" / a doi.org resolver URL; the kind letter is
/// case-insensitive. Throws Error("MALFORMED") otherwise.
PersistentIdentifier parse_pid(std::string_view text);

std::string resolve_url(const PersistentIdentifier& pid);

/// Configurable prefix/namespace for self-hosted instances.
struct PidScheme {
  std::string prefix{kDefaultPidPrefix};
  std::string ns{kDefaultPidNamespace};
};

/// Local registry of minted identifiers. Never reuses a (kind, local_id).
/// Thread-safe; callers that need to mint several pids atomically use
/// `mint_batch`.
class PidRegistry {
 public:
  explicit PidRegistry(PidScheme scheme = {});

  const PidScheme& scheme() const noexcept { return scheme_; }

  /// Throws Error("DUPLICATE_ID") if (kind, local_id) was already minted
  /// and Error("MALFORMED") for local_id 0 or a year outside 1000..9999.
  PersistentIdentifier mint(PidKind kind, std::uint64_t local_id, int year);

  /// Next auto-assigned local id for `kind` (strictly above every id seen).
  std::uint64_t next_local_id(PidKind kind) const;
  PersistentIdentifier mint_next(PidKind kind, int year);

  struct Request {
    PidKind kind;
    std::uint64_t local_id;
    int year;
  };
  /// All-or-nothing: either every request is minted or none is.
  std::vector<PersistentIdentifier> mint_batch(const std::vector<Request>& requests);

  /// Re-registers an identifier loaded from persistent storage.
  void restore(const PersistentIdentifier& pid);

  bool contains(PidKind kind, std::uint64_t local_id) const;
  std::size_t size() const;
  std::vector<std::string> canonical_strings() const;

 private:
  void check_locked(PidKind kind, std::uint64_t local_id, int year) const;

  PidScheme scheme_;
  mutable std::mutex mutex_;
  std::map<PidKind, std::set<std::uint64_t>> minted_;
  std::set<std::string> canonical_;
};

}  // namespace depot3d
