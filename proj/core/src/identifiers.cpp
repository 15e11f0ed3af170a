#include "depot3d/identifiers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "depot3d/error.hpp"

namespace depot3d {

namespace {

[[noreturn]] void malformed(std::string_view text, std::string_view why) {
  throw Error("MALFORMED", "'" + std::string(text) + "': " + std::string(why));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return c >= '0' && c <= '9'; });
}

bool valid_namespace(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
}

}  // namespace

char kind_letter(PidKind kind) noexcept { return kind == PidKind::Deposit ? 'd' : 'o'; }

std::string_view to_string(PidKind kind) noexcept {
  return kind == PidKind::Deposit ? "deposit" : "object";
}

std::string format(const PersistentIdentifier& pid) {
  std::string out;
  out.reserve(pid.prefix.size() + pid.ns.size() + 32);
  out += pid.prefix;
  out += '/';
  out += pid.ns;
  out += '/';
  out += std::to_string(pid.local_id);
  out += '.';
  out += kind_letter(pid.kind);
  out += '.';
  out += std::to_string(pid.year);
  return out;
}

PersistentIdentifier parse_pid(std::string_view text) {
  std::string_view s = trim(text);
  if (starts_with_icase(s, "https://doi.org/")) {
    s.remove_prefix(16);
  } else if (starts_with_icase(s, "http://doi.org/")) {
    s.remove_prefix(15);
  } else if (starts_with_icase(s, "doi:")) {
    s.remove_prefix(4);
  }

  const auto slash1 = s.find('/');
  if (slash1 == std::string_view::npos) malformed(text, "expected prefix/namespace/suffix");
  const auto slash2 = s.find('/', slash1 + 1);
  if (slash2 == std::string_view::npos) malformed(text, "expected prefix/namespace/suffix");
  if (s.find('/', slash2 + 1) != std::string_view::npos) malformed(text, "too many segments");

  PersistentIdentifier pid;
  const auto prefix = s.substr(0, slash1);
  const auto ns = s.substr(slash1 + 1, slash2 - slash1 - 1);
  const auto suffix = s.substr(slash2 + 1);

  // Registrant prefixes are "10." followed by dot-separated digit groups.
  if (prefix.size() < 4 || prefix.substr(0, 3) != "10.") malformed(text, "prefix must start with 10.");
  {
    std::string_view rest = prefix.substr(3);
    while (true) {
      const auto dot = rest.find('.');
      if (!all_digits(rest.substr(0, dot))) malformed(text, "non-numeric prefix");
      if (dot == std::string_view::npos) break;
      rest.remove_prefix(dot + 1);
    }
  }
  if (!valid_namespace(ns)) malformed(text, "bad namespace");

  const auto dot1 = suffix.find('.');
  const auto dot2 = dot1 == std::string_view::npos ? dot1 : suffix.find('.', dot1 + 1);
  if (dot1 == std::string_view::npos || dot2 == std::string_view::npos ||
      suffix.find('.', dot2 + 1) != std::string_view::npos) {
    malformed(text, "suffix must be <id>.<kind>.<year>");
  }
  const auto id_part = suffix.substr(0, dot1);
  const auto kind_part = suffix.substr(dot1 + 1, dot2 - dot1 - 1);
  const auto year_part = suffix.substr(dot2 + 1);

  if (!all_digits(id_part) || id_part.front() == '0') malformed(text, "local id must be a positive integer");
  const auto [id_end, id_ec] =
      std::from_chars(id_part.data(), id_part.data() + id_part.size(), pid.local_id);
  if (id_ec != std::errc{} || id_end != id_part.data() + id_part.size()) {
    malformed(text, "local id out of range");
  }

  if (kind_part.size() != 1) malformed(text, "unknown kind letter");
  switch (std::tolower(static_cast<unsigned char>(kind_part.front()))) {
    case 'd': pid.kind = PidKind::Deposit; break;
    case 'o': pid.kind = PidKind::Object; break;
    default: malformed(text, "unknown kind letter");
  }

  if (year_part.size() != 4 || !all_digits(year_part) || year_part.front() == '0') {
    malformed(text, "year must be four digits");
  }
  std::from_chars(year_part.data(), year_part.data() + 4, pid.year);

  pid.prefix = std::string(prefix);
  pid.ns = std::string(ns);
  return pid;
}

std::string resolve_url(const PersistentIdentifier& pid) {
  return std::string(kDoiResolver) + format(pid);
}

PidRegistry::PidRegistry(PidScheme scheme) : scheme_(std::move(scheme)) {}

void PidRegistry::check_locked(PidKind kind, std::uint64_t local_id, int year) const {
  if (local_id == 0) throw Error("MALFORMED", "local id must be positive");
  if (year < 1000 || year > 9999) {
    throw Error("MALFORMED", "year must have four digits: " + std::to_string(year));
  }
  const auto it = minted_.find(kind);
  if (it != minted_.end() && it->second.count(local_id) != 0) {
    throw Error("DUPLICATE_ID", std::string(to_string(kind)) + " " + std::to_string(local_id) +
                                    " already has an identifier");
  }
}

PersistentIdentifier PidRegistry::mint(PidKind kind, std::uint64_t local_id, int year) {
  std::lock_guard lock(mutex_);
  check_locked(kind, local_id, year);
  PersistentIdentifier pid{scheme_.prefix, scheme_.ns, local_id, kind, year};
  minted_[kind].insert(local_id);
  canonical_.insert(format(pid));
  return pid;
}

std::uint64_t PidRegistry::next_local_id(PidKind kind) const {
  std::lock_guard lock(mutex_);
  const auto it = minted_.find(kind);
  if (it == minted_.end() || it->second.empty()) return 1;
  return *it->second.rbegin() + 1;
}

PersistentIdentifier PidRegistry::mint_next(PidKind kind, int year) {
  std::lock_guard lock(mutex_);
  const auto it = minted_.find(kind);
  const std::uint64_t id = (it == minted_.end() || it->second.empty()) ? 1 : *it->second.rbegin() + 1;
  check_locked(kind, id, year);
  PersistentIdentifier pid{scheme_.prefix, scheme_.ns, id, kind, year};
  minted_[kind].insert(id);
  canonical_.insert(format(pid));
  return pid;
}

std::vector<PersistentIdentifier> PidRegistry::mint_batch(const std::vector<Request>& requests) {
  std::lock_guard lock(mutex_);
  std::map<PidKind, std::set<std::uint64_t>> pending;
  for (const auto& r : requests) {
    check_locked(r.kind, r.local_id, r.year);
    if (!pending[r.kind].insert(r.local_id).second) {
      throw Error("DUPLICATE_ID", std::string(to_string(r.kind)) + " " +
                                      std::to_string(r.local_id) + " requested twice");
    }
  }
  std::vector<PersistentIdentifier> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    PersistentIdentifier pid{scheme_.prefix, scheme_.ns, r.local_id, r.kind, r.year};
    minted_[r.kind].insert(r.local_id);
    canonical_.insert(format(pid));
    out.push_back(std::move(pid));
  }
  return out;
}

void PidRegistry::restore(const PersistentIdentifier& pid) {
  std::lock_guard lock(mutex_);
  minted_[pid.kind].insert(pid.local_id);
  canonical_.insert(format(pid));
}

bool PidRegistry::contains(PidKind kind, std::uint64_t local_id) const {
  std::lock_guard lock(mutex_);
  const auto it = minted_.find(kind);
  return it != minted_.end() && it->second.count(local_id) != 0;
}

std::size_t PidRegistry::size() const {
  std::lock_guard lock(mutex_);
  return canonical_.size();
}

std::vector<std::string> PidRegistry::canonical_strings() const {
  std::lock_guard lock(mutex_);
  return {canonical_.begin(), canonical_.end()};
}

}  // namespace depot3d
