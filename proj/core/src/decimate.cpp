#include <algorithm>
#include <limits>
#include <random>

#include "depot3d/formats.hpp"

namespace depot3d {

namespace {

// Uniform integer in [0, bound] by rejection, so the sequence depends only
// on the mt19937_64 output stream (which the standard pins exactly).
std::uint64_t uniform_upto(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == std::numeric_limits<std::uint64_t>::max()) return rng();
  const std::uint64_t range = bound + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % range;
}

}  // namespace

std::string preview_filename(std::uint64_t object_id) {
  return std::to_string(object_id) + ".preview.ply";
}

PlyModel decimate(const PlyModel& m, std::uint64_t target, std::uint64_t seed) {
  if (target == 0) throw Error("TARGET_ZERO", "decimation target must be positive");
  const PlyElement* vertex = m.find("vertex");
  if (vertex == nullptr) throw Error("NO_VERTEX_ELEMENT", "model has no vertex element");

  const std::uint64_t n = vertex->count;
  const std::uint64_t k = std::min(target, n);

  // Algorithm R reservoir over row indices.
  std::vector<std::uint64_t> chosen(k);
  for (std::uint64_t i = 0; i < k; ++i) chosen[i] = i;
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = k; i < n; ++i) {
    const std::uint64_t j = uniform_upto(rng, i);
    if (j < k) chosen[j] = i;
  }
  std::sort(chosen.begin(), chosen.end());

  PlyModel out;
  out.encoding = PlyEncoding::BinaryLittleEndian;
  out.version = m.version;
  out.comments = m.comments;
  out.comments.push_back("preview: " + std::to_string(k) + " of " + std::to_string(n) +
                         " vertices, seed " + std::to_string(seed));
  out.obj_info = m.obj_info;

  PlyElement e;
  e.name = vertex->name;
  e.count = k;
  e.properties = vertex->properties;
  e.columns.resize(e.properties.size());
  for (std::size_t p = 0; p < e.properties.size(); ++p) {
    const auto& src = vertex->columns[p];
    auto& dst = e.columns[p];
    if (e.properties[p].is_list()) {
      dst.offsets.push_back(0);
      for (auto row : chosen) {
        dst.values.insert(dst.values.end(), src.values.begin() + static_cast<std::ptrdiff_t>(src.offsets[row]),
                          src.values.begin() + static_cast<std::ptrdiff_t>(src.offsets[row + 1]));
        dst.offsets.push_back(dst.values.size());
      }
    } else {
      dst.values.reserve(k);
      for (auto row : chosen) dst.values.push_back(src.values[row]);
    }
  }
  out.elements.push_back(std::move(e));
  return out;
}

}  // namespace depot3d
