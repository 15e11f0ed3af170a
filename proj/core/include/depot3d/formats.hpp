#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depot3d/error.hpp"
#include "depot3d/format_class.hpp"

namespace depot3d {

enum class Severity { Info, Warning, Error };
std::string_view to_string(Severity s) noexcept;

struct FormatIssue {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;

  bool operator==(const FormatIssue&) const = default;
};

struct FormatVerdict {
  FormatClass format_class = FormatClass::DepositOnly;
  std::string detected_format;  // "ply", "dae", "pdf", ... or "unknown"
  std::vector<FormatIssue> issues;

  bool has_error() const;
  bool has_issue(std::string_view code) const;
};

/// Error raised by the PLY reader. `element`, `row` and `line` locate the
/// problem when they apply (PLY_TRUNCATED carries element + row,
/// PLY_BAD_HEADER carries the 1-based header line).
class FormatError : public Error {
 public:
  FormatError(std::string code, const std::string& message, std::string element = {},
              std::optional<std::uint64_t> row = std::nullopt,
              std::optional<std::size_t> line = std::nullopt)
      : Error(std::move(code), message), element_(std::move(element)), row_(row), line_(line) {}

  const std::string& element() const noexcept { return element_; }
  std::optional<std::uint64_t> row() const noexcept { return row_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::string element_;
  std::optional<std::uint64_t> row_;
  std::optional<std::size_t> line_;
};

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

enum class PlyEncoding { Ascii, BinaryLittleEndian, BinaryBigEndian };
enum class PlyScalar { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::string_view to_string(PlyEncoding e) noexcept;
/// Canonical sized name ("int8" ... "float64").
std::string_view to_string(PlyScalar t) noexcept;
/// Accepts sized names and the legacy aliases (char, uchar, short, ushort,
/// int, uint, float, double, plus int8/uint8-style spellings).
std::optional<PlyScalar> ply_scalar_from_name(std::string_view name) noexcept;
std::size_t byte_width(PlyScalar t) noexcept;
bool is_integral(PlyScalar t) noexcept;

struct PlyProperty {
  std::string name;
  PlyScalar type = PlyScalar::Float32;        // item type for lists
  std::optional<PlyScalar> list_count_type;   // set for list properties

  bool is_list() const noexcept { return list_count_type.has_value(); }
  bool operator==(const PlyProperty&) const = default;
};

/// Column storage for one property. Every PLY scalar type is exactly
/// representable as a double, so values are held as doubles. List columns
/// are flattened: row i spans values[offsets[i] .. offsets[i+1]).
struct PlyColumn {
  std::vector<double> values;
  std::vector<std::uint64_t> offsets;  // empty for scalar columns, rows+1 entries otherwise

  /// Bit-wise comparison (distinguishes -0.0 from 0.0, NaN payloads compare equal to themselves).
  bool operator==(const PlyColumn& other) const;
};

struct PlyElement {
  std::string name;
  std::uint64_t count = 0;
  std::vector<PlyProperty> properties;
  std::vector<PlyColumn> columns;  // parallel to properties

  int property_index(std::string_view name) const;
  bool operator==(const PlyElement&) const = default;
};

struct PlyModel {
  PlyEncoding encoding = PlyEncoding::Ascii;
  std::string version = "1.0";
  std::vector<std::string> comments;
  std::vector<std::string> obj_info;
  std::vector<PlyElement> elements;

  const PlyElement* find(std::string_view element) const;
  PlyElement* find(std::string_view element);

  bool operator==(const PlyModel&) const = default;
};

/// Equality that ignores the encoding.
bool same_content(const PlyModel& a, const PlyModel& b);

/// Throws FormatError("PLY_INVALID_MODEL") when row counts, list offsets,
/// property names or value ranges break the model invariants.
void check_model(const PlyModel& m);

/// Parses a complete PLY file. Errors: PLY_BAD_MAGIC, PLY_BAD_HEADER,
/// PLY_TYPE_UNKNOWN, PLY_TRUNCATED, PLY_BAD_VALUE. Non-fatal findings
/// (trailing bytes) are appended to `warnings` when given.
PlyModel parse_ply(std::string_view bytes, std::vector<FormatIssue>* warnings = nullptr);

std::string write_ply(const PlyModel& m, PlyEncoding encoding);

/// Seeded uniform subsample of the vertex element (reservoir sampling);
/// every other element is dropped. Selected rows keep their input order.
/// Errors: TARGET_ZERO, NO_VERTEX_ELEMENT.
PlyModel decimate(const PlyModel& m, std::uint64_t target, std::uint64_t seed);

/// File name used for preview derivatives: "<object_id>.preview.ply".
std::string preview_filename(std::uint64_t object_id);

// ---------------------------------------------------------------------------
// COLLADA and classification
// ---------------------------------------------------------------------------

/// Structural COLLADA 1.4.1 check: well-formed XML, COLLADA root with
/// version="1.4.1", an asset child with created and modified, unique ids,
/// and every "#id" reference resolving inside the document.
FormatVerdict validate_collada(std::string_view bytes);

/// Content sniffing first, extension second. PLY and DAE are parsed; other
/// whitelisted formats are accepted on their magic bytes.
FormatVerdict classify(std::string_view filename, std::string_view bytes,
                       const ArchivableWhitelist& whitelist = {});

}  // namespace depot3d
