#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>

#include "depot3d/formats.hpp"

namespace depot3d {

namespace {

constexpr std::size_t kMaxHeaderBytes = 1 << 20;

struct ScalarName {
  std::string_view name;
  PlyScalar type;
};

constexpr ScalarName kScalarNames[] = {
    {"int8", PlyScalar::Int8},       {"char", PlyScalar::Int8},
    {"uint8", PlyScalar::UInt8},     {"uchar", PlyScalar::UInt8},
    {"int16", PlyScalar::Int16},     {"short", PlyScalar::Int16},
    {"uint16", PlyScalar::UInt16},   {"ushort", PlyScalar::UInt16},
    {"int32", PlyScalar::Int32},     {"int", PlyScalar::Int32},
    {"uint32", PlyScalar::UInt32},   {"uint", PlyScalar::UInt32},
    {"float32", PlyScalar::Float32}, {"float", PlyScalar::Float32},
    {"float64", PlyScalar::Float64}, {"double", PlyScalar::Float64},
};

std::pair<double, double> integral_range(PlyScalar t) {
  switch (t) {
    case PlyScalar::Int8: return {-128.0, 127.0};
    case PlyScalar::UInt8: return {0.0, 255.0};
    case PlyScalar::Int16: return {-32768.0, 32767.0};
    case PlyScalar::UInt16: return {0.0, 65535.0};
    case PlyScalar::Int32: return {-2147483648.0, 2147483647.0};
    case PlyScalar::UInt32: return {0.0, 4294967295.0};
    default: return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
}

bool representable(PlyScalar t, double v) {
  if (t == PlyScalar::Float64) return true;
  if (t == PlyScalar::Float32) {
    return std::isnan(v) || static_cast<double>(static_cast<float>(v)) == v;
  }
  const auto [lo, hi] = integral_range(t);
  return v >= lo && v <= hi && std::trunc(v) == v;
}

// --- header ---------------------------------------------------------------

struct Header {
  PlyModel model;
  std::size_t data_offset = 0;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty() || s.front() == '+' || s.front() == '-') return false;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && end == s.data() + s.size();
}

[[noreturn]] void bad_header(std::size_t line, const std::string& why) {
  throw FormatError("PLY_BAD_HEADER", "header line " + std::to_string(line) + ": " + why, {},
                    std::nullopt, line);
}

PlyScalar scalar_or_throw(std::string_view name, std::size_t line) {
  if (const auto t = ply_scalar_from_name(name)) return *t;
  throw FormatError("PLY_TYPE_UNKNOWN",
                    "header line " + std::to_string(line) + ": unknown type '" + std::string(name) + "'",
                    {}, std::nullopt, line);
}

Header parse_header(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 3) != "ply" || (bytes[3] != '\n' && bytes[3] != '\r')) {
    throw FormatError("PLY_BAD_MAGIC", "file does not start with 'ply'");
  }
  Header h;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_format = false;
  bool done = false;
  std::set<std::string> element_names;

  while (!done) {
    if (pos >= bytes.size() || pos > kMaxHeaderBytes) bad_header(line_no + 1, "missing end_header");
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) bad_header(line_no + 1, "missing end_header");
    std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line_no == 1) {
      if (line != "ply") throw FormatError("PLY_BAD_MAGIC", "file does not start with 'ply'");
      continue;
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) bad_header(line_no, "blank line");
    const auto keyword = tokens[0];

    if (keyword == "comment" || keyword == "obj_info") {
      auto text = line.substr(line.find(keyword) + keyword.size());
      if (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
      (keyword == "comment" ? h.model.comments : h.model.obj_info).emplace_back(text);
    } else if (keyword == "format") {
      if (saw_format) bad_header(line_no, "duplicate format line");
      if (line_no != 2) bad_header(line_no, "format must follow the magic line");
      if (tokens.size() != 3) bad_header(line_no, "format line needs encoding and version");
      if (tokens[1] == "ascii") {
        h.model.encoding = PlyEncoding::Ascii;
      } else if (tokens[1] == "binary_little_endian") {
        h.model.encoding = PlyEncoding::BinaryLittleEndian;
      } else if (tokens[1] == "binary_big_endian") {
        h.model.encoding = PlyEncoding::BinaryBigEndian;
      } else {
        bad_header(line_no, "unknown encoding '" + std::string(tokens[1]) + "'");
      }
      if (tokens[2] != "1.0") bad_header(line_no, "unsupported version '" + std::string(tokens[2]) + "'");
      h.model.version = "1.0";
      saw_format = true;
    } else if (keyword == "element") {
      if (!saw_format) bad_header(line_no, "element before format line");
      if (tokens.size() != 3) bad_header(line_no, "element line needs a name and a count");
      PlyElement e;
      e.name = std::string(tokens[1]);
      if (!parse_u64(tokens[2], e.count)) bad_header(line_no, "element count is not a non-negative integer");
      if (!element_names.insert(e.name).second) bad_header(line_no, "duplicate element '" + e.name + "'");
      h.model.elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (h.model.elements.empty()) bad_header(line_no, "property before any element");
      auto& e = h.model.elements.back();
      PlyProperty p;
      if (tokens.size() >= 2 && tokens[1] == "list") {
        if (tokens.size() != 5) bad_header(line_no, "list property needs count type, item type and name");
        p.list_count_type = scalar_or_throw(tokens[2], line_no);
        if (!is_integral(*p.list_count_type)) bad_header(line_no, "list count type must be integral");
        p.type = scalar_or_throw(tokens[3], line_no);
        p.name = std::string(tokens[4]);
      } else {
        if (tokens.size() != 3) bad_header(line_no, "property line needs a type and a name");
        p.type = scalar_or_throw(tokens[1], line_no);
        p.name = std::string(tokens[2]);
      }
      if (e.property_index(p.name) >= 0) bad_header(line_no, "duplicate property '" + p.name + "'");
      e.properties.push_back(std::move(p));
    } else if (keyword == "end_header") {
      if (tokens.size() != 1) bad_header(line_no, "trailing text after end_header");
      if (!saw_format) bad_header(line_no, "missing format line");
      done = true;
    } else {
      bad_header(line_no, "unknown keyword '" + std::string(keyword) + "'");
    }
  }
  h.data_offset = pos;
  return h;
}

// --- payload --------------------------------------------------------------

[[noreturn]] void truncated(const PlyElement& e, std::uint64_t row) {
  throw FormatError("PLY_TRUNCATED",
                    "element '" + e.name + "' row " + std::to_string(row) + " is incomplete", e.name,
                    row);
}

[[noreturn]] void bad_value(const PlyElement& e, std::uint64_t row, const std::string& why) {
  throw FormatError("PLY_BAD_VALUE", "element '" + e.name + "' row " + std::to_string(row) + ": " + why,
                    e.name, row);
}

class AsciiReader {
 public:
  explicit AsciiReader(std::string_view data) : data_(data) {}

  // Returns an empty view at end of input.
  std::string_view next() {
    while (pos_ < data_.size() && is_space(data_[pos_])) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !is_space(data_[pos_])) ++pos_;
    return data_.substr(start, pos_ - start);
  }

  std::size_t remaining() const { return data_.size() - pos_; }

  bool only_whitespace_left() const {
    return std::all_of(data_.begin() + static_cast<std::ptrdiff_t>(pos_), data_.end(), is_space);
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

  std::string_view data_;
  std::size_t pos_ = 0;
};

bool parse_ascii_value(std::string_view token, PlyScalar type, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  if (is_integral(type)) {
    std::int64_t v = 0;
    const auto [end, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || end != last) return false;
    out = static_cast<double>(v);
    return representable(type, out);
  }
  if (type == PlyScalar::Float32) {
    float f = 0;
    const auto [end, ec] = std::from_chars(first, last, f);
    if (ec != std::errc{} || end != last) return false;
    out = f;
    return true;
  }
  const auto [end, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && end == last;
}

void read_ascii(PlyModel& m, std::string_view data, std::vector<FormatIssue>* warnings) {
  AsciiReader reader(data);
  for (auto& e : m.elements) {
    e.columns.assign(e.properties.size(), {});
    if (e.properties.empty()) continue;
    // Each scalar token needs at least one character plus a separator.
    const std::uint64_t min_row = 2 * e.properties.size() - 1;
    if (e.count > 0 && (e.count - 1) > reader.remaining() / min_row) {
      const std::uint64_t rows_possible = reader.remaining() / min_row + 1;
      truncated(e, std::min(e.count, rows_possible));
    }
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      if (e.properties[p].is_list()) {
        e.columns[p].offsets.reserve(e.count + 1);
        e.columns[p].offsets.push_back(0);
      } else {
        e.columns[p].values.reserve(e.count);
      }
    }
    for (std::uint64_t row = 0; row < e.count; ++row) {
      for (std::size_t p = 0; p < e.properties.size(); ++p) {
        const auto& prop = e.properties[p];
        auto& col = e.columns[p];
        if (prop.is_list()) {
          const auto token = reader.next();
          if (token.empty()) truncated(e, row);
          double n = 0;
          if (!parse_ascii_value(token, *prop.list_count_type, n) || n < 0) {
            bad_value(e, row, "bad list count '" + std::string(token) + "'");
          }
          const auto items = static_cast<std::uint64_t>(n);
          if (items > reader.remaining()) truncated(e, row);
          for (std::uint64_t k = 0; k < items; ++k) {
            const auto item = reader.next();
            if (item.empty()) truncated(e, row);
            double v = 0;
            if (!parse_ascii_value(item, prop.type, v)) {
              bad_value(e, row, "bad " + std::string(to_string(prop.type)) + " '" + std::string(item) + "'");
            }
            col.values.push_back(v);
          }
          col.offsets.push_back(col.values.size());
        } else {
          const auto token = reader.next();
          if (token.empty()) truncated(e, row);
          double v = 0;
          if (!parse_ascii_value(token, prop.type, v)) {
            bad_value(e, row, "bad " + std::string(to_string(prop.type)) + " '" + std::string(token) + "'");
          }
          col.values.push_back(v);
        }
      }
    }
  }
  if (!reader.only_whitespace_left() && warnings != nullptr) {
    warnings->push_back({Severity::Warning, "PLY_TRAILING_BYTES", "data after the last element"});
  }
}

template <typename T>
T load(const char* p, bool swap) {
  std::array<char, sizeof(T)> raw;
  std::memcpy(raw.data(), p, sizeof(T));
  if (swap) std::reverse(raw.begin(), raw.end());
  return std::bit_cast<T>(raw);
}

double load_scalar(const char* p, PlyScalar t, bool swap) {
  switch (t) {
    case PlyScalar::Int8: return load<std::int8_t>(p, false);
    case PlyScalar::UInt8: return load<std::uint8_t>(p, false);
    case PlyScalar::Int16: return load<std::int16_t>(p, swap);
    case PlyScalar::UInt16: return load<std::uint16_t>(p, swap);
    case PlyScalar::Int32: return load<std::int32_t>(p, swap);
    case PlyScalar::UInt32: return load<std::uint32_t>(p, swap);
    case PlyScalar::Float32: return load<float>(p, swap);
    case PlyScalar::Float64: return load<double>(p, swap);
  }
  return 0;
}

std::size_t read_binary(PlyModel& m, std::string_view data, bool big_endian) {
  const bool swap = big_endian != (std::endian::native == std::endian::big);
  std::size_t pos = 0;
  for (auto& e : m.elements) {
    e.columns.assign(e.properties.size(), {});
    if (e.properties.empty()) continue;
    std::uint64_t min_row = 0;
    for (const auto& p : e.properties) {
      min_row += byte_width(p.is_list() ? *p.list_count_type : p.type);
    }
    const std::size_t remaining = data.size() - pos;
    if (e.count > remaining / min_row) truncated(e, remaining / min_row);
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      if (e.properties[p].is_list()) {
        e.columns[p].offsets.reserve(e.count + 1);
        e.columns[p].offsets.push_back(0);
      } else {
        e.columns[p].values.reserve(e.count);
      }
    }
    for (std::uint64_t row = 0; row < e.count; ++row) {
      for (std::size_t p = 0; p < e.properties.size(); ++p) {
        const auto& prop = e.properties[p];
        auto& col = e.columns[p];
        if (prop.is_list()) {
          const auto cw = byte_width(*prop.list_count_type);
          if (data.size() - pos < cw) truncated(e, row);
          const double n = load_scalar(data.data() + pos, *prop.list_count_type, swap);
          pos += cw;
          if (n < 0) bad_value(e, row, "negative list count");
          const auto items = static_cast<std::uint64_t>(n);
          const auto iw = byte_width(prop.type);
          if (items > (data.size() - pos) / iw) truncated(e, row);
          for (std::uint64_t k = 0; k < items; ++k) {
            col.values.push_back(load_scalar(data.data() + pos, prop.type, swap));
            pos += iw;
          }
          col.offsets.push_back(col.values.size());
        } else {
          const auto w = byte_width(prop.type);
          if (data.size() - pos < w) truncated(e, row);
          col.values.push_back(load_scalar(data.data() + pos, prop.type, swap));
          pos += w;
        }
      }
    }
  }
  return pos;
}

// --- writer ---------------------------------------------------------------

template <typename T>
void store(std::string& out, T v, bool swap) {
  auto raw = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if (swap) std::reverse(raw.begin(), raw.end());
  out.append(raw.data(), raw.size());
}

void store_scalar(std::string& out, double v, PlyScalar t, bool swap) {
  switch (t) {
    case PlyScalar::Int8: store(out, static_cast<std::int8_t>(v), false); break;
    case PlyScalar::UInt8: store(out, static_cast<std::uint8_t>(v), false); break;
    case PlyScalar::Int16: store(out, static_cast<std::int16_t>(v), swap); break;
    case PlyScalar::UInt16: store(out, static_cast<std::uint16_t>(v), swap); break;
    case PlyScalar::Int32: store(out, static_cast<std::int32_t>(v), swap); break;
    case PlyScalar::UInt32: store(out, static_cast<std::uint32_t>(v), swap); break;
    case PlyScalar::Float32: store(out, static_cast<float>(v), swap); break;
    case PlyScalar::Float64: store(out, v, swap); break;
  }
}

void append_ascii(std::string& out, double v, PlyScalar t) {
  std::array<char, 64> buf{};
  std::to_chars_result r{};
  if (is_integral(t)) {
    r = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<std::int64_t>(v));
  } else if (t == PlyScalar::Float32) {
    r = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<float>(v));
  } else {
    r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  }
  out.append(buf.data(), r.ptr);
}

}  // namespace

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "?";
}

std::string_view to_string(PlyEncoding e) noexcept {
  switch (e) {
    case PlyEncoding::Ascii: return "ascii";
    case PlyEncoding::BinaryLittleEndian: return "binary_little_endian";
    case PlyEncoding::BinaryBigEndian: return "binary_big_endian";
  }
  return "?";
}

std::string_view to_string(PlyScalar t) noexcept {
  switch (t) {
    case PlyScalar::Int8: return "int8";
    case PlyScalar::UInt8: return "uint8";
    case PlyScalar::Int16: return "int16";
    case PlyScalar::UInt16: return "uint16";
    case PlyScalar::Int32: return "int32";
    case PlyScalar::UInt32: return "uint32";
    case PlyScalar::Float32: return "float32";
    case PlyScalar::Float64: return "float64";
  }
  return "?";
}

std::optional<PlyScalar> ply_scalar_from_name(std::string_view name) noexcept {
  for (const auto& n : kScalarNames) {
    if (n.name == name) return n.type;
  }
  return std::nullopt;
}

std::size_t byte_width(PlyScalar t) noexcept {
  switch (t) {
    case PlyScalar::Int8:
    case PlyScalar::UInt8: return 1;
    case PlyScalar::Int16:
    case PlyScalar::UInt16: return 2;
    case PlyScalar::Int32:
    case PlyScalar::UInt32:
    case PlyScalar::Float32: return 4;
    case PlyScalar::Float64: return 8;
  }
  return 0;
}

bool is_integral(PlyScalar t) noexcept {
  return t != PlyScalar::Float32 && t != PlyScalar::Float64;
}

bool PlyColumn::operator==(const PlyColumn& other) const {
  return offsets == other.offsets && values.size() == other.values.size() &&
         (values.empty() ||
          std::memcmp(values.data(), other.values.data(), values.size() * sizeof(double)) == 0);
}

int PlyElement::property_index(std::string_view prop) const {
  for (std::size_t i = 0; i < properties.size(); ++i) {
    if (properties[i].name == prop) return static_cast<int>(i);
  }
  return -1;
}

const PlyElement* PlyModel::find(std::string_view element) const {
  for (const auto& e : elements) {
    if (e.name == element) return &e;
  }
  return nullptr;
}

PlyElement* PlyModel::find(std::string_view element) {
  for (auto& e : elements) {
    if (e.name == element) return &e;
  }
  return nullptr;
}

bool same_content(const PlyModel& a, const PlyModel& b) {
  return a.version == b.version && a.comments == b.comments && a.obj_info == b.obj_info &&
         a.elements == b.elements;
}

void check_model(const PlyModel& m) {
  auto fail = [](const std::string& why) { throw FormatError("PLY_INVALID_MODEL", why); };
  std::set<std::string> names;
  for (const auto& e : m.elements) {
    if (e.name.empty() || e.name.find_first_of(" \t\r\n") != std::string::npos) {
      fail("bad element name '" + e.name + "'");
    }
    if (!names.insert(e.name).second) fail("duplicate element '" + e.name + "'");
    if (e.columns.size() != e.properties.size()) fail("element '" + e.name + "' column count mismatch");
    std::set<std::string> props;
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      const auto& prop = e.properties[p];
      const auto& col = e.columns[p];
      if (prop.name.empty() || prop.name.find_first_of(" \t\r\n") != std::string::npos) {
        fail("bad property name '" + prop.name + "'");
      }
      if (!props.insert(prop.name).second) fail("duplicate property '" + prop.name + "'");
      if (prop.is_list()) {
        if (!is_integral(*prop.list_count_type)) fail("list count type must be integral");
        if (col.offsets.size() != e.count + 1 || col.offsets.front() != 0 ||
            col.offsets.back() != col.values.size()) {
          fail("property '" + prop.name + "' row count differs from declared count");
        }
        const double max_items = integral_range(*prop.list_count_type).second;
        for (std::size_t r = 0; r < e.count; ++r) {
          if (col.offsets[r + 1] < col.offsets[r]) fail("list offsets decrease");
          if (static_cast<double>(col.offsets[r + 1] - col.offsets[r]) > max_items) {
            fail("list in '" + prop.name + "' longer than its count type allows");
          }
        }
      } else if (col.values.size() != e.count || !col.offsets.empty()) {
        fail("property '" + prop.name + "' row count differs from declared count");
      }
      for (double v : col.values) {
        if (!representable(prop.type, v)) {
          fail("value out of range for " + std::string(to_string(prop.type)) + " in '" + prop.name + "'");
        }
      }
    }
  }
  for (const auto& c : m.comments) {
    if (c.find_first_of("\r\n") != std::string::npos) fail("comment contains a line break");
  }
  for (const auto& c : m.obj_info) {
    if (c.find_first_of("\r\n") != std::string::npos) fail("obj_info contains a line break");
  }
}

PlyModel parse_ply(std::string_view bytes, std::vector<FormatIssue>* warnings) {
  Header h = parse_header(bytes);
  const auto data = bytes.substr(h.data_offset);
  if (h.model.encoding == PlyEncoding::Ascii) {
    read_ascii(h.model, data, warnings);
  } else {
    const auto used = read_binary(h.model, data, h.model.encoding == PlyEncoding::BinaryBigEndian);
    if (used != data.size() && warnings != nullptr) {
      warnings->push_back({Severity::Warning, "PLY_TRAILING_BYTES",
                           std::to_string(data.size() - used) + " byte(s) after the last element"});
    }
  }
  return std::move(h.model);
}

std::string write_ply(const PlyModel& m, PlyEncoding encoding) {
  check_model(m);
  std::string out = "ply\nformat ";
  out += to_string(encoding);
  out += " 1.0\n";
  for (const auto& c : m.comments) out += "comment " + c + "\n";
  for (const auto& c : m.obj_info) out += "obj_info " + c + "\n";
  for (const auto& e : m.elements) {
    out += "element " + e.name + " " + std::to_string(e.count) + "\n";
    for (const auto& p : e.properties) {
      if (p.is_list()) {
        out += "property list ";
        out += to_string(*p.list_count_type);
        out += ' ';
      } else {
        out += "property ";
      }
      out += to_string(p.type);
      out += ' ' + p.name + "\n";
    }
  }
  out += "end_header\n";

  const bool ascii = encoding == PlyEncoding::Ascii;
  const bool swap = (encoding == PlyEncoding::BinaryBigEndian) != (std::endian::native == std::endian::big);
  for (const auto& e : m.elements) {
    for (std::uint64_t row = 0; row < e.count; ++row) {
      bool first = true;
      auto sep = [&] {
        if (!first) out += ' ';
        first = false;
      };
      for (std::size_t p = 0; p < e.properties.size(); ++p) {
        const auto& prop = e.properties[p];
        const auto& col = e.columns[p];
        if (prop.is_list()) {
          const auto begin = col.offsets[row];
          const auto end = col.offsets[row + 1];
          if (ascii) {
            sep();
            append_ascii(out, static_cast<double>(end - begin), *prop.list_count_type);
          } else {
            store_scalar(out, static_cast<double>(end - begin), *prop.list_count_type, swap);
          }
          for (auto k = begin; k < end; ++k) {
            if (ascii) {
              sep();
              append_ascii(out, col.values[k], prop.type);
            } else {
              store_scalar(out, col.values[k], prop.type, swap);
            }
          }
        } else if (ascii) {
          sep();
          append_ascii(out, col.values[row], prop.type);
        } else {
          store_scalar(out, col.values[row], prop.type, swap);
        }
      }
      if (ascii) out += '\n';
    }
  }
  return out;
}

}  // namespace depot3d
