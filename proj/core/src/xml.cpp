#include "depot3d/xml.hpp"

#include <charconv>
#include <set>

#include "depot3d/error.hpp"

namespace depot3d::xml {

namespace {

constexpr std::size_t kMaxDepth = 256;

bool is_name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool valid_char(std::uint32_t cp) {
  return cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
         (cp >= 0xE000 && cp <= 0xFFFD) || (cp >= 0x10000 && cp <= 0x10FFFF);
}

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  Element run() {
    check_encoding();
    if (doc_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    if (doc_.substr(pos_, 5) == "<?xml") skip_pi();
    skip_misc(true);
    if (eof() || peek() != '<') fail("expected root element");
    Element root = element(0);
    skip_misc(false);
    if (!eof()) fail("content after the root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error("XML_MALFORMED", "line " + std::to_string(line_) + ": " + why);
  }

  void check_encoding() {
    std::size_t i = 0;
    std::size_t line = 1;
    while (i < doc_.size()) {
      const auto c = static_cast<unsigned char>(doc_[i]);
      std::uint32_t cp = 0;
      std::size_t len = 0;
      if (c < 0x80) {
        cp = c;
        len = 1;
      } else if ((c & 0xE0) == 0xC0) {
        cp = c & 0x1F;
        len = 2;
      } else if ((c & 0xF0) == 0xE0) {
        cp = c & 0x0F;
        len = 3;
      } else if ((c & 0xF8) == 0xF0) {
        cp = c & 0x07;
        len = 4;
      } else {
        line_ = line;
        fail("invalid UTF-8");
      }
      if (i + len > doc_.size()) {
        line_ = line;
        fail("truncated UTF-8 sequence");
      }
      for (std::size_t k = 1; k < len; ++k) {
        const auto cc = static_cast<unsigned char>(doc_[i + k]);
        if ((cc & 0xC0) != 0x80) {
          line_ = line;
          fail("invalid UTF-8");
        }
        cp = (cp << 6) | (cc & 0x3F);
      }
      static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
      if (cp < kMin[len] || !valid_char(cp)) {
        line_ = line;
        fail("character not allowed in XML");
      }
      if (cp == '\n') ++line;
      i += len;
    }
  }

  bool eof() const { return pos_ >= doc_.size(); }
  char peek() const { return doc_[pos_]; }
  bool starts(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < doc_.size(); ++i) {
      if (doc_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) advance();
  }

  void skip_until(std::string_view terminator, const char* what) {
    const auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    advance(end + terminator.size() - pos_);
  }

  void skip_pi() {
    advance(2);
    if (eof() || !is_name_start(static_cast<unsigned char>(peek()))) fail("bad processing instruction");
    skip_until("?>", "processing instruction");
  }

  void skip_comment() {
    advance(4);
    const auto end = doc_.find("--", pos_);
    if (end == std::string_view::npos) fail("unterminated comment");
    if (doc_.substr(end, 3) != "-->") fail("'--' inside comment");
    advance(end + 3 - pos_);
  }

  void skip_doctype() {
    advance(9);
    int depth = 0;
    while (!eof()) {
      const char c = peek();
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == '>' && depth == 0) {
        advance();
        return;
      }
      advance();
    }
    fail("unterminated DOCTYPE");
  }

  void skip_misc(bool allow_doctype) {
    while (true) {
      skip_ws();
      if (starts("<!--")) {
        skip_comment();
      } else if (starts("<?")) {
        if (starts("<?xml ") || starts("<?xml?")) fail("misplaced XML declaration");
        skip_pi();
      } else if (allow_doctype && starts("<!DOCTYPE")) {
        skip_doctype();
        allow_doctype = false;
      } else {
        return;
      }
    }
  }

  std::string name() {
    if (eof() || !is_name_start(static_cast<unsigned char>(peek()))) fail("expected a name");
    const std::size_t start = pos_;
    while (!eof() && is_name_char(static_cast<unsigned char>(peek()))) advance();
    return std::string(doc_.substr(start, pos_ - start));
  }

  void reference(std::string& out) {
    advance();  // '&'
    const auto semi = doc_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity reference");
    const auto ref = doc_.substr(pos_, semi - pos_);
    if (ref == "lt") out += '<';
    else if (ref == "gt") out += '>';
    else if (ref == "amp") out += '&';
    else if (ref == "apos") out += '\'';
    else if (ref == "quot") out += '"';
    else if (ref.size() > 1 && ref[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = ref[1] == 'x';
      const auto digits = ref.substr(hex ? 2 : 1);
      const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (digits.empty() || ec != std::errc{} || end != digits.data() + digits.size() || !valid_char(cp)) {
        fail("bad character reference");
      }
      append_utf8(out, cp);
    } else {
      fail("undefined entity '" + std::string(ref) + "'");
    }
    advance(semi + 1 - pos_);
  }

  std::string attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("attribute value must be quoted");
    const char quote = peek();
    advance();
    std::string value;
    while (true) {
      if (eof()) fail("unterminated attribute value");
      const char c = peek();
      if (c == quote) {
        advance();
        return value;
      }
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        reference(value);
      } else {
        value.push_back(c);
        advance();
      }
    }
  }

  Element element(std::size_t depth) {
    if (depth > kMaxDepth) fail("nesting too deep");
    Element e;
    e.line = line_;
    advance();  // '<'
    e.name = name();
    std::set<std::string> seen;
    while (true) {
      const std::size_t before = pos_;
      skip_ws();
      if (eof()) fail("unterminated start tag");
      if (starts("/>")) {
        advance(2);
        return e;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      if (pos_ == before) fail("expected whitespace before attribute");
      auto key = name();
      skip_ws();
      if (eof() || peek() != '=') fail("expected '=' after attribute name");
      advance();
      skip_ws();
      auto value = attribute_value();
      if (!seen.insert(key).second) fail("duplicate attribute '" + key + "'");
      e.attributes.emplace_back(std::move(key), std::move(value));
    }

    while (true) {
      if (eof()) fail("unclosed element <" + e.name + ">");
      if (starts("</")) {
        advance(2);
        const auto closing = name();
        if (closing != e.name) fail("mismatched end tag </" + closing + "> for <" + e.name + ">");
        skip_ws();
        if (eof() || peek() != '>') fail("malformed end tag");
        advance();
        return e;
      }
      if (starts("<!--")) {
        skip_comment();
      } else if (starts("<![CDATA[")) {
        advance(9);
        const auto end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        e.text.append(doc_.substr(pos_, end - pos_));
        advance(end + 3 - pos_);
      } else if (starts("<?")) {
        skip_pi();
      } else if (peek() == '<') {
        if (starts("<!")) fail("unexpected markup declaration");
        e.children.push_back(element(depth + 1));
      } else if (peek() == '&') {
        reference(e.text);
      } else {
        if (starts("]]>")) fail("']]>' in character data");
        e.text.push_back(peek());
        advance();
      }
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

void serialize_into(std::string& out, const Element& e) {
  out += '<';
  out += e.name;
  for (const auto& [k, v] : e.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v);
    out += '"';
  }
  if (e.text.empty() && e.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  out += escape(e.text);
  for (const auto& c : e.children) serialize_into(out, c);
  out += "</";
  out += e.name;
  out += '>';
}

}  // namespace

const std::string* Element::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string_view Element::local_name() const {
  const std::string_view n = name;
  const auto colon = n.find(':');
  return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

const Element* Element::child(std::string_view local) const {
  for (const auto& c : children) {
    if (c.local_name() == local) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view local) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.local_name() == local) out.push_back(&c);
  }
  return out;
}

Element parse(std::string_view document) { return Parser(document).run(); }

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c >= 0x80) {
      // Copy well-formed UTF-8 sequences of allowed characters, replace anything else.
      std::size_t len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : (c & 0xF8) == 0xF0 ? 4 : 0;
      std::uint32_t cp = len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
      bool ok = len != 0 && i + len <= text.size();
      for (std::size_t k = 1; ok && k < len; ++k) {
        const auto cc = static_cast<unsigned char>(text[i + k]);
        ok = (cc & 0xC0) == 0x80;
        cp = (cp << 6) | (cc & 0x3F);
      }
      static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
      if (ok && cp >= kMin[len] && valid_char(cp)) {
        out.append(text.substr(i, len));
        i += len;
      } else {
        out += "\xEF\xBF\xBD";
        ++i;
      }
      continue;
    }
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\r': out += "&#13;"; break;
      case '\t':
      case '\n': out.push_back(static_cast<char>(c)); break;
      default:
        if (c < 0x20) {
          out += "\xEF\xBF\xBD";
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
    ++i;
  }
  return out;
}

std::string serialize(const Element& e) {
  std::string out;
  serialize_into(out, e);
  return out;
}

}  // namespace depot3d::xml
