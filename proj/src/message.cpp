#include "radiolab/message.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "radiolab/error.hpp"

namespace radiolab {

TokenSet::TokenSet(std::initializer_list<Token> ts) : TokenSet(std::vector<Token>(ts)) {}

TokenSet::TokenSet(std::vector<Token> ts) : items_(std::move(ts)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool TokenSet::insert(Token t) {
  auto it = std::lower_bound(items_.begin(), items_.end(), t);
  if (it != items_.end() && *it == t) return false;
  items_.insert(it, t);
  return true;
}

std::size_t TokenSet::merge(const TokenSet& o) {
  std::vector<Token> out;
  out.reserve(items_.size() + o.items_.size());
  std::set_union(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(), std::back_inserter(out));
  std::size_t added = out.size() - items_.size();
  items_ = std::move(out);
  return added;
}

bool TokenSet::contains(Token t) const { return std::binary_search(items_.begin(), items_.end(), t); }

bool TokenSet::contains_all(const TokenSet& o) const {
  return std::includes(items_.begin(), items_.end(), o.items_.begin(), o.items_.end());
}

namespace {

template <class T>
const T& field_as(const Message& m, std::string_view name) {
  auto it = m.fields.find(name);
  if (it == m.fields.end()) throw std::out_of_range("message '" + m.tag + "' has no field " + std::string(name));
  const T* v = std::get_if<T>(&it->second);
  if (!v) throw std::invalid_argument("message field " + std::string(name) + " has another type");
  return *v;
}

}  // namespace

std::int64_t Message::integer(std::string_view name) const { return field_as<std::int64_t>(*this, name); }
bool Message::flag(std::string_view name) const { return field_as<bool>(*this, name); }
const std::string& Message::text(std::string_view name) const { return field_as<std::string>(*this, name); }
const TokenSet& Message::tokens(std::string_view name) const { return field_as<TokenSet>(*this, name); }
const IntList& Message::ints(std::string_view name) const { return field_as<IntList>(*this, name); }
const Encoding& Message::encoding(std::string_view name) const { return field_as<Encoding>(*this, name); }

// Wire format: LEB128 varints, zigzag for signed values, length-prefixed
// strings. One type byte per field.
namespace {

void put_varint(std::string& out, std::uint64_t x) {
  while (x >= 0x80) {
    out.push_back(static_cast<char>((x & 0x7f) | 0x80));
    x >>= 7;
  }
  out.push_back(static_cast<char>(x));
}

void put_signed(std::string& out, std::int64_t x) {
  put_varint(out, (static_cast<std::uint64_t>(x) << 1) ^ static_cast<std::uint64_t>(x >> 63));
}

void put_bytes(std::string& out, std::string_view s) {
  put_varint(out, s.size());
  out.append(s);
}

void put_encoding(std::string& out, const Encoding& e) {
  if (e.is_exact()) {
    out.push_back(0);
    const mpz_class& v = e.exact();
    std::size_t count = 0;
    std::string buf((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8, '\0');
    mpz_export(buf.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    buf.resize(count);
    put_bytes(out, buf);
    return;
  }
  out.push_back(1);
  put_varint(out, e.colour_exponent());
  put_varint(out, e.dist_exponent());
  put_varint(out, e.exponents().size());
  for (const auto& c : e.exponents()) put_encoding(out, c);
}

struct Reader {
  std::string_view s;
  std::size_t pos = 0;

  std::uint8_t byte() {
    if (pos >= s.size()) throw std::invalid_argument("truncated message");
    return static_cast<std::uint8_t>(s[pos++]);
  }
  std::uint64_t varint() {
    std::uint64_t x = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      std::uint8_t b = byte();
      x |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) return x;
    }
    throw std::invalid_argument("varint too long");
  }
  std::int64_t signed_int() {
    std::uint64_t z = varint();
    return static_cast<std::int64_t>((z >> 1) ^ (~(z & 1) + 1));
  }
  std::string bytes() {
    std::uint64_t n = varint();
    if (n > s.size() - pos) throw std::invalid_argument("truncated message");
    std::string out(s.substr(pos, n));
    pos += n;
    return out;
  }
  Encoding encoding() {
    std::uint8_t kind = byte();
    if (kind == 0) {
      std::string b = bytes();
      mpz_class v;
      mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
      return Encoding(v);
    }
    if (kind != 1) throw std::invalid_argument("bad encoding kind");
    std::uint64_t c = varint(), d = varint(), n = varint();
    std::vector<Encoding> kids;
    for (std::uint64_t i = 0; i < n; ++i) kids.push_back(encoding());
    return enc_combine(c, d, kids);
  }
};

enum : std::uint8_t { kInt = 1, kBool, kText, kTokens, kInts, kEnc };

}  // namespace

std::string serialize(const Message& m) {
  std::string out;
  put_bytes(out, m.tag);
  put_varint(out, m.fields.size());
  for (const auto& [name, value] : m.fields) {
    put_bytes(out, name);
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::int64_t>) {
            out.push_back(kInt);
            put_signed(out, v);
          } else if constexpr (std::is_same_v<T, bool>) {
            out.push_back(kBool);
            out.push_back(v ? 1 : 0);
          } else if constexpr (std::is_same_v<T, std::string>) {
            out.push_back(kText);
            put_bytes(out, v);
          } else if constexpr (std::is_same_v<T, TokenSet>) {
            out.push_back(kTokens);
            put_varint(out, v.size());
            for (Token t : v) put_varint(out, t);
          } else if constexpr (std::is_same_v<T, IntList>) {
            out.push_back(kInts);
            put_varint(out, v.size());
            for (auto x : v) put_signed(out, x);
          } else {
            out.push_back(kEnc);
            put_encoding(out, v);
          }
        },
        value);
  }
  return out;
}

Message deserialize(std::string_view bytes) {
  Reader r{bytes};
  Message m(r.bytes());
  std::uint64_t n = r.varint();
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string name = r.bytes();
    switch (r.byte()) {
      case kInt: m.set(name, r.signed_int()); break;
      case kBool: m.set(name, r.byte() != 0); break;
      case kText: m.set(name, r.bytes()); break;
      case kTokens: {
        std::vector<Token> ts(r.varint());
        for (auto& t : ts) t = static_cast<Token>(r.varint());
        m.set(name, TokenSet(std::move(ts)));
        break;
      }
      case kInts: {
        IntList xs(r.varint());
        for (auto& x : xs) x = r.signed_int();
        m.set(name, std::move(xs));
        break;
      }
      case kEnc: m.set(name, r.encoding()); break;
      default: throw std::invalid_argument("bad field type");
    }
  }
  if (r.pos != bytes.size()) throw std::invalid_argument("trailing bytes after message");
  return m;
}

Message map_tokens(const Message& m, const std::function<Token(Token)>& f) {
  Message out = m;
  for (auto& [name, value] : out.fields)
    if (auto* ts = std::get_if<TokenSet>(&value)) {
      std::vector<Token> mapped;
      for (Token t : *ts) mapped.push_back(f(t));
      value = TokenSet(std::move(mapped));
    }
  return out;
}

std::string to_display(const Message& m) {
  std::ostringstream os;
  os << m.tag;
  for (const auto& [name, value] : m.fields) {
    os << ' ' << name << '=';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::int64_t>) {
            os << v;
          } else if constexpr (std::is_same_v<T, bool>) {
            os << (v ? "true" : "false");
          } else if constexpr (std::is_same_v<T, std::string>) {
            os << v;
          } else if constexpr (std::is_same_v<T, TokenSet>) {
            os << '{';
            bool first = true;
            for (Token t : v) {
              os << (first ? "" : ",") << t;
              first = false;
            }
            os << '}';
          } else if constexpr (std::is_same_v<T, IntList>) {
            os << '[';
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
            os << ']';
          } else {
            os << v.to_string();
          }
        },
        value);
  }
  return os.str();
}

}  // namespace radiolab
