#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "radiolab/encoding.hpp"

namespace radiolab {

// Opaque source-message token. By convention the token of a source is its
// node identifier; the engine never looks inside.
using Token = std::uint32_t;

// Sorted set of tokens.
class TokenSet {
 public:
  TokenSet() = default;
  TokenSet(std::initializer_list<Token> ts);
  explicit TokenSet(std::vector<Token> ts);

  bool insert(Token t);                // true if new
  std::size_t merge(const TokenSet& o);  // number of new tokens
  bool contains(Token t) const;
  bool contains_all(const TokenSet& o) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Token>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  friend bool operator==(const TokenSet&, const TokenSet&) = default;

 private:
  std::vector<Token> items_;
};

using IntList = std::vector<std::int64_t>;
using Field = std::variant<std::int64_t, bool, std::string, TokenSet, IntList, Encoding>;

// Tagged record of named fields. Fields are ordered by name, so equality and
// serialization are deterministic.
struct Message {
  std::string tag;
  std::map<std::string, Field, std::less<>> fields;

  Message() = default;
  explicit Message(std::string t) : tag(std::move(t)) {}

  Message& set(std::string name, Field value) {
    fields.insert_or_assign(std::move(name), std::move(value));
    return *this;
  }
  bool has(std::string_view name) const { return fields.find(name) != fields.end(); }
  std::int64_t integer(std::string_view name) const;
  bool flag(std::string_view name) const;
  const std::string& text(std::string_view name) const;
  const TokenSet& tokens(std::string_view name) const;
  const IntList& ints(std::string_view name) const;
  const Encoding& encoding(std::string_view name) const;

  friend bool operator==(const Message&, const Message&) = default;
};

std::string serialize(const Message& m);
Message deserialize(std::string_view bytes);

// Applies f to every token inside every TokenSet field.
Message map_tokens(const Message& m, const std::function<Token(Token)>& f);

std::string to_display(const Message& m);

}  // namespace radiolab
