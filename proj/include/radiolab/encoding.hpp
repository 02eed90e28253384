#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace radiolab {

// log2 of a positive number, stored in level-index form so that power towers
// stay representable: level 0 means log2 N = v, level 1 means log2 log2 N = v,
// and so on. Only used for ordering and rough size, never for equality.
struct Magnitude {
  int level = 0;
  double v = 0.0;

  static Magnitude from_log2(double l);
  static Magnitude of(const mpz_class& x);
  // Magnitude of 2^N given the magnitude of N.
  Magnitude exp2() const;
  Magnitude times(double c) const;                 // N * c, c > 0
  static Magnitude sum(Magnitude a, Magnitude b);  // N_a + N_b
  std::optional<double> log2_value() const;        // when level 0
  friend bool operator<(const Magnitude& a, const Magnitude& b) {
    return a.level != b.level ? a.level < b.level : a.v < b.v;
  }
  friend bool operator==(const Magnitude&, const Magnitude&) = default;
};

// Arbitrary positive integer, with a factored form for values too large to
// materialise. Values with at most kExactBits bits are always stored exactly;
// larger ones are stored as 2^colour * 3^dist * prod_j p_{j+2}^{e_j} with the
// e_j themselves encodings. That makes the representation canonical, so
// equality is structural.
class Encoding {
 public:
  static constexpr double kExactBits = 32768.0;

  Encoding() : Encoding(mpz_class(1)) {}
  explicit Encoding(const mpz_class& value);
  explicit Encoding(std::uint64_t value) : Encoding(mpz_class(static_cast<unsigned long>(value))) {}

  bool is_exact() const;
  const mpz_class& exact() const;  // throws std::logic_error when not exact
  std::optional<std::uint64_t> to_u64() const;
  const Magnitude& magnitude() const;
  std::size_t hash() const;
  std::uint64_t id() const;  // unique per constructed node, never reused
  std::string to_string() const;

  // Factored form accessors (structured values only).
  std::uint64_t colour_exponent() const;
  std::uint64_t dist_exponent() const;
  const std::vector<Encoding>& exponents() const;

  friend bool operator==(const Encoding& a, const Encoding& b);

  struct Node;

 private:
  explicit Encoding(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  friend Encoding enc_combine(std::uint64_t, std::uint64_t, std::span<const Encoding>);
  std::shared_ptr<const Node> n_;
};

struct EncodingHash {
  std::size_t operator()(const Encoding& e) const { return e.hash(); }
};

Encoding enc_base(std::uint64_t colour, std::uint64_t dist);
Encoding enc_combine(std::uint64_t colour, std::uint64_t dist, std::span<const Encoding> children);

// Sign of a - b. Throws UndecidedComparison when two towers cancel too
// closely to certify (never observed on encodings produced by GOSSIP).
int compare(const Encoding& a, const Encoding& b);
// Numeric divisibility a | b.
bool divides(const Encoding& a, const Encoding& b);

}  // namespace radiolab
