#include "radiolab/encoding.hpp"

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "radiolab/error.hpp"
#include "radiolab/primes.hpp"

namespace radiolab {

// ---------------------------------------------------------------- Magnitude

namespace {
constexpr double kLevelTop = 1e300;
}

Magnitude Magnitude::from_log2(double l) {
  Magnitude m{0, l};
  while (m.v > kLevelTop) {
    m.v = std::log2(m.v);
    ++m.level;
  }
  return m;
}

Magnitude Magnitude::of(const mpz_class& x) {
  long exp = 0;
  double d = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return from_log2(static_cast<double>(exp) + std::log2(d));
}

Magnitude Magnitude::exp2() const {
  if (level == 0) {
    if (v <= 1000.0) return from_log2(std::exp2(v));
    return Magnitude{1, v};
  }
  return Magnitude{level + 1, v};
}

Magnitude Magnitude::times(double c) const {
  double lc = std::log2(c);
  if (level == 0) return from_log2(v + lc);
  if (level == 1 && v < 60.0) return Magnitude{1, std::log2(std::exp2(v) + lc)};
  return *this;
}

Magnitude Magnitude::sum(Magnitude a, Magnitude b) {
  if (a < b) std::swap(a, b);
  if (a.level == 0 && b.level == 0) return from_log2(a.v + std::log2(1.0 + std::exp2(b.v - a.v)));
  return a;  // the smaller term cannot move a level >= 1 magnitude
}

std::optional<double> Magnitude::log2_value() const {
  if (level == 0) return v;
  return std::nullopt;
}

// ---------------------------------------------------------------- Encoding

struct Encoding::Node {
  bool exact = true;
  mpz_class value;
  std::uint64_t colour = 0;
  std::uint64_t dist = 0;
  std::vector<Encoding> exps;
  Magnitude mag;
  std::size_t hash = 0;
  std::uint64_t id = 0;
};

namespace {

std::atomic<std::uint64_t> g_next_id{1};

std::size_t mix(std::size_t h, std::size_t x) {
  return h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_mpz(const mpz_class& x) {
  std::size_t h = mpz_size(x.get_mpz_t());
  for (std::size_t i = 0; i < mpz_size(x.get_mpz_t()); ++i) h = mix(h, mpz_getlimbn(x.get_mpz_t(), i));
  return h;
}

double prime_log2(std::size_t idx) {  // idx 0 -> 2, 1 -> 3, 2 -> 5, ...
  static thread_local std::vector<double> cache;
  while (cache.size() <= idx) cache.push_back(std::log2(static_cast<double>(nth_prime(cache.size() + 1))));
  return cache[idx];
}

unsigned long prime_at(std::size_t idx) { return static_cast<unsigned long>(nth_prime(idx + 1)); }

}  // namespace

Encoding::Encoding(const mpz_class& value) {
  if (value <= 0) throw PreconditionViolation("encodings are positive integers");
  auto n = std::make_shared<Node>();
  n->exact = true;
  n->value = value;
  n->mag = Magnitude::of(value);
  n->hash = hash_mpz(value);
  n->id = g_next_id++;
  n_ = std::move(n);
}

bool Encoding::is_exact() const { return n_->exact; }

const mpz_class& Encoding::exact() const {
  if (!n_->exact) throw std::logic_error("encoding has no exact value: " + to_string());
  return n_->value;
}

std::optional<std::uint64_t> Encoding::to_u64() const {
  if (!n_->exact || mpz_sizeinbase(n_->value.get_mpz_t(), 2) > 64) return std::nullopt;
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, n_->value.get_mpz_t());
  return out;
}

const Magnitude& Encoding::magnitude() const { return n_->mag; }
std::size_t Encoding::hash() const { return n_->hash; }
std::uint64_t Encoding::id() const { return n_->id; }

std::uint64_t Encoding::colour_exponent() const {
  if (n_->exact) throw std::logic_error("exact encodings carry no factored form");
  return n_->colour;
}
std::uint64_t Encoding::dist_exponent() const {
  if (n_->exact) throw std::logic_error("exact encodings carry no factored form");
  return n_->dist;
}
const std::vector<Encoding>& Encoding::exponents() const {
  if (n_->exact) throw std::logic_error("exact encodings carry no factored form");
  return n_->exps;
}

std::string Encoding::to_string() const {
  if (n_->exact) {
    if (mpz_sizeinbase(n_->value.get_mpz_t(), 10) <= 60) return n_->value.get_str();
    return "<" + std::to_string(mpz_sizeinbase(n_->value.get_mpz_t(), 2)) + "-bit integer>";
  }
  std::ostringstream os;
  os << "2^" << n_->colour << "*3^" << n_->dist;
  for (std::size_t j = 0; j < n_->exps.size(); ++j) os << '*' << prime_at(j + 2) << "^(" << n_->exps[j].to_string() << ')';
  return os.str();
}

namespace {

// Exact value when it has at most limit_bits bits.
std::optional<mpz_class> materialize(const Encoding& e, double limit_bits) {
  if (e.is_exact()) return e.exact();
  auto l = e.magnitude().log2_value();
  if (!l || *l > limit_bits) return std::nullopt;
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, e.colour_exponent());
  mpz_class t;
  mpz_ui_pow_ui(t.get_mpz_t(), 3, e.dist_exponent());
  out *= t;
  for (std::size_t j = 0; j < e.exponents().size(); ++j) {
    auto x = materialize(e.exponents()[j], 64);
    if (!x || !x->fits_ulong_p()) return std::nullopt;
    mpz_ui_pow_ui(t.get_mpz_t(), prime_at(j + 2), x->get_ui());
    out *= t;
  }
  return out;
}

}  // namespace

bool operator==(const Encoding& a, const Encoding& b) {
  if (a.n_ == b.n_) return true;
  if (a.n_->exact && b.n_->exact) return a.n_->hash == b.n_->hash && a.n_->value == b.n_->value;
  if (!a.n_->exact && !b.n_->exact) {
    if (a.n_->hash != b.n_->hash || a.n_->colour != b.n_->colour || a.n_->dist != b.n_->dist) return false;
    return a.n_->exps == b.n_->exps;
  }
  // Mixed: only possible for an oversized value built from a raw integer.
  const Encoding& ex = a.n_->exact ? a : b;
  const Encoding& st = a.n_->exact ? b : a;
  auto m = materialize(st, static_cast<double>(mpz_sizeinbase(ex.exact().get_mpz_t(), 2)) + 1.0);
  return m && *m == ex.exact();
}

Encoding enc_base(std::uint64_t colour, std::uint64_t dist) { return enc_combine(colour, dist, {}); }

Encoding enc_combine(std::uint64_t colour, std::uint64_t dist, std::span<const Encoding> children) {
  if (colour == 0) throw PreconditionViolation("enc: colour must be positive");
  // Magnitude of log2 X = colour + dist*log2(3) + sum_j x_j * log2(p_{j+3}).
  double small = static_cast<double>(colour) + static_cast<double>(dist) * prime_log2(1);
  Magnitude lg = Magnitude::from_log2(std::log2(small));
  bool all_exact = true;
  for (std::size_t j = 0; j < children.size(); ++j) {
    lg = Magnitude::sum(lg, children[j].magnitude().times(prime_log2(j + 2)));
    all_exact = all_exact && children[j].is_exact();
  }
  Magnitude mag = lg.exp2();
  auto bits = mag.log2_value();
  if (all_exact && bits && *bits <= Encoding::kExactBits) {
    mpz_class out, t;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, colour);
    mpz_ui_pow_ui(t.get_mpz_t(), 3, dist);
    out *= t;
    for (std::size_t j = 0; j < children.size(); ++j) {
      mpz_ui_pow_ui(t.get_mpz_t(), prime_at(j + 2), children[j].exact().get_ui());
      out *= t;
    }
    return Encoding(out);
  }
  auto n = std::make_shared<Encoding::Node>();
  n->exact = false;
  n->colour = colour;
  n->dist = dist;
  n->exps.assign(children.begin(), children.end());
  n->mag = mag;
  std::size_t h = mix(mix(0x51ed27, colour), dist);
  for (const auto& c : children) h = mix(h, c.hash());
  n->hash = h;
  n->id = g_next_id++;
  return Encoding(std::shared_ptr<const Encoding::Node>(std::move(n)));
}

// ---------------------------------------------------------------- ordering

namespace {

// log2(X) - log2(Y); value is meaningful only when small is set.
struct Gap {
  int sign = 0;
  bool small = false;
  double value = 0.0;
};

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
    return mix(std::hash<std::uint64_t>{}(p.first), p.second);
  }
};

// Cache keyed by node ids; ids are never reused so entries never go stale.
thread_local std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Gap, PairHash> g_gap_cache;

int sgn(int x) { return (x > 0) - (x < 0); }

Gap exact_gap(const mpz_class& x, const mpz_class& y) {
  Gap g;
  g.sign = sgn(cmp(x, y));
  g.value = *Magnitude::of(x).log2_value() - *Magnitude::of(y).log2_value();
  g.small = std::fabs(g.value) < 1e6;
  return g;
}

struct Term {
  int sign = 0;
  bool exact = false;
  mpz_class coef;     // exact: |delta|
  std::size_t idx = 0;  // prime index of the weight
  Magnitude mag;      // |term| including the weight
  // Towers: |term| ~ big * 2^wlog, kept so two towers can be compared through
  // their coefficients rather than through rounded magnitudes.
  std::optional<Encoding> big;
  double wlog = 0.0;
};

// Sum of sign_k * coef_k * log2(p_k) with enough precision to trust the sign.
Gap exact_sum(const std::vector<Term>& terms) {
  std::size_t bits = 64;
  for (const auto& t : terms) bits = std::max(bits, mpz_sizeinbase(t.coef.get_mpz_t(), 2));
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits + 128);
  mpfr_t acc, w, term;
  mpfr_inits2(prec, acc, w, term, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_zero(acc, 1);
  for (const auto& t : terms) {
    mpfr_set_ui(w, prime_at(t.idx), MPFR_RNDN);
    mpfr_log2(w, w, MPFR_RNDN);
    mpfr_mul_z(term, w, t.coef.get_mpz_t(), MPFR_RNDN);
    if (t.sign < 0) mpfr_neg(term, term, MPFR_RNDN);
    mpfr_add(acc, acc, term, MPFR_RNDN);
  }
  Gap g;
  double d = mpfr_get_d(acc, MPFR_RNDN);
  long e = mpfr_zero_p(acc) ? 0 : mpfr_get_exp(acc);
  mpfr_clears(acc, w, term, static_cast<mpfr_ptr>(nullptr));
  // Distinct factorizations never give an exact zero, so a result this small
  // means we lost the sign in rounding.
  if (d == 0.0 || e < -60) throw UndecidedComparison("encoding comparison cancelled below working precision");
  g.sign = d > 0 ? 1 : -1;
  g.value = d;
  g.small = std::fabs(d) < 1e6;
  return g;
}

Gap gap(const Encoding& x, const Encoding& y);

Gap structured_gap(const Encoding& x, const Encoding& y) {
  std::vector<Term> terms;
  auto add_exact = [&](mpz_class delta, std::size_t idx) {
    if (delta == 0) return;
    Term t;
    t.sign = sgn(sgn(delta));
    t.exact = true;
    t.coef = abs(delta);
    t.idx = idx;
    t.mag = Magnitude::of(t.coef).times(prime_log2(idx));
    terms.push_back(std::move(t));
  };
  add_exact(mpz_class(static_cast<unsigned long>(x.colour_exponent())) -
                mpz_class(static_cast<unsigned long>(y.colour_exponent())),
            0);
  add_exact(mpz_class(static_cast<unsigned long>(x.dist_exponent())) -
                mpz_class(static_cast<unsigned long>(y.dist_exponent())),
            1);
  const auto& xs = x.exponents();
  const auto& ys = y.exponents();
  const double near_exact = Encoding::kExactBits + 64.0;
  for (std::size_t j = 0; j < std::max(xs.size(), ys.size()); ++j) {
    const std::size_t idx = j + 2;
    const Encoding* a = j < xs.size() ? &xs[j] : nullptr;
    const Encoding* b = j < ys.size() ? &ys[j] : nullptr;
    std::optional<mpz_class> av = a ? materialize(*a, near_exact) : mpz_class(0);
    std::optional<mpz_class> bv = b ? materialize(*b, near_exact) : mpz_class(0);
    if (av && bv) {
      add_exact(*av - *bv, idx);
      continue;
    }
    Term t;
    t.idx = idx;
    t.wlog = std::log2(prime_log2(idx));
    if (!av && bv) {
      t.sign = 1;
      t.big = *a;
    } else if (av && !bv) {
      t.sign = -1;
      t.big = *b;
    } else {
      Gap g = gap(*a, *b);
      if (g.sign == 0) continue;
      t.sign = g.sign;
      t.big = g.sign > 0 ? *a : *b;
      if (g.small) {
        double f = 1.0 - std::exp2(-std::fabs(g.value));
        if (f < 1e-12) throw UndecidedComparison("encoding exponents too close to order");
        t.wlog += std::log2(f);
      }
    }
    t.mag = t.big->magnitude().times(std::exp2(t.wlog));
    terms.push_back(std::move(t));
  }

  bool any_pos = false, any_neg = false, all_exact = true;
  for (const auto& t : terms) {
    any_pos = any_pos || t.sign > 0;
    any_neg = any_neg || t.sign < 0;
    all_exact = all_exact && t.exact;
  }
  if (terms.empty()) return Gap{0, true, 0.0};
  if (all_exact) return exact_sum(terms);
  if (!(any_pos && any_neg)) return Gap{any_pos ? 1 : -1, false, 0.0};

  // Mixed signs with at least one tower: find the dominant term and check
  // the terms close to it cannot cancel it. diff(a, b) is log2(|a| / |b|),
  // infinite when the ratio is beyond any double.
  constexpr double kInfDiff = std::numeric_limits<double>::infinity();
  auto diff = [&](const Term& a, const Term& b) -> double {
    if (a.big && b.big) {
      Gap g = gap(*a.big, *b.big);
      if (g.sign == 0) return a.wlog - b.wlog;
      if (g.small) return g.value + a.wlog - b.wlog;
      return g.sign > 0 ? kInfDiff : -kInfDiff;
    }
    if (a.mag.level != b.mag.level) return a.mag.level > b.mag.level ? kInfDiff : -kInfDiff;
    if (a.mag.level == 0) return a.mag.v - b.mag.v;
    if (a.mag.v == b.mag.v) throw UndecidedComparison("two encoding towers of indistinguishable size");
    return a.mag.v > b.mag.v ? kInfDiff : -kInfDiff;
  };
  std::size_t top = 0;
  for (std::size_t k = 1; k < terms.size(); ++k)
    if (diff(terms[k], terms[top]) > 0) top = k;
  const double margin = std::log2(static_cast<double>(terms.size())) + 3.0;
  // s is the sum relative to the lead term; err bounds what the dropped terms
  // and the rounding can add.
  double s = terms[top].sign;
  double err = 1e-9;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k == top) continue;
    double d = diff(terms[top], terms[k]);
    if (d < margin) {
      s += terms[k].sign * std::exp2(-d);
      err += 1e-9;
    } else if (d < kInfDiff) {
      err += std::exp2(-d);
    }
  }
  if (std::fabs(s) <= err) throw UndecidedComparison("encoding terms cancel too closely to order");
  return Gap{s > 0 ? 1 : -1, false, 0.0};
}

Gap gap(const Encoding& x, const Encoding& y) {
  if (x == y) return Gap{0, true, 0.0};
  auto key = std::make_pair(x.id(), y.id());
  if (auto it = g_gap_cache.find(key); it != g_gap_cache.end()) return it->second;
  Gap g;
  const double near_exact = Encoding::kExactBits + 64.0;
  auto xv = materialize(x, near_exact);
  auto yv = materialize(y, near_exact);
  if (xv && yv) {
    g = exact_gap(*xv, *yv);
  } else if (xv || yv) {
    // One side is a tower far beyond the other.
    g.sign = xv ? -1 : 1;
    auto lx = x.magnitude().log2_value();
    auto ly = y.magnitude().log2_value();
    g.small = lx && ly && std::fabs(*lx - *ly) < 1e6;
    if (g.small) g.value = *lx - *ly;
  } else {
    g = structured_gap(x, y);
  }
  if (g_gap_cache.size() > (1u << 20)) g_gap_cache.clear();
  g_gap_cache.emplace(key, g);
  return g;
}

}  // namespace

int compare(const Encoding& a, const Encoding& b) { return gap(a, b).sign; }

bool divides(const Encoding& a, const Encoding& b) {
  if (a.is_exact() && b.is_exact()) return mpz_divisible_p(b.exact().get_mpz_t(), a.exact().get_mpz_t()) != 0;
  if (!a.is_exact() && b.is_exact()) return false;
  if (a.is_exact()) {
    // Factor a over the primes b is built from; anything left over fails.
    mpz_class rest = a.exact();
    auto take = [&](unsigned long p) {
      mpz_class f(p);
      return static_cast<unsigned long>(mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), f.get_mpz_t()));
    };
    if (take(2) > b.colour_exponent()) return false;
    if (take(3) > b.dist_exponent()) return false;
    for (std::size_t j = 0; j < b.exponents().size(); ++j) {
      unsigned long e = take(prime_at(j + 2));
      if (e > 0 && compare(Encoding(mpz_class(e)), b.exponents()[j]) > 0) return false;
    }
    return rest == 1;
  }
  if (a.colour_exponent() > b.colour_exponent() || a.dist_exponent() > b.dist_exponent()) return false;
  const auto& xs = a.exponents();
  const auto& ys = b.exponents();
  if (xs.size() > ys.size()) return false;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    // x | y with y > 0 already settles x <= y, without any numerics.
    if (xs[j] == ys[j] || divides(xs[j], ys[j])) continue;
    if (compare(xs[j], ys[j]) > 0) return false;
  }
  return true;
}

}  // namespace radiolab
