#include <algorithm>
#include <atomic>
#include <cstring>
#include <limits>
#include <optional>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hkpoly/errors.hpp"
#include "hkpoly/polynomial.hpp"

// Exact product kernels. The public contract is fixed (canonical exact
// result, overflow is a CapacityError); internally there are three routes:
//   - monomial shortcut when one operand has a single term,
//   - a packed-key int128 kernel for <= 7 variables with small exponents and
//     int64 coefficients (this is what the 2^n-factor expansions hit),
//   - a general hash map over exponent vectors with mpq coefficients.
// The packed kernel falls back to the general one if any accumulation would
// overflow, so the fast route is never load-bearing for correctness.

namespace hkpoly {

namespace {

using u64 = std::uint64_t;
using i128 = __int128;

constexpr u64 kEmpty = ~u64{0};
constexpr int kMaxPackedVars = 7;

// Key layout: [total degree | e0 | e1 | ... | e6], one byte each, degree in
// the most significant byte so ascending u64 order is ascending graded-lex.
inline u64 pack_key(std::span<const Exponent> e) {
  u64 key = 0;
  u64 deg = 0;
  for (std::size_t v = 0; v < e.size(); ++v) {
    deg += e[v];
    key |= u64(e[v]) << (8 * (kMaxPackedVars - 1 - v));
  }
  return key | (deg << (8 * kMaxPackedVars));
}

inline void unpack_key(u64 key, std::size_t nv, Exponent* out) {
  for (std::size_t v = 0; v < nv; ++v)
    out[v] = static_cast<Exponent>((key >> (8 * (kMaxPackedVars - 1 - v))) & 0xff);
}

inline u64 mix(u64 x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Rational rational_from_i128(i128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
  Integer z;
  if (u <= std::numeric_limits<unsigned long>::max()) {
    z = static_cast<unsigned long>(u);
  } else {
    z = static_cast<unsigned long>(u >> 64);
    mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), 64);
    z += static_cast<unsigned long>(u & ~0ull);
  }
  if (neg) z = -z;
  return Rational(z);
}

/// Open-addressing accumulator keyed by packed monomials.
struct PackedTable {
  std::vector<u64> keys;
  std::vector<i128> vals;
  std::size_t count = 0;
  u64 mask = 0;

  void init(std::size_t want) {
    std::size_t cap = 1024;
    while (cap < want * 2) cap <<= 1;
    keys.assign(cap, kEmpty);
    vals.assign(cap, 0);
    mask = cap - 1;
    count = 0;
  }

  bool grow() {
    PackedTable bigger;
    bigger.init(keys.size());  // doubles via the *2 in init
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] != kEmpty)
        if (!bigger.add(keys[i], vals[i])) return false;
    *this = std::move(bigger);
    return true;
  }

  bool add(u64 key, i128 delta) {
    std::size_t at = mix(key) & mask;
    while (true) {
      if (keys[at] == key) {
        if (__builtin_add_overflow(vals[at], delta, &vals[at])) return false;
        return true;
      }
      if (keys[at] == kEmpty) {
        keys[at] = key;
        vals[at] = delta;
        if (++count * 3 > keys.size() * 2) return grow();
        return true;
      }
      at = (at + 1) & mask;
    }
  }
};

struct FastOperand {
  std::vector<u64> keys;
  std::vector<long> coeffs;
};

bool prepare_fast(const SparsePolynomial& p, FastOperand& out) {
  out.keys.reserve(p.term_count());
  out.coeffs.reserve(p.term_count());
  for (std::size_t t = 0; t < p.term_count(); ++t) {
    const Rational& c = p.coefficient(t);
    if (c.get_den() != 1 || !mpz_fits_slong_p(c.get_num().get_mpz_t())) return false;
    out.keys.push_back(pack_key(p.exponents(t)));
    out.coeffs.push_back(mpz_get_si(c.get_num().get_mpz_t()));
  }
  return true;
}

bool fast_applicable(const SparsePolynomial& a, const SparsePolynomial& b) {
  const std::size_t nv = a.var_count();
  if (nv > kMaxPackedVars) return false;
  if (a.is_zero() || b.is_zero()) return false;
  if (a.total_degree() + b.total_degree() > 255) return false;
  for (std::size_t v = 0; v < nv; ++v)
    if (a.max_exponent(v) + b.max_exponent(v) > 255) return false;
  return true;
}

bool symmetric_mul(const SparsePolynomial& a, const FastOperand& fa, const FastOperand& fb,
                   std::vector<Exponent>& out_exps, std::vector<Rational>& out_coeffs);

/// One thread's share of the pair enumeration: rows [lo, hi) of a times all
/// of b (for squares, the upper-triangular part with doubling).
bool accumulate_range(const FastOperand& a, const FastOperand& b, bool square,
                      std::size_t lo, std::size_t hi, PackedTable& table) {
  for (std::size_t i = lo; i < hi; ++i) {
    const u64 ka = a.keys[i];
    const i128 ca = a.coeffs[i];
    const std::size_t jbegin = square ? i : 0;
    for (std::size_t j = jbegin; j < b.keys.size(); ++j) {
      i128 prod = ca * static_cast<i128>(b.coeffs[j]);
      if (square && j != i) {
        if (__builtin_mul_overflow(prod, i128{2}, &prod)) return false;
      }
      if (!table.add(ka + b.keys[j], prod)) return false;
    }
  }
  return true;
}

bool fast_mul(const SparsePolynomial& a, const SparsePolynomial& b, bool square,
              std::vector<Exponent>& out_exps, std::vector<Rational>& out_coeffs) {
  if (!fast_applicable(a, b)) return false;
  FastOperand fa, fb;
  if (!prepare_fast(a, fa)) return false;
  if (!prepare_fast(b, fb)) return false;

  const double pairs = double(fa.keys.size()) * double(fb.keys.size());
  // Past this size the accumulation table outgrows the cache and the flat
  // kernel goes memory-bound; orbit compression keeps it resident.
  if (pairs >= 2e8 && symmetric_mul(a, fa, fb, out_exps, out_coeffs)) return true;

  unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min(nthreads, 4u);
  if (pairs < 4e7) nthreads = 1;

  // Row boundaries chosen so each thread sees the same number of pairs;
  // for squares row i contributes n - i pairs, not n.
  const std::size_t rows = fa.keys.size();
  std::vector<std::size_t> bound(nthreads + 1, rows);
  bound[0] = 0;
  if (square) {
    const double total = double(rows) * double(rows + 1) / 2.0;
    std::size_t r = 0;
    double seen = 0;
    for (unsigned t = 1; t < nthreads; ++t) {
      const double target = total * t / nthreads;
      while (r < rows && seen < target) seen += double(rows - r), ++r;
      bound[t] = r;
    }
  } else {
    for (unsigned t = 1; t < nthreads; ++t) bound[t] = rows * t / nthreads;
  }

  std::vector<PackedTable> tables(nthreads);
  std::atomic<bool> failed{false};
  {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        tables[t].init(std::max<std::size_t>(fa.keys.size(), fb.keys.size()) * 4);
        if (!accumulate_range(fa, fb, square, bound[t], bound[t + 1], tables[t])) failed = true;
      });
    }
    for (auto& th : pool) th.join();
  }
  if (failed) return false;

  PackedTable& total = tables[0];
  for (unsigned t = 1; t < nthreads; ++t) {
    for (std::size_t i = 0; i < tables[t].keys.size(); ++i)
      if (tables[t].keys[i] != kEmpty)
        if (!total.add(tables[t].keys[i], tables[t].vals[i])) return false;
    tables[t] = PackedTable{};
  }

  std::vector<std::pair<u64, i128>> entries;
  entries.reserve(total.count);
  for (std::size_t i = 0; i < total.keys.size(); ++i)
    if (total.keys[i] != kEmpty && total.vals[i] != 0)
      entries.emplace_back(total.keys[i], total.vals[i]);
  total = PackedTable{};
  std::sort(entries.begin(), entries.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  const std::size_t nv = a.var_count();
  out_exps.resize(entries.size() * nv);
  out_coeffs.reserve(entries.size());
  for (std::size_t t = 0; t < entries.size(); ++t) {
    unpack_key(entries[t].first, nv, out_exps.data() + t * nv);
    out_coeffs.push_back(rational_from_i128(entries[t].second));
  }
  return true;
}

// ---------------------------------------------------------------------------
// Orbit-compressed kernel for operands symmetric under permutations of a
// contiguous variable block (the 2^n-factor expansions are symmetric in
// t_1..t_{n-1} at every level). One operand is reduced to orbit
// representatives, products are canonicalized by sorting the block bytes,
// and the accumulation table stays small enough to live in cache, which is
// what the flat kernel above cannot do once results reach millions of terms.
//
//   f*g = sum over orbit reps m of f:
//           c_m / |stab m| * sum over sigma in S_block of sigma(m * g),
// and sum_sigma sigma(mu) = |stab mu| * OrbitSum(canonical mu), so each
// product term accumulates c_m * c_g * B!/|stab m| * |stab mu| and the final
// orbit coefficients carry a single exact division by B!.
// ---------------------------------------------------------------------------

inline int key_byte_pos(std::size_t v) { return 8 * (kMaxPackedVars - 1 - int(v)); }

inline unsigned key_byte(u64 key, std::size_t v) {
  return unsigned((key >> key_byte_pos(v)) & 0xff);
}

const u64 kFactorial[8] = {1, 1, 2, 6, 24, 120, 720, 5040};

/// |stab| of the block byte multiset: product of factorials of run lengths
/// of the sorted block bytes.
inline u64 stab_of_sorted(const unsigned* bytes, int len) {
  u64 s = 1;
  int run = 1;
  for (int i = 1; i < len; ++i) {
    if (bytes[i] == bytes[i - 1]) {
      ++run;
    } else {
      s *= kFactorial[run];
      run = 1;
    }
  }
  return s * kFactorial[run];
}

/// Sorts the block bytes of key descending (canonical orbit representative)
/// and returns |stab| of the multiset. len <= 7.
inline u64 canonicalize_block(u64& key, int lo, int len) {
  unsigned b[7];
  for (int i = 0; i < len; ++i) b[i] = key_byte(key, lo + i);
  std::sort(b, b + len, std::greater<unsigned>());
  for (int i = 0; i < len; ++i) {
    const int pos = key_byte_pos(lo + i);
    key = (key & ~(u64(0xff) << pos)) | (u64(b[i]) << pos);
  }
  return stab_of_sorted(b, len);
}

/// True if swapping variables v and v+1 maps the term set of p onto itself
/// with equal coefficients.
bool swap_invariant(const FastOperand& p, std::size_t v) {
  std::unordered_map<u64, long> lookup;
  lookup.reserve(p.keys.size() * 2);
  for (std::size_t t = 0; t < p.keys.size(); ++t) lookup.emplace(p.keys[t], p.coeffs[t]);
  const int pa = key_byte_pos(v), pb = key_byte_pos(v + 1);
  for (std::size_t t = 0; t < p.keys.size(); ++t) {
    const u64 key = p.keys[t];
    const u64 ba = (key >> pa) & 0xff, bb = (key >> pb) & 0xff;
    if (ba == bb) continue;
    const u64 swapped =
        (key & ~((u64(0xff) << pa) | (u64(0xff) << pb))) | (ba << pb) | (bb << pa);
    auto it = lookup.find(swapped);
    if (it == lookup.end() || it->second != p.coeffs[t]) return false;
  }
  return true;
}

/// Longest contiguous block [lo, lo+len) on which both operands are
/// symmetric; len = 0 when nothing qualifies.
std::pair<int, int> common_symmetric_block(const FastOperand& a, const FastOperand& b,
                                           std::size_t nv) {
  std::vector<bool> ok(nv > 0 ? nv - 1 : 0);
  for (std::size_t v = 0; v + 1 < nv; ++v)
    ok[v] = swap_invariant(a, v) && swap_invariant(b, v);
  int best_lo = 0, best_len = 0, lo = 0, len = 1;
  for (std::size_t v = 0; v + 1 < nv; ++v) {
    if (ok[v]) {
      ++len;
    } else {
      lo = int(v) + 1;
      len = 1;
    }
    if (len > best_len) {
      best_len = len;
      best_lo = lo;
    }
  }
  return {best_lo, best_len};
}

struct OrbitRep {
  u64 key = 0;
  i128 weight = 0;  // c_m * B! / |stab m|
};

/// Orbit table accumulation for rows [lo, hi) of reps against all of g.
bool accumulate_orbit_range(const std::vector<OrbitRep>& reps, const FastOperand& g,
                            int block_lo, int block_len, std::size_t lo, std::size_t hi,
                            PackedTable& table) {
  for (std::size_t i = lo; i < hi; ++i) {
    const u64 km = reps[i].key;
    const i128 wm = reps[i].weight;
    for (std::size_t j = 0; j < g.keys.size(); ++j) {
      u64 key = km + g.keys[j];
      const u64 stab = canonicalize_block(key, block_lo, block_len);
      i128 prod;
      if (__builtin_mul_overflow(wm, i128(g.coeffs[j]), &prod)) return false;
      if (__builtin_mul_overflow(prod, i128(stab), &prod)) return false;
      if (!table.add(key, prod)) return false;
    }
  }
  return true;
}

bool symmetric_mul(const SparsePolynomial& a, const FastOperand& fa, const FastOperand& fb,
                   std::vector<Exponent>& out_exps, std::vector<Rational>& out_coeffs) {
  const std::size_t nv = a.var_count();
  const auto [block_lo, block_len] = common_symmetric_block(fa, fb, nv);
  if (block_len < 3) return false;
  const i128 bfact = i128(kFactorial[block_len]);

  // Compress the smaller operand to orbit representatives.
  const bool a_small = fa.keys.size() <= fb.keys.size();
  const FastOperand& f = a_small ? fa : fb;
  const FastOperand& g = a_small ? fb : fa;
  std::unordered_map<u64, i128> rep_map;
  rep_map.reserve(f.keys.size());
  for (std::size_t t = 0; t < f.keys.size(); ++t) {
    u64 key = f.keys[t];
    const u64 stab = canonicalize_block(key, block_lo, block_len);
    auto [it, fresh] = rep_map.try_emplace(key, 0);
    if (fresh) it->second = i128(f.coeffs[t]) * (bfact / i128(stab));
  }
  std::vector<OrbitRep> reps;
  reps.reserve(rep_map.size());
  for (const auto& [key, w] : rep_map) reps.push_back({key, w});
  std::sort(reps.begin(), reps.end(), [](const OrbitRep& x, const OrbitRep& y) {
    return x.key < y.key;
  });

  unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, 4u);
  if (double(reps.size()) * double(g.keys.size()) < 4e7) nthreads = 1;

  std::vector<PackedTable> tables(nthreads);
  std::atomic<bool> failed{false};
  {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) {
      const std::size_t lo = reps.size() * t / nthreads;
      const std::size_t hi = reps.size() * (t + 1) / nthreads;
      pool.emplace_back([&, lo, hi, t, block_lo = block_lo, block_len = block_len] {
        tables[t].init(std::max<std::size_t>(g.keys.size(), 1024));
        if (!accumulate_orbit_range(reps, g, block_lo, block_len, lo, hi, tables[t]))
          failed = true;
      });
    }
    for (auto& th : pool) th.join();
  }
  if (failed) return false;

  PackedTable& total = tables[0];
  for (unsigned t = 1; t < nthreads; ++t) {
    for (std::size_t i = 0; i < tables[t].keys.size(); ++i)
      if (tables[t].keys[i] != kEmpty)
        if (!total.add(tables[t].keys[i], tables[t].vals[i])) return false;
    tables[t] = PackedTable{};
  }

  // Expand orbits back to the full monomial basis. Distinct permutations of
  // distinct multisets never collide, so no re-accumulation is needed.
  std::vector<std::pair<u64, i128>> entries;
  for (std::size_t i = 0; i < total.keys.size(); ++i) {
    if (total.keys[i] == kEmpty || total.vals[i] == 0) continue;
    const i128 v = total.vals[i];
    if (v % bfact != 0) throw InternalError("orbit accumulation not divisible by |S_block|");
    const i128 coeff = v / bfact;
    u64 base = total.keys[i];
    unsigned bytes[7];
    for (int k = 0; k < block_len; ++k) bytes[k] = key_byte(base, block_lo + k);
    std::sort(bytes, bytes + block_len);  // ascending start for next_permutation
    do {
      u64 key = base;
      for (int k = 0; k < block_len; ++k) {
        const int pos = key_byte_pos(block_lo + k);
        key = (key & ~(u64(0xff) << pos)) | (u64(bytes[k]) << pos);
      }
      entries.emplace_back(key, coeff);
    } while (std::next_permutation(bytes, bytes + block_len));
  }
  total = PackedTable{};
  std::sort(entries.begin(), entries.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  out_exps.resize(entries.size() * nv);
  out_coeffs.reserve(entries.size());
  for (std::size_t t = 0; t < entries.size(); ++t) {
    unpack_key(entries[t].first, nv, out_exps.data() + t * nv);
    out_coeffs.push_back(rational_from_i128(entries[t].second));
  }
  return true;
}

struct VecHash {
  std::size_t operator()(const std::vector<Exponent>& v) const {
    u64 h = 0xcbf29ce484222325ull;
    for (Exponent x : v) h = mix(h ^ x);
    return h;
  }
};

void general_mul(const SparsePolynomial& a, const SparsePolynomial& b,
                 std::vector<Exponent>& out_exps, std::vector<Rational>& out_coeffs) {
  const std::size_t nv = a.var_count();
  std::unordered_map<std::vector<Exponent>, Rational, VecHash> acc;
  acc.reserve(a.term_count() + b.term_count());
  std::vector<Exponent> key(nv);
  for (std::size_t i = 0; i < a.term_count(); ++i) {
    auto ea = a.exponents(i);
    for (std::size_t j = 0; j < b.term_count(); ++j) {
      auto eb = b.exponents(j);
      for (std::size_t v = 0; v < nv; ++v) {
        const u64 sum = u64(ea[v]) + u64(eb[v]);
        if (sum > std::numeric_limits<Exponent>::max())
          throw CapacityError("poly_mul: exponent overflow at degree " + std::to_string(sum) +
                              " in variable '" + a.vars()[v] + "'");
        key[v] = static_cast<Exponent>(sum);
      }
      auto [it, fresh] = acc.try_emplace(key, Rational(0));
      it->second += a.coefficient(i) * b.coefficient(j);
    }
  }
  std::vector<const std::vector<Exponent>*> order;
  order.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) order.push_back(&m);
  std::sort(order.begin(), order.end(), [](const auto* x, const auto* y) {
    return grlex_less(std::span(*x), std::span(*y));
  });
  out_exps.reserve(order.size() * nv);
  out_coeffs.reserve(order.size());
  for (const auto* m : order) {
    out_exps.insert(out_exps.end(), m->begin(), m->end());
    out_coeffs.push_back(acc.find(*m)->second);
  }
}

SparsePolynomial monomial_mul(const SparsePolynomial& big, const SparsePolynomial& single) {
  const std::size_t nv = big.var_count();
  auto se = single.exponents(0);
  for (std::size_t v = 0; v < nv; ++v) {
    const u64 sum = big.max_exponent(v) + u64(se[v]);
    if (sum > std::numeric_limits<Exponent>::max())
      throw CapacityError("poly_mul: exponent overflow at degree " + std::to_string(sum) +
                          " in variable '" + big.vars()[v] + "'");
  }
  std::vector<std::pair<Monomial, Rational>> terms;
  terms.reserve(big.term_count());
  for (std::size_t t = 0; t < big.term_count(); ++t) {
    Monomial m = Monomial::unit(nv);
    auto e = big.exponents(t);
    for (std::size_t v = 0; v < nv; ++v) m.e[v] = e[v] + se[v];
    terms.emplace_back(std::move(m), Rational(big.coefficient(t) * single.coefficient(0)));
  }
  // A monomial shift preserves graded-lex order, so from_terms only
  // re-verifies what is already canonical.
  return SparsePolynomial::from_terms(big.vars(), terms);
}

}  // namespace

namespace detail {

std::optional<SparsePolynomial> symmetric_mul_for_tests(const SparsePolynomial& a,
                                                        const SparsePolynomial& b) {
  if (a.vars() != b.vars()) throw StructuralError("poly_mul: variable universes differ");
  if (!fast_applicable(a, b)) return std::nullopt;
  FastOperand fa, fb;
  if (!prepare_fast(a, fa) || !prepare_fast(b, fb)) return std::nullopt;
  SparsePolynomial r;
  std::vector<Exponent> exps;
  std::vector<Rational> coeffs;
  if (!symmetric_mul(a, fa, fb, exps, coeffs)) return std::nullopt;
  return SparsePolynomial::from_sorted_terms(a.vars(), std::move(exps), std::move(coeffs));
}

}  // namespace detail

SparsePolynomial poly_mul(const SparsePolynomial& a, const SparsePolynomial& b) {
  if (a.vars() != b.vars()) throw StructuralError("poly_mul: variable universes differ");
  SparsePolynomial r;
  r.vars_ = a.vars();
  if (a.is_zero() || b.is_zero()) return r;
  if (b.term_count() == 1) return monomial_mul(a, b);
  if (a.term_count() == 1) return monomial_mul(b, a);
  if (!fast_mul(a, b, /*square=*/false, r.exps_, r.coeffs_))
    general_mul(a, b, r.exps_, r.coeffs_);
  return r;
}

SparsePolynomial poly_square(const SparsePolynomial& a) {
  SparsePolynomial r;
  r.vars_ = a.vars();
  if (a.is_zero()) return r;
  if (a.term_count() == 1) return monomial_mul(a, a);
  if (!fast_mul(a, a, /*square=*/true, r.exps_, r.coeffs_))
    general_mul(a, a, r.exps_, r.coeffs_);
  return r;
}

}  // namespace hkpoly
