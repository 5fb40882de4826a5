#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

// Exhaustive-sweep kernels over the 2^n status-vector space. Every kernel has
// a serial reference path (the plain loop) and an OpenMP path over fixed-size
// chunks. Chunk partials are combined in chunk order, so parallel results do
// not depend on the thread count; witnesses and set outputs are identical to
// the serial path, sums agree to rounding.
//
// Mask convention: bit i of a mask is leaf i of the enumeration domain
// (domains are sorted by id). The canonical result order — used both for
// witness selection and for sorting set-valued output — is (popcount, mask)
// ascending, i.e. fewest marked leaves first, then earliest ids first.

namespace ftaq::sweep {

inline constexpr uint64_t chunk_bits = 12;  // 4096 masks per chunk

struct MaskKey {
  uint32_t count;
  uint64_t mask;
  friend bool operator<(const MaskKey& a, const MaskKey& b) {
    return a.count != b.count ? a.count < b.count : a.mask < b.mask;
  }
};

inline MaskKey key_of(uint64_t mask) { return {static_cast<uint32_t>(std::popcount(mask)), mask}; }

namespace detail {
inline uint64_t chunk_count(uint64_t total) { return (total + (uint64_t(1) << chunk_bits) - 1) >> chunk_bits; }
}  // namespace detail

/// First qualifying mask in canonical order, or nullopt.
template <class Pred>
std::optional<uint64_t> find_first(uint64_t total, Pred&& pred, bool parallel) {
  if (!parallel) {
    std::optional<MaskKey> best;
    for (uint64_t m = 0; m < total; ++m) {
      if (pred(m)) {
        MaskKey k = key_of(m);
        if (!best || k < *best) best = k;
      }
    }
    return best ? std::optional<uint64_t>(best->mask) : std::nullopt;
  }
  const uint64_t nchunks = detail::chunk_count(total);
  std::vector<std::optional<MaskKey>> part(nchunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t c = 0; c < static_cast<int64_t>(nchunks); ++c) {
    const uint64_t lo = static_cast<uint64_t>(c) << chunk_bits;
    const uint64_t hi = std::min(total, lo + (uint64_t(1) << chunk_bits));
    std::optional<MaskKey> best;
    for (uint64_t m = lo; m < hi; ++m) {
      if (pred(m)) {
        MaskKey k = key_of(m);
        if (!best || k < *best) best = k;
      }
    }
    part[c] = best;
  }
  std::optional<MaskKey> best;
  for (const auto& k : part)
    if (k && (!best || *k < *best)) best = k;
  return best ? std::optional<uint64_t>(best->mask) : std::nullopt;
}

/// Sum of term(mask) over the whole range. The serial path accumulates left
/// to right; the parallel path sums per-chunk partials in chunk order.
template <class Term>
double sum(uint64_t total, Term&& term, bool parallel) {
  if (!parallel) {
    double acc = 0.0;
    for (uint64_t m = 0; m < total; ++m) acc += term(m);
    return acc;
  }
  const uint64_t nchunks = detail::chunk_count(total);
  std::vector<double> part(nchunks, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t c = 0; c < static_cast<int64_t>(nchunks); ++c) {
    const uint64_t lo = static_cast<uint64_t>(c) << chunk_bits;
    const uint64_t hi = std::min(total, lo + (uint64_t(1) << chunk_bits));
    double acc = 0.0;
    for (uint64_t m = lo; m < hi; ++m) acc += term(m);
    part[c] = acc;
  }
  double acc = 0.0;
  for (double p : part) acc += p;
  return acc;
}

/// All qualifying masks, sorted in canonical order.
template <class Pred>
std::vector<uint64_t> collect(uint64_t total, Pred&& pred, bool parallel) {
  std::vector<uint64_t> out;
  if (!parallel) {
    for (uint64_t m = 0; m < total; ++m)
      if (pred(m)) out.push_back(m);
  } else {
    const uint64_t nchunks = detail::chunk_count(total);
    std::vector<std::vector<uint64_t>> part(nchunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (int64_t c = 0; c < static_cast<int64_t>(nchunks); ++c) {
      const uint64_t lo = static_cast<uint64_t>(c) << chunk_bits;
      const uint64_t hi = std::min(total, lo + (uint64_t(1) << chunk_bits));
      for (uint64_t m = lo; m < hi; ++m)
        if (pred(m)) part[c].push_back(m);
    }
    for (auto& p : part) out.insert(out.end(), p.begin(), p.end());
  }
  std::sort(out.begin(), out.end(), [](uint64_t a, uint64_t b) { return key_of(a) < key_of(b); });
  return out;
}

/// Minimum of value(mask) over qualifying masks, or nullopt when none
/// qualifies.
template <class Pred, class Value>
std::optional<double> min_value(uint64_t total, Pred&& pred, Value&& value, bool parallel) {
  if (!parallel) {
    std::optional<double> best;
    for (uint64_t m = 0; m < total; ++m) {
      if (!pred(m)) continue;
      double v = value(m);
      if (!best || v < *best) best = v;
    }
    return best;
  }
  const uint64_t nchunks = detail::chunk_count(total);
  std::vector<std::optional<double>> part(nchunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t c = 0; c < static_cast<int64_t>(nchunks); ++c) {
    const uint64_t lo = static_cast<uint64_t>(c) << chunk_bits;
    const uint64_t hi = std::min(total, lo + (uint64_t(1) << chunk_bits));
    std::optional<double> best;
    for (uint64_t m = lo; m < hi; ++m) {
      if (!pred(m)) continue;
      double v = value(m);
      if (!best || v < *best) best = v;
    }
    part[c] = best;
  }
  std::optional<double> best;
  for (const auto& p : part)
    if (p && (!best || *p < *best)) best = p;
  return best;
}

}  // namespace ftaq::sweep
