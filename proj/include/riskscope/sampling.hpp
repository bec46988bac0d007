#pragma once

// Inverse-CDF sampling. The draw sequence is split into fixed-size chunks,
// each with its own generator seeded from (seed, chunk index), so the output
// is identical for any thread count.

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "riskscope/dist_core.hpp"

namespace riskscope {

inline constexpr std::size_t kSampleChunk = std::size_t{1} << 16;

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

namespace detail {

class PolylineInverse {
 public:
  explicit PolylineInverse(const std::vector<Knot>& knots) : knots_(knots) {
    cum_.resize(knots.size(), 0.0);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      cum_[i + 1] = cum_[i] + 0.5 * (knots[i].f + knots[i + 1].f) * (knots[i + 1].x - knots[i].x);
  }

  double operator()(double u) const {
    const double target = u * cum_.back();
    auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), target);
    if (it == cum_.end()) return polyline::upper_support(knots_);
    const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
    const Knot& k0 = knots_[i];
    const Knot& k1 = knots_[i + 1];
    return k0.x + polyline::segment_offset(k0.f, k1.f, k1.x - k0.x, target - cum_[i]);
  }

 private:
  const std::vector<Knot>& knots_;
  std::vector<double> cum_;
};

class DiscreteInverse {
 public:
  explicit DiscreteInverse(const std::vector<Atom>& atoms) : atoms_(sorted_atoms(atoms)) {
    cum_.reserve(atoms_.size());
    double acc = 0.0;
    for (const Atom& a : atoms_) cum_.push_back(acc += a.p);
  }

  double operator()(double u) const {
    const double target = u * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    if (it == cum_.end()) --it;
    return atoms_[static_cast<std::size_t>(it - cum_.begin())].x;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cum_;
};

template <class Inverse>
std::vector<double> draw_chunks(const Inverse& inverse, std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n);
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t c = first; c < chunks; c += stride) {
      auto rng = stream_rng(seed, c);
      const std::size_t end = std::min(n, (c + 1) * kSampleChunk);
      for (std::size_t i = c * kSampleChunk; i < end; ++i) out[i] = inverse(unit_uniform(rng));
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(chunks, std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace detail

/// n i.i.d. loss draws by inverse CDF; deterministic for a fixed seed.
/// Tails must be lifted to a full density first.
inline EmpiricalSample sample(const Distribution& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("sample size must be >= 1");
  ensure_valid(dist);
  const Distribution d = to_loss(dist);
  std::vector<double> draws = std::visit(
      overloaded{
          [&](const PiecewiseLinearDensity& p) {
            return detail::draw_chunks(detail::PolylineInverse(p.knots), n, seed);
          },
          [&](const TailSpec&) -> std::vector<double> {
            throw ArgumentError("a tail has no body; lift it to a full density before sampling");
          },
          [&](const DiscreteDistribution& dd) {
            return detail::draw_chunks(detail::DiscreteInverse(dd.atoms), n, seed);
          },
          [&](const EmpiricalSample& s) {
            const auto& v = s.losses;
            auto pick = [&v](double u) {
              auto i = static_cast<std::size_t>(u * static_cast<double>(v.size()));
              return v[std::min(i, v.size() - 1)];
            };
            return detail::draw_chunks(pick, n, seed);
          },
      },
      d);
  return {std::move(draws), Orientation::loss};
}

}  // namespace riskscope
