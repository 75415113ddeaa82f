// Copyright 2026 The OSPLab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "osplab/common.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/core.h>

namespace osplab {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t MixSeed(uint64_t master, uint64_t stream) {
  return SplitMix64(SplitMix64(master) ^ SplitMix64(~stream));
}

double Rng::Uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

uint64_t Rng::Below(uint64_t bound) {
  if (bound == 0) throw Error("Rng::Below: bound must be positive");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

void ParallelFor(size_t count, unsigned threads,
                 const std::function<void(size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, count));
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (size_t i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

SampleSummary Summarize(std::span<const double> samples) {
  SampleSummary s;
  s.count = samples.size();
  if (s.count == 0) return s;
  double sum = 0.0;
  for (double x : samples) sum += x;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double sq = 0.0;
    for (double x : samples) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.count - 1));
    s.standard_error = s.stddev / std::sqrt(static_cast<double>(s.count));
  }
  const double half = 1.959963984540054 * s.standard_error;
  s.ci_lo = s.mean - half;
  s.ci_hi = s.mean + half;
  return s;
}

ProfileIndexer::ProfileIndexer(std::vector<int> sizes)
    : sizes_(std::move(sizes)) {
  for (int s : sizes_) {
    if (s <= 0) throw Error("ProfileIndexer: every domain must be non-empty");
  }
}

uint64_t ProfileIndexer::Count(uint64_t cap) const {
  uint64_t total = 1;
  for (int s : sizes_) {
    if (total > cap / static_cast<uint64_t>(s)) {
      throw Error(fmt::format("profile space exceeds the cap of {}", cap));
    }
    total *= static_cast<uint64_t>(s);
  }
  return total;
}

uint64_t ProfileIndexer::Index(std::span<const int> profile) const {
  uint64_t index = 0;
  for (size_t i = 0; i < sizes_.size(); ++i) {
    index = index * static_cast<uint64_t>(sizes_[i]) +
            static_cast<uint64_t>(profile[i]);
  }
  return index;
}

std::vector<int> ProfileIndexer::Profile(uint64_t index) const {
  std::vector<int> profile(sizes_.size());
  for (size_t i = sizes_.size(); i-- > 0;) {
    profile[i] = static_cast<int>(index % static_cast<uint64_t>(sizes_[i]));
    index /= static_cast<uint64_t>(sizes_[i]);
  }
  return profile;
}

bool ProfileIndexer::Next(std::vector<int>& profile) const {
  for (size_t i = sizes_.size(); i-- > 0;) {
    if (++profile[i] < sizes_[i]) return true;
    profile[i] = 0;
  }
  return false;
}

double LogBinomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return -INFINITY;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace osplab
