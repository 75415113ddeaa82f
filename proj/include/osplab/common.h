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

#ifndef OSPLAB_COMMON_H_
#define OSPLAB_COMMON_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace osplab {

// Every recoverable failure raised by the library; the message is user-facing.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stream seed for trial `stream` under `master`:
// SplitMix64(SplitMix64(master) ^ SplitMix64(~stream)).
uint64_t MixSeed(uint64_t master, uint64_t stream);

// mt19937_64 with library-independent conversions to doubles and bounded
// integers.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform01();
  // Uniform on (0, 1].
  double UniformOpenClosed() { return 1.0 - Uniform01(); }
  // Uniform integer in [0, bound). bound must be positive.
  uint64_t Below(uint64_t bound);
  bool Bernoulli(double p) { return Uniform01() < p; }

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Runs body(i) for i in [0, count) on up to `threads` workers. A value of 0
// means "use hardware concurrency". Each index runs exactly once; the caller
// owns any merging, which must not depend on completion order.
void ParallelFor(size_t count, unsigned threads,
                 const std::function<void(size_t)>& body);

struct SampleSummary {
  size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;          // sample standard deviation (n - 1)
  double standard_error = 0.0;  // stddev / sqrt(n)
  double ci_lo = 0.0;           // 95% normal-approximation interval
  double ci_hi = 0.0;
};

// Summation is sequential in index order, so the result is reproducible.
SampleSummary Summarize(std::span<const double> samples);

// Mixed-radix indexing over a product of finite domains. The last coordinate
// varies fastest, matching the row order of every table file.
class ProfileIndexer {
 public:
  explicit ProfileIndexer(std::vector<int> sizes);

  const std::vector<int>& sizes() const { return sizes_; }
  size_t dimensions() const { return sizes_.size(); }
  // Number of profiles; throws if it would exceed `cap`.
  uint64_t Count(uint64_t cap = UINT64_MAX) const;
  uint64_t Index(std::span<const int> profile) const;
  std::vector<int> Profile(uint64_t index) const;
  // Advances `profile` to the next one in order; returns false after the last.
  bool Next(std::vector<int>& profile) const;

 private:
  std::vector<int> sizes_;
};

double LogBinomial(int n, int k);

}  // namespace osplab

#endif  // OSPLAB_COMMON_H_
