// Copyright 2026 The ofclip Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ofclip/manifest.hpp"
#include "ofclip/rng.hpp"

namespace ofclip {

struct RecordRef {
  std::size_t source = 0;  // index into the registry
  std::size_t record = 0;  // index into that source's records

  bool operator==(const RecordRef&) const = default;
  auto operator<=>(const RecordRef&) const = default;
};

struct Batch {
  std::vector<RecordRef> items;
  std::map<std::string, std::size_t> composition;  // source_id -> count
  std::uint64_t epoch = 0;

  std::size_t size() const noexcept { return items.size(); }
};

/// Splits `slots` across sources proportionally to `remaining` using largest
/// remainders (ties to the lower source index), then lifts every nonempty
/// source to at least one slot by taking from the largest quota.
/// Requires slots < sum(remaining) and slots >= number of nonempty sources.
inline std::vector<std::size_t> apportion(std::span<const std::size_t> remaining, std::size_t slots) {
  const std::size_t total = std::accumulate(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::size_t> quota(remaining.size(), 0);
  if (total == 0 || slots == 0) return quota;
  std::vector<std::size_t> rem(remaining.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    const auto num = static_cast<unsigned __int128>(slots) * remaining[i];
    quota[i] = static_cast<std::size_t>(num / total);
    rem[i] = static_cast<std::size_t>(num % total);
    assigned += quota[i];
  }
  std::vector<std::size_t> order(remaining.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < slots; ++k) {
    quota[order[k % order.size()]] += 1;
    ++assigned;
  }
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    if (remaining[i] == 0 || quota[i] > 0) continue;
    std::size_t donor = remaining.size();
    for (std::size_t j = 0; j < remaining.size(); ++j) {
      if (quota[j] > 1 && (donor == remaining.size() || quota[j] > quota[donor])) donor = j;
    }
    if (donor == remaining.size()) fail(ErrorCode::BatchTooSmall, "cannot give every source a slot");
    quota[donor] -= 1;
    quota[i] = 1;
  }
  return quota;
}

/// Mixed-source batch stream. Each epoch reshuffles every source with a
/// stream derived from (seed, epoch, source) and walks all records exactly
/// once; the last batch of an epoch may be short.
class StratifiedSampler {
 public:
  StratifiedSampler(std::span<const DatasetManifest> registry, std::size_t batch_size, std::uint64_t seed)
      : seed_(seed), batch_size_(batch_size) {
    std::size_t active = 0;
    for (const auto& m : registry) {
      source_ids_.push_back(m.source_id);
      sizes_.push_back(m.size());
      if (m.size() > 0) ++active;
    }
    if (active == 0) fail(ErrorCode::BatchTooSmall, "registry holds no records");
    if (batch_size_ < active) {
      fail(ErrorCode::BatchTooSmall, "batch size " + std::to_string(batch_size_) + " is smaller than the " +
                                         std::to_string(active) + " nonempty sources");
    }
    start_epoch();
  }

  Batch next() {
    if (exhausted()) {
      ++epoch_;
      start_epoch();
    }
    std::vector<std::size_t> remaining(sizes_.size());
    std::size_t total = 0;
    for (std::size_t s = 0; s < sizes_.size(); ++s) {
      remaining[s] = sizes_[s] - cursor_[s];
      total += remaining[s];
    }
    const std::vector<std::size_t> quota = total <= batch_size_ ? remaining : apportion(remaining, batch_size_);

    Batch b;
    b.epoch = epoch_;
    for (std::size_t s = 0; s < sizes_.size(); ++s) {
      if (quota[s] == 0) continue;
      for (std::size_t k = 0; k < quota[s]; ++k) b.items.push_back({s, order_[s][cursor_[s]++]});
      b.composition[source_ids_[s]] = quota[s];
    }
    return b;
  }

  /// All batches of the current epoch from the current position.
  std::vector<Batch> rest_of_epoch() {
    std::vector<Batch> out;
    do {
      out.push_back(next());
    } while (!exhausted());
    return out;
  }

  std::uint64_t epoch() const noexcept { return epoch_; }

  std::size_t batches_per_epoch() const {
    const std::size_t total = std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0});
    return (total + batch_size_ - 1) / batch_size_;
  }

 private:
  bool exhausted() const {
    for (std::size_t s = 0; s < sizes_.size(); ++s)
      if (cursor_[s] < sizes_[s]) return false;
    return true;
  }

  void start_epoch() {
    order_.assign(sizes_.size(), {});
    cursor_.assign(sizes_.size(), 0);
    for (std::size_t s = 0; s < sizes_.size(); ++s) {
      order_[s].resize(sizes_[s]);
      std::iota(order_[s].begin(), order_[s].end(), std::size_t{0});
      SplitMix64 rng(derive_seed(seed_, epoch_ + 1, s + 1));
      shuffle(std::span<std::size_t>(order_[s]), rng);
    }
  }

  std::uint64_t seed_;
  std::size_t batch_size_;
  std::uint64_t epoch_ = 0;
  std::vector<std::string> source_ids_;
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<std::size_t> cursor_;
};

}  // namespace ofclip
