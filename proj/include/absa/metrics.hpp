#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "absa/corpus.hpp"

namespace absa {

struct Slot1Score {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Slot3Score {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

using AspectSet = std::set<AspectLabel>;

// Micro-averaged over sentences; lists are aligned by sentence.
Slot1Score micro_f1(const std::vector<AspectSet>& gold,
                    const std::vector<AspectSet>& pred);

// Throws ArgumentError on length mismatch or empty input.
Slot3Score accuracy(const std::vector<Polarity>& gold,
                    const std::vector<Polarity>& pred);

// Distinct categories of each sentence.
std::vector<AspectSet> gold_aspect_sets(const Dataset& dataset);

}  // namespace absa
