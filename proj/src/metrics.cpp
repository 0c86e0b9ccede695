#include "absa/metrics.hpp"

#include "absa/error.hpp"

namespace absa {

Slot1Score micro_f1(const std::vector<AspectSet>& gold,
                    const std::vector<AspectSet>& pred) {
  if (gold.size() != pred.size())
    throw ArgumentError("micro_f1: " + std::to_string(gold.size()) +
                        " gold sets vs " + std::to_string(pred.size()) +
                        " predicted sets");
  Slot1Score s;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const auto& label : pred[i]) {
      if (gold[i].count(label)) {
        ++s.true_positives;
      } else {
        ++s.false_positives;
      }
    }
    for (const auto& label : gold[i])
      if (!pred[i].count(label)) ++s.false_negatives;
  }
  const auto tp = static_cast<double>(s.true_positives);
  if (s.true_positives + s.false_positives > 0)
    s.precision = tp / static_cast<double>(s.true_positives + s.false_positives);
  if (s.true_positives + s.false_negatives > 0)
    s.recall = tp / static_cast<double>(s.true_positives + s.false_negatives);
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

Slot3Score accuracy(const std::vector<Polarity>& gold,
                    const std::vector<Polarity>& pred) {
  if (gold.size() != pred.size())
    throw ArgumentError("accuracy: " + std::to_string(gold.size()) +
                        " gold labels vs " + std::to_string(pred.size()) +
                        " predictions");
  if (gold.empty()) throw ArgumentError("accuracy: undefined on empty input");
  Slot3Score s;
  s.total = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (gold[i] == pred[i]) ++s.correct;
  s.accuracy = static_cast<double>(s.correct) / static_cast<double>(s.total);
  return s;
}

std::vector<AspectSet> gold_aspect_sets(const Dataset& dataset) {
  std::vector<AspectSet> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.sentences) {
    AspectSet set;
    for (const auto& o : s.opinions) set.insert(o.category);
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace absa
