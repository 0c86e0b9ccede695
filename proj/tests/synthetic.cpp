#include "synthetic.hpp"

#include <algorithm>
#include <string>

#include "absa/random.hpp"

namespace absa::synthetic {

namespace {

const std::vector<std::string> kFiller = {
    "the",   "a",     "we",     "they",  "it",     "was",   "were",  "and",
    "then",  "there", "place",  "table", "night",  "went",  "came",  "our",
    "with",  "for",   "after",  "about", "friend", "group", "visit", "again",
    "some",  "time",  "really", "quite", "very",   "also",  "just",  "here",
    "today", "all",   "other",  "side",  "front",  "back",  "my",    "this"};

std::string filler(Rng& rng) { return kFiller[rng.below(kFiller.size())]; }

std::vector<std::string> filler_sentence(Rng& rng, int min_len, int max_len) {
  const int len = min_len + static_cast<int>(rng.below(max_len - min_len + 1));
  std::vector<std::string> words;
  for (int i = 0; i < len; ++i) words.push_back(filler(rng));
  return words;
}

void insert_at_random(std::vector<std::string>& words, const std::string& w, Rng& rng) {
  words.insert(words.begin() + static_cast<long>(rng.below(words.size() + 1)), w);
}

Sentence make_sentence(int index, const std::vector<std::string>& words,
                       std::vector<Opinion> opinions) {
  Sentence s;
  s.id = "syn:" + std::to_string(index);
  for (const auto& w : words) {
    if (!s.text.empty()) s.text += ' ';
    s.text += w;
  }
  s.text += '.';
  s.tokens = tokenize(s.text);
  s.opinions = std::move(opinions);
  return s;
}

}  // namespace

std::vector<AspectLabel> detection_aspects() {
  return {AspectLabel::parse("FOOD#QUALITY"),      AspectLabel::parse("FOOD#PRICES"),
          AspectLabel::parse("SERVICE#GENERAL"),   AspectLabel::parse("AMBIENCE#GENERAL"),
          AspectLabel::parse("DRINKS#QUALITY"),    AspectLabel::parse("LOCATION#GENERAL"),
          AspectLabel::parse("RESTAURANT#PRICES"), AspectLabel::parse("RESTAURANT#GENERAL")};
}

Dataset detection_corpus(int sentences, std::uint64_t seed) {
  static const std::vector<std::vector<std::string>> cues = {
      {"delicious", "bland"},   {"cheap", "overpriced"}, {"waiter", "staff"},
      {"decor", "music"},       {"wine", "cocktails"},   {"downtown", "parking"},
      {"expensive", "bill"},    {"recommend", "favorite"}};
  const auto aspects = detection_aspects();
  Rng rng(seed);
  Dataset d{"en", "synthetic", {}};
  for (int i = 0; i < sentences; ++i) {
    const double u = rng.uniform01();
    const int n_aspects = u < 0.15 ? 0 : (u < 0.6 ? 1 : 2);
    auto words = filler_sentence(rng, 5, 12);
    std::vector<Opinion> opinions;
    std::vector<std::size_t> chosen;
    while (static_cast<int>(chosen.size()) < n_aspects) {
      const std::size_t a = rng.below(aspects.size());
      if (std::find(chosen.begin(), chosen.end(), a) != chosen.end()) continue;
      chosen.push_back(a);
      insert_at_random(words, cues[a][rng.below(2)], rng);
      opinions.push_back({aspects[a], Polarity::positive});
    }
    d.sentences.push_back(make_sentence(i, words, std::move(opinions)));
  }
  return d;
}

std::vector<AspectLabel> polarity_aspects() {
  return {AspectLabel::parse("FOOD#QUALITY"), AspectLabel::parse("SERVICE#GENERAL"),
          AspectLabel::parse("AMBIENCE#GENERAL"), AspectLabel::parse("FOOD#PRICES")};
}

Dataset polarity_corpus(int opinions, std::uint64_t seed) {
  static const std::vector<std::string> cues = {"superb", "awful", "odd", "notable"};
  const auto aspects = polarity_aspects();
  Rng rng(seed);
  Dataset d{"en", "synthetic", {}};
  int total = 0;
  for (int i = 0; total < opinions; ++i) {
    const std::size_t cue = rng.below(cues.size());
    auto words = filler_sentence(rng, 5, 12);
    insert_at_random(words, cues[cue], rng);
    const int wanted = std::min(opinions - total, rng.uniform01() < 0.5 ? 1 : 2);
    std::vector<Opinion> ops;
    std::vector<std::size_t> chosen;
    while (static_cast<int>(chosen.size()) < wanted) {
      const std::size_t a = rng.below(aspects.size());
      if (std::find(chosen.begin(), chosen.end(), a) != chosen.end()) continue;
      chosen.push_back(a);
      ops.push_back({aspects[a], static_cast<Polarity>((cue + a) % 3)});
    }
    total += wanted;
    d.sentences.push_back(make_sentence(i, words, std::move(ops)));
  }
  return d;
}

Dataset inventory_corpus(const std::vector<int>& counts, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d{"en", "synthetic", {}};
  int index = 0;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    const AspectLabel label("E" + std::to_string(a), "A" + std::to_string(a));
    for (int c = 0; c < counts[a]; ++c)
      d.sentences.push_back(make_sentence(index++, filler_sentence(rng, 3, 6),
                                          {{label, Polarity::neutral}}));
  }
  return d;
}

}  // namespace absa::synthetic
