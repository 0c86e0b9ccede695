#include "absa/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "absa/error.hpp"
#include "absa/random.hpp"

namespace absa {

namespace {

bool is_label_part(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

// One decoded code point plus the bytes it came from. Invalid UTF-8 bytes
// decode to themselves so that nothing is lost.
struct CodePoint {
  char32_t value;
  std::string_view raw;
};

std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = lead;
    if (lead >= 0xC0 && lead < 0xE0) {
      len = 2;
      cp = lead & 0x1F;
    } else if (lead >= 0xE0 && lead < 0xF0) {
      len = 3;
      cp = lead & 0x0F;
    } else if (lead >= 0xF0 && lead < 0xF8) {
      len = 4;
      cp = lead & 0x07;
    }
    bool valid = len == 1 || i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        valid = false;
      } else {
        cp = (cp << 6) | (cont & 0x3F);
      }
    }
    if (!valid) {
      len = 1;
      cp = lead;
    }
    out.push_back({cp, text.substr(i, len)});
    i += len;
  }
  return out;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t lower(char32_t c) {
  auto even_up = [c](char32_t lo, char32_t hi) {
    return c >= lo && c <= hi && (c - lo) % 2 == 0;
  };
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE && c != 0xD7) return c + 32;
  if (even_up(0x100, 0x12F) || even_up(0x132, 0x137) || even_up(0x139, 0x148) ||
      even_up(0x14A, 0x177) || even_up(0x179, 0x17E))
    return c + 1;
  if (c == 0x130) return U'i';
  if (c == 0x178) return 0xFF;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (even_up(0x460, 0x481) || even_up(0x48A, 0x4BF) || even_up(0x4D0, 0x4FF))
    return c + 1;
  if (c >= 0x4C1 && c <= 0x4CE && (c - 0x4C1) % 2 == 0) return c + 1;
  return c;
}

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0xA0 || (c >= 0x2000 && c <= 0x200B) ||
         c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0xA1: case 0xAB: case 0xB7: case 0xBB: case 0xBF:
    case 0x60C: case 0x61B: case 0x61F: case 0x6D4:
      return true;
    default:
      break;
  }
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x303F) || (c >= 0xFF01 && c <= 0xFF0F) ||
         (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
         (c >= 0xFF5B && c <= 0xFF65);
}

std::string lower_span(const std::vector<CodePoint>& cps, std::size_t begin,
                       std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    const char32_t l = lower(cps[i].value);
    if (l == cps[i].value) {
      out.append(cps[i].raw);
    } else {
      encode_utf8(l, out);
    }
  }
  return out;
}

void tokenize_chunk(const std::vector<CodePoint>& cps, std::size_t begin,
                    std::size_t end, std::vector<std::string>& out) {
  std::size_t lead = begin;
  while (lead < end && is_punct(cps[lead].value)) ++lead;
  if (lead == end) {
    for (std::size_t i = begin; i < end; ++i) out.emplace_back(cps[i].raw);
    return;
  }
  std::size_t trail = end;
  while (trail > lead && is_punct(cps[trail - 1].value)) --trail;
  for (std::size_t i = begin; i < lead; ++i) out.emplace_back(cps[i].raw);
  out.push_back(lower_span(cps, lead, trail));
  for (std::size_t i = trail; i < end; ++i) out.emplace_back(cps[i].raw);
}

namespace pt = boost::property_tree;

std::optional<std::string> attribute_opt(const pt::ptree& node,
                                         const std::string& name) {
  auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return std::nullopt;
  auto v = attrs->get_optional<std::string>(name);
  if (!v) return std::nullopt;
  return *v;
}

Sentence read_sentence(const pt::ptree& node, const Tokenizer& tokenizer) {
  Sentence s;
  auto id = attribute_opt(node, "id");
  if (!id) throw ParseError("<sentence> element without an id attribute");
  s.id = *id;
  auto text = node.get_child_optional("text");
  if (!text) throw ParseError("sentence " + s.id + ": missing <text>");
  s.text = text->data();
  s.tokens = tokenizer.tokenize(s.text);
  if (auto opinions = node.get_child_optional("Opinions")) {
    for (const auto& [key, op] : *opinions) {
      if (key != "Opinion") continue;
      auto category = attribute_opt(op, "category");
      if (!category)
        throw ParseError("sentence " + s.id + ": <Opinion> without category");
      Opinion o{AspectLabel::parse(*category), std::nullopt};
      if (auto pol = attribute_opt(op, "polarity")) {
        try {
          o.polarity = parse_polarity(*pol);
        } catch (const ParseError& e) {
          throw ParseError("sentence " + s.id + ": " + e.what());
        }
      }
      s.opinions.push_back(std::move(o));
    }
  }
  return s;
}

void collect_sentences(const pt::ptree& node, const Tokenizer& tokenizer,
                       Dataset& out) {
  for (const auto& [key, child] : node) {
    if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
    if (key == "sentence") {
      try {
        out.sentences.push_back(read_sentence(child, tokenizer));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(e.what());
      }
    } else {
      collect_sentences(child, tokenizer, out);
    }
  }
}

std::string escape_xml(std::string_view s, bool attribute) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out.push_back(c);
        }
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

AspectLabel::AspectLabel(std::string entity, std::string attribute)
    : entity_(std::move(entity)), attribute_(std::move(attribute)) {
  if (!is_label_part(entity_) || !is_label_part(attribute_))
    throw ParseError("invalid aspect label '" + entity_ + "#" + attribute_ +
                     "'");
}

AspectLabel AspectLabel::parse(std::string_view canonical) {
  const auto hash = canonical.find('#');
  if (hash == std::string_view::npos ||
      canonical.find('#', hash + 1) != std::string_view::npos)
    throw ParseError("invalid aspect label '" + std::string(canonical) + "'");
  return AspectLabel(std::string(canonical.substr(0, hash)),
                     std::string(canonical.substr(hash + 1)));
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
  }
  return "?";
}

Polarity parse_polarity(std::string_view s) {
  if (s == "positive") return Polarity::positive;
  if (s == "negative") return Polarity::negative;
  if (s == "neutral") return Polarity::neutral;
  throw ParseError("unknown polarity '" + std::string(s) + "'");
}

std::string to_lower_utf8(std::string_view text) {
  const auto cps = decode_utf8(text);
  return lower_span(cps, 0, cps.size());
}

std::vector<std::string> DefaultTokenizer::tokenize(std::string_view text) const {
  const auto cps = decode_utf8(text);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i].value)) ++i;
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j].value)) ++j;
    if (j > i) tokenize_chunk(cps, i, j, tokens);
    i = j;
  }
  return tokens;
}

std::vector<std::string> ChineseSegmenter::tokenize(std::string_view) const {
  throw UsageError(
      "Chinese segmentation is not built in; supply pre-segmented text");
}

std::vector<std::string> tokenize(std::string_view text) {
  return DefaultTokenizer{}.tokenize(text);
}

Dataset parse_semeval_xml(std::string_view document, const Tokenizer& tokenizer) {
  pt::ptree tree;
  std::istringstream in{std::string(document)};
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XML at line " + std::to_string(e.line()) +
                     ": " + e.message());
  }
  Dataset dataset;
  collect_sentences(tree, tokenizer, dataset);
  std::set<std::string> seen;
  for (const auto& s : dataset.sentences) {
    if (!seen.insert(s.id).second)
      throw ParseError("duplicate sentence id " + s.id);
  }
  return dataset;
}

Dataset read_semeval_file(const std::string& path, const Tokenizer& tokenizer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open corpus file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_semeval_xml(buf.str(), tokenizer);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string write_semeval_xml(const Dataset& dataset) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<sentences>\n";
  for (const auto& s : dataset.sentences) {
    out << "  <sentence id=\"" << escape_xml(s.id, true) << "\">\n";
    out << "    <text>" << escape_xml(s.text, false) << "</text>\n";
    if (!s.opinions.empty()) {
      out << "    <Opinions>\n";
      for (const auto& o : s.opinions) {
        out << "      <Opinion category=\"" << o.category.canonical() << "\"";
        if (o.polarity) out << " polarity=\"" << to_string(*o.polarity) << "\"";
        out << "/>\n";
      }
      out << "    </Opinions>\n";
    }
    out << "  </sentence>\n";
  }
  out << "</sentences>\n";
  return out.str();
}

void write_semeval_file(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << write_semeval_xml(dataset);
}

std::pair<Dataset, Dataset> split_train_validation(const Dataset& dataset,
                                                   double fraction,
                                                   std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ArgumentError("validation fraction must lie in (0, 1)");
  if (dataset.empty()) throw ArgumentError("cannot split an empty dataset");
  const std::size_t n = dataset.size();
  const auto n_valid = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> in_valid(n, false);
  for (std::size_t i = 0; i < n_valid; ++i) in_valid[order[i]] = true;

  Dataset train{dataset.language, dataset.domain, {}};
  Dataset valid{dataset.language, dataset.domain, {}};
  for (std::size_t i = 0; i < n; ++i)
    (in_valid[i] ? valid : train).sentences.push_back(dataset.sentences[i]);
  return {std::move(train), std::move(valid)};
}

}  // namespace absa
