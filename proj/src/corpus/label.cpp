#include "wikiner/corpus/label.hpp"

#include <string>

#include "wikiner/error.hpp"

namespace wikiner::corpus {

std::string_view to_string(NELabel label) {
  switch (label) {
    case NELabel::PER: return "PER";
    case NELabel::LOC: return "LOC";
    case NELabel::ORG: return "ORG";
    case NELabel::MISC: return "MISC";
  }
  return "?";
}

std::optional<NELabel> try_parse_label(std::string_view text) {
  for (NELabel label : kAllLabels) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

NELabel parse_label(std::string_view text) {
  if (auto label = try_parse_label(text)) return *label;
  throw InvalidLabel("'" + std::string(text) + "' is not one of PER, LOC, ORG, MISC",
                     {std::string(text)});
}

}  // namespace wikiner::corpus
