#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace wikiner::corpus {

// CoNLL-2003 entity classes. Declaration order is the canonical order used
// for tie-breaking and reporting.
enum class NELabel { PER = 0, LOC = 1, ORG = 2, MISC = 3 };

inline constexpr std::array<NELabel, 4> kAllLabels = {NELabel::PER, NELabel::LOC,
                                                      NELabel::ORG, NELabel::MISC};

std::string_view to_string(NELabel label);
std::optional<NELabel> try_parse_label(std::string_view text);
// Throws InvalidLabel.
NELabel parse_label(std::string_view text);

}  // namespace wikiner::corpus
