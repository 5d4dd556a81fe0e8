#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "citegen/answer.hpp"

namespace benchutil {

// Synthetic corpus scaled by sentence count; capitalized starts keep the
// splitter honest.
inline citegen::PassageSet corpus(std::size_t sentences) {
  static const char* kOpeners[] = {"Rivers", "Engines", "Markets", "Signals"};
  static const char* kWords[] = {"carry", "load", "through", "deep",  "values",
                                 "change", "every", "season", "under", "stress"};
  std::ostringstream text;
  for (std::size_t i = 0; i < sentences; ++i) {
    if (i) text << ' ';
    text << kOpeners[i % 4];
    for (std::size_t w = 0; w < 4 + i % 3; ++w) text << ' ' << kWords[(i * 3 + w) % 10];
    text << " v" << i << '.';
  }
  citegen::Passage passage;
  passage.id = "p0";
  passage.text = text.str();
  return citegen::PassageSet::from_passages({std::move(passage)});
}

}  // namespace benchutil
