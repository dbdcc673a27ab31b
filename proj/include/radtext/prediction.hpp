#pragma once

#include <array>
#include <string>

#include "radtext/corpus.hpp"

namespace radtext {

struct Prediction {
  std::string record_id;
  double score = 0.0;                          // two-class score
  std::array<double, 3> probabilities{};       // three-class (R, NR, I)
  bool has_probabilities = false;
  Label label = Label::NR;
};

}  // namespace radtext
