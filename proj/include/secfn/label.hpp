#pragma once

#include <array>
#include <string>

#include "secfn/common.hpp"

namespace secfn {

// The six chapter roles. Other is non-substantive: it is excluded from
// relative-position denominators and, by default, from macro averaging.
enum class Label : int {
  Introduction = 0,
  RelatedWork = 1,
  Method = 2,
  EvalResult = 3,
  Conclusion = 4,
  Other = 5,
};

inline constexpr int kNumLabels = 6;

inline constexpr std::array<Label, 6> all_labels() {
  return {Label::Introduction, Label::RelatedWork, Label::Method,
          Label::EvalResult,   Label::Conclusion,  Label::Other};
}

inline constexpr std::array<Label, 5> substantive_labels() {
  return {Label::Introduction, Label::RelatedWork, Label::Method,
          Label::EvalResult, Label::Conclusion};
}

const std::string& label_name(Label l);
Label parse_label(const std::string& s);  // throws DataError on unknown names

inline int label_id(Label l) { return static_cast<int>(l); }
inline Label label_from_id(int id) {
  if (id < 0 || id >= kNumLabels) throw InternalError("label id out of range");
  return static_cast<Label>(id);
}

}  // namespace secfn
