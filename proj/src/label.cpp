#include "secfn/label.hpp"

namespace secfn {

const std::string& label_name(Label l) {
  static const std::array<std::string, kNumLabels> kNames = {
      "introduction", "related_work", "method", "eval_result", "conclusion", "other"};
  return kNames[static_cast<size_t>(label_id(l))];
}

Label parse_label(const std::string& s) {
  for (Label l : all_labels())
    if (s == label_name(l)) return l;
  throw DataError("unknown label '" + s +
                  "' (expected one of introduction, related_work, method, "
                  "eval_result, conclusion, other)");
}

}  // namespace secfn
