#ifndef CONDMTL_CONDITIONAL_LABEL_HPP
#define CONDMTL_CONDITIONAL_LABEL_HPP

#include <cstdint>

namespace condmtl {

/// Per-branch label state. Irrelevant means the example carries no toxicity
/// information for the branch and must never enter its loss.
enum class ConditionalLabel : std::int8_t {
    NonToxic = 0,
    Toxic = 1,
    Irrelevant = -1,
};

/// Wire encoding used in label files: Toxic -> 1, NonToxic -> 0, Irrelevant -> -1.
constexpr int to_int(ConditionalLabel label) {
    return static_cast<int>(label);
}

ConditionalLabel conditional_label_from_int(int value);

constexpr bool is_relevant(ConditionalLabel label) {
    return label != ConditionalLabel::Irrelevant;
}

}  // namespace condmtl

#endif  // CONDMTL_CONDITIONAL_LABEL_HPP
