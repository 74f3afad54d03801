#pragma once

#include <string>
#include <string_view>

namespace rguard {

/// Line-based unified diff (LCS) of `before` -> `after` with `context` lines
/// around each hunk. A missing final newline is marked with
/// "\ No newline at end of file", so applying the diff is exact.
std::string unified_diff(std::string_view before, std::string_view after,
                         std::string_view before_label = "original",
                         std::string_view after_label = "refactored", int context = 3);

/// Applies a diff produced by unified_diff. Throws Error when a hunk does
/// not match `original`.
std::string apply_unified_diff(std::string_view original, std::string_view diff);

/// Inserted plus deleted lines between the two texts.
int changed_line_count(std::string_view before, std::string_view after);

}  // namespace rguard
