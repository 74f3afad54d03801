#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace rguard {

std::string read_text_file(const std::filesystem::path& path);  // throws Error

/// Called after the temporary file is complete and before it is renamed
/// over the target. Tests use it to simulate a crash at that point.
using BeforeRenameHook = std::function<void(const std::filesystem::path& temp,
                                            const std::filesystem::path& target)>;

/// Writes `content` to a sibling temporary file, flushes it to disk and
/// renames it over `path`, so readers see either the old or the new file.
void atomic_write(const std::filesystem::path& path, std::string_view content,
                  const BeforeRenameHook& hook = {});

/// True for the temporary names atomic_write uses.
bool is_temp_file(const std::filesystem::path& path);

}  // namespace rguard
