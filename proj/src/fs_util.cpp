#include "rguard/fs_util.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rguard/errors.hpp"

namespace rguard {

namespace fs = std::filesystem;

namespace {
constexpr std::string_view kTempMarker = ".tmp-";
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const fs::path& path, std::string_view content, const BeforeRenameHook& hook) {
  static std::atomic<unsigned> counter{0};
  const fs::path temp = path.parent_path() /
                        (path.filename().string() + std::string(kTempMarker) +
                         std::to_string(::getpid()) + "-" + std::to_string(counter++));
  const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot create " + temp.string() + ": " + std::strerror(errno));
  std::size_t written = 0;
  while (written < content.size()) {
    const ssize_t n = ::write(fd, content.data() + written, content.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string reason = std::strerror(errno);
      ::close(fd);
      ::unlink(temp.c_str());
      throw Error("cannot write " + temp.string() + ": " + reason);
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  std::error_code ec;
  const auto existing = fs::status(path, ec);
  if (!ec && fs::exists(existing)) fs::permissions(temp, existing.permissions(), ec);
  if (hook) hook(temp, path);
  if (::rename(temp.c_str(), path.c_str()) != 0) {
    const std::string reason = std::strerror(errno);
    ::unlink(temp.c_str());
    throw Error("cannot replace " + path.string() + ": " + reason);
  }
}

bool is_temp_file(const fs::path& path) {
  return path.filename().string().find(kTempMarker) != std::string::npos;
}

}  // namespace rguard
