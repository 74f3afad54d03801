#include "rguard/diff.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "rguard/errors.hpp"

namespace rguard {

namespace {

struct Line {
  std::string text;
  bool newline = true;  // false only for an unterminated last line

  bool operator==(const Line&) const = default;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back({std::string(text.substr(pos)), false});
      break;
    }
    out.push_back({std::string(text.substr(pos, nl - pos)), true});
    pos = nl + 1;
  }
  return out;
}

enum class Op { Keep, Del, Add };

struct Edit {
  Op op;
  std::size_t a;  // index into before (Keep/Del)
  std::size_t b;  // index into after (Keep/Add)
};

// Classic LCS table; function-sized inputs keep this cheap.
std::vector<Edit> diff_lines(const std::vector<Line>& a, const std::vector<Line>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  std::vector<Edit> edits;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      edits.push_back({Op::Keep, i++, j++});
    } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      edits.push_back({Op::Del, i++, j});
    } else {
      edits.push_back({Op::Add, i, j++});
    }
  }
  return edits;
}

void emit_line(std::string& out, char prefix, const Line& line) {
  out += prefix;
  out += line.text;
  out += '\n';
  if (!line.newline) out += "\\ No newline at end of file\n";
}

std::string range(std::size_t start, std::size_t count) {
  // Unified format: empty ranges point at the line before.
  const std::size_t shown = count == 0 ? start : start + 1;
  return std::to_string(shown) + "," + std::to_string(count);
}

}  // namespace

std::string unified_diff(std::string_view before, std::string_view after,
                         std::string_view before_label, std::string_view after_label,
                         int context) {
  const auto a = split_lines(before);
  const auto b = split_lines(after);
  const auto edits = diff_lines(a, b);

  std::string out = "--- " + std::string(before_label) + "\n+++ " + std::string(after_label) + "\n";
  const auto ctx = static_cast<std::size_t>(std::max(context, 0));
  std::size_t k = 0;
  while (k < edits.size()) {
    while (k < edits.size() && edits[k].op == Op::Keep) ++k;
    if (k == edits.size()) break;
    // Hunk spans [start, end) over edits, merging changes closer than 2*ctx.
    const std::size_t start = k >= ctx ? k - ctx : 0;
    std::size_t end = k;
    for (;;) {
      while (end < edits.size() && edits[end].op != Op::Keep) ++end;
      std::size_t keep_run = end;
      while (keep_run < edits.size() && edits[keep_run].op == Op::Keep) ++keep_run;
      if (keep_run < edits.size() && keep_run - end <= 2 * ctx) {
        end = keep_run;
        continue;
      }
      end = std::min(edits.size(), end + ctx);
      break;
    }
    std::size_t a_count = 0;
    std::size_t b_count = 0;
    for (std::size_t e = start; e < end; ++e) {
      if (edits[e].op != Op::Add) ++a_count;
      if (edits[e].op != Op::Del) ++b_count;
    }
    out += "@@ -" + range(edits[start].a, a_count) + " +" + range(edits[start].b, b_count) + " @@\n";
    for (std::size_t e = start; e < end; ++e) {
      switch (edits[e].op) {
        case Op::Keep: emit_line(out, ' ', a[edits[e].a]); break;
        case Op::Del: emit_line(out, '-', a[edits[e].a]); break;
        case Op::Add: emit_line(out, '+', b[edits[e].b]); break;
      }
    }
    k = end;
  }
  return out;
}

std::string apply_unified_diff(std::string_view original, std::string_view diff) {
  const auto src = split_lines(original);
  std::vector<Line> out;
  std::size_t cursor = 0;  // next unconsumed line of src

  const auto diff_lines_raw = split_lines(diff);
  std::size_t i = 0;
  auto fail = [](const std::string& msg) -> void { throw Error("patch does not apply: " + msg); };

  while (i < diff_lines_raw.size()) {
    const std::string& header = diff_lines_raw[i].text;
    if (header.rfind("---", 0) == 0 || header.rfind("+++", 0) == 0) {
      ++i;
      continue;
    }
    if (header.rfind("@@ -", 0) != 0) fail("expected hunk header, got '" + header + "'");
    std::size_t a_start = 0;
    std::size_t a_count = 0;
    {
      std::istringstream in(header.substr(4));
      char comma = 0;
      in >> a_start >> comma >> a_count;
      if (!in || comma != ',') fail("malformed hunk header");
    }
    const std::size_t first = a_count == 0 ? a_start : a_start - 1;
    if (first < cursor || first > src.size()) fail("hunk out of order");
    out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(cursor),
               src.begin() + static_cast<std::ptrdiff_t>(first));
    cursor = first;
    ++i;
    while (i < diff_lines_raw.size() && diff_lines_raw[i].text.rfind("@@", 0) != 0) {
      const std::string& raw = diff_lines_raw[i].text;
      if (raw.empty()) fail("empty hunk line");
      Line line{raw.substr(1), true};
      if (i + 1 < diff_lines_raw.size() &&
          diff_lines_raw[i + 1].text.rfind("\\ No newline", 0) == 0) {
        line.newline = false;
        ++i;
      }
      ++i;
      switch (raw[0]) {
        case ' ':
        case '-':
          if (cursor >= src.size() || !(src[cursor] == line)) fail("context mismatch");
          if (raw[0] == ' ') out.push_back(src[cursor]);
          ++cursor;
          break;
        case '+':
          out.push_back(line);
          break;
        default:
          fail("unexpected hunk line");
      }
    }
  }
  out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(cursor), src.end());

  std::string text;
  for (const Line& l : out) {
    text += l.text;
    if (l.newline) text += '\n';
  }
  return text;
}

int changed_line_count(std::string_view before, std::string_view after) {
  int changed = 0;
  for (const Edit& e : diff_lines(split_lines(before), split_lines(after)))
    if (e.op != Op::Keep) ++changed;
  return changed;
}

}  // namespace rguard
