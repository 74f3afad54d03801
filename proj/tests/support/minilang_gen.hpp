#pragma once

// Random MiniLang function generator for property tests. While emitting
// text it records the metrics each smell is defined over, computed from its
// own construction rather than from the library's syntax tree.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace rguard::testing {

struct GeneratedTruth {
  int branch_count = 0;               // if/while/for/case(non-default)/?:
  int max_depth = 0;                  // if/while/for/switch nesting, else-if flat
  std::vector<int> condition_ops;     // && / || per branch condition, source order
  std::vector<int> top_level_depths;  // nesting reached by each top-level statement
  int loc = 0;                        // lines carrying code
  int cyclomatic() const { return 1 + branch_count; }
};

struct GeneratedFunction {
  std::string name;
  std::string text;
  GeneratedTruth truth;
};

struct GeneratorLimits {
  int max_depth = 6;
  int max_ops = 8;
  int min_loc = 1;
  int max_loc = 150;
};

class MiniLangGenerator {
 public:
  explicit MiniLangGenerator(unsigned seed, GeneratorLimits limits = {})
      : rng_(seed), limits_(limits) {}

  GeneratedFunction function(const std::string& name) {
    lines_.clear();
    truth_ = {};
    const int target = uniform(limits_.min_loc, limits_.max_loc);
    if (target <= 2 || chance(0.03)) {
      code("function " + name + "(a, b) { return a; }");
      truth_.top_level_depths.push_back(0);
      return finish(name);
    }
    code("function " + name + "(a, b, c) {");
    budget_ = target - 2;  // header and closing brace
    while (budget_ > 0) {
      trivia();
      const int reached = statement(0);
      truth_.top_level_depths.push_back(reached);
    }
    code("}");
    return finish(name);
  }

 private:
  GeneratedFunction finish(const std::string& name) {
    GeneratedFunction out{name, {}, truth_};
    for (const std::string& l : lines_) out.text += l + "\n";
    return out;
  }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  std::string indent(int depth) const { return std::string(static_cast<std::size_t>(2 + 2 * depth), ' '); }

  void code(const std::string& text) {
    lines_.push_back(text);
    ++truth_.loc;
  }
  void code_line(int depth, const std::string& text) {
    std::string line = indent(depth) + text;
    if (chance(0.05)) line += " // note";
    code(line);
    --budget_;
  }

  // Blank lines and comment-only lines do not count toward LoC.
  void trivia() {
    if (chance(0.08)) lines_.push_back("");
    if (chance(0.05)) lines_.push_back("    // explain the next step");
    if (chance(0.03)) {
      lines_.push_back("    /* multi-line");
      lines_.push_back("       comment if (x) while (y) case ? && || */");
    }
  }

  std::string operand() {
    static const std::vector<std::string> kOperands = {
        "a", "b", "c", "x", "y", "total", "ready", "(x < 3)", "(a == b)", "check(a)",
        "!done", "(y >= 10)", "user.active", "!(b != 2)", "'on' == mode"};
    return pick(kOperands);
  }

  std::string condition() {
    const int ops = uniform(0, 1) == 0 ? uniform(0, 2) : uniform(0, limits_.max_ops);
    truth_.condition_ops.push_back(ops);
    std::string expr = operand();
    for (int i = 0; i < ops; ++i) {
      expr += chance(0.5) ? " && " : " || ";
      expr += operand();
      if (chance(0.15)) expr = "(" + expr + ")";
    }
    if (chance(0.1)) expr = "!(" + expr + ")";
    return expr;
  }

  std::string simple() {
    switch (uniform(0, 5)) {
      case 0: return "x = x + 1;";
      case 1: return "log(total, 'step');";
      case 2: return "let v" + std::to_string(uniform(0, 99)) + " = a * 2 + b;";
      case 3: return "total = compute(a, b.size);";
      case 4: {
        ++truth_.branch_count;
        const std::string cond = condition();
        return "y = " + cond + " ? 1 : 2;";
      }
      default: return "user.count = total - 3;";
    }
  }

  // Emits one statement at `depth` enclosing constructs and returns the
  // nesting level it reaches (0 for straight-line statements).
  int statement(int depth) {
    const bool can_nest = depth < limits_.max_depth && budget_ >= 3;
    if (!can_nest || chance(0.45)) {
      code_line(depth, simple());
      return depth;
    }
    switch (uniform(0, 4)) {
      case 0: return if_statement(depth);
      case 1: return loop(depth, "while (" + condition() + ") {");
      case 2: {
        if (chance(0.1)) return loop(depth, "for (;;) {");
        return loop(depth, "for (let i = 0; " + condition() + "; i = i + 1) {");
      }
      case 3: return switch_statement(depth);
      default: return loop(depth, "if (" + condition() + ") {");
    }
  }

  // Children of a block opened at `depth`; the closing line is reserved.
  int block_body(int depth, int max_children = 4) {
    int reached = depth;
    int emitted = 0;
    do {
      reached = std::max(reached, statement(depth));
      ++emitted;
    } while (budget_ > 1 && emitted < max_children && chance(0.6));
    return reached;
  }

  int loop(int depth, const std::string& header) {
    ++truth_.branch_count;
    const int level = depth + 1;
    truth_.max_depth = std::max(truth_.max_depth, level);
    code_line(depth, header);
    --budget_;  // closing brace
    const int reached = block_body(level);
    code(indent(depth) + "}");
    return std::max(level, reached);
  }

  int if_statement(int depth) {
    const int level = depth + 1;
    truth_.max_depth = std::max(truth_.max_depth, level);
    ++truth_.branch_count;
    code_line(depth, "if (" + condition() + ") {");
    --budget_;
    int reached = std::max(level, block_body(level));
    // else-if chain links stay at `level`.
    while (budget_ >= 3 && chance(0.35)) {
      ++truth_.branch_count;
      if (budget_ >= 4 && chance(0.3)) {
        // `else { if (...) { ... } }`: a block whose sole statement is an If.
        code(indent(depth) + "} else {");
        code_line(depth, "if (" + condition() + ") {");
        --budget_;
        --budget_;
        reached = std::max(reached, block_body(level));
        code(indent(depth) + "}");
        code(indent(depth) + "}");
        return reached;
      }
      code(indent(depth) + "} else if (" + condition() + ") {");
      --budget_;
      reached = std::max(reached, block_body(level));
    }
    if (budget_ >= 2 && chance(0.3)) {
      code(indent(depth) + "} else {");
      --budget_;
      // Never a lone If here, so the branch nests normally.
      code_line(level, simple());
      if (budget_ > 1) reached = std::max(reached, block_body(level, 2));
    }
    code(indent(depth) + "}");
    return reached;
  }

  int switch_statement(int depth) {
    const int level = depth + 1;
    truth_.max_depth = std::max(truth_.max_depth, level);
    code_line(depth, "switch (mode) {");
    --budget_;
    int reached = level;
    int cases = 0;
    do {
      ++truth_.branch_count;
      code_line(level, "case " + std::to_string(cases++) + ":");
      if (budget_ > 1) reached = std::max(reached, block_body(level, 2));
    } while (budget_ > 2 && chance(0.5));
    if (budget_ > 1 && chance(0.5)) {
      code_line(level, "default:");
      if (budget_ > 1) reached = std::max(reached, block_body(level, 1));
    }
    code(indent(depth) + "}");
    return reached;
  }

  std::mt19937 rng_;
  GeneratorLimits limits_;
  std::vector<std::string> lines_;
  GeneratedTruth truth_;
  int budget_ = 0;
};

}  // namespace rguard::testing
