#include <algorithm>
#include <cctype>
#include <set>

#include "rguard/lang_frontend.hpp"

namespace rguard {

ParseError::ParseError(SourceSpan span, const std::string& message)
    : Error(span.file + ":" + std::to_string(span.start_line) + ":" +
            std::to_string(span.start_col) + ": " + message),
      span_(std::move(span)) {}

std::string normalize_newlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out += '\n';
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out += text[i];
    }
  }
  return out;
}

namespace {

enum class Tok { Ident, Keyword, Number, String, Punct, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
  std::size_t offset = 0;

  int end_col() const { return col + std::max<int>(1, static_cast<int>(text.size())) - 1; }
};

const std::set<std::string, std::less<>> kKeywords = {
    "function", "let", "if", "else", "while", "for", "switch", "case", "default", "return"};

// Longest first so that "===" wins over "==".
constexpr std::string_view kPuncts[] = {"===", "!==", "==", "!=", "<=", ">=", "&&", "||",
                                        "(",   ")",   "{",  "}",  ",",  ";",  ":",  "?",
                                        ".",   "=",   "<",  ">",  "+",  "-",  "*",  "/",
                                        "%",   "!"};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        out.push_back(Token{Tok::End, "", line_, col_, pos_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(SourceSpan{file_, line_, col_, line_, col_}, msg);
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  bool at(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (at("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (at("/*")) {
        advance(2);
        while (pos_ < src_.size() && !at("*/")) advance();
        if (pos_ >= src_.size()) fail("unterminated block comment");
        advance(2);
      } else {
        return;
      }
    }
  }

  Token next() {
    Token tok{Tok::Punct, "", line_, col_, pos_};
    const char c = src_[pos_];
    auto is_ident_start = [](char ch) {
      return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_' || ch == '$';
    };
    auto is_ident_char = [&](char ch) {
      return is_ident_start(ch) || std::isdigit(static_cast<unsigned char>(ch));
    };
    if (is_ident_start(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && is_ident_char(src_[end])) ++end;
      tok.text = std::string(src_.substr(pos_, end - pos_));
      tok.type = kKeywords.contains(tok.text) ? Tok::Keyword : Tok::Ident;
      advance(end - pos_);
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      if (end + 1 < src_.size() && src_[end] == '.' &&
          std::isdigit(static_cast<unsigned char>(src_[end + 1]))) {
        ++end;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      }
      if (end < src_.size() && is_ident_start(src_[end])) fail("malformed number literal");
      tok.type = Tok::Number;
      tok.text = std::string(src_.substr(pos_, end - pos_));
      advance(end - pos_);
      return tok;
    }
    if (c == '"' || c == '\'') {
      std::size_t end = pos_ + 1;
      while (end < src_.size() && src_[end] != c) {
        if (src_[end] == '\n') fail("newline in string literal");
        if (src_[end] == '\\') ++end;
        ++end;
      }
      if (end >= src_.size()) fail("unterminated string literal");
      tok.type = Tok::String;
      tok.text = std::string(src_.substr(pos_, end + 1 - pos_));
      advance(end + 1 - pos_);
      return tok;
    }
    for (std::string_view p : kPuncts) {
      if (at(p)) {
        tok.text = std::string(p);
        advance(p.size());
        return tok;
      }
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

constexpr int kMaxDepth = 256;

class Parser {
 public:
  Parser(std::string_view src, std::string file)
      : src_(src), file_(file), toks_(Lexer(src, std::move(file)).run()) {}

  std::vector<SourceFunction> parse_unit() {
    std::vector<SourceFunction> out;
    while (peek().type != Tok::End) out.push_back(parse_function());
    return out;
  }

 private:
  // --- token helpers -------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& prev() const { return toks_[pos_ - 1]; }
  bool check(std::string_view text) const {
    const Token& t = peek();
    return (t.type == Tok::Punct || t.type == Tok::Keyword) && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!check(text)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(SourceSpan{file_, t.line, t.col, t.line, t.end_col()}, msg);
  }

  static std::string describe(const Token& t) {
    return t.type == Tok::End ? std::string("end of input") : "'" + t.text + "'";
  }

  const Token& expect(std::string_view text) {
    if (!check(text))
      fail_at(peek(), "expected '" + std::string(text) + "' but found " + describe(peek()));
    return toks_[pos_++];
  }

  const Token& expect_ident(std::string_view what) {
    if (peek().type != Tok::Ident)
      fail_at(peek(), "expected " + std::string(what) + " but found " + describe(peek()));
    return toks_[pos_++];
  }

  SourceSpan span(const Token& first, const Token& last) const {
    return SourceSpan{file_, first.line, first.col, last.line, last.end_col()};
  }
  SourceSpan span(const SourceSpan& first, const SourceSpan& last) const {
    return SourceSpan{file_, first.start_line, first.start_col, last.end_line, last.end_col};
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) p_.fail_at(p_.peek(), "nesting too deep");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  static Node make(NodeKind kind, SourceSpan sp) {
    Node n;
    n.kind = kind;
    n.span = std::move(sp);
    return n;
  }

  Node ident_node(const Token& t) const {
    Node n = make(NodeKind::Identifier, span(t, t));
    n.text = t.text;
    return n;
  }

  // --- declarations --------------------------------------------------------
  SourceFunction parse_function() {
    const std::size_t first_tok = pos_;
    const Token& kw = expect("function");
    const Token& name = expect_ident("function name");
    SourceFunction fn;
    fn.name = name.text;
    fn.language = std::string(MiniLangAdapter::kTag);
    Node body = make(NodeKind::Function, {});
    expect("(");
    if (!check(")")) {
      do {
        const Token& p = expect_ident("parameter name");
        fn.params.push_back(p.text);
        body.children.push_back(ident_node(p));
      } while (accept(","));
    }
    expect(")");
    body.children.push_back(parse_block());
    body.span = span(kw, prev());
    fn.span = body.span;
    fn.body = std::move(body);

    std::set<int> lines;
    for (std::size_t i = first_tok; i < pos_; ++i) lines.insert(toks_[i].line);
    fn.loc = static_cast<int>(lines.size());
    const std::size_t begin = toks_[first_tok].offset;
    const std::size_t end = prev().offset + prev().text.size();
    fn.text = std::string(src_.substr(begin, end - begin));
    return fn;
  }

  // --- statements ----------------------------------------------------------
  Node parse_block() {
    DepthGuard guard(*this);
    const Token& open = expect("{");
    Node block = make(NodeKind::Block, {});
    while (!check("}")) {
      if (peek().type == Tok::End) fail_at(peek(), "expected '}' but found end of input");
      block.children.push_back(parse_statement());
    }
    expect("}");
    block.span = span(open, prev());
    return block;
  }

  Node parse_statement() {
    DepthGuard guard(*this);
    if (check("{")) return parse_block();
    if (check("let")) return parse_var_decl();
    if (check("if")) return parse_if();
    if (check("while")) return parse_while();
    if (check("for")) return parse_for();
    if (check("switch")) return parse_switch();
    if (check("return")) return parse_return();
    if (peek().type == Tok::Keyword) fail_at(peek(), "unexpected keyword '" + peek().text + "'");
    const Token& first = peek();
    Node stmt = make(NodeKind::ExprStmt, {});
    stmt.children.push_back(parse_expression());
    expect(";");
    stmt.span = span(first, prev());
    return stmt;
  }

  Node parse_var_decl() {
    const Token& kw = expect("let");
    Node decl = make(NodeKind::VarDecl, {});
    decl.children.push_back(ident_node(expect_ident("variable name")));
    if (accept("=")) decl.children.push_back(parse_expression());
    expect(";");
    decl.span = span(kw, prev());
    return decl;
  }

  Node parse_if() {
    const Token& kw = expect("if");
    Node node = make(NodeKind::If, {});
    expect("(");
    node.children.push_back(parse_expression());
    expect(")");
    node.children.push_back(parse_statement());
    if (accept("else")) node.children.push_back(parse_statement());
    node.span = span(kw, prev());
    return node;
  }

  Node parse_while() {
    const Token& kw = expect("while");
    Node node = make(NodeKind::While, {});
    expect("(");
    node.children.push_back(parse_expression());
    expect(")");
    node.children.push_back(parse_statement());
    node.span = span(kw, prev());
    return node;
  }

  Node parse_for() {
    const Token& kw = expect("for");
    Node node = make(NodeKind::For, {});
    expect("(");
    if (check("let")) {
      node.children.push_back(parse_var_decl());
      node.flags |= node_flag::kForInit;
    } else {
      if (!check(";")) {
        node.children.push_back(parse_expression());
        node.flags |= node_flag::kForInit;
      }
      expect(";");
    }
    if (!check(";")) {
      node.children.push_back(parse_expression());
      node.flags |= node_flag::kForCond;
    }
    expect(";");
    if (!check(")")) {
      node.children.push_back(parse_expression());
      node.flags |= node_flag::kForUpdate;
    }
    expect(")");
    node.children.push_back(parse_statement());
    node.span = span(kw, prev());
    return node;
  }

  Node parse_switch() {
    const Token& kw = expect("switch");
    Node node = make(NodeKind::Switch, {});
    expect("(");
    node.children.push_back(parse_expression());
    expect(")");
    expect("{");
    while (!check("}")) {
      const Token& label = peek();
      Node clause = make(NodeKind::CaseClause, {});
      if (accept("case")) {
        clause.children.push_back(parse_expression());
      } else if (accept("default")) {
        clause.flags |= node_flag::kDefaultClause;
      } else {
        fail_at(peek(), "expected 'case', 'default' or '}' but found " + describe(peek()));
      }
      expect(":");
      while (!check("case") && !check("default") && !check("}")) {
        if (peek().type == Tok::End) fail_at(peek(), "expected '}' but found end of input");
        clause.children.push_back(parse_statement());
      }
      clause.span = span(label, prev());
      node.children.push_back(std::move(clause));
    }
    expect("}");
    node.span = span(kw, prev());
    return node;
  }

  Node parse_return() {
    const Token& kw = expect("return");
    Node node = make(NodeKind::Return, {});
    if (!check(";")) node.children.push_back(parse_expression());
    expect(";");
    node.span = span(kw, prev());
    return node;
  }

  // --- expressions ---------------------------------------------------------
  Node parse_expression() {
    DepthGuard guard(*this);
    Node target = parse_conditional();
    if (check("=")) {
      if (target.kind != NodeKind::Identifier && target.kind != NodeKind::MemberAccess)
        fail_at(peek(), "invalid assignment target");
      ++pos_;
      Node value = parse_expression();
      Node node = make(NodeKind::Assign, span(target.span, value.span));
      node.children.push_back(std::move(target));
      node.children.push_back(std::move(value));
      return node;
    }
    return target;
  }

  Node parse_conditional() {
    Node cond = parse_binary(0);
    if (!accept("?")) return cond;
    Node then_branch = parse_expression();
    expect(":");
    Node else_branch = parse_expression();
    Node node = make(NodeKind::ConditionalExpr, span(cond.span, else_branch.span));
    node.children.push_back(std::move(cond));
    node.children.push_back(std::move(then_branch));
    node.children.push_back(std::move(else_branch));
    return node;
  }

  static int precedence(const Token& t) {
    if (t.type != Tok::Punct) return -1;
    const std::string& s = t.text;
    if (s == "||") return 0;
    if (s == "&&") return 1;
    if (s == "==" || s == "!=" || s == "===" || s == "!==") return 2;
    if (s == "<" || s == ">" || s == "<=" || s == ">=") return 3;
    if (s == "+" || s == "-") return 4;
    if (s == "*" || s == "/" || s == "%") return 5;
    return -1;
  }

  // Precedence climbing; all binary operators are left-associative.
  Node parse_binary(int min_prec) {
    DepthGuard guard(*this);
    Node lhs = parse_unary();
    for (;;) {
      const int prec = precedence(peek());
      if (prec < min_prec) return lhs;
      const std::string op = toks_[pos_++].text;
      Node rhs = parse_binary(prec + 1);
      Node node = make(NodeKind::BinaryOp, span(lhs.span, rhs.span));
      node.op = op;
      node.children.push_back(std::move(lhs));
      node.children.push_back(std::move(rhs));
      lhs = std::move(node);
    }
  }

  Node parse_unary() {
    if (check("!") || check("-")) {
      DepthGuard guard(*this);
      const Token& op = toks_[pos_++];
      Node operand = parse_unary();
      Node node = make(NodeKind::UnaryOp, span(span(op, op), operand.span));
      node.op = op.text;
      node.children.push_back(std::move(operand));
      return node;
    }
    return parse_postfix();
  }

  Node parse_postfix() {
    Node expr = parse_primary();
    for (;;) {
      if (accept("(")) {
        Node call = make(NodeKind::Call, {});
        call.children.push_back(std::move(expr));
        if (!check(")")) {
          do {
            call.children.push_back(parse_expression());
          } while (accept(","));
        }
        expect(")");
        call.span = span(call.children.front().span, span(prev(), prev()));
        expr = std::move(call);
      } else if (accept(".")) {
        const Token& prop = expect_ident("property name");
        Node member = make(NodeKind::MemberAccess, span(expr.span, span(prop, prop)));
        member.children.push_back(std::move(expr));
        member.children.push_back(ident_node(prop));
        expr = std::move(member);
      } else {
        return expr;
      }
    }
  }

  Node parse_primary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Ident: {
        ++pos_;
        if (t.text == "true" || t.text == "false" || t.text == "null") {
          Node lit = make(NodeKind::Literal, span(t, t));
          lit.text = t.text;
          return lit;
        }
        return ident_node(t);
      }
      case Tok::Number:
      case Tok::String: {
        ++pos_;
        Node lit = make(NodeKind::Literal, span(t, t));
        lit.text = t.text;
        return lit;
      }
      case Tok::Punct:
        if (t.text == "(") {
          const Token& open = toks_[pos_++];
          Node inner = parse_expression();
          expect(")");
          inner.span = span(open, prev());
          return inner;
        }
        break;
      default:
        break;
    }
    fail_at(t, "expected expression but found " + describe(t));
  }

  std::string_view src_;
  std::string file_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

std::vector<SourceFunction> MiniLangAdapter::parse_unit(std::string_view source,
                                                        std::string_view file) const {
  if (source.find('\r') != std::string_view::npos) {
    const std::string normalized = normalize_newlines(source);
    return Parser(normalized, std::string(file)).parse_unit();
  }
  return Parser(source, std::string(file)).parse_unit();
}

std::vector<LintFinding> MiniLangAdapter::lint(std::string_view source,
                                               std::string_view file) const {
  return lint_functions(parse_unit(source, file));
}

}  // namespace rguard
