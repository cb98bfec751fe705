#include "llmpddl/pddl/sexpr.hpp"

#include <cctype>

#include "llmpddl/pddl/types.hpp"

namespace llmpddl::pddl {

namespace {

enum class TokenKind { Open, Close, Atom, Comment, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (at_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[at_]))) advance();
    Token tok;
    tok.pos = {line_, column_};
    if (at_ >= text_.size()) return tok;
    char c = text_[at_];
    if (c == '(') {
      advance();
      tok.kind = TokenKind::Open;
      tok.text = "(";
    } else if (c == ')') {
      advance();
      tok.kind = TokenKind::Close;
      tok.text = ")";
    } else if (c == ';') {
      std::size_t start = at_;
      while (at_ < text_.size() && text_[at_] != '\n') advance();
      tok.kind = TokenKind::Comment;
      tok.text = std::string(text_.substr(start, at_ - start));
    } else {
      std::size_t start = at_;
      while (at_ < text_.size()) {
        char d = text_[at_];
        if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
        advance();
      }
      tok.kind = TokenKind::Atom;
      tok.text = std::string(text_.substr(start, at_ - start));
    }
    return tok;
  }

 private:
  void advance() {
    if (text_[at_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++at_;
  }

  std::string_view text_;
  std::size_t at_ = 0;
  int line_ = 1;
  int column_ = 1;
};

std::string trim_comment(std::string_view comment) {
  std::size_t i = 0;
  while (i < comment.size() && comment[i] == ';') ++i;
  std::size_t j = comment.size();
  while (i < j && std::isspace(static_cast<unsigned char>(comment[i]))) ++i;
  while (j > i && std::isspace(static_cast<unsigned char>(comment[j - 1]))) --j;
  return std::string(comment.substr(i, j - i));
}

class Reader {
 public:
  explicit Reader(std::string_view text) : lexer_(text) { fill(); }

  bool at_end() const { return current_.kind == TokenKind::End; }

  SExpr read() {
    if (current_.kind == TokenKind::Close) {
      throw SyntaxError("unexpected ')'", current_.pos, current_.text);
    }
    SExpr node;
    node.pos = current_.pos;
    int end_line = current_.pos.line;
    if (current_.kind == TokenKind::Atom) {
      node.atom = current_.text;
      fill();
    } else {
      node.is_list = true;
      SourcePos open = current_.pos;
      fill();
      while (current_.kind != TokenKind::Close) {
        if (current_.kind == TokenKind::End) throw SyntaxError("unbalanced '('", open, "(");
        node.items.push_back(read());
      }
      end_line = current_.pos.line;
      fill();
    }
    if (pending_comment_.kind == TokenKind::Comment && pending_comment_.pos.line == end_line) {
      node.trailing_comment = trim_comment(pending_comment_.text);
      pending_comment_ = {};
    }
    return node;
  }

  const Token& current() const { return current_; }

 private:
  // Advances to the next non-comment token, remembering the latest comment
  // that sits on the line where the previous token ended.
  void fill() {
    pending_comment_ = {};
    int previous_line = current_.pos.line;
    current_ = lexer_.next();
    while (current_.kind == TokenKind::Comment) {
      if (current_.pos.line == previous_line && pending_comment_.kind != TokenKind::Comment) {
        pending_comment_ = current_;
      }
      current_ = lexer_.next();
    }
  }

  Lexer lexer_;
  Token current_;
  Token pending_comment_;
};

}  // namespace

bool SExpr::is(std::string_view text) const { return !is_list && iequals(atom, text); }

bool SExpr::has_head(std::string_view head) const {
  return is_list && !items.empty() && items.front().is(head);
}

std::string SExpr::to_string() const {
  if (!is_list) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].to_string();
  }
  return out + ")";
}

std::vector<SExpr> read_sexprs(std::string_view text) {
  Reader reader(text);
  std::vector<SExpr> out;
  while (!reader.at_end()) out.push_back(reader.read());
  return out;
}

SExpr read_sexpr(std::string_view text) {
  Reader reader(text);
  if (reader.at_end()) throw SyntaxError("empty input", reader.current().pos, "");
  SExpr node = reader.read();
  if (!reader.at_end()) {
    throw SyntaxError("unexpected content after expression", reader.current().pos,
                      reader.current().text);
  }
  return node;
}

}  // namespace llmpddl::pddl
