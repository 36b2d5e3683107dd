#include "sexpr.hpp"

#include <cctype>

#include "lgplan/errors.hpp"

namespace lgplan::detail {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_top() {
    skip_space();
    if (at_end()) throw SyntaxError("expected '(' but reached end of input", line_, col_);
    SExpr e = read();
    skip_space();
    if (!at_end()) {
      throw SyntaxError("expected end of input after top-level expression", line_, col_);
    }
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip_space();
    if (at_end()) throw SyntaxError("unexpected end of input, expected ')'", line_, col_);
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = peek();
    if (c == '(') {
      advance();
      e.is_list = true;
      while (true) {
        skip_space();
        if (at_end()) throw SyntaxError("unterminated list, expected ')'", e.line, e.column);
        if (peek() == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == ')') throw SyntaxError("unexpected ')'", line_, col_);
    while (!at_end()) {
      c = peek();
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
      e.symbol.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      advance();
    }
    return e;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

SExpr parse_sexpr(std::string_view text) { return Reader(text).read_top(); }

}  // namespace lgplan::detail
