#pragma once

// Recursive-descent parser for the IMP concrete syntax.
//
//   program := stmt
//   stmt    := atom (';' stmt)?                      -- ';' right-associative
//   atom    := IDENT ':=' expr
//            | 'assume' expr
//            | 'choice' '{' stmt '}' 'or' '{' stmt '}'
//            | 'loop' '{' stmt '}'
//            | 'if' expr '{' stmt '}' 'else' '{' stmt '}'   -- sugar
//            | 'while' expr '{' stmt '}'                    -- sugar
//   expr    := INT | IDENT | '?' | '(' expr ')' | expr OP expr
//   OP      := '+' | '-' | '*' | '==' | '<' | '&&' | '||'
//
// Precedence: * > +,- > <,== > && > ||, all left-associative. `#` starts a
// line comment. INT accepts an optional leading '-'; since there is no unary
// minus, a '-' in operand position can only begin a negative literal.
//
// Sugar is desugared at parse time:
//   if e { a } else { b }  =>  choice { assume e; a } or { assume e == 0; b }
//   while e { s }          =>  loop { assume e; s }; assume e == 0

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absint/imp_ast.hpp"
#include "absint/machine_int.hpp"

namespace absint {

class ParseError : public std::runtime_error {
public:
  ParseError(int line, int col, const std::string& what)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

class Parser {
public:
  Parser(std::string_view text, Width width) : width_(width), lexer_(text) {}

  Program parse() {
    StmtPtr body = parse_stmt();
    if (!lexer_.at_end()) fail("expected end of input");
    return Program{std::move(var_names_), std::move(body), width_};
  }

private:
  struct Token {
    enum Kind {
      Ident,
      Int,
      Assign,
      Semi,
      LBrace,
      RBrace,
      LParen,
      RParen,
      Question,
      Plus,
      Minus,
      Star,
      EqEq,
      Lt,
      AndAnd,
      OrOr,
      End,
    } kind;
    std::string text;
    int line;
    int col;
  };

  class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }
    Token next() {
      Token t = current_;
      advance();
      return t;
    }
    bool at_end() const { return current_.kind == Token::End; }

  private:
    void advance() {
      skip_trivia();
      current_.line = line_;
      current_.col = col_;
      if (pos_ >= text_.size()) {
        current_.kind = Token::End;
        current_.text = "<end of input>";
        return;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          bump();
        current_.kind = Token::Ident;
        current_.text = std::string(text_.substr(start, pos_ - start));
        return;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
        current_.kind = Token::Int;
        current_.text = std::string(text_.substr(start, pos_ - start));
        return;
      }
      switch (c) {
        case ';': single(Token::Semi); return;
        case '{': single(Token::LBrace); return;
        case '}': single(Token::RBrace); return;
        case '(': single(Token::LParen); return;
        case ')': single(Token::RParen); return;
        case '?': single(Token::Question); return;
        case '+': single(Token::Plus); return;
        case '-': single(Token::Minus); return;
        case '*': single(Token::Star); return;
        case ':':
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
            bump();
            bump();
            current_.kind = Token::Assign;
            current_.text = ":=";
            return;
          }
          lex_fail("expected ':='");
          return;
        case '=':
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
            bump();
            bump();
            current_.kind = Token::EqEq;
            current_.text = "==";
            return;
          }
          lex_fail("expected '=='");
          return;
        case '<': single(Token::Lt); return;
        case '&':
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '&') {
            bump();
            bump();
            current_.kind = Token::AndAnd;
            current_.text = "&&";
            return;
          }
          lex_fail("expected '&&'");
          return;
        case '|':
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '|') {
            bump();
            bump();
            current_.kind = Token::OrOr;
            current_.text = "||";
            return;
          }
          lex_fail("expected '||'");
          return;
        default:
          lex_fail(std::string("unexpected character '") + c + "'");
      }
    }

    void skip_trivia() {
      while (pos_ < text_.size()) {
        const char c = text_[pos_];
        if (c == '#') {
          while (pos_ < text_.size() && text_[pos_] != '\n') bump();
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
          bump();
        } else {
          break;
        }
      }
    }

    void bump() {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }

    void single(Token::Kind k) {
      current_.kind = k;
      current_.text = std::string(1, text_[pos_]);
      bump();
    }

    [[noreturn]] void lex_fail(const std::string& msg) { throw ParseError(line_, col_, msg); }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token current_{};
  };

  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = lexer_.peek();
    throw ParseError(t.line, t.col, msg + ", found '" + t.text + "'");
  }

  Token expect(Token::Kind kind, const char* what) {
    if (lexer_.peek().kind != kind) fail(std::string("expected ") + what);
    return lexer_.next();
  }

  bool is_keyword(const Token& t, const char* kw) const {
    return t.kind == Token::Ident && t.text == kw;
  }

  static bool reserved(const std::string& name) {
    return name == "assume" || name == "choice" || name == "or" || name == "loop" ||
           name == "if" || name == "else" || name == "while";
  }

  VarIndex intern_var(const std::string& name) {
    auto it = var_indices_.find(name);
    if (it != var_indices_.end()) return it->second;
    VarIndex idx = static_cast<VarIndex>(var_names_.size());
    var_names_.push_back(name);
    var_indices_.emplace(name, idx);
    return idx;
  }

  StmtPtr parse_stmt() {
    StmtPtr first = parse_atom();
    if (lexer_.peek().kind == Token::Semi) {
      lexer_.next();
      return Stmt::seq(std::move(first), parse_stmt());
    }
    return first;
  }

  StmtPtr parse_block() {
    expect(Token::LBrace, "'{'");
    StmtPtr s = parse_stmt();
    expect(Token::RBrace, "'}'");
    return s;
  }

  StmtPtr parse_atom() {
    const Token& t = lexer_.peek();
    if (is_keyword(t, "assume")) {
      lexer_.next();
      return Stmt::assume(parse_expr());
    }
    if (is_keyword(t, "choice")) {
      lexer_.next();
      StmtPtr left = parse_block();
      Token kw = expect(Token::Ident, "'or'");
      if (kw.text != "or") throw ParseError(kw.line, kw.col, "expected 'or' between choice arms");
      StmtPtr right = parse_block();
      return Stmt::choice(std::move(left), std::move(right));
    }
    if (is_keyword(t, "loop")) {
      lexer_.next();
      return Stmt::loop(parse_block());
    }
    if (is_keyword(t, "if")) {
      lexer_.next();
      ExprPtr cond = parse_expr();
      StmtPtr then_branch = parse_block();
      Token kw = expect(Token::Ident, "'else'");
      if (kw.text != "else") throw ParseError(kw.line, kw.col, "expected 'else'");
      StmtPtr else_branch = parse_block();
      ExprPtr negated = Expr::binary(BinOpKind::Eq, cond, Expr::constant(IntM(0, width_)));
      return Stmt::choice(Stmt::seq(Stmt::assume(cond), std::move(then_branch)),
                          Stmt::seq(Stmt::assume(negated), std::move(else_branch)));
    }
    if (is_keyword(t, "while")) {
      lexer_.next();
      ExprPtr cond = parse_expr();
      StmtPtr body = parse_block();
      ExprPtr negated = Expr::binary(BinOpKind::Eq, cond, Expr::constant(IntM(0, width_)));
      return Stmt::seq(Stmt::loop(Stmt::seq(Stmt::assume(cond), std::move(body))),
                       Stmt::assume(negated));
    }
    if (t.kind == Token::Ident) {
      Token name = lexer_.next();
      if (reserved(name.text))
        throw ParseError(name.line, name.col, "'" + name.text + "' is a keyword");
      expect(Token::Assign, "':='");
      VarIndex v = intern_var(name.text);
      return Stmt::assign(v, parse_expr());
    }
    fail("expected statement");
  }

  ExprPtr parse_expr() { return parse_binary(1); }

  static int token_precedence(Token::Kind k) {
    switch (k) {
      case Token::Star: return 5;
      case Token::Plus:
      case Token::Minus: return 4;
      case Token::Lt:
      case Token::EqEq: return 3;
      case Token::AndAnd: return 2;
      case Token::OrOr: return 1;
      default: return 0;
    }
  }

  static BinOpKind token_op(Token::Kind k) {
    switch (k) {
      case Token::Star: return BinOpKind::Mult;
      case Token::Plus: return BinOpKind::Plus;
      case Token::Minus: return BinOpKind::Minus;
      case Token::Lt: return BinOpKind::Lt;
      case Token::EqEq: return BinOpKind::Eq;
      case Token::AndAnd: return BinOpKind::And;
      default: return BinOpKind::Or;
    }
  }

  ExprPtr parse_binary(int min_prec) {
    ExprPtr lhs = parse_primary();
    while (true) {
      const int prec = token_precedence(lexer_.peek().kind);
      if (prec < min_prec || prec == 0) return lhs;
      BinOpKind op = token_op(lexer_.next().kind);
      ExprPtr rhs = parse_binary(prec + 1);
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
    }
  }

  ExprPtr parse_primary() {
    const Token& t = lexer_.peek();
    switch (t.kind) {
      case Token::Int: return parse_literal(false);
      case Token::Minus:
        lexer_.next();
        if (lexer_.peek().kind != Token::Int) fail("expected integer literal after '-'");
        return parse_literal(true);
      case Token::Question:
        lexer_.next();
        return Expr::unknown();
      case Token::LParen: {
        lexer_.next();
        ExprPtr e = parse_expr();
        expect(Token::RParen, "')'");
        return e;
      }
      case Token::Ident: {
        Token name = lexer_.next();
        if (reserved(name.text))
          throw ParseError(name.line, name.col, "'" + name.text + "' is a keyword");
        return Expr::variable(intern_var(name.text));
      }
      default: fail("expected expression");
    }
  }

  ExprPtr parse_literal(bool negative) {
    Token t = lexer_.next();
    i128 value = 0;
    const i128 limit = i128(1) << 70;  // enough slack to diagnose any 64-bit width
    for (char c : t.text) {
      value = value * 10 + (c - '0');
      if (value > limit)
        throw ParseError(t.line, t.col, "integer literal too large: " + t.text);
    }
    if (negative) value = -value;
    if (!inbounds(value, width_))
      throw ParseError(t.line, t.col,
                       "constant " + std::string(negative ? "-" : "") + t.text +
                           " out of range for width " + std::to_string(width_.bits()) + " [" +
                           std::to_string(width_.min_value()) + ", " +
                           std::to_string(width_.max_value()) + "]");
    return Expr::constant(IntM(std::int64_t(value), width_));
  }

  Width width_;
  Lexer lexer_;
  std::vector<std::string> var_names_;
  std::unordered_map<std::string, VarIndex> var_indices_;
};

/// Parse a program; throws ParseError with source position on bad input.
inline Program parse_program(std::string_view text, Width width) {
  return Parser(text, width).parse();
}

}  // namespace absint
