// Recursive-descent parser shared by the LTLf and obligation grammars.
//
// Precedence, loosest first: <->, -> (right), |, &, U (right), unary (! X X! F G).

#include <cctype>

#include "oblsynth/ltlf.hpp"
#include "oblsynth/obligation.hpp"

namespace oblsynth {

namespace {

enum class Tok {
  Ident,
  True,
  False,
  Not,
  And,
  Or,
  Implies,
  Iff,
  LParen,
  RParen,
  Next,
  StrongNext,
  Eventually,
  Always,
  Until,
  Exists,
  Forall,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      const std::size_t line = line_, col = col_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", line, col});
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          id += text_[pos_];
          advance();
        }
        out.push_back({keyword(id), id, line, col});
        if (id == "X" && pos_ < text_.size() && text_[pos_] == '!') {
          advance();
          out.back().kind = Tok::StrongNext;
          out.back().text = "X!";
        }
        continue;
      }
      switch (c) {
        case '!': advance(); out.push_back({Tok::Not, "!", line, col}); continue;
        case '&': advance(); out.push_back({Tok::And, "&", line, col}); continue;
        case '|': advance(); out.push_back({Tok::Or, "|", line, col}); continue;
        case '(': advance(); out.push_back({Tok::LParen, "(", line, col}); continue;
        case ')': advance(); out.push_back({Tok::RParen, ")", line, col}); continue;
        case '-':
          if (peek(1) == '>') {
            advance();
            advance();
            out.push_back({Tok::Implies, "->", line, col});
            continue;
          }
          break;
        case '<':
          if (peek(1) == '-' && peek(2) == '>') {
            advance();
            advance();
            advance();
            out.push_back({Tok::Iff, "<->", line, col});
            continue;
          }
          break;
        default: break;
      }
      throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
    }
  }

 private:
  static Tok keyword(const std::string& id) {
    if (id == "true") return Tok::True;
    if (id == "false") return Tok::False;
    if (id == "X") return Tok::Next;
    if (id == "F") return Tok::Eventually;
    if (id == "G") return Tok::Always;
    if (id == "U") return Tok::Until;
    if (id == "exists") return Tok::Exists;
    if (id == "forall") return Tok::Forall;
    return Tok::Ident;
  }

  char peek(std::size_t ahead) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

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
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>* declared)
      : tokens_(Lexer(text).run()), declared_(declared) {}

  LtlfFormula ltlf_document() {
    LtlfFormula f = ltlf_iff();
    expect(Tok::End, "end of input");
    return f;
  }

  ObligationFormula obligation_document() {
    ObligationFormula f = obl_iff();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  const Token& take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = cur();
    const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError("expected " + what + ", found " + found, t.line, t.column);
  }

  void expect(Tok k, const char* what) {
    if (!at(k)) fail(what);
    ++pos_;
  }

  // --- LTLf ---------------------------------------------------------------

  LtlfFormula ltlf_iff() {
    LtlfFormula l = ltlf_implies();
    while (at(Tok::Iff)) {
      ++pos_;
      LtlfFormula r = ltlf_implies();
      l = (l & r) | ((!l) & (!r));
    }
    return l;
  }

  LtlfFormula ltlf_implies() {
    LtlfFormula l = ltlf_or();
    if (at(Tok::Implies)) {
      ++pos_;
      LtlfFormula r = ltlf_implies();
      return (!l) | r;
    }
    return l;
  }

  LtlfFormula ltlf_or() {
    LtlfFormula l = ltlf_and();
    while (at(Tok::Or)) {
      ++pos_;
      l = l | ltlf_and();
    }
    return l;
  }

  LtlfFormula ltlf_and() {
    LtlfFormula l = ltlf_until();
    while (at(Tok::And)) {
      ++pos_;
      l = l & ltlf_until();
    }
    return l;
  }

  LtlfFormula ltlf_until() {
    LtlfFormula l = ltlf_unary();
    if (at(Tok::Until)) {
      ++pos_;
      return LtlfFormula::until(l, ltlf_until());
    }
    return l;
  }

  LtlfFormula ltlf_unary() {
    switch (cur().kind) {
      case Tok::Not: ++pos_; return !ltlf_unary();
      case Tok::Next: ++pos_; return LtlfFormula::weak_next(ltlf_unary());
      case Tok::StrongNext: ++pos_; return LtlfFormula::strong_next(ltlf_unary());
      case Tok::Eventually: ++pos_; return LtlfFormula::eventually(ltlf_unary());
      case Tok::Always: ++pos_; return LtlfFormula::always(ltlf_unary());
      default: return ltlf_primary();
    }
  }

  LtlfFormula ltlf_primary() {
    switch (cur().kind) {
      case Tok::True: ++pos_; return LtlfFormula::tt();
      case Tok::False: ++pos_; return LtlfFormula::ff();
      case Tok::Ident: {
        const Token& t = take();
        if (declared_ && !declared_->count(t.text)) throw UndeclaredAtomError(t.text);
        return LtlfFormula::atom(t.text);
      }
      case Tok::LParen: {
        ++pos_;
        LtlfFormula f = ltlf_iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::Exists:
      case Tok::Forall:
        throw FragmentError("prefix quantifiers cannot be nested inside an LTLf formula");
      default: fail("an LTLf formula");
    }
  }

  // --- obligations --------------------------------------------------------

  static ObligationFormula flat(ObligationKind kind, ObligationFormula l, ObligationFormula r) {
    std::vector<ObligationFormula> kids;
    for (auto* f : {&l, &r}) {
      if (f->kind() == kind) {
        kids.insert(kids.end(), f->children().begin(), f->children().end());
      } else {
        kids.push_back(*f);
      }
    }
    return kind == ObligationKind::And ? ObligationFormula::conjunction(std::move(kids))
                                       : ObligationFormula::disjunction(std::move(kids));
  }

  ObligationFormula obl_iff() {
    ObligationFormula l = obl_implies();
    while (at(Tok::Iff)) {
      ++pos_;
      ObligationFormula r = obl_implies();
      l = flat(ObligationKind::Or, flat(ObligationKind::And, l, r),
               flat(ObligationKind::And, ObligationFormula::negation(l), ObligationFormula::negation(r)));
    }
    return l;
  }

  ObligationFormula obl_implies() {
    ObligationFormula l = obl_or();
    if (at(Tok::Implies)) {
      ++pos_;
      ObligationFormula r = obl_implies();
      return flat(ObligationKind::Or, ObligationFormula::negation(l), r);
    }
    return l;
  }

  ObligationFormula obl_or() {
    ObligationFormula l = obl_and();
    while (at(Tok::Or)) {
      ++pos_;
      l = flat(ObligationKind::Or, l, obl_and());
    }
    return l;
  }

  ObligationFormula obl_and() {
    ObligationFormula l = obl_unary();
    while (at(Tok::And)) {
      ++pos_;
      l = flat(ObligationKind::And, l, obl_unary());
    }
    return l;
  }

  ObligationFormula obl_unary() {
    if (at(Tok::Not)) {
      ++pos_;
      return ObligationFormula::negation(obl_unary());
    }
    return obl_primary();
  }

  ObligationFormula obl_primary() {
    switch (cur().kind) {
      case Tok::Exists:
      case Tok::Forall: {
        const bool ex = take().kind == Tok::Exists;
        if (at(Tok::Exists) || at(Tok::Forall)) {
          throw FragmentError(
              "nested prefix quantifiers (forall exists / exists forall) are outside the obligation fragment; "
              "only exists(...) and forall(...) components are allowed");
        }
        expect(Tok::LParen, "'(' after quantifier");
        LtlfFormula body = ltlf_iff();
        expect(Tok::RParen, "')' closing the quantified formula");
        return ex ? ObligationFormula::exists(std::move(body)) : ObligationFormula::forall(std::move(body));
      }
      case Tok::LParen: {
        ++pos_;
        ObligationFormula f = obl_iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::Ident: {
        const std::string& id = cur().text;
        if (id.find("forall") != std::string::npos && id.find("exists") != std::string::npos) {
          throw FragmentError("'" + id +
                              "' is a recurrence/persistence quantifier; the obligation fragment only admits "
                              "exists(...) and forall(...) components");
        }
        fail("exists(...) or forall(...)");
      }
      default: fail("exists(...) or forall(...)");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const std::set<std::string>* declared_;
};

}  // namespace

LtlfFormula parse_ltlf(std::string_view text, const std::set<std::string>* declared) {
  return Parser(text, declared).ltlf_document();
}

ObligationFormula parse_obligation(std::string_view text) { return Parser(text, nullptr).obligation_document(); }

}  // namespace oblsynth
