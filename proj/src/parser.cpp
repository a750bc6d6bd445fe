#include "lsv/parser.hpp"

#include "lsv/analysis.hpp"

#include <cassert>
#include <cctype>
#include <optional>
#include <sstream>

namespace lsv {

namespace {

enum class Tok {
  Ident,
  IntLit,
  KwInt,
  KwBoolean,
  KwIf,
  KwElse,
  KwWhile,
  KwFor,
  KwBreak,
  KwContinue,
  KwThrow,
  KwTry,
  KwCatch,
  KwTrue,
  KwFalse,
  KwLoopScope,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Semi,
  Comma,
  Colon,
  Assign,
  PlusPlus,
  MinusMinus,
  Plus,
  Minus,
  Star,
  EqEq,
  BangEq,
  Lt,
  Le,
  Gt,
  Ge,
  AmpAmp,
  PipePipe,
  Bang,
  Arrow,
  Annot,
  End
};

struct Token {
  Tok kind;
  std::string text;      // identifier / number text
  std::string annotKind; // Annot: pre|post|invariant|unwind
  std::string annotText; // Annot payload
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

struct Lexer {
  const std::string &src;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  explicit Lexer(const std::string &s) : src(s) {}

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(msg, line, col);
  }

  char cur() const { return pos < src.size() ? src[pos] : '\0'; }
  char at(std::size_t off) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }
  void bump() {
    if (cur() == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  std::vector<Token> lex() {
    std::vector<Token> out;
    for (;;) {
      skipSpaceAndComments(out);
      Token t;
      t.line = line;
      t.col = col;
      char c = cur();
      if (c == '\0') {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (std::isdigit(static_cast<unsigned char>(cur())))
          num += cur(), bump();
        try {
          t.value = std::stoll(num);
        } catch (...) {
          throw ParseError("integer literal out of range", t.line, t.col);
        }
        t.kind = Tok::IntLit;
        t.text = num;
        out.push_back(t);
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_')
          id += cur(), bump();
        if (id == "loop" && cur() == '-' && at(1) == 's' && at(2) == 'c' &&
            at(3) == 'o' && at(4) == 'p' && at(5) == 'e' &&
            !(std::isalnum(static_cast<unsigned char>(at(6))) || at(6) == '_')) {
          for (int k = 0; k < 6; ++k)
            bump();
          t.kind = Tok::KwLoopScope;
        } else if (id == "int")
          t.kind = Tok::KwInt;
        else if (id == "boolean")
          t.kind = Tok::KwBoolean;
        else if (id == "if")
          t.kind = Tok::KwIf;
        else if (id == "else")
          t.kind = Tok::KwElse;
        else if (id == "while")
          t.kind = Tok::KwWhile;
        else if (id == "for")
          t.kind = Tok::KwFor;
        else if (id == "break")
          t.kind = Tok::KwBreak;
        else if (id == "continue")
          t.kind = Tok::KwContinue;
        else if (id == "throw")
          t.kind = Tok::KwThrow;
        else if (id == "try")
          t.kind = Tok::KwTry;
        else if (id == "catch")
          t.kind = Tok::KwCatch;
        else if (id == "true")
          t.kind = Tok::KwTrue;
        else if (id == "false")
          t.kind = Tok::KwFalse;
        else {
          t.kind = Tok::Ident;
          t.text = id;
        }
        out.push_back(t);
        continue;
      }
      switch (c) {
      case '(':
        t.kind = Tok::LParen;
        bump();
        break;
      case ')':
        t.kind = Tok::RParen;
        bump();
        break;
      case '{':
        t.kind = Tok::LBrace;
        bump();
        break;
      case '}':
        t.kind = Tok::RBrace;
        bump();
        break;
      case ';':
        t.kind = Tok::Semi;
        bump();
        break;
      case ',':
        t.kind = Tok::Comma;
        bump();
        break;
      case ':':
        t.kind = Tok::Colon;
        bump();
        break;
      case '+':
        bump();
        if (cur() == '+') {
          bump();
          t.kind = Tok::PlusPlus;
        } else
          t.kind = Tok::Plus;
        break;
      case '-':
        bump();
        if (cur() == '-') {
          bump();
          t.kind = Tok::MinusMinus;
        } else if (cur() == '>') {
          bump();
          t.kind = Tok::Arrow;
        } else
          t.kind = Tok::Minus;
        break;
      case '*':
        t.kind = Tok::Star;
        bump();
        break;
      case '=':
        bump();
        if (cur() == '=') {
          bump();
          t.kind = Tok::EqEq;
        } else
          t.kind = Tok::Assign;
        break;
      case '!':
        bump();
        if (cur() == '=') {
          bump();
          t.kind = Tok::BangEq;
        } else
          t.kind = Tok::Bang;
        break;
      case '<':
        bump();
        if (cur() == '=') {
          bump();
          t.kind = Tok::Le;
        } else
          t.kind = Tok::Lt;
        break;
      case '>':
        bump();
        if (cur() == '=') {
          bump();
          t.kind = Tok::Ge;
        } else
          t.kind = Tok::Gt;
        break;
      case '&':
        bump();
        if (cur() == '&') {
          bump();
          t.kind = Tok::AmpAmp;
        } else
          fail("expected '&&'");
        break;
      case '|':
        bump();
        if (cur() == '|') {
          bump();
          t.kind = Tok::PipePipe;
        } else
          fail("expected '||'");
        break;
      default:
        fail(std::string("unexpected character '") + c + "'");
      }
      out.push_back(t);
    }
  }

  void skipSpaceAndComments(std::vector<Token> &out) {
    for (;;) {
      while (std::isspace(static_cast<unsigned char>(cur())))
        bump();
      if (cur() == '/' && at(1) == '/') {
        if (at(2) == '@') {
          Token t;
          t.kind = Tok::Annot;
          t.line = line;
          t.col = col;
          bump();
          bump();
          bump(); // '//@'
          std::string text;
          while (cur() != '\n' && cur() != '\0')
            text += cur(), bump();
          std::size_t p = 0;
          while (p < text.size() &&
                 std::isspace(static_cast<unsigned char>(text[p])))
            ++p;
          std::string kind;
          while (p < text.size() &&
                 (std::isalnum(static_cast<unsigned char>(text[p]))))
            kind += text[p++];
          while (p < text.size() &&
                 std::isspace(static_cast<unsigned char>(text[p])))
            ++p;
          if (p >= text.size() || text[p] != ':')
            throw ParseError("malformed annotation, expected '//@ kind: ...'",
                             t.line, t.col);
          ++p;
          if (kind != "pre" && kind != "post" && kind != "invariant" &&
              kind != "unwind")
            throw ParseError("unknown annotation kind '" + kind + "'", t.line,
                             t.col);
          t.annotKind = kind;
          t.annotText = text.substr(p);
          out.push_back(t);
          continue;
        }
        while (cur() != '\n' && cur() != '\0')
          bump();
        continue;
      }
      break;
    }
  }
};

struct PendingAnnot {
  std::string kind;
  std::string text;
  int line;
  int col;
};

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;
  bool collectAnnotations = false;

  std::vector<PendingAnnot> pendingLoop;
  std::optional<PendingAnnot> preAnnot, postAnnot;
  // loop node -> its annotation source
  std::vector<std::pair<const Stmt *, PendingAnnot>> loopAnnots;

  const Token &peek(std::size_t off = 0) const {
    std::size_t k = pos + off;
    return k < toks.size() ? toks[k] : toks.back();
  }
  const Token &advance() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }
  bool check(Tok k) const { return peek().kind == k; }
  bool eat(Tok k) {
    if (check(k)) {
      advance();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(msg, peek().line, peek().col);
  }
  const Token &expect(Tok k, const std::string &what) {
    if (!check(k))
      fail("expected " + what);
    return *&advance();
  }

  void skipOrCollectAnnotations() {
    while (check(Tok::Annot)) {
      const Token &t = advance();
      if (!collectAnnotations)
        continue;
      PendingAnnot p{t.annotKind, t.annotText, t.line, t.col};
      if (t.annotKind == "pre") {
        if (preAnnot)
          throw ParseError("duplicate //@ pre: annotation", t.line, t.col);
        preAnnot = p;
      } else if (t.annotKind == "post") {
        if (postAnnot)
          throw ParseError("duplicate //@ post: annotation", t.line, t.col);
        postAnnot = p;
      } else {
        pendingLoop.push_back(p);
      }
    }
  }

  void rejectDangling() {
    if (!pendingLoop.empty())
      throw ParseError("loop annotation not followed by a loop",
                       pendingLoop.front().line, pendingLoop.front().col);
  }

  StmtList parseProgramToks() {
    StmtList out;
    for (;;) {
      skipOrCollectAnnotations();
      if (check(Tok::End))
        break;
      out.push_back(parseStatement());
    }
    rejectDangling();
    return out;
  }

  StmtList parseStmtSequenceUntilRBrace() {
    StmtList out;
    for (;;) {
      skipOrCollectAnnotations();
      if (check(Tok::RBrace) || check(Tok::End))
        break;
      out.push_back(parseStatement());
    }
    rejectDangling();
    return out;
  }

  const Stmt *unwrapToLoop(const StmtPtr &s) {
    const Stmt *cur = s.get();
    while (const auto *l = std::get_if<LabeledStmt>(&cur->node))
      cur = l->body.get();
    if (std::get_if<WhileStmt>(&cur->node) || std::get_if<ForStmt>(&cur->node))
      return cur;
    return nullptr;
  }

  StmtPtr parseStatement() {
    skipOrCollectAnnotations();
    std::vector<PendingAnnot> myAnnots;
    std::swap(myAnnots, pendingLoop);
    StmtPtr s = parseStatementInner();
    if (!myAnnots.empty()) {
      const Stmt *loop = unwrapToLoop(s);
      if (!loop)
        throw ParseError("loop annotation on non-loop statement",
                         myAnnots.front().line, myAnnots.front().col);
      if (myAnnots.size() > 1)
        throw ParseError("duplicate loop annotation", myAnnots[1].line,
                         myAnnots[1].col);
      loopAnnots.emplace_back(loop, myAnnots.front());
    }
    return s;
  }

  StmtPtr withPos(StmtPtr s, const Token &t) {
    auto *m = const_cast<Stmt *>(s.get());
    m->line = t.line;
    m->col = t.col;
    return s;
  }

  StmtPtr parseStatementInner() {
    const Token &t = peek();
    switch (t.kind) {
    case Tok::Semi:
      advance();
      return withPos(mkSkip(), t);
    case Tok::LBrace: {
      advance();
      StmtList body = parseStmtSequenceUntilRBrace();
      expect(Tok::RBrace, "'}'");
      return withPos(mkBlock(std::move(body)), t);
    }
    case Tok::KwInt:
    case Tok::KwBoolean:
      return parseVarDecl();
    case Tok::KwIf: {
      advance();
      expect(Tok::LParen, "'('");
      ExprPtr cond = parseExpr();
      expect(Tok::RParen, "')'");
      StmtPtr thenB = parseStatement();
      StmtPtr elseB;
      if (eat(Tok::KwElse))
        elseB = parseStatement();
      return withPos(mkIf(std::move(cond), std::move(thenB), std::move(elseB)),
                     t);
    }
    case Tok::KwWhile: {
      advance();
      expect(Tok::LParen, "'('");
      ExprPtr cond = parseExpr();
      expect(Tok::RParen, "')'");
      StmtPtr body = parseStatement();
      return withPos(mkWhile(std::move(cond), std::move(body)), t);
    }
    case Tok::KwFor:
      return parseFor();
    case Tok::KwBreak: {
      advance();
      std::optional<std::string> label;
      if (check(Tok::Ident))
        label = advance().text;
      expect(Tok::Semi, "';'");
      return withPos(mkBreak(std::move(label)), t);
    }
    case Tok::KwContinue: {
      advance();
      std::optional<std::string> label;
      if (check(Tok::Ident))
        label = advance().text;
      expect(Tok::Semi, "';'");
      return withPos(mkContinue(std::move(label)), t);
    }
    case Tok::KwThrow: {
      advance();
      ExprPtr v = parseExpr();
      expect(Tok::Semi, "';'");
      return withPos(mkThrow(std::move(v)), t);
    }
    case Tok::KwTry: {
      advance();
      expect(Tok::LBrace, "'{'");
      StmtList tryBody = parseStmtSequenceUntilRBrace();
      expect(Tok::RBrace, "'}'");
      expect(Tok::KwCatch, "'catch'");
      expect(Tok::LParen, "'('");
      std::string var = expect(Tok::Ident, "identifier").text;
      expect(Tok::RParen, "')'");
      expect(Tok::LBrace, "'{'");
      StmtList catchBody = parseStmtSequenceUntilRBrace();
      expect(Tok::RBrace, "'}'");
      return withPos(
          mkTryCatch(std::move(tryBody), std::move(var), std::move(catchBody)),
          t);
    }
    case Tok::KwLoopScope: {
      advance();
      expect(Tok::LParen, "'('");
      std::string idx = expect(Tok::Ident, "identifier").text;
      expect(Tok::RParen, "')'");
      expect(Tok::LBrace, "'{'");
      StmtList body = parseStmtSequenceUntilRBrace();
      expect(Tok::RBrace, "'}'");
      return withPos(mkLoopScope(std::move(idx), std::move(body)), t);
    }
    case Tok::Ident: {
      // labels: ident ':' (but not ident ':' inside an expression context,
      // which cannot occur at statement start)
      if (peek(1).kind == Tok::Colon) {
        std::vector<std::string> labels;
        while (check(Tok::Ident) && peek(1).kind == Tok::Colon) {
          labels.push_back(advance().text);
          advance(); // ':'
        }
        StmtPtr body = parseStatementInner();
        return withPos(mkLabeled(std::move(labels), std::move(body)), t);
      }
      std::string name = advance().text;
      if (eat(Tok::PlusPlus)) {
        expect(Tok::Semi, "';'");
        return withPos(mkExprStmt(mkUpdIncr(std::move(name))), t);
      }
      if (eat(Tok::MinusMinus)) {
        expect(Tok::Semi, "';'");
        return withPos(mkExprStmt(mkUpdDecr(std::move(name))), t);
      }
      expect(Tok::Assign, "'=' after identifier");
      ExprPtr rhs = parseExpr();
      expect(Tok::Semi, "';'");
      return withPos(mkAssign(std::move(name), std::move(rhs)), t);
    }
    default:
      fail("expected statement");
    }
  }

  StmtPtr parseVarDecl() {
    const Token &t = peek();
    Sort sort = advance().kind == Tok::KwInt ? Sort::Int : Sort::Bool;
    std::string name = expect(Tok::Ident, "identifier").text;
    expect(Tok::Assign, "'=' (initializer required)");
    ExprPtr init = parseExpr();
    if (check(Tok::Comma))
      fail("one declarator per statement (multiple declarators are only "
           "allowed in a for-initializer)");
    expect(Tok::Semi, "';'");
    return withPos(mkVarDecl(sort, std::move(name), std::move(init)), t);
  }

  UpdateExpr parseUpdateExpr() {
    std::string name = expect(Tok::Ident, "identifier").text;
    if (eat(Tok::PlusPlus))
      return mkUpdIncr(std::move(name));
    if (eat(Tok::MinusMinus))
      return mkUpdDecr(std::move(name));
    expect(Tok::Assign, "'=', '++' or '--'");
    ExprPtr rhs = parseExpr();
    return mkUpdAssign(std::move(name), std::move(rhs));
  }

  StmtPtr parseFor() {
    const Token &t = peek();
    advance();
    expect(Tok::LParen, "'('");
    ForInit init;
    if (check(Tok::Semi)) {
      // empty
    } else if (check(Tok::KwInt) || check(Tok::KwBoolean)) {
      std::vector<VarDeclItem> items;
      Sort sort = advance().kind == Tok::KwInt ? Sort::Int : Sort::Bool;
      for (;;) {
        std::string name = expect(Tok::Ident, "identifier").text;
        expect(Tok::Assign, "'=' (initializer required)");
        items.push_back({sort, std::move(name), parseExpr()});
        if (!eat(Tok::Comma))
          break;
        if (check(Tok::KwInt) || check(Tok::KwBoolean))
          sort = advance().kind == Tok::KwInt ? Sort::Int : Sort::Bool;
      }
      init = ForInit::ofDecls(std::move(items));
    } else {
      std::vector<UpdateExpr> items;
      items.push_back(parseUpdateExpr());
      while (eat(Tok::Comma))
        items.push_back(parseUpdateExpr());
      init = ForInit::ofExprs(std::move(items));
    }
    expect(Tok::Semi, "';'");
    ExprPtr guard;
    if (!check(Tok::Semi))
      guard = parseExpr();
    expect(Tok::Semi, "';'");
    std::vector<UpdateExpr> update;
    if (!check(Tok::RParen)) {
      update.push_back(parseUpdateExpr());
      while (eat(Tok::Comma))
        update.push_back(parseUpdateExpr());
    }
    expect(Tok::RParen, "')'");
    StmtPtr body = parseStatement();
    return withPos(
        mkFor(std::move(init), std::move(guard), std::move(update), std::move(body)),
        t);
  }

  // --- expressions, precedence climbing ---------------------------------

  struct OpInfo {
    BinOp op;
    int prec;
  };

  std::optional<OpInfo> binOpOf(Tok k) const {
    switch (k) {
    case Tok::PipePipe:
      return OpInfo{BinOp::Or, 1};
    case Tok::AmpAmp:
      return OpInfo{BinOp::And, 2};
    case Tok::EqEq:
      return OpInfo{BinOp::Eq, 3};
    case Tok::BangEq:
      return OpInfo{BinOp::Ne, 3};
    case Tok::Lt:
      return OpInfo{BinOp::Lt, 4};
    case Tok::Le:
      return OpInfo{BinOp::Le, 4};
    case Tok::Gt:
      return OpInfo{BinOp::Gt, 4};
    case Tok::Ge:
      return OpInfo{BinOp::Ge, 4};
    case Tok::Plus:
      return OpInfo{BinOp::Add, 5};
    case Tok::Minus:
      return OpInfo{BinOp::Sub, 5};
    case Tok::Star:
      return OpInfo{BinOp::Mul, 6};
    default:
      return std::nullopt;
    }
  }

  ExprPtr parseExpr() { return parseExprPrec(1); }

  ExprPtr parseExprPrec(int minPrec) {
    ExprPtr lhs = parseUnary();
    for (;;) {
      auto info = binOpOf(peek().kind);
      if (!info || info->prec < minPrec)
        return lhs;
      advance();
      ExprPtr rhs = parseExprPrec(info->prec + 1);
      lhs = mkBinary(info->op, std::move(lhs), std::move(rhs));
    }
  }

  ExprPtr parseUnary() {
    if (eat(Tok::Minus)) {
      ExprPtr arg = parseUnary();
      if (const auto *lit = as<IntLit>(arg))
        return mkIntLit(-lit->value);
      return mkUnary(UnOp::Neg, std::move(arg));
    }
    if (eat(Tok::Bang))
      return mkUnary(UnOp::Not, parseUnary());
    return parsePrimary();
  }

  ExprPtr parsePrimary() {
    const Token &t = peek();
    switch (t.kind) {
    case Tok::IntLit:
      advance();
      return mkIntLit(t.value);
    case Tok::KwTrue:
      advance();
      return mkBoolLit(true);
    case Tok::KwFalse:
      advance();
      return mkBoolLit(false);
    case Tok::Ident:
      advance();
      return mkVar(t.text);
    case Tok::LParen: {
      advance();
      ExprPtr e = parseExpr();
      expect(Tok::RParen, "')'");
      return e;
    }
    default:
      fail("expected expression");
    }
  }

  // --- formulas ----------------------------------------------------------

  FormulaPtr parseFormulaToks(const SortEnv &sorts) {
    FormulaPtr lhs = parseFormulaOr(sorts);
    if (eat(Tok::Arrow))
      return mkImp(std::move(lhs), parseFormulaToks(sorts));
    return lhs;
  }

  FormulaPtr parseFormulaOr(const SortEnv &sorts) {
    FormulaPtr lhs = parseFormulaAnd(sorts);
    while (eat(Tok::PipePipe))
      lhs = mkOr(std::move(lhs), parseFormulaAnd(sorts));
    return lhs;
  }

  FormulaPtr parseFormulaAnd(const SortEnv &sorts) {
    FormulaPtr lhs = parseFormulaNot(sorts);
    while (eat(Tok::AmpAmp))
      lhs = mkAnd(std::move(lhs), parseFormulaNot(sorts));
    return lhs;
  }

  FormulaPtr parseFormulaNot(const SortEnv &sorts) {
    if (eat(Tok::Bang))
      return mkNot(parseFormulaNot(sorts));
    return parseFormulaPrim(sorts);
  }

  bool nextContinuesExpr() const {
    switch (peek().kind) {
    case Tok::Plus:
    case Tok::Minus:
    case Tok::Star:
    case Tok::Lt:
    case Tok::Le:
    case Tok::Gt:
    case Tok::Ge:
    case Tok::EqEq:
    case Tok::BangEq:
      return true;
    default:
      return false;
    }
  }

  FormulaPtr parseFormulaPrim(const SortEnv &sorts) {
    if (check(Tok::LParen)) {
      std::size_t save = pos;
      try {
        advance();
        FormulaPtr f = parseFormulaToks(sorts);
        expect(Tok::RParen, "')'");
        if (!nextContinuesExpr())
          return f;
      } catch (const ParseError &) {
      }
      pos = save; // parenthesized arithmetic operand; reparse as expression
    }
    ExprPtr e = parseExprPrec(3); // comparisons and below
    return lowerBoolExpr(e, sorts);
  }

  FormulaPtr lowerBoolExpr(const ExprPtr &e, const SortEnv &sorts) {
    try {
      return exprToFormula(e, sorts);
    } catch (const std::logic_error &) {
      fail("boolean formula expected");
    }
  }
};

std::vector<Token> lexAll(const std::string &text) {
  Lexer lx(text);
  return lx.lex();
}

FormulaPtr parseFormulaText(const std::string &text, const SortEnv &sorts,
                            int atLine, int atCol) {
  try {
    Parser p;
    p.toks = lexAll(text);
    FormulaPtr f = p.parseFormulaToks(sorts);
    if (!p.check(Tok::End))
      p.fail("unexpected trailing tokens in formula");
    return f;
  } catch (const ParseError &e) {
    throw ParseError(std::string("in formula: ") + e.what(),
                     atLine > 0 ? atLine : e.line, atCol > 0 ? atCol : e.col);
  }
}

// ---------------------------------------------------------------------------
// Validation: label scoping, break/continue targets, declaration discipline.
// ---------------------------------------------------------------------------

struct Validator {
  std::set<std::string> allDeclared; // declared anywhere in the program
  std::vector<std::set<std::string>> scopes;
  std::set<std::string> activeLabels;
  struct LabelEntry {
    std::string name;
    bool directlyWrapsLoop;
    int loopsOutside;
  };
  std::vector<LabelEntry> labelStack;
  int loopDepth = 0; // while/for/loop-scope frames

  [[noreturn]] static void fail(const std::string &msg, const Stmt *s) {
    throw ParseError(msg, s ? s->line : 0, s ? s->col : 0);
  }

  bool inScope(const std::string &name) const {
    for (const auto &sc : scopes)
      if (sc.count(name))
        return true;
    return false;
  }

  void collectDecls(const StmtList &ss) {
    for (const auto &s : ss)
      collectDecls(s);
  }
  void collectDecls(const StmtPtr &s) {
    if (!s)
      return;
    if (const auto *x = std::get_if<VarDeclStmt>(&s->node))
      allDeclared.insert(x->name);
    else if (const auto *x = std::get_if<BlockStmt>(&s->node))
      collectDecls(x->body);
    else if (const auto *x = std::get_if<LabeledStmt>(&s->node))
      collectDecls(x->body);
    else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
      collectDecls(x->thenBranch);
      collectDecls(x->elseBranch);
    } else if (const auto *x = std::get_if<WhileStmt>(&s->node))
      collectDecls(x->body);
    else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
      if (x->init.kind == ForInit::Kind::Decls)
        for (const auto &d : x->init.decls)
          allDeclared.insert(d.name);
      collectDecls(x->body);
    } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
      collectDecls(x->tryBody);
      allDeclared.insert(x->catchVar);
      collectDecls(x->catchBody);
    } else if (const auto *x = std::get_if<LoopScopeStmt>(&s->node))
      collectDecls(x->body);
  }

  void useVar(const std::string &name, const Stmt *at) {
    if (allDeclared.count(name) && !inScope(name))
      fail("variable '" + name + "' is declared elsewhere and not in scope here",
           at);
  }

  void declare(const std::string &name, const Stmt *at) {
    if (inScope(name))
      fail("duplicate declaration of '" + name + "' in scope", at);
    scopes.back().insert(name);
  }

  void checkExpr(const ExprPtr &e, const Stmt *at) {
    for (const auto &v : progVarsOfExpr(e))
      useVar(v, at);
  }

  void checkUpdateExpr(const UpdateExpr &e, const Stmt *at) {
    if (const auto *a = std::get_if<UpdAssign>(&e.node)) {
      useVar(a->target, at);
      checkExpr(a->rhs, at);
    } else if (const auto *i = std::get_if<UpdIncr>(&e.node)) {
      useVar(i->target, at);
    } else {
      useVar(std::get<UpdDecr>(e.node).target, at);
    }
  }

  void run(const StmtList &program) {
    collectDecls(program);
    scopes.assign(1, {});
    checkSeq(program);
  }

  void checkSeq(const StmtList &ss) {
    for (const auto &s : ss)
      check(s);
  }

  void check(const StmtPtr &s) {
    const Stmt *at = s.get();
    if (std::get_if<SkipStmt>(&s->node))
      return;
    if (const auto *x = std::get_if<VarDeclStmt>(&s->node)) {
      checkExpr(x->init, at);
      declare(x->name, at);
      return;
    }
    if (const auto *x = std::get_if<AssignStmt>(&s->node)) {
      useVar(x->target, at);
      checkExpr(x->rhs, at);
      return;
    }
    if (const auto *x = std::get_if<ExprStmt>(&s->node)) {
      checkUpdateExpr(x->expr, at);
      return;
    }
    if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
      scopes.emplace_back();
      checkSeq(x->body);
      scopes.pop_back();
      return;
    }
    if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
      if (x->labels.empty())
        fail("empty label list", at);
      for (const auto &l : x->labels) {
        if (activeLabels.count(l))
          fail("duplicate label '" + l + "' along a path", at);
        activeLabels.insert(l);
      }
      StmtPtr unwrapped = x->body;
      while (const auto *inner = as<LabeledStmt>(unwrapped))
        unwrapped = inner->body;
      bool wrapsLoop = is<WhileStmt>(unwrapped) || is<ForStmt>(unwrapped);
      for (const auto &l : x->labels)
        labelStack.push_back({l, wrapsLoop, loopDepth});
      check(x->body);
      for (std::size_t k = 0; k < x->labels.size(); ++k)
        labelStack.pop_back();
      for (const auto &l : x->labels)
        activeLabels.erase(l);
      return;
    }
    if (const auto *x = std::get_if<IfStmt>(&s->node)) {
      checkExpr(x->cond, at);
      check(x->thenBranch);
      if (x->elseBranch)
        check(x->elseBranch);
      return;
    }
    if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
      checkExpr(x->cond, at);
      ++loopDepth;
      check(x->body);
      --loopDepth;
      return;
    }
    if (const auto *x = std::get_if<ForStmt>(&s->node)) {
      scopes.emplace_back();
      if (x->init.kind == ForInit::Kind::Decls) {
        std::set<std::string> seen;
        for (const auto &d : x->init.decls) {
          if (!seen.insert(d.name).second)
            fail("duplicate declaration of '" + d.name +
                     "' in for-initializer",
                 at);
          checkExpr(d.init, at);
          declare(d.name, at);
        }
      } else if (x->init.kind == ForInit::Kind::Exprs) {
        for (const auto &e : x->init.exprs)
          checkUpdateExpr(e, at);
      }
      if (x->guard)
        checkExpr(x->guard, at);
      for (const auto &e : x->update)
        checkUpdateExpr(e, at);
      ++loopDepth;
      check(x->body);
      --loopDepth;
      scopes.pop_back();
      return;
    }
    if (const auto *x = std::get_if<BreakStmt>(&s->node)) {
      if (x->label) {
        for (auto it = labelStack.rbegin(); it != labelStack.rend(); ++it)
          if (it->name == *x->label)
            return;
        fail("break label '" + *x->label + "' does not match an enclosing label",
             at);
      }
      if (loopDepth == 0)
        fail("unlabeled break outside of loop or loop scope", at);
      return;
    }
    if (const auto *x = std::get_if<ContinueStmt>(&s->node)) {
      if (x->label) {
        for (auto it = labelStack.rbegin(); it != labelStack.rend(); ++it) {
          if (it->name != *x->label)
            continue;
          // fine if the label wraps a loop; otherwise the continue converts
          // to an unlabeled one there, which still needs a loop around it
          if (it->directlyWrapsLoop || it->loopsOutside > 0)
            return;
          fail("continue label '" + *x->label +
                   "' targets a non-loop statement with no enclosing loop",
               at);
        }
        fail("continue label '" + *x->label +
                 "' does not match an enclosing label",
             at);
      }
      if (loopDepth == 0)
        fail("unlabeled continue outside of loop or loop scope", at);
      return;
    }
    if (const auto *x = std::get_if<ThrowStmt>(&s->node)) {
      checkExpr(x->value, at);
      return;
    }
    if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
      scopes.emplace_back();
      checkSeq(x->tryBody);
      scopes.pop_back();
      scopes.emplace_back();
      declare(x->catchVar, at);
      checkSeq(x->catchBody);
      scopes.pop_back();
      return;
    }
    const auto &x = std::get<LoopScopeStmt>(s->node);
    useVar(x.index, at);
    ++loopDepth;
    scopes.emplace_back();
    checkSeq(x.body);
    scopes.pop_back();
    --loopDepth;
  }
};

// ---------------------------------------------------------------------------
// Sort inference: union-find over {Int, Bool, unknown} slots per name.
// ---------------------------------------------------------------------------

struct SortSolver {
  std::vector<int> parent;
  std::vector<std::optional<Sort>> value;
  std::map<std::string, int> slotOf;
  int intSlot, boolSlot;
  int curLine = 0, curCol = 0;

  SortSolver() {
    intSlot = newSlot(Sort::Int);
    boolSlot = newSlot(Sort::Bool);
  }

  int newSlot(std::optional<Sort> v = std::nullopt) {
    parent.push_back(static_cast<int>(parent.size()));
    value.push_back(v);
    return static_cast<int>(parent.size()) - 1;
  }

  int slot(const std::string &name) {
    auto it = slotOf.find(name);
    if (it != slotOf.end())
      return it->second;
    int s = newSlot();
    slotOf.emplace(name, s);
    return s;
  }

  int find(int a) {
    while (parent[a] != a)
      a = parent[a] = parent[parent[a]];
    return a;
  }

  void unify(int a, int b, const std::string &what) {
    a = find(a);
    b = find(b);
    if (a == b)
      return;
    if (value[a] && value[b]) {
      if (*value[a] != *value[b])
        throw ParseError("sort mismatch: " + what, curLine, curCol);
      parent[b] = a;
      return;
    }
    if (!value[a])
      std::swap(a, b);
    parent[b] = a; // a has the value if either does
  }

  void require(int a, Sort s, const std::string &what) {
    unify(a, s == Sort::Int ? intSlot : boolSlot, what);
  }

  // returns the slot representing the expression's sort
  int exprSlot(const ExprPtr &e) {
    if (as<IntLit>(e))
      return intSlot;
    if (as<BoolLit>(e))
      return boolSlot;
    if (const auto *v = as<VarRef>(e))
      return slot(v->name);
    if (const auto *u = as<Unary>(e)) {
      int a = exprSlot(u->arg);
      if (u->op == UnOp::Neg) {
        require(a, Sort::Int, "operand of unary '-' must be int");
        return intSlot;
      }
      require(a, Sort::Bool, "operand of '!' must be boolean");
      return boolSlot;
    }
    const auto *b = as<Binary>(e);
    int l = exprSlot(b->lhs);
    int r = exprSlot(b->rhs);
    switch (b->op) {
    case BinOp::Add:
    case BinOp::Sub:
    case BinOp::Mul:
      require(l, Sort::Int, "arithmetic operand must be int");
      require(r, Sort::Int, "arithmetic operand must be int");
      return intSlot;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge:
      require(l, Sort::Int, "comparison operand must be int");
      require(r, Sort::Int, "comparison operand must be int");
      return boolSlot;
    case BinOp::Eq:
    case BinOp::Ne:
      unify(l, r, "'=='/'!=' operands must have the same sort");
      return boolSlot;
    case BinOp::And:
    case BinOp::Or:
      require(l, Sort::Bool, "'&&'/'||' operand must be boolean");
      require(r, Sort::Bool, "'&&'/'||' operand must be boolean");
      return boolSlot;
    }
    return intSlot;
  }

  void updateExprConstrain(const UpdateExpr &e) {
    if (const auto *a = std::get_if<UpdAssign>(&e.node)) {
      unify(slot(a->target), exprSlot(a->rhs),
            "assignment sorts must match for '" + a->target + "'");
    } else if (const auto *i = std::get_if<UpdIncr>(&e.node)) {
      require(slot(i->target), Sort::Int, "'++' target must be int");
    } else {
      require(slot(std::get<UpdDecr>(e.node).target), Sort::Int,
              "'--' target must be int");
    }
  }

  void stmtConstrain(const StmtPtr &s) {
    if (!s)
      return;
    curLine = s->line;
    curCol = s->col;
    if (const auto *x = std::get_if<VarDeclStmt>(&s->node)) {
      require(slot(x->name), x->sort,
              "conflicting sort for declared variable '" + x->name + "'");
      unify(slot(x->name), exprSlot(x->init),
            "initializer sort must match declaration of '" + x->name + "'");
    } else if (const auto *x = std::get_if<AssignStmt>(&s->node)) {
      unify(slot(x->target), exprSlot(x->rhs),
            "assignment sorts must match for '" + x->target + "'");
    } else if (const auto *x = std::get_if<ExprStmt>(&s->node)) {
      updateExprConstrain(x->expr);
    } else if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
      for (const auto &t : x->body)
        stmtConstrain(t);
    } else if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
      stmtConstrain(x->body);
    } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
      require(exprSlot(x->cond), Sort::Bool, "if guard must be boolean");
      stmtConstrain(x->thenBranch);
      stmtConstrain(x->elseBranch);
    } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
      require(exprSlot(x->cond), Sort::Bool, "while guard must be boolean");
      stmtConstrain(x->body);
    } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
      if (x->init.kind == ForInit::Kind::Decls) {
        for (const auto &d : x->init.decls) {
          require(slot(d.name), d.sort,
                  "conflicting sort for declared variable '" + d.name + "'");
          unify(slot(d.name), exprSlot(d.init),
                "initializer sort must match declaration of '" + d.name + "'");
        }
      } else if (x->init.kind == ForInit::Kind::Exprs) {
        for (const auto &e : x->init.exprs)
          updateExprConstrain(e);
      }
      if (x->guard)
        require(exprSlot(x->guard), Sort::Bool, "for guard must be boolean");
      for (const auto &e : x->update)
        updateExprConstrain(e);
      stmtConstrain(x->body);
    } else if (const auto *x = std::get_if<ThrowStmt>(&s->node)) {
      exprSlot(x->value);
    } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
      for (const auto &t : x->tryBody)
        stmtConstrain(t);
      for (const auto &t : x->catchBody)
        stmtConstrain(t);
    } else if (const auto *x = std::get_if<LoopScopeStmt>(&s->node)) {
      require(slot(x->index), Sort::Bool,
              "loop scope index '" + x->index + "' must be boolean");
      for (const auto &t : x->body)
        stmtConstrain(t);
    }
  }

  int termSlot(const TermPtr &t) {
    if (as<IntConst>(t))
      return intSlot;
    if (as<BoolConst>(t))
      return boolSlot;
    if (const auto *v = as<ProgVar>(t))
      return slot(v->name);
    if (const auto *c = as<FreshConst>(t))
      return slot(c->name);
    const auto *a = as<Arith>(t);
    require(termSlot(a->lhs), Sort::Int, "arithmetic operand must be int");
    require(termSlot(a->rhs), Sort::Int, "arithmetic operand must be int");
    return intSlot;
  }

  void formulaConstrain(const FormulaPtr &f) {
    if (!f)
      return;
    if (const auto *x = std::get_if<AtomF>(&f->node)) {
      if (x->rel == RelOp::Eq) {
        unify(termSlot(x->lhs), termSlot(x->rhs),
              "'=' operands must have the same sort");
      } else {
        require(termSlot(x->lhs), Sort::Int, "ordering operand must be int");
        require(termSlot(x->rhs), Sort::Int, "ordering operand must be int");
      }
    } else if (const auto *x = std::get_if<NotF>(&f->node)) {
      formulaConstrain(x->f);
    } else if (const auto *x = std::get_if<AndF>(&f->node)) {
      formulaConstrain(x->lhs);
      formulaConstrain(x->rhs);
    } else if (const auto *x = std::get_if<OrF>(&f->node)) {
      formulaConstrain(x->lhs);
      formulaConstrain(x->rhs);
    } else if (const auto *x = std::get_if<ImpF>(&f->node)) {
      formulaConstrain(x->lhs);
      formulaConstrain(x->rhs);
    } else if (const auto *x = std::get_if<BoxF>(&f->node)) {
      for (const auto &s : x->program)
        stmtConstrain(s);
      formulaConstrain(x->post);
    } else if (const auto *x = std::get_if<UpdAppF>(&f->node)) {
      for (const auto &e : x->update.elems)
        unify(slot(e.var), termSlot(e.value), "update sorts must match");
      formulaConstrain(x->target);
    }
  }

  SortEnv result() {
    SortEnv env;
    for (const auto &[name, s] : slotOf) {
      int r = find(s);
      env[name] = value[r].value_or(Sort::Int);
    }
    return env;
  }
};

} // namespace

SortEnv inferSorts(const StmtList &program) {
  SortSolver solver;
  for (const auto &s : program)
    solver.stmtConstrain(s);
  return solver.result();
}

SortEnv inferSorts(const StmtList &program,
                   const std::vector<FormulaPtr> &formulas) {
  SortSolver solver;
  for (const auto &s : program)
    solver.stmtConstrain(s);
  for (const auto &f : formulas)
    solver.formulaConstrain(f);
  return solver.result();
}

void validateProgram(const StmtList &program) {
  Validator v;
  v.run(program);
}

StmtList parseProgram(const std::string &text) {
  Parser p;
  p.toks = lexAll(text);
  StmtList program = p.parseProgramToks();
  validateProgram(program);
  inferSorts(program); // throws on sort conflicts
  return program;
}

AnnotatedProgram parseAnnotatedFile(const std::string &text) {
  Parser p;
  p.collectAnnotations = true;
  p.toks = lexAll(text);
  AnnotatedProgram ap;
  ap.program = p.parseProgramToks();
  validateProgram(ap.program);

  if (!p.preAnnot)
    throw ParseError("missing //@ pre: annotation", 1, 1);
  if (!p.postAnnot)
    throw ParseError("missing //@ post: annotation", 1, 1);

  SortEnv sorts = inferSorts(ap.program);
  ap.precondition = parseFormulaText(p.preAnnot->text, sorts, p.preAnnot->line,
                                     p.preAnnot->col);
  ap.postcondition = parseFormulaText(p.postAnnot->text, sorts,
                                      p.postAnnot->line, p.postAnnot->col);

  for (const auto &[loop, ann] : p.loopAnnots) {
    LoopAnnotation la;
    if (ann.kind == "invariant") {
      la.kind = LoopAnnotation::Kind::Invariant;
      la.invariant = parseFormulaText(ann.text, sorts, ann.line, ann.col);
    } else {
      la.kind = LoopAnnotation::Kind::Unwind;
      std::istringstream is(ann.text);
      long long n = -1;
      is >> n;
      std::string rest;
      is >> rest;
      if (n < 0 || !rest.empty())
        throw ParseError("unwind annotation expects a nonnegative integer",
                         ann.line, ann.col);
      la.unwind = static_cast<unsigned>(n);
    }
    ap.loopAnnotations[loop] = la;
  }

  // every while/for must carry exactly one annotation
  struct LoopWalk {
    const std::map<const Stmt *, LoopAnnotation> &annots;
    void walk(const StmtPtr &s) {
      if (!s)
        return;
      if (const auto *x = std::get_if<BlockStmt>(&s->node)) {
        for (const auto &t : x->body)
          walk(t);
      } else if (const auto *x = std::get_if<LabeledStmt>(&s->node)) {
        walk(x->body);
      } else if (const auto *x = std::get_if<IfStmt>(&s->node)) {
        walk(x->thenBranch);
        walk(x->elseBranch);
      } else if (const auto *x = std::get_if<WhileStmt>(&s->node)) {
        if (!annots.count(s.get()))
          throw ParseError("missing loop annotation", s->line, s->col);
        walk(x->body);
      } else if (const auto *x = std::get_if<ForStmt>(&s->node)) {
        if (!annots.count(s.get()))
          throw ParseError("missing loop annotation", s->line, s->col);
        walk(x->body);
      } else if (const auto *x = std::get_if<TryCatchStmt>(&s->node)) {
        for (const auto &t : x->tryBody)
          walk(t);
        for (const auto &t : x->catchBody)
          walk(t);
      } else if (const auto *x = std::get_if<LoopScopeStmt>(&s->node)) {
        for (const auto &t : x->body)
          walk(t);
      }
    }
  } lw{ap.loopAnnotations};
  for (const auto &s : ap.program)
    lw.walk(s);

  // pre and post speak about the state before/after the whole program;
  // scope-local declared variables are not visible there
  std::set<std::string> locals = declaredVars(ap.program);
  for (const auto &v : freeProgVars(ap.precondition))
    if (locals.count(v))
      throw ParseError("precondition mentions scope-local variable '" + v + "'",
                       p.preAnnot->line, p.preAnnot->col);
  for (const auto &v : freeProgVars(ap.postcondition))
    if (locals.count(v))
      throw ParseError("postcondition mentions scope-local variable '" + v + "'",
                       p.postAnnot->line, p.postAnnot->col);

  std::vector<FormulaPtr> fs{ap.precondition, ap.postcondition};
  for (const auto &[_, la] : ap.loopAnnotations)
    if (la.invariant)
      fs.push_back(la.invariant);
  ap.sorts = inferSorts(ap.program, fs);
  return ap;
}

FormulaPtr parseFormula(const std::string &text, const SortEnv &sorts) {
  return parseFormulaText(text, sorts, 0, 0);
}

} // namespace lsv
