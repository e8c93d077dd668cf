#include "permflow/parser.hpp"

#include <cctype>
#include <charconv>
#include <functional>
#include <limits>
#include <set>

namespace permflow {

namespace {

enum class Tok {
  Ident,
  Int,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Comma,
  Semi,
  Colon,
  Assign,  // :=
  Equals,  // =
  EqEq,
  Less,
  Plus,
  Minus,
  Star,
  Dot,
  Arrow,  // ->
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const std::set<std::string, std::less<>> kKeywords = {
    "lattice", "levels", "order", "permissions", "app",  "perms",  "const",
    "fun",     "infer",  "init",  "in",          "return", "if",   "then",
    "else",    "while",  "do",    "letvar",      "test", "call",
};

[[noreturn]] void syntax_error(SourceSpan span, const std::string& message) {
  throw InputError(DiagnosticKind::SyntaxError, span, message);
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::uint32_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourceSpan span{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), span});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), span});
      advance(j - i);
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == ":=") {
      out.push_back({Tok::Assign, ":=", span});
      advance(2);
      continue;
    }
    if (two == "==") {
      out.push_back({Tok::EqEq, "==", span});
      advance(2);
      continue;
    }
    if (two == "->") {
      out.push_back({Tok::Arrow, "->", span});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semi; break;
      case ':': kind = Tok::Colon; break;
      case '=': kind = Tok::Equals; break;
      case '<': kind = Tok::Less; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '.': kind = Tok::Dot; break;
      default:
        syntax_error(span, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, std::string(1, c), span});
    advance(1);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  System system() {
    System sys;
    if (peek().kind == Tok::End) syntax_error(peek().span, "empty input");
    sys.lattice = lattice();
    sys_ = &sys;
    if (is_keyword("permissions")) {
      next();
      expect(Tok::LBrace, "'{'");
      std::vector<std::string> names;
      if (peek().kind != Tok::RBrace) {
        names.push_back(ident("permission name").text);
        while (accept(Tok::Comma)) names.push_back(ident("permission name").text);
      }
      expect(Tok::RBrace, "'}'");
      sys.universe = PermissionUniverse(std::move(names));
    }
    while (peek().kind != Tok::End) {
      if (is_keyword("app")) {
        app(sys);
      } else if (is_keyword("const")) {
        constant(sys, "");
      } else {
        syntax_error(peek().span, "expected 'app' or 'const', found '" + peek().text + "'");
      }
    }
    return sys;
  }

  BaseType type_only(const Lattice& lat, const PermissionUniverse& universe) {
    BaseType t = base_type(lat, universe);
    if (peek().kind != Tok::End) syntax_error(peek().span, "trailing input after type");
    return t;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
  }
  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      syntax_error(peek().span, std::string("expected ") + what + ", found '" +
                                    (peek().kind == Tok::End ? "end of input" : peek().text) +
                                    "'");
    }
    return next();
  }
  bool is_keyword(std::string_view kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  void keyword(std::string_view kw) {
    if (!is_keyword(kw)) {
      syntax_error(peek().span, "expected '" + std::string(kw) + "', found '" + peek().text + "'");
    }
    next();
  }
  const Token& ident(const char* what) {
    const Token& t = expect(Tok::Ident, what);
    if (kKeywords.count(t.text)) {
      syntax_error(t.span, std::string("expected ") + what + ", found keyword '" + t.text + "'");
    }
    return t;
  }

  Lattice lattice() {
    keyword("lattice");
    expect(Tok::LBrace, "'{'");
    keyword("levels");
    Lattice::Spec spec;
    SourceSpan start = peek().span;
    spec.names.push_back(ident("level name").text);
    while (accept(Tok::Comma)) spec.names.push_back(ident("level name").text);
    expect(Tok::Semi, "';'");
    if (is_keyword("order")) {
      next();
      do {
        std::string a = ident("level name").text;
        expect(Tok::Less, "'<'");
        std::string b = ident("level name").text;
        spec.order.emplace_back(a, b);
        while (accept(Tok::Less)) {
          a = b;
          b = ident("level name").text;
          spec.order.emplace_back(a, b);
        }
      } while (accept(Tok::Comma));
      expect(Tok::Semi, "';'");
    }
    expect(Tok::RBrace, "'}'");
    try {
      return Lattice::load(spec);
    } catch (const InputError& e) {
      throw InputError(e.kind(), start, e.diagnostics().front().message);
    }
  }

  PermSet perm_set(const PermissionUniverse& universe) {
    expect(Tok::LBrace, "'{'");
    PermSet set = 0;
    if (peek().kind != Tok::RBrace) {
      do {
        const Token& t = ident("permission name");
        auto p = universe.find(t.text);
        if (!p) {
          throw InputError(DiagnosticKind::UnknownPermission, t.span,
                           "unknown permission '" + t.text + "'");
        }
        set |= perm_bit(*p);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RBrace, "'}'");
    return set;
  }

  Level level(const Lattice& lat) {
    const Token& t = ident("level name");
    auto l = lat.find(t.text);
    if (!l) {
      throw InputError(DiagnosticKind::UnknownLevelName, t.span, "unknown level '" + t.text + "'");
    }
    return *l;
  }

  BaseType base_type(const Lattice& lat, const PermissionUniverse& universe) {
    const std::size_t n = universe.size();
    if (peek().kind != Tok::LBrace) return BaseType::embed(level(lat), n);
    SourceSpan span = next().span;
    std::optional<Level> dflt;
    std::vector<std::optional<Level>> table(universe.set_count());
    do {
      if (peek().kind == Tok::Ident && peek().text == "_") {
        SourceSpan at = next().span;
        if (dflt) throw InputError(DiagnosticKind::BadTypeLiteral, at, "default '_' given twice");
        expect(Tok::Colon, "':'");
        dflt = level(lat);
      } else {
        SourceSpan at = peek().span;
        PermSet set = perm_set(universe);
        expect(Tok::Colon, "':'");
        Level l = level(lat);
        if (table[set]) {
          throw InputError(DiagnosticKind::BadTypeLiteral, at,
                           "permission set " + universe.format(set) + " listed twice");
        }
        table[set] = l;
      }
    } while (accept(Tok::Comma));
    expect(Tok::RBrace, "'}'");
    std::vector<Level> levels(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i]) {
        levels[i] = *table[i];
      } else if (dflt) {
        levels[i] = *dflt;
      } else {
        throw InputError(DiagnosticKind::BadTypeLiteral, span,
                         "no level for permission set " +
                             universe.format(static_cast<PermSet>(i)) + " and no default '_'");
      }
    }
    return BaseType::from_table(std::move(levels));
  }

  void app(System& sys) {
    SourceSpan span = next().span;
    AppDecl decl;
    decl.name = ident("app name").text;
    decl.span = span;
    if (is_keyword("perms")) {
      next();
      decl.perms = perm_set(sys.universe);
    }
    sys.apps.push_back(decl);
    expect(Tok::LBrace, "'{'");
    while (!accept(Tok::RBrace)) {
      if (is_keyword("const")) {
        constant(sys, decl.name);
      } else if (is_keyword("fun")) {
        function(sys, decl.name);
      } else {
        syntax_error(peek().span, "expected 'fun', 'const' or '}', found '" + peek().text + "'");
      }
    }
  }

  void constant(System& sys, const std::string& app) {
    SourceSpan span = next().span;
    Constant c;
    c.name = ident("constant name").text;
    c.app = app;
    c.span = span;
    expect(Tok::Colon, "':'");
    c.type = base_type(sys.lattice, sys.universe);
    expect(Tok::Equals, "'='");
    c.value = integer();
    expect(Tok::Semi, "';'");
    sys.constants.push_back(std::move(c));
  }

  std::int64_t integer() {
    bool negative = accept(Tok::Minus);
    const Token& t = expect(Tok::Int, "integer literal");
    std::uint64_t mag = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
    const std::uint64_t limit =
        static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + (negative ? 1 : 0);
    if (ec != std::errc() || mag > limit) syntax_error(t.span, "integer literal out of range");
    return negative ? static_cast<std::int64_t>(0 - mag) : static_cast<std::int64_t>(mag);
  }

  void function(System& sys, const std::string& app) {
    SourceSpan span = next().span;
    FunDecl f;
    f.app = app;
    f.span = span;
    f.name = ident("function name").text;
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      do {
        Param p;
        p.span = peek().span;
        p.name = ident("parameter name").text;
        if (accept(Tok::Colon)) p.type = base_type(sys.lattice, sys.universe);
        f.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    if (accept(Tok::Colon)) {
      f.ret_type = base_type(sys.lattice, sys.universe);
    } else if (is_keyword("infer")) {
      next();
      f.infer_marker = true;
    }
    std::size_t typed = 0;
    for (const auto& p : f.params) typed += p.type.has_value();
    if ((f.ret_type && typed != f.params.size()) || (!f.ret_type && typed != 0)) {
      throw InputError(DiagnosticKind::MissingAnnotation, span,
                       "function '" + f.name +
                           "' must annotate either all parameters and the result or none");
    }
    if (f.ret_type && f.infer_marker) syntax_error(span, "'infer' on an annotated function");
    expect(Tok::LBrace, "'{'");
    if (is_keyword("init")) {
      next();
      const Token& r = expect(Tok::Ident, "'r'");
      if (r.text != kReturnVar) syntax_error(r.span, "the result variable must be named 'r'");
      expect(Tok::Equals, "'='");
      const Token& zero = expect(Tok::Int, "'0'");
      if (zero.text != "0") syntax_error(zero.span, "the result variable starts at 0");
      keyword("in");
      expect(Tok::LBrace, "'{'");
      f.body = statements(/*until_return=*/true);
      keyword("return");
      const Token& r2 = expect(Tok::Ident, "'r'");
      if (r2.text != kReturnVar) syntax_error(r2.span, "functions return 'r'");
      accept(Tok::Semi);
      expect(Tok::RBrace, "'}'");
      expect(Tok::RBrace, "'}'");
    } else {
      f.body = statements(/*until_return=*/false);
      expect(Tok::RBrace, "'}'");
    }
    sys.functions.push_back(std::move(f));
  }

  // Parses `c1; c2; ...` up to a closing brace (or `return`), right-nested.
  CmdPtr statements(bool until_return) {
    auto at_end = [&] {
      return peek().kind == Tok::RBrace || (until_return && is_keyword("return"));
    };
    if (at_end()) syntax_error(peek().span, "expected a command");
    std::vector<CmdPtr> cmds;
    cmds.push_back(statement());
    while (accept(Tok::Semi)) {
      if (at_end()) break;
      cmds.push_back(statement());
    }
    CmdPtr out = cmds.back();
    for (std::size_t i = cmds.size() - 1; i-- > 0;) {
      out = Cmd::seq(cmds[i], out, cmds[i]->span);
    }
    return out;
  }

  CmdPtr statement() {
    SourceSpan span = peek().span;
    if (accept(Tok::LBrace)) {
      CmdPtr c = statements(false);
      expect(Tok::RBrace, "'}'");
      return c;
    }
    if (is_keyword("if")) {
      next();
      ExprPtr cond = expr();
      keyword("then");
      CmdPtr a = statement();
      keyword("else");
      CmdPtr b = statement();
      return Cmd::if_(cond, a, b, span);
    }
    if (is_keyword("while")) {
      next();
      ExprPtr cond = expr();
      keyword("do");
      return Cmd::while_(cond, statement(), span);
    }
    if (is_keyword("letvar")) {
      next();
      std::string x = ident("variable name").text;
      std::optional<BaseType> type;
      if (accept(Tok::Colon)) type = base_type(sys_->lattice, sys_->universe);
      expect(Tok::Equals, "'='");
      ExprPtr init = expr();
      keyword("in");
      return Cmd::letvar(x, init, statement(), span, type);
    }
    if (is_keyword("test")) {
      next();
      expect(Tok::LParen, "'('");
      const Token& p = ident("permission name");
      if (!sys_->universe.find(p.text)) {
        throw InputError(DiagnosticKind::UnknownPermission, p.span,
                         "unknown permission '" + p.text + "'");
      }
      expect(Tok::RParen, "')'");
      CmdPtr a = statement();
      keyword("else");
      CmdPtr b = statement();
      return Cmd::test(p.text, a, b, span);
    }
    std::string x = ident("command").text;
    expect(Tok::Assign, "':='");
    if (is_keyword("call")) {
      next();
      std::string app;
      std::string fun = ident("function name").text;
      if (accept(Tok::Dot)) {
        app = fun;
        fun = ident("function name").text;
      }
      expect(Tok::LParen, "'('");
      std::vector<ExprPtr> args;
      if (peek().kind != Tok::RParen) {
        args.push_back(expr());
        while (accept(Tok::Comma)) args.push_back(expr());
      }
      expect(Tok::RParen, "')'");
      return Cmd::call(x, app, fun, std::move(args), span);
    }
    return Cmd::assign(x, expr(), span);
  }

  ExprPtr expr() {
    ExprPtr lhs = additive();
    while (peek().kind == Tok::EqEq || peek().kind == Tok::Less) {
      const Token& op = next();
      lhs = Expr::bin(op.kind == Tok::EqEq ? BinOp::Eq : BinOp::Lt, lhs, additive(), op.span);
    }
    return lhs;
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& op = next();
      lhs = Expr::bin(op.kind == Tok::Plus ? BinOp::Add : BinOp::Sub, lhs, multiplicative(),
                      op.span);
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = atom();
    while (peek().kind == Tok::Star) {
      const Token& op = next();
      lhs = Expr::bin(BinOp::Mul, lhs, atom(), op.span);
    }
    return lhs;
  }

  ExprPtr atom() {
    SourceSpan span = peek().span;
    if (peek().kind == Tok::Int || (peek().kind == Tok::Minus && peek(1).kind == Tok::Int)) {
      return Expr::lit(integer(), span);
    }
    if (accept(Tok::LParen)) {
      ExprPtr e = expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    return Expr::var(ident("expression").text, span);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  System* sys_ = nullptr;
};

void check_names(const System& sys) {
  std::vector<Diagnostic> diags;
  std::set<std::string> apps;
  for (const auto& a : sys.apps) {
    if (!apps.insert(a.name).second) {
      diags.push_back({DiagnosticKind::DuplicateName, a.span, "app '" + a.name + "' declared twice"});
    }
  }
  std::set<std::string> consts;
  for (const auto& c : sys.constants) {
    if (!consts.insert(c.name).second) {
      diags.push_back(
          {DiagnosticKind::DuplicateName, c.span, "constant '" + c.name + "' declared twice"});
    }
  }
  std::set<std::string> funs;
  for (const auto& f : sys.functions) {
    if (!funs.insert(f.qualified()).second) {
      diags.push_back({DiagnosticKind::DuplicateName, f.span,
                       "function '" + f.qualified() + "' declared twice"});
    }
  }
  std::function<void(const Cmd&, const FunDecl&)> walk = [&](const Cmd& c, const FunDecl& f) {
    if (c.kind == Cmd::Kind::Call) {
      if (!c.callee_app.empty() && !apps.count(c.callee_app)) {
        diags.push_back(
            {DiagnosticKind::UnknownReference, c.span, "unknown app '" + c.callee_app + "'"});
      } else if (!funs.count(sys.resolve_callee(f.app, c))) {
        diags.push_back({DiagnosticKind::UnknownReference, c.span,
                         "unknown function '" + sys.resolve_callee(f.app, c) + "'"});
      }
    }
    if (c.first) walk(*c.first, f);
    if (c.second) walk(*c.second, f);
  };
  for (const auto& f : sys.functions) walk(*f.body, f);
  if (!diags.empty()) throw InputError(std::move(diags));
}

}  // namespace

System parse_system(std::string_view text) {
  Parser parser(lex(text));
  System sys = parser.system();
  check_names(sys);
  return sys;
}

BaseType parse_base_type(std::string_view text, const Lattice& lat,
                         const PermissionUniverse& universe) {
  Parser parser(lex(text));
  return parser.type_only(lat, universe);
}

}  // namespace permflow
