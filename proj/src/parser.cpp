#include "anisogup/parser.hpp"

#include <cctype>
#include <set>

namespace anisogup {

namespace {

const std::set<std::string> kKeywords = {"model", "dim",  "tensor",     "rank",
                                         "symmetric", "order", "radial", "scalaratom",
                                         "ansatz",    "power", "poly",   "explicit"};
const std::set<std::string> kReservedNames = {"p",  "delta", "q",   "hbar", "im",
                                              "dim", "f",     "g",  "h"};

struct Token {
  enum class Kind { Ident, Int, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1, col = 1;
  std::size_t offset = 0;  // start position in the source
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
        continue;
      }
      break;
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      tok_.kind = Token::Kind::Ident;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        tok_.text += src_[pos_++];
        ++col_;
      }
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      tok_.kind = Token::Kind::Int;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        tok_.text += src_[pos_++];
        ++col_;
      }
      return;
    }
    if (c == '"') {
      tok_.kind = Token::Kind::String;
      ++pos_;
      ++col_;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        tok_.text += src_[pos_++];
        ++col_;
      }
      if (pos_ >= src_.size()) throw ParseError("unterminated string", tok_.line, tok_.col);
      ++pos_;
      ++col_;
      return;
    }
    tok_.kind = Token::Kind::Punct;
    tok_.text = std::string(1, c);
    ++pos_;
    ++col_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

// Expression parser producing raw monomials; canonicalization (and hence the
// Einstein index validation) happens once the full expression is assembled.
class ExprParser {
 public:
  ExprParser(Lexer& lex, const TablePtr& table) : lex_(lex), table_(table) {}

  TensorExpr parse() {
    auto ms = parse_sum();
    try {
      return canonicalize(TensorExpr::from_monomials(table_, std::move(ms)));
    } catch (const AlgebraError& e) {
      throw ParseError(e.what(), lex_.peek().line, lex_.peek().col);
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, lex_.peek().line, lex_.peek().col);
  }

  [[noreturn]] void fail_at(const Token& t, const std::string& msg) {
    throw ParseError(msg, t.line, t.col);
  }

  bool peek_punct(const std::string& p) {
    return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
  }

  void expect_punct(const std::string& p) {
    if (!peek_punct(p)) fail("expected '" + p + "'");
    lex_.next();
  }

  std::vector<Monomial> parse_sum() {
    std::vector<Monomial> out;
    bool neg = false;
    if (peek_punct("-")) {
      neg = true;
      lex_.next();
    } else if (peek_punct("+")) {
      lex_.next();
    }
    auto first = parse_term();
    for (auto& m : first) {
      if (neg) m.coeff = -m.coeff;
      out.push_back(std::move(m));
    }
    while (peek_punct("+") || peek_punct("-")) {
      bool minus = lex_.next().text == "-";
      auto t = parse_term();
      for (auto& m : t) {
        if (minus) m.coeff = -m.coeff;
        out.push_back(std::move(m));
      }
    }
    return out;
  }

  static std::vector<Monomial> cross(const std::vector<Monomial>& a,
                                     const std::vector<Monomial>& b) {
    std::vector<Monomial> out;
    for (const auto& x : a)
      for (const auto& y : b) {
        Monomial m = x;
        m.coeff *= y.coeff;
        m.hbar += y.hbar;
        m.ipow += y.ipow;
        m.dim_pow += y.dim_pow;
        m.factors.insert(m.factors.end(), y.factors.begin(), y.factors.end());
        for (const auto& [s, k] : y.denom) m.denom[s] += k;
        out.push_back(std::move(m));
      }
    return out;
  }

  std::vector<Monomial> parse_term() {
    std::vector<Monomial> acc = {Monomial{}};
    acc[0].coeff = 1;
    acc = cross(acc, parse_factor());
    while (peek_punct("*") || peek_punct("/")) {
      bool division = lex_.next().text == "/";
      if (division) {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Int) {
          Rational d(Integer(lex_.next().text));
          if (d == 0) fail("division by zero");
          for (auto& m : acc) m.coeff /= d;
        } else if (t.kind == Token::Kind::Ident) {
          std::string atom = lex_.next().text;
          if (!table_->atom(atom)) fail("'" + atom + "' is not a registered scalar atom");
          int power = 1;
          if (peek_punct("^")) {
            lex_.next();
            if (lex_.peek().kind != Token::Kind::Int) fail("expected integer power");
            power = std::stoi(lex_.next().text);
            if (power <= 0) fail("denominator power must be positive");
          }
          for (auto& m : acc) m.denom[atom] += power;
        } else {
          fail("expected integer or scalar atom after '/'");
        }
      } else {
        acc = cross(acc, parse_factor());
      }
    }
    return acc;
  }

  // Labels appearing exactly twice within one monomial are local dummies;
  // power copies freshen them so (x)^2 means two independent contractions.
  std::vector<Monomial> freshen_local(const std::vector<Monomial>& ms) {
    std::vector<Monomial> out;
    for (const auto& m : ms) {
      std::map<std::string, int> cnt;
      for (const auto& f : m.factors)
        for (const auto& l : f.idx) ++cnt[l];
      Monomial c = m;
      std::map<std::string, std::string> ren;
      for (auto& f : c.factors)
        for (auto& l : f.idx) {
          if (cnt[l] != 2) continue;
          auto it = ren.find(l);
          if (it == ren.end()) it = ren.emplace(l, "$u" + std::to_string(fresh_++)).first;
          l = it->second;
        }
      out.push_back(std::move(c));
    }
    return out;
  }

  std::vector<Monomial> apply_power(std::vector<Monomial> base, int n) {
    if (n <= 0) fail("power must be a positive integer");
    std::vector<Monomial> acc = base;
    for (int k = 2; k <= n; ++k) acc = cross(acc, freshen_local(base));
    return acc;
  }

  int parse_exponent() {
    lex_.next();  // '^'
    if (lex_.peek().kind != Token::Kind::Int) fail("expected integer power");
    return std::stoi(lex_.next().text);
  }

  std::vector<Monomial> parse_factor() {
    const Token t = lex_.peek();
    if (t.kind == Token::Kind::Int) {
      lex_.next();
      Monomial m;
      m.coeff = Rational(Integer(t.text));
      // rational powers of integers are just integers again
      if (peek_punct("^")) m.coeff = pow_rational(m.coeff, parse_exponent());
      return {m};
    }
    if (peek_punct("(")) {
      lex_.next();
      auto inner = parse_sum();
      expect_punct(")");
      if (peek_punct("^")) return apply_power(freshen_none(inner), parse_exponent());
      return inner;
    }
    if (t.kind != Token::Kind::Ident) fail("expected a factor");
    lex_.next();
    const std::string& name = t.text;
    if (name == "hbar") {
      Monomial m;
      m.hbar = 1;
      if (peek_punct("^")) m.hbar = parse_exponent();
      return {m};
    }
    if (name == "im") {
      Monomial m;
      m.ipow = 1;
      return {m};
    }
    if (name == "dim") {
      Monomial m;
      m.dim_pow = 1;
      if (peek_punct("^")) m.dim_pow = parse_exponent();
      return {m};
    }
    if (kKeywords.count(name)) fail_at(t, "unexpected keyword '" + name + "' in expression");

    std::vector<std::string> idx;
    if (peek_punct("[")) {
      lex_.next();
      while (true) {
        if (lex_.peek().kind != Token::Kind::Ident) fail("expected index name");
        std::string l = lex_.next().text;
        if (kKeywords.count(l)) fail("keyword used as index name");
        idx.push_back(l);
        if (peek_punct(",")) {
          lex_.next();
          continue;
        }
        break;
      }
      expect_punct("]");
    }

    Monomial m;
    if (const auto* info = table_->tensor(name)) {
      if (static_cast<int>(idx.size()) != info->rank)
        fail_at(t, "tensor '" + name + "' has rank " + std::to_string(info->rank) + ", got " +
                       std::to_string(idx.size()) + " indices");
      Factor f;
      f.sym = name;
      f.idx = idx;
      m.factors.push_back(std::move(f));
    } else if (table_->is_radial(name)) {
      if (!idx.empty()) fail("radial atom '" + name + "' carries no indices");
      Factor f;
      f.kind = Factor::Kind::Radial;
      f.sym = name;
      m.factors.push_back(std::move(f));
    } else if (const TensorExpr* atom = table_->atom(name)) {
      if (!idx.empty()) fail("scalar atom '" + name + "' carries no indices");
      std::vector<Monomial> inlined;
      for (const auto& am : atom->monomials()) {
        Monomial c = am;
        for (auto& f : c.factors)
          for (auto& l : f.idx)
            if (!l.empty() && l[0] == '$') l = "$i" + std::to_string(fresh_) + "_" + l.substr(1);
        inlined.push_back(std::move(c));
      }
      ++fresh_;
      if (peek_punct("^")) return apply_power(inlined, parse_exponent());
      return inlined;
    } else {
      // radial derivative levels are referenced as <family><level>
      std::string base = name;
      int level = 0, mult = 1;
      while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) {
        level += mult * (base.back() - '0');
        mult *= 10;
        base.pop_back();
      }
      if (!base.empty() && level > 0 && table_->is_radial(base)) {
        Factor f;
        f.kind = Factor::Kind::Radial;
        f.sym = base;
        f.level = level;
        m.factors.push_back(std::move(f));
      } else {
        fail_at(t, "undeclared symbol '" + name + "'");
      }
    }
    if (peek_punct("^")) {
      if (!idx.empty()) fail("powers of indexed factors are not allowed; repeat the factor");
      return apply_power({m}, parse_exponent());
    }
    return {m};
  }

  static std::vector<Monomial> freshen_none(std::vector<Monomial> ms) { return ms; }

  Lexer& lex_;
  TablePtr table_;
  int fresh_ = 0;
};

class ModelParser {
 public:
  explicit ModelParser(const std::string& text) : text_(text), lex_(text_) {}

  ModelSpec run() {
    expect_ident("model");
    if (lex_.peek().kind != Token::Kind::String) fail("expected quoted model name");
    spec_.name = lex_.next().text;
    expect_punct("{");
    table_ = SymbolTable::create();
    while (!peek_punct("}")) parse_decl();
    lex_.next();
    if (lex_.peek().kind != Token::Kind::End) fail("trailing input after model");
    if (!seen_f_) fail("model lacks an f declaration");
    return spec_;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, lex_.peek().line, lex_.peek().col);
  }

  bool peek_punct(const std::string& p) {
    return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
  }
  void expect_punct(const std::string& p) {
    if (!peek_punct(p)) fail("expected '" + p + "'");
    lex_.next();
  }
  void expect_ident(const std::string& k) {
    if (lex_.peek().kind != Token::Kind::Ident || lex_.peek().text != k)
      fail("expected '" + k + "'");
    lex_.next();
  }
  int expect_int() {
    if (lex_.peek().kind != Token::Kind::Int) fail("expected integer");
    return std::stoi(lex_.next().text);
  }
  std::string expect_name() {
    if (lex_.peek().kind != Token::Kind::Ident) fail("expected identifier");
    std::string n = lex_.next().text;
    if (kKeywords.count(n) || kReservedNames.count(n))
      fail("'" + n + "' is reserved and cannot be declared");
    return n;
  }

  // Captures the raw source slice of one expression alongside its parsed
  // form; ModelSpec keeps the slice so rendering round-trips verbatim.
  std::pair<TensorExpr, std::string> parse_expr_slice() {
    std::size_t start = lex_.peek().offset;
    ExprParser ep(lex_, table_);
    TensorExpr e = ep.parse();
    std::size_t end = lex_.peek().offset;
    std::string s = text_.substr(start, end > start ? end - start : 0);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    return {e, s};
  }

  void parse_decl() {
    if (lex_.peek().kind != Token::Kind::Ident) fail("expected a declaration");
    std::string head = lex_.next().text;
    if (head == "dim") {
      spec_.dim = expect_int();
      if (spec_.dim <= 0) fail("dim must be positive");
    } else if (head == "tensor") {
      TensorDecl d;
      d.name = expect_name();
      expect_ident("rank");
      d.rank = expect_int();
      if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "symmetric") {
        lex_.next();
        d.symmetric = true;
      }
      d.grading = 1;
      if (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "order") {
        lex_.next();
        d.grading = expect_int();
      }
      table_->declare_tensor(d.name, d.rank, d.symmetric, d.grading);
      spec_.tensors.push_back(std::move(d));
    } else if (head == "radial") {
      std::string n = expect_name();
      table_->declare_radial(n);
      spec_.radials.push_back(n);
    } else if (head == "scalaratom") {
      std::string n = expect_name();
      expect_punct("=");
      auto [e, src] = parse_expr_slice();
      try {
        table_->register_atom(n, e);
      } catch (const AlgebraError& err) {
        fail(err.what());
      }
      spec_.atoms.emplace_back(n, src);
    } else if (head == "f") {
      expect_punct("=");
      auto [e, src] = parse_expr_slice();
      if (!e.free_indices().empty()) fail("f must have no free index");
      spec_.f_src = src;
      seen_f_ = true;
    } else if (head == "g" || head == "h") {
      expect_punct("[");
      if (lex_.peek().kind != Token::Kind::Ident) fail("expected index name");
      std::string idx = lex_.next().text;
      expect_punct("]");
      expect_punct("=");
      auto [e, src] = parse_expr_slice();
      if (!(e.free_indices() == std::set<std::string>{idx}) && !e.empty())
        fail(head + "[" + idx + "] must have exactly the free index '" + idx + "'");
      if (head == "g") {
        spec_.g_idx = idx;
        spec_.g_src = src;
      } else {
        spec_.h_idx = idx;
        spec_.h_src = src;
      }
    } else if (head == "ansatz") {
      AnsatzDecl a;
      if (lex_.peek().kind != Token::Kind::String) fail("expected quoted ansatz name");
      a.name = lex_.next().text;
      if (lex_.peek().kind != Token::Kind::Ident) fail("expected ansatz kind");
      std::string kind = lex_.next().text;
      if (kind == "power") {
        a.kind = AnsatzDecl::Kind::PowerFamily;
        while (lex_.peek().kind == Token::Kind::Ident && !kKeywords.count(lex_.peek().text) &&
               lex_.peek().text != "f" && lex_.peek().text != "g" && lex_.peek().text != "h") {
          std::string atom = lex_.next().text;
          if (!table_->atom(atom)) fail("'" + atom + "' is not a registered scalar atom");
          a.atoms.push_back(atom);
        }
        if (a.atoms.empty()) fail("power ansatz needs at least one atom");
      } else if (kind == "poly") {
        a.kind = AnsatzDecl::Kind::GradedPoly;
        a.order = expect_int();
        expect_punct(":");
        while (true) {
          auto [e, src] = parse_expr_slice();
          if (!e.free_indices().empty()) fail("poly basis monomials must be index-free");
          a.basis_src.push_back(src);
          if (peek_punct(",")) {
            lex_.next();
            continue;
          }
          break;
        }
      } else if (kind == "explicit") {
        a.kind = AnsatzDecl::Kind::ExplicitL;
        expect_punct("[");
        if (lex_.peek().kind != Token::Kind::Ident) fail("expected index name");
        a.explicit_idx = lex_.next().text;
        expect_punct("]");
        expect_punct(":");
        auto [e, src] = parse_expr_slice();
        if (!(e.free_indices() == std::set<std::string>{a.explicit_idx}))
          fail("explicit L must have exactly the free index '" + a.explicit_idx + "'");
        a.explicit_src = src;
      } else {
        fail("unknown ansatz kind '" + kind + "'");
      }
      spec_.ansatze.push_back(std::move(a));
    } else {
      fail("unknown declaration '" + head + "'");
    }
  }

  std::string text_;
  Lexer lex_;
  std::shared_ptr<SymbolTable> table_;
  ModelSpec spec_;
  bool seen_f_ = false;
};

}  // namespace

TensorExpr parse_expr(const TablePtr& table, const std::string& text) {
  Lexer lex(text);
  ExprParser p(lex, table);
  TensorExpr e = p.parse();
  if (lex.peek().kind != Token::Kind::End)
    throw ParseError("trailing input after expression", lex.peek().line, lex.peek().col);
  return e;
}

ModelSpec parse_model(const std::string& text) {
  ModelParser p(text);
  return p.run();
}

}  // namespace anisogup
