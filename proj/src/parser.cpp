#include "kahler/parser.hpp"

#include <algorithm>
#include <cctype>

#include "kahler/commutation.hpp"
#include "kahler/error.hpp"

namespace kahler {

namespace {

enum class Tok { Number, Ident, Deriv, LParen, RParen, Comma, Plus, Minus, Star, Slash, Caret, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char ch = static_cast<unsigned char>(s[i]);
    if (std::isspace(ch)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(ch)) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isalpha(ch)) {
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
      std::string id(s.substr(start, i - start));
      if (id == "D" && i < s.size() && s[i] == '_') {
        ++i;
        if (i >= s.size() || !std::isalpha(static_cast<unsigned char>(s[i])))
          throw ParseError(i, {"index letter"}, "expected an index letter after D_");
        out.push_back({Tok::Deriv, std::string(1, s[i]), start});
        ++i;
        continue;
      }
      out.push_back({Tok::Ident, id, start});
      continue;
    }
    if (s.substr(i, 3) == "\xE2\x88\x92") {
      out.push_back({Tok::Minus, "-", start});
      i += 3;
      continue;
    }
    Tok k;
    switch (ch) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      default:
        throw ParseError(i, {"term", "operator"}, "unexpected character '" + std::string(1, s[i]) + "'");
    }
    out.push_back({k, std::string(1, s[i]), start});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

int letter_label(char ch) {
  return std::islower(static_cast<unsigned char>(ch)) ? ch - 'a' + 1 : ch - 'A' + 27;
}

struct Node {
  std::vector<RawTerm> terms;
  std::vector<char> free;
  std::map<char, int> occ;
};

bool contains(const std::vector<char>& v, char c) { return std::find(v.begin(), v.end(), c) != v.end(); }

class Parser {
 public:
  Parser(std::string_view text, const Env& env) : toks_(lex(text)), env_(env) {}

  Node parse() {
    Node n = expression();
    expect(Tok::End, "end of input");
    return n;
  }

  const std::map<char, std::size_t>& first_seen() const { return first_seen_; }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& msg) const {
    throw ParseError(peek().pos, std::move(expected), msg + " at position " + std::to_string(peek().pos));
  }

  const Token& expect(Tok k, const std::string& what) {
    if (peek().kind != k) fail({what}, "expected " + what);
    return next();
  }

  void rename(std::vector<RawTerm>& terms, int from) {
    int to = gen_();
    for (auto& t : terms) relabel(t, from, to);
  }

  Node expression() {
    int sign = 1;
    if (peek().kind == Tok::Plus || peek().kind == Tok::Minus) sign = next().kind == Tok::Minus ? -1 : 1;
    std::size_t pos = peek().pos;
    Node acc = term();
    if (sign < 0) for (auto& t : acc.terms) t.coeff = -t.coeff;
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      int s = next().kind == Tok::Minus ? -1 : 1;
      pos = peek().pos;
      Node rhs = term();
      std::vector<char> a = acc.free, b = rhs.free;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b)
        throw ParseError(pos, {}, "rank mismatch across summands: free indices {" + std::string(a.begin(), a.end()) +
                                      "} vs {" + std::string(b.begin(), b.end()) + "}");
      for (auto& t : rhs.terms) {
        if (s < 0) t.coeff = -t.coeff;
        acc.terms.push_back(std::move(t));
      }
      for (auto [ch, n] : rhs.occ) acc.occ[ch] = std::max(acc.occ[ch], n);
    }
    return acc;
  }

  Node term() {
    Node acc = factor();
    while (true) {
      if (peek().kind == Tok::Star) {
        next();
        std::size_t pos = peek().pos;
        acc = multiply(std::move(acc), factor(), pos);
      } else if (peek().kind == Tok::Slash) {
        next();
        const Token& d = expect(Tok::Number, "integer divisor");
        Rational q(d.text);
        if (q == 0) throw ParseError(d.pos, {}, "division by zero");
        for (auto& t : acc.terms) t.coeff = t.coeff.divided(q);
      } else {
        return acc;
      }
    }
  }

  Node multiply(Node a, Node b, std::size_t pos) {
    Node out;
    out.occ = a.occ;
    for (auto [ch, n] : b.occ) {
      out.occ[ch] += n;
      if (out.occ[ch] > 2)
        throw ParseError(pos, {}, std::string("index '") + ch + "' appears more than twice in a product");
    }
    for (const auto& x : a.terms)
      for (const auto& y : b.terms) out.terms.push_back(product(x, y));
    for (char ch : a.free) {
      if (contains(b.free, ch)) rename(out.terms, letter_label(ch));
      else out.free.push_back(ch);
    }
    for (char ch : b.free)
      if (!contains(a.free, ch)) out.free.push_back(ch);
    return out;
  }

  char index_letter() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || t.text.size() != 1) fail({"index letter"}, "expected a single-letter index");
    next();
    first_seen_.emplace(t.text[0], t.pos);
    return t.text[0];
  }

  Node factor() {
    Node base = primary();
    if (peek().kind != Tok::Caret) return base;
    const std::size_t pos = next().pos;
    Poly v;
    for (const auto& t : base.terms) {
      if (!t.factors.empty()) throw ParseError(pos, {}, "only scalars can be raised to a power");
      v += t.coeff;
    }
    const Token& e = expect(Tok::Number, "integer exponent");
    Node n;
    n.terms.push_back(RawTerm{v.pow(static_cast<unsigned>(std::stoul(e.text))), {}});
    return n;
  }

  Node primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        next();
        Node n;
        n.terms.push_back(RawTerm{Poly(Rational(t.text)), {}});
        return n;
      }
      case Tok::LParen: {
        next();
        Node n = expression();
        expect(Tok::RParen, "')'");
        return n;
      }
      case Tok::Deriv: {
        next();
        char x = t.text[0];
        first_seen_.emplace(x, t.pos + 2);
        Node inner = factor();
        return differentiate(std::move(inner), x, t.pos);
      }
      case Tok::Ident: {
        next();
        if (peek().kind == Tok::LParen) return call(t);
        return scalar(t);
      }
      default:
        fail({"number", "identifier", "D_x(", "("}, "expected a factor");
    }
  }

  Node differentiate(Node inner, char x, std::size_t pos) {
    if (++inner.occ[x] > 2) throw ParseError(pos, {}, std::string("index '") + x + "' appears more than twice");
    const int lab = letter_label(x);
    Node out;
    out.occ = inner.occ;
    for (const auto& t : inner.terms)
      for (auto& d : derivative(t, lab)) out.terms.push_back(std::move(d));
    if (contains(inner.free, x)) {
      rename(out.terms, lab);
      for (char ch : inner.free)
        if (ch != x) out.free.push_back(ch);
    } else {
      out.free.push_back(x);
      out.free.insert(out.free.end(), inner.free.begin(), inner.free.end());
    }
    return out;
  }

  Node scalar(const Token& t) {
    Poly v;
    if (t.text == "m") v = Poly::var(Var::m);
    else if (t.text == "c") v = Poly::var(Var::c);
    else if (t.text == "p") v = Poly::var(Var::p);
    else if (t.text == "u") v = Poly::var(Var::u);
    else if (auto it = env_.scalars.find(t.text); it != env_.scalars.end()) v = it->second;
    else throw ParseError(t.pos, {"scalar name"}, "unknown scalar '" + t.text + "'");
    Node n;
    n.terms.push_back(RawTerm{v, {}});
    return n;
  }

  Node call(const Token& name) {
    expect(Tok::LParen, "'('");
    std::vector<char> args{index_letter()};
    while (peek().kind == Tok::Comma) {
      next();
      args.push_back(index_letter());
    }
    expect(Tok::RParen, "')'");

    int arity = -1;
    RawKind kind = RawKind::H;
    const TensorExpr* user = nullptr;
    if (name.text == "g") { arity = 2; kind = RawKind::Metric; }
    else if (name.text == "J") { arity = 2; kind = RawKind::Complex; }
    else if (name.text == "R") { arity = 4; kind = RawKind::Curv; }
    else if (name.text == "h") { arity = 2; kind = RawKind::H; }
    else if (name.text == "w") { arity = 1; kind = RawKind::Omega; }
    else if (auto it = env_.tensors.find(name.text); it != env_.tensors.end()) {
      user = &it->second;
      arity = user->rank();
    } else {
      throw ParseError(name.pos, {"tensor name"}, "unknown tensor '" + name.text + "'");
    }
    if (static_cast<int>(args.size()) != arity)
      throw ParseError(name.pos, {}, "arity error: '" + name.text + "' takes " + std::to_string(arity) +
                                         " indices, got " + std::to_string(args.size()));

    Node n;
    for (char ch : args) {
      if (++n.occ[ch] > 2) throw ParseError(name.pos, {}, std::string("index '") + ch + "' appears more than twice");
    }
    std::vector<int> temp(args.size());
    for (auto& x : temp) x = gen_();
    if (user) {
      n.terms = user->to_raw(temp, gen_).terms;
    } else {
      RawFactor f{kind, 0, true, temp};
      n.terms.push_back(RawTerm{Poly(1L), {f}});
    }
    for (std::size_t a = 0; a < args.size(); ++a) {
      bool earlier = false;
      for (std::size_t b = 0; b < a; ++b) earlier |= args[b] == args[a];
      if (earlier) continue;
      if (n.occ[args[a]] == 2) {
        std::size_t b = a + 1;
        while (args[b] != args[a]) ++b;
        int d = gen_();
        for (auto& t : n.terms) {
          relabel(t, temp[a], d);
          relabel(t, temp[b], d);
        }
      } else {
        for (auto& t : n.terms) relabel(t, temp[a], letter_label(args[a]));
        n.free.push_back(args[a]);
      }
    }
    return n;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const Env& env_;
  LabelGen gen_{1000};
  std::map<char, std::size_t> first_seen_;
};

TensorExpr build(const Node& n, const std::vector<char>& order, bool jinv) {
  RawExpr raw;
  for (char ch : order) raw.free.push_back(letter_label(ch));
  raw.terms = n.terms;
  return TensorExpr::from_raw(raw, jinv);
}

}  // namespace

TensorExpr parse_expr(std::string_view text, const Env& env, bool h_j_invariant) {
  Parser p(text, env);
  Node n = p.parse();
  std::vector<char> order = n.free;
  const auto& seen = p.first_seen();
  std::sort(order.begin(), order.end(), [&](char a, char b) { return seen.at(a) < seen.at(b); });
  return build(n, order, h_j_invariant);
}

TensorExpr parse_expr(std::string_view text, std::string_view free_order, const Env& env, bool h_j_invariant) {
  Parser p(text, env);
  Node n = p.parse();
  std::vector<char> order(free_order.begin(), free_order.end());
  std::vector<char> a = order, b = n.free;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b)
    throw RankError("free index order '" + std::string(free_order) + "' does not match free indices {" +
                    std::string(b.begin(), b.end()) + "}");
  return build(n, order, h_j_invariant);
}

}  // namespace kahler
