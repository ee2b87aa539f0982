#include "topothermo/dsl.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "topothermo/errors.hpp"

namespace topothermo::dsl {

namespace {

enum class Tok { number, ident, lbracket, rbracket, lparen, rparen, plus, minus, star, slash, caret, end };

struct Token {
  Tok kind;
  std::string_view text;
  int line;
  int column;
};

constexpr std::array<std::pair<std::string_view, Function>, 5> kFunctions{{
    {"sin", Function::sin},
    {"cos", Function::cos},
    {"exp", Function::exp},
    {"log", Function::log},
    {"sqrt", Function::sqrt},
}};

std::optional<Function> function_named(std::string_view name) {
  for (const auto& [n, f] : kFunctions)
    if (n == name) return f;
  return std::nullopt;
}

std::string_view function_name(Function fn) {
  for (const auto& [n, f] : kFunctions)
    if (f == fn) return n;
  return "?";
}

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      const int line = line_, col = col_;
      if (pos_ >= src_.size()) {
        out.push_back({Tok::end, {}, line, col});
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back({Tok::number, lex_number(), line, col});
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        out.push_back({Tok::ident, src_.substr(start, pos_ - start), line, col});
        continue;
      }
      Tok kind;
      switch (c) {
        case '[': kind = Tok::lbracket; break;
        case ']': kind = Tok::rbracket; break;
        case '(': kind = Tok::lparen; break;
        case ')': kind = Tok::rparen; break;
        case '+': kind = Tok::plus; break;
        case '-': kind = Tok::minus; break;
        case '*': kind = Tok::star; break;
        case '/': kind = Tok::slash; break;
        case '^': kind = Tok::caret; break;
        default:
          throw ParseError(Errc::syntax_error, std::string("unexpected character '") + c + "'", line, col);
      }
      out.push_back({kind, src_.substr(pos_, 1), line, col});
      advance();
    }
  }

private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  std::string_view lex_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        while (pos_ < look) advance();
        digits();
      }
    }
    return src_.substr(start, pos_ - start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

class Parser {
public:
  Parser(std::string_view source, std::size_t dimension, const ParameterSet& params)
      : toks_(Lexer(source).run()), dim_(dimension), params_(params) {}

  ExprPtr run() {
    ExprPtr e = expr();
    if (peek().kind != Tok::end) fail(peek(), "unexpected trailing input");
    return e;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg, Errc code = Errc::syntax_error) {
    throw ParseError(code, msg, t.line, t.column);
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
    return take();
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const BinaryOp op = take().kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
      lhs = make(Binary{op, lhs, term()});
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      const BinaryOp op = take().kind == Tok::star ? BinaryOp::mul : BinaryOp::div;
      lhs = make(Binary{op, lhs, unary()});
    }
    return lhs;
  }

  ExprPtr unary() {
    if (peek().kind == Tok::minus) {
      take();
      return make(Negate{unary()});
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (peek().kind != Tok::caret) return base;
    take();
    bool negative = false;
    if (peek().kind == Tok::minus) {
      take();
      negative = true;
    }
    const Token& t = expect(Tok::number, "integer exponent");
    long value = parse_integer(t);
    if (value > 1024) fail(t, "exponent too large");
    return make(Power{base, static_cast<int>(negative ? -value : value)});
  }

  static long parse_integer(const Token& t) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail(t, "expected an integer");
    return value;
  }

  ExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number: {
        take();
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || !std::isfinite(value))
          fail(t, "malformed number '" + std::string(t.text) + "'");
        return make(Number{value});
      }
      case Tok::lparen: {
        take();
        ExprPtr e = expr();
        expect(Tok::rparen, "')'");
        return e;
      }
      case Tok::ident: return identifier();
      default: fail(t, t.kind == Tok::end ? "unexpected end of input" : "unexpected '" + std::string(t.text) + "'");
    }
  }

  ExprPtr identifier() {
    const Token& t = take();
    if (t.text == "q") return coordinate(t);
    if (t.text == "sum_i") return site_sum(t);
    if (auto fn = function_named(t.text)) {
      expect(Tok::lparen, "'(' after function name");
      ExprPtr arg = expr();
      expect(Tok::rparen, "')'");
      return make(Call{*fn, arg});
    }
    if (t.text == "pi") return make(Number{std::numbers::pi});
    if (t.text == "i") fail(t, "site index 'i' is only valid inside q[...]");
    if (params_.find(t.text) == params_.end())
      fail(t, "unknown identifier '" + std::string(t.text) + "'", Errc::unknown_identifier);
    return make(Parameter{std::string(t.text)});
  }

  ExprPtr coordinate(const Token& q) {
    expect(Tok::lbracket, "'[' after q");
    Coordinate c{false, 0};
    if (peek().kind == Tok::ident && peek().text == "i") {
      const Token& it = take();
      if (!sum_) fail(it, "site index 'i' used outside sum_i");
      c.site_relative = true;
      if (peek().kind == Tok::plus || peek().kind == Tok::minus) {
        const bool minus = take().kind == Tok::minus;
        const long k = parse_integer(expect(Tok::number, "integer offset"));
        c.offset = minus ? -k : k;
      }
      sum_->min_offset = std::min(sum_->min_offset, c.offset);
      sum_->max_offset = std::max(sum_->max_offset, c.offset);
    } else {
      c.offset = parse_integer(expect(Tok::number, "coordinate index"));
      if (c.offset < 0 || static_cast<std::size_t>(c.offset) >= dim_)
        fail(q, "coordinate index " + std::to_string(c.offset) + " out of range [0, " + std::to_string(dim_) + ")",
             Errc::index_error);
    }
    expect(Tok::rbracket, "']'");
    return make(c);
  }

  ExprPtr site_sum(const Token& t) {
    if (sum_) fail(t, "nested sum_i is not supported");
    SiteSum s{Boundary::periodic, nullptr};
    if (peek().kind == Tok::lbracket) {
      take();
      const Token& flag = expect(Tok::ident, "boundary flag");
      if (flag.text == "periodic")
        s.boundary = Boundary::periodic;
      else if (flag.text == "open")
        s.boundary = Boundary::open;
      else
        fail(flag, "boundary flag must be 'periodic' or 'open'");
      expect(Tok::rbracket, "']'");
    }
    expect(Tok::lparen, "'(' after sum_i");
    sum_ = &s;
    ExprPtr body = expr();
    sum_ = nullptr;
    expect(Tok::rparen, "')'");
    s.body = body;
    return make(s);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t dim_;
  const ParameterSet& params_;
  SiteSum* sum_ = nullptr;
};

// Binding strength used by the serializer.
enum Prec { kAdd = 1, kMul = 2, kUnary = 3, kPow = 4, kAtom = 5 };

int precedence(const Expr& e) {
  return std::visit(
      [](const auto& n) -> int {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Binary>)
          return (n.op == BinaryOp::add || n.op == BinaryOp::sub) ? kAdd : kMul;
        else if constexpr (std::is_same_v<N, Negate>)
          return kUnary;
        else if constexpr (std::is_same_v<N, Power>)
          return kPow;
        else
          return kAtom;
      },
      e.node);
}

void write(const Expr& e, std::string& out);

void write_at(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    write(e, out);
    out += ')';
  } else {
    write(e, out);
  }
}

void write_number(double v, std::string& out) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string_view text(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
  out += text;
}

void write(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Number>) {
          write_number(n.value, out);
        } else if constexpr (std::is_same_v<N, Coordinate>) {
          out += "q[";
          if (n.site_relative) {
            out += 'i';
            if (n.offset > 0) out += "+" + std::to_string(n.offset);
            if (n.offset < 0) out += std::to_string(n.offset);
          } else {
            out += std::to_string(n.offset);
          }
          out += ']';
        } else if constexpr (std::is_same_v<N, Parameter>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, Negate>) {
          out += '-';
          write_at(*n.operand, kUnary, out);
        } else if constexpr (std::is_same_v<N, Binary>) {
          const int p = precedence(e);
          write_at(*n.lhs, p, out);
          constexpr std::array<char, 4> sym{'+', '-', '*', '/'};
          out += sym[static_cast<std::size_t>(n.op)];
          write_at(*n.rhs, p + 1, out);
        } else if constexpr (std::is_same_v<N, Power>) {
          write_at(*n.base, kAtom, out);
          out += '^';
          out += std::to_string(n.exponent);
        } else if constexpr (std::is_same_v<N, Call>) {
          out += function_name(n.fn);
          out += '(';
          write(*n.arg, out);
          out += ')';
        } else if constexpr (std::is_same_v<N, SiteSum>) {
          out += n.boundary == Boundary::open ? "sum_i[open](" : "sum_i(";
          write(*n.body, out);
          out += ')';
        }
      },
      e.node);
}

template <class T>
class Evaluator {
public:
  Evaluator(std::span<const T> q, const ParameterSet& params) : q_(q), params_(params) {}

  T eval(const Expr& e) const {
    return std::visit([&](const auto& n) -> T { return eval_node(n); }, e.node);
  }

private:
  T eval_node(const Number& n) const { return T(n.value); }

  T eval_node(const Coordinate& c) const {
    if (!c.site_relative) return q_[static_cast<std::size_t>(c.offset)];
    const long n = static_cast<long>(q_.size());
    const long idx = ((site_ + c.offset) % n + n) % n;
    return q_[static_cast<std::size_t>(idx)];
  }

  T eval_node(const Parameter& p) const {
    const auto it = params_.find(p.name);
    if (it == params_.end()) throw Error(Errc::unknown_identifier, "unbound parameter '" + p.name + "'");
    return T(it->second);
  }

  T eval_node(const Negate& n) const { return -eval(*n.operand); }

  T eval_node(const Binary& b) const {
    const T l = eval(*b.lhs);
    const T r = eval(*b.rhs);
    switch (b.op) {
      case BinaryOp::add: return l + r;
      case BinaryOp::sub: return l - r;
      case BinaryOp::mul: return l * r;
      case BinaryOp::div: return l / r;
    }
    return l;
  }

  T eval_node(const Power& p) const { return ipow(eval(*p.base), p.exponent); }

  T eval_node(const Call& c) const {
    using std::cos, std::exp, std::log, std::sin, std::sqrt;
    const T x = eval(*c.arg);
    switch (c.fn) {
      case Function::sin: return sin(x);
      case Function::cos: return cos(x);
      case Function::exp: return exp(x);
      case Function::log: return log(x);
      case Function::sqrt: return sqrt(x);
    }
    return x;
  }

  T eval_node(const SiteSum& s) const {
    const long n = static_cast<long>(q_.size());
    long first = 0, last = n;  // [first, last)
    if (s.boundary == Boundary::open) {
      first = std::max(0L, -s.min_offset);
      last = std::min(n, n - s.max_offset);
    }
    T total(0.0);
    for (long i = first; i < last; ++i) {
      site_ = i;
      total = total + eval(*s.body);
    }
    return total;
  }

  std::span<const T> q_;
  const ParameterSet& params_;
  mutable long site_ = 0;
};

std::size_t count_sums(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::size_t {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Negate>)
          return count_sums(*n.operand);
        else if constexpr (std::is_same_v<N, Binary>)
          return count_sums(*n.lhs) + count_sums(*n.rhs);
        else if constexpr (std::is_same_v<N, Power>)
          return count_sums(*n.base);
        else if constexpr (std::is_same_v<N, Call>)
          return count_sums(*n.arg);
        else if constexpr (std::is_same_v<N, SiteSum>)
          return 1 + count_sums(*n.body);
        else
          return 0;
      },
      e.node);
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const auto& y = std::get<N>(b.node);
        if constexpr (std::is_same_v<N, Number>)
          return x.value == y.value;
        else if constexpr (std::is_same_v<N, Coordinate>)
          return x.site_relative == y.site_relative && x.offset == y.offset;
        else if constexpr (std::is_same_v<N, Parameter>)
          return x.name == y.name;
        else if constexpr (std::is_same_v<N, Negate>)
          return *x.operand == *y.operand;
        else if constexpr (std::is_same_v<N, Binary>)
          return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
        else if constexpr (std::is_same_v<N, Power>)
          return x.exponent == y.exponent && *x.base == *y.base;
        else if constexpr (std::is_same_v<N, Call>)
          return x.fn == y.fn && *x.arg == *y.arg;
        else
          return x.boundary == y.boundary && *x.body == *y.body;
      },
      a.node);
}

std::size_t Ast::site_sum_count() const { return count_sums(*root_); }

Ast parse(std::string_view source, std::size_t dimension, const ParameterSet& parameters) {
  if (dimension == 0) throw ParseError(Errc::index_error, "dimension must be positive", 1, 1);
  return Ast(Parser(source, dimension, parameters).run(), dimension);
}

std::string serialize(const Ast& ast) {
  std::string out;
  write(ast.root(), out);
  return out;
}

template <class T>
T evaluate(const Ast& ast, std::span<const T> q, const ParameterSet& parameters) {
  return Evaluator<T>(q, parameters).eval(ast.root());
}

template double evaluate<double>(const Ast&, std::span<const double>, const ParameterSet&);
template Dual<double> evaluate<Dual<double>>(const Ast&, std::span<const Dual<double>>, const ParameterSet&);
template Dual<Dual<double>> evaluate<Dual<Dual<double>>>(const Ast&, std::span<const Dual<Dual<double>>>,
                                                         const ParameterSet&);

}  // namespace topothermo::dsl
