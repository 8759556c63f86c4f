#pragma once

#include "stlsynth/formula.hpp"
#include "stlsynth/numfmt.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace stlsynth {

struct AxisInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Axis-aligned box region named in specification text. Two axes for the
/// planar benchmarks; the representation carries any output dimension.
struct Region {
  std::string name;
  std::vector<AxisInterval> axes;

  bool contains(const Eigen::VectorXd& point) const {
    if (point.size() != static_cast<Eigen::Index>(axes.size())) return false;
    for (std::size_t i = 0; i < axes.size(); ++i)
      if (point[static_cast<Eigen::Index>(i)] < axes[i].lower ||
          point[static_cast<Eigen::Index>(i)] > axes[i].upper)
        return false;
    return true;
  }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Specification text plus the regions its identifiers refer to.
struct SpecSource {
  std::string text;
  std::map<std::string, Region> regions;
  int output_dim = 2;
};

namespace detail {

enum class TokKind {
  Ident,
  Number,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Amp,
  Pipe,
  Bang,
  Star,
  Plus,
  Minus,
  Le,
  Ge,
  End
};

struct Token {
  TokKind kind;
  std::string text;
  double value = 0.0;
  bool integral = false;
  int line = 1;
  int column = 1;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](TokKind kind, std::string text) {
    out.push_back(Token{kind, std::move(text), 0.0, false, line, col});
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const int tok_line = line, tok_col = col;
    auto emit = [&](TokKind kind, std::size_t len) {
      out.push_back(Token{kind, src.substr(i, len), 0.0, false, tok_line, tok_col});
      i += len;
      col += static_cast<int>(len);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      emit(TokKind::Ident, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool integral = true;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        integral = false;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        integral = false;
        ++j;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      Token tok{TokKind::Number, src.substr(i, j - i), 0.0, integral, tok_line, tok_col};
      const char* begin = tok.text.data();
      const char* end = begin + tok.text.size();
      auto [ptr, ec] = std::from_chars(begin, end, tok.value);
      if (ec != std::errc() || ptr != end)
        throw ParseError("malformed number '" + tok.text + "'", tok_line, tok_col);
      out.push_back(std::move(tok));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '(': emit(TokKind::LParen, 1); continue;
      case ')': emit(TokKind::RParen, 1); continue;
      case '[': emit(TokKind::LBracket, 1); continue;
      case ']': emit(TokKind::RBracket, 1); continue;
      case ',': emit(TokKind::Comma, 1); continue;
      case '&': emit(TokKind::Amp, 1); continue;
      case '|': emit(TokKind::Pipe, 1); continue;
      case '!': emit(TokKind::Bang, 1); continue;
      case '*': emit(TokKind::Star, 1); continue;
      case '+': emit(TokKind::Plus, 1); continue;
      case '-': emit(TokKind::Minus, 1); continue;
      case '<':
        if (i + 1 < src.size() && src[i + 1] == '=') {
          emit(TokKind::Le, 2);
          continue;
        }
        throw ParseError("expected '<='", tok_line, tok_col);
      case '>':
        if (i + 1 < src.size() && src[i + 1] == '=') {
          emit(TokKind::Ge, 2);
          continue;
        }
        throw ParseError("expected '>='", tok_line, tok_col);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", tok_line, tok_col);
    }
  }
  out.push_back(Token{TokKind::End, "", 0.0, false, line, col});
  return out;
}

inline std::string format_linear_atom(const Eigen::VectorXd& a, double b) {
  std::string out;
  bool first = true;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0 && a.size() > 1) continue;
    double c = a[i];
    if (first) {
      out += format_double(c) + "*y" + std::to_string(i + 1);
      first = false;
    } else {
      out += c < 0 ? " - " : " + ";
      out += format_double(std::abs(c)) + "*y" + std::to_string(i + 1);
    }
  }
  if (first) out = "0*y1";
  out += " <= " + format_double(b);
  return out;
}

enum class AtomKind { BoxIn, BoxOut, Linear };

/// An unexpanded atom; negation toggles BoxIn/BoxOut or flips the predicate.
struct Atom {
  AtomKind kind;
  Region region;      // BoxIn/BoxOut
  Predicate linear;   // Linear
};

struct Parsed {
  Formula formula;
  std::optional<Atom> atom;  // present when the subterm is a negatable atom
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::map<std::string, Region>& regions,
         int output_dim)
      : toks_(std::move(tokens)), regions_(regions), dim_(output_dim) {}

  Formula parse_phi() {
    Parsed result = parse_or();
    expect(TokKind::End, "end of input");
    return result.formula;
  }

  Predicate parse_single_linear_atom() {
    Predicate p = parse_linear();
    expect(TokKind::End, "end of input");
    return p;
  }

 private:
  const Token& peek(int ahead = 0) const {
    const std::size_t idx = std::min(pos_ + static_cast<std::size_t>(ahead),
                                     toks_.size() - 1);
    return toks_[idx];
  }
  const Token& advance() { return toks_[pos_++]; }
  bool check(TokKind kind) const { return peek().kind == kind; }
  bool accept(TokKind kind) {
    if (check(kind)) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(TokKind kind, const std::string& what) {
    if (!check(kind))
      throw ParseError("expected " + what + ", got '" + describe(peek()) + "'",
                       peek().line, peek().column);
    return advance();
  }
  static std::string describe(const Token& tok) {
    return tok.kind == TokKind::End ? "end of input" : tok.text;
  }

  Parsed parse_or() {
    Parsed first = parse_and();
    if (!check(TokKind::Pipe)) return first;
    std::vector<Formula> children{std::move(first.formula)};
    while (accept(TokKind::Pipe)) children.push_back(parse_and().formula);
    return Parsed{Formula::disj(std::move(children)), std::nullopt};
  }

  Parsed parse_and() {
    Parsed first = parse_until();
    if (!check(TokKind::Amp)) return first;
    std::vector<Formula> children{std::move(first.formula)};
    while (accept(TokKind::Amp)) children.push_back(parse_until().formula);
    return Parsed{Formula::conj(std::move(children)), std::nullopt};
  }

  Parsed parse_until() {
    Parsed lhs = parse_unary();
    if (check(TokKind::Ident) && peek().text == "U" && peek(1).kind == TokKind::LBracket) {
      advance();
      auto [t1, t2] = parse_interval();
      Parsed rhs = parse_unary();
      return Parsed{Formula::until(t1, t2, std::move(lhs.formula), std::move(rhs.formula)),
                    std::nullopt};
    }
    return lhs;
  }

  Parsed parse_unary() {
    const Token& tok = peek();
    if (tok.kind == TokKind::Ident && (tok.text == "G" || tok.text == "F") &&
        peek(1).kind == TokKind::LBracket) {
      const bool is_always = tok.text == "G";
      advance();
      auto [t1, t2] = parse_interval();
      Parsed body = parse_unary();
      Formula f = is_always ? Formula::always(t1, t2, std::move(body.formula))
                            : Formula::eventually(t1, t2, std::move(body.formula));
      return Parsed{std::move(f), std::nullopt};
    }
    if (tok.kind == TokKind::Bang) {
      const Token& bang = advance();
      Parsed inner = parse_unary();
      if (!inner.atom)
        throw ParseError(
            "'!' can only be applied to linear predicates and in/out atoms "
            "(formulas must stay in positive normal form)",
            bang.line, bang.column);
      Atom atom = *inner.atom;
      switch (atom.kind) {
        case AtomKind::BoxIn: atom.kind = AtomKind::BoxOut; break;
        case AtomKind::BoxOut: atom.kind = AtomKind::BoxIn; break;
        case AtomKind::Linear: atom.linear = atom.linear.negated(); break;
      }
      return make_atom(std::move(atom));
    }
    if (accept(TokKind::LParen)) {
      Parsed inner = parse_or();
      expect(TokKind::RParen, "')'");
      return inner;  // parentheses preserve atomicity of a lone atom
    }
    return parse_atom();
  }

  Parsed parse_atom() {
    const Token& tok = peek();
    if (tok.kind == TokKind::Ident && (tok.text == "in" || tok.text == "out") &&
        peek(1).kind == TokKind::LParen) {
      const bool inside = tok.text == "in";
      advance();
      advance();
      const Token& name = expect(TokKind::Ident, "region name");
      expect(TokKind::RParen, "')'");
      auto it = regions_.find(name.text);
      if (it == regions_.end())
        throw ParseError("unknown region '" + name.text + "'", name.line, name.column);
      if (static_cast<int>(it->second.axes.size()) != dim_)
        throw ParseError("region '" + name.text + "' has " +
                             std::to_string(it->second.axes.size()) +
                             " axes but the output dimension is " + std::to_string(dim_),
                         name.line, name.column);
      Atom atom;
      atom.kind = inside ? AtomKind::BoxIn : AtomKind::BoxOut;
      atom.region = it->second;
      return make_atom(std::move(atom));
    }
    Atom atom;
    atom.kind = AtomKind::Linear;
    atom.linear = parse_linear();
    return make_atom(std::move(atom));
  }

  std::pair<int, int> parse_interval() {
    expect(TokKind::LBracket, "'['");
    const Token& lo = expect(TokKind::Number, "integer timestep");
    expect(TokKind::Comma, "','");
    const Token& hi = expect(TokKind::Number, "integer timestep");
    const Token& close = expect(TokKind::RBracket, "']'");
    if (!lo.integral || !hi.integral)
      throw ParseError("interval endpoints must be integers", lo.line, lo.column);
    const int t1 = static_cast<int>(lo.value);
    const int t2 = static_cast<int>(hi.value);
    if (t1 > t2)
      throw ParseError("malformed interval [" + lo.text + "," + hi.text + "]", close.line,
                       close.column);
    return {t1, t2};
  }

  /// linatom := signed-term { (+|-) term } (<=|>=) signed-number,
  /// normalized to a.y - b <= 0.
  Predicate parse_linear() {
    const Token& start = peek();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim_);
    bool any_term = false;
    double sign = 1.0;
    if (accept(TokKind::Minus)) sign = -1.0;
    else accept(TokKind::Plus);
    while (true) {
      parse_linear_term(a, sign);
      any_term = true;
      if (accept(TokKind::Plus)) sign = 1.0;
      else if (accept(TokKind::Minus)) sign = -1.0;
      else break;
    }
    if (!any_term)
      throw ParseError("expected a linear expression", start.line, start.column);
    bool flip = false;
    if (accept(TokKind::Le)) flip = false;
    else if (accept(TokKind::Ge)) flip = true;
    else
      throw ParseError("expected '<=' or '>=' after linear expression", peek().line,
                       peek().column);
    double rhs_sign = 1.0;
    if (accept(TokKind::Minus)) rhs_sign = -1.0;
    else accept(TokKind::Plus);
    const Token& rhs = expect(TokKind::Number, "constant");
    double b = rhs_sign * rhs.value;
    if (flip) {
      a = -a;
      b = -b;
    }
    std::string name = format_linear_atom(a, b);
    return Predicate(std::move(name), std::move(a), b);
  }

  void parse_linear_term(Eigen::VectorXd& a, double sign) {
    const Token& tok = peek();
    double coeff = sign;
    if (tok.kind == TokKind::Number) {
      coeff = sign * advance().value;
      if (!accept(TokKind::Star)) {
        throw ParseError("expected '*' and an output variable after coefficient",
                         peek().line, peek().column);
      }
    }
    const Token& var = expect(TokKind::Ident, "output variable (y1..y" +
                                                  std::to_string(dim_) + ")");
    const int index = output_index(var);
    if (check(TokKind::Star))
      throw ParseError("non-linear expression: products of variables are not supported",
                       peek().line, peek().column);
    a[index] += coeff;
  }

  int output_index(const Token& var) const {
    const std::string& text = var.text;
    if (text.size() < 2 || text[0] != 'y')
      throw ParseError("expected output variable of the form y<k>, got '" + text + "'",
                       var.line, var.column);
    int k = 0;
    for (std::size_t i = 1; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i])))
        throw ParseError("expected output variable of the form y<k>, got '" + text + "'",
                         var.line, var.column);
      k = k * 10 + (text[i] - '0');
    }
    if (k < 1 || k > dim_)
      throw ParseError("output variable '" + text + "' out of range (dimension is " +
                           std::to_string(dim_) + ")",
                       var.line, var.column);
    return k - 1;
  }

  Parsed make_atom(Atom atom) {
    Formula f = expand_atom(atom);
    return Parsed{std::move(f), std::move(atom)};
  }

  Formula expand_atom(const Atom& atom) const {
    switch (atom.kind) {
      case AtomKind::Linear:
        return Formula::pred(atom.linear);
      case AtomKind::BoxIn: {
        std::vector<Formula> faces;
        for (const Predicate& p : box_faces(atom.region)) faces.push_back(Formula::pred(p));
        return Formula::conj(std::move(faces));
      }
      case AtomKind::BoxOut: {
        std::vector<Formula> faces;
        for (const Predicate& p : box_faces(atom.region))
          faces.push_back(Formula::pred(p.negated()));
        return Formula::disj(std::move(faces));
      }
    }
    throw std::logic_error("expand_atom: unreachable");
  }

  /// Half-space predicates whose conjunction is the box, axis-major,
  /// lower face before upper face.
  std::vector<Predicate> box_faces(const Region& region) const {
    std::vector<Predicate> faces;
    const int p = static_cast<int>(region.axes.size());
    for (int axis = 0; axis < p; ++axis) {
      Eigen::VectorXd lo = Eigen::VectorXd::Zero(p);
      lo[axis] = -1.0;
      faces.emplace_back(region.name + "_ax" + std::to_string(axis) + "_lo", lo,
                         -region.axes[axis].lower);
      Eigen::VectorXd hi = Eigen::VectorXd::Zero(p);
      hi[axis] = 1.0;
      faces.emplace_back(region.name + "_ax" + std::to_string(axis) + "_hi", hi,
                         region.axes[axis].upper);
    }
    return faces;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::map<std::string, Region>& regions_;
  int dim_;
};

}  // namespace detail

/// Parses specification text into a PNF formula; `!` is resolved against
/// linear atoms and in/out region atoms only.
inline Formula parse(const SpecSource& src) {
  detail::Parser parser(detail::lex(src.text), src.regions, src.output_dim);
  return parser.parse_phi();
}

/// Parses one `<linexpr> <= <const>` or `>=` fragment into a predicate
/// normalized to a.y - b <= 0.
inline Predicate parse_linear_atom(const std::string& fragment, int output_dim = 2) {
  std::map<std::string, Region> no_regions;
  detail::Parser parser(detail::lex(fragment), no_regions, output_dim);
  return parser.parse_single_linear_atom();
}

/// Loads {"regions": [{"name", "xmin", "xmax", "ymin", "ymax"}]}.
inline std::map<std::string, Region> parse_regions_json(const nlohmann::json& j) {
  std::map<std::string, Region> out;
  if (!j.is_object() || !j.contains("regions") || !j["regions"].is_array())
    throw std::runtime_error("region file must be an object with a 'regions' array");
  for (const auto& entry : j["regions"]) {
    Region region;
    region.name = entry.at("name").get<std::string>();
    region.axes = {{entry.at("xmin").get<double>(), entry.at("xmax").get<double>()},
                   {entry.at("ymin").get<double>(), entry.at("ymax").get<double>()}};
    for (const auto& axis : region.axes)
      if (!(axis.lower < axis.upper))
        throw std::runtime_error("region '" + region.name +
                                 "': each axis needs min < max");
    if (!out.emplace(region.name, region).second)
      throw std::runtime_error("duplicate region name '" + region.name + "'");
  }
  return out;
}

inline std::map<std::string, Region> load_regions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open region file '" + path + "'");
  nlohmann::json j;
  in >> j;
  return parse_regions_json(j);
}

namespace detail {

constexpr int kPrecOr = 0;
constexpr int kPrecAnd = 1;
constexpr int kPrecUntil = 2;
constexpr int kPrecUnary = 3;

inline int precedence(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Or: return kPrecOr;
    case FormulaKind::And: return kPrecAnd;
    case FormulaKind::Until: return kPrecUntil;
    case FormulaKind::Always:
    case FormulaKind::Eventually: return kPrecUnary;
    case FormulaKind::Pred: return kPrecUnary + 1;
  }
  return kPrecUnary + 1;
}

inline void print_formula(const Formula& f, int min_prec, std::string& out) {
  const bool parens = precedence(f) < min_prec;
  if (parens) out += "(";
  switch (f.kind()) {
    case FormulaKind::Pred:
      out += format_linear_atom(f.predicate().a, f.predicate().b);
      break;
    case FormulaKind::And: {
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += " & ";
        print_formula(c, kPrecUntil, out);
        first = false;
      }
      break;
    }
    case FormulaKind::Or: {
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += " | ";
        print_formula(c, kPrecAnd, out);
        first = false;
      }
      break;
    }
    case FormulaKind::Always:
    case FormulaKind::Eventually:
      out += f.kind() == FormulaKind::Always ? "G[" : "F[";
      out += std::to_string(f.t1()) + "," + std::to_string(f.t2()) + "] ";
      print_formula(f.children().front(), kPrecUnary, out);
      break;
    case FormulaKind::Until:
      print_formula(f.children()[0], kPrecUnary, out);
      out += " U[" + std::to_string(f.t1()) + "," + std::to_string(f.t2()) + "] ";
      print_formula(f.children()[1], kPrecUnary, out);
      break;
  }
  if (parens) out += ")";
}

}  // namespace detail

/// Grammar-compatible rendering; parsing it back yields a structurally
/// identical formula (predicate names are display labels and may differ).
inline std::string to_text(const Formula& f) {
  std::string out;
  detail::print_formula(f, 0, out);
  return out;
}

}  // namespace stlsynth
