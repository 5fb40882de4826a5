#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ftaq/model_text.hpp"
#include "ftaq/script.hpp"

namespace ftaq {

namespace {

struct Token {
  enum class Kind { ident, number, symbol, end };
  Kind kind{};
  std::string text;
  double number = 0;
  SourcePos pos;
};

const char* const section_keywords[] = {"assume", "check", "compute", "computeall"};

bool is_section_keyword(const std::string& s) {
  return std::find(std::begin(section_keywords), std::end(section_keywords), s) != std::end(section_keywords);
}

bool is_stmt_keyword(const std::string& s) {
  return s == "set" || s == "set_prob" || s == "setp" || s == "set_cost" || s == "set_time" || s == "set_skill" ||
         s == "set_partime" || s == "set_seqtime";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      bool end = t.kind == Token::Kind::end;
      out.push_back(std::move(t));
      if (end) return out;
    }
  }

 private:
  Token next() {
    skip_space_and_comments();
    Token t;
    t.pos = {line_, col_};
    if (i_ >= text_.size()) {
      t.kind = Token::Kind::end;
      return t;
    }
    char c = text_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) advance();
      t.kind = Token::Kind::ident;
      t.text = std::string(text_.substr(start, i_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = i_;
      while (i_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.' ||
                                   text_[i_] == 'e' || text_[i_] == 'E' ||
                                   ((text_[i_] == '+' || text_[i_] == '-') && i_ > start &&
                                    (text_[i_ - 1] == 'e' || text_[i_ - 1] == 'E'))))
        advance();
      t.kind = Token::Kind::number;
      t.text = std::string(text_.substr(start, i_ - start));
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
        fail(ErrorClass::parse, "malformed number '" + t.text + "'", t.pos);
      return t;
    }
    auto two = [&](const char* sym) {
      advance();
      advance();
      t.kind = Token::Kind::symbol;
      t.text = sym;
      return t;
    };
    if (c == '=' && i_ + 1 < text_.size() && text_[i_ + 1] == '>') return two("=>");
    if (c == '<' && i_ + 1 < text_.size() && text_[i_ + 1] == '=') return two("<=");
    if (c == '>' && i_ + 1 < text_.size() && text_[i_ + 1] == '=') return two(">=");
    if (std::string_view("=<>()[]|,:@").find(c) != std::string_view::npos) {
      advance();
      t.kind = Token::Kind::symbol;
      t.text = std::string(1, c);
      return t;
    }
    fail(ErrorClass::parse, std::string("unexpected character '") + c + "'", t.pos);
  }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space_and_comments() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && i_ + 1 < text_.size() && text_[i_ + 1] == '/') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

class ScriptParser {
 public:
  explicit ScriptParser(std::string_view text, std::string_view origin) : tokens_(Lexer(text).run()) {
    script_.origin = std::string(origin);
  }

  Script run() {
    bool seen_assume = false, seen_payload = false;
    while (!at_end()) {
      if (cur().kind != Token::Kind::ident || !is_section_keyword(cur().text))
        fail(ErrorClass::parse, "expected a section keyword (assume/check/compute/computeall)", cur().pos);
      const std::string section = cur().text;
      const SourcePos section_pos = cur().pos;
      shift();
      expect_symbol(":");
      if (section == "assume") {
        if (seen_assume) fail(ErrorClass::parse, "duplicate 'assume' section", section_pos);
        if (seen_payload) fail(ErrorClass::parse, "'assume' must precede the query section", section_pos);
        seen_assume = true;
        parse_assume();
      } else {
        if (seen_payload) fail(ErrorClass::parse, "duplicate query section '" + section + "'", section_pos);
        seen_payload = true;
        script_.payload = section == "check"     ? PayloadKind::check
                          : section == "compute" ? PayloadKind::compute
                                                 : PayloadKind::computeall;
        script_.payload_pos = section_pos;
        script_.expr = parse_expr();
      }
    }
    if (!seen_payload) fail(ErrorClass::parse, "missing query section (check/compute/computeall)", cur().pos);
    script_.end_pos = cur().pos;
    return std::move(script_);
  }

 private:
  const Token& cur() const { return tokens_[i_]; }
  const Token& peek(size_t ahead = 1) const { return tokens_[std::min(i_ + ahead, tokens_.size() - 1)]; }
  bool at_end() const { return cur().kind == Token::Kind::end; }
  void shift() {
    if (i_ + 1 < tokens_.size()) ++i_;
  }

  bool at_symbol(std::string_view sym) const { return cur().kind == Token::Kind::symbol && cur().text == sym; }

  void expect_symbol(std::string_view sym) {
    if (!at_symbol(sym)) fail(ErrorClass::parse, "expected '" + std::string(sym) + "'", cur().pos);
    shift();
  }

  std::string expect_ident(std::string_view what) {
    if (cur().kind != Token::Kind::ident) fail(ErrorClass::parse, "expected " + std::string(what), cur().pos);
    std::string out = cur().text;
    shift();
    return out;
  }

  double expect_number() {
    if (cur().kind != Token::Kind::number) fail(ErrorClass::parse, "expected a number", cur().pos);
    double v = cur().number;
    shift();
    return v;
  }

  bool at_section_start() const { return cur().kind == Token::Kind::ident && is_section_keyword(cur().text) &&
                                         peek().kind == Token::Kind::symbol && peek().text == ":"; }

  void parse_assume() {
    while (!at_end() && !at_section_start()) {
      if (at_symbol("@")) {
        DecoratorBlock block;
        block.pos = cur().pos;
        shift();
        block.name = expect_ident("decorator name");
        for (const auto& d : script_.decorators)
          if (d.name == block.name)
            fail(ErrorClass::parse, "duplicate decorator '@" + block.name + "'", block.pos);
        expect_symbol(":");
        while (!at_end() && !at_section_start() && !at_symbol("@")) block.stmts.push_back(parse_stmt());
        script_.decorators.push_back(std::move(block));
      } else {
        script_.assume.push_back(parse_stmt());
      }
    }
  }

  Stmt parse_stmt() {
    Stmt stmt;
    stmt.pos = cur().pos;
    if (cur().kind == Token::Kind::ident && is_stmt_keyword(cur().text)) {
      const std::string kw = cur().text;
      shift();
      stmt.id = expect_ident("an element id");
      if (kw == "set") {
        stmt.kind = Stmt::Kind::set_bool;
        expect_symbol("=");
        SourcePos vpos = cur().pos;
        double v = expect_number();
        if (v != 0.0 && v != 1.0) fail(ErrorClass::parse, "set expects 0 or 1", vpos);
        stmt.value = v;
      } else if (kw == "set_prob" || kw == "setp") {
        stmt.kind = Stmt::Kind::set_prob;
        expect_symbol("=");
        SourcePos vpos = cur().pos;
        stmt.value = expect_number();
        if (stmt.value < 0.0 || stmt.value > 1.0)
          fail(ErrorClass::parse, "probability must lie in [0,1]", vpos);
      } else {
        stmt.kind = Stmt::Kind::set_metric;
        if (kw == "set_cost") {
          stmt.field = AttrField::cost;
          stmt.budget_domain = MetricDomain::cost;
        } else if (kw == "set_skill") {
          stmt.field = AttrField::skill;
          stmt.budget_domain = MetricDomain::skill;
        } else if (kw == "set_seqtime") {
          stmt.field = AttrField::time;
          stmt.budget_domain = MetricDomain::seqtime;
        } else {  // set_time, set_partime
          stmt.field = AttrField::time;
          stmt.budget_domain = MetricDomain::partime;
        }
        if (at_symbol("<=") || at_symbol("<")) {
          stmt.is_budget = true;
          stmt.budget_cmp = cur().text == "<" ? Cmp::lt : Cmp::le;
          shift();
        } else {
          expect_symbol("=");
        }
        SourcePos vpos = cur().pos;
        stmt.value = expect_number();
        if (stmt.value < 0.0) fail(ErrorClass::parse, "metric value must be nonnegative", vpos);
      }
      return stmt;
    }
    stmt.kind = Stmt::Kind::bare;
    stmt.expr = parse_expr();
    return stmt;
  }

  // expr := (exists|forall) expr | implication
  ExprPtr parse_expr() {
    if (cur().kind == Token::Kind::ident && (cur().text == "exists" || cur().text == "forall")) {
      Expr node;
      node.kind = cur().text == "exists" ? Expr::Kind::exists : Expr::Kind::forall;
      node.pos = cur().pos;
      shift();
      node.a = parse_expr();
      return std::make_shared<const Expr>(std::move(node));
    }
    return parse_implies();
  }

  ExprPtr parse_implies() {
    ExprPtr lhs = parse_or();
    if (at_symbol("=>")) {
      Expr node;
      node.kind = Expr::Kind::implies;
      node.pos = cur().pos;
      shift();
      node.a = lhs;
      node.b = parse_implies();  // right-associative
      return std::make_shared<const Expr>(std::move(node));
    }
    return lhs;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (cur().kind == Token::Kind::ident && cur().text == "or") {
      Expr node;
      node.kind = Expr::Kind::or_op;
      node.pos = cur().pos;
      shift();
      node.a = lhs;
      node.b = parse_and();
      lhs = std::make_shared<const Expr>(std::move(node));
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (cur().kind == Token::Kind::ident && cur().text == "and") {
      Expr node;
      node.kind = Expr::Kind::and_op;
      node.pos = cur().pos;
      shift();
      node.a = lhs;
      node.b = parse_not();
      lhs = std::make_shared<const Expr>(std::move(node));
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (cur().kind == Token::Kind::ident && cur().text == "not") {
      Expr node;
      node.kind = Expr::Kind::not_op;
      node.pos = cur().pos;
      shift();
      node.a = parse_not();
      return std::make_shared<const Expr>(std::move(node));
    }
    return parse_atom();
  }

  std::optional<Cmp> parse_cmp_opt() {
    if (at_symbol("<")) return (shift(), Cmp::lt);
    if (at_symbol("<=")) return (shift(), Cmp::le);
    if (at_symbol(">")) return (shift(), Cmp::gt);
    if (at_symbol(">=")) return (shift(), Cmp::ge);
    if (at_symbol("=")) return (shift(), Cmp::eq);
    return std::nullopt;
  }

  std::optional<MetricKeyword> metric_keyword(const std::string& s) const {
    if (s == "Cost") return MetricKeyword::cost;
    if (s == "Time" || s == "ParTime") return MetricKeyword::partime;
    if (s == "SeqTime") return MetricKeyword::seqtime;
    if (s == "Skill") return MetricKeyword::skill;
    if (s == "Prob") return MetricKeyword::prob;
    return std::nullopt;
  }

  ExprPtr parse_atom() {
    Expr node;
    node.pos = cur().pos;
    if (at_symbol("(")) {
      shift();
      ExprPtr inner = parse_expr();
      expect_symbol(")");
      return inner;
    }
    if (at_symbol("@")) {
      shift();
      node.kind = Expr::Kind::decorated;
      node.name = expect_ident("decorator name");
      expect_symbol("(");
      node.a = parse_expr();
      expect_symbol(")");
      return std::make_shared<const Expr>(std::move(node));
    }
    if (cur().kind != Token::Kind::ident) fail(ErrorClass::parse, "expected an expression", cur().pos);
    const std::string head = cur().text;

    if (head == "P") {
      shift();
      expect_symbol("[");
      node.kind = Expr::Kind::prob_term;
      node.name = expect_ident("an element id");
      if (at_symbol("|")) {
        shift();
        node.name2 = expect_ident("a conditioning element id");
      }
      expect_symbol("]");
      if (auto cmp = parse_cmp_opt()) {
        node.has_cmp = true;
        node.cmp = *cmp;
        node.bound = expect_number();
      }
      return std::make_shared<const Expr>(std::move(node));
    }
    if (head == "MCS" || head == "MPS") {
      shift();
      expect_symbol("[");
      node.kind = head == "MCS" ? Expr::Kind::mcs : Expr::Kind::mps;
      node.name = expect_ident("an element id");
      expect_symbol("]");
      return std::make_shared<const Expr>(std::move(node));
    }
    if (auto mk = metric_keyword(head)) {
      shift();
      expect_symbol("[");
      node.kind = Expr::Kind::metric_term;
      node.metric = *mk;
      node.name = expect_ident("an element id");
      expect_symbol("]");
      if (auto cmp = parse_cmp_opt()) {
        node.has_cmp = true;
        node.cmp = *cmp;
        node.bound = expect_number();
      }
      return std::make_shared<const Expr>(std::move(node));
    }
    if (head == "indep") {
      shift();
      expect_symbol("(");
      node.kind = Expr::Kind::indep;
      node.name = expect_ident("an element id");
      expect_symbol(",");
      node.name2 = expect_ident("an element id");
      expect_symbol(")");
      return std::make_shared<const Expr>(std::move(node));
    }
    if (is_section_keyword(head) || is_stmt_keyword(head) || head == "and" || head == "or" || head == "not" ||
        head == "exists" || head == "forall")
      fail(ErrorClass::parse, "unexpected keyword '" + head + "'", cur().pos);
    node.kind = Expr::Kind::ident;
    node.name = head;
    shift();
    return std::make_shared<const Expr>(std::move(node));
  }

  std::vector<Token> tokens_;
  size_t i_ = 0;
  Script script_;
};

// ----------------------------------------------------------------------
// Pretty printing

int print_level(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::exists:
    case Expr::Kind::forall: return 0;
    case Expr::Kind::implies: return 1;
    case Expr::Kind::or_op: return 2;
    case Expr::Kind::and_op: return 3;
    case Expr::Kind::not_op: return 4;
    default: return 5;
  }
}

std::string_view metric_text(MetricKeyword mk) {
  switch (mk) {
    case MetricKeyword::cost: return "Cost";
    case MetricKeyword::partime: return "Time";
    case MetricKeyword::seqtime: return "SeqTime";
    case MetricKeyword::skill: return "Skill";
    case MetricKeyword::prob: return "Prob";
  }
  return "?";
}

void print_expr(std::ostream& out, const ExprPtr& e, int min_level);

void print_child(std::ostream& out, const ExprPtr& child, int level) {
  const bool parens = print_level(*child) < level;
  if (parens) out << "(";
  print_expr(out, child, 0);
  if (parens) out << ")";
}

void print_expr(std::ostream& out, const ExprPtr& e, int /*min_level*/) {
  switch (e->kind) {
    case Expr::Kind::ident: out << e->name; break;
    case Expr::Kind::prob_term:
      out << "P[" << e->name;
      if (!e->name2.empty()) out << " | " << e->name2;
      out << "]";
      if (e->has_cmp) out << " " << cmp_text(e->cmp) << " " << format_double(e->bound);
      break;
    case Expr::Kind::metric_term:
      out << metric_text(e->metric) << "[" << e->name << "]";
      if (e->has_cmp) out << " " << cmp_text(e->cmp) << " " << format_double(e->bound);
      break;
    case Expr::Kind::mcs: out << "MCS[" << e->name << "]"; break;
    case Expr::Kind::mps: out << "MPS[" << e->name << "]"; break;
    case Expr::Kind::indep: out << "indep(" << e->name << ", " << e->name2 << ")"; break;
    case Expr::Kind::not_op:
      out << "not ";
      print_child(out, e->a, 4);
      break;
    case Expr::Kind::and_op:
      print_child(out, e->a, 3);
      out << " and ";
      print_child(out, e->b, 4);  // right operand strictly tighter: keeps left association
      break;
    case Expr::Kind::or_op:
      print_child(out, e->a, 2);
      out << " or ";
      print_child(out, e->b, 3);
      break;
    case Expr::Kind::implies:
      print_child(out, e->a, 2);  // implication is right-associative
      out << " => ";
      print_child(out, e->b, 1);
      break;
    case Expr::Kind::exists:
    case Expr::Kind::forall:
      out << (e->kind == Expr::Kind::exists ? "exists " : "forall ");
      print_child(out, e->a, 0);
      break;
    case Expr::Kind::decorated:
      out << "@" << e->name << "(";
      print_expr(out, e->a, 0);
      out << ")";
      break;
  }
}

void print_stmt(std::ostream& out, const Stmt& stmt, const std::string& indent) {
  out << indent;
  switch (stmt.kind) {
    case Stmt::Kind::set_bool:
      out << "set " << stmt.id << " = " << (stmt.value != 0.0 ? "1" : "0");
      break;
    case Stmt::Kind::set_prob:
      out << "set_prob " << stmt.id << " = " << format_double(stmt.value);
      break;
    case Stmt::Kind::set_metric: {
      std::string kw;
      if (stmt.field == AttrField::cost) kw = "set_cost";
      else if (stmt.field == AttrField::skill) kw = "set_skill";
      else kw = stmt.budget_domain == MetricDomain::seqtime ? "set_seqtime" : "set_time";
      out << kw << " " << stmt.id << " " << (stmt.is_budget ? cmp_text(stmt.budget_cmp) : "=") << " "
          << format_double(stmt.value);
      break;
    }
    case Stmt::Kind::bare:
      print_expr(out, stmt.expr, 0);
      break;
  }
  out << "\n";
}

}  // namespace

Script parse_script(std::string_view text, std::string_view origin) {
  return ScriptParser(text, origin).run();
}

Script parse_script_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorClass::io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_script(buf.str(), path);
}

std::string pretty_print(const Script& script) {
  std::ostringstream out;
  out << "assume:\n";
  for (const auto& stmt : script.assume) print_stmt(out, stmt, "  ");
  for (const auto& block : script.decorators) {
    out << "  @" << block.name << ":\n";
    for (const auto& stmt : block.stmts) print_stmt(out, stmt, "    ");
  }
  switch (script.payload) {
    case PayloadKind::check: out << "check:\n"; break;
    case PayloadKind::compute: out << "compute:\n"; break;
    case PayloadKind::computeall: out << "computeall:\n"; break;
  }
  out << "  ";
  print_expr(out, script.expr, 0);
  out << "\n";
  return out.str();
}

}  // namespace ftaq
