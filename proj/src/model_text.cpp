#include "ftaq/model_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace ftaq {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

struct Token {
  enum class Kind { ident, number, symbol, end };
  Kind kind{};
  std::string text;
  double number = 0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    Token t;
    t.pos = pos();
    if (at_end()) {
      t.kind = Token::Kind::end;
      return t;
    }
    char c = text_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) advance();
      t.kind = Token::Kind::ident;
      t.text = std::string(text_.substr(start, i_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = i_;
      while (!at_end() && (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.' ||
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
    if (c == '-' && i_ + 1 < text_.size() && text_[i_ + 1] == '>') {
      advance();
      advance();
      t.kind = Token::Kind::symbol;
      t.text = "->";
      return t;
    }
    if (std::string_view("=();,").find(c) != std::string_view::npos) {
      advance();
      t.kind = Token::Kind::symbol;
      t.text = std::string(1, c);
      return t;
    }
    fail(ErrorClass::parse, std::string("unexpected character '") + c + "'", t.pos);
  }

  /// Annotations collected from `//!` comment lines.
  const std::vector<std::string>& annotations() const { return annotations_; }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  SourcePos pos() const { return {line_, col_}; }

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
    while (!at_end()) {
      char c = text_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && i_ + 1 < text_.size() && text_[i_ + 1] == '/') {
        const bool pragma = i_ + 2 < text_.size() && text_[i_ + 2] == '!';
        size_t start = i_ + (pragma ? 3 : 2);
        while (!at_end() && text_[i_] != '\n') advance();
        if (pragma) {
          std::string body(text_.substr(start, i_ - start));
          // trim
          size_t b = body.find_first_not_of(" \t");
          size_t e = body.find_last_not_of(" \t\r");
          if (b != std::string::npos) annotations_.push_back(body.substr(b, e - b + 1));
        }
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
  std::vector<std::string> annotations_;
};

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : lex_(text) { shift(); }

  TreeModel run(bool validate) {
    expect_keyword("model");
    model_.name = expect_ident("model name");
    while (cur_.kind != Token::Kind::end) statement();
    model_.annotations = lex_.annotations();
    if (toplevel_.empty()) fail(ErrorClass::parse, "missing 'toplevel' declaration", cur_.pos);
    for (const auto& [id, pos] : child_refs_)
      if (model_.find(id) == no_node) fail(ErrorClass::parse, "unknown reference '" + id + "'", pos);
    if (model_.find(toplevel_) == no_node)
      fail(ErrorClass::parse, "unknown reference '" + toplevel_ + "'", toplevel_pos_);
    for (const auto& [edge, pos] : attach_) {
      if (model_.find(edge.first) == no_node) fail(ErrorClass::parse, "unknown reference '" + edge.first + "'", pos);
      if (model_.find(edge.second) == no_node)
        fail(ErrorClass::parse, "unknown reference '" + edge.second + "'", pos);
      model_.add_attachment(edge.first, edge.second);
    }
    model_.set_toplevel(toplevel_);
    model_.finalize();
    if (validate) {
      ValidationReport report = validate_model(model_);
      if (!report.ok()) {
        std::ostringstream msg;
        msg << "model is invalid:";
        for (const auto& issue : report.issues) msg << " [" << issue.node << ": " << issue.rule << "]";
        fail(ErrorClass::validation, msg.str());
      }
    }
    return std::move(model_);
  }

 private:
  void shift() { cur_ = lex_.next(); }

  void expect_keyword(std::string_view kw) {
    if (cur_.kind != Token::Kind::ident || cur_.text != kw)
      fail(ErrorClass::parse, "expected '" + std::string(kw) + "'", cur_.pos);
    shift();
  }

  std::string expect_ident(std::string_view what) {
    if (cur_.kind != Token::Kind::ident)
      fail(ErrorClass::parse, "expected " + std::string(what), cur_.pos);
    std::string out = cur_.text;
    shift();
    return out;
  }

  void expect_symbol(std::string_view sym) {
    if (cur_.kind != Token::Kind::symbol || cur_.text != sym)
      fail(ErrorClass::parse, "expected '" + std::string(sym) + "'", cur_.pos);
    shift();
  }

  double expect_number() {
    if (cur_.kind != Token::Kind::number) fail(ErrorClass::parse, "expected a number", cur_.pos);
    double v = cur_.number;
    shift();
    return v;
  }

  void check_fresh(const std::string& id, SourcePos pos) {
    if (model_.find(id) != no_node) fail(ErrorClass::parse, "duplicate definition of '" + id + "'", pos);
  }

  void statement() {
    if (cur_.kind != Token::Kind::ident) fail(ErrorClass::parse, "expected a statement", cur_.pos);
    const std::string head = cur_.text;
    const SourcePos head_pos = cur_.pos;

    if (head == "toplevel") {
      shift();
      if (!toplevel_.empty()) fail(ErrorClass::parse, "duplicate 'toplevel'", head_pos);
      toplevel_pos_ = cur_.pos;
      toplevel_ = expect_ident("toplevel id");
      expect_symbol(";");
      return;
    }
    if (head == "be" || head == "bas") {
      shift();
      SourcePos id_pos = cur_.pos;
      std::string id = expect_ident("leaf id");
      check_fresh(id, id_pos);
      LeafAttrs attrs;
      while (cur_.kind == Token::Kind::ident && cur_.text != "be" && cur_.text != "bas") {
        std::string key = cur_.text;
        SourcePos key_pos = cur_.pos;
        AttrField field;
        if (key == "prob") field = AttrField::prob;
        else if (key == "cost") field = AttrField::cost;
        else if (key == "time") field = AttrField::time;
        else if (key == "skill") field = AttrField::skill;
        else fail(ErrorClass::parse, "unknown attribute '" + key + "'", key_pos);
        if (head == "be" && field != AttrField::prob)
          fail(ErrorClass::parse, "basic events carry only 'prob'", key_pos);
        shift();
        expect_symbol("=");
        SourcePos value_pos = cur_.pos;
        double value = expect_number();
        if (field == AttrField::prob && (value < 0.0 || value > 1.0))
          fail(ErrorClass::parse, "prob must lie in [0,1]", value_pos);
        if (field != AttrField::prob && value < 0.0)
          fail(ErrorClass::parse, key + " must be nonnegative", value_pos);
        attrs.set(field, value);
      }
      expect_symbol(";");
      model_.add_leaf(id, head == "be" ? NodeKind::basic_event : NodeKind::attack_step, attrs);
      return;
    }
    if (head == "attach") {
      shift();
      SourcePos pos = cur_.pos;
      std::string source = expect_ident("attachment source");
      expect_symbol("->");
      std::string target = expect_ident("attachment target");
      expect_symbol(";");
      attach_.push_back({{source, target}, pos});
      return;
    }
    if (head == "model") fail(ErrorClass::parse, "duplicate 'model' header", head_pos);

    // gate definition: <id> = and(...)|or(...);
    shift();
    check_fresh(head, head_pos);
    expect_symbol("=");
    std::string op = expect_ident("'and' or 'or'");
    GateOp gate_op;
    if (op == "and") gate_op = GateOp::and_gate;
    else if (op == "or") gate_op = GateOp::or_gate;
    else fail(ErrorClass::parse, "expected 'and' or 'or'", cur_.pos);
    expect_symbol("(");
    std::vector<std::string> children;
    children.push_back(expect_ident("child id"));
    while (cur_.kind == Token::Kind::symbol && cur_.text == ",") {
      shift();
      children.push_back(expect_ident("child id"));
    }
    expect_symbol(")");
    expect_symbol(";");
    for (const auto& c : children) child_refs_.emplace_back(c, head_pos);
    model_.add_gate(head, gate_op, children);
  }

  Lexer lex_;
  Token cur_;
  TreeModel model_;
  std::string toplevel_;
  SourcePos toplevel_pos_;
  std::vector<std::pair<std::string, SourcePos>> child_refs_;
  std::vector<std::pair<std::pair<std::string, std::string>, SourcePos>> attach_;
};

}  // namespace

TreeModel parse_model(const ModelSource& src) {
  ModelParser parser(src.text);
  return parser.run(true);
}

TreeModel parse_model_unvalidated(const ModelSource& src) {
  ModelParser parser(src.text);
  return parser.run(false);
}

TreeModel parse_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorClass::io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model({buf.str(), path});
}

std::string serialize_model(const TreeModel& m) {
  std::ostringstream out;
  out << "model " << m.name << "\n";
  for (const auto& a : m.annotations) out << "//! " << a << "\n";
  out << "toplevel " << m.node(m.ft_top()).id << ";\n";

  // Gates in parents-first topological order, id-smallest first among the
  // ready ones.
  std::vector<NodeIndex> gates;
  for (NodeIndex i = 0; i < m.node_count(); ++i)
    if (!m.node(i).is_leaf()) gates.push_back(i);
  std::map<NodeIndex, std::vector<NodeIndex>> gate_parents;
  for (NodeIndex g : gates)
    for (NodeIndex c : m.node(g).children)
      if (!m.node(c).is_leaf()) gate_parents[c].push_back(g);
  std::set<NodeIndex> emitted;
  std::vector<NodeIndex> order;
  while (order.size() < gates.size()) {
    NodeIndex pick = no_node;
    for (NodeIndex g : gates) {
      if (emitted.count(g)) continue;
      bool ready = true;
      for (NodeIndex p : gate_parents[g]) ready &= emitted.count(p) > 0;
      if (!ready) continue;
      if (pick == no_node || m.node(g).id < m.node(pick).id) pick = g;
    }
    if (pick == no_node) break;  // cyclic models are rejected before this point
    emitted.insert(pick);
    order.push_back(pick);
  }
  for (NodeIndex g : order) {
    const Node& n = m.node(g);
    out << n.id << " = " << (n.op == GateOp::and_gate ? "and(" : "or(");
    for (size_t i = 0; i < n.children.size(); ++i) {
      if (i) out << ", ";
      out << m.node(n.children[i]).id;
    }
    out << ");\n";
  }

  std::vector<NodeIndex> leaves;
  for (NodeIndex i = 0; i < m.node_count(); ++i)
    if (m.node(i).is_leaf()) leaves.push_back(i);
  std::sort(leaves.begin(), leaves.end(), [&m](NodeIndex a, NodeIndex b) { return m.node(a).id < m.node(b).id; });
  for (NodeIndex i : leaves) {
    const Node& n = m.node(i);
    out << (n.kind == NodeKind::basic_event ? "be " : "bas ") << n.id;
    for (AttrField f : {AttrField::prob, AttrField::cost, AttrField::time, AttrField::skill})
      if (auto v = n.attrs.get(f)) out << " " << attr_name(f) << "=" << format_double(*v);
    out << ";\n";
  }

  for (const auto& [src, tgt] : m.attachments())
    out << "attach " << m.node(src).id << " -> " << m.node(tgt).id << ";\n";
  return out.str();
}

}  // namespace ftaq
