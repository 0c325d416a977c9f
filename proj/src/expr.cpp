#include "sdfap/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "sdfap/error.hpp"

namespace sdfap {

std::string_view to_string(PrimOp op) {
  switch (op) {
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Min: return "min";
    case PrimOp::Max: return "max";
    case PrimOp::Lt: return "<";
    case PrimOp::Eq: return "==";
  }
  return "?";
}

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

std::optional<PrimOp> prim_by_name(std::string_view s) {
  static const std::map<std::string_view, PrimOp> ops = {
      {"+", PrimOp::Add},   {"add", PrimOp::Add}, {"-", PrimOp::Sub},   {"sub", PrimOp::Sub},
      {"*", PrimOp::Mul},   {"mul", PrimOp::Mul}, {"min", PrimOp::Min}, {"max", PrimOp::Max},
      {"<", PrimOp::Lt},    {"lt", PrimOp::Lt},   {"==", PrimOp::Eq},   {"eq", PrimOp::Eq},
      {"compare", PrimOp::Lt},
  };
  auto it = ops.find(s);
  if (it == ops.end()) return std::nullopt;
  return it->second;
}

// Minimal s-expression reader.
struct SNode {
  bool is_list = false;
  std::string atom;
  std::vector<SNode> items;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SNode read_all() {
    SNode n = read();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    std::ostringstream os;
    os << why << " at offset " << pos_;
    throw Error(ErrorCode::ParseError, os.str());
  }

  void skip_ws() {
    while (pos_ < text_.size() && (std::isspace(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == ';')) {
      if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        ++pos_;
      }
    }
  }

  SNode read() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    if (text_[pos_] == ')') fail("unexpected ')'");
    SNode n;
    if (text_[pos_] == '(') {
      ++pos_;
      n.is_list = true;
      for (;;) {
        skip_ws();
        if (pos_ >= text_.size()) fail("unclosed '('");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        n.items.push_back(read());
      }
      return n;
    }
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    n.atom = std::string(text_.substr(start, pos_ - start));
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void parse_fail(const std::string& why) { throw Error(ErrorCode::ParseError, why); }

std::optional<std::uint64_t> as_uint(const SNode& n) {
  if (n.is_list || n.atom.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(n.atom.data(), n.atom.data() + n.atom.size(), v);
  if (ec != std::errc() || p != n.atom.data() + n.atom.size()) return std::nullopt;
  return v;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

ExprPtr convert(const SNode& n);

std::shared_ptr<const Lambda> convert_fn(const SNode& n, std::size_t arity, std::string_view hof) {
  if (!n.is_list) {
    auto op = prim_by_name(n.atom);
    if (!op) parse_fail(std::string(hof) + ": unknown operator '" + n.atom + "'");
    if (arity != 2) parse_fail(std::string(hof) + " needs a unary lambda, got operator '" + n.atom + "'");
    auto fn = std::make_shared<Lambda>();
    fn->params = {"a", "b"};
    fn->body = Expr::prim(*op, Expr::var("a"), Expr::var("b"));
    return fn;
  }
  if (n.items.size() != 3 || n.items[0].is_list || n.items[0].atom != "lambda" || !n.items[1].is_list)
    parse_fail(std::string(hof) + ": expected (lambda (params...) body)");
  auto fn = std::make_shared<Lambda>();
  for (const auto& p : n.items[1].items) {
    if (p.is_list || !is_identifier(p.atom)) parse_fail("lambda parameter must be an identifier");
    fn->params.push_back(p.atom);
  }
  if (fn->params.size() != arity) {
    std::ostringstream os;
    os << hof << " expects a lambda of " << arity << " parameter(s), got " << fn->params.size();
    parse_fail(os.str());
  }
  fn->body = convert(n.items[2]);
  return fn;
}

ExprPtr convert(const SNode& n) {
  if (!n.is_list) {
    if (auto v = as_uint(n)) return Expr::constant(*v);
    if (!is_identifier(n.atom)) parse_fail("bad atom '" + n.atom + "'");
    return Expr::var(n.atom);
  }
  if (n.items.empty()) parse_fail("empty list");
  const auto& head = n.items[0];
  if (head.is_list) parse_fail("list head must be a symbol");
  const std::string& h = head.atom;
  const auto argc = n.items.size() - 1;
  auto need = [&](std::size_t k) {
    if (argc != k) {
      std::ostringstream os;
      os << "'" << h << "' takes " << k << " argument(s), got " << argc;
      parse_fail(os.str());
    }
  };

  if (h == "in") {
    need(1);
    auto v = as_uint(n.items[1]);
    if (!v) parse_fail("(in k) needs a port index");
    return Expr::input(*v);
  }
  if (h == "const") {
    need(1);
    auto v = as_uint(n.items[1]);
    if (!v) parse_fail("(const v) needs an unsigned integer");
    return Expr::constant(*v);
  }
  if (auto op = prim_by_name(h)) {
    need(2);
    return Expr::prim(*op, convert(n.items[1]), convert(n.items[2]));
  }
  if (h == "map") {
    need(2);
    return Expr::map(convert_fn(n.items[1], 1, h), convert(n.items[2]));
  }
  if (h == "zipWith" || h == "zipwith") {
    need(3);
    return Expr::zip_with(convert_fn(n.items[1], 2, h), convert(n.items[2]), convert(n.items[3]));
  }
  if (h == "foldl") {
    need(3);
    return Expr::foldl(convert_fn(n.items[1], 2, h), convert(n.items[2]), convert(n.items[3]));
  }
  if (h == "foldl1") {
    need(2);
    return Expr::foldl1(convert_fn(n.items[1], 2, h), convert(n.items[2]));
  }
  if (h == "let") {
    need(2);
    if (!n.items[1].is_list) parse_fail("let needs a binding list");
    std::vector<std::pair<std::string, ExprPtr>> bs;
    for (const auto& b : n.items[1].items) {
      if (!b.is_list || b.items.size() != 2 || b.items[0].is_list || !is_identifier(b.items[0].atom))
        parse_fail("let binding must be (name expr)");
      bs.emplace_back(b.items[0].atom, convert(b.items[1]));
    }
    return Expr::let(std::move(bs), convert(n.items[2]));
  }
  if (h == "tuple") {
    if (argc < 1) parse_fail("tuple needs at least one element");
    std::vector<ExprPtr> es;
    for (std::size_t i = 1; i < n.items.size(); ++i) es.push_back(convert(n.items[i]));
    return Expr::tuple(std::move(es));
  }
  if (h == "proj") {
    need(2);
    auto v = as_uint(n.items[1]);
    if (!v) parse_fail("(proj i e) needs an index");
    return Expr::proj(*v, convert(n.items[2]));
  }
  if (h == "lambda") parse_fail("lambda only allowed as a higher-order function argument");
  parse_fail("unknown form '" + h + "'");
}

void print(std::ostream& os, const Expr& e);

void print_fn(std::ostream& os, const Lambda& fn) {
  os << "(lambda (";
  for (std::size_t i = 0; i < fn.params.size(); ++i) os << (i ? " " : "") << fn.params[i];
  os << ") ";
  print(os, *fn.body);
  os << ')';
}

void print(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Input: os << "(in " << e.index << ')'; return;
    case Expr::Kind::Const: os << e.value; return;
    case Expr::Kind::Var: os << e.name; return;
    case Expr::Kind::Prim:
      os << '(' << to_string(e.op) << ' ';
      print(os, *e.args[0]);
      os << ' ';
      print(os, *e.args[1]);
      os << ')';
      return;
    case Expr::Kind::Map:
    case Expr::Kind::ZipWith:
    case Expr::Kind::Foldl:
    case Expr::Kind::Foldl1: {
      static const char* names[] = {"map", "zipWith", "foldl", "foldl1"};
      os << '(' << names[static_cast<int>(e.kind) - static_cast<int>(Expr::Kind::Map)] << ' ';
      print_fn(os, *e.fn);
      for (const auto& a : e.args) {
        os << ' ';
        print(os, *a);
      }
      os << ')';
      return;
    }
    case Expr::Kind::Let:
      os << "(let (";
      for (std::size_t i = 0; i < e.bindings.size(); ++i) {
        os << (i ? " " : "") << '(' << e.bindings[i].first << ' ';
        print(os, *e.bindings[i].second);
        os << ')';
      }
      os << ") ";
      print(os, *e.args[0]);
      os << ')';
      return;
    case Expr::Kind::Tuple:
      os << "(tuple";
      for (const auto& a : e.args) {
        os << ' ';
        print(os, *a);
      }
      os << ')';
      return;
    case Expr::Kind::Proj:
      os << "(proj " << e.index << ' ';
      print(os, *e.args[0]);
      os << ')';
      return;
  }
}

[[noreturn]] void type_fail(const std::string& why) { throw Error(ErrorCode::ShapeMismatch, why); }

using TypeEnv = std::vector<std::pair<std::string, Type>>;

const Type* lookup(const TypeEnv& env, const std::string& name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == name) return &it->second;
  return nullptr;
}

Type infer(const Expr& e, std::span<const Type> inputs, TypeEnv& env);

void check_fn(const Lambda& fn, std::span<const Type> inputs) {
  TypeEnv local;
  for (const auto& p : fn.params) local.emplace_back(p, Type::scalar());
  // Closed: the lambda body sees only its parameters, never node inputs.
  auto t = infer(*fn.body, inputs.first(0), local);
  if (t.kind != Type::Kind::Scalar) type_fail("lambda body must be scalar, got " + t.str());
}

Type infer(const Expr& e, std::span<const Type> inputs, TypeEnv& env) {
  switch (e.kind) {
    case Expr::Kind::Input:
      if (e.index >= inputs.size()) {
        std::ostringstream os;
        os << "(in " << e.index << ") but node has " << inputs.size() << " input port(s)";
        type_fail(os.str());
      }
      return inputs[e.index];
    case Expr::Kind::Const: return Type::scalar();
    case Expr::Kind::Var: {
      const Type* t = lookup(env, e.name);
      if (!t) type_fail("unbound variable '" + e.name + "'");
      return *t;
    }
    case Expr::Kind::Prim: {
      auto a = infer(*e.args[0], inputs, env);
      auto b = infer(*e.args[1], inputs, env);
      if (a.kind != Type::Kind::Scalar || b.kind != Type::Kind::Scalar)
        type_fail(std::string("operator ") + std::string(to_string(e.op)) + " needs scalars, got " + a.str() + " and " +
                  b.str() + " (use map/zipWith for vectors)");
      return Type::scalar();
    }
    case Expr::Kind::Map: {
      check_fn(*e.fn, inputs);
      auto v = infer(*e.args[0], inputs, env);
      if (v.kind != Type::Kind::Vec) type_fail("map over non-vector " + v.str());
      return v;
    }
    case Expr::Kind::ZipWith: {
      check_fn(*e.fn, inputs);
      auto a = infer(*e.args[0], inputs, env);
      auto b = infer(*e.args[1], inputs, env);
      if (a.kind != Type::Kind::Vec || b.kind != Type::Kind::Vec) type_fail("zipWith over non-vector");
      if (a.length != b.length) {
        std::ostringstream os;
        os << "zipWith length mismatch " << a.length << " vs " << b.length;
        type_fail(os.str());
      }
      return a;
    }
    case Expr::Kind::Foldl: {
      check_fn(*e.fn, inputs);
      auto init = infer(*e.args[0], inputs, env);
      auto v = infer(*e.args[1], inputs, env);
      if (init.kind != Type::Kind::Scalar) type_fail("foldl initial value must be scalar");
      if (v.kind != Type::Kind::Vec) type_fail("foldl over non-vector " + v.str());
      return Type::scalar();
    }
    case Expr::Kind::Foldl1: {
      check_fn(*e.fn, inputs);
      auto v = infer(*e.args[0], inputs, env);
      if (v.kind != Type::Kind::Vec) type_fail("foldl1 over non-vector " + v.str());
      return Type::scalar();
    }
    case Expr::Kind::Let: {
      const auto mark = env.size();
      for (const auto& [name, value] : e.bindings) {
        auto t = infer(*value, inputs, env);
        env.emplace_back(name, t);
      }
      auto t = infer(*e.args[0], inputs, env);
      env.resize(mark);
      return t;
    }
    case Expr::Kind::Tuple: {
      Type t;
      t.kind = Type::Kind::Tuple;
      for (const auto& a : e.args) t.elems.push_back(infer(*a, inputs, env));
      return t;
    }
    case Expr::Kind::Proj: {
      auto t = infer(*e.args[0], inputs, env);
      if (t.kind != Type::Kind::Tuple || e.index >= t.elems.size()) type_fail("bad projection");
      return t.elems[e.index];
    }
  }
  type_fail("unknown expression");
}

using ValueEnv = std::vector<std::pair<std::string, Value>>;

const Value& lookup_value(const ValueEnv& env, const std::string& name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == name) return it->second;
  throw Error(ErrorCode::ShapeMismatch, "unbound variable '" + name + "'");
}

Value eval(const Expr& e, std::span<const Value> inputs, int width, ValueEnv& env);

std::uint64_t call(const Lambda& fn, std::initializer_list<std::uint64_t> args, int width) {
  ValueEnv local;
  auto it = args.begin();
  for (const auto& p : fn.params) local.emplace_back(p, Value::of(*it++));
  return eval(*fn.body, {}, width, local).scalar;
}

Value eval(const Expr& e, std::span<const Value> inputs, int width, ValueEnv& env) {
  const auto mask = width_mask(width);
  switch (e.kind) {
    case Expr::Kind::Input:
      if (e.index >= inputs.size()) throw Error(ErrorCode::ShapeMismatch, "missing input value");
      return inputs[e.index];
    case Expr::Kind::Const: return Value::of(e.value & mask);
    case Expr::Kind::Var: return lookup_value(env, e.name);
    case Expr::Kind::Prim: {
      auto a = eval(*e.args[0], inputs, width, env).scalar;
      auto b = eval(*e.args[1], inputs, width, env).scalar;
      return Value::of(apply_prim(e.op, a, b, width));
    }
    case Expr::Kind::Map: {
      auto v = eval(*e.args[0], inputs, width, env).vec;
      for (auto& x : v) x = call(*e.fn, {x}, width);
      return Value::of(std::move(v));
    }
    case Expr::Kind::ZipWith: {
      const auto a = eval(*e.args[0], inputs, width, env).vec;
      const auto b = eval(*e.args[1], inputs, width, env).vec;
      if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "zipWith length mismatch");
      std::vector<std::uint64_t> out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = call(*e.fn, {a[i], b[i]}, width);
      return Value::of(std::move(out));
    }
    case Expr::Kind::Foldl: {
      auto acc = eval(*e.args[0], inputs, width, env).scalar;
      for (auto x : eval(*e.args[1], inputs, width, env).vec) acc = call(*e.fn, {acc, x}, width);
      return Value::of(acc);
    }
    case Expr::Kind::Foldl1: {
      const auto v = eval(*e.args[0], inputs, width, env).vec;
      if (v.empty()) throw Error(ErrorCode::ShapeMismatch, "foldl1 over empty vector");
      auto acc = v[0];
      for (std::size_t i = 1; i < v.size(); ++i) acc = call(*e.fn, {acc, v[i]}, width);
      return Value::of(acc);
    }
    case Expr::Kind::Let: {
      const auto mark = env.size();
      for (const auto& [name, value] : e.bindings) {
        auto v = eval(*value, inputs, width, env);
        env.emplace_back(name, std::move(v));
      }
      auto r = eval(*e.args[0], inputs, width, env);
      env.resize(mark);
      return r;
    }
    case Expr::Kind::Tuple: {
      Value v;
      v.kind = Type::Kind::Tuple;
      for (const auto& a : e.args) v.tuple.push_back(eval(*a, inputs, width, env));
      return v;
    }
    case Expr::Kind::Proj: {
      auto t = eval(*e.args[0], inputs, width, env);
      return t.tuple.at(e.index);
    }
  }
  throw Error(ErrorCode::UnsupportedExpr, "unknown expression");
}

}  // namespace

ExprPtr Expr::input(std::size_t port) {
  Expr e;
  e.kind = Kind::Input;
  e.index = port;
  return make(std::move(e));
}
ExprPtr Expr::constant(std::uint64_t v) {
  Expr e;
  e.kind = Kind::Const;
  e.value = v;
  return make(std::move(e));
}
ExprPtr Expr::var(std::string name) {
  Expr e;
  e.kind = Kind::Var;
  e.name = std::move(name);
  return make(std::move(e));
}
ExprPtr Expr::prim(PrimOp op, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = Kind::Prim;
  e.op = op;
  e.args = {std::move(a), std::move(b)};
  return make(std::move(e));
}
ExprPtr Expr::map(std::shared_ptr<const Lambda> fn, ExprPtr v) {
  Expr e;
  e.kind = Kind::Map;
  e.fn = std::move(fn);
  e.args = {std::move(v)};
  return make(std::move(e));
}
ExprPtr Expr::zip_with(std::shared_ptr<const Lambda> fn, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = Kind::ZipWith;
  e.fn = std::move(fn);
  e.args = {std::move(a), std::move(b)};
  return make(std::move(e));
}
ExprPtr Expr::foldl(std::shared_ptr<const Lambda> fn, ExprPtr init, ExprPtr v) {
  Expr e;
  e.kind = Kind::Foldl;
  e.fn = std::move(fn);
  e.args = {std::move(init), std::move(v)};
  return make(std::move(e));
}
ExprPtr Expr::foldl1(std::shared_ptr<const Lambda> fn, ExprPtr v) {
  Expr e;
  e.kind = Kind::Foldl1;
  e.fn = std::move(fn);
  e.args = {std::move(v)};
  return make(std::move(e));
}
ExprPtr Expr::let(std::vector<std::pair<std::string, ExprPtr>> bindings, ExprPtr body) {
  Expr e;
  e.kind = Kind::Let;
  e.bindings = std::move(bindings);
  e.args = {std::move(body)};
  return make(std::move(e));
}
ExprPtr Expr::tuple(std::vector<ExprPtr> elems) {
  Expr e;
  e.kind = Kind::Tuple;
  e.args = std::move(elems);
  return make(std::move(e));
}
ExprPtr Expr::proj(std::size_t i, ExprPtr t) {
  Expr e;
  e.kind = Kind::Proj;
  e.index = i;
  e.args = {std::move(t)};
  return make(std::move(e));
}

ExprPtr parse_expr(std::string_view text) { return convert(Reader(text).read_all()); }

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::size_t Type::tokens() const {
  switch (kind) {
    case Kind::Scalar: return 1;
    case Kind::Vec: return length;
    case Kind::Tuple: {
      std::size_t n = 0;
      for (const auto& t : elems) n += t.tokens();
      return n;
    }
  }
  return 0;
}

std::string Type::str() const {
  switch (kind) {
    case Kind::Scalar: return "scalar";
    case Kind::Vec: return "vec" + std::to_string(length);
    case Kind::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < elems.size(); ++i) s += (i ? "," : "") + elems[i].str();
      return s + ")";
    }
  }
  return "?";
}

Type port_type(std::int64_t total) {
  return total == 1 ? Type::scalar() : Type::vec(static_cast<std::size_t>(total));
}

Type infer_type(const Expr& e, std::span<const Type> inputs) {
  TypeEnv env;
  return infer(e, inputs, env);
}

void Value::flatten_into(std::vector<std::uint64_t>& out) const {
  switch (kind) {
    case Type::Kind::Scalar: out.push_back(scalar); break;
    case Type::Kind::Vec: out.insert(out.end(), vec.begin(), vec.end()); break;
    case Type::Kind::Tuple:
      for (const auto& v : tuple) v.flatten_into(out);
      break;
  }
}

std::uint64_t width_mask(int width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

std::uint64_t apply_prim(PrimOp op, std::uint64_t a, std::uint64_t b, int width) {
  std::uint64_t r = 0;
  switch (op) {
    case PrimOp::Add: r = a + b; break;
    case PrimOp::Sub: r = a - b; break;
    case PrimOp::Mul: r = a * b; break;
    case PrimOp::Min: r = std::min(a, b); break;
    case PrimOp::Max: r = std::max(a, b); break;
    case PrimOp::Lt: r = a < b ? 1 : 0; break;
    case PrimOp::Eq: r = a == b ? 1 : 0; break;
  }
  return r & width_mask(width);
}

Value eval_expr(const Expr& e, std::span<const Value> inputs, int width) {
  ValueEnv env;
  return eval(e, inputs, width, env);
}

ScalarPtr ScalarExpr::operand(std::size_t slot) {
  ScalarExpr e;
  e.kind = Kind::Operand;
  e.slot = slot;
  return std::make_shared<const ScalarExpr>(std::move(e));
}
ScalarPtr ScalarExpr::constant(std::uint64_t v) {
  ScalarExpr e;
  e.kind = Kind::Const;
  e.value = v;
  return std::make_shared<const ScalarExpr>(std::move(e));
}
ScalarPtr ScalarExpr::prim(PrimOp op, ScalarPtr a, ScalarPtr b) {
  ScalarExpr e;
  e.kind = Kind::Prim;
  e.op = op;
  e.a = std::move(a);
  e.b = std::move(b);
  return std::make_shared<const ScalarExpr>(std::move(e));
}

std::uint64_t eval_scalar(const ScalarExpr& e, std::span<const std::uint64_t> operands, int width) {
  switch (e.kind) {
    case ScalarExpr::Kind::Operand: return operands[e.slot] & width_mask(width);
    case ScalarExpr::Kind::Const: return e.value & width_mask(width);
    case ScalarExpr::Kind::Prim:
      return apply_prim(e.op, eval_scalar(*e.a, operands, width), eval_scalar(*e.b, operands, width), width);
  }
  return 0;
}

namespace {
template <typename F>
void visit_unique(std::span<const ScalarPtr> roots, F&& f) {
  std::unordered_set<const ScalarExpr*> seen;
  std::vector<const ScalarExpr*> stack;
  for (const auto& r : roots) stack.push_back(r.get());
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    if (!n || !seen.insert(n).second) continue;
    f(*n);
    if (n->kind == ScalarExpr::Kind::Prim) {
      stack.push_back(n->a.get());
      stack.push_back(n->b.get());
    }
  }
}
}  // namespace

std::size_t count_ops(const ScalarPtr& root, PrimOp op) { return count_ops(std::span(&root, 1), op); }

std::size_t count_all_ops(const ScalarPtr& root) { return count_all_ops(std::span(&root, 1)); }

std::size_t count_ops(std::span<const ScalarPtr> roots, PrimOp op) {
  std::size_t n = 0;
  visit_unique(roots, [&](const ScalarExpr& e) { n += e.kind == ScalarExpr::Kind::Prim && e.op == op; });
  return n;
}

std::size_t count_all_ops(std::span<const ScalarPtr> roots) {
  std::size_t n = 0;
  visit_unique(roots, [&](const ScalarExpr& e) { n += e.kind == ScalarExpr::Kind::Prim; });
  return n;
}

std::vector<std::size_t> operand_slots(const ScalarPtr& root) {
  std::set<std::size_t> slots;
  visit_unique(std::span(&root, 1), [&](const ScalarExpr& e) {
    if (e.kind == ScalarExpr::Kind::Operand) slots.insert(e.slot);
  });
  return {slots.begin(), slots.end()};
}

}  // namespace sdfap
