#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sdfap {

enum class PrimOp { Add, Sub, Mul, Min, Max, Lt, Eq };

std::string_view to_string(PrimOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Closed scalar function: the body may reference only its parameters.
struct Lambda {
  std::vector<std::string> params;
  ExprPtr body;
};

// Node body AST. One struct with a kind tag; unused fields stay empty.
struct Expr {
  enum class Kind { Input, Const, Var, Prim, Map, ZipWith, Foldl, Foldl1, Let, Tuple, Proj };

  Kind kind = Kind::Const;
  std::size_t index = 0;    // Input port, Proj element
  std::uint64_t value = 0;  // Const
  std::string name;         // Var
  PrimOp op = PrimOp::Add;  // Prim
  std::shared_ptr<const Lambda> fn;  // Map, ZipWith, Foldl, Foldl1
  std::vector<ExprPtr> args;
  std::vector<std::pair<std::string, ExprPtr>> bindings;  // Let

  static ExprPtr input(std::size_t port);
  static ExprPtr constant(std::uint64_t v);
  static ExprPtr var(std::string name);
  static ExprPtr prim(PrimOp op, ExprPtr a, ExprPtr b);
  static ExprPtr map(std::shared_ptr<const Lambda> fn, ExprPtr v);
  static ExprPtr zip_with(std::shared_ptr<const Lambda> fn, ExprPtr a, ExprPtr b);
  static ExprPtr foldl(std::shared_ptr<const Lambda> fn, ExprPtr init, ExprPtr v);
  static ExprPtr foldl1(std::shared_ptr<const Lambda> fn, ExprPtr v);
  static ExprPtr let(std::vector<std::pair<std::string, ExprPtr>> bindings, ExprPtr body);
  static ExprPtr tuple(std::vector<ExprPtr> elems);
  static ExprPtr proj(std::size_t i, ExprPtr e);
};

// Parses the s-expression form, e.g. "(foldl1 + (zipWith * (in 0) (in 1)))".
// Throws Error{ParseError}.
ExprPtr parse_expr(std::string_view text);
std::string print_expr(const Expr& e);

struct Type {
  enum class Kind { Scalar, Vec, Tuple };
  Kind kind = Kind::Scalar;
  std::size_t length = 1;  // Vec
  std::vector<Type> elems;  // Tuple

  static Type scalar() { return {}; }
  static Type vec(std::size_t n) { return {Kind::Vec, n, {}}; }
  // Token count when flattened onto a port.
  std::size_t tokens() const;
  std::string str() const;
  friend bool operator==(const Type&, const Type&) = default;
};

// Port type for a pattern total: 1 -> scalar, n -> Vec n.
Type port_type(std::int64_t total);

// Throws Error{ShapeMismatch} with a readable message on ill-typed bodies.
Type infer_type(const Expr& e, std::span<const Type> inputs);

// Runtime value with fixed-width wrap-around arithmetic.
struct Value {
  Type::Kind kind = Type::Kind::Scalar;
  std::uint64_t scalar = 0;
  std::vector<std::uint64_t> vec;
  std::vector<Value> tuple;

  static Value of(std::uint64_t v) { return {Type::Kind::Scalar, v, {}, {}}; }
  static Value of(std::vector<std::uint64_t> v) { return {Type::Kind::Vec, 0, std::move(v), {}}; }
  void flatten_into(std::vector<std::uint64_t>& out) const;
  friend bool operator==(const Value&, const Value&) = default;
};

std::uint64_t width_mask(int width);
std::uint64_t apply_prim(PrimOp op, std::uint64_t a, std::uint64_t b, int width);

// Evaluates the whole body at once (no timing).
Value eval_expr(const Expr& e, std::span<const Value> inputs, int width);

// Scalar dataflow DAG used for lane bodies and unrolled logic. Operand slots
// are bound by the consumer (input port, accumulator, element, ...).
struct ScalarExpr;
using ScalarPtr = std::shared_ptr<const ScalarExpr>;
struct ScalarExpr {
  enum class Kind { Operand, Const, Prim };
  Kind kind = Kind::Const;
  std::size_t slot = 0;
  std::uint64_t value = 0;
  PrimOp op = PrimOp::Add;
  ScalarPtr a, b;

  static ScalarPtr operand(std::size_t slot);
  static ScalarPtr constant(std::uint64_t v);
  static ScalarPtr prim(PrimOp op, ScalarPtr a, ScalarPtr b);
};

std::uint64_t eval_scalar(const ScalarExpr& e, std::span<const std::uint64_t> operands, int width);
// Counts distinct Prim nodes with the given op (shared subtrees once).
std::size_t count_ops(const ScalarPtr& root, PrimOp op);
std::size_t count_all_ops(const ScalarPtr& root);
std::size_t count_ops(std::span<const ScalarPtr> roots, PrimOp op);
std::size_t count_all_ops(std::span<const ScalarPtr> roots);
// Operand slots referenced, ascending.
std::vector<std::size_t> operand_slots(const ScalarPtr& root);

}  // namespace sdfap
