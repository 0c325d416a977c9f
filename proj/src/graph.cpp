#include "sdfap/graph.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sdfap/error.hpp"

namespace sdfap {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Source: return "source";
    case NodeKind::Sink: return "sink";
    case NodeKind::Compute: return "compute";
  }
  return "?";
}

std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Fifo: return "fifo";
    case EdgeKind::PipelineRegister: return "pipeline_register";
    case EdgeKind::SinkWire: return "sink_wire";
  }
  return "?";
}

std::string_view to_string(OutputStyle s) {
  switch (s) {
    case OutputStyle::Elementwise: return "elementwise";
    case OutputStyle::Fold: return "fold";
    case OutputStyle::Combinational: return "combinational";
  }
  return "?";
}

std::optional<std::size_t> Graph::find(std::string_view node_name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == node_name) return i;
  return std::nullopt;
}

std::string Graph::edge_name(std::size_t e) const {
  const auto& ed = edges.at(e);
  std::ostringstream os;
  os << nodes[ed.from.node].name << '.' << ed.from.port << "->" << nodes[ed.to.node].name << '.' << ed.to.port;
  return os.str();
}

std::optional<std::size_t> Graph::find_edge(std::string_view name) const {
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edge_name(e) == name) return e;
  return std::nullopt;
}

std::vector<std::size_t> Graph::in_edges(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].to.node == node) out.push_back(e);
  return out;
}

std::vector<std::size_t> Graph::out_edges(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].from.node == node) out.push_back(e);
  return out;
}

std::optional<std::size_t> Graph::input_edge(std::size_t node, std::size_t port) const {
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].to.node == node && edges[e].to.port == port) return e;
  return std::nullopt;
}

std::optional<std::vector<std::size_t>> Graph::topological_order() const {
  std::vector<std::size_t> indeg(nodes.size(), 0);
  for (const auto& e : edges) ++indeg[e.to.node];
  // Min-index first keeps the order deterministic.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (indeg[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto n = ready.top();
    ready.pop();
    order.push_back(n);
    for (const auto& e : edges)
      if (e.from.node == n && --indeg[e.to.node] == 0) ready.push(e.to.node);
  }
  if (order.size() != nodes.size()) return std::nullopt;
  return order;
}

std::size_t Graph::compute_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.kind == NodeKind::Compute; }));
}

namespace {

PortRef parse_port(const Graph& g, const std::string& ref) {
  const auto dot = ref.rfind('.');
  const std::string node = dot == std::string::npos ? ref : ref.substr(0, dot);
  auto idx = g.find(node);
  if (!idx) throw Error(ErrorCode::UnknownNode, "edge endpoint '" + ref + "' names unknown node '" + node + "'");
  if (dot == std::string::npos) throw Error(ErrorCode::DanglingEdge, "edge endpoint '" + ref + "' lacks a port");
  std::size_t port = 0;
  const char* b = ref.data() + dot + 1;
  const char* end = ref.data() + ref.size();
  auto [p, ec] = std::from_chars(b, end, port);
  if (ec != std::errc() || p != end || b == end)
    throw Error(ErrorCode::DanglingEdge, "edge endpoint '" + ref + "' has a malformed port");
  return {*idx, port};
}

NodeKind parse_kind(const std::string& s) {
  if (s == "source") return NodeKind::Source;
  if (s == "sink") return NodeKind::Sink;
  if (s == "compute") return NodeKind::Compute;
  throw Error(ErrorCode::ParseError, "unknown node kind '" + s + "'");
}

std::vector<AccessPattern> to_patterns(const std::vector<std::vector<std::int64_t>>& raw, const std::string& where) {
  std::vector<AccessPattern> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    try {
      out.push_back(validate_pattern(raw[i]));
    } catch (const Error& err) {
      std::ostringstream os;
      os << where << " port " << i << ": " << err.detail();
      throw Error(err.code(), os.str());
    }
  }
  return out;
}

}  // namespace

Graph build_graph(const GraphDocument& doc) {
  Graph g;
  g.name = doc.name;
  g.iterations = doc.iterations;
  std::set<std::string> names;
  for (const auto& nd : doc.nodes) {
    if (!names.insert(nd.name).second) throw Error(ErrorCode::InvalidGraph, "duplicate node name '" + nd.name + "'");
    NodeSpec n;
    n.name = nd.name;
    n.kind = parse_kind(nd.kind);
    n.width = nd.width;
    n.patterns.inputs = to_patterns(nd.inputs, nd.name + " input");
    n.patterns.outputs = to_patterns(nd.outputs, nd.name + " output");
    if (n.kind == NodeKind::Compute) {
      if (nd.expr.empty()) throw Error(ErrorCode::ParseError, "compute node '" + nd.name + "' has no expr");
      try {
        n.body = parse_expr(nd.expr);
      } catch (const Error& err) {
        throw Error(ErrorCode::ParseError, "node '" + nd.name + "': " + err.detail());
      }
    }
    g.nodes.push_back(std::move(n));
  }
  std::set<std::pair<std::size_t, std::size_t>> fed;
  for (const auto& ed : doc.edges) {
    auto from = parse_port(g, ed.from);
    auto to = parse_port(g, ed.to);
    const auto& pn = g.nodes[from.node];
    const auto& cn = g.nodes[to.node];
    if (from.port >= pn.patterns.outputs.size())
      throw Error(ErrorCode::DanglingEdge, "'" + ed.from + "' is not an output port of '" + pn.name + "'");
    if (to.port >= cn.patterns.inputs.size())
      throw Error(ErrorCode::DanglingEdge, "'" + ed.to + "' is not an input port of '" + cn.name + "'");
    if (!fed.emplace(to.node, to.port).second)
      throw Error(ErrorCode::DuplicatePort, "input port '" + ed.to + "' is fed by more than one edge");
    EdgeSpec e{from, to, pn.patterns.outputs[from.port], cn.patterns.inputs[to.port], EdgeKind::Fifo};
    if (cn.kind == NodeKind::Sink)
      e.kind = EdgeKind::SinkWire;
    else if (pn.kind == NodeKind::Compute && e.pp == e.cp)
      e.kind = EdgeKind::PipelineRegister;
    g.edges.push_back(std::move(e));
  }
  return g;
}

RepetitionVector compute_repetition_vector(const Graph& g) {
  // Rates as reduced fractions num/den, propagated per connected component.
  const auto n = g.nodes.size();
  std::vector<std::int64_t> num(n, 0), den(n, 1);
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    adj[g.edges[e].from.node].push_back(e);
    adj[g.edges[e].to.node].push_back(e);
  }
  RepetitionVector r(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (num[root] != 0) continue;
    num[root] = 1;
    den[root] = 1;
    std::vector<std::size_t> component{root};
    std::queue<std::size_t> q;
    q.push(root);
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      for (auto e : adj[v]) {
        const auto& ed = g.edges[e];
        // r_from * pp = r_to * cp
        const bool forward = ed.from.node == v;
        const auto other = forward ? ed.to.node : ed.from.node;
        std::int64_t on = forward ? num[v] * ed.pp.total() : num[v] * ed.cp.total();
        std::int64_t od = forward ? den[v] * ed.cp.total() : den[v] * ed.pp.total();
        const auto gcd = std::gcd(on, od);
        on /= gcd;
        od /= gcd;
        if (num[other] == 0) {
          num[other] = on;
          den[other] = od;
          component.push_back(other);
          q.push(other);
        } else if (num[other] != on || den[other] != od) {
          throw Error(ErrorCode::InconsistentRates, "balance equations have no solution at edge " + g.edge_name(e));
        }
      }
    }
    std::int64_t l = 1;
    for (auto v : component) l = std::lcm(l, den[v]);
    std::int64_t gc = 0;
    for (auto v : component) gc = std::gcd(gc, num[v] * (l / den[v]));
    for (auto v : component) r[v] = num[v] * (l / den[v]) / gc;
  }
  return r;
}

namespace {

// Replaces let-bound variables by their (shared) definitions and resolves
// projections of literal tuples.
ExprPtr inline_lets(const ExprPtr& e, std::vector<std::pair<std::string, ExprPtr>>& env) {
  switch (e->kind) {
    case Expr::Kind::Input:
    case Expr::Kind::Const: return e;
    case Expr::Kind::Var:
      for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == e->name) return it->second;
      return e;
    case Expr::Kind::Let: {
      const auto mark = env.size();
      for (const auto& [name, value] : e->bindings) {
        auto v = inline_lets(value, env);
        env.emplace_back(name, v);
      }
      auto r = inline_lets(e->args[0], env);
      env.resize(mark);
      return r;
    }
    case Expr::Kind::Proj: {
      auto t = inline_lets(e->args[0], env);
      if (t->kind == Expr::Kind::Tuple && e->index < t->args.size()) return t->args[e->index];
      return Expr::proj(e->index, t);
    }
    default: {
      auto copy = std::make_shared<Expr>(*e);
      for (auto& a : copy->args) a = inline_lets(a, env);
      return copy;
    }
  }
}

std::vector<ExprPtr> output_exprs(const NodeSpec& n) {
  std::vector<std::pair<std::string, ExprPtr>> env;
  auto root = inline_lets(n.body, env);
  if (root->kind == Expr::Kind::Tuple) return root->args;
  return {root};
}

using ScalarEnv = std::vector<std::pair<std::string, ScalarPtr>>;

ScalarPtr sym_scalar(const Expr& e, ScalarEnv& env) {
  switch (e.kind) {
    case Expr::Kind::Const: return ScalarExpr::constant(e.value);
    case Expr::Kind::Var:
      for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == e.name) return it->second;
      throw Error(ErrorCode::UnsupportedExpr, "unbound variable '" + e.name + "' in lambda");
    case Expr::Kind::Prim: return ScalarExpr::prim(e.op, sym_scalar(*e.args[0], env), sym_scalar(*e.args[1], env));
    case Expr::Kind::Let: {
      const auto mark = env.size();
      for (const auto& [name, value] : e.bindings) {
        auto v = sym_scalar(*value, env);
        env.emplace_back(name, v);
      }
      auto r = sym_scalar(*e.args[0], env);
      env.resize(mark);
      return r;
    }
    default: throw Error(ErrorCode::UnsupportedExpr, "lambda body must be scalar arithmetic");
  }
}

ScalarPtr apply(const Lambda& fn, std::initializer_list<ScalarPtr> args) {
  ScalarEnv env;
  auto it = args.begin();
  for (const auto& p : fn.params) env.emplace_back(p, *it++);
  return sym_scalar(*fn.body, env);
}

// One element of a vector expression built from vector inputs, map and
// zipWith. nullopt when the expression is not elementwise.
std::optional<ScalarPtr> lane_of(const ExprPtr& e, std::span<const Type> inputs,
                                 std::unordered_map<const Expr*, ScalarPtr>& memo) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  std::optional<ScalarPtr> r;
  switch (e->kind) {
    case Expr::Kind::Input:
      if (e->index < inputs.size() && inputs[e->index].kind == Type::Kind::Vec) r = ScalarExpr::operand(e->index);
      break;
    case Expr::Kind::Map:
      if (auto a = lane_of(e->args[0], inputs, memo)) r = apply(*e->fn, {*a});
      break;
    case Expr::Kind::ZipWith: {
      auto a = lane_of(e->args[0], inputs, memo);
      auto b = lane_of(e->args[1], inputs, memo);
      if (a && b) r = apply(*e->fn, {*a, *b});
      break;
    }
    default: break;
  }
  if (r) memo.emplace(e.get(), *r);
  return r;
}

// Fully unrolled symbolic value.
struct Sym {
  Type::Kind kind = Type::Kind::Scalar;
  ScalarPtr s;
  std::vector<ScalarPtr> v;
  std::vector<Sym> t;

  void flatten_into(std::vector<ScalarPtr>& out) const {
    switch (kind) {
      case Type::Kind::Scalar: out.push_back(s); break;
      case Type::Kind::Vec: out.insert(out.end(), v.begin(), v.end()); break;
      case Type::Kind::Tuple:
        for (const auto& x : t) x.flatten_into(out);
        break;
    }
  }
};

Sym scalar_sym(ScalarPtr p) { return {Type::Kind::Scalar, std::move(p), {}, {}}; }

Sym unroll(const ExprPtr& e, std::span<const Sym> inputs, std::unordered_map<const Expr*, Sym>& memo) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  Sym r;
  switch (e->kind) {
    case Expr::Kind::Input: r = inputs[e->index]; break;
    case Expr::Kind::Const: r = scalar_sym(ScalarExpr::constant(e->value)); break;
    case Expr::Kind::Prim:
      r = scalar_sym(ScalarExpr::prim(e->op, unroll(e->args[0], inputs, memo).s, unroll(e->args[1], inputs, memo).s));
      break;
    case Expr::Kind::Map: {
      r.kind = Type::Kind::Vec;
      for (const auto& x : unroll(e->args[0], inputs, memo).v) r.v.push_back(apply(*e->fn, {x}));
      break;
    }
    case Expr::Kind::ZipWith: {
      const auto a = unroll(e->args[0], inputs, memo).v;
      const auto b = unroll(e->args[1], inputs, memo).v;
      r.kind = Type::Kind::Vec;
      for (std::size_t i = 0; i < a.size(); ++i) r.v.push_back(apply(*e->fn, {a[i], b[i]}));
      break;
    }
    case Expr::Kind::Foldl: {
      auto acc = unroll(e->args[0], inputs, memo).s;
      for (const auto& x : unroll(e->args[1], inputs, memo).v) acc = apply(*e->fn, {acc, x});
      r = scalar_sym(acc);
      break;
    }
    case Expr::Kind::Foldl1: {
      const auto v = unroll(e->args[0], inputs, memo).v;
      auto acc = v.at(0);
      for (std::size_t i = 1; i < v.size(); ++i) acc = apply(*e->fn, {acc, v[i]});
      r = scalar_sym(acc);
      break;
    }
    case Expr::Kind::Tuple:
      r.kind = Type::Kind::Tuple;
      for (const auto& a : e->args) r.t.push_back(unroll(a, inputs, memo));
      break;
    case Expr::Kind::Proj: r = unroll(e->args[0], inputs, memo).t.at(e->index); break;
    case Expr::Kind::Var:
    case Expr::Kind::Let: throw Error(ErrorCode::UnsupportedExpr, "unexpected binding after inlining");
  }
  memo.emplace(e.get(), r);
  return r;
}

bool contains_fold(const ExprPtr& e) {
  if (e->kind == Expr::Kind::Foldl || e->kind == Expr::Kind::Foldl1) return true;
  return std::any_of(e->args.begin(), e->args.end(), contains_fold);
}

std::vector<std::int64_t> cumulative(const AccessPattern& p) {
  std::vector<std::int64_t> c(p.length());
  std::partial_sum(p.phases().begin(), p.phases().end(), c.begin());
  return c;
}

// Phase in which cumulative count first exceeds `element`.
std::size_t crossing_phase(const std::vector<std::int64_t>& cum, std::int64_t element) {
  auto it = std::upper_bound(cum.begin(), cum.end(), element);
  return static_cast<std::size_t>(it - cum.begin());
}

std::vector<Type> input_types(const NodeSpec& n) {
  std::vector<Type> t;
  for (const auto& p : n.patterns.inputs) t.push_back(port_type(p.total()));
  return t;
}

// Elements available to a lane expression after each phase.
std::vector<std::int64_t> availability(const NodeSpec& n, const std::vector<std::size_t>& ports, std::int64_t cap) {
  std::vector<std::int64_t> avail(n.length(), cap);
  for (auto p : ports) {
    auto c = cumulative(n.patterns.inputs[p]);
    for (std::size_t k = 0; k < avail.size(); ++k) avail[k] = std::min(avail[k], c[k]);
  }
  return avail;
}

}  // namespace

std::size_t DatapathPlan::multipliers() const {
  std::size_t n = 0;
  for (const auto& o : outputs) n += o.multipliers;
  return n;
}

std::size_t DatapathPlan::accumulators() const {
  return static_cast<std::size_t>(std::count_if(outputs.begin(), outputs.end(), [](const auto& o) { return o.accumulator; }));
}

std::size_t DatapathPlan::buffer_elements() const {
  std::size_t n = 0;
  for (const auto& b : buffered) n += static_cast<std::size_t>(std::count(b.begin(), b.end(), true));
  return n;
}

DatapathPlan lower_hof_node(const NodeSpec& n) {
  if (n.kind != NodeKind::Compute || !n.body) throw Error(ErrorCode::UnsupportedExpr, "'" + n.name + "' is not a compute node");
  DatapathPlan plan;
  plan.node = n.name;
  plan.width = n.width;
  const auto types = input_types(n);
  const auto outs = output_exprs(n);
  if (outs.size() != n.patterns.outputs.size()) {
    std::ostringstream os;
    os << "'" << n.name << "' body yields " << outs.size() << " output(s) but " << n.patterns.outputs.size()
       << " output pattern(s) are declared";
    throw Error(ErrorCode::UnsupportedExpr, os.str());
  }

  std::vector<Sym> in_syms;
  std::size_t offset = 0;
  for (std::size_t p = 0; p < types.size(); ++p) {
    plan.input_offsets.push_back(offset);
    Sym s;
    if (types[p].kind == Type::Kind::Scalar) {
      s = scalar_sym(ScalarExpr::operand(offset++));
    } else {
      s.kind = Type::Kind::Vec;
      for (std::size_t i = 0; i < types[p].length; ++i) s.v.push_back(ScalarExpr::operand(offset++));
    }
    in_syms.push_back(std::move(s));
  }
  plan.buffered.resize(types.size());
  for (std::size_t p = 0; p < types.size(); ++p) plan.buffered[p].assign(types[p].tokens(), false);

  std::vector<std::vector<std::int64_t>> cons_cum;
  for (const auto& ip : n.patterns.inputs) cons_cum.push_back(cumulative(ip));
  auto mark_buffer = [&](std::size_t port, std::size_t element, std::size_t use_phase) {
    if (use_phase > crossing_phase(cons_cum[port], static_cast<std::int64_t>(element))) plan.buffered[port][element] = true;
  };

  std::unordered_map<const Expr*, ScalarPtr> lane_memo;
  std::unordered_map<const Expr*, Sym> sym_memo;
  for (std::size_t k = 0; k < outs.size(); ++k) {
    const auto& e = outs[k];
    const auto& pp = n.patterns.outputs[k];
    OutputPlan o;
    const bool fold_root = e->kind == Expr::Kind::Foldl || e->kind == Expr::Kind::Foldl1;
    std::optional<ScalarPtr> lane;
    std::optional<std::uint64_t> init;
    if (fold_root) {
      lane = lane_of(e->args.back(), types, lane_memo);
      if (e->kind == Expr::Kind::Foldl) {
        auto is = unroll(e->args[0], in_syms, sym_memo);
        if (operand_slots(is.s).empty()) init = eval_scalar(*is.s, {}, n.width);
        else lane.reset();
      }
    }
    if (fold_root && lane) {
      o.style = OutputStyle::Fold;
      o.lane = *lane;
      o.lane_inputs = operand_slots(*lane);
      o.fold1 = e->kind == Expr::Kind::Foldl1;
      o.init = init.value_or(0);
      o.combine = apply(*e->fn, {ScalarExpr::operand(0), ScalarExpr::operand(1)});
      o.fold_length = types[o.lane_inputs.front()].length;
      const auto avail = availability(n, o.lane_inputs, static_cast<std::int64_t>(o.fold_length));
      std::int64_t prev = 0;
      std::size_t chunks = 0, last_chunk = 0;
      for (std::size_t ph = 0; ph < avail.size(); ++ph) {
        const auto chunk = avail[ph] - prev;
        if (chunk > 0) {
          ++chunks;
          last_chunk = ph;
          o.lanes = std::max<std::size_t>(o.lanes, static_cast<std::size_t>(chunk));
        }
        prev = avail[ph];
      }
      const bool multi = chunks > 1;
      o.accumulator = multi || pp.last_nonzero_phase() > last_chunk;
      o.combiners = multi ? o.lanes : (o.fold1 ? o.lanes - 1 : o.lanes);
      o.multipliers = o.lanes * count_ops(o.lane, PrimOp::Mul) + o.combiners * count_ops(o.combine, PrimOp::Mul);
      o.operators = o.lanes * count_all_ops(o.lane) + o.combiners * count_all_ops(o.combine);
      for (std::size_t el = 0; el < o.fold_length; ++el) {
        const auto use = crossing_phase(avail, static_cast<std::int64_t>(el));
        for (auto p : o.lane_inputs) mark_buffer(p, el, use);
      }
    } else if (auto el = infer_type(*e, types); el.kind == Type::Kind::Vec && (lane = lane_of(e, types, lane_memo))) {
      o.style = OutputStyle::Elementwise;
      o.lane = *lane;
      o.lane_inputs = operand_slots(*lane);
      o.lanes = static_cast<std::size_t>(pp.rate());
      o.multipliers = o.lanes * count_ops(o.lane, PrimOp::Mul);
      o.operators = o.lanes * count_all_ops(o.lane);
      const auto prod = cumulative(pp);
      for (std::size_t x = 0; x < el.length; ++x) {
        const auto use = crossing_phase(prod, static_cast<std::int64_t>(x));
        for (auto p : o.lane_inputs) mark_buffer(p, x, use);
      }
    } else {
      o.style = OutputStyle::Combinational;
      unroll(e, in_syms, sym_memo).flatten_into(o.unrolled);
      o.lanes = static_cast<std::size_t>(pp.rate());
      o.multipliers = count_ops(std::span<const ScalarPtr>(o.unrolled), PrimOp::Mul);
      o.operators = count_all_ops(std::span<const ScalarPtr>(o.unrolled));
      const auto last_out = pp.last_nonzero_phase();
      std::set<std::size_t> slots;
      for (const auto& u : o.unrolled)
        for (auto s : operand_slots(u)) slots.insert(s);
      for (auto s : slots) {
        auto port = static_cast<std::size_t>(
            std::upper_bound(plan.input_offsets.begin(), plan.input_offsets.end(), s) - plan.input_offsets.begin() - 1);
        mark_buffer(port, s - plan.input_offsets[port], last_out);
      }
    }
    plan.outputs.push_back(std::move(o));
  }
  return plan;
}

std::vector<Diagnostic> validate_graph(const Graph& g) {
  std::vector<Diagnostic> diags;
  auto add = [&](std::string code, std::string subject, std::string msg) {
    diags.push_back({std::move(code), std::move(subject), std::move(msg)});
  };

  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    if (n.width < 1 || n.width > 64) add("WidthInvalid", n.name, "token width must be within 1..64");
    if (!n.patterns.consistent()) {
      std::ostringstream os;
      os << "patterns of one node must share a length:";
      for (const auto& p : n.patterns.inputs) os << " in" << p.str();
      for (const auto& p : n.patterns.outputs) os << " out" << p.str();
      add("PatternLengthMismatch", n.name, os.str());
    }
    switch (n.kind) {
      case NodeKind::Source:
        if (!n.patterns.inputs.empty() || n.patterns.outputs.size() != 1)
          add("PortShape", n.name, "a source has no inputs and exactly one output");
        break;
      case NodeKind::Sink:
        if (n.patterns.inputs.size() != 1 || !n.patterns.outputs.empty())
          add("PortShape", n.name, "a sink has exactly one input and no outputs");
        break;
      case NodeKind::Compute: break;
    }
    for (std::size_t p = 0; p < n.patterns.inputs.size(); ++p)
      if (!g.input_edge(i, p)) add("UnconnectedInput", n.name, "input port " + std::to_string(p) + " has no edge");
  }

  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    if (g.nodes[ed.from.node].width != g.nodes[ed.to.node].width)
      add("WidthMismatch", g.edge_name(e), "producer and consumer token widths differ");
  }

  const bool acyclic = g.topological_order().has_value();
  if (!acyclic) add("Cycle", g.name, "graph contains a cycle; feedback loops are not supported");

  if (acyclic) {
    try {
      (void)compute_repetition_vector(g);
    } catch (const Error& err) {
      add("InconsistentRates", g.name, err.detail());
    }
  }

  for (const auto& n : g.nodes) {
    if (n.kind != NodeKind::Compute || !n.patterns.consistent()) continue;
    const auto types = input_types(n);
    Type t;
    try {
      t = infer_type(*n.body, types);
    } catch (const Error& err) {
      add("ShapeMismatch", n.name, err.detail());
      continue;
    }
    const auto outs = output_exprs(n);
    if (outs.size() != n.patterns.outputs.size()) {
      std::ostringstream os;
      os << "body yields " << outs.size() << " output(s), " << n.patterns.outputs.size() << " declared";
      add("PortArityMismatch", n.name, os.str());
      continue;
    }
    bool totals_ok = true;
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const auto ot = infer_type(*outs[k], types);
      const auto want = n.patterns.outputs[k].total();
      if (ot.kind == Type::Kind::Tuple || static_cast<std::int64_t>(ot.tokens()) != want) {
        std::ostringstream os;
        os << "output " << k << " has type " << ot.str() << " but its pattern " << n.patterns.outputs[k].str()
           << " carries " << want << " token(s)";
        add("PatternTotalMismatch", n.name, os.str());
        totals_ok = false;
      }
    }
    if (!totals_ok) continue;

    const bool split = std::any_of(n.patterns.inputs.begin(), n.patterns.inputs.end(),
                                   [](const auto& p) { return p.nonzero_phases() > 1; });
    DatapathPlan plan;
    try {
      plan = lower_hof_node(n);
    } catch (const Error& err) {
      add("UnsupportedExpr", n.name, err.detail());
      continue;
    }
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const auto& e = outs[k];
      const auto& o = plan.outputs[k];
      const auto& pp = n.patterns.outputs[k];
      if (split) {
        bool nested = false;
        if (o.style == OutputStyle::Fold)
          nested = std::any_of(e->args.begin(), e->args.end(), contains_fold);
        else
          nested = contains_fold(e);
        if (nested)
          add("FoldNotAtRoot", n.name,
              "output " + std::to_string(k) +
                  " contains a fold below the root while its patterns split the firing; the accumulator state "
                  "cannot be derived (split the fold into its own node)");
      }
      switch (o.style) {
        case OutputStyle::Elementwise: {
          const auto prod = cumulative(pp);
          const auto avail = availability(n, o.lane_inputs, std::numeric_limits<std::int64_t>::max());
          for (std::size_t ph = 0; ph < prod.size(); ++ph)
            if (prod[ph] > avail[ph]) {
              add("CausalityViolation", n.name,
                  "output " + std::to_string(k) + " emits element(s) before their inputs arrive in phase " +
                      std::to_string(ph));
              break;
            }
          break;
        }
        case OutputStyle::Fold: {
          const auto avail = availability(n, o.lane_inputs, static_cast<std::int64_t>(o.fold_length));
          const auto complete = crossing_phase(avail, static_cast<std::int64_t>(o.fold_length) - 1);
          for (std::size_t ph = 0; ph < pp.length(); ++ph)
            if (pp[ph] != 0 && ph < complete) {
              add("FoldOutputEarly", n.name,
                  "output " + std::to_string(k) + " is produced in phase " + std::to_string(ph) +
                      " but the reduction completes in phase " + std::to_string(complete));
              break;
            }
          break;
        }
        case OutputStyle::Combinational: {
          std::size_t ready = 0;
          std::set<std::size_t> ports;
          for (const auto& u : o.unrolled)
            for (auto s : operand_slots(u))
              ports.insert(static_cast<std::size_t>(
                  std::upper_bound(plan.input_offsets.begin(), plan.input_offsets.end(), s) -
                  plan.input_offsets.begin() - 1));
          for (auto p : ports) ready = std::max(ready, n.patterns.inputs[p].last_nonzero_phase());
          for (std::size_t ph = 0; ph < pp.length(); ++ph)
            if (pp[ph] != 0 && ph < ready) {
              add("CausalityViolation", n.name,
                  "output " + std::to_string(k) + " is produced in phase " + std::to_string(ph) +
                      " before all of its inputs have arrived (phase " + std::to_string(ready) + ")");
              break;
            }
          break;
        }
      }
    }
  }
  return diags;
}

}  // namespace sdfap
