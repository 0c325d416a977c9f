#include "sdfap/rtl.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sdfap::rtl {

ExprPtr ref(std::string name, int width) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Ref;
  e->name = std::move(name);
  e->width = width;
  return e;
}

ExprPtr lit(std::uint64_t v, int width) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->width = width;
  e->value = width >= 64 ? v : v & ((std::uint64_t{1} << width) - 1);
  return e;
}

namespace {

bool is_compare(BinOp op) {
  switch (op) {
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Ge:
    case BinOp::Eq:
    case BinOp::Ne: return true;
    default: return false;
  }
}

const char* symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&";
    case BinOp::Or: return "|";
  }
  return "?";
}

}  // namespace

ExprPtr bin(BinOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->op = op;
  e->width = is_compare(op) ? 1 : a->width;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr mux(ExprPtr sel, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Mux;
  e->width = a->width;
  e->args = {std::move(sel), std::move(a), std::move(b)};
  return e;
}

ExprPtr slice(ExprPtr x, int lo, int width) {
  if (lo == 0 && width == x->width) return x;
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Slice;
  e->lo = lo;
  e->width = width;
  e->args = {std::move(x)};
  return e;
}

ExprPtr concat(std::vector<ExprPtr> parts) {
  if (parts.size() == 1) return parts[0];
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Concat;
  e->width = 0;
  for (const auto& p : parts) e->width += p->width;
  e->args = std::move(parts);
  return e;
}

ExprPtr index(std::string memory, int width, ExprPtr addr) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Index;
  e->name = std::move(memory);
  e->width = width;
  e->args = {std::move(addr)};
  return e;
}

ExprPtr resize(ExprPtr x, int width) {
  if (x->width == width) return x;
  if (x->kind == Expr::Kind::Const) return lit(x->value, width);
  if (x->width > width) return slice(std::move(x), 0, width);
  return concat({lit(0, width - x->width), std::move(x)});
}

const Module* Design::find(const std::string& name) const {
  for (const auto& m : modules)
    if (m.name == name) return &m;
  return nullptr;
}

namespace {

struct Scope {
  std::map<std::string, int> signals;   // ports, wires, registers
  std::map<std::string, int> memories;
};

void check_expr(const Expr& e, const Scope& sc, const std::string& where, std::vector<std::string>& out) {
  auto fail = [&](const std::string& msg) { out.push_back(where + ": " + msg); };
  for (const auto& a : e.args) check_expr(*a, sc, where, out);
  switch (e.kind) {
    case Expr::Kind::Ref: {
      auto it = sc.signals.find(e.name);
      if (it == sc.signals.end()) fail("unknown signal '" + e.name + "'");
      else if (it->second != e.width) fail("'" + e.name + "' used with width " + std::to_string(e.width) +
                                           ", declared " + std::to_string(it->second));
      break;
    }
    case Expr::Kind::Const:
      if (e.width < 1) fail("constant of width < 1");
      break;
    case Expr::Kind::Binary:
      if (e.args[0]->width != e.args[1]->width) fail(std::string("operand widths differ for ") + symbol(e.op));
      if (e.width != (is_compare(e.op) ? 1 : e.args[0]->width)) fail("binary result width");
      break;
    case Expr::Kind::Mux:
      if (e.args[0]->width != 1) fail("mux select must be 1 bit");
      if (e.args[1]->width != e.width || e.args[2]->width != e.width) fail("mux branch widths differ");
      break;
    case Expr::Kind::Slice:
      if (e.lo < 0 || e.lo + e.width > e.args[0]->width) fail("slice out of range");
      if (e.args[0]->kind != Expr::Kind::Ref) fail("slices apply to named signals only");
      break;
    case Expr::Kind::Concat: {
      int w = 0;
      for (const auto& a : e.args) w += a->width;
      if (w != e.width) fail("concat width");
      break;
    }
    case Expr::Kind::Index: {
      auto it = sc.memories.find(e.name);
      if (it == sc.memories.end()) fail("unknown memory '" + e.name + "'");
      else if (it->second != e.width) fail("memory '" + e.name + "' read width");
      break;
    }
  }
}

}  // namespace

std::vector<std::string> validate(const Design& d) {
  std::vector<std::string> out;
  std::set<std::string> module_names;
  for (const auto& m : d.modules)
    if (!module_names.insert(m.name).second) out.push_back("duplicate module '" + m.name + "'");
  if (!d.find(d.top)) out.push_back("top module '" + d.top + "' is not defined");

  for (const auto& m : d.modules) {
    Scope sc;
    auto declare = [&](const std::string& n, int w) {
      if (w < 1) out.push_back(m.name + ": '" + n + "' has width < 1");
      if (!sc.signals.emplace(n, w).second || sc.memories.count(n))
        out.push_back(m.name + ": duplicate name '" + n + "'");
    };
    for (const auto& p : m.ports) declare(p.name, p.width);
    for (const auto& w : m.wires) declare(w.name, w.width);
    for (const auto& r : m.registers) declare(r.name, r.width);
    for (const auto& mem : m.memories)
      if (!sc.memories.emplace(mem.name, mem.width).second || sc.signals.count(mem.name))
        out.push_back(m.name + ": duplicate name '" + mem.name + "'");
    if ((!m.registers.empty() || !m.memories.empty()) && (!sc.signals.count("clk") || !sc.signals.count("reset")))
      out.push_back(m.name + ": sequential logic without clk/reset ports");

    std::set<std::string> driven;
    for (const auto& w : m.wires)
      if (w.value) {
        check_expr(*w.value, sc, m.name + "." + w.name, out);
        if (w.value->width != w.width) out.push_back(m.name + "." + w.name + ": assignment width mismatch");
        driven.insert(w.name);
      }
    for (const auto& r : m.registers) {
      const auto where = m.name + "." + r.name;
      if (!r.next) {
        out.push_back(where + ": register has no next value");
        continue;
      }
      check_expr(*r.next, sc, where, out);
      if (r.next->width != r.width) out.push_back(where + ": next-state width mismatch");
      if (r.enable) {
        check_expr(*r.enable, sc, where, out);
        if (r.enable->width != 1) out.push_back(where + ": enable must be 1 bit");
      }
    }
    for (const auto& mem : m.memories)
      for (const auto& w : mem.writes) {
        const auto where = m.name + "." + mem.name;
        check_expr(*w.enable, sc, where, out);
        check_expr(*w.addr, sc, where, out);
        check_expr(*w.data, sc, where, out);
        if (w.enable->width != 1 || w.data->width != mem.width) out.push_back(where + ": write port widths");
      }
    for (const auto& p : m.ports) {
      if (p.dir != Dir::Out) continue;
      auto it = m.outputs.find(p.name);
      if (it == m.outputs.end()) {
        out.push_back(m.name + ": output '" + p.name + "' is undriven");
        continue;
      }
      check_expr(*it->second, sc, m.name + "." + p.name, out);
      if (it->second->width != p.width) out.push_back(m.name + "." + p.name + ": output width mismatch");
    }
    for (const auto& [name, _] : m.outputs)
      if (std::none_of(m.ports.begin(), m.ports.end(), [&](const Port& p) { return p.name == name && p.dir == Dir::Out; }))
        out.push_back(m.name + ": assignment to non-output '" + name + "'");

    for (const auto& inst : m.instances) {
      const auto where = m.name + "." + inst.name;
      const auto* sub = d.find(inst.module);
      if (!sub) {
        out.push_back(where + ": unknown module '" + inst.module + "'");
        continue;
      }
      std::set<std::string> connected;
      for (const auto& [port, expr] : inst.connections) {
        auto pit = std::find_if(sub->ports.begin(), sub->ports.end(), [&](const Port& p) { return p.name == port; });
        if (pit == sub->ports.end()) {
          out.push_back(where + ": no port '" + port + "' on " + inst.module);
          continue;
        }
        connected.insert(port);
        check_expr(*expr, sc, where, out);
        if (expr->width != pit->width)
          out.push_back(where + "." + port + ": width " + std::to_string(expr->width) + " connected to port of width " +
                        std::to_string(pit->width));
        if (pit->dir == Dir::Out) {
          if (expr->kind != Expr::Kind::Ref) out.push_back(where + "." + port + ": output must connect to a wire");
          else if (!driven.insert(expr->name).second) out.push_back(where + "." + port + ": wire driven twice");
        }
      }
      for (const auto& p : sub->ports)
        if (!connected.count(p.name)) out.push_back(where + ": port '" + p.name + "' left unconnected");
    }
    for (const auto& w : m.wires)
      if (!driven.count(w.name)) out.push_back(m.name + "." + w.name + ": wire is undriven");
  }
  return out;
}

namespace {

std::string range(int width) { return width == 1 ? "" : "[" + std::to_string(width - 1) + ":0] "; }

std::string text(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ref: return e.name;
    case Expr::Kind::Const: return std::to_string(e.width) + "'d" + std::to_string(e.value);
    case Expr::Kind::Binary: return "(" + text(*e.args[0]) + " " + symbol(e.op) + " " + text(*e.args[1]) + ")";
    case Expr::Kind::Mux: return "(" + text(*e.args[0]) + " ? " + text(*e.args[1]) + " : " + text(*e.args[2]) + ")";
    case Expr::Kind::Slice: {
      // Verilog-2001 cannot slice an arbitrary expression; slices apply to names.
      const auto base = text(*e.args[0]);
      if (e.width == 1) return base + "[" + std::to_string(e.lo) + "]";
      return base + "[" + std::to_string(e.lo + e.width - 1) + ":" + std::to_string(e.lo) + "]";
    }
    case Expr::Kind::Concat: {
      std::string s = "{";
      for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + text(*e.args[i]);
      return s + "}";
    }
    case Expr::Kind::Index: return e.name + "[" + text(*e.args[0]) + "]";
  }
  return "";
}

}  // namespace

std::string emit_module(const Module& m) {
  std::ostringstream os;
  os << "module " << m.name << " (";
  for (std::size_t i = 0; i < m.ports.size(); ++i) {
    const auto& p = m.ports[i];
    os << (i ? "," : "") << "\n  " << (p.dir == Dir::In ? "input" : "output") << " wire " << range(p.width) << p.name;
  }
  os << (m.ports.empty() ? ");\n" : "\n);\n");

  for (const auto& w : m.wires) os << "  wire " << range(w.width) << w.name << ";\n";
  for (const auto& r : m.registers) os << "  reg " << range(r.width) << r.name << ";\n";
  for (const auto& mem : m.memories)
    os << "  (* ram_style = \"" << mem.style << "\" *) reg " << range(mem.width) << mem.name << " [0:" << mem.depth - 1
       << "];\n";

  for (const auto& w : m.wires)
    if (w.value) os << "  assign " << w.name << " = " << text(*w.value) << ";\n";
  for (const auto& p : m.ports)
    if (auto it = m.outputs.find(p.name); it != m.outputs.end())
      os << "  assign " << p.name << " = " << text(*it->second) << ";\n";

  for (const auto& r : m.registers) {
    os << "  always @(posedge clk) begin\n"
       << "    if (reset) " << r.name << " <= " << r.width << "'d" << r.reset << ";\n";
    if (r.enable)
      os << "    else if (" << text(*r.enable) << ") " << r.name << " <= " << text(*r.next) << ";\n";
    else
      os << "    else " << r.name << " <= " << text(*r.next) << ";\n";
    os << "  end\n";
  }
  for (const auto& mem : m.memories) {
    if (mem.writes.empty()) continue;
    os << "  always @(posedge clk) begin\n";
    for (const auto& w : mem.writes)
      os << "    if (" << text(*w.enable) << ") " << mem.name << "[" << text(*w.addr) << "] <= " << text(*w.data)
         << ";\n";
    os << "  end\n";
  }

  for (const auto& inst : m.instances) {
    os << "  " << inst.module << " " << inst.name << " (";
    for (std::size_t i = 0; i < inst.connections.size(); ++i)
      os << (i ? "," : "") << "\n    ." << inst.connections[i].first << "(" << text(*inst.connections[i].second) << ")";
    os << (inst.connections.empty() ? ");\n" : "\n  );\n");
  }
  os << "endmodule\n";
  return os.str();
}

std::vector<VerilogFile> emit_verilog(const Design& d) {
  std::vector<VerilogFile> files;
  for (const auto& m : d.modules) files.push_back({m.name + ".v", emit_module(m)});
  return files;
}

}  // namespace sdfap::rtl
