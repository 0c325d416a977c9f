#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sdfap::rtl {

enum class BinOp { Add, Sub, Mul, Lt, Le, Ge, Eq, Ne, And, Or };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Width-annotated expression tree over ports, wires, registers and memories.
struct Expr {
  enum class Kind { Ref, Const, Binary, Mux, Slice, Concat, Index };
  Kind kind = Kind::Const;
  int width = 1;
  std::string name;         // Ref, Index (memory)
  std::uint64_t value = 0;  // Const
  BinOp op = BinOp::Add;
  int lo = 0;               // Slice
  std::vector<ExprPtr> args;  // Binary a b; Mux sel a b; Slice x; Concat msb..lsb; Index addr
};

ExprPtr ref(std::string name, int width);
ExprPtr lit(std::uint64_t v, int width);
// Comparisons yield 1 bit; arithmetic keeps the operand width.
ExprPtr bin(BinOp op, ExprPtr a, ExprPtr b);
ExprPtr mux(ExprPtr sel, ExprPtr a, ExprPtr b);  // sel ? a : b
ExprPtr slice(ExprPtr x, int lo, int width);
ExprPtr concat(std::vector<ExprPtr> msb_first);
ExprPtr index(std::string memory, int width, ExprPtr addr);
// Zero-extends or truncates to `width`.
ExprPtr resize(ExprPtr x, int width);

enum class Dir { In, Out };

struct Port {
  std::string name;
  Dir dir = Dir::In;
  int width = 1;
};

struct Wire {
  std::string name;
  int width = 1;
  ExprPtr value;  // null when driven by an instance output
};

// Synchronous, active-high reset.
struct Register {
  std::string name;
  int width = 1;
  std::uint64_t reset = 0;
  ExprPtr next;
  ExprPtr enable;  // null: always load
};

struct MemoryWrite {
  ExprPtr enable, addr, data;
};

struct Memory {
  std::string name;
  int width = 1;
  int depth = 1;
  std::string style;  // synthesis hint, e.g. "block" or "registers"
  std::vector<MemoryWrite> writes;
};

struct Instance {
  std::string module;
  std::string name;
  std::vector<std::pair<std::string, ExprPtr>> connections;  // port -> driver, or wire for outputs
};

struct Module {
  std::string name;
  std::vector<Port> ports;
  std::vector<Wire> wires;
  std::vector<Register> registers;
  std::vector<Memory> memories;
  std::vector<Instance> instances;
  std::map<std::string, std::string> params;  // descriptive, for the manifest
  // Output ports are driven by assignments keyed by port name.
  std::map<std::string, ExprPtr> outputs;
};

struct Design {
  std::vector<Module> modules;
  std::string top;

  const Module* find(const std::string& name) const;
};

// Structural checks: references resolve, widths agree, instances name
// defined modules with matching port widths, every output is driven.
std::vector<std::string> validate(const Design& d);

struct VerilogFile {
  std::string name;  // "<module>.v"
  std::string text;
};

// Deterministic Verilog-2001; one file per module in design order.
std::vector<VerilogFile> emit_verilog(const Design& d);
std::string emit_module(const Module& m);

}  // namespace sdfap::rtl
