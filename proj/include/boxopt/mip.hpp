// Copyright 2026 The boxopt Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BOXOPT_MIP_HPP_
#define BOXOPT_MIP_HPP_

// Linear model container shared by the three formulations, plus MPS export.
// Coefficients are exact integers (mm^3 or unit coefficients).

#include <cstdint>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "boxopt/error.hpp"
#include "boxopt/geometry.hpp"

namespace boxopt {

enum class ModelKind { kDirect, kMasterX, kMasterXY };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kDirect:
      return "direct";
    case ModelKind::kMasterX:
      return "benders-x";
    case ModelKind::kMasterXY:
      return "benders-xy";
  }
  return "?";
}

enum class VarType { kBinary, kContinuous };

// What a variable stands for; `a`/`b` below carry its indices.
enum class VarRole { kPacking, kBox, kCarton, kTheta };

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

enum class ConstraintKind {
  kShippable,           // sum_b x_pb = 1
  kBoxAvailable,        // x_pb <= y_b
  kCartonImpliesBox,    // z_k <= y_b for (k, b) in REL
  kBoxRequiresCarton,   // sum_{(k, b) in REL} z_k >= y_b
  kLimitedCartons,      // sum_k z_k = M
  kFixedBox,            // y_b = 1
  kFixedBoxCoverage,    // sum_{(k, b) in REL} z_k >= 1
  kOptimalityCut,       // theta - w'v >= s
};

struct Variable {
  std::string name;
  VarType type = VarType::kBinary;
  VarRole role = VarRole::kCarton;
  int a = -1;  // unit (packing), box, or carton index
  int b = -1;  // box index (packing only)
  double lower = 0.0;
  double upper = 1.0;
  Volume objective = 0;
};

struct Term {
  int var;
  Volume coef;
};

struct Constraint {
  std::string name;
  ConstraintKind kind;
  std::vector<Term> terms;
  Sense sense;
  Volume rhs;
};

class MipModel {
 public:
  explicit MipModel(ModelKind kind) : kind_(kind) {}

  ModelKind kind() const { return kind_; }

  int add_variable(Variable v) {
    if (index_.count(v.name) != 0) {
      throw DomainError("duplicate variable name " + v.name);
    }
    const int id = static_cast<int>(vars_.size());
    index_.emplace(v.name, id);
    vars_.push_back(std::move(v));
    return id;
  }

  void add_constraint(Constraint c) {
    for (const Term& t : c.terms) {
      if (t.var < 0 || t.var >= static_cast<int>(vars_.size())) {
        throw IndexError("constraint " + c.name + " references variable " +
                         std::to_string(t.var));
      }
    }
    constraints_.push_back(std::move(c));
  }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  int find(const std::string& name) const {
    const auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  std::size_t count(ConstraintKind kind) const {
    std::size_t n = 0;
    for (const Constraint& c : constraints_) n += c.kind == kind;
    return n;
  }

  std::size_t count(VarRole role) const {
    std::size_t n = 0;
    for (const Variable& v : vars_) n += v.role == role;
    return n;
  }

  Volume objective_value(const std::vector<double>& values) const {
    long double total = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      total += static_cast<long double>(vars_[i].objective) * values[i];
    }
    return static_cast<Volume>(total < 0 ? total - 0.5L : total + 0.5L);
  }

  // Names of constraints violated by `values` beyond `tol`.
  std::vector<std::string> violations(const std::vector<double>& values,
                                      double tol = 1e-6) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      const double v = values.at(i);
      if (v < vars_[i].lower - tol || v > vars_[i].upper + tol) {
        out.push_back("bounds:" + vars_[i].name);
      }
      if (vars_[i].type == VarType::kBinary &&
          std::abs(v - std::round(v)) > tol) {
        out.push_back("integrality:" + vars_[i].name);
      }
    }
    for (const Constraint& c : constraints_) {
      long double lhs = 0;
      for (const Term& t : c.terms) {
        lhs += static_cast<long double>(t.coef) * values[t.var];
      }
      const long double rhs = c.rhs;
      const bool ok = c.sense == Sense::kLessEqual      ? lhs <= rhs + tol
                      : c.sense == Sense::kGreaterEqual ? lhs >= rhs - tol
                                                        : std::abs(lhs - rhs) <= tol;
      if (!ok) out.push_back(c.name);
    }
    return out;
  }

 private:
  ModelKind kind_;
  std::vector<Variable> vars_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> index_;
};

// MPS column/row names are generated (C0000001, R0000001) to keep every name
// at eight characters; the readable names are listed in leading comments.
inline std::string mps_column_name(std::size_t i) {
  std::ostringstream s;
  s << 'C' << std::setw(7) << std::setfill('0') << i;
  return s.str();
}

inline std::string mps_row_name(std::size_t i) {
  std::ostringstream s;
  s << 'R' << std::setw(7) << std::setfill('0') << i;
  return s.str();
}

namespace mip_internal {

inline void field_line(std::ostream& out, const std::string& f1,
                       const std::string& f2, const std::string& f3,
                       const std::string& f4, const std::string& f5 = "",
                       const std::string& f6 = "") {
  // Fixed-format columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61.
  std::string line = " " + f1;
  auto pad_to = [&](std::size_t col) {
    if (line.size() < col - 1) line.resize(col - 1, ' ');
    else line += ' ';
  };
  pad_to(5);
  line += f2;
  if (!f3.empty()) {
    pad_to(15);
    line += f3;
  }
  if (!f4.empty()) {
    pad_to(25);
    line += f4;
  }
  if (!f5.empty()) {
    pad_to(40);
    line += f5;
    pad_to(50);
    line += f6;
  }
  out << line << '\n';
}

}  // namespace mip_internal

inline void write_mps(const MipModel& m, std::ostream& out,
                      const std::string& name = "BOXOPT") {
  using mip_internal::field_line;
  const auto& vars = m.variables();
  const auto& cons = m.constraints();
  out << "* model " << to_string(m.kind()) << '\n';
  for (std::size_t i = 0; i < vars.size(); ++i) {
    out << "* " << mps_column_name(i) << ' ' << vars[i].name << '\n';
  }
  for (std::size_t i = 0; i < cons.size(); ++i) {
    out << "* " << mps_row_name(i) << ' ' << cons[i].name << '\n';
  }
  out << "NAME          " << name << '\n';
  out << "ROWS\n";
  field_line(out, "N", "OBJ", "", "");
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const char* s = cons[i].sense == Sense::kLessEqual      ? "L"
                    : cons[i].sense == Sense::kGreaterEqual ? "G"
                                                            : "E";
    field_line(out, s, mps_row_name(i), "", "");
  }

  std::vector<std::vector<std::pair<std::size_t, Volume>>> columns(vars.size());
  for (std::size_t i = 0; i < cons.size(); ++i) {
    for (const Term& t : cons[i].terms) {
      if (t.coef != 0) columns[t.var].emplace_back(i, t.coef);
    }
  }
  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const bool is_int = vars[j].type == VarType::kBinary;
    if (is_int != in_int) {
      const std::string mk = "MARKER" + std::to_string(marker++);
      field_line(out, "", mk.substr(0, 8), "'MARKER'", "",
                 is_int ? "'INTORG'" : "'INTEND'", "");
      in_int = is_int;
    }
    const std::string col = mps_column_name(j);
    field_line(out, "", col, "OBJ", std::to_string(vars[j].objective));
    for (const auto& [row, coef] : columns[j]) {
      field_line(out, "", col, mps_row_name(row), std::to_string(coef));
    }
  }
  if (in_int) {
    field_line(out, "", "MARKER" + std::to_string(marker), "'MARKER'", "",
               "'INTEND'", "");
  }
  out << "RHS\n";
  for (std::size_t i = 0; i < cons.size(); ++i) {
    if (cons[i].rhs != 0) {
      field_line(out, "", "RHS", mps_row_name(i), std::to_string(cons[i].rhs));
    }
  }
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const std::string col = mps_column_name(j);
    if (vars[j].type == VarType::kBinary) {
      field_line(out, "UP", "BND", col, "1");
    } else {
      if (vars[j].lower != 0.0) {
        field_line(out, "LO", "BND", col, std::to_string(static_cast<Volume>(vars[j].lower)));
      }
      if (vars[j].upper != std::numeric_limits<double>::infinity()) {
        field_line(out, "UP", "BND", col, std::to_string(static_cast<Volume>(vars[j].upper)));
      }
    }
  }
  out << "ENDATA\n";
}

}  // namespace boxopt

#endif  // BOXOPT_MIP_HPP_
