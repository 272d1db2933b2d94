#!/usr/bin/env python3
# Copyright 2026 The boxopt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Solves an MPS model with scipy's HiGHS-based milp.

Usage: mps_milp.py MODEL.mps SOLUTION.sol

Writes "status <OPTIMAL|INFEASIBLE|LIMIT>", "objective <v>" and one
"<column> <value>" line per column.
"""

import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix


def read_mps(path):
    rows, senses, objective_row = [], {}, None
    cols, integer = [], []
    col_index = {}
    obj, entries, rhs = {}, [], {}
    lower, upper = {}, {}
    section, in_int = None, False
    with open(path) as f:
        for raw in f:
            if raw.startswith("*") or not raw.strip():
                continue
            if not raw[0].isspace():
                section = raw.split()[0]
                continue
            t = raw.split()
            if section == "ROWS":
                if t[0] == "N":
                    objective_row = t[1]
                else:
                    senses[t[1]] = t[0]
                    rows.append(t[1])
            elif section == "COLUMNS":
                if len(t) >= 3 and t[1] == "'MARKER'":
                    in_int = t[2] == "'INTORG'"
                    continue
                name = t[0]
                if name not in col_index:
                    col_index[name] = len(cols)
                    cols.append(name)
                    integer.append(in_int)
                for r, v in zip(t[1::2], t[2::2]):
                    if r == objective_row:
                        obj[name] = float(v)
                    else:
                        entries.append((r, name, float(v)))
            elif section == "RHS":
                for r, v in zip(t[1::2], t[2::2]):
                    rhs[r] = float(v)
            elif section == "BOUNDS":
                kind, name = t[0], t[2]
                value = float(t[3]) if len(t) > 3 else None
                if kind == "UP":
                    upper[name] = value
                elif kind == "LO":
                    lower[name] = value
                elif kind == "FX":
                    lower[name] = upper[name] = value
                elif kind == "BV":
                    lower[name], upper[name] = 0.0, 1.0
                elif kind == "FR":
                    lower[name] = -np.inf
    return rows, senses, cols, integer, obj, entries, rhs, lower, upper


def main(argv):
    if len(argv) != 3:
        sys.stderr.write(__doc__)
        return 2
    rows, senses, cols, integer, obj, entries, rhs, lower, upper = read_mps(argv[1])
    row_index = {r: i for i, r in enumerate(rows)}
    col_index = {c: j for j, c in enumerate(cols)}
    c = np.array([obj.get(name, 0.0) for name in cols])
    lb = np.array([lower.get(name, 0.0) for name in cols])
    ub = np.array([upper.get(name, np.inf) for name in cols])
    constraints = []
    if rows:
        a = coo_matrix(
            ([v for _, _, v in entries],
             ([row_index[r] for r, _, _ in entries],
              [col_index[n] for _, n, _ in entries])),
            shape=(len(rows), len(cols)))
        b = np.array([rhs.get(r, 0.0) for r in rows])
        lo = np.where([senses[r] in ("G", "E") for r in rows], b, -np.inf)
        hi = np.where([senses[r] in ("L", "E") for r in rows], b, np.inf)
        constraints.append(LinearConstraint(a.tocsr(), lo, hi))
    res = milp(c, constraints=constraints, integrality=np.array(integer, int),
               bounds=Bounds(lb, ub),
               options={"mip_rel_gap": 0.0})
    with open(argv[2], "w") as out:
        if res.status == 0:
            out.write("status OPTIMAL\n")
            out.write("objective %r\n" % float(res.fun))
            for name, v in zip(cols, res.x):
                out.write("%s %r\n" % (name, float(v)))
        elif res.status == 2:
            out.write("status INFEASIBLE\n")
        else:
            out.write("status LIMIT\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
