#!/usr/bin/env python3
"""Free-MPS solve adapter: reads a (MI)LP in free MPS format, solves it with
scipy's HiGHS interface, and writes the gasflex solution protocol:

    status optimal|feasible_limit|infeasible|unbounded|error
    objective <float>
    gap <float>
    rows <int>
    cols <int>
    var <name> <float>

Usage: solve_mps.py MODEL.mps OUT.sol [TIME_LIMIT_SEC] [MIP_REL_GAP]
"""
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

INF = float("inf")


def parse_mps(path):
    rows = []  # (name, sense)
    row_index = {}
    obj_row = None
    cols = {}  # name -> {row_name: coef}
    col_order = []
    integrality = {}
    rhs = {}
    bounds = {}  # name -> [lo, up]

    section = None
    integer_mode = False
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0].upper()
                continue
            fields = line.split()
            if section == "ROWS":
                sense, name = fields[0].upper(), fields[1]
                if sense == "N":
                    obj_row = name
                else:
                    row_index[name] = len(rows)
                    rows.append((name, sense))
            elif section == "COLUMNS":
                if len(fields) >= 3 and fields[1] == "'MARKER'":
                    integer_mode = fields[2] == "'INTORG'"
                    continue
                name = fields[0]
                if name not in cols:
                    cols[name] = {}
                    col_order.append(name)
                    integrality[name] = 1 if integer_mode else 0
                    bounds.setdefault(name, [0.0, INF])
                for rname, coef in zip(fields[1::2], fields[2::2]):
                    cols[name][rname] = cols[name].get(rname, 0.0) + float(coef)
            elif section == "RHS":
                for rname, val in zip(fields[1::2], fields[2::2]):
                    rhs[rname] = float(val)
            elif section == "BOUNDS":
                btype, name = fields[0].upper(), fields[2]
                b = bounds.setdefault(name, [0.0, INF])
                if btype == "UP":
                    b[1] = float(fields[3])
                elif btype == "LO":
                    b[0] = float(fields[3])
                elif btype == "FX":
                    b[0] = b[1] = float(fields[3])
                elif btype == "FR":
                    b[0], b[1] = -INF, INF
                elif btype == "MI":
                    b[0] = -INF
                elif btype == "PL":
                    b[1] = INF
                elif btype == "BV":
                    b[0], b[1] = 0.0, 1.0
                    integrality[name] = 1

    n = len(col_order)
    m = len(rows)
    c = np.zeros(n)
    data, ri, ci = [], [], []
    for j, name in enumerate(col_order):
        for rname, coef in cols[name].items():
            if rname == obj_row:
                c[j] = coef
            else:
                ri.append(row_index[rname])
                ci.append(j)
                data.append(coef)
    a = sparse.csr_matrix((data, (ri, ci)), shape=(m, n))

    row_lo = np.full(m, -INF)
    row_up = np.full(m, INF)
    for i, (name, sense) in enumerate(rows):
        b = rhs.get(name, 0.0)
        if sense == "L":
            row_up[i] = b
        elif sense == "G":
            row_lo[i] = b
        else:
            row_lo[i] = row_up[i] = b

    lo = np.array([bounds[name][0] for name in col_order])
    up = np.array([bounds[name][1] for name in col_order])
    integ = np.array([integrality[name] for name in col_order])
    return col_order, c, a, row_lo, row_up, lo, up, integ


def main():
    if len(sys.argv) < 3:
        sys.exit(__doc__)
    mps_path, out_path = sys.argv[1], sys.argv[2]
    time_limit = float(sys.argv[3]) if len(sys.argv) > 3 else 3600.0
    gap = float(sys.argv[4]) if len(sys.argv) > 4 else 1e-6

    names, c, a, row_lo, row_up, lo, up, integ = parse_mps(mps_path)
    constraints = LinearConstraint(a, row_lo, row_up) if a.shape[0] else ()
    res = milp(
        c,
        constraints=constraints,
        integrality=integ,
        bounds=Bounds(lo, up),
        options={"time_limit": time_limit, "mip_rel_gap": gap},
    )

    status = {0: "optimal", 1: "feasible_limit", 2: "infeasible", 3: "unbounded"}.get(
        res.status, "error"
    )
    if status == "feasible_limit" and res.x is None:
        status = "error"

    with open(out_path, "w") as out:
        out.write(f"status {status}\n")
        if res.x is not None:
            out.write(f"objective {res.fun:.17g}\n")
            out.write(f"gap {getattr(res, 'mip_gap', 0.0) or 0.0:.17g}\n")
        out.write(f"rows {a.shape[0]}\ncols {a.shape[1]}\n")
        if res.x is not None:
            for name, val in zip(names, res.x):
                out.write(f"var {name} {val:.17g}\n")


if __name__ == "__main__":
    main()
