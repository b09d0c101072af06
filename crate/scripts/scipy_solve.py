#!/usr/bin/env python3
"""Solve an LP file (the subset pwlmilp writes) with scipy's HiGHS MILP.

usage: scipy_solve.py MODEL.lp SOLUTION.sol [TIME_LIMIT_SECONDS]

The solution file holds `status <s>`, `objective <v>` and one
`<name> <value>` line per column.
"""
import math
import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

SECTIONS = {
    "minimize": "obj", "minimise": "obj", "min": "obj",
    "maximize": "obj", "maximise": "obj", "max": "obj",
    "subject to": "rows", "such that": "rows", "st": "rows", "s.t.": "rows",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "generals": "gen", "general": "gen", "gen": "gen",
    "end": "end",
}
SENSES = {"<=": "le", "=<": "le", "<": "le", ">=": "ge", "=>": "ge", ">": "ge", "=": "eq"}


def num(tok):
    t = tok.lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    return float(tok)


def parse(text):
    maximize = False
    sec = None
    chunks = {"obj": [], "rows": [], "bounds": [], "bin": [], "gen": []}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        key = line.lower()
        if key in SECTIONS:
            sec = SECTIONS[key]
            if sec == "obj" and key.startswith("max"):
                maximize = True
            continue
        if sec in chunks:
            chunks[sec].append(line)
    cols = {}
    lb, ub, integer = [], [], []

    def col(name):
        if name not in cols:
            cols[name] = len(cols)
            lb.append(0.0)
            ub.append(math.inf)
            integer.append(0)
        return cols[name]

    for line in chunks["bounds"]:
        t = line.split()
        if len(t) == 2 and t[1].lower() == "free":
            j = col(t[0]); lb[j] = -math.inf; ub[j] = math.inf
        elif len(t) == 5:
            j = col(t[2]); lb[j] = num(t[0]); ub[j] = num(t[4])
        elif len(t) == 3:
            j = col(t[0]); v = num(t[2]); s = SENSES[t[1]]
            if s == "ge":
                lb[j] = v
            elif s == "le":
                ub[j] = v
            else:
                lb[j] = ub[j] = v
        else:
            raise ValueError("bad bound: " + line)
    for line in chunks["bin"]:
        for name in line.split():
            j = col(name); integer[j] = 1; lb[j] = max(lb[j], 0.0); ub[j] = min(ub[j], 1.0)
    for line in chunks["gen"]:
        for name in line.split():
            integer[col(name)] = 1

    def terms(tokens):
        out = []
        i = 0
        while i < len(tokens):
            sign = 1.0
            if tokens[i] in ("+", "-"):
                sign = -1.0 if tokens[i] == "-" else 1.0
                i += 1
            coef = 1.0
            try:
                coef = float(tokens[i]); i += 1
            except ValueError:
                pass
            out.append((col(tokens[i]), sign * coef))
            i += 1
        return out

    obj_tokens = [t for t in " ".join(chunks["obj"]).split() if not t.endswith(":")]
    objective = terms(obj_tokens)
    rows = []
    tokens = " ".join(chunks["rows"]).split()
    i = 0
    while i < len(tokens):
        if tokens[i].endswith(":"):
            i += 1
        start = i
        while tokens[i] not in SENSES:
            i += 1
        body = terms(tokens[start:i])
        rows.append((body, SENSES[tokens[i]], num(tokens[i + 1])))
        i += 2
    return maximize, cols, np.array(lb), np.array(ub), np.array(integer), objective, rows


def main():
    lp_path, sol_path = sys.argv[1], sys.argv[2]
    limit = float(sys.argv[3]) if len(sys.argv) > 3 else None
    maximize, cols, lb, ub, integer, objective, rows = parse(open(lp_path).read())
    n = len(cols)
    c = np.zeros(n)
    for j, a in objective:
        c[j] += a
    if maximize:
        c = -c
    constraints = []
    if rows:
        a = lil_matrix((len(rows), n))
        lo = np.full(len(rows), -np.inf)
        hi = np.full(len(rows), np.inf)
        for r, (body, sense, rhs) in enumerate(rows):
            for j, v in body:
                a[r, j] += v
            if sense in ("le", "eq"):
                hi[r] = rhs
            if sense in ("ge", "eq"):
                lo[r] = rhs
        constraints.append(LinearConstraint(a.tocsr(), lo, hi))
    options = {"time_limit": limit} if limit else {}
    res = milp(c, constraints=constraints, integrality=integer, bounds=Bounds(lb, ub), options=options)
    status = {0: "optimal", 1: "timeout", 2: "infeasible", 3: "unbounded"}.get(res.status, "error")
    if status == "timeout" and res.x is not None:
        status = "feasible"
    names = sorted(cols, key=cols.get)
    with open(sol_path, "w") as f:
        f.write("status %s\n" % status)
        if res.x is not None:
            f.write("objective %r\n" % (-res.fun if maximize else res.fun))
            for name in names:
                f.write("%s %r\n" % (name, float(res.x[cols[name]])))


if __name__ == "__main__":
    main()
