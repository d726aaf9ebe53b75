#!/usr/bin/env python3
"""Solve an LP file written by qmstp-lp with scipy's HiGHS backend.

Usage: solve_lp_scipy.py MODEL.lp SOLUTION.sol

Reads the subset of the CPLEX LP format produced by the Rust writer and
writes `status <Status>` followed by `name value` lines.
"""
import re
import sys

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

SENSES = {"<=": "L", "<": "L", "=<": "L", ">=": "G", ">": "G", "=>": "G", "=": "E"}


def num(tok):
    t = tok.lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return np.inf
    if t in ("-inf", "-infinity"):
        return -np.inf
    return float(tok)


def terms(toks, index, names):
    out, sign, coef, i = [], 1.0, None, 0
    while i < len(toks) and toks[i] not in SENSES:
        t = toks[i]
        if t == "+":
            sign = 1.0
        elif t == "-":
            sign = -sign
        else:
            try:
                v = float(t)
                if coef is None:
                    coef = v
                    i += 1
                    continue
            except ValueError:
                pass
            if t not in index:
                index[t] = len(names)
                names.append(t)
            out.append((index[t], sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
        i += 1
    return out, i


def parse(text):
    section, maximize = None, False
    obj_toks, con_toks, bound_lines = [], [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("minimize", "min", "maximize", "max"):
            maximize = low.startswith("max")
            section = "obj"
            continue
        if low in ("subject to", "st", "s.t."):
            section = "con"
            continue
        if low == "bounds":
            section = "bnd"
            continue
        if low == "end":
            section = "end"
            continue
        toks = line.replace(":", ": ").split()
        if section == "obj":
            obj_toks += toks
        elif section == "con":
            con_toks += toks
        elif section == "bnd":
            bound_lines.append(toks)

    index, names = {}, []
    if obj_toks and obj_toks[0].endswith(":"):
        obj_toks = obj_toks[1:]
    obj, _ = terms(obj_toks, index, names)
    rows = []
    i = 0
    while i < len(con_toks):
        if con_toks[i].endswith(":"):
            i += 1
        coeffs, used = terms(con_toks[i:], index, names)
        i += used
        sense = SENSES[con_toks[i]]
        i += 1
        sign = 1.0
        if con_toks[i] in ("+", "-"):
            sign = -1.0 if con_toks[i] == "-" else 1.0
            i += 1
        rows.append((coeffs, sense, sign * num(con_toks[i])))
        i += 1
    bounds = {}
    for toks in bound_lines:
        if len(toks) == 2 and toks[1].lower() == "free":
            bounds[toks[0]] = (-np.inf, np.inf)
        elif len(toks) == 5:
            bounds[toks[2]] = (num(toks[0]), num(toks[4]))
        else:
            name, op, val = toks
            lo, hi = bounds.get(name, (0.0, np.inf))
            v = num(val)
            if SENSES[op] == "L":
                hi = v
            elif SENSES[op] == "G":
                lo = v
            else:
                lo = hi = v
            bounds[name] = (lo, hi)
    return maximize, names, index, obj, rows, bounds


def main():
    model, out = sys.argv[1], sys.argv[2]
    maximize, names, index, obj, rows, bounds = parse(open(model).read())
    n = len(names)
    c = np.zeros(n)
    for j, a in obj:
        c[j] += a
    if maximize:
        c = -c
    ub_r, ub_c, ub_v, ub_b = [], [], [], []
    eq_r, eq_c, eq_v, eq_b = [], [], [], []
    for coeffs, sense, rhs in rows:
        if sense == "E":
            r = len(eq_b)
            for j, a in coeffs:
                eq_r.append(r); eq_c.append(j); eq_v.append(a)
            eq_b.append(rhs)
        else:
            s = 1.0 if sense == "L" else -1.0
            r = len(ub_b)
            for j, a in coeffs:
                ub_r.append(r); ub_c.append(j); ub_v.append(s * a)
            ub_b.append(s * rhs)
    a_ub = csr_matrix((ub_v, (ub_r, ub_c)), shape=(len(ub_b), n)) if ub_b else None
    a_eq = csr_matrix((eq_v, (eq_r, eq_c)), shape=(len(eq_b), n)) if eq_b else None
    bnds = [tuple(None if not np.isfinite(v) else v for v in bounds.get(nm, (0.0, np.inf))) for nm in names]
    res = linprog(c, A_ub=a_ub, b_ub=ub_b or None, A_eq=a_eq, b_eq=eq_b or None, bounds=bnds, method="highs")
    status = {0: "Optimal", 1: "IterationLimit", 2: "Infeasible", 3: "Unbounded"}.get(res.status, "Infeasible")
    with open(out, "w") as f:
        f.write(f"status {status}\n")
        if res.x is not None:
            for nm, v in zip(names, res.x):
                f.write(f"{nm} {float(v)!r}\n")


if __name__ == "__main__":
    main()
