#!/usr/bin/env python3
"""Solve an LP-format model emitted by `rsabench emit-lp` with scipy's MILP
solver (HiGHS) and print the optimal objective value.

Usage: lp_crosscheck.py MODEL.lp

Prints `objective N` on success, `infeasible` if the model has no integer
solution. Exits 2 if scipy is unavailable.
"""

import sys

try:
    import numpy as np
    from scipy import sparse
    from scipy.optimize import LinearConstraint, milp
except ImportError:
    print("scipy unavailable", file=sys.stderr)
    sys.exit(2)


def tokenize(text):
    for line in text.splitlines():
        if line.lstrip().startswith("\\"):
            continue
        yield from line.split()


def parse(text):
    """Returns (objective: {var: coef}, constraints: [(terms, op, rhs)])."""
    tokens = list(tokenize(text))
    # carve out the sections
    def index_of(seq):
        for i in range(len(tokens) - len(seq) + 1):
            if [t.lower() for t in tokens[i : i + len(seq)]] == seq:
                return i
        raise ValueError(f"section {seq} not found")

    i_min = index_of(["minimize"])
    i_st = index_of(["subject", "to"])
    i_bin = index_of(["binary"])
    i_end = index_of(["end"])

    def parse_terms(toks):
        terms = {}
        i = 0
        while i < len(toks):
            sign = 1.0
            if toks[i] == "+":
                i += 1
            elif toks[i] == "-":
                sign = -1.0
                i += 1
            coef = 1.0
            try:
                coef = float(toks[i])
                i += 1
            except ValueError:
                pass
            var = toks[i]
            i += 1
            terms[var] = terms.get(var, 0.0) + sign * coef
        return terms

    obj_toks = tokens[i_min:i_st]
    assert obj_toks[1] == "obj:", "objective must be named obj"
    objective = parse_terms(obj_toks[2:])

    constraints = []
    body = tokens[i_st + 2 : i_bin]
    current = None
    groups = []
    for t in body:
        if t.endswith(":"):
            current = []
            groups.append(current)
        else:
            assert current is not None, "constraint body before its label"
            current.append(t)
    for g in groups:
        op_idx = next(i for i, t in enumerate(g) if t in ("<=", ">=", "="))
        constraints.append((parse_terms(g[:op_idx]), g[op_idx], float(g[op_idx + 1])))

    binaries = set(tokens[i_bin + 1 : i_end])
    return objective, constraints, binaries


def solve(path):
    objective, constraints, binaries = parse(open(path).read())
    variables = sorted(
        binaries | set(objective) | {v for t, _, _ in constraints for v in t}
    )
    col = {v: i for i, v in enumerate(variables)}
    n = len(variables)

    c = np.zeros(n)
    for v, coef in objective.items():
        c[col[v]] = coef

    rows, cols, vals, lo, hi = [], [], [], [], []
    for i, (terms, op, rhs) in enumerate(constraints):
        for v, coef in terms.items():
            rows.append(i)
            cols.append(col[v])
            vals.append(coef)
        lo.append(rhs if op in ("=", ">=") else -np.inf)
        hi.append(rhs if op in ("=", "<=") else np.inf)
    a = sparse.csr_matrix((vals, (rows, cols)), shape=(len(constraints), n))

    res = milp(
        c=c,
        constraints=LinearConstraint(a, lo, hi),
        integrality=np.ones(n),
        bounds=(0, 1),
    )
    if res.status == 2:
        print("infeasible")
        return
    if not res.success:
        print(f"solver failure: {res.message}", file=sys.stderr)
        sys.exit(1)
    print(f"objective {round(res.fun)}")


if __name__ == "__main__":
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        sys.exit(2)
    solve(sys.argv[1])
