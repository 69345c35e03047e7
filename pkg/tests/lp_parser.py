"""
Minimal LP-format reader for tests.

Understands exactly the subset the exporter writes: backslash comments, one
objective, named constraints (possibly continued over several lines), a
Bounds section of `lo <= var <= hi` lines, a Binary section and End. Also
builds solver-free assignments for decoded sequences so that an exported
model can be checked for feasibility and objective value.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

OPERATORS = ("<=", ">=", "=")
SECTIONS = ("subject to", "bounds", "binary", "end")


@dataclass
class LpProblem:
    sense: str
    objective: Dict[str, float] = field(default_factory=dict)
    constraints: List[Tuple[str, Dict[str, float], str, float]] = field(default_factory=list)
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    binaries: List[str] = field(default_factory=list)
    comments: List[str] = field(default_factory=list)

    @property
    def variables(self) -> set:
        names = set(self.objective) | set(self.bounds) | set(self.binaries)
        for _, terms, _, _ in self.constraints:
            names |= set(terms)
        return names

    def objective_value(self, assignment: Dict[str, float]) -> float:
        return sum(coef * assignment.get(var, 0.0) for var, coef in self.objective.items())

    def violations(self, assignment: Dict[str, float], tol: float = 1e-9) -> List[str]:
        """Names of violated constraints, bounds and integrality conditions"""
        bad = []
        for name, terms, op, rhs in self.constraints:
            lhs = sum(coef * assignment.get(var, 0.0) for var, coef in terms.items())
            ok = {"<=": lhs <= rhs + tol, ">=": lhs >= rhs - tol, "=": abs(lhs - rhs) <= tol}[op]
            if not ok:
                bad.append(name)
        for var, (lo, hi) in self.bounds.items():
            if not lo - tol <= assignment.get(var, 0.0) <= hi + tol:
                bad.append(f"bound:{var}")
        for var in self.binaries:
            if assignment.get(var, 0.0) not in (0, 1):
                bad.append(f"binary:{var}")
        return bad


def _parse_expression(tokens: List[str]) -> Tuple[Dict[str, float], str, float]:
    terms: Dict[str, float] = {}
    sign, coef = 1.0, None
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token in ("+", "-"):
            sign = -1.0 if token == "-" else 1.0
        elif token in OPERATORS:
            return terms, token, float(tokens[i + 1])
        else:
            try:
                coef = float(token)
            except ValueError:
                terms[token] = terms.get(token, 0.0) + sign * (1.0 if coef is None else coef)
                sign, coef = 1.0, None
        i += 1
    return terms, "", 0.0


def parse_lp(text: str) -> LpProblem:
    """Parse LP text; raises ValueError on anything outside the supported subset"""
    lines = text.splitlines()
    problem = None
    section = None
    current: List[str] = []
    current_name = None

    def flush():
        nonlocal current, current_name
        if current_name is None:
            return
        terms, op, rhs = _parse_expression(current)
        if section == "objective":
            problem.objective = terms
        else:
            if op not in OPERATORS:
                raise ValueError(f"constraint {current_name} has no operator")
            problem.constraints.append((current_name, terms, op, rhs))
        current, current_name = [], None

    comments = []
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            comments.append(line[1:].strip())
            continue
        lowered = line.lower()
        if problem is None:
            if lowered not in ("maximize", "minimize"):
                raise ValueError(f"expected objective sense, got {line!r}")
            problem = LpProblem(sense=lowered, comments=comments)
            section = "objective"
            continue
        if lowered in SECTIONS:
            flush()
            section = lowered
            if section == "end":
                break
            continue
        if section in ("objective", "subject to"):
            if ":" in line:
                flush()
                current_name, rest = line.split(":", 1)
                current_name = current_name.strip()
                current = rest.split()
            else:
                current.extend(line.split())
        elif section == "bounds":
            lo, op1, var, op2, hi = line.split()
            if (op1, op2) != ("<=", "<="):
                raise ValueError(f"unsupported bound {line!r}")
            problem.bounds[var] = (float(lo), float(hi))
        elif section == "binary":
            problem.binaries.extend(line.split())
        else:
            raise ValueError(f"unexpected line {line!r}")
    else:
        raise ValueError("missing End")
    return problem


def p6_assignment(states: Sequence[int]) -> Dict[str, float]:
    """a and z values encoding a full state sequence"""
    assignment = {f"a_{t}_{s}": 1.0 for t, s in enumerate(states)}
    for t in range(1, len(states)):
        assignment[f"z_{t}_{states[t - 1]}_{states[t]}"] = 1.0
    return assignment


def p8_assignment(start: int, states: Sequence[int], n_samples: int) -> Dict[str, float]:
    """Arc values of the o -> d path that skips to `start`, follows `states` and skips to the end"""
    stop = start + len(states)
    arcs = []
    if start == 0:
        arcs.append(("o", f"v0_{states[0]}"))
    else:
        arcs.append(("o", "b0"))
        arcs.extend((f"b{t}", f"b{t + 1}") for t in range(start - 1))
        arcs.append((f"b{start - 1}", f"v{start}_{states[0]}"))
    for k in range(1, len(states)):
        arcs.append((f"v{start + k - 1}_{states[k - 1]}", f"v{start + k}_{states[k]}"))
    if stop == n_samples:
        arcs.append((f"v{stop - 1}_{states[-1]}", "d"))
    else:
        arcs.append((f"v{stop - 1}_{states[-1]}", f"bp{stop}"))
        arcs.extend((f"bp{t}", f"bp{t + 1}") for t in range(stop, n_samples - 1))
        arcs.append((f"bp{n_samples - 1}", "d"))
    return {f"y_{u}_{v}": 1.0 for u, v in arcs}
