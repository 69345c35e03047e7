"""
LP-format export of the exact optimization formulations, for cross-checking
the decoders with an external MILP solver, plus formulation size accounting.

Two formulations are emitted as solvable files:

* the linearized full-sequence problem: binary a_t_s, continuous z for every
  allowed transition pair with z <= a, z <= a', z >= a + a' - 1;
* the constrained shortest path over the extended decoding graph that
  selects the best window.

The quadratic window formulation is covered by size accounting only.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from models.core.constants import LP_SIGNIFICANT_DIGITS, LP_TERMS_PER_LINE
from models.core.sequences import ProbabilityMatrix, CyclicTransitionModel
from models.core.exceptions import ValidationError, dimension_mismatch, file_write_failed
from models.data_models import FormulationSizes
from models.window_management import WindowSpec

logger = logging.getLogger(__name__)

Term = Tuple[float, str]


class Formulation(str, Enum):
    P6 = "P6"
    P6_LINEARIZED = "P6_linearized"
    P7 = "P7"
    P7_LINEARIZED = "P7_linearized"
    P8 = "P8"


class CardinalityRule(str, Enum):
    """How the window-length constraint of the graph formulation is written

    window:   sum over sample-to-sample arcs of A equals W - 1. The o -> v and
              v -> d arcs belong to A but carry coefficient 0, so the rule is
              exact whether or not the window touches either end.
    literal:  sum over all arcs of A equals W, as printed.
    at_least: sum over all arcs of A is at least W.
    """
    WINDOW = "window"
    LITERAL = "literal"
    AT_LEAST = "at_least"


def formulation_sizes(n_samples: int, n_states: int, formulation: Union[Formulation, str]) -> FormulationSizes:
    """Closed-form variable and constraint counts of each formulation

    Raises:
        ValidationError: T < 1 or L < 2
    """
    T, L = n_samples, n_states
    if T < 1 or L < 2:
        raise ValidationError(f"Sizes need T >= 1 and L >= 2, got T={T}, L={L}", field_name="T,L", invalid_value=(T, L))
    formulation = Formulation(formulation)
    counts = {
        Formulation.P6: (T * L, T * L, 2 * T - 1),
        Formulation.P6_LINEARIZED: (T * L + 2 * L * (T - 1), T * L, 2 * T - 1 + 6 * L * (T - 1)),
        Formulation.P7: (T * L + T, T * L + T, 2 * T + 1),
        Formulation.P7_LINEARIZED: (
            T * L + T + (T - 1) * (2 + 2 * L) + 1,
            T * L + T,
            2 * T + 1 + 3 * (2 * T - 1) + 6 * L * (T - 1),
        ),
        Formulation.P8: (4 * T * L + 2 * (L + T - 1), 4 * T * L + 2 * (L + T - 1), 2 * (T - 1) + L * T + 3),
    }
    variables, binaries, constraints = counts[formulation]
    return FormulationSizes(
        formulation=formulation.value,
        variables=variables,
        binary_variables=binaries,
        constraints=constraints
    )


def extended_graph_arc_count(n_samples: int, n_states: int) -> int:
    """Arcs actually present in the extended window graph: 2LT + 2L(T-1) + 2T - 2"""
    T, L = n_samples, n_states
    return 4 * T * L - 2 * L + 2 * T - 2


def _number(value: float) -> str:
    return f"{value:.{LP_SIGNIFICANT_DIGITS}g}"


def _render_terms(terms: List[Term]) -> List[str]:
    pieces = []
    for i, (coef, var) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        magnitude = abs(coef)
        body = var if magnitude == 1 else f"{_number(magnitude)} {var}"
        if i == 0:
            pieces.append(body if sign == "+" else f"- {body}")
        else:
            pieces.append(f"{sign} {body}")
    return [" ".join(pieces[i:i + LP_TERMS_PER_LINE]) for i in range(0, len(pieces), LP_TERMS_PER_LINE)]


@dataclass
class LpModel:
    """In-memory LP model rendered to CPLEX LP text"""
    sense: str
    objective: List[Term] = field(default_factory=list)
    constraints: List[Tuple[str, List[Term], str, float]] = field(default_factory=list)
    bounds: List[Tuple[float, str, float]] = field(default_factory=list)
    binaries: List[str] = field(default_factory=list)
    comments: List[str] = field(default_factory=list)

    def add_constraint(self, name: str, terms: List[Term], op: str, rhs: float) -> None:
        self.constraints.append((name, terms, op, rhs))

    @property
    def variables(self) -> List[str]:
        seen: Dict[str, None] = {}
        for _, var in self.objective:
            seen.setdefault(var)
        for _, terms, _, _ in self.constraints:
            for _, var in terms:
                seen.setdefault(var)
        for _, var, _ in self.bounds:
            seen.setdefault(var)
        for var in self.binaries:
            seen.setdefault(var)
        return list(seen)

    def generate(self) -> str:
        """Render the model as LP text"""
        lines = [f"\\ {comment}" for comment in self.comments]
        lines.append(self.sense)
        rendered = _render_terms(self.objective)
        lines.append(f" obj: {rendered[0]}")
        lines.extend(f"      {chunk}" for chunk in rendered[1:])

        lines.append("Subject To")
        for name, terms, op, rhs in self.constraints:
            rendered = _render_terms(terms)
            if len(rendered) == 1:
                lines.append(f" {name}: {rendered[0]} {op} {_number(rhs)}")
                continue
            lines.append(f" {name}: {rendered[0]}")
            lines.extend(f"   {chunk}" for chunk in rendered[1:-1])
            lines.append(f"   {rendered[-1]} {op} {_number(rhs)}")

        if self.bounds:
            lines.append("Bounds")
            lines.extend(f" {_number(lo)} <= {var} <= {_number(hi)}" for lo, var, hi in self.bounds)

        if self.binaries:
            lines.append("Binary")
            for i in range(0, len(self.binaries), LP_TERMS_PER_LINE):
                lines.append(" " + " ".join(self.binaries[i:i + LP_TERMS_PER_LINE]))

        lines.append("End")
        return "\n".join(lines) + "\n"


def _size_comments(declared: FormulationSizes, model: LpModel) -> List[str]:
    return [
        f"declared: variables={declared.variables} binary={declared.binary_variables} "
        f"constraints={declared.constraints} (closed form, {declared.formulation})",
        f"emitted: variables={len(model.variables)} binary={len(model.binaries)} "
        f"constraints={len(model.constraints)}",
    ]


def _check_dimensions(P: ProbabilityMatrix, model: CyclicTransitionModel) -> None:
    if P.n_states != model.n_states:
        raise dimension_mismatch(P.n_states, model.n_states)


def build_p6_linearized(P: ProbabilityMatrix, model: CyclicTransitionModel) -> LpModel:
    """Full-sequence problem with linearized transition products

    a_t_s = 1 when sample t takes state s; z_t_s_sprime stands for
    a_(t-1)_s * a_t_sprime and exists only for allowed pairs.
    """
    _check_dimensions(P, model)
    T, L = P.n_samples, P.n_states
    lp = LpModel(sense="Maximize")
    a = [[f"a_{t}_{s}" for s in range(L)] for t in range(T)]

    lp.objective = [(float(P.p[t, s]), a[t][s]) for t in range(T) for s in range(L)]
    for t in range(T):
        lp.add_constraint(f"one_{t}", [(1.0, a[t][s]) for s in range(L)], "=", 1)

    for t in range(1, T):
        products = []
        for s in range(L):
            for nxt in model.successors(s):
                z = f"z_{t}_{s}_{nxt}"
                products.append(z)
                lp.add_constraint(f"lin_{t}_{s}_{nxt}_prev", [(1.0, z), (-1.0, a[t - 1][s])], "<=", 0)
                lp.add_constraint(f"lin_{t}_{s}_{nxt}_next", [(1.0, z), (-1.0, a[t][nxt])], "<=", 0)
                lp.add_constraint(f"lin_{t}_{s}_{nxt}_both", [(1.0, z), (-1.0, a[t - 1][s]), (-1.0, a[t][nxt])], ">=", -1)
                lp.bounds.append((0, z, 1))
        lp.add_constraint(f"trans_{t}", [(1.0, z) for z in products], "=", 1)

    lp.binaries = [name for row in a for name in row]
    declared = formulation_sizes(T, L, Formulation.P6_LINEARIZED)
    lp.comments = [
        "heartpath export: linearized full-sequence decoding problem",
        f"T={T} L={L}; indices are 0-based; a_t_s = 1 iff sample t takes state s",
        "z_t_s_sprime linearizes a_(t-1)_s * a_t_sprime for allowed transitions sprime in {s, s+1 mod L}",
        *_size_comments(declared, lp),
    ]
    return lp


def _vertex(kind: str, t: int, s: Optional[int] = None) -> str:
    return f"{kind}{t}" if s is None else f"{kind}{t}_{s}"


def build_p8(P: ProbabilityMatrix, model: CyclicTransitionModel, spec: WindowSpec,
             cardinality: Union[CardinalityRule, str] = CardinalityRule.WINDOW) -> LpModel:
    """Constrained shortest path over the extended window graph

    Vertices: o, d, v{t}_{s}, skip chain b{t} (t = 0..T-2, before the window)
    and tail chain bp{t} (t = 1..T-1, after the window). Each arc is a binary
    y_<tail>_<head>. Arcs entering v{t}_{s} carry distance p[t][s], including
    b{t-1} -> v{t}_{s} which opens a window after the first sample; all other
    arcs carry 0. The objective minimizes the negated distance.

    Raises:
        WindowTooLongError: W > T
    """
    _check_dimensions(P, model)
    cardinality = CardinalityRule(cardinality)
    T, L = P.n_samples, P.n_states
    width = spec.resolve(T, P.rate_hz)

    base_arcs: List[Tuple[str, str]] = []
    inner_arcs: List[Tuple[str, str]] = []
    extra_arcs: List[Tuple[str, str]] = []
    for s in range(L):
        base_arcs.append(("o", _vertex("v", 0, s)))
    for t in range(T - 1):
        for s in range(L):
            for nxt in model.successors(s):
                arc = (_vertex("v", t, s), _vertex("v", t + 1, nxt))
                base_arcs.append(arc)
                inner_arcs.append(arc)
    for s in range(L):
        base_arcs.append((_vertex("v", T - 1, s), "d"))

    if T >= 2:
        extra_arcs.append(("o", _vertex("b", 0)))
        for t in range(T - 1):
            for s in range(L):
                extra_arcs.append((_vertex("b", t), _vertex("v", t + 1, s)))
                extra_arcs.append((_vertex("v", t, s), _vertex("bp", t + 1)))
        for t in range(T - 2):
            extra_arcs.append((_vertex("b", t), _vertex("b", t + 1)))
        for t in range(1, T - 1):
            extra_arcs.append((_vertex("bp", t), _vertex("bp", t + 1)))
        extra_arcs.append((_vertex("bp", T - 1), "d"))

    def y(arc: Tuple[str, str]) -> str:
        return f"y_{arc[0]}_{arc[1]}"

    def distance(arc: Tuple[str, str]) -> float:
        head = arc[1]
        if head.startswith("v"):
            t, s = (int(x) for x in head[1:].split("_"))
            return float(P.p[t, s])
        return 0.0

    all_arcs = base_arcs + extra_arcs
    lp = LpModel(sense="Minimize")
    lp.objective = [(-distance(arc), y(arc)) for arc in all_arcs if distance(arc) != 0.0] or [(0.0, y(all_arcs[0]))]

    incoming: Dict[str, List[str]] = {}
    outgoing: Dict[str, List[str]] = {}
    for arc in all_arcs:
        outgoing.setdefault(arc[0], []).append(y(arc))
        incoming.setdefault(arc[1], []).append(y(arc))

    lp.add_constraint("source", [(1.0, var) for var in outgoing["o"]], "=", 1)
    lp.add_constraint("sink", [(1.0, var) for var in incoming["d"]], "=", 1)
    vertices = [_vertex("v", t, s) for t in range(T) for s in range(L)]
    vertices += [_vertex("b", t) for t in range(T - 1)]
    vertices += [_vertex("bp", t) for t in range(1, T)]
    for vertex in vertices:
        terms = [(1.0, var) for var in incoming[vertex]] + [(-1.0, var) for var in outgoing[vertex]]
        lp.add_constraint(f"flow_{vertex}", terms, "=", 0)

    if cardinality is CardinalityRule.WINDOW:
        inner = set(inner_arcs)
        terms = [(1.0 if arc in inner else 0.0, y(arc)) for arc in base_arcs]
        lp.add_constraint("card", terms, "=", width - 1)
        rule_text = (f"card: sample-to-sample arcs of A sum to W-1={width - 1}; "
                     "o->v and v->d arcs belong to A with coefficient 0, so interior and boundary windows count alike")
    elif cardinality is CardinalityRule.LITERAL:
        lp.add_constraint("card", [(1.0, y(arc)) for arc in base_arcs], "=", width)
        rule_text = f"card: all arcs of A sum to W={width} (literal reading)"
    else:
        lp.add_constraint("card", [(1.0, y(arc)) for arc in base_arcs], ">=", width)
        rule_text = f"card: all arcs of A sum to at least W={width}"

    lp.binaries = [y(arc) for arc in all_arcs]
    declared = formulation_sizes(T, L, Formulation.P8)
    lp.comments = [
        "heartpath export: constrained shortest path for optimal window selection",
        f"T={T} L={L} W={width}; indices are 0-based; optimum = -(best window likelihood)",
        "distances: arcs entering v{t}_{s} carry p[t][s] (including b{t-1} -> v{t}_{s}); all other arcs 0",
        f"cardinality rule {cardinality.value}; {rule_text}",
        *_size_comments(declared, lp),
        f"extended graph arc count 2LT+2L(T-1)+2T-2={extended_graph_arc_count(T, L)}",
    ]
    logger.debug(f"P8 export: {len(lp.variables)} variables, {len(lp.constraints)} constraints")
    return lp


def export_p6_linearized(P: ProbabilityMatrix, model: CyclicTransitionModel) -> str:
    return build_p6_linearized(P, model).generate()


def export_p8(P: ProbabilityMatrix, model: CyclicTransitionModel, spec: WindowSpec,
              cardinality: Union[CardinalityRule, str] = CardinalityRule.WINDOW) -> str:
    return build_p8(P, model, spec, cardinality).generate()


def write_lp(text: str, path: Union[str, Path]) -> Path:
    """Write LP text to `path`

    Raises:
        WriteFailureError: The file could not be written
    """
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as e:
        raise file_write_failed(str(path), str(e))
    logger.info(f"LP file written to {path}")
    return path
