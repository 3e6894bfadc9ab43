import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .billiards import BaseTile, unfold, weyl_data
from .exceptions import IsodrumError, LoopMismatch, NonPlanarDomain
from .lengths import isolength_check
from .permcat import CORRUPT, AdjacencySet, ColoredGraph, PairSpec, gluing_isospectral, graph_isospectral
from .projgeom import solve_transplantation, word_products_identity
from .utils import render_table

logger = logging.getLogger(__name__)

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"
WEYL_RTOL = 1e-12


@dataclass
class Stage:
    name: str
    status: str
    detail: str = ""


@dataclass
class VerificationReport:
    pair: str
    base: str
    stages: List[Stage] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.status != FAIL for s in self.stages)

    def add(self, name: str, status: str, detail: str = "") -> Stage:
        stage = Stage(name, status, detail)
        self.stages.append(stage)
        logger.info("Pair %s: %s %s %s", self.pair, name, status, detail)
        return stage

    def render(self) -> str:
        header = f"pair {self.pair}  base {self.base}\n"
        table = render_table(["stage", "status", "detail"], [(s.name, s.status, s.detail) for s in self.stages])
        return header + table + f"RESULT: {PASS if self.passed else FAIL}\n"


def default_base(pair: PairSpec) -> BaseTile:
    """The half-square for tree graphs, otherwise a triangle whose angles close the cycles."""
    graph, _ = pair.graphs()
    if graph.cycle_rank() == 0:
        return BaseTile.half_square()
    return BaseTile.for_graph(graph)


def _spectra_stage(M: AdjacencySet, N: AdjacencySet, g1: ColoredGraph, g2: ColoredGraph) -> Tuple[str, str]:
    """Gluing-matrix sums decide the stage; the plain involution graphs are reported alongside."""
    gluing = gluing_isospectral(M, N)
    plain = graph_isospectral(g1, g2)
    if plain:
        note = "plain graphs cospectral"
    else:
        length, a, b = plain.first_difference
        note = f"plain graphs differ at Tr A^{length} ({a} vs {b})"
    if not gluing:
        length, a, b = gluing.first_difference
        return FAIL, f"gluing sums differ at Tr S^{length} ({a} vs {b}); {note}"
    return PASS, f"Tr S^l equal for l=1..{M.d}; {note}"


def _weyl_stage(report: VerificationReport, pair: PairSpec, base: BaseTile) -> None:
    g1, g2 = pair.graphs()
    try:
        first, second = unfold(base, g1), unfold(base, g2)
    except NonPlanarDomain as exc:
        report.add("weyl", SKIP, f"not planar on {base.name}: {exc}")
        return
    except LoopMismatch as exc:
        report.add("weyl", FAIL, str(exc))
        return
    w1, w2 = weyl_data(first), weyl_data(second)
    agree = all(abs(a - b) <= WEYL_RTOL * max(1.0, abs(a)) for a, b in zip(w1.triple(), w2.triple()))
    if isinstance(w1.K, Fraction) and isinstance(w2.K, Fraction):
        agree = agree and w1.K == w2.K
    detail = f"area={w1.area:.12g} perimeter={w1.perimeter:.12g} K={w1.K}"
    if not agree:
        detail = f"{w1.triple()} vs {w2.triple()}"
    report.add("weyl", PASS if agree else FAIL, detail)


def verify_pair(pair: PairSpec, base: Optional[BaseTile] = None, max_len: int = 8) -> VerificationReport:
    """Run the six checks that certify a pair as transplantable and isospectral.

    Stages run in a fixed order; a corrupt pair fails its first stage and skips the rest.
    """
    report = VerificationReport(pair.name, base.name if base else "auto")
    stages = ["graphs", "transplantation", "graph-spectra", "isolength", "weyl"]

    if pair.corrupt or pair.gens_points is None:
        problems = "; ".join(pair.problems) or "unusable generators"
        report.add("involutions", FAIL, f"{CORRUPT}: {problems}")
        for name in stages:
            report.add(name, SKIP)
        return report
    report.add("involutions", PASS, f"d={pair.d}, 6 involutions")

    g1, g2 = pair.graphs()
    report.add(
        "graphs", PASS, f"connected, cycle rank {g1.cycle_rank()}/{g2.cycle_rank()}, {g1.edge_count} edges"
    )

    M, N = pair.adjacency()
    try:
        T = solve_transplantation(M, N)
    except IsodrumError as exc:
        report.add("transplantation", FAIL, str(exc))
    else:
        words = word_products_identity(T, M, N, max_len=max_len)
        detail = f"k={T.k} lambda={T.lam} word identity {'holds' if words else 'fails'} up to length {max_len}"
        report.add("transplantation", PASS if words else FAIL, detail)

    report.add("graph-spectra", *_spectra_stage(M, N, g1, g2))

    lengths = isolength_check(pair, max_len)
    if lengths:
        report.add("isolength", PASS, f"all words up to length {max_len}")
    else:
        report.add("isolength", FAIL, f"word {lengths.witness} gives {lengths.witness_counts}")

    try:
        tile = base or default_base(pair)
    except IsodrumError as exc:
        report.add("weyl", SKIP, f"no base tile: {exc}")
    else:
        if base is None:
            report.base = tile.name
        _weyl_stage(report, pair, tile)
    return report
