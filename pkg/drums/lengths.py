"""Closed-lift counts of words in the reflection group.

For a word ``w = (mu_1, ..., mu_m)`` the number of tiles that return to
themselves after reflecting across sides ``mu_1 .. mu_m`` is the trace of the
product of the gluing matrices. Two pairs with equal counts for every word have
equal length spectra. Products are composed as permutations, never as matrices.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .exceptions import IsodrumError
from .permcat import COLORS, AdjacencySet, PairSpec, Permutation

logger = logging.getLogger(__name__)

MAX_WORD_LENGTH = 12


def _word_permutation(adj: AdjacencySet, word: Sequence[int]) -> Permutation:
    if not word:
        raise IsodrumError("Invalid word: empty")
    result = Permutation.identity(adj.d)
    for mu in word:
        if mu not in COLORS:
            raise IsodrumError(f"Invalid letter {mu!r} in word {tuple(word)}")
        # M_a M_b is the matrix of b o a
        result = adj.gen(mu) * result
    return result


def lift_count(adj: AdjacencySet, word: Sequence[int]) -> int:
    """``Tr(M^(w_m) ... M^(w_1))`` as the fixed points of the composed permutation."""
    return len(_word_permutation(adj, word).fixed_points())


@dataclass
class LengthAggregate:
    length: int
    words: int = 0
    first: int = 0
    second: int = 0
    mismatches: int = 0


@dataclass
class IsolengthResult:
    isolength: bool
    max_len: int
    witness: Optional[Tuple[int, ...]] = None
    witness_counts: Optional[Tuple[int, int]] = None
    aggregates: List[LengthAggregate] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.isolength


def isolength_check(pair: PairSpec, max_len: int = 8) -> IsolengthResult:
    """Compare lift counts of both members for every word up to ``max_len``.

    Words are enumerated breadth first by length; the witness is the first mismatch in that order.
    """
    if not 1 <= max_len <= MAX_WORD_LENGTH:
        raise IsodrumError(f"Invalid max_len {max_len}: must lie in 1..{MAX_WORD_LENGTH}")
    M, N = pair.adjacency()
    aggregates: Dict[int, LengthAggregate] = {n: LengthAggregate(n) for n in range(1, max_len + 1)}
    witness = None
    witness_counts = None

    level = [((), Permutation.identity(M.d), Permutation.identity(N.d))]
    for length in range(1, max_len + 1):
        nxt = []
        agg = aggregates[length]
        for word, pm, pn in level:
            for mu in COLORS:
                qm = M.gen(mu) * pm
                qn = N.gen(mu) * pn
                extended = word + (mu,)
                a = len(qm.fixed_points())
                b = len(qn.fixed_points())
                agg.words += 1
                agg.first += a
                agg.second += b
                if a != b:
                    agg.mismatches += 1
                    if witness is None:
                        witness, witness_counts = extended, (a, b)
                nxt.append((extended, qm, qn))
        level = nxt

    result = IsolengthResult(witness is None, max_len, witness, witness_counts, list(aggregates.values()))
    if witness is None:
        logger.info("Pair %s: lift counts agree for all words up to length %d", pair.name, max_len)
    else:
        logger.info("Pair %s: lift counts differ on word %s (%d vs %d)", pair.name, witness, *witness_counts)
    return result
