from ...lengths import isolength_check
from ...permcat import get_pair
from ...utils import render_table
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "Compare closed-lift counts of both members for every word up to a length"

    def add_arguments(self, parser):
        parser.add_argument("--pair", required=True)
        parser.add_argument("--maxlen", type=int, default=8)

    def run(self, pair, maxlen, **options):
        spec = get_pair(pair)
        result = isolength_check(spec, maxlen)
        rows = [(a.length, a.words, a.first, a.second, a.mismatches) for a in result.aggregates]
        self.stdout.write(render_table(["length", "words", "lifts first", "lifts second", "mismatches"], rows), ending="")
        if result:
            self.stdout.write(f"isolength up to length {maxlen}")
            return
        word = "".join(str(mu) for mu in result.witness)
        self.stdout.write(f"witness {word}: {result.witness_counts[0]} vs {result.witness_counts[1]}")
        self.fail(f"Pair {spec.name} is not isolength")
