from ...permcat import GEN_KEYS, catalog, get_pair
from ...utils import render_table
from ..base import DrumsCommand


class Command(DrumsCommand):
    help = "List the bundled pairs or show one of them"

    def add_arguments(self, parser):
        parser.add_argument("action", choices=["list", "show"])
        parser.add_argument("name", nargs="?")

    def run(self, action, name=None, **options):
        if action == "list":
            pairs = catalog()
            rows = [(p.name, p.group_label, p.d, ",".join(p.flags) or "-") for p in pairs.values()]
            self.stdout.write(render_table(["pair", "group", "d", "flags"], rows), ending="")
            self.stdout.write(f"{len(pairs)} pairs")
            return
        if not name:
            self.usage_error("show needs a pair name")
        pair = get_pair(name)
        lines = [f"pair {pair.name}", f"group {pair.group_label}", f"d {pair.d}"]
        lines += [f"{key} {text}" for key, text in zip(GEN_KEYS, pair.cycles)]
        if pair.flags:
            lines.append(f"flags {', '.join(pair.flags)}")
        lines += [f"problem {problem}" for problem in pair.problems]
        if pair.gens_points is not None:
            g1, g2 = pair.graphs()
            lines.append(f"components {g1.components()}/{g2.components()}")
            lines.append(f"cycle rank {g1.cycle_rank()}/{g2.cycle_rank()}")
        self.stdout.write("\n".join(lines))
