"""Regenerate data/mutation_chain.json.

Searches depth 3 from the quartic product and from the degeneration
polynomial, joins the two trees at a shared normal form, and writes one edge
list rooted at the quartic product that reaches all four target polytopes.
Takes about a minute.
"""

import json
import logging
import sys

from toricstab import fixtures
from toricstab.mutation import mutation_search, reverse_edge, verify_chain
from toricstab.polytope import normal_form_key


def main(depth: int = 3) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    f = fixtures.quartic_product()
    g = fixtures.degeneration_polynomial()
    targets = {name: normal_form_key(fixtures.polytope(name)) for name in ("x224", "x224_r1", "x224_r2")}

    rf = mutation_search(f, depth)
    rg = mutation_search(g, depth)
    common = sorted(rf.keys() & rg.keys(), key=lambda k: (rf.node(k).depth + rg.node(k).depth, k))
    if not common:
        print("the two searches do not meet", file=sys.stderr)
        return 1
    meet = common[0]

    edges = list(rf.path_to(meet))
    edges += [reverse_edge(e) for e in reversed(rg.path_to(meet))]
    reached = {e.child for e in edges} | {rf.nodes[0].key}
    for name, key in sorted(targets.items()):
        if key in reached:
            continue
        if key in rf.keys():
            path = rf.path_to(key)
        elif key in rg.keys():
            path = rg.path_to(key)
        else:
            print(f"{name} not reached at depth {depth}", file=sys.stderr)
            return 1
        for e in path:
            if e.child not in reached:
                edges.append(e)
                reached.add(e.child)

    checks = verify_chain(f, edges)
    if not all(c.ok for c in checks):
        print("period mismatch along the chain", file=sys.stderr)
        return 1
    out = {
        "seed": "quartic_product",
        "period_order": 8,
        "targets": {name: [list(v) for v in key] for name, key in sorted(targets.items())},
        "edges": [e.to_json() for e in edges],
    }
    path = fixtures.data_path("mutation_chain.json")
    with open(str(path), "w") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")
    print(f"wrote {len(edges)} edges to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(*(int(a) for a in sys.argv[1:])))
