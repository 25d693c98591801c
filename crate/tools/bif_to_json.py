#!/usr/bin/env python3
"""Convert a discrete BIF network file into the hnet fixture JSON schema.

Usage: python3 tools/bif_to_json.py alarm.bif > fixtures/alarm.json

The output lists nodes in file order. Each CPT is re-ordered so rows follow
mixed-radix enumeration of the parent states with the first parent varying
slowest, which is what `hnet sample` expects. Tables written with the
`table` keyword in BIF use the opposite convention (first parent fastest)
and are transposed accordingly.

The Alarm fixture in fixtures/ was produced from the copy of alarm.bif that
ships with the pgmpy wheel (pgmpy/utils/example_models/alarm.bif.gz).
"""

import itertools
import json
import re
import sys

VARIABLE = re.compile(
    r"variable\s+([^\s{]+)\s*\{[^}]*?type\s+discrete\s*\[\s*\d+\s*\]\s*\{([^}]*)\}", re.S
)
PROBABILITY = re.compile(r"probability\s*\(\s*([^)]*?)\s*\)\s*\{(.*?)\}", re.S)


def parse(text):
    states = {}
    order = []
    for name, raw in VARIABLE.findall(text):
        states[name] = [s.strip() for s in raw.split(",") if s.strip()]
        order.append(name)

    cpts = {}
    for head, body in PROBABILITY.findall(text):
        parts = [p.strip() for p in re.split(r"[|,]", head) if p.strip()]
        child, parents = parts[0], parts[1:]
        width = len(states[child])
        radices = [len(states[p]) for p in parents]
        rows = {}
        table = re.search(r"table\s+([^;]*);", body)
        if table:
            values = [float(v) for v in table.group(1).replace(",", " ").split()]
            # BIF `table`: child state slowest, then parents with the first parent fastest.
            n_rows = 1
            for r in radices:
                n_rows *= r
            for combo in itertools.product(*[range(r) for r in radices]):
                offset, stride = 0, 1
                for idx, r in zip(combo, radices):
                    offset += idx * stride
                    stride *= r
                rows[combo] = [values[s * n_rows + offset] for s in range(width)]
        else:
            for labels, vals in re.findall(r"\(([^)]*)\)\s*([^;]*);", body):
                key = tuple(
                    states[p].index(l.strip()) for p, l in zip(parents, labels.split(","))
                )
                rows[key] = [float(v) for v in vals.replace(",", " ").split()]
        ordered = [rows[c] for c in itertools.product(*[range(r) for r in radices])]
        cpts[child] = (parents, ordered)

    nodes = []
    for name in order:
        parents, cpt = cpts[name]
        for i, row in enumerate(cpt):
            total = sum(row)
            # The published files round some entries (HREKG in Alarm sums to
            # 0.9999999); rescale small drift, reject anything larger.
            if abs(total - 1.0) > 1e-6:
                raise SystemExit(f"{name}: CPT row sums to {total}")
            if abs(total - 1.0) > 1e-12:
                cpt[i] = [v / total for v in row]
        nodes.append({"name": name, "states": states[name], "parents": parents, "cpt": cpt})
    return {"nodes": nodes}


def main():
    if len(sys.argv) != 2:
        raise SystemExit(__doc__)
    with open(sys.argv[1], encoding="utf-8") as fh:
        net = parse(fh.read())
    json.dump(net, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
