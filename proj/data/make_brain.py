"""Writes brain.json: a synthetic 34-region plant with the reference SCC shape.

Regions 21 and 23 are source components feeding only region 29, region 22 is
a sink, and the remaining 31 regions form one strongly connected component
(a Hamiltonian cycle through 29 and 24 plus random extra edges). Sensors
1..5 measure regions 21, 22, 23, 24, 29.
"""
import json
import random

N = 34
SENSED = [21, 22, 23, 24, 29]
DENSITY = 0.3  # fraction of extra edges inside the large component


def main(seed=2021):
    rng = random.Random(seed)
    big = [v for v in range(1, N + 1) if v not in (21, 22, 23)]
    middle = [v for v in big if v not in (29, 24)]
    rng.shuffle(middle)
    cycle = [29] + middle + [24]
    edges = set()  # (i, j): region i drives region j, i.e. A[j][i] = 1
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        edges.add((a, b))
    for a in big:
        for b in big:
            if a != b and rng.random() < DENSITY:
                edges.add((a, b))
    edges |= {(21, 29), (23, 29), (24, 22)}
    for a in big:
        if rng.random() < 0.1:
            edges.add((a, 22))

    a = [[0] * N for _ in range(N)]
    for i, j in edges:
        a[j - 1][i - 1] = 1
    c = [[1 if col + 1 == s else 0 for col in range(N)] for s in SENSED]
    comm = [[1, 0, 0, 0, 1],
            [0, 1, 0, 0, 1],
            [0, 0, 1, 0, 1],
            [0, 0, 0, 1, 1],
            [1, 1, 1, 1, 1]]
    costs = [[0, 2, 3, 4, 4],
             [2, 0, 4, 3, 4],
             [3, 4, 0, 5, 3],
             [4, 3, 5, 0, 3],
             [4, 4, 3, 3, 0]]
    final = [row[:] for row in comm]
    final[3][1] = 1
    doc = {
        "schema_version": "1",
        "name": "brain",
        "n": N,
        "m": len(SENSED),
        "a": {"nonzeros": sorted([j, i] for i, j in edges)},
        "c": c,
        "comm": comm,
        "costs": costs,
        "cost_unit": {"symbol": "c", "scale": 1.0},
        "seed": seed,
        "expected": {
            "mode": "cost",
            "plant_observable": True,
            "initially_dd_observable": False,
            "added_links": [[2, 4]],
            "total_links": 1,
            "total_cost": 3,
            "final_comm": final,
        },
    }
    with open("brain.json", "w") as f:
        f.write(dumps(doc) + "\n")


def dumps(value, indent=0):
    """JSON with one matrix row (or edge) per line."""
    pad = " " * indent
    if isinstance(value, dict):
        items = [f'{pad}  {json.dumps(k)}: {dumps(v, indent + 2).lstrip()}' for k, v in value.items()]
        return pad + "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list) and value and isinstance(value[0], list):
        rows = [pad + "  " + json.dumps(r, separators=(", ", ": ")) for r in value]
        return pad + "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    return pad + json.dumps(value, separators=(", ", ": "))


if __name__ == "__main__":
    main()
