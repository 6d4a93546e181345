#!/usr/bin/env python3
"""Convert a Planetoid-format citation dataset (cora/citeseer) into the text
formats this engine ingests: graph.tsv, attrs.tsv, labels.tsv.

The Planetoid distribution ships pickled files named ind.<name>.{x,y,tx,ty,
allx,ally,graph,test.index}. Point --input at the directory holding them:

    python3 scripts/convert_planetoid.py --name cora --input /path/to/planetoid/data --out data/cora

Nodes are re-indexed densely; the largest connected component is NOT extracted
here — pass --lcc to keep only it (the usual experimental protocol for cora).
"""

import argparse
import pickle
import sys
from pathlib import Path


def load_pickle(path: Path):
    with path.open("rb") as fh:
        try:
            return pickle.load(fh, encoding="latin1")
        except TypeError:
            return pickle.load(fh)


def parse_index(path: Path):
    return [int(line) for line in path.read_text().split()]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--name", required=True, help="dataset name, e.g. cora")
    ap.add_argument("--input", required=True, type=Path, help="directory with ind.<name>.* files")
    ap.add_argument("--out", required=True, type=Path, help="output directory")
    ap.add_argument("--lcc", action="store_true", help="keep only the largest connected component")
    args = ap.parse_args()

    import numpy as np
    import scipy.sparse as sp

    names = ["x", "y", "tx", "ty", "allx", "ally", "graph"]
    objs = {n: load_pickle(args.input / f"ind.{args.name}.{n}") for n in names}
    test_idx = parse_index(args.input / f"ind.{args.name}.test.index")
    test_range = sorted(test_idx)

    tx, ty = objs["tx"], objs["ty"]
    if args.name == "citeseer":
        # citeseer has isolated test nodes missing from tx; pad with zeros
        full = range(min(test_range), max(test_range) + 1)
        tx_ext = sp.lil_matrix((len(full), objs["x"].shape[1]))
        tx_ext[[i - min(test_range) for i in test_idx], :] = tx
        tx = tx_ext
        ty_ext = np.zeros((len(full), ty.shape[1]))
        ty_ext[[i - min(test_range) for i in test_idx], :] = ty
        ty = ty_ext

    features = sp.vstack((objs["allx"], tx)).tolil()
    features[test_idx, :] = features[test_range, :]
    labels = np.vstack((objs["ally"], ty))
    labels[test_idx, :] = labels[test_range, :]

    n = labels.shape[0]
    edges = set()
    for src, nbrs in objs["graph"].items():
        for dst in nbrs:
            if src != dst and src < n and dst < n:
                edges.add((min(src, dst), max(src, dst)))

    keep = list(range(n))
    if args.lcc:
        import collections

        adj = collections.defaultdict(list)
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        seen, best = set(), []
        for start in range(n):
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in adj[v]:
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            if len(comp) > len(best):
                best = comp
        keep = sorted(best)

    remap = {old: new for new, old in enumerate(keep)}
    args.out.mkdir(parents=True, exist_ok=True)

    with (args.out / "graph.tsv").open("w") as fh:
        for a, b in sorted(edges):
            if a in remap and b in remap:
                fh.write(f"{remap[a]}\t{remap[b]}\n")

    features = features.tocsr()
    with (args.out / "attrs.tsv").open("w") as fh:
        for old in keep:
            row = features.getrow(old).tocoo()
            cells = " ".join(f"{c}:{v}" for c, v in zip(row.col, row.data))
            fh.write(f"{remap[old]}\t{cells}\n")

    with (args.out / "labels.tsv").open("w") as fh:
        for old in keep:
            onehot = labels[old]
            if onehot.sum() == 0:
                continue  # unlabeled padding node
            fh.write(f"{remap[old]}\t{int(onehot.argmax())}\n")

    print(f"wrote {args.out}/graph.tsv, attrs.tsv, labels.tsv ({len(keep)} nodes)", file=sys.stderr)


if __name__ == "__main__":
    main()
