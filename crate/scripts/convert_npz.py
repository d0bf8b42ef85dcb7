#!/usr/bin/env python3
"""Convert a citation-graph .npz archive into the nodeinject dataset layout.

The archive must hold the adjacency as CSR parts (adj_data, adj_indices,
adj_indptr, adj_shape), attributes either as CSR parts (attr_data,
attr_indices, attr_indptr, attr_shape) or as a dense attr_matrix, and a
labels vector. Edges are symmetrized; self-loops and duplicates are dropped.
The full graph is written; the CLI takes the largest connected component
at load time.

    python scripts/convert_npz.py cora.npz data/cora --name cora
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load(path):
    with np.load(path, allow_pickle=True) as f:
        f = dict(f)
    adj = sp.csr_matrix(
        (f["adj_data"], f["adj_indices"], f["adj_indptr"]), shape=tuple(f["adj_shape"])
    )
    if "attr_data" in f:
        attr = sp.csr_matrix(
            (f["attr_data"], f["attr_indices"], f["attr_indptr"]), shape=tuple(f["attr_shape"])
        )
    elif "attr_matrix" in f:
        attr = sp.csr_matrix(f["attr_matrix"])
    else:
        sys.exit(f"{path}: no attributes found")
    labels = np.asarray(f["labels"]).astype(np.int64)
    return adj, attr, labels


def convert(src, dest, name):
    adj, attr, labels = load(src)
    n = adj.shape[0]
    if adj.shape != (n, n) or attr.shape[0] != n or labels.shape != (n,):
        sys.exit(f"{src}: inconsistent shapes {adj.shape}, {attr.shape}, {labels.shape}")

    adj = sp.triu(adj + adj.T, k=1).tocoo()
    edges = sorted(set(zip(adj.row.tolist(), adj.col.tolist())))
    attr = attr.tocsr()
    attr.sum_duplicates()
    attr.eliminate_zeros()
    attr.sort_indices()
    binary = bool(np.all(attr.data == 1.0))

    dest.mkdir(parents=True, exist_ok=True)
    with open(dest / "edges.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v"])
        w.writerows(edges)
    with open(dest / "features.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "index", "value"])
        for v in range(n):
            lo, hi = attr.indptr[v], attr.indptr[v + 1]
            for j, x in zip(attr.indices[lo:hi], attr.data[lo:hi]):
                w.writerow([v, int(j), repr(float(x))])
    with open(dest / "labels.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label"])
        w.writerows([int(l)] for l in labels)

    manifest = {
        "name": name,
        "num_nodes": n,
        "num_features": attr.shape[1],
        "num_classes": int(labels.max()) + 1,
        "feature_kind": "binary" if binary else "continuous",
        "edges": "edges.csv",
        "features": "features.csv",
        "labels": "labels.csv",
    }
    (dest / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("npz", type=Path)
    p.add_argument("out", type=Path)
    p.add_argument("--name", help="dataset name (default: archive stem)")
    a = p.parse_args()
    m = convert(a.npz, a.out, a.name or a.npz.stem)
    print(json.dumps(m))


if __name__ == "__main__":
    main()
