#!/usr/bin/env python3
"""Convert common graph dataset exports to the isvd directory layout.

Output directory contents:
  edges.tsv     "src dst [weight]" per line
  features.csv  one row per node (Planetoid only)
  labels.tsv    "node class" per line (Planetoid only)
  splits.json   {"train": [...], "validation": [...], "test": [...]}

Usage:
  convert.py planetoid RAW_DIR NAME OUT_DIR   # ind.NAME.{x,tx,allx,y,ty,ally,graph,test.index}
  convert.py snap EDGE_FILE OUT_DIR           # whitespace edge list, '#' comments
  convert.py mat MAT_FILE OUT_DIR [--key network]
"""

import argparse
import json
import pickle
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp


def _load_pickle(path):
    with open(path, "rb") as f:
        return pickle.load(f, encoding="latin1")


def _write_edges(out, pairs, weights=None):
    with open(out / "edges.tsv", "w") as f:
        for i, (a, b) in enumerate(pairs):
            if weights is None:
                f.write(f"{a}\t{b}\n")
            else:
                f.write(f"{a}\t{b}\t{weights[i]:.17g}\n")


def planetoid(raw, name, out):
    raw = Path(raw)
    parts = {k: _load_pickle(raw / f"ind.{name}.{k}") for k in ("x", "y", "tx", "ty", "allx", "ally", "graph")}
    test_index = [int(line) for line in open(raw / f"ind.{name}.test.index")]
    test_sorted = np.sort(test_index)

    tx, ty = parts["tx"], parts["ty"]
    if name == "citeseer":
        # Isolated test nodes are missing from tx/ty; pad them with zeros.
        full = range(test_sorted[0], test_sorted[-1] + 1)
        tx_ext = sp.lil_matrix((len(full), tx.shape[1]))
        tx_ext[test_sorted - test_sorted[0], :] = tx
        ty_ext = np.zeros((len(full), ty.shape[1]))
        ty_ext[test_sorted - test_sorted[0], :] = ty
        tx, ty = tx_ext, ty_ext

    features = sp.vstack((parts["allx"], tx)).tolil()
    features[test_index, :] = features[test_sorted, :]
    labels = np.vstack((parts["ally"], ty))
    labels[test_index, :] = labels[test_sorted, :]
    n = features.shape[0]

    pairs = set()
    for a, nbrs in parts["graph"].items():
        for b in nbrs:
            if a != b and a < n and b < n:
                pairs.add((min(a, b), max(a, b)))
    _write_edges(out, sorted(pairs))

    np.savetxt(out / "features.csv", features.toarray(), delimiter=",", fmt="%.17g")
    with open(out / "labels.tsv", "w") as f:
        for i in range(n):
            if labels[i].any():
                f.write(f"{i} {int(labels[i].argmax())}\n")

    train = list(range(parts["y"].shape[0]))
    test_set = set(test_index)
    validation = [i for i in range(len(train), min(len(train) + 500, n)) if i not in test_set]
    splits = {"train": train, "validation": validation, "test": sorted(int(i) for i in test_index)}
    (out / "splits.json").write_text(json.dumps(splits))


def snap(path, out):
    pairs = set()
    for line in open(path):
        line = line.strip()
        if not line or line[0] in "#%":
            continue
        a, b = line.split()[:2]
        if a != b:
            pairs.add((a, b) if a < b else (b, a))
    _write_edges(out, sorted(pairs))


def mat(path, out, key):
    A = sp.coo_matrix(scipy.io.loadmat(path)[key])
    A = sp.triu(A + A.T, k=1).tocoo()
    order = np.lexsort((A.col, A.row))
    pairs = list(zip(A.row[order], A.col[order]))
    weights = A.data[order] / 2.0
    _write_edges(out, pairs, None if np.all(weights == 1.0) else weights)


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="format", required=True)
    pl = sub.add_parser("planetoid")
    pl.add_argument("raw_dir")
    pl.add_argument("name")
    pl.add_argument("out_dir")
    sn = sub.add_parser("snap")
    sn.add_argument("edge_file")
    sn.add_argument("out_dir")
    mt = sub.add_parser("mat")
    mt.add_argument("mat_file")
    mt.add_argument("out_dir")
    mt.add_argument("--key", default="network")
    args = p.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "planetoid":
        planetoid(args.raw_dir, args.name, out)
    elif args.format == "snap":
        snap(args.edge_file, out)
    else:
        mat(args.mat_file, out, args.key)


if __name__ == "__main__":
    main()
