#!/usr/bin/env python3
"""Convert the raw LINQS Cora or PubMed-Diabetes files into a dataset directory.

    python scripts/convert_linqs.py cora   path/to/cora/   data/cora
    python scripts/convert_linqs.py pubmed path/to/Pubmed-Diabetes/data/ data/pubmed

Cora expects cora.content and cora.cites. PubMed expects
Pubmed-Diabetes.NODE.paper.tab and Pubmed-Diabetes.DIRECTED.cites.tab.
Citations are made undirected; self-citations and repeated pairs are dropped.
"""

import argparse
import json
from pathlib import Path


def read_cora(src):
    ids, feats, labels = [], [], []
    for line in (src / "cora.content").read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        ids.append(parts[0])
        feats.append([float(v) for v in parts[1:-1]])
        labels.append(parts[-1])
    cites = []
    for line in (src / "cora.cites").read_text().splitlines():
        parts = line.split()
        if len(parts) == 2:
            cites.append((parts[0], parts[1]))
    return ids, feats, labels, cites


def read_pubmed(src):
    lines = (src / "Pubmed-Diabetes.NODE.paper.tab").read_text().splitlines()
    # line 0 is a title, line 1 declares the TF-IDF vocabulary
    vocab = [f.split(":")[1] for f in lines[1].split("\t")[1:-1]]
    index = {w: k for k, w in enumerate(vocab)}
    ids, feats, labels = [], [], []
    for line in lines[2:]:
        parts = line.split("\t")
        if len(parts) < 2:
            continue
        ids.append(parts[0])
        labels.append(parts[1].split("=")[1])
        row = [0.0] * len(vocab)
        for item in parts[2:]:
            if "=" not in item or item.startswith("summary"):
                continue
            word, value = item.split("=")
            if word in index:
                row[index[word]] = float(value)
        feats.append(row)
    cites = []
    for line in (src / "Pubmed-Diabetes.DIRECTED.cites.tab").read_text().splitlines()[2:]:
        parts = line.split("\t")
        if len(parts) == 4:
            cites.append((parts[1].split(":")[1], parts[3].split(":")[1]))
    return ids, feats, labels, cites


def write(name, ids, feats, labels, cites, out):
    out.mkdir(parents=True, exist_ok=True)
    node = {pid: i for i, pid in enumerate(ids)}
    classes = sorted(set(labels))
    edges = set()
    skipped = 0
    for a, b in cites:
        if a not in node or b not in node or a == b:
            skipped += 1
            continue
        i, j = node[a], node[b]
        edges.add((min(i, j), max(i, j)))
    with open(out / "edges.tsv", "w") as f:
        for i, j in sorted(edges):
            f.write(f"{i}\t{j}\n")
    with open(out / "features.csv", "w") as f:
        for row in feats:
            f.write(",".join(repr(v) for v in row) + "\n")
    with open(out / "labels.txt", "w") as f:
        for label in labels:
            f.write(f"{classes.index(label)}\n")
    meta = {"num_nodes": len(ids), "num_clusters": len(classes), "name": name}
    (out / "meta.json").write_text(json.dumps(meta) + "\n")
    print(f"{name}: {len(ids)} nodes, {len(edges)} edges ({len(cites)} citations, {skipped} skipped), {len(classes)} classes")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("dataset", choices=["cora", "pubmed"])
    ap.add_argument("src", type=Path)
    ap.add_argument("out", type=Path)
    args = ap.parse_args()
    reader = read_cora if args.dataset == "cora" else read_pubmed
    write(args.dataset, *reader(args.src), args.out)


if __name__ == "__main__":
    main()
