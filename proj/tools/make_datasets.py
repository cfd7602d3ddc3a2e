#!/usr/bin/env python3
"""Regenerate the bundled UCI datasets in data/ as LIBSVM text files.

Sources are the KEEL repository exports shipped inside the ``keel-ds`` wheel
(``pip download keel-ds --no-deps``):

  iris.dat      -> iris.libsvm       (150 x 4, 3 classes)
  penbased.dat  -> pendigits.libsvm  (10992 x 16, 10 classes)
  glass{0,1,2,4,5,6}.dat -> glass.libsvm (214 x 9, 6 classes)

KEEL only publishes Glass as one-vs-rest binary splits, so the multiclass
labels are rebuilt by matching feature rows across the splits. Rows that are
positive in none of the matched splits are class 3 (glass2.dat is written
with a different float precision and cannot be matched row-wise).

Usage: make_datasets.py DAT_DIR OUT_DIR
"""

import collections
import pathlib
import sys


def read_dat(path):
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        *feats, label = [t.strip() for t in line.split(",")]
        rows.append(([float(v) for v in feats], label))
    return rows


def write_libsvm(path, rows):
    with path.open("w") as out:
        for feats, label in rows:
            toks = [label] + [f"{j + 1}:{v:.10g}" for j, v in enumerate(feats) if v != 0.0]
            out.write(" ".join(toks) + "\n")


def rebuild_glass(dat_dir):
    splits = {"1": "glass0", "2": "glass1", "5": "glass4", "6": "glass5", "7": "glass6"}
    positives = collections.defaultdict(set)
    base = None
    for label, stem in splits.items():
        rows = read_dat(dat_dir / f"{stem}.dat")
        if base is None:
            base = rows
        for feats, flag in rows:
            if flag == "positive":
                positives[tuple(feats)].add(label)
    out = []
    for feats, _ in base:
        hit = positives.get(tuple(feats), set())
        if len(hit) > 1:
            raise SystemExit(f"ambiguous glass row {feats}: {hit}")
        out.append((feats, next(iter(hit)) if hit else "3"))
    return out


def main():
    if len(sys.argv) != 3:
        raise SystemExit(__doc__)
    dat_dir, out_dir = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
    out_dir.mkdir(parents=True, exist_ok=True)
    write_libsvm(out_dir / "iris.libsvm", read_dat(dat_dir / "iris.dat"))
    write_libsvm(out_dir / "pendigits.libsvm", read_dat(dat_dir / "penbased.dat"))
    glass = rebuild_glass(dat_dir)
    write_libsvm(out_dir / "glass.libsvm", glass)
    counts = collections.Counter(label for _, label in glass)
    print("glass class counts:", dict(sorted(counts.items())))


if __name__ == "__main__":
    main()
