#!/usr/bin/env python3
"""Extract benchmark datasets from the keel-ds wheel and write them as ARFF.

Usage: pip download keel-ds --no-deps -d /tmp/keel && python3 convert_keel.py /tmp/keel/keel_ds-*.whl
"""
import sys
import zipfile
from pathlib import Path

DATASETS = ["ionosphere", "sonar", "monk-2", "pima", "wdbc", "vehicle", "iris"]
OUT = Path(__file__).resolve().parent.parent

NAMES = {"vehicle": "statlog-vehicle"}


def main(wheel):
    z = zipfile.ZipFile(wheel)
    for name in DATASETS:
        text = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
        rows = [[c.strip() for c in line.split(",")] for line in text.splitlines() if line.strip()]
        nfeat = len(rows[0]) - 1
        classes = sorted({r[-1] for r in rows})
        stem = NAMES.get(name, name)
        with open(OUT / f"{stem}.arff", "w") as f:
            f.write(f"% {stem}: converted from the KEEL distribution shipped in keel-ds\n")
            f.write(f"@relation {stem}\n\n")
            for i in range(nfeat):
                f.write(f"@attribute f{i + 1} numeric\n")
            f.write("@attribute class {" + ",".join(classes) + "}\n\n@data\n")
            for r in rows:
                f.write(",".join(r) + "\n")
        print(stem, len(rows), nfeat, classes)


if __name__ == "__main__":
    main(sys.argv[1])
