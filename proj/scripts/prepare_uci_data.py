#!/usr/bin/env python3
"""Rebuild the CSV regression datasets under data/uci/ from offline package archives.

Sources (all fetched through pip):
  keel-ds 0.2.5 wheel      mushroom, tic-tac-toe, chess (kr-vs-kp), letter, wisconsin
  Orange3 3.3.4 sdist      dermatology
  rdatasets 0.2.10 wheel   ISLR/Caravan (the COIL 2000 ticdata2000 training set)

Every output file is headerless, comma-separated, decision column last.
"""
import argparse
import warnings
import glob
import hashlib
import lzma
import os
import pickle
import tarfile
import zipfile


def keel_rows(wheel, name):
    with zipfile.ZipFile(wheel) as z:
        text = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([tok.strip() for tok in line.split(",")])
    return rows


def orange_rows(sdist, name, drop_missing=True):
    with tarfile.open(sdist) as t:
        member = next(m for m in t.getnames() if m.endswith(f"Orange/datasets/{name}.tab"))
        text = t.extractfile(member).read().decode()
    lines = text.splitlines()[3:]
    rows = []
    for line in lines:
        toks = [tok.strip() for tok in line.split("\t")]
        if drop_missing and any(tok in ("?", "") for tok in toks):
            continue
        rows.append(toks)
    return rows


def caravan_rows(wheel):
    with zipfile.ZipFile(wheel) as z:
        frame = pickle.loads(lzma.decompress(z.read("rdatasets/_data/ISLR/Caravan.pkl.compress")))
    if frame.columns[0] == "rownames":
        frame = frame.drop(columns="rownames")
    return [[str(v) for v in rec] for rec in frame.itertuples(index=False)]


def write_csv(path, rows):
    with open(path, "w", newline="\n") as f:
        for r in rows:
            f.write(",".join(r) + "\n")
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def main():
    warnings.simplefilter("ignore", DeprecationWarning)
    ap = argparse.ArgumentParser()
    ap.add_argument("--downloads", required=True, help="directory holding the downloaded archives")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "uci"))
    args = ap.parse_args()

    keel = glob.glob(os.path.join(args.downloads, "**", "keel_ds-*.whl"), recursive=True)[0]
    orange = glob.glob(os.path.join(args.downloads, "**", "*3.3.4*.t*gz"), recursive=True)[0]
    rdata = glob.glob(os.path.join(args.downloads, "**", "rdatasets-*.whl"), recursive=True)[0]

    sets = {
        "mushroom.csv": keel_rows(keel, "mushroom"),
        "tic-tac-toe.csv": keel_rows(keel, "tic-tac-toe"),
        "kr-vs-kp.csv": keel_rows(keel, "chess"),
        "letter-recognition.csv": keel_rows(keel, "letter"),
        "breast-cancer-wisconsin.csv": keel_rows(keel, "wisconsin"),
        "dermatology.csv": orange_rows(orange, "dermatology"),
        "ticdata2000.csv": caravan_rows(rdata),
    }
    os.makedirs(args.out, exist_ok=True)
    sums = []
    for name, rows in sets.items():
        digest = write_csv(os.path.join(args.out, name), rows)
        sums.append(f"{digest}  {name}")
        print(f"{name}: {len(rows)} rows x {len(rows[0]) - 1} features")
    with open(os.path.join(args.out, "SHA256SUMS"), "w") as f:
        f.write("\n".join(sums) + "\n")


if __name__ == "__main__":
    main()
