#!/usr/bin/env python3
"""Fetch the public graphs used by the dataset-gated acceptance tests.

Downloads go to ./data (or the directory named by GRAPHLAYERS_DATA) and are
normalized to plain whitespace edge lists:

    bible_names.txt   name co-occurrences in the King James Bible (KONECT)
    amazon.txt        Amazon product co-purchases (SNAP com-Amazon)
    astro_ph.txt      arXiv astro-ph co-authorships (SNAP ca-AstroPh)
    pokec.txt         Pokec friendships (SNAP, ~30M edges; pass --with-pokec)

Needs outbound network access; run on your own machine, not in a hermetic
build sandbox.
"""

import argparse
import gzip
import io
import os
import sys
import tarfile
from pathlib import Path

import requests

DATA_DIR = Path(os.environ.get("GRAPHLAYERS_DATA", Path(__file__).parent.parent / "data"))

SNAP = {
    "amazon.txt": "https://snap.stanford.edu/data/bigdata/communities/com-amazon.ungraph.txt.gz",
    "astro_ph.txt": "https://snap.stanford.edu/data/ca-AstroPh.txt.gz",
    "pokec.txt": "https://snap.stanford.edu/data/soc-pokec-relationships.txt.gz",
}
KONECT_NAMES = "http://konect.cc/files/download.tsv.moreno_names.tar.bz2"


def fetch(url, timeout=120):
    print(f"downloading {url}")
    resp = requests.get(url, timeout=timeout)
    resp.raise_for_status()
    return resp.content


def write_edge_list(target, lines):
    count = 0
    with open(target, "w", encoding="utf-8") as f:
        for line in lines:
            line = line.strip()
            if not line or line.startswith(("#", "%")):
                continue
            toks = line.split()
            if len(toks) < 2:
                continue
            f.write(f"{toks[0]} {toks[1]}\n")
            count += 1
    print(f"wrote {target} ({count} edge lines)")


def fetch_snap(name):
    target = DATA_DIR / name
    if target.exists():
        print(f"{target} already present")
        return
    raw = gzip.decompress(fetch(SNAP[name]))
    write_edge_list(target, io.StringIO(raw.decode("utf-8")))


def fetch_bible_names():
    target = DATA_DIR / "bible_names.txt"
    if target.exists():
        print(f"{target} already present")
        return
    blob = fetch(KONECT_NAMES)
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:bz2") as tar:
        member = next(m for m in tar.getmembers() if "out." in m.name)
        text = tar.extractfile(member).read().decode("utf-8")
    write_edge_list(target, io.StringIO(text))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--with-pokec", action="store_true",
                        help="also fetch the ~420MB Pokec graph")
    args = parser.parse_args()
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    fetch_bible_names()
    fetch_snap("amazon.txt")
    fetch_snap("astro_ph.txt")
    if args.with_pokec:
        fetch_snap("pokec.txt")
    print("done")


if __name__ == "__main__":
    sys.exit(main())
