#!/usr/bin/env python3
"""Download the w8a and ijcnn1 binary-classification datasets.

Files land under $SMG_DATA_DIR (or --dest).  w8a is the 49,749-sample
training split; ijcnn1 is the 91,701-sample testing split, decompressed
from bz2.  A checksums.json manifest is written on first fetch and verified
on later fetches, and the parsed sample counts are checked against the
published sizes.  Nothing in the package downloads data implicitly; this
script is the only network touchpoint.
"""
import argparse
import bz2
import hashlib
import io
import json
import os
import sys
import urllib.request
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from smgopt.dataio import parse_libsvm  # noqa: E402

BASE = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary"
DATASETS = {
    "w8a": {"url": f"{BASE}/w8a", "compressed": False, "expected_n": 49_749},
    "ijcnn1": {"url": f"{BASE}/ijcnn1.t.bz2", "compressed": True,
               "expected_n": 91_701},
}


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def fetch(name: str, spec: dict, dest: Path, manifest: dict) -> None:
    target = dest / name
    if target.exists():
        digest = sha256(target.read_bytes())
        recorded = manifest.get(name)
        if recorded and digest != recorded:
            raise SystemExit(f"{target} does not match the recorded checksum "
                             f"{recorded}; delete it to re-fetch")
        manifest[name] = digest
        print(f"{name}: already present ({digest[:16]}...)")
        return
    print(f"fetching {spec['url']} ...")
    with urllib.request.urlopen(spec["url"]) as response:
        raw = response.read()
    if spec["compressed"]:
        raw = bz2.decompress(raw)
    samples, d = parse_libsvm(io.StringIO(raw.decode()))
    if len(samples) != spec["expected_n"]:
        raise SystemExit(f"{name}: parsed {len(samples)} samples, expected "
                         f"{spec['expected_n']}")
    target.write_bytes(raw)
    manifest[name] = sha256(raw)
    print(f"{name}: {len(samples)} samples, dimension {d}, "
          f"sha256 {manifest[name][:16]}...")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default=os.environ.get("SMG_DATA_DIR", "data"),
                        help="target directory (default: $SMG_DATA_DIR or ./data)")
    args = parser.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    manifest_path = dest / "checksums.json"
    manifest = json.loads(manifest_path.read_text()) if manifest_path.exists() else {}
    for name, spec in DATASETS.items():
        fetch(name, spec, dest, manifest)
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"manifest written to {manifest_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
