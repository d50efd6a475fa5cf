#!/usr/bin/env python3
# Copyright 2026 The byzlab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Build a 10k-sample MNIST subset in IDX format from the `mnist` npm package.

The npm package (https://www.npmjs.com/package/mnist, MIT) bundles 10,000
MNIST digits as per-class JSON arrays with pixels scaled to [0, 1] and rounded
to three decimals. Rounding is injective on k/255, so the original bytes are
recovered exactly with round(v * 255).

Usage:
    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_mnist_subset.py package/src/digits data/mnist

Samples are interleaved by class in a fixed round-robin order so that any
prefix of the file is roughly class balanced.
"""
import gzip
import json
import pathlib
import struct
import sys


def main(digits_dir: str, out_dir: str) -> None:
    per_class = []
    for label in range(10):
        with open(pathlib.Path(digits_dir) / f"{label}.json") as fh:
            flat = json.load(fh)["data"]
        assert len(flat) % 784 == 0
        per_class.append([flat[i:i + 784] for i in range(0, len(flat), 784)])

    images, labels = [], []
    cursor = [0] * 10
    while any(cursor[c] < len(per_class[c]) for c in range(10)):
        for c in range(10):
            if cursor[c] < len(per_class[c]):
                images.append(per_class[c][cursor[c]])
                labels.append(c)
                cursor[c] += 1

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = len(images)
    img_bytes = bytearray(struct.pack(">IIII", 0x00000803, n, 28, 28))
    for px in images:
        img_bytes.extend(min(255, max(0, round(v * 255))) for v in px)
    lab_bytes = bytearray(struct.pack(">II", 0x00000801, n)) + bytes(labels)
    # mtime=0 keeps the archives byte-reproducible.
    with open(out / "mnist10k-images-idx3-ubyte.gz", "wb") as raw:
        with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as fh:
            fh.write(img_bytes)
    with open(out / "mnist10k-labels-idx1-ubyte.gz", "wb") as raw:
        with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as fh:
            fh.write(lab_bytes)
    print(f"wrote {n} samples to {out}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
