#!/usr/bin/env python3
"""JPEG 2000 baseline for `swdr bench --baseline-cmd`.

    swdr bench ... --methods svd_wdr,wdr_only,external \
        --baseline-cmd "python3 tools/j2k_baseline.py {in} {out} {bytes} {cmp}"

Encodes {in} with OpenJPEG (through Pillow) at a target size of {bytes},
keeps the codestream in {cmp} and writes the decoded image to {out} as PGM.
"""

import argparse
import io
import sys

from PIL import Image


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src")
    ap.add_argument("dst")
    ap.add_argument("bytes", type=int)
    ap.add_argument("cmp", nargs="?")
    args = ap.parse_args()

    img = Image.open(args.src).convert("L")
    raw = img.width * img.height
    ratio = max(raw / max(args.bytes, 1), 1.0)

    buf = io.BytesIO()
    img.save(buf, format="JPEG2000", irreversible=True, quality_mode="rates",
             quality_layers=[ratio], no_jp2=True)
    data = buf.getvalue()
    if args.cmp:
        with open(args.cmp, "wb") as f:
            f.write(data)

    Image.open(io.BytesIO(data)).convert("L").save(args.dst, format="PPM")
    return 0


if __name__ == "__main__":
    sys.exit(main())
