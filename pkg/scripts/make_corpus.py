"""Regenerate src/becknerlab/data/standard_corpus.json.

The corpus is the seeded draw of :func:`becknerlab.functionals.generate_corpus`.
Three members, one per dimension, are designated Monte Carlo grade: the
first ones whose bumps are no narrower than ``MIN_SIGMA`` and whose
constant is at least ``MIN_CONSTANT``, so that path estimates have
moderate variance.
"""

import json
import math
import pathlib
import sys

import numpy as np

from becknerlab.functionals import generate_corpus

SEED = 20240917
MIN_SIGMA = 0.8
MIN_CONSTANT = 0.5

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "becknerlab" / "data" / "standard_corpus.json"


def main(out=OUT):
    funcs = generate_corpus(100, SEED)
    grade = []
    for d in (1, 2, 3):
        for i, f in enumerate(funcs):
            sigma_min = 1.0 / math.sqrt(float(np.max(f.precisions)))
            if f.dimension == d and sigma_min >= MIN_SIGMA and f.constant >= MIN_CONSTANT:
                grade.append(i)
                break
    doc = {"seed": SEED, "mc_grade": grade, "functions": [f.to_dict() for f in funcs]}
    pathlib.Path(out).write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {len(funcs)} functions to {out}; MC grade {grade}")


if __name__ == "__main__":
    main(*sys.argv[1:])
