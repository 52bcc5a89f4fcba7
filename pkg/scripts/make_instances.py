"""Write the small JSON instances used in the README and the CLI tests."""
from __future__ import annotations

import argparse
import random
from pathlib import Path

from strictcat.enriched import representable_functor
from strictcat.fincat import delta_truncated, identity_functor, ordinal, product_cat, product_projection
from strictcat.generate import random_enriched
from strictcat.groth import SetFunctor
from strictcat.presheaf import PshMap, iter_maps, nerve, representable, spine
from strictcat.schema import save


def build(seed: int) -> dict:
    I = ordinal(1)
    D2 = delta_truncated(2)
    G, incl = spine(2, 2)
    F1 = representable(D2, 1)
    fold = next(
        PshMap(G, F1, c) for c in iter_maps(G, F1)
        if [F1.elems[0][v] for v in c[0]] == [(0,), (1,), (1,)]
    )
    up = I.find(0, 1, (0, 1))
    sizes = [1, 2]
    F = SetFunctor(I, [["a"], ["x", "y"]], [[0] if m == up else list(range(sizes[I.src[m]])) for m in range(I.n_morphisms)])
    C = random_enriched(random.Random(seed), ordinal(1))
    return {
        "interval": I,
        "interval_identity": identity_functor(I),
        "set_functor_interval": F,
        "spine2": G,
        "spine2_inclusion": incl,
        "fold": fold,
        "nerve_interval": nerve(I, 3),
        "square_projection": product_projection(product_cat(ordinal(1), ordinal(1)), 0),
        "enriched": C,
        "enriched_representable": representable_functor(C, C.objects[0]),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "instances"))
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, value in build(args.seed).items():
        save(value, out / f"{name}.json", name=name, pretty=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
