"""Survey quadratic circulants: type-II, spin, diagonal identity and unbiased triples."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from eqmub.lineset import is_mub_family
from eqmub.spin import diagonal_conjugation_check, is_spin_model, is_type_ii, quadratic_circulant, spin_mub_triple


@dataclass
class Config:
    n_min: int = 2
    n_max: int = 12


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-min", dest="n_min", type=int, default=Config.n_min)
    ap.add_argument("--n-max", dest="n_max", type=int, default=Config.n_max)
    cfg = Config(**vars(ap.parse_args()))
    print("n  type2  spin  diag  triples")
    for n in range(cfg.n_min, cfg.n_max + 1):
        W = quadratic_circulant(n)
        t2, sp = bool(is_type_ii(W.matrix)), bool(is_spin_model(W.matrix))
        dg = bool(diagonal_conjugation_check(W))
        tr = sum(bool(is_mub_family(spin_mub_triple(W, j).lines)) for j in range(n))
        print(f"{n:<3}{t2!s:<7}{sp!s:<6}{dg!s:<6}{tr}/{n}")


if __name__ == "__main__":
    main()
