"""Loss exponents for the model speeds on a common frequency grid.

Writes one CSV with a row per (speed, lambda):

    python3 scripts/loss_catalog.py --out results/loss_catalog.csv --form squared
"""

import argparse
import math
import pathlib

from fdlab.fdl_verifier import measure_loss_exponent
from fdlab.harness import Table, emit
from fdlab.speeds import Envelope, SpeedClassSpec, constant_speed, log_square_speed, model_speed_alpha

SPEC = SpeedClassSpec(0.5, 3.5, 0.5, Envelope("constant", scale=2.0), Envelope("constant", scale=1.0),
                      K0=4 / math.log(2), order=2)


def speeds():
    yield "constant-2.25", constant_speed(2.25, 0.5)
    for a in (0.0, 0.25, 0.5, 0.75):
        yield f"alpha-{a:g}", model_speed_alpha(a, 0.5)
    yield "log-square", log_square_speed(0.5)


def cli() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results/loss_catalog.csv")
    ap.add_argument("--form", default="squared", choices=("squared", "direct"))
    ap.add_argument("--lambdas", type=float, nargs="*", default=[1e2, 1e3, 1e4, 1e5])
    args = ap.parse_args()

    rows = []
    for name, c in speeds():
        rep = measure_loss_exponent(c, args.lambdas, SPEC, form=args.form)
        for r in rep.rows:
            rows.append((name, r.lam, r.sup_log_gain, r.log_m_hat, r.delta_raw, r.delta_hat, r.passed))
        print(f"{name:14s} delta_hat {[round(x, 4) for x in rep.delta_hat]} pass={rep.passed}")
    out = pathlib.Path(args.out)
    tab = Table(out.stem, ("speed", "lambda", "sup_log_gain", "log_m_hat", "delta_raw", "delta_hat", "pass"),
                tuple(rows))
    emit([tab], str(out.parent))


if __name__ == "__main__":
    cli()
