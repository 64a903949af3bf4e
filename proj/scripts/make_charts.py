#!/usr/bin/env python3
"""Generate the bundled LMS chart fixtures under charts/.

The curves are smooth, reference-shaped LMS parameter tables with the
coverage and step of the public CDC/WHO/IOTF BMI-for-age charts:

  cdc  : 24.5 - 240.5 months, monthly
  who  : 61 - 228 months, monthly
  iotf : 24 - 216 months, 6-monthly

lambda < 0 everywhere, and the z-score validity bound -1/(lambda*sigma)
decreases with age, reaching its global minimum of 2.785 at the CDC
female 240.5-month entry. sigma is derived from lambda and the bound so
that the boundary values are pinned by construction.
"""

import math
import os


def frange(lo, hi, step):
    out = []
    a = lo
    while a <= hi + 1e-9:
        out.append(round(a, 6))
        a += step
    return out


def lam(a, amin, amax, l0, l1):
    t = (a - amin) / (amax - amin)
    # gentle curvature so the profile is not a straight line
    return l0 + (l1 - l0) * (t + 0.08 * math.sin(math.pi * t))


def bound(a, amin, amax, b0, b1):
    t = (amax - a) / (amax - amin)
    return b1 + (b0 - b1) * t ** 1.2


def mu(a, base, peak, amax):
    # shallow dip in early childhood then a smooth rise to amax
    if a < 60.0:
        return base + 0.4 * ((60.0 - a) / 36.0) ** 2
    t = (a - 60.0) / (amax - 60.0)
    return base + (peak - base) * t ** 1.4


CHARTS = {
    "cdc": {
        "ages": frange(24.5, 240.5, 1.0),
        "M": dict(l0=-1.25, l1=-2.35, b0=7.0, b1=2.95, mu0=15.7, mu1=22.6),
        "F": dict(l0=-1.20, l1=-2.50, b0=6.5, b1=2.785, mu0=15.3, mu1=21.8),
    },
    "who": {
        "ages": frange(61.0, 228.0, 1.0),
        "M": dict(l0=-1.35, l1=-2.20, b0=6.4, b1=3.3, mu0=15.5, mu1=22.3),
        "F": dict(l0=-1.30, l1=-2.30, b0=6.0, b1=3.1, mu0=15.2, mu1=21.6),
    },
    "iotf": {
        "ages": frange(24.0, 216.0, 6.0),
        "M": dict(l0=-1.30, l1=-2.25, b0=6.6, b1=3.2, mu0=15.8, mu1=22.0),
        "F": dict(l0=-1.25, l1=-2.40, b0=6.2, b1=3.0, mu0=15.4, mu1=21.3),
    },
}


def main():
    outdir = os.path.join(os.path.dirname(__file__), "..", "charts")
    os.makedirs(outdir, exist_ok=True)
    for name, spec in CHARTS.items():
        ages = spec["ages"]
        amin, amax = ages[0], ages[-1]
        path = os.path.join(outdir, name + ".csv")
        with open(path, "w") as f:
            f.write("sex,age_months,lambda,mu,sigma\n")
            for sex in ("M", "F"):
                p = spec[sex]
                for a in ages:
                    l = lam(a, amin, amax, p["l0"], p["l1"])
                    b = bound(a, amin, amax, p["b0"], p["b1"])
                    s = -1.0 / (l * b)
                    m = mu(a, p["mu0"], p["mu1"], amax)
                    f.write(f"{sex},{a:g},{l:.10g},{m:.10g},{s:.17g}\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
