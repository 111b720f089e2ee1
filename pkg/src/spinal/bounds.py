"""Contraction constant eta_r, the triangular weights and the growth and
period exponents derived from them."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import InvalidRange
from .words import WeightScheme


def eta_poly(x: float, r: int) -> float:
    return x**r + x ** (r - 1) + x ** (r - 2) - 2


def solve_eta(r: int, tol: float = 1e-12) -> float:
    """Root in (0, 1) of x^r + x^(r-1) + x^(r-2) - 2, by bisection."""
    if r < 3:
        raise InvalidRange("r must be >= 3")
    if tol <= 0:
        raise InvalidRange("tol must be positive")
    lo, hi = 0.0, 1.0  # p(0) = -2 < 0 < 1 = p(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if eta_poly(mid, r) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def tau_values(r: int, tol: float = 1e-12) -> WeightScheme:
    eta = solve_eta(r, tol)
    tau = [1 - eta**r] + [eta**r + eta ** (r - i) - 1 for i in range(1, r + 1)]
    return WeightScheme(r, eta, tuple(tau))


def system_residuals(scheme: WeightScheme) -> list[float]:
    """Residuals of eta(t0 + t_i) = t0 + t_(i-1) (i = r..2) and eta(t0 + t1) = t_r."""
    e, t, r = scheme.eta, scheme.tau, scheme.r
    res = [e * (t[0] + t[i]) - (t[0] + t[i - 1]) for i in range(r, 1, -1)]
    res.append(e * (t[0] + t[1]) - t[r])
    return res


def ceil_digits(x: float, digits: int = 3) -> float:
    """Round up to ``digits`` decimals (guarding against float noise on exact values)."""
    s = 10**digits
    return math.ceil(x * s - 1e-9) / s


def ceil3(x: float) -> float:
    return ceil_digits(x, 3)


@dataclass
class ExponentReport:
    q: int
    r: int
    eta: float
    alpha_eta: float
    alpha_34: float
    alpha_23: float | None
    alpha_lower: float
    p_eta: float
    p_34: float
    p_23: float
    p_prime: float | None
    p_half: float
    p_lb: float

    def as_dict(self) -> dict:
        return asdict(self)


def _alpha(q: int, x: float) -> float:
    lq = math.log(q)
    return lq / (lq - math.log(x))


def growth_exponents(q: int, r: int, p: int | None = None) -> ExponentReport:
    """All growth and period exponents for degree ``q`` and window ``r``.
    ``p`` (prime order of a cyclic root group) enables ``p_prime``."""
    if q < 2:
        raise InvalidRange("q must be >= 2")
    if r < q + 1 or r < 3:
        raise InvalidRange(f"need r >= q+1 = {q + 1}, got r={r}")
    eta = solve_eta(r)
    lq = math.log(q)
    return ExponentReport(
        q=q,
        r=r,
        eta=eta,
        alpha_eta=_alpha(q, eta),
        alpha_34=_alpha(q, (3 / 4) ** (1 / r)),
        alpha_23=_alpha(q, (2 / 3) ** (1 / r)) if q == 2 else None,
        alpha_lower=lq / (lq + math.log(2)),
        p_eta=lq / -math.log(eta),
        p_34=r * lq / math.log(4 / 3),
        p_23=r * lq / math.log(3 / 2),
        p_prime=(r - 1) * math.log2(p) if p else None,
        p_half=r / 2,
        p_lb=1 / (r - 1),
    )


TABLE2_ROWS = [
    (2, "eta", "homo."),
    (2, "23", "fact."),
    (2, "34", "fact."),
    (3, "eta", "homo."),
    (3, "34", "fact."),
    (4, "eta", "homo."),
    (4, "34", "fact."),
    (5, "eta", "homo."),
    (5, "34", "fact."),
]
TABLE2_R = range(3, 11)


def reproduce_table2(rounded: bool = True, eta_digits: int | None = 3) -> list[dict]:
    """Rows of the growth-exponent comparison table, r = q+1..10.

    ``eta_digits``: eta_r is first rounded up to this many decimals (the
    published table's convention; alpha grows with eta, so the bound stays
    valid).  ``None`` uses eta_r at full precision.
    """
    out = []
    for q, kind, cond in TABLE2_ROWS:
        vals = {}
        for r in TABLE2_R:
            if r < q + 1:
                continue
            rep = growth_exponents(q, r)
            if kind == "eta" and eta_digits is not None:
                a = _alpha(q, ceil_digits(rep.eta, eta_digits))
            else:
                a = {"eta": rep.alpha_eta, "34": rep.alpha_34, "23": rep.alpha_23}[kind]
            vals[r] = ceil3(a) if rounded else a
        out.append({"q": q, "estimate": kind, "condition": cond, "values": vals})
    return out


def table2_csv(rounded: bool = True, eta_digits: int | None = 3) -> str:
    header = ["q"] + [f"r={r}" for r in TABLE2_R] + ["condition"]
    lines = [",".join(header)]
    for row in reproduce_table2(rounded, eta_digits):
        cells = [str(row["q"])]
        for r in TABLE2_R:
            v = row["values"].get(r)
            cells.append("" if v is None else (f"{v:.3f}" if rounded else f"{v:.6f}"))
        cells.append(f"{row['condition']} ({row['estimate']})")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
