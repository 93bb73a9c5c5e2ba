"""Exact subspace counts, scattered-count bounds, thresholds and the Monte Carlo
density experiment."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

import numpy as np

from .errors import ValidationError
from .fields import tower_for
from .qmath import binom2, gauss_binomial
from .spreads import PartialSpread, desarguesian_spread
from .subspaces import batch_rank

__all__ = [
    "gauss_binomial", "delta_count", "omega_count", "disjoint_count", "scattered_count_bounds",
    "thresholds", "asymptotic_exponents", "trend_check", "empirical_density", "CountReport",
    "DensityCurve", "CSV_HEADER",
]

CSV_HEADER = ["q", "m", "n", "h", "k", "samples", "scattered", "proportion", "seed"]


@dataclass
class CountReport:
    quantity: str
    value: int
    formula: str
    params: dict
    in_formula_range: bool = True

    def to_dict(self) -> dict:
        return {"quantity": self.quantity, "value": str(self.value), "formula": self.formula,
                "params": self.params, "in_formula_range": self.in_formula_range}


def _check_basic(N: int, k: int, m: int, h: int, q: int) -> None:
    if q < 2:
        raise ValidationError("q must be >= 2")
    if not 1 <= k <= N:
        raise ValidationError(f"need 1 <= k <= N, got k={k}, N={N}")
    if not 1 <= m <= N:
        raise ValidationError(f"need 1 <= m <= N, got m={m}")
    if h < 0:
        raise ValidationError("h must be >= 0")


def _delta_sum(N: int, k: int, m: int, h: int, q: int) -> int:
    total = 0
    for l in range(h + 1, m + 1):
        for b in range(l, m + 1):
            term = (gauss_binomial(m, l, q) * gauss_binomial(m - l, b - l, q)
                    * gauss_binomial(N - b, k - b, q) * q ** binom2(b - l))
            total += -term if (b - l) % 2 else term
    return total


def delta_count(N: int, k: int, m: int, h: int, q: int) -> int:
    """Number of k-spaces of F_q^N meeting a fixed m-space in dimension >= h+1.

    The alternating sum is also evaluated for m > N-k; those values are
    checked against brute force in the test suite.
    """
    _check_basic(N, k, m, h, q)
    return _delta_sum(N, k, m, h, q)


def delta_report(N: int, k: int, m: int, h: int, q: int) -> CountReport:
    v = delta_count(N, k, m, h, q)
    return CountReport("delta", v, "double alternating sum", dict(N=N, k=k, m=m, h=h, q=q),
                       in_formula_range=m <= N - k)


def _omega_sum(N: int, k: int, m: int, h: int, q: int) -> int:
    total = 0
    for l in range(h + 1, m + 1):
        for lp in range(h + 1, m + 1):
            pre = gauss_binomial(m, l, q) * gauss_binomial(m, lp, q)
            inner = 0
            for r in range(l, m + 1):
                for s in range(lp, m + 1):
                    term = (gauss_binomial(m - l, r - l, q) * gauss_binomial(m - lp, s - lp, q)
                            * gauss_binomial(N - r - s, k - r - s, q)
                            * q ** (binom2(r - l) + binom2(s - lp)))
                    inner += -term if (r + s - l - lp) % 2 else term
            total += pre * inner
    return total


def omega_count(N: int, k: int, m: int, h: int, q: int) -> int:
    """Number of k-spaces meeting each of two disjoint m-spaces in dimension >= h+1."""
    _check_basic(N, k, m, h, q)
    if 2 * m > N:
        raise ValidationError("two disjoint m-spaces need 2m <= N")
    return _omega_sum(N, k, m, h, q)


def omega_report(N: int, k: int, m: int, h: int, q: int) -> CountReport:
    v = omega_count(N, k, m, h, q)
    return CountReport("omega", v, "quadruple alternating sum", dict(N=N, k=k, m=m, h=h, q=q),
                       in_formula_range=m <= N - k)


def disjoint_count(N: int, k: int, l: int, q: int) -> int:
    """Number of k-spaces of F_q^N meeting a fixed l-space trivially."""
    if min(N, k, l) < 0:
        raise ValidationError("negative parameter")
    return q ** (l * k) * gauss_binomial(N - l, k, q)


@dataclass
class CountBounds:
    total: int
    lower: int
    upper: Fraction
    delta: int
    omega: int

    @property
    def upper_floor(self) -> int:
        return floor(self.upper)

    def to_dict(self) -> dict:
        return {"total": str(self.total), "lower": str(self.lower),
                "upper": f"{self.upper.numerator}/{self.upper.denominator}" if self.upper.denominator != 1
                else str(self.upper.numerator),
                "upper_floor": str(self.upper_floor), "delta": str(self.delta), "omega": str(self.omega)}


def scattered_count_bounds(A_size: int, N: int, k: int, m: int, h: int, q: int) -> CountBounds:
    """Lower and upper bounds on the number of (A,h)-scattered k-spaces for a
    partial m-spread A of the given size."""
    if A_size < 1:
        raise ValidationError("the partial spread must be nonempty")
    total = gauss_binomial(N, k, q)
    d = delta_count(N, k, m, h, q)
    w = omega_count(N, k, m, h, q) if 2 * m <= N else 0
    if A_size > 1 and 2 * m > N:
        raise ValidationError("a partial spread with two elements needs 2m <= N")
    lower = max(0, total - A_size * d)
    denom = d + (A_size - 1) * w
    upper = Fraction(total) - (Fraction(A_size * d * d, denom) if denom else 0)
    return CountBounds(total, lower, upper, d, w)


def _fr(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def thresholds(q: int, h: int, *, N: int | None = None, m: int | None = None, n: int | None = None,
               m_prime: int | None = None, k: int | None = None, A_size: int | None = None) -> dict:
    """Existence and density thresholds, evaluated exactly."""
    if m is None:
        raise ValidationError("m is required")
    if N is None:
        if n is None:
            raise ValidationError("give N or n")
        N = m * n
    out: dict = {"q": q, "h": h, "N": N, "m": m}
    kmax = Fraction(h * N, h + 1) + Fraction(m, h + 1) - m + h
    out["spread_existence"] = {
        "k_bound": _fr(kmax), "k_max": floor(kmax), "field_condition": q ** (h + 1) >= 64}
    tip = Fraction(h * N, h + 1) - Fraction(m * h, h + 1) + h
    out["density_tipping_dimension"] = _fr(tip)
    if k is not None:
        out["gamma"] = (h + 1) * (N + h + 1 - k - m)
    if m_prime is not None:
        simple = Fraction(q ** ((h + 1) * (m_prime - m + h + 1)), 4)
        out["simplified_size_threshold"] = _fr(simple)
        kk = m if k is None else k
        if h + 1 <= kk <= m:
            den = gauss_binomial(m, h + 1, q) * gauss_binomial(m - h - 1, kk - h - 1, q)
            thr = Fraction(q ** (m_prime * (h + 1)) * gauss_binomial(m, kk, q), den)
            out["partial_spread_threshold"] = _fr(thr)
            if A_size is not None:
                out["partial_spread_guarantee"] = A_size < thr
        if A_size is not None:
            out["simplified_guarantee"] = 4 * A_size < q ** ((h + 1) * (m_prime - m + h + 1))
    return out


def asymptotic_exponents(N: int, k: int, m: int, h: int) -> tuple[int, int]:
    return ((h + 1) * (m - h - 1) + (k - h - 1) * (N - k),
            2 * (h + 1) * (m - h - 1) + (k - 2 * h - 2) * (N - k))


@dataclass
class TrendCheck:
    params: dict
    delta_exp: int
    omega_exp: int
    delta_ratios: dict
    omega_ratios: dict
    omega_degenerate: bool
    delta_ok: bool
    omega_ok: bool
    tolerance: tuple = (Fraction(1, 2), Fraction(2))

    def to_dict(self) -> dict:
        return {"params": self.params, "delta_exp": self.delta_exp, "omega_exp": self.omega_exp,
                "delta_ratios": {str(q): f"{float(r):.6f}" for q, r in self.delta_ratios.items()},
                "omega_ratios": {str(q): f"{float(r):.6f}" for q, r in self.omega_ratios.items()},
                "omega_degenerate": self.omega_degenerate, "delta_ok": self.delta_ok,
                "omega_ok": self.omega_ok}


def _ratios_ok(ratios: dict, lo: Fraction, hi: Fraction) -> bool:
    qs = sorted(ratios)
    vals = [ratios[q] for q in qs]
    dist = [abs(v - 1) for v in vals]
    monotone = all(a >= b for a, b in zip(dist, dist[1:]))
    return monotone and lo <= vals[-1] <= hi


def trend_check(N: int, k: int, m: int, h: int, qs=(2, 3, 4, 5)) -> TrendCheck:
    """Finite-q check that the counts approach q^exponent.

    Passes when |ratio - 1| is non-increasing in q and the ratio at the
    largest q lies in [1/2, 2]. When omega vanishes identically (k < 2h+2)
    its asymptotic statement is vacuous and omega is only checked to be 0.
    """
    de, we = asymptotic_exponents(N, k, m, h)
    dr = {q: Fraction(delta_count(N, k, m, h, q)) / Fraction(q) ** de for q in qs}
    wv = {q: omega_count(N, k, m, h, q) for q in qs}
    degenerate = all(v == 0 for v in wv.values())
    wr = {q: Fraction(wv[q]) / Fraction(q) ** we for q in qs}
    lo, hi = Fraction(1, 2), Fraction(2)
    d_ok = _ratios_ok(dr, lo, hi)
    w_ok = degenerate and k < 2 * h + 2 if degenerate else _ratios_ok(wr, lo, hi)
    return TrendCheck(dict(N=N, k=k, m=m, h=h, qs=list(qs)), de, we, dr, wr, degenerate, d_ok, w_ok)


# Monte Carlo density


@dataclass
class DensityCurve:
    q: int
    m: int
    n: int
    h: int
    samples: int
    seed: int
    rows: list = field(default_factory=list)  # (k, scattered)

    def proportion(self, k: int) -> float:
        for kk, s in self.rows:
            if kk == k:
                return s / self.samples
        raise KeyError(k)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for k, s in self.rows:
            w.writerow([self.q, self.m, self.n, self.h, k, self.samples, s,
                        f"{s / self.samples:.6f}", self.seed])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> DensityCurve:
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValidationError("empty density CSV")
        if list(rows[0].keys()) != CSV_HEADER:
            raise ValidationError("unexpected density CSV header")
        r0 = rows[0]
        curve = cls(int(r0["q"]), int(r0["m"]), int(r0["n"]), int(r0["h"]), int(r0["samples"]),
                    int(r0["seed"]))
        curve.rows = [(int(r["k"]), int(r["scattered"])) for r in rows]
        return curve


def _trial_matrices(F, N: int, k: int, seed: int, trials: range) -> np.ndarray:
    """One uniformly random full-rank k x N matrix per trial, each drawn from
    its own stream keyed by (seed, k, trial)."""
    gens = [np.random.default_rng([seed, k, t]) for t in trials]
    M = np.stack([g.integers(0, F.order, size=(k, N), dtype=np.int64) for g in gens]) if gens \
        else np.zeros((0, k, N), np.int64)
    bad = np.nonzero(batch_rank(F, M) < k)[0]
    while bad.size:
        for i in bad:
            M[i] = gens[i].integers(0, F.order, size=(k, N), dtype=np.int64)
        bad = bad[batch_rank(F, M[bad]) < k]
    return M


def _count_chunk(args) -> int:
    q, m, n, h, k, seed, start, stop, spread = args
    from .scattered import batch_max_intersection
    tower = tower_for(q, m)
    D = spread if spread is not None else desarguesian_spread(tower, n)
    M = _trial_matrices(tower.base, m * n, k, seed, range(start, stop))
    return int((batch_max_intersection(D, M) <= h).sum())


def empirical_density(q: int, m: int, n: int, h: int, k_range, samples: int, seed: int = 0,
                      workers: int = 1, spread: PartialSpread | None = None) -> DensityCurve:
    """Fraction of uniformly random k-spaces of F_q^{mn} that are (D,h)-scattered."""
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    tower = tower_for(q, m)
    N = m * n
    ks = list(k_range)
    if any(not 0 <= k <= N for k in ks):
        raise ValidationError("k out of range")
    curve = DensityCurve(q, m, n, h, samples, seed)
    D = spread if spread is not None else desarguesian_spread(tower, n)
    for k in ks:
        if k <= h:
            curve.rows.append((k, samples))
            continue
        chunk = max(1, (1 << 21) // q**k)
        jobs = [(q, m, n, h, k, seed, s, min(samples, s + chunk), D if workers <= 1 else None)
                for s in range(0, samples, chunk)]
        if workers <= 1:
            total = sum(_count_chunk(j) for j in jobs)
        else:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                total = sum(ex.map(_count_chunk, jobs))
        curve.rows.append((k, total))
    return curve
