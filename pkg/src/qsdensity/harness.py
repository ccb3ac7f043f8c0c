"""Empirical densities: enumerate or sample sections and sieve their singular points.

The sieve is linear algebra. For a fixed graded piece, the jet
(f(Q), grad f(Q)) at every closed point Q up to the scan degree is an
F_p-linear function of the F_p-digits of f's coefficients, so one matrix
product classifies a whole batch of sections at all points at once.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .density import ClosedFormMu, finite_sing_density, main_density, scheme_length_density
from .errors import CapExceeded, ValidationError, ZeroNu
from .jets import Unstable, singular_length
from .points import ClosedPoint, enumerate_closed_points
from .quasismooth import AmbientSubscheme, _reduction_matrix, jet_matrix, nu_profile
from .toric import Section, ToricVariety, load_variety

SECTION_CAP = 1 << 22
BATCH = 4096


def _check_cap(X: ToricVariety, B: int, cap: int | None):
    cap = SECTION_CAP if cap is None else cap
    if X.q**B > cap:
        raise CapExceeded(f"{X.q}^{B} sections exceed the cap {cap}; use sampling")


def _coeffs_from_index(idx: np.ndarray, q: int, B: int) -> np.ndarray:
    """Coefficient vectors for section indices in coefficient-lex order (first varies slowest)."""
    out = np.empty((len(idx), B), dtype=np.int64)
    rest = idx.copy()
    for j in range(B - 1, -1, -1):
        out[:, j] = rest % q
        rest //= q
    return out


def enumerate_sections(X: ToricVariety, cls, cap: int | None = None):
    cls = X.divisor(cls)
    B = len(X.monomial_basis(cls))
    _check_cap(X, B, cap)
    for i in range(X.q**B):
        c = _coeffs_from_index(np.array([i]), X.q, B)[0] if B else []
        yield Section(X, cls, tuple(int(x) for x in c))


def sample_sections(X: ToricVariety, cls, count: int, seed: int = 0):
    cls = X.divisor(cls)
    B = len(X.monomial_basis(cls))
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield Section(X, cls, tuple(int(x) for x in rng.integers(0, X.q, size=B)))


def is_plane(X: ToricVariety) -> bool:
    g = X.grading
    return X.d == 3 and X.dim == 2 and X.class_group.free_rank == 1 and all(x.free == (1,) for x in g)


class Sieve:
    """Singular-point detector for all sections of one class at all points up to a degree."""

    def __init__(self, X: ToricVariety, cls, scan_degree: int, Y: AmbientSubscheme | None = None):
        if scan_degree < 1:
            raise ValidationError("scan_degree must be at least 1")
        self.X = X
        self.cls = X.divisor(cls)
        self.basis = X.monomial_basis(self.cls)
        self.scan_degree = scan_degree
        self.Y = Y
        pts = []
        blocks = []
        for P in enumerate_closed_points(X, scan_degree):
            reduce = None
            if Y is not None:
                if not Y.contains(P.coords, P.field):
                    continue
                R, piv = Y.reducer(P.coords, P.field)
                reduce = _reduction_matrix(P.field, R, piv, X.d)
            pts.append(P)
            blocks.append(jet_matrix(X, self.basis, P.coords, P.field, reduce))
        self.points: list[ClosedPoint] = pts
        widths = [b.shape[1] for b in blocks]
        self.offsets = np.concatenate([[0], np.cumsum(widths)[:-1]]).astype(np.int64) if widths else np.zeros(0, np.int64)
        rows = X.field.n * len(self.basis)
        self.M = np.hstack(blocks) if blocks else np.zeros((rows, 0), dtype=np.int64)
        self.degrees = np.array([P.degree for P in pts], dtype=np.int64)

    @property
    def certified(self) -> bool:
        """Plane-curve Bezout bound: singular points have degree <= (delta - 1)^2."""
        if self.Y is not None or not is_plane(self.X) or not self.basis:
            return False
        delta = self.X.standard_degree_delta(self.cls)
        return self.scan_degree >= (delta - 1) ** 2

    def digits(self, coeffs: np.ndarray) -> np.ndarray:
        """F_p digits of F_q coefficients, laid out to match the jet matrix rows."""
        p, a = self.X.p, self.X.field.n
        if a == 1:
            return coeffs
        return np.hstack([(coeffs // p**k) % p for k in range(a)])

    def singular_mask(self, coeffs: np.ndarray) -> np.ndarray:
        """Boolean (sections x points): True where the section is not quasismooth."""
        if not self.points:
            return np.zeros((len(coeffs), 0), dtype=bool)
        if self.M.shape[0] == 0:
            return np.ones((len(coeffs), len(self.points)), dtype=bool)
        V = (self.digits(coeffs) @ self.M) % self.X.p
        nonzero = np.add.reduceat((V != 0).astype(np.int64), self.offsets, axis=1)
        return nonzero == 0

    def singular_points(self, f: Section) -> list[ClosedPoint]:
        mask = self.singular_mask(np.array([f.coeffs], dtype=np.int64))[0]
        return [P for P, m in zip(self.points, mask) if m]


_sieves: dict = {}


def get_sieve(X: ToricVariety, cls, scan_degree: int, Y=None) -> Sieve:
    key = (id(X), X.divisor(cls), scan_degree, id(Y))
    if key not in _sieves:
        _sieves[key] = Sieve(X, cls, scan_degree, Y)
    return _sieves[key]


def singular_points(f: Section, scan_degree: int, Y: AmbientSubscheme | None = None):
    """``(points, completeness)`` with completeness ``"Certified"`` or ``"BoundedScan"``."""
    sv = get_sieve(f.variety, f.cls, scan_degree, Y)
    return sv.singular_points(f), ("Certified" if sv.certified else "BoundedScan")


# ---------------------------------------------------------------------------
# experiments


@dataclass
class ExperimentConfig:
    variety: object  # ToricVariety or a variety spec dict / path
    D: object
    E: object = None
    ks: tuple = (1,)
    mode: str = "exhaustive"  # or "sample"
    count: int = 1000
    seed: int = 0
    scan_degree: int = 2
    s_values: tuple = ()
    length_predicates: bool = False
    trunc_degree: int = 6
    threads: int = 1
    cap: int | None = None
    out_csv: str | None = None
    out_json: str | None = None
    Y: AmbientSubscheme | None = None

    def resolve(self) -> ToricVariety:
        if isinstance(self.variety, ToricVariety):
            return self.variety
        return load_variety(self.variety)


@dataclass
class PredicateRow:
    k: int
    predicate: str
    count: int
    total: int
    fraction: float
    ci_lo: float
    ci_hi: float
    analytic: float | None
    tail: float | None
    certified: bool


@dataclass
class DensityReport:
    variety: str
    q: int
    D: str
    E: str
    mode: str
    scan_degree: int
    rows: list = field(default_factory=list)
    indeterminate: dict = field(default_factory=dict)  # (k, predicate) -> count
    complete: bool = True

    def row(self, k: int, predicate: str) -> PredicateRow:
        return next(r for r in self.rows if r.k == k and r.predicate == predicate)

    def to_json(self) -> dict:
        d = asdict(self)
        d["indeterminate"] = {f"{k}:{p}": v for (k, p), v in self.indeterminate.items()}
        return d

    def write_csv(self, path):
        cols = ["k", "predicate", "count", "total", "fraction", "ci_lo", "ci_hi", "analytic", "tail", "certified"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in self.rows:
                w.writerow([getattr(r, c) for c in cols])

    def write_json(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=2))


def _interval(count: int, total: int, exhaustive: bool):
    if total == 0:
        return 0.0, 0.0, 1.0
    frac = count / total
    if exhaustive:
        return frac, frac, frac
    lo, hi = proportion_confint(count, total, alpha=0.05, method="wilson")
    return frac, float(lo), float(hi)


def _tally(sieve: Sieve, coeffs: np.ndarray, s_values, lengths: bool):
    """Per-batch counts: quasismooth, #singular points < s, length < s, indeterminate."""
    X = sieve.X
    mask = sieve.singular_mask(coeffs)
    nsing = mask.sum(axis=1)
    out = {"quasismooth": int((nsing == 0).sum())}
    for s in s_values:
        out[f"points<{s}"] = int((nsing < s).sum())
    if lengths:
        for s in s_values:
            out[f"length<{s}"] = 0
            out[f"length<{s}:indeterminate"] = 0
        smax = max(s_values) if s_values else 1
        for row, m, ns in zip(coeffs, mask, nsing):
            if ns >= smax:
                # each singular point has length >= 1, so every predicate fails
                continue
            f = Section(X, sieve.cls, tuple(int(c) for c in row))
            total, bad = 0, False
            for P, hit in zip(sieve.points, m):
                if hit:
                    L = singular_length(f, P)
                    if isinstance(L, Unstable):
                        bad = True
                        total += L.lower_bound
                    else:
                        total += L
            for s in s_values:
                if bad and total < s:
                    out[f"length<{s}:indeterminate"] += 1
                elif total < s:
                    out[f"length<{s}"] += 1
    return out


def _merge(acc: dict, part: dict):
    for k, v in part.items():
        acc[k] = acc.get(k, 0) + v


def _analytic(X: ToricVariety, cfg: ExperimentConfig, D):
    """Analytic targets per predicate: (value, tail) or None."""
    out = {}
    prof = nu_profile(X, cfg.Y, D, cfg.E, max_degree=cfg.trunc_degree)
    main = main_density(prof)
    out["quasismooth"] = (float(main.value), float(main.tail_bound))
    for s in cfg.s_values:
        try:
            fs = finite_sing_density(prof, s)
            out[f"points<{s}"] = (float(fs.value), float(fs.tail_bound))
        except ZeroNu:
            out[f"points<{s}"] = None
        if cfg.length_predicates and X.is_smooth and X.dim == 2 and s <= 2:
            sl = scheme_length_density(ClosedFormMu(X.q), X, s, cfg.trunc_degree)
            out[f"length<{s}"] = (float(sl.value), float(sl.tail_bound))
    return out


def run_experiment(cfg: ExperimentConfig) -> DensityReport:
    X = cfg.resolve()
    if cfg.mode not in ("exhaustive", "sample"):
        raise ValidationError(f"unknown mode {cfg.mode!r}")
    if cfg.length_predicates and not X.is_smooth:
        raise ValidationError("length predicates need a smooth variety")
    D = X.divisor(cfg.D)
    E = X.twist if cfg.E is None else X.divisor(cfg.E)
    report = DensityReport(X.name, X.q, str(D), str(E), cfg.mode, cfg.scan_degree)
    analytic = _analytic(X, cfg, D)
    exhaustive = cfg.mode == "exhaustive"
    try:
        for k in cfg.ks:
            cls = D + E * k
            sieve = get_sieve(X, cls, cfg.scan_degree, cfg.Y)
            B = len(sieve.basis)
            if exhaustive:
                _check_cap(X, B, cfg.cap)
                total = X.q**B
                parts = _partitions(total, cfg.threads)

                def work(rng_part):
                    acc: dict = {}
                    lo, hi = rng_part
                    for start in range(lo, hi, BATCH):
                        idx = np.arange(start, min(hi, start + BATCH), dtype=np.int64)
                        _merge(acc, _tally(sieve, _coeffs_from_index(idx, X.q, B), cfg.s_values, cfg.length_predicates))
                    return acc
            else:
                total = cfg.count
                parts = _partitions(total, cfg.threads)
                seeds = np.random.SeedSequence(cfg.seed)

                def work(rng_part, _ss=seeds):
                    acc: dict = {}
                    lo, hi = rng_part
                    # draws are generated for the whole stream, so partitioning does not change them
                    gen = np.random.default_rng(_ss)
                    coeffs = gen.integers(0, X.q, size=(total, B))
                    for start in range(lo, hi, BATCH):
                        chunk = coeffs[start : min(hi, start + BATCH)]
                        _merge(acc, _tally(sieve, chunk, cfg.s_values, cfg.length_predicates))
                    return acc

            tallies: dict = {}
            if cfg.threads > 1:
                with ThreadPoolExecutor(cfg.threads) as ex:
                    for part in ex.map(work, parts):
                        _merge(tallies, part)
            else:
                for p in parts:
                    _merge(tallies, work(p))
            certified = sieve.certified
            report.complete &= certified
            for name, cnt in tallies.items():
                if name.endswith(":indeterminate"):
                    report.indeterminate[(k, name.split(":")[0])] = cnt
                    continue
                frac, lo, hi = _interval(cnt, total, exhaustive)
                an = analytic.get(name)
                report.rows.append(
                    PredicateRow(k, name, cnt, total, frac, lo, hi, an[0] if an else None, an[1] if an else None, certified)
                )
            _flush(report, cfg)
    except KeyboardInterrupt:
        _flush(report, cfg)
        raise
    return report


def _partitions(total: int, threads: int):
    threads = max(1, threads)
    step = math.ceil(total / threads) if total else 0
    return [(i, min(total, i + step)) for i in range(0, total, step)] if total else []


def _flush(report: DensityReport, cfg: ExperimentConfig):
    if cfg.out_csv:
        report.write_csv(cfg.out_csv)
    if cfg.out_json:
        report.write_json(cfg.out_json)
