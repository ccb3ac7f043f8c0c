"""Fans, class groups and the Cox ring of a simplicial toric variety.

A :class:`ToricVariety` bundles a :class:`Fan` with a base field F_q. Its Cox
ring ``F_q[x_1, ..., x_d]`` (one variable per ray) is graded by the class group,
computed as the cokernel of ``M -> Z^d, m -> (<m, ray_i>)_i``.

Graded pieces are enumerated through a strictly positive functional on the
free part of the class group, which exists because the variety is projective.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path

from . import lattice
from .errors import (
    EmptyPiece,
    IllFormedWeights,
    InvalidFan,
    TorusFactor,
    UnboundedPiece,
    ValidationError,
)
from .ff import FieldDescriptor, FieldElement, embed_value, make_field

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class Fan:
    """Simplicial fan: primitive ``rays`` in Z^n and ``max_cones`` as ray-index tuples."""

    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __init__(self, rays, max_cones, check: bool = True):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in rays))
        object.__setattr__(self, "max_cones", tuple(tuple(sorted(int(i) for i in c)) for c in max_cones))
        if check:
            self.validate()

    @property
    def n(self) -> int:
        return len(self.rays[0]) if self.rays else 0

    @property
    def d(self) -> int:
        return len(self.rays)

    def validate(self) -> None:
        n = self.n
        if not self.rays:
            raise InvalidFan("a fan needs at least one ray")
        for r in self.rays:
            if len(r) != n:
                raise InvalidFan("rays have inconsistent lengths")
            g = 0
            for x in r:
                g = math.gcd(g, x)
            if g != 1:
                raise InvalidFan(f"ray {r} is zero or not primitive")
        if lattice.rank([list(r) for r in self.rays]) != n:
            raise TorusFactor("rays do not span N tensor Q")
        for c in self.max_cones:
            if any(i < 0 or i >= self.d for i in c):
                raise InvalidFan(f"cone {c} refers to a missing ray")
            if len(set(c)) != len(c):
                raise InvalidFan(f"cone {c} repeats a ray")
            if lattice.rank([list(self.rays[i]) for i in c]) != len(c):
                raise InvalidFan(f"cone {c} is not simplicial")
            if len(c) != n:
                raise InvalidFan(f"maximal cone {c} is not full-dimensional")
        facets: dict[tuple[int, ...], int] = {}
        for c in self.max_cones:
            for f in combinations(c, n - 1):
                facets[f] = facets.get(f, 0) + 1
        bad = [f for f, k in facets.items() if k != 2]
        if bad:
            raise InvalidFan(f"fan is not complete: facet {bad[0]} lies in {facets[bad[0]]} maximal cone(s)")

    @cached_property
    def cones(self) -> tuple[tuple[int, ...], ...]:
        """All cones (faces of maximal cones, trivial cone first), sorted by (dim, rays)."""
        out = set()
        for c in self.max_cones:
            for k in range(len(c) + 1):
                out.update(combinations(c, k))
        return tuple(sorted(out, key=lambda c: (len(c), c)))

    @cached_property
    def cone_index(self) -> dict[tuple[int, ...], int]:
        return {c: i for i, c in enumerate(self.cones)}

    def is_smooth_cone(self, cone) -> bool:
        return lattice.sublattice_index([list(self.rays[i]) for i in cone]) == 1

    @cached_property
    def is_smooth(self) -> bool:
        return all(self.is_smooth_cone(c) for c in self.max_cones)

    def contains_face(self, zero_set) -> bool:
        z = set(zero_set)
        return any(z <= set(c) for c in self.max_cones)


@dataclass(frozen=True)
class DivisorClass:
    """Element of Cl(X) = Z^free_rank (+) torsion; torsion residues reduced mod ``moduli``."""

    free: tuple[int, ...]
    torsion: tuple[int, ...] = ()
    moduli: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(int(x) for x in self.free))
        t = tuple(int(x) % m for x, m in zip(self.torsion, self.moduli))
        object.__setattr__(self, "torsion", t)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(
            tuple(a + b for a, b in zip(self.free, other.free)),
            tuple(a + b for a, b in zip(self.torsion, other.torsion)),
            self.moduli,
        )

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + other * -1

    def __mul__(self, k: int) -> "DivisorClass":
        return DivisorClass(tuple(k * a for a in self.free), tuple(k * a for a in self.torsion), self.moduli)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __str__(self):
        s = ",".join(map(str, self.free))
        if self.torsion:
            s += ";" + ",".join(f"{t}/{m}" for t, m in zip(self.torsion, self.moduli))
        return f"O({s})"


@dataclass(frozen=True)
class ClassGroup:
    free_rank: int
    torsion_invariants: tuple[int, ...]
    grading: tuple[DivisorClass, ...]

    def zero(self) -> DivisorClass:
        return DivisorClass((0,) * self.free_rank, (0,) * len(self.torsion_invariants), self.torsion_invariants)

    def degree(self, alpha) -> DivisorClass:
        acc = self.zero()
        for a, g in zip(alpha, self.grading):
            if a:
                acc = acc + g * a
        return acc

    @property
    def has_torsion(self) -> bool:
        return bool(self.torsion_invariants)


def class_group(fan: Fan) -> ClassGroup:
    """Cokernel of ``M -> Z^d`` via Smith normal form, with a canonical free basis."""
    A = [list(r) for r in fan.rays]
    D, U, V = lattice.smith_normal_form(A)
    n, d = fan.n, fan.d
    diag = [D[i][i] for i in range(n)]
    if any(x == 0 for x in diag):
        raise TorusFactor("rays do not span N tensor Q")
    tors_rows = [i for i in range(n) if diag[i] > 1]
    moduli = tuple(diag[i] for i in tors_rows)
    free_rows = [U[i] for i in range(n, d)]
    free_rows = lattice.hermite_rows(free_rows) if free_rows else []
    grading = []
    for j in range(d):
        free = tuple(row[j] for row in free_rows)
        tors = tuple(U[i][j] for i in tors_rows)
        grading.append(DivisorClass(free, tors, moduli))
    return ClassGroup(d - n, moduli, tuple(grading))


def projective_space(n: int) -> Fan:
    if n < 1:
        raise ValidationError("projective space needs n >= 1")
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple([-1] * n)]
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan(rays, cones)


def weighted_projective(weights) -> Fan:
    """Fan of P(w_0, ..., w_n); the grading of its class group equals ``weights``."""
    w = [int(x) for x in weights]
    n = len(w) - 1
    if n < 1 or any(x < 1 for x in w):
        raise IllFormedWeights("need at least two positive weights")
    for i in range(n + 1):
        g = 0
        for j, x in enumerate(w):
            if j != i:
                g = math.gcd(g, x)
        if g != 1:
            raise IllFormedWeights(f"weights {tuple(w)} are not well-formed")
    ones = [i for i, x in enumerate(w) if x == 1]
    if ones:
        j = ones[-1]
        rays = []
        k = 0
        for i in range(n + 1):
            if i == j:
                continue
            rays.append((i, tuple(int(t == k) for t in range(n))))
            k += 1
        # x_j's ray balances the rest: sum_i w_i ray_i = 0
        rest = [-sum(w[i] * r[t] for i, r in rays) for t in range(n)]
        rays.append((j, tuple(rest)))
        rays = [r for _, r in sorted(rays)]
    else:
        D, U, V = lattice.smith_normal_form([[x] for x in w])
        sign = D[0][0] * V[0][0]
        if sign < 0:
            U = [[-x for x in row] for row in U]
        rays = [tuple(U[r][i] for r in range(1, n + 1)) for i in range(n + 1)]
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan(rays, cones)


def product_fan(n1: int, n2: int) -> Fan:
    """Fan of P^n1 x P^n2; rays of the first factor come first."""
    if n1 < 1 or n2 < 1:
        raise ValidationError("product factors need dimension >= 1")
    a, b = projective_space(n1), projective_space(n2)
    rays = [r + (0,) * n2 for r in a.rays] + [(0,) * n1 + r for r in b.rays]
    cones = [c1 + tuple(i + n1 + 1 for i in c2) for c1 in a.max_cones for c2 in b.max_cones]
    return Fan(rays, cones)


class ToricVariety:
    """A projective simplicial toric variety over F_q, with its graded Cox ring."""

    def __init__(self, fan: Fan, field: FieldDescriptor, twist=None, name: str | None = None):
        self.fan = fan
        self.field = field
        self.name = name or "X"
        self.class_group = class_group(fan)
        self._bases: dict[DivisorClass, tuple[Monomial, ...]] = {}
        self._twist = twist

    def __repr__(self):
        return f"ToricVariety({self.name}, q={self.q})"

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def n(self) -> int:
        return self.fan.n

    dim = n

    @property
    def d(self) -> int:
        return self.fan.d

    @property
    def grading(self):
        return self.class_group.grading

    @property
    def is_smooth(self) -> bool:
        return self.fan.is_smooth

    # -- divisor classes ---------------------------------------------------

    def divisor(self, spec) -> DivisorClass:
        """Accept a DivisorClass, an int ``l`` (meaning O(l), rank one only) or a free vector."""
        cg = self.class_group
        if isinstance(spec, DivisorClass):
            return spec
        if isinstance(spec, str):
            s = spec.strip()
            if s.startswith("O(") and s.endswith(")"):
                s = s[2:-1]
            parts = [int(x) for x in s.split(",") if x.strip()]
            spec = parts[0] if len(parts) == 1 else tuple(parts)
        if isinstance(spec, int):
            if spec == 0:
                return cg.zero()
            if cg.free_rank != 1:
                raise ValidationError("O(l) shortcut needs a class group of rank one")
            spec = (spec,)
        free = tuple(int(x) for x in spec)
        if len(free) != cg.free_rank:
            raise ValidationError(f"divisor needs {cg.free_rank} free coordinates, got {len(free)}")
        return DivisorClass(free, (0,) * len(cg.torsion_invariants), cg.torsion_invariants)

    def degree(self, alpha) -> DivisorClass:
        return self.class_group.degree(alpha)

    @cached_property
    def positivity(self) -> tuple[int, ...]:
        vecs = [list(g.free) for g in self.grading]
        lam = lattice.positive_functional(vecs)
        if lam is None:
            raise UnboundedPiece("no strictly positive functional on the grading; pieces are infinite")
        return tuple(lam)

    def weight(self, cls: DivisorClass) -> int:
        return sum(a * b for a, b in zip(self.positivity, cls.free))

    @property
    def twist(self) -> DivisorClass:
        """Ample class used for D + kE when the caller gives none."""
        if self._twist is not None:
            return self.divisor(self._twist)
        cg = self.class_group
        if cg.free_rank == 1:
            lcm = 1
            for g in self.grading:
                lcm = lcm * abs(g.free[0]) // math.gcd(lcm, abs(g.free[0]))
            return self.divisor(lcm)
        acc = cg.zero()
        for g in self.grading:
            acc = acc + g
        return acc

    # -- Cox ring ------------------------------------------------------------

    def monomial_basis(self, cls) -> tuple[Monomial, ...]:
        cls = self.divisor(cls)
        if cls in self._bases:
            return self._bases[cls]
        weights = [self.weight(g) for g in self.grading]
        budget = self.weight(cls)
        d = self.d
        out = []
        if budget >= 0:
            alpha = [0] * d

            def rec(i, left):
                if i == d - 1:
                    if left % weights[i] == 0:
                        alpha[i] = left // weights[i]
                        if self.degree(alpha) == cls:
                            out.append(tuple(alpha))
                    return
                for a in range(left // weights[i], -1, -1):
                    alpha[i] = a
                    rec(i + 1, left - a * weights[i])
                alpha[i] = 0

            rec(0, budget)
        out.sort(key=lambda a: (-sum(a), tuple(-x for x in a)))
        basis = tuple(out)
        self._bases[cls] = basis
        return basis

    def is_relevant(self, coords) -> bool:
        zeros =[i for i, c in enumerate(coords) if _is_zero(c)]
        return self.fan.contains_face(zeros)

    def standard_degree_delta(self, cls) -> int:
        basis = self.monomial_basis(cls)
        if not basis:
            raise EmptyPiece(f"{cls} has no sections")
        return max(sum(a) for a in basis)

    def section(self, cls, coeffs=None) -> "Section":
        cls = self.divisor(cls)
        B = len(self.monomial_basis(cls))
        if coeffs is None:
            coeffs = (0,) * B
        return Section(self, cls, tuple(int(c) for c in coeffs))

    def section_from_terms(self, cls, terms: dict) -> "Section":
        """Build a section from ``{exponent tuple: coefficient encoding}``."""
        cls = self.divisor(cls)
        basis = self.monomial_basis(cls)
        index = {a: i for i, a in enumerate(basis)}
        coeffs = [0] * len(basis)
        for alpha, c in terms.items():
            alpha = tuple(alpha)
            if alpha not in index:
                raise ValidationError(f"monomial {alpha} is not in the piece {cls}")
            coeffs[index[alpha]] = self.field.add(coeffs[index[alpha]], int(c) % self.field.order)
        return Section(self, cls, tuple(coeffs))


def _is_zero(c) -> bool:
    if isinstance(c, FieldElement):
        return c.value == 0
    return c == 0


@dataclass(frozen=True)
class Section:
    """A global section of O(cls): F_q-coefficients on the canonical monomial basis."""

    variety: ToricVariety
    cls: DivisorClass
    coeffs: tuple[int, ...]

    @property
    def basis(self) -> tuple[Monomial, ...]:
        return self.variety.monomial_basis(self.cls)

    def terms(self) -> dict[Monomial, int]:
        return {a: c for a, c in zip(self.basis, self.coeffs) if c}

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "Section") -> "Section":
        if other.cls != self.cls:
            raise ValidationError("cannot add sections of different classes")
        F = self.variety.field
        return Section(self.variety, self.cls, tuple(F.add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "Section") -> "Section":
        X = self.variety
        F = X.field
        terms: dict[Monomial, int] = {}
        for a, ca in self.terms().items():
            for b, cb in other.terms().items():
                m = tuple(x + y for x, y in zip(a, b))
                terms[m] = F.add(terms.get(m, 0), F.mul(ca, cb))
        return X.section_from_terms(self.cls + other.cls, terms)

    def scale(self, c: int) -> "Section":
        F = self.variety.field
        return Section(self.variety, self.cls, tuple(F.mul(c, x) for x in self.coeffs))

    def partial(self, i: int) -> "Section":
        return partial_derivative(self, i)

    def __call__(self, coords):
        return evaluate(self, coords)

    def __str__(self):
        names = [f"x{i}" for i in range(self.variety.d)]
        parts = []
        F = self.variety.field
        for a, c in self.terms().items():
            mon = "*".join(f"{v}^{e}" if e > 1 else v for v, e in zip(names, a) if e) or "1"
            parts.append(mon if c == 1 else f"{FieldElement(F, c)!r}*{mon}")
        return " + ".join(parts) or "0"


def monomial_basis(cls, variety: ToricVariety) -> tuple[Monomial, ...]:
    return variety.monomial_basis(cls)


def standard_degree_delta(cls, variety: ToricVariety) -> int:
    return variety.standard_degree_delta(cls)


def is_relevant(variety: ToricVariety, coords) -> bool:
    return variety.is_relevant(coords)


def partial_derivative(f: Section, i: int) -> Section:
    """Formal derivative in ``x_i``; the class drops by ``deg x_i``."""
    X = f.variety
    F = X.field
    new_cls = f.cls - X.grading[i]
    terms: dict[Monomial, int] = {}
    for a, c in f.terms().items():
        if a[i] % F.p == 0:
            continue
        b = list(a)
        b[i] -= 1
        terms[tuple(b)] = F.scalar(a[i], c)
    if not X.monomial_basis(new_cls) and not terms:
        return Section(X, new_cls, ())
    return X.section_from_terms(new_cls, terms)


def evaluate(f: Section, coords) -> FieldElement:
    """Value of ``f`` at Cox coordinates over an extension F_{q^e} of F_q."""
    X = f.variety
    if not coords:
        raise ValidationError("empty coordinate tuple")
    K = coords[0].field if isinstance(coords[0], FieldElement) else X.field
    vals = [c.value if isinstance(c, FieldElement) else int(c) for c in coords]
    if len(vals) != X.d:
        raise ValidationError(f"expected {X.d} coordinates, got {len(vals)}")
    acc = 0
    for a, c in f.terms().items():
        term = embed_value(X.field, K, c)
        for x, e in zip(vals, a):
            if e:
                term = K.mul(term, K.pow(x, e))
                if not term:
                    break
        acc = K.add(acc, term)
    return FieldElement(K, acc)


# ---------------------------------------------------------------------------
# variety specification files

_MODE_KEYS = {
    "fan": {"mode", "rays", "max_cones", "field"},
    "weighted": {"mode", "weights", "field"},
    "product": {"mode", "factors", "field"},
}


def load_variety(spec, field_override=None) -> ToricVariety:
    """Build a variety from a spec dict or a JSON file path.

    ``field_override`` is ``(p, a)`` and replaces the file's ``field`` entry.
    """
    if isinstance(spec, (str, Path)):
        try:
            spec = json.loads(Path(spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read variety file: {exc}") from exc
    if not isinstance(spec, dict):
        raise ValidationError("variety spec must be a JSON object")
    mode = spec.get("mode")
    if mode not in _MODE_KEYS:
        raise ValidationError(f"unknown mode {mode!r}; expected one of {sorted(_MODE_KEYS)}")
    need = set(_MODE_KEYS[mode])
    keys = set(spec)
    if field_override is not None:
        need.discard("field")
    missing = need - keys
    extra = keys - _MODE_KEYS[mode]
    if missing:
        raise ValidationError(f"variety spec is missing keys {sorted(missing)}")
    if extra:
        raise ValidationError(f"variety spec has unknown keys {sorted(extra)}")
    if field_override is not None:
        p, a = field_override
    else:
        fld = spec["field"]
        if not isinstance(fld, dict) or set(fld) != {"p", "a"}:
            raise ValidationError('field must be {"p": int, "a": int}')
        p, a = fld["p"], fld["a"]
    F = make_field(int(p), int(a))
    if mode == "fan":
        return ToricVariety(Fan(spec["rays"], spec["max_cones"]), F, name="fan")
    if mode == "weighted":
        w = tuple(spec["weights"])
        return ToricVariety(weighted_projective(w), F, name=f"P{w}")
    factors = spec["factors"]
    if len(factors) != 2:
        raise ValidationError("product mode takes exactly two factors")
    n1, n2 = int(factors[0]), int(factors[1])
    return ToricVariety(product_fan(n1, n2), F, twist=(1, 1), name=f"P{n1}xP{n2}")


def variety_spec(X: ToricVariety) -> dict:
    """Inverse of :func:`load_variety` in fan mode."""
    return {
        "mode": "fan",
        "rays": [list(r) for r in X.fan.rays],
        "max_cones": [list(c) for c in X.fan.max_cones],
        "field": {"p": X.field.p, "a": X.field.n},
    }


def P(n: int, q: int) -> ToricVariety:
    """Shortcut for projective space P^n over F_q."""
    return ToricVariety(projective_space(n), field_for(q), name=f"P{n}")


def WP(weights, q: int) -> ToricVariety:
    w = tuple(weights)
    return ToricVariety(weighted_projective(w), field_for(q), name=f"P{w}")


def PxP(n1: int, n2: int, q: int) -> ToricVariety:
    return ToricVariety(product_fan(n1, n2), field_for(q), twist=(1, 1), name=f"P{n1}xP{n2}")


def field_for(q: int) -> FieldDescriptor:
    """F_q from its order."""
    for p in range(2, q + 1):
        if q % p == 0:
            a = 0
            r = q
            while r % p == 0:
                r //= p
                a += 1
            if r != 1:
                break
            return make_field(p, a)
    raise ValidationError(f"{q} is not a prime power")
