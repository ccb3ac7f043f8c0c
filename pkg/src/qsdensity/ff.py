"""Finite fields F_p, F_q = F_{p^a} and extensions F_{q^e}.

Every field is a :class:`FieldDescriptor` over its prime field. Elements are
encoded as integers ``sum(c_i * p**i)`` where ``c_0, c_1, ...`` are the
coefficients (low-to-high) of the residue polynomial modulo the field's
modulus. Small fields get exp/log/Zech tables so that hot loops stay in plain
integer arithmetic; larger ones fall back to schoolbook polynomial arithmetic.

The tower "F_q inside F_{q^e}" is handled by :func:`embed`, which picks one
ring embedding per pair of degrees and keeps all choices compatible.
"""

from __future__ import annotations

import functools
import itertools
import threading

import numpy as np

from .errors import CapExceeded, NotASubfield, NotPrime, ValidationError

#: Fields up to this order get exp/log/Zech tables.
TABLE_LIMIT = 1 << 16

_field_cap = 1 << 32


def set_field_cap(cap: int) -> None:
    """Set the largest field order that :func:`make_field` will build."""
    global _field_cap
    _field_cap = int(cap)


def get_field_cap() -> int:
    return _field_cap


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# polynomials over F_p as coefficient lists, low-to-high, no trailing zeros

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _poly_divmod(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return _trim(q), a


def _poly_gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _poly_powmod(base, e, mod, p):
    result = [1]
    base = _poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_divmod(_poly_mul(result, base, p), mod, p)[1]
        base = _poly_divmod(_poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def is_irreducible(poly, p: int) -> bool:
    """Ben-Or test for a monic polynomial over F_p (coefficients low-to-high)."""
    f = _trim(list(poly))
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if f[0] == 0:
        return False
    x = [0, 1]
    h = x
    for _ in range(n // 2):
        h = _poly_powmod(h, p, f, p)
        g = _poly_gcd(f, _poly_sub(h, x, p), p)
        if len(g) > 1:
            return False
    return True


# ---------------------------------------------------------------------------


class FieldDescriptor:
    """The field F_p[t]/(modulus) of order p**n.

    Instances are created by :func:`make_field` and cached, so two calls with
    the same ``(p, n)`` return the same object. Arithmetic methods act on the
    integer encoding; wrap values with ``field(v)`` to get a
    :class:`FieldElement` with operator overloads.
    """

    def __init__(self, p: int, n: int, modulus: tuple[int, ...]):
        self.p = p
        self.n = n
        self.modulus = tuple(modulus)
        self.order = p**n
        self._lock = threading.Lock()
        self._exp = None
        self._log = None
        self._zech = None
        self._arrays = None
        self._digits = None

    def __repr__(self):
        return f"GF({self.p}^{self.n})"

    def __reduce__(self):
        return make_field, (self.p, self.n)

    # -- encoding --------------------------------------------------------

    def coeffs(self, x: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.n):
            x, r = divmod(x, p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        v = 0
        for c in reversed(list(coeffs)):
            v = v * self.p + int(c) % self.p
        return v

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise ValidationError(f"element of {value.field} is not in {self}")
            return value
        if isinstance(value, (list, tuple)):
            return FieldElement(self, self.from_coeffs(value))
        return FieldElement(self, self.from_int(int(value)))

    def wrap(self, value: int) -> "FieldElement":
        """Element with the given integer encoding (not the integer's residue)."""
        if not 0 <= value < self.order:
            raise ValidationError(f"{value} is not an encoding of an element of {self}")
        return FieldElement(self, value)

    def from_int(self, c: int) -> int:
        """Image of the integer ``c`` (an element of the prime field)."""
        return c % self.p

    def elements(self):
        return range(self.order)

    def order_key(self, x: int) -> tuple[int, ...]:
        """Sort key for the total order by coefficient lists (low-to-high)."""
        return self.coeffs(x)

    # -- tables ----------------------------------------------------------

    @property
    def has_tables(self) -> bool:
        return self.order <= TABLE_LIMIT

    def _ensure_tables(self):
        if self._exp is not None:
            return
        with self._lock:
            if self._exp is not None:
                return
            self._build_tables()

    def _build_tables(self):
        Q = self.order
        p = self.p
        m = Q - 1
        gamma = self._primitive_element()
        exp = [0] * (2 * m)
        log = [-1] * Q
        cur = 1
        g_digits = list(self.coeffs(gamma))
        for k in range(m):
            exp[k] = cur
            log[cur] = k
            cur = self._mul_digits(cur, g_digits)
        if cur != 1:  # pragma: no cover - guards the primitive search
            raise RuntimeError("primitive element search failed")
        for k in range(m, 2 * m):
            exp[k] = exp[k - m]
        zech = [-1] * m
        for k in range(m):
            v = exp[k]
            d0 = v % p
            w = v - d0 + (d0 + 1) % p
            zech[k] = log[w] if w else -1
        self._log = log
        self._zech = zech
        self._exp = exp

    def _primitive_element(self) -> int:
        m = self.order - 1
        if m == 1:
            return 1
        factors = prime_factors(m)
        p = self.p
        # prefer t + c: multiplying by it is a shift plus a scalar
        candidates = itertools.chain(
            (p + c for c in range(p)) if self.n > 1 else (), range(2, self.order)
        )
        for g in candidates:
            if g >= self.order:
                continue
            if all(self._pow_slow(g, m // f) != 1 for f in factors):
                return g
        raise RuntimeError(f"no primitive element found in {self}")  # pragma: no cover

    # -- arithmetic without tables -----------------------------------------

    def _mul_digits(self, x: int, g_digits: list[int]) -> int:
        p, n = self.p, self.n
        a = list(self.coeffs(x))
        prod = [0] * (2 * n)
        for i, ai in enumerate(a):
            if ai:
                for j, gj in enumerate(g_digits):
                    if gj:
                        prod[i + j] += ai * gj
        mod = self.modulus
        for k in range(2 * n - 1, n - 1, -1):
            c = prod[k] % p
            if c:
                for i in range(n + 1):
                    prod[k - n + i] -= c * mod[i]
        v = 0
        for c in reversed(prod[:n]):
            v = v * p + c % p
        return v

    def _mul_slow(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        return self._mul_digits(a, list(self.coeffs(b)))

    def _pow_slow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mul_slow(result, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return result

    def _add_slow(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        if self.n == 1:
            return (a + b) % p
        return self.from_coeffs(x + y for x, y in zip(self.coeffs(a), self.coeffs(b)))

    # -- public arithmetic on encodings ------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.n == 1:
            return (a + b) % self.p
        if not a:
            return b
        if not b:
            return a
        if not self.has_tables:
            return self._add_slow(a, b)
        self._ensure_tables()
        log = self._log
        la, lb = log[a], log[b]
        z = self._zech[(lb - la) % (self.order - 1)]
        if z < 0:
            return 0
        return self._exp[la + z]

    def neg(self, a: int) -> int:
        if self.p == 2 or not a:
            return a
        if self.n == 1:
            return (-a) % self.p
        return self.scalar(self.p - 1, a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def scalar(self, c: int, a: int) -> int:
        """Multiply ``a`` by the prime-field integer ``c``."""
        c %= self.p
        if c == 0 or a == 0:
            return 0
        if c == 1:
            return a
        if self.n == 1:
            return c * a % self.p
        return self.from_coeffs(c * x for x in self.coeffs(a))

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        if self.n == 1:
            return a * b % self.p
        if not self.has_tables:
            return self._mul_slow(a, b)
        self._ensure_tables()
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if not a:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.n == 1:
            return pow(a, -1, self.p)
        if not self.has_tables:
            return self._pow_slow(a, self.order - 2)
        self._ensure_tables()
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if not a:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 0
        m = self.order - 1
        if self.n == 1:
            return pow(a, e % m, self.p)
        if not self.has_tables:
            return self._pow_slow(a, e % m)
        self._ensure_tables()
        return self._exp[(self._log[a] * e) % m]

    def frobenius(self, a: int, k: int = 1) -> int:
        """``a ** (p ** k)``."""
        k %= self.n
        if k == 0 or not a:
            return a
        return self.pow(a, self.p**k)

    def dot(self, xs, ys) -> int:
        acc = 0
        for x, y in zip(xs, ys):
            if x and y:
                acc = self.add(acc, self.mul(x, y))
        return acc

    # -- numpy views -------------------------------------------------------

    def log_exp_arrays(self):
        """``(log, exp)`` as int64 arrays; ``log[0] == -1``, ``exp`` has period ``order-1``."""
        if not self.has_tables and self.n > 1:
            raise CapExceeded(f"{self} is too large for table-based vectorised arithmetic")
        if self._arrays is None:
            if self.n == 1:
                self._build_prime_tables()
            else:
                self._ensure_tables()
            self._arrays = (
                np.asarray(self._log, dtype=np.int64),
                np.asarray(self._exp[: self.order - 1], dtype=np.int64),
            )
        return self._arrays

    def _build_prime_tables(self):
        # prime fields do arithmetic directly but vectorised code wants logs
        with self._lock:
            if self._exp is not None:
                return
            self._build_tables()

    def digits_array(self) -> np.ndarray:
        """Array of shape ``(order, n)`` with the F_p coefficients of every element."""
        if self._digits is None:
            if self.order > TABLE_LIMIT:
                raise CapExceeded(f"{self} is too large to tabulate digits")
            vals = np.arange(self.order, dtype=np.int64)
            cols = []
            for _ in range(self.n):
                cols.append(vals % self.p)
                vals = vals // self.p
            self._digits = np.stack(cols, axis=1)
        return self._digits


@functools.cache
def _make_field(p: int, n: int) -> FieldDescriptor:
    if n == 1:
        return FieldDescriptor(p, 1, (0, 1))
    for low in itertools.product(range(p), repeat=n):
        if low[0] == 0:
            continue
        poly = list(low) + [1]
        if is_irreducible(poly, p):
            return FieldDescriptor(p, n, tuple(poly))
    raise RuntimeError(f"no irreducible polynomial of degree {n} over F_{p}")  # pragma: no cover


def make_field(p: int, n: int = 1) -> FieldDescriptor:
    """Return F_{p^n} built on the lexicographically smallest monic irreducible.

    Coefficients are compared low-to-high as integers in ``[0, p)``. The result
    is cached: repeated calls return the identical descriptor.
    """
    p, n = int(p), int(n)
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if n < 1:
        raise ValidationError(f"extension degree must be >= 1, got {n}")
    if p**n > _field_cap:
        raise CapExceeded(f"field of order {p}^{n} exceeds the cap {_field_cap}")
    return _make_field(p, n)


class FieldElement:
    """An element of a :class:`FieldDescriptor`, with arithmetic operators."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldDescriptor, value: int):
        self.field = field
        self.value = value

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValidationError(f"mixing elements of {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(o, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(o, self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.n, self.value))

    def __bool__(self):
        return self.value != 0

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.value)

    def __repr__(self):
        if self.field.n == 1:
            return f"{self.value}"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mon = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                coef = "" if (c == 1 and i) else str(c)
                terms.append(coef + mon)
        return " + ".join(reversed(terms)) or "0"


def frobenius(x: FieldElement, k: int = 1, base_degree: int = 1) -> FieldElement:
    """Return ``x ** (q ** k)`` with ``q = p ** base_degree``."""
    return FieldElement(x.field, x.field.frobenius(x.value, base_degree * k))


def minimal_degree(x: FieldElement, base_degree: int = 1) -> int:
    """Smallest ``r >= 1`` with ``x ** (q ** r) == x`` where ``q = p ** base_degree``."""
    F = x.field
    if F.n % base_degree:
        raise NotASubfield(f"F_p^{base_degree} is not a subfield of {F}")
    e = F.n // base_degree
    for r in divisors(e):
        if F.frobenius(x.value, base_degree * r) == x.value:
            return r
    return e  # pragma: no cover


def norm(x: FieldElement, base_degree: int = 1) -> FieldElement:
    """Product over the Frobenius orbit relative to F_{p^base_degree}."""
    F = x.field
    e = F.n // base_degree
    acc = 1
    for i in range(e):
        acc = F.mul(acc, F.frobenius(x.value, base_degree * i))
    return FieldElement(F, acc)


def trace(x: FieldElement, base_degree: int = 1) -> FieldElement:
    F = x.field
    e = F.n // base_degree
    acc = 0
    for i in range(e):
        acc = F.add(acc, F.frobenius(x.value, base_degree * i))
    return FieldElement(F, acc)


# ---------------------------------------------------------------------------
# embeddings

_embed_lock = threading.RLock()
# (p, m, N) -> image of t^i for i < m, as encodings in F_{p^N}
_embed_images: dict[tuple[int, int, int], list[int]] = {}
_lattice_done: set[tuple[int, int]] = set()


def _subfield_roots(src: FieldDescriptor, dst: FieldDescriptor) -> list[int]:
    """All roots of ``src.modulus`` in ``dst``, sorted by coefficient order."""
    m, N = src.n, dst.n
    sub_order = src.p**m
    step = (dst.order - 1) // (sub_order - 1)
    mod = src.modulus

    def ev(x):
        acc = 0
        for c in reversed(mod):
            acc = dst.add(dst.mul(acc, x), dst.from_int(c))
        return acc

    # generator of the unique subfield of order p^m
    factors = prime_factors(dst.order - 1)
    gen = None
    for g in range(2, dst.order):
        if all(dst.pow(g, (dst.order - 1) // f) != 1 for f in factors):
            gen = dst.pow(g, step)
            break
    root = None
    x = 1
    for _ in range(sub_order - 1):
        if ev(x) == 0:
            root = x
            break
        x = dst.mul(x, gen)
    if root is None:  # pragma: no cover
        raise RuntimeError(f"modulus of {src} has no root in {dst}")
    roots = {dst.frobenius(root, i) for i in range(m)}
    return sorted(roots, key=dst.order_key)


def _ensure_lattice(p: int, N: int) -> None:
    if (p, N) in _lattice_done:
        return
    dst = make_field(p, N)
    for m in divisors(N):
        if m < N:
            _ensure_lattice(p, m)
    for m in divisors(N):
        key = (p, m, N)
        if key in _embed_images:
            continue
        if m == N:
            _embed_images[key] = _identity_images(dst)
            continue
        if m == 1:
            _embed_images[key] = [1]
            continue
        src = make_field(p, m)
        chosen = None
        for rho in _subfield_roots(src, dst):
            ok = True
            for r in divisors(m):
                if r in (1, m):
                    continue
                inner = _embed_images[(p, r, m)]
                outer = _embed_images[(p, r, N)]
                # the image of t_r under r->m->N must agree with r->N
                via = _apply_images(src, dst, _powers(dst, rho, m), inner[1])
                if via != outer[1]:
                    ok = False
                    break
            if ok:
                chosen = rho
                break
        if chosen is None:  # pragma: no cover
            raise RuntimeError(f"no compatible embedding {src} -> {dst}")
        _embed_images[key] = _powers(dst, chosen, m)
    _lattice_done.add((p, N))


def _identity_images(F: FieldDescriptor) -> list[int]:
    return [F.p**i for i in range(F.n)]


def _powers(F: FieldDescriptor, x: int, m: int) -> list[int]:
    out = [1]
    for _ in range(m - 1):
        out.append(F.mul(out[-1], x))
    return out


def _apply_images(src: FieldDescriptor, dst: FieldDescriptor, images: list[int], x: int) -> int:
    acc = 0
    for c, img in zip(src.coeffs(x), images):
        if c:
            acc = dst.add(acc, dst.scalar(c, img))
    return acc


def embedding_images(src: FieldDescriptor, dst: FieldDescriptor) -> list[int]:
    """Images in ``dst`` of the power basis ``1, t, ..., t^(m-1)`` of ``src``."""
    if src.p != dst.p or dst.n % src.n:
        raise NotASubfield(f"{src} is not a subfield of {dst}")
    key = (src.p, src.n, dst.n)
    if key not in _embed_images:
        with _embed_lock:
            _ensure_lattice(src.p, dst.n)
    return _embed_images[key]


def embed_value(src: FieldDescriptor, dst: FieldDescriptor, x: int) -> int:
    if src is dst:
        return x
    return _apply_images(src, dst, embedding_images(src, dst), x)


def embed(x: FieldElement, target: FieldDescriptor) -> FieldElement:
    """Image of ``x`` under the fixed embedding of its field into ``target``."""
    return FieldElement(target, embed_value(x.field, target, x.value))


def ensure_embeddings(p: int, max_degree: int) -> None:
    """Precompute all embeddings among F_{p^m}, m <= max_degree (before going parallel)."""
    with _embed_lock:
        for N in range(1, max_degree + 1):
            _ensure_lattice(p, N)
