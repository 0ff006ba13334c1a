"""Arbitrary-precision rate formulas over a small counterfunction algebra.

All quantities here are big naturals (Python ints).  Values that outgrow a
configured bit cap are reported as the ``Astronomical`` sentinel, which
compares strictly above every finite value, so bound checks of the form
"searched n <= rate" stay decidable even when the rate itself is not
representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import mpmath

try:  # GMP-backed integers keep the near-squaring towers fast
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    def mpz(x):
        return x

DEFAULT_BIT_CAP = 2 ** 20


class CapExceeded(Exception):
    """An intermediate value exceeded the configured bit cap."""


class RateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# ceil(ln(.)) on big naturals
# ---------------------------------------------------------------------------

_LN2 = math.log(2.0)


def ceil_ln(m: int) -> int:
    """Exact ceil(ln m) for a big natural m >= 1.

    A float estimate on the top bits settles all but near-integer cases;
    those are decided exactly by comparing m against e**k with interval
    arithmetic at increasing precision (terminates because e**k is
    irrational, hence never equal to the integer m).
    """
    if m < 1:
        raise RateError("ceil_ln requires m >= 1")
    m = int(m)
    if m == 1:
        return 0
    r = m.bit_length()
    # ln m = (r - 53) ln 2 + ln(top 53 bits), exact up to float rounding
    shift = max(0, r - 53)
    approx = shift * _LN2 + math.log(m >> shift)
    if abs(approx - round(approx)) > 1e-6:
        return math.ceil(approx)
    k = round(approx)
    return k if _less_than_exp(m, k) else k + 1


def _less_than_exp(m: int, k: int) -> bool:
    """Decide m < e**k exactly (m integer, so equality is impossible)."""
    prec = 128
    while True:
        with mpmath.workprec(prec):
            x = mpmath.exp(mpmath.mpf(k))
            err = x * mpmath.mpf(2) ** (24 - prec)
            if mpmath.mpf(m) < x - err:
                return True
            if mpmath.mpf(m) > x + err:
                return False
        prec *= 2


def _ceil_scaled_exp(coeff: int, n: int, cap: Optional[int]) -> int:
    """ceil(coeff * e**n) with upward-directed rounding.

    coeff * e**n has about 1.443*n bits, so overflow is detected before the
    exponential is ever formed.
    """
    if n < 0:
        raise RateError("negative argument")
    n = int(n)
    est_bits = int(n * 1.4427) + coeff.bit_length() + 2
    if cap is not None and est_bits > cap:
        raise CapExceeded()
    with mpmath.workprec(est_bits + 64):
        hi = mpmath.ceil(coeff * mpmath.exp(mpmath.mpf(n)))
        val = int(hi)
    if cap is not None and val.bit_length() > cap:
        raise CapExceeded()
    return val


# ---------------------------------------------------------------------------
# Counterfunctions
# ---------------------------------------------------------------------------


class Counterfunction:
    """A total function on big naturals, represented as an expression tree."""

    monotone: bool = True

    def __call__(self, n: int, cap: Optional[int] = None) -> int:
        raise NotImplementedError

    def constant_value(self) -> Optional[int]:
        """The single value this function takes, if it is constant."""
        return None

    def render(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:  # pragma: no cover
        return f"Counterfunction({self.render()})"

    def _check(self, value: int, cap: Optional[int]) -> int:
        if cap is not None and value.bit_length() > cap:
            raise CapExceeded()
        return value


@dataclass(frozen=True, repr=False)
class Const(Counterfunction):
    c: int

    def __call__(self, n, cap=None):
        return self._check(self.c, cap)

    def constant_value(self):
        return self.c

    def render(self):
        return f"const:{self.c}"


@dataclass(frozen=True, repr=False)
class Identity(Counterfunction):
    def __call__(self, n, cap=None):
        return self._check(n, cap)

    def render(self):
        return "id"


@dataclass(frozen=True, repr=False)
class Affine(Counterfunction):
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise RateError("affine coefficients must be naturals")

    def __call__(self, n, cap=None):
        return self._check(self.a * n + self.b, cap)

    def constant_value(self):
        return self.b if self.a == 0 else None

    def render(self):
        return f"affine:{self.a},{self.b}"


@dataclass(frozen=True, repr=False)
class Power(Counterfunction):
    e: int

    def __post_init__(self):
        if self.e < 1:
            raise RateError("power exponent must be >= 1")

    def __call__(self, n, cap=None):
        # result has between e*(bits-1)+1 and e*bits bits; refuse certain
        # overflows before forming the power
        if cap is not None and n > 1 and self.e * (n.bit_length() - 1) + 1 > cap:
            raise CapExceeded()
        return self._check(n ** self.e, cap)

    def render(self):
        return f"pow:{self.e}"


@dataclass(frozen=True, repr=False)
class Max(Counterfunction):
    children: tuple

    def __post_init__(self):
        if not self.children:
            raise RateError("max needs at least one child")
        object.__setattr__(self, "monotone", all(c.monotone for c in self.children))

    def __call__(self, n, cap=None):
        return max(c(n, cap) for c in self.children)

    def constant_value(self):
        vals = [c.constant_value() for c in self.children]
        if all(v is not None for v in vals):
            return max(vals)
        return None

    def render(self):
        return "max(" + ",".join(c.render() for c in self.children) + ")"


@dataclass(frozen=True, repr=False)
class Compose(Counterfunction):
    outer: Counterfunction
    inner: Counterfunction

    def __post_init__(self):
        object.__setattr__(
            self, "monotone", self.outer.monotone and self.inner.monotone
        )

    def __call__(self, n, cap=None):
        return self.outer(self.inner(n, cap), cap)

    def constant_value(self):
        cv = self.outer.constant_value()
        if cv is not None:
            return cv
        ci = self.inner.constant_value()
        if ci is not None:
            return self.outer(ci)
        return None

    def render(self):
        return f"comp({self.outer.render()},{self.inner.render()})"


@dataclass(frozen=True, repr=False)
class Table(Counterfunction):
    values: tuple

    monotone = False

    def __post_init__(self):
        if not self.values:
            raise RateError("table needs at least one value")
        object.__setattr__(
            self,
            "monotone",
            all(a <= b for a, b in zip(self.values, self.values[1:])),
        )

    def __call__(self, n, cap=None):
        i = min(n, len(self.values) - 1)
        return self._check(self.values[i], cap)

    def constant_value(self):
        if len(set(self.values)) == 1:
            return self.values[0]
        return None

    def render(self):
        return "table:[" + ",".join(str(v) for v in self.values) + "]"


@dataclass(repr=False)
class Monotonize(Counterfunction):
    child: Counterfunction
    _cache: list = field(default_factory=list)

    monotone = True

    def __call__(self, n, cap=None):
        if self.child.monotone:
            return self.child(n, cap)
        if isinstance(self.child, Table):
            # eventually constant: the running max stabilizes at the table end
            i = min(n, len(self.child.values) - 1)
            return self._check(max(self.child.values[: i + 1]), cap)
        while len(self._cache) <= n:
            i = len(self._cache)
            v = self.child(i)
            if self._cache:
                v = max(v, self._cache[-1])
            self._cache.append(v)
        return self._check(self._cache[n], cap)

    def constant_value(self):
        return self.child.constant_value()

    def render(self):
        return f"mono({self.child.render()})"


@dataclass(frozen=True, repr=False)
class CeilLnOfLinear(Counterfunction):
    """n -> ceil(ln(a*n + b))."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 1:
            raise RateError("need a >= 0 and b >= 1 so the log argument is positive")

    def __call__(self, n, cap=None):
        return self._check(ceil_ln(self.a * n + self.b), cap)

    def render(self):
        return f"ceil_ln({self.a}*n+{self.b})"


@dataclass(frozen=True, repr=False)
class CeilScaledExp(Counterfunction):
    """n -> ceil(c * e**n), rounded upward (rates may be overestimated)."""

    c: int

    def __post_init__(self):
        if self.c < 1:
            raise RateError("scale must be >= 1")

    def __call__(self, n, cap=None):
        return _ceil_scaled_exp(self.c, n, cap)

    def render(self):
        return f"ceil_exp({self.c}*e^n)"


@dataclass(frozen=True, repr=False)
class Wrapped(Counterfunction):
    """An opaque callable lifted into the algebra (internal plumbing)."""

    fn: Callable[[int, Optional[int]], int]
    label: str
    is_monotone: bool = True

    def __post_init__(self):
        object.__setattr__(self, "monotone", self.is_monotone)

    def __call__(self, n, cap=None):
        return self._check(self.fn(n, cap), cap)

    def render(self):
        return self.label


def monotonize(f: Counterfunction) -> Counterfunction:
    """f^M(k) = max_{i<=k} f(i); the identity on already-monotone trees."""
    if f.monotone:
        return f
    return Monotonize(f)


# ---------------------------------------------------------------------------
# Mini-grammar parser
# ---------------------------------------------------------------------------


def parse_counterfunction(text: str) -> Counterfunction:
    """Parse the mini-grammar: const:C | id | affine:a,b | pow:e |
    max(f,g) | comp(f,g) | table:[v0,v1,...] | mono(f)."""
    try:
        return _parse_cf(text)
    except RateError:
        raise
    except ValueError as exc:
        raise RateError(f"cannot parse counterfunction {text!r}: {exc}") from exc


def _parse_cf(text: str) -> Counterfunction:
    s = text.strip()
    if s == "id":
        return Identity()
    if s.startswith("const:"):
        return Const(int(s[6:]))
    if s.startswith("affine:"):
        a, b = (int(t) for t in s[7:].split(","))
        return Affine(a, b)
    if s.startswith("pow:"):
        return Power(int(s[4:]))
    if s.startswith("table:"):
        body = s[6:].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise RateError(f"bad table literal: {text!r}")
        return Table(tuple(int(t) for t in body[1:-1].split(",")))
    for head in ("max(", "comp(", "mono("):
        if s.startswith(head) and s.endswith(")"):
            args = _split_args(s[len(head):-1])
            if head == "mono(":
                if len(args) != 1:
                    raise RateError(f"mono takes one argument: {text!r}")
                return Monotonize(_parse_cf(args[0]))
            if len(args) != 2:
                raise RateError(f"{head[:-1]} takes two arguments: {text!r}")
            f, g = (_parse_cf(a) for a in args)
            return Max((f, g)) if head == "max(" else Compose(f, g)
    raise RateError(f"cannot parse counterfunction {text!r}")


def _split_args(body: str) -> list[str]:
    pieces, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            pieces.append(body[start:i])
            start = i + 1
    pieces.append(body[start:])
    # affine literals carry an internal top-level comma; re-join the pair
    args, i = [], 0
    while i < len(pieces):
        a = pieces[i].strip()
        if a.startswith("affine:") and "," not in a and i + 1 < len(pieces):
            args.append(a + "," + pieces[i + 1].strip())
            i += 2
        else:
            args.append(a)
            i += 1
    return args


# ---------------------------------------------------------------------------
# RateValue
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateValue:
    """A big natural, or the Astronomical sentinel (bit cap exceeded)."""

    value: Optional[int] = None
    expr: str = ""
    bit_cap: Optional[int] = None

    @staticmethod
    def finite(n: int) -> "RateValue":
        if n < 0:
            raise RateError("rates are naturals")
        return RateValue(value=n)

    @staticmethod
    def astronomical(expr: str, bit_cap: int) -> "RateValue":
        return RateValue(value=None, expr=expr, bit_cap=bit_cap)

    @property
    def is_astronomical(self) -> bool:
        return self.value is None

    def render(self) -> str:
        if self.is_astronomical:
            return f"ASTRO:{self.expr}"
        return str(self.value)

    # total order: every Astronomical value sits above every finite one,
    # and Astronomical values compare equal among themselves
    def _key(self):
        return (1, 0) if self.is_astronomical else (0, self.value)

    def __lt__(self, other):
        return self._key() < _coerce(other)._key()

    def __le__(self, other):
        return self._key() <= _coerce(other)._key()

    def __gt__(self, other):
        return self._key() > _coerce(other)._key()

    def __ge__(self, other):
        return self._key() >= _coerce(other)._key()

    def __eq__(self, other):
        try:
            return self._key() == _coerce(other)._key()
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self._key())


def _coerce(x) -> RateValue:
    if isinstance(x, RateValue):
        return x
    if isinstance(x, int):
        return RateValue.finite(x)
    raise TypeError(f"cannot compare RateValue with {type(x)!r}")


def _guard(expr: str, bit_cap: int, thunk: Callable[[], int]) -> RateValue:
    try:
        return RateValue.finite(int(thunk()))
    except CapExceeded:
        return RateValue.astronomical(expr, bit_cap)


# ---------------------------------------------------------------------------
# Scenario bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioBounds:
    """Size constants of a run: K >= M = max{d(x0,p), d(u,p)}, plus the
    bound S used by synthetic recurrence instances."""

    K: int
    M: float
    S: int = 1

    def __post_init__(self):
        if self.K < math.ceil(self.M):
            raise RateError("K must dominate M")
        if self.S < 1:
            raise RateError("S must be >= 1")


# ---------------------------------------------------------------------------
# Elementary rate formulas
# ---------------------------------------------------------------------------


def eval_cf(f: Counterfunction, n: int) -> int:
    return f(n)


def iterate(
    f: Counterfunction, m: int, start: int, bit_cap: int = DEFAULT_BIT_CAP
) -> RateValue:
    """m-fold application f(f(...f(start)...)) with overflow detection."""
    expr = f"iter({f.render()},{m},{start})"
    return _guard(expr, bit_cap, lambda: _iterate_int(f, m, start, bit_cap))


def _iterate_int(f: Counterfunction, m: int, start: int, cap: int) -> int:
    v = mpz(start)
    for _ in range(m):
        v = f(v, cap)
    return v


def r_of_k(k: int, K: int) -> int:
    if K < 1:
        raise RateError("K must be >= 1")
    return K * K * (k + 1)


def omega1(k: int, K: int) -> int:
    if K < 1:
        raise RateError("K must be >= 1")
    return 24 * K * (k + 1) ** 2


def omega2(k: int, K: int) -> int:
    if K < 1:
        raise RateError("K must be >= 1")
    return 4 * K * K * (k + 1) ** 2


def omega1_cf(K: int) -> Counterfunction:
    # k -> 24K(k+1)^2
    return Compose(Affine(24 * K, 0), Compose(Power(2), Affine(1, 1)))


def hat(f: Counterfunction, K: int) -> Counterfunction:
    """k -> max{omega1(k), f(omega1(k))}."""
    w1 = omega1_cf(K)
    return Max((w1, Compose(f, w1)))


def bound_n_star(
    k: int, f: Counterfunction, K: int, bit_cap: int = DEFAULT_BIT_CAP
) -> RateValue:
    """omega1 applied to the r(omega2(k))-fold iterate of hat(f) from 0."""
    expr = f"bound_n_star(k={k},f={f.render()},K={K})"

    def thunk():
        steps = r_of_k(omega2(k, K), K)
        h = _iterate_int(hat(f, K), steps, 0, bit_cap)
        return omega1_checked(h, K, bit_cap)

    return _guard(expr, bit_cap, thunk)


def omega1_checked(k: int, K: int, cap: Optional[int]) -> int:
    v = 24 * K * (k + 1) ** 2
    if cap is not None and v.bit_length() > cap:
        raise CapExceeded()
    return v


def zeta(
    k: int,
    n: int,
    sigma: Counterfunction,
    S: int,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> RateValue:
    """sigma(n + ceil(ln(3S(k+1)))) + 1, for a divergence rate sigma."""
    if S < 1:
        raise RateError("S must be >= 1")
    expr = f"zeta(k={k},n={n})"
    return _guard(
        expr, bit_cap, lambda: sigma(n + ceil_ln(3 * S * (k + 1)), bit_cap) + 1
    )


def zeta_star(
    k: int,
    n: int,
    sigma_star: Callable[[int, int], int],
    S: int,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> RateValue:
    """sigma*(n, 3S(k+1) - 1) + 1, for a product-convergence rate sigma*."""
    if S < 1:
        raise RateError("S must be >= 1")
    expr = f"zeta_star(k={k},n={n})"
    return _guard(expr, bit_cap, lambda: sigma_star(n, 3 * S * (k + 1) - 1) + 1)


# ---------------------------------------------------------------------------
# Asymptotic-regularity rates
# ---------------------------------------------------------------------------

ChiT = Callable[[int], int]


def chi(
    k: int,
    bundle,
    K: int,
    chi_T_fn: ChiT,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> RateValue:
    expr = f"chi(k={k})"
    return _guard(expr, bit_cap, lambda: _chi_int(k, bundle, K, chi_T_fn, bit_cap))


def _chi_int(k, bundle, K, chi_T_fn, cap):
    return max(
        chi_T_fn(2 * (k + 1) - 1),
        bundle.chi_lambda(8 * K * (k + 1) - 1, cap),
        bundle.chi_beta(8 * K * (k + 1) - 1, cap),
    )


def Sigma(k, bundle, K, chi_T_fn, bit_cap: int = DEFAULT_BIT_CAP) -> RateValue:
    expr = f"Sigma(k={k})"

    def thunk():
        c = _chi_int(3 * k + 2, bundle, K, chi_T_fn, bit_cap)
        return bundle.sigma(c + 2 + ceil_ln(6 * K * (k + 1)), bit_cap) + 1

    return _guard(expr, bit_cap, thunk)


def Sigma_star(k, bundle, K, chi_T_fn, bit_cap: int = DEFAULT_BIT_CAP) -> RateValue:
    expr = f"Sigma_star(k={k})"

    def thunk():
        c = _chi_int(3 * k + 2, bundle, K, chi_T_fn, bit_cap)
        return bundle.sigma_star(c, 6 * K * (k + 1) - 1) + 1

    return _guard(expr, bit_cap, thunk)


def _tilde(inner_int, k, bundle, K, chi_T_fn, cap):
    L = bundle.Lambda
    return max(
        bundle.N_Lambda,
        inner_int(2 * L * (k + 1) - 1, bundle, K, chi_T_fn, cap),
        bundle.eta(4 * K * L * (k + 1) - 1, cap),
    )


def _Sigma_int(k, bundle, K, chi_T_fn, cap):
    c = _chi_int(3 * k + 2, bundle, K, chi_T_fn, cap)
    return bundle.sigma(c + 2 + ceil_ln(6 * K * (k + 1)), cap) + 1


def _Sigma_star_int(k, bundle, K, chi_T_fn, cap):
    c = _chi_int(3 * k + 2, bundle, K, chi_T_fn, cap)
    return bundle.sigma_star(c, 6 * K * (k + 1) - 1) + 1


def Sigma_tilde(k, bundle, K, chi_T_fn, bit_cap: int = DEFAULT_BIT_CAP) -> RateValue:
    expr = f"Sigma_tilde(k={k})"
    return _guard(
        expr, bit_cap, lambda: _tilde(_Sigma_int, k, bundle, K, chi_T_fn, bit_cap)
    )


def Sigma_tilde_star(
    k, bundle, K, chi_T_fn, bit_cap: int = DEFAULT_BIT_CAP
) -> RateValue:
    expr = f"Sigma_tilde_star(k={k})"
    return _guard(
        expr, bit_cap, lambda: _tilde(_Sigma_star_int, k, bundle, K, chi_T_fn, bit_cap)
    )


# ---------------------------------------------------------------------------
# T_m-asymptotic-regularity rates
# ---------------------------------------------------------------------------


def psi_from_phi(
    phi: Counterfunction,
    k: int,
    Gamma: int,
    G: int,
    N_Gamma: int,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> RateValue:
    """Turn any rate phi of family-asymptotic regularity into a rate for a
    single member of the family: max{phi((1 + 2*Gamma*G)(k+1) - 1), N_Gamma}."""
    if Gamma < 1 or G < 1:
        raise RateError("Gamma and G must be >= 1")
    expr = f"psi(k={k})"
    return _guard(
        expr,
        bit_cap,
        lambda: max(phi((1 + 2 * Gamma * G) * (k + 1) - 1, bit_cap), N_Gamma),
    )


def _Psi_int(k, bundle, K, chi_T_fn, cap, star: bool):
    inner = _Sigma_star_int if star else _Sigma_int
    j = (1 + 2 * bundle.Gamma * bundle.G) * (k + 1) - 1
    return max(_tilde(inner, j, bundle, K, chi_T_fn, cap), bundle.N_Gamma)


def Psi(k, bundle, K, chi_T_fn, bit_cap: int = DEFAULT_BIT_CAP) -> RateValue:
    expr = f"Psi(k={k})"
    return _guard(
        expr, bit_cap, lambda: _Psi_int(k, bundle, K, chi_T_fn, bit_cap, star=False)
    )


def Psi_star(k, bundle, K, chi_T_fn, bit_cap: int = DEFAULT_BIT_CAP) -> RateValue:
    expr = f"Psi_star(k={k})"
    return _guard(
        expr, bit_cap, lambda: _Psi_int(k, bundle, K, chi_T_fn, bit_cap, star=True)
    )


# ---------------------------------------------------------------------------
# Metastability rates
# ---------------------------------------------------------------------------


def omega3(
    k: int,
    f: Counterfunction,
    Phi: Counterfunction,
    K: int,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> RateValue:
    expr = f"omega3(k={k},f={f.render()})"
    return _guard(expr, bit_cap, lambda: _omega3_int(k, f, Phi, K, bit_cap))


def _omega3_int(k, f, Phi, K, cap) -> int:
    Phi = monotonize(Phi)
    cv = Phi.constant_value()
    if cv is not None:
        # the outer application swallows the inner tower entirely
        return cv
    steps = r_of_k(omega2(k, K), K)
    h = _iterate_int(hat(Compose(monotonize(f), Phi), K), steps, 0, cap)
    return Phi(omega1_checked(h, K, cap), cap)


def _meta_zeta(i: int, m: int, sigma: Counterfunction, K: int, cap) -> int:
    return sigma(m + ceil_ln(12 * K * K * (i + 1)), cap) + 1


def _meta_zeta_star(i: int, m: int, sigma_star, K: int) -> int:
    return sigma_star(m, 12 * K * K * (i + 1) - 1) + 1


def _mu_int(k, f, bundle, K, chi_T_fn, Phi_override, cap, star: bool) -> int:
    f = monotonize(f)
    kt = 4 * (k + 1) ** 2 - 1
    eta_val = bundle.eta(24 * K * K * (kt + 1) - 1, cap)

    if star:
        zeta_fn = lambda i, m: _meta_zeta_star(i, m, bundle.sigma_star, K)
    else:
        zeta_fn = lambda i, m: _meta_zeta(i, m, bundle.sigma, K, cap)

    def fbar(i: int) -> int:
        return f(zeta_fn(kt, max(i, eta_val)), cap)

    def ftilde_fn(i: int, icap) -> int:
        fb = fbar(i)
        return 12 * K * (kt + 1) * (fb + 1) * bundle.B(fb, icap) - 1

    ftilde = Wrapped(ftilde_fn, "ftilde", is_monotone=True)

    if Phi_override is not None:
        Phi = Phi_override
    else:
        psi_int = lambda j, jcap: _Psi_int(j, bundle, K, chi_T_fn, jcap, star=star)
        label = "Psi_star" if star else "Psi"
        Phi = Wrapped(psi_int, label, is_monotone=True)

    w3 = _omega3_int(12 * (kt + 1) - 1, ftilde, Phi, K, cap)
    return zeta_fn(kt, max(w3, eta_val))


def mu(
    k: int,
    f: Counterfunction,
    bundle,
    K: int,
    chi_T_fn: ChiT,
    Phi_override: Optional[Counterfunction] = None,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> RateValue:
    """Metastability rate built on the divergence rate sigma."""
    expr = f"mu(k={k},f={f.render()})"
    return _guard(
        expr,
        bit_cap,
        lambda: _mu_int(k, f, bundle, K, chi_T_fn, Phi_override, bit_cap, star=False),
    )


def mu_star(
    k: int,
    f: Counterfunction,
    bundle,
    K: int,
    chi_T_fn: ChiT,
    Phi_override: Optional[Counterfunction] = None,
    bit_cap: int = DEFAULT_BIT_CAP,
) -> RateValue:
    """Metastability rate built on the product-convergence rate sigma*."""
    expr = f"mu_star(k={k},f={f.render()})"
    return _guard(
        expr,
        bit_cap,
        lambda: _mu_int(k, f, bundle, K, chi_T_fn, Phi_override, bit_cap, star=True),
    )
