"""Approximating functions psi and dimension functions g.

Both are power laws with iterated-logarithm corrections::

    psi(q) = q**-tau * prod_i log_i(q)**-alpha_i * log_t(q)**eps
    g(r)   = r**s   * prod_j log_j(1/r)**beta_j

``log_i`` is the i-fold iterated natural logarithm.  Scalar evaluation is
certified with mpmath interval arithmetic (or exact for rational powers);
``psi_float`` / ``g_float`` are the vectorised numpy paths used in bulk sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from mpmath import iv

from .exact import Enclosure, RationalLike, as_rational, format_rational, round_down, round_up

# relative slack added to float-path results; libm pow/log/exp are within a
# couple of ulp, iterated logs near their domain edge lose more
FLOAT_REL_ERR = 2.0**-40
_IV_PREC = 96
_precision = {"bits": _IV_PREC}


def set_precision_bits(bits: int) -> None:
    """Working precision of the certified psi/g evaluation (at least 53)."""
    if bits < 53:
        raise ValueError("precision_bits must be >= 53")
    _precision["bits"] = int(bits)


def precision_bits() -> int:
    return _precision["bits"]


class DomainError(ValueError):
    """Argument outside the domain where a psi/g family is defined."""


class DecayNotFound(ValueError):
    """psi(a^n) < a^(-2n) could not be certified below the level cap."""


def _rational_tuple(values: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(as_rational(v) for v in values)


def _tower(k: int) -> float:
    """exp applied k times to 1: the point where log_k crosses 1."""
    x = 1.0
    for _ in range(k):
        try:
            x = math.exp(x)
        except OverflowError:
            return math.inf
    return x


@dataclass(frozen=True)
class PsiSpec:
    tau: Fraction
    log_exponents: tuple[Fraction, ...] = ()
    epsilon: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", as_rational(self.tau))
        object.__setattr__(self, "log_exponents", _rational_tuple(self.log_exponents))
        object.__setattr__(self, "epsilon", as_rational(self.epsilon))
        if self.tau <= 0:
            raise ValueError(f"psi.tau must be positive, got {self.tau}")
        if self.epsilon != 0 and not self.log_exponents:
            raise ValueError("psi.eps needs at least one log exponent to act on")

    @property
    def depth(self) -> int:
        return len(self.log_exponents)

    def is_pure_power(self) -> bool:
        return not self.log_exponents

    @property
    def q_min(self) -> float:
        return 0.0 if self.is_pure_power() else _tower(self.depth)

    def log_powers(self) -> tuple[Fraction, ...]:
        """Net exponent of each log_i in psi (epsilon folded into the last)."""
        out = [-a for a in self.log_exponents]
        if out:
            out[-1] += self.epsilon
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "tau": format_rational(self.tau),
            "alphas": [format_rational(a) for a in self.log_exponents],
            "eps": format_rational(self.epsilon),
        }

    @classmethod
    def from_dict(cls, data: dict) -> PsiSpec:
        return cls(data["tau"], data.get("alphas", ()), data.get("eps", 0))

    def compact(self) -> str:
        if self.is_pure_power():
            return f"pow:{format_rational(self.tau)}"
        alphas = ",".join(format_rational(a) for a in self.log_exponents)
        return f"powlog:{format_rational(self.tau)};{alphas};{format_rational(self.epsilon)}"


@dataclass(frozen=True)
class DimFnSpec:
    s: Fraction
    log_exponents: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", as_rational(self.s))
        object.__setattr__(self, "log_exponents", _rational_tuple(self.log_exponents))
        if self.s <= 0:
            raise ValueError(f"g.s must be positive, got {self.s}")

    @property
    def depth(self) -> int:
        return len(self.log_exponents)

    def is_pure_power(self) -> bool:
        return not self.log_exponents

    @property
    def r_max(self) -> float:
        return math.inf if self.is_pure_power() else 1.0 / _tower(self.depth)

    def to_dict(self) -> dict:
        return {
            "s": format_rational(self.s),
            "betas": [format_rational(b) for b in self.log_exponents],
        }

    @classmethod
    def from_dict(cls, data: dict) -> DimFnSpec:
        return cls(data["s"], data.get("betas", ()))

    def compact(self) -> str:
        if self.is_pure_power():
            return f"pow:{format_rational(self.s)}"
        betas = ",".join(format_rational(b) for b in self.log_exponents)
        return f"powlog:{format_rational(self.s)};{betas}"


@dataclass(frozen=True)
class GrowthWindow:
    s1: Fraction
    s2: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "s1", as_rational(self.s1))
        object.__setattr__(self, "s2", as_rational(self.s2))
        if not (0 < self.s1 <= 1 and 0 < self.s2 <= 1):
            raise ValueError("growth window exponents must lie in (0, 1]")
        if not 2 * self.s1 < 3 * self.s2:
            raise ValueError("growth window needs 2*s1 < 3*s2")


# --------------------------------------------------------------------------
# compact grammar: pow:<tau> | powlog:<tau>;<a1,a2,...>;<eps>


def _parse_list(text: str) -> list[str]:
    return [t for t in (x.strip() for x in text.split(",")) if t]


def parse_psi(text: str) -> PsiSpec:
    kind, _, body = text.strip().partition(":")
    try:
        if kind == "pow":
            return PsiSpec(body)
        if kind == "powlog":
            parts = body.split(";")
            if len(parts) not in (2, 3):
                raise ValueError("expected powlog:<tau>;<alphas>;<eps>")
            eps = parts[2] if len(parts) == 3 and parts[2].strip() else "0"
            return PsiSpec(parts[0], _parse_list(parts[1]), eps)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"psi spec {text!r}: {exc}") from None
    raise ValueError(f"psi spec {text!r}: unknown family {kind!r}")


def parse_g(text: str) -> DimFnSpec:
    kind, _, body = text.strip().partition(":")
    try:
        if kind == "pow":
            return DimFnSpec(body)
        if kind == "powlog":
            parts = body.split(";")
            if len(parts) != 2:
                raise ValueError("expected powlog:<s>;<betas>")
            return DimFnSpec(parts[0], _parse_list(parts[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"g spec {text!r}: {exc}") from None
    raise ValueError(f"g spec {text!r}: unknown family {kind!r}")


# --------------------------------------------------------------------------
# exact and certified evaluation


def _int_root(n: int, m: int) -> int | None:
    """Exact integer m-th root of n >= 0, or None."""
    if n < 2:
        return n
    x = round(n ** (1.0 / m)) if n.bit_length() < 1000 else 1 << (n.bit_length() // m)
    # Newton correction for large n
    for _ in range(200):
        y = ((m - 1) * x + n // x ** (m - 1)) // m
        if abs(y - x) <= 1:
            break
        x = y
    for c in (x - 1, x, x + 1):
        if c >= 0 and c**m == n:
            return c
    return None


def exact_power(x: Fraction, e: Fraction) -> Fraction | None:
    """``x**e`` when it is rational (x > 0), else None."""
    if x <= 0:
        return None
    if e.denominator == 1:
        return x ** int(e)
    m = e.denominator
    num = _int_root(x.numerator, m)
    den = _int_root(x.denominator, m)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** e.numerator


def _mpf_to_fraction(raw: tuple) -> Fraction:
    sign, man, exp, _ = raw
    man = int(man)
    if sign:
        man = -man
    return Fraction(man * (1 << exp)) if exp >= 0 else Fraction(man, 1 << -exp)


def _iv_to_enclosure(v) -> Enclosure:
    lo, hi = v._mpi_
    return Enclosure(round_down(_mpf_to_fraction(lo)), round_up(_mpf_to_fraction(hi)))


def _iv_rational(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def _iv_power_log_product(base, exponent: Fraction, log_arg, log_exps: Sequence[Fraction]):
    """base**exponent * prod log_j(log_arg)**log_exps[j] in interval arithmetic."""
    val = iv.exp(_iv_rational(exponent) * iv.log(base))
    y = log_arg
    for e in log_exps:
        y = iv.log(y)
        if not y.a > 1:
            raise DomainError("iterated logarithm not above 1")
        if e:
            val = val * iv.exp(_iv_rational(e) * iv.log(y))
    return val


def psi_eval(spec: PsiSpec, q: RationalLike) -> Enclosure:
    """Certified enclosure of psi(q); exact when psi(q) is rational."""
    q = as_rational(q)
    if q <= 0:
        raise DomainError(f"psi needs q > 0, got {q}")
    if spec.is_pure_power():
        v = exact_power(q, -spec.tau)
        if v is not None:
            return Enclosure.exact(v)
    elif not q > 1:
        raise DomainError(f"q={q} below the psi domain threshold {spec.q_min}")
    old = iv.prec
    iv.prec = _precision["bits"]
    try:
        Q = _iv_rational(q)
        return _iv_to_enclosure(_iv_power_log_product(Q, -spec.tau, Q, spec.log_powers()))
    finally:
        iv.prec = old


def psi_exact(spec: PsiSpec, q: RationalLike) -> Fraction | None:
    if not spec.is_pure_power():
        return None
    return exact_power(as_rational(q), -spec.tau)


def g_eval(spec: DimFnSpec, r: RationalLike) -> Enclosure:
    """Certified enclosure of g(r) for 0 < r < r_max."""
    r = as_rational(r)
    if r <= 0:
        raise DomainError(f"g needs r > 0, got {r}")
    if spec.is_pure_power():
        v = exact_power(r, spec.s)
        if v is not None:
            return Enclosure.exact(v)
    elif not r < 1:
        raise DomainError(f"r={r} above the g domain threshold {spec.r_max}")
    old = iv.prec
    iv.prec = _precision["bits"]
    try:
        R = _iv_rational(r)
        return _iv_to_enclosure(
            _iv_power_log_product(R, spec.s, 1 / R, spec.log_exponents)
        )
    finally:
        iv.prec = old


def power_eval(x: RationalLike, s: RationalLike) -> Enclosure:
    return g_eval(DimFnSpec(s), x)


# --------------------------------------------------------------------------
# float paths


def _iterated_logs(x: np.ndarray, depth: int) -> list[np.ndarray]:
    out = []
    y = x
    for _ in range(depth):
        y = np.log(y)
        out.append(y)
    return out


def psi_float(spec: PsiSpec, q) -> np.ndarray:
    """psi(q) in float64 (numpy broadcasting); no domain checks."""
    q = np.asarray(q, dtype=float)
    val = q ** (-float(spec.tau))
    for y, e in zip(_iterated_logs(q, spec.depth), spec.log_powers()):
        if e:
            val = val * y ** float(e)
    return val


def g_float(spec: DimFnSpec, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    val = r ** float(spec.s)
    if spec.log_exponents:
        for y, e in zip(_iterated_logs(1.0 / r, spec.depth), spec.log_exponents):
            if e:
                val = val * y ** float(e)
    return val


def g_enclose_fast(spec: DimFnSpec, length: Enclosure) -> Enclosure:
    """g over a length enclosure, using monotonicity of g near 0."""
    if length.hi <= 0:
        return Enclosure(0.0, 0.0)
    lo = float(g_float(spec, length.lo)) if length.lo > 0 else 0.0
    hi = float(g_float(spec, length.hi))
    return Enclosure(
        max(0.0, lo * (1 - FLOAT_REL_ERR)), math.nextafter(hi * (1 + FLOAT_REL_ERR), math.inf)
    )


# --------------------------------------------------------------------------
# checks


def check_growth_window(
    spec: DimFnSpec, window: GrowthWindow, grid: Sequence[RationalLike]
) -> tuple[bool, Fraction | None]:
    """Certify x**s1 < g(x) < x**s2 at every grid point.

    Returns ``(True, None)`` or ``(False, x)`` for the first point where the
    strict inequalities could not be certified.
    """
    for x in grid:
        x = as_rational(x)
        gx = g_eval(spec, x)
        lower = power_eval(x, window.s1)
        upper = power_eval(x, window.s2)
        if not (lower.certainly_lt(gx) and gx.certainly_lt(upper)):
            return False, x
    return True, None


def decay_threshold(psi: PsiSpec, a: int = 2, cap: int = 64) -> int:
    """Smallest n0 with psi(a^n) < a^(-2n) certified for every n in [n0, cap]."""
    if a < 2:
        raise ValueError("base must be at least 2")
    n0 = None
    for n in range(cap, 0, -1):
        q = Fraction(a) ** n
        try:
            val = psi_eval(psi, q)
        except DomainError:
            break
        if Fraction(val.hi) < Fraction(1, a ** (2 * n)):
            n0 = n
        else:
            break
    if n0 is None:
        raise DecayNotFound(f"psi(a^n) < a^(-2n) not certified for n <= {cap}")
    return n0


def dyadic_grid(k_from: int, k_to: int) -> list[Fraction]:
    return [Fraction(1, 2**k) for k in range(k_from, k_to + 1)]
