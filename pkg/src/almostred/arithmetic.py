"""Continued fractions of the rotation frequency.

Convergents are exact integers (``fractions.Fraction`` arithmetic), so
denominators far beyond 10**18 are represented without rounding.
"""

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
import math

from .errors import InsufficientDepth, InvalidInput, NonFinite

# digits carried by the named quadratic irrationals
NAMED_DIGITS = 160

_PERIODIC = {
    # name: (periodic partial quotients after a_0 = 0, closed form)
    "golden": ((1,), "(sqrt(5)-1)/2"),
    "sqrt2m1": ((2,), "sqrt(2)-1"),
}


def _named_value(name):
    with localcontext() as ctx:
        ctx.prec = NAMED_DIGITS + 10
        if name == "golden":
            d = (Decimal(5).sqrt() - 1) / 2
        elif name == "sqrt2m1":
            d = Decimal(2).sqrt() - 1
        else:
            raise InvalidInput(f"unknown named frequency {name!r}")
    return Fraction(d)


@dataclass(frozen=True)
class Frequency:
    """A frequency in (0, 1) with its continued-fraction data.

    ``partial_quotients`` starts with ``a_0 = 0``; ``convergents[n]`` is
    ``(p_n, q_n)`` with ``q_0 = 1``.  ``depth`` counts convergents.
    """

    value: Fraction
    partial_quotients: tuple
    convergents: tuple
    rational: bool = False
    name: str = ""
    _fixed: int = field(default=0, repr=False, compare=False)

    @property
    def depth(self):
        return len(self.convergents)

    @property
    def q(self):
        return [c[1] for c in self.convergents]

    @property
    def alpha(self):
        return float(self.value)

    @property
    def fixed64(self):
        """``alpha`` as an unsigned 64-bit fixed-point fraction of a turn."""
        return self._fixed

    def reconstruct(self, n=None):
        """Evaluate the truncated continued fraction ``[0; a_1, ..., a_n]``."""
        if n is None:
            n = self.depth - 1
        p, q = self.convergents[n]
        return Fraction(p, q)

    def to_config(self):
        if self.name in _PERIODIC:
            return {"kind": self.name}
        return {"kind": "decimal", "value": str(Decimal(self.value.numerator) / Decimal(self.value.denominator)),
                "depth": self.depth}


def _build(value, quotients, rational, name=""):
    p_prev, p = 1, quotients[0]
    q_prev, q = 0, 1
    convs = [(p, q)]
    for a in quotients[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        convs.append((p, q))
    fixed = round(value * (1 << 64)) % (1 << 64)
    return Frequency(value=value, partial_quotients=tuple(quotients),
                     convergents=tuple(convs), rational=rational, name=name,
                     _fixed=int(fixed))


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        try:
            x = Decimal(x)
        except Exception as exc:
            raise InvalidInput(f"cannot parse frequency {x!r}") from exc
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise NonFinite("frequency must be finite")
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise NonFinite("frequency must be finite")
    return Fraction(x)


def cf_expand(x, depth):
    """Continued-fraction expansion of ``x`` with ``depth`` convergents.

    ``x`` may be a float, a decimal string, a ``Decimal``/``Fraction`` or one
    of the names ``"golden"`` and ``"sqrt2m1"``; names use their exact
    periodic expansions.  A terminating expansion is flagged ``rational``
    and may hold fewer than ``depth`` convergents.
    """
    if depth < 1:
        raise InvalidInput("depth must be >= 1")
    if isinstance(x, str) and x in _PERIODIC:
        period = _PERIODIC[x][0]
        quotients = [0] + [period[i % len(period)] for i in range(depth - 1)]
        return _build(_named_value(x), quotients, False, name=x)
    value = _as_fraction(x)
    if not 0 < value < 1:
        raise InvalidInput("frequency must lie in (0, 1)")
    quotients = []
    r = value
    rational = False
    while len(quotients) < depth:
        a = math.floor(r)
        quotients.append(a)
        frac = r - a
        if frac == 0:
            rational = True
            break
        r = 1 / frac
    return _build(value, quotients, rational)


def frequency_from_config(spec):
    """Build a Frequency from ``{"kind": ...}`` config dictionaries."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidInput("frequency spec needs a 'kind'")
    kind = spec["kind"]
    depth = int(spec.get("depth", 64))
    if kind in _PERIODIC:
        return cf_expand(kind, depth)
    if kind == "decimal":
        if "value" not in spec:
            raise InvalidInput("decimal frequency needs a 'value'")
        return cf_expand(str(spec["value"]), depth)
    raise InvalidInput(f"unknown frequency kind {kind!r}")


def beta_upper(f, window):
    """Upper-envelope sample ``max ln(q_{n+1}) / q_n`` over ``n`` in ``window``.

    This is a finite-depth surrogate; it never certifies the limsup.
    """
    lo, hi = window
    if lo < 0 or hi < lo:
        raise InvalidInput("bad window")
    if hi + 1 >= f.depth:
        raise InsufficientDepth(
            f"window end {hi} needs {hi + 2} convergents, have {f.depth}"
            + (" (expansion terminated: rational input)" if f.rational else ""))
    q = f.q
    return max(math.log(q[n + 1]) / q[n] for n in range(lo, hi + 1))


def select_scale(f, target):
    """Largest computed ``q_n <= target`` and its index (``q_0 = 1`` fallback)."""
    best = (1, 0)
    for n, q in enumerate(f.q):
        if q <= target:
            best = (q, n)
        else:
            break
    return best


def approximant_near(f, target):
    """Largest ``q_n`` not exceeding ``target``, but at least 1; convenience."""
    return select_scale(f, max(1, int(target)))[0]
