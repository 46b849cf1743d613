"""Closed algebra of monotone gate functions.

Every gate function is a symbolic template with exact rational
parameters, never an opaque closure, so circuits can be serialized,
audited for monotonicity, and counted structurally.  Unary templates
compose onto binary ones through Composed; the floor-carry and
staircase-search templates wrap inner functions recursively.

Every template is total and non-decreasing in each argument (the
squash inverse clamps far outside the values any produced circuit can
reach, which keeps it total without touching reachable behavior).
BumpAccumulate and the bump unary additionally need
bump >= scale * cut; check_monotone catches a violation on a grid
rather than the constructor rejecting it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

BIG = Fraction(1 << 40)

HALF = Fraction(1, 2)


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def fstr(v) -> str:
    """Rationals travel as explicit p/q strings."""
    v = _frac(v)
    return f"{v.numerator}/{v.denominator}"


def phi(y: Fraction) -> Fraction:
    """Strictly increasing rational bijection onto (0, 1/2)."""
    y = _frac(y)
    return Fraction(1, 4) + y / (4 * (1 + abs(y)))


def phi_inv(w: Fraction) -> Fraction:
    w = _frac(w)
    t = 4 * w - 1
    if abs(t) >= 1:
        raise ValueError(f"{w} is outside the squashed range (0, 1/2)")
    return t / (1 - abs(t))


def floor_step(x: Fraction, step: Fraction) -> Fraction:
    return step * (x / step).__floor__()


# ---------------------------------------------------------------------------
# unary templates


class UnaryFn:
    def eval(self, x: Fraction) -> Fraction:
        raise NotImplementedError

    def domain(self):
        """Interval the stage is most interesting on; every stage is
        total and non-decreasing, this only steers grid sampling."""
        return (-BIG, BIG)

    def critical(self):
        """Input values around which monotonicity is worth probing."""
        return ()

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Squash(UnaryFn):
    """x -> 1/4 + x / (4 (1 + |x|)), into (0, 1/2)."""

    def eval(self, x):
        return phi(x)

    def to_json(self):
        return {"kind": "squash"}


@dataclass(frozen=True)
class Unsquash(UnaryFn):
    """Inverse of Squash, made total by clamping into the image of
    [-2^128, 2^128] first.

    The clamp keeps the stage monotone on all of the rationals; any
    value a produced circuit ever feeds it is the squash of a small
    intermediate, far inside the clamp window, so behavior on the
    reachable inputs is the exact inverse.
    """

    def eval(self, x):
        x = min(max(_frac(x), _UNSQUASH_LO), _UNSQUASH_HI)
        return phi_inv(x)

    def domain(self):
        # Sampling hint: the interesting region is the squash image.
        return (Fraction(0), HALF)

    def to_json(self):
        return {"kind": "unsquash"}


_UNSQUASH_CLIP = Fraction(1 << 128)
_UNSQUASH_LO = phi(-_UNSQUASH_CLIP)
_UNSQUASH_HI = phi(_UNSQUASH_CLIP)


@dataclass(frozen=True)
class ScaleAdd(UnaryFn):
    """x -> scale * x + offset with scale >= 0."""

    scale: Fraction
    offset: Fraction

    def eval(self, x):
        return self.scale * _frac(x) + self.offset

    def to_json(self):
        return {"kind": "scale-add", "scale": fstr(self.scale), "offset": fstr(self.offset)}


@dataclass(frozen=True)
class Const(UnaryFn):
    value: Fraction

    def eval(self, x):
        return self.value

    def to_json(self):
        return {"kind": "const", "value": fstr(self.value)}


@dataclass(frozen=True)
class StepThreshold(UnaryFn):
    """x -> 1 past the cut, else 0."""

    cut: Fraction
    strict: bool = True

    def eval(self, x):
        x = _frac(x)
        hit = x > self.cut if self.strict else x >= self.cut
        return Fraction(1 if hit else 0)

    def critical(self):
        return (self.cut - 1, self.cut, self.cut + 1)

    def to_json(self):
        return {"kind": "threshold", "cut": fstr(self.cut), "strict": self.strict}


@dataclass(frozen=True)
class Bump(UnaryFn):
    """x -> bump once x reaches the cut, else scale * x.

    Non-decreasing iff scale >= 0 and bump >= scale * cut.
    """

    scale: Fraction
    cut: Fraction
    bump: Fraction

    def eval(self, x):
        x = _frac(x)
        return self.bump if x >= self.cut else self.scale * x

    def critical(self):
        return (self.cut - Fraction(1, 10), self.cut, self.cut + Fraction(1, 10))

    def to_json(self):
        return {
            "kind": "bump",
            "scale": fstr(self.scale),
            "cut": fstr(self.cut),
            "bump": fstr(self.bump),
        }


@dataclass(frozen=True)
class RoundPhase(UnaryFn):
    """Floor to the step grid, adding half a step when the fractional
    part has reached the cut.  Needs 0 <= half <= step and cut <= step."""

    step: Fraction
    half: Fraction
    cut: Fraction

    def eval(self, x):
        x = _frac(x)
        base = floor_step(x, self.step)
        return base + (self.half if x - base >= self.cut else Fraction(0))

    def critical(self):
        return (-self.cut, Fraction(0), self.cut, self.step, self.step + self.cut)

    def to_json(self):
        return {
            "kind": "round-phase",
            "step": fstr(self.step),
            "half": fstr(self.half),
            "cut": fstr(self.cut),
        }


@dataclass(frozen=True)
class StaircaseSearch(UnaryFn):
    """x -> floor(x) + squash(top - floor(x) - offset) on the step grid.

    The floor carries the accumulated value in the high bits while the
    squashed term encodes the next probe; non-decreasing because the
    floor jumps by a full step (>= 1) while the squashed term moves by
    less than 1/2.
    """

    step: Fraction
    top: Fraction
    offset: Fraction

    def eval(self, x):
        base = floor_step(_frac(x), self.step)
        return base + phi(self.top - base - self.offset)

    def critical(self):
        return (-self.step, Fraction(0), self.step, 2 * self.step)

    def to_json(self):
        return {
            "kind": "staircase-search",
            "step": fstr(self.step),
            "top": fstr(self.top),
            "offset": fstr(self.offset),
        }


# ---------------------------------------------------------------------------
# binary templates


def _sample_interval(lo, hi, rng) -> Fraction:
    if hi - lo > 2 * BIG - 2:
        return Fraction(rng.randint(-800, 800), rng.choice((1, 2, 3, 4, 5, 8)))
    return lo + (hi - lo) * Fraction(rng.randint(1, 999), 1000)


class GateFn:
    def eval(self, u: Fraction, v: Fraction) -> Fraction:
        raise NotImplementedError

    def arg_domains(self):
        return ((-BIG, BIG), (-BIG, BIG))

    def critical_args(self):
        """Per-argument values worth including in monotonicity grids."""
        return ((), ())

    def sample_arg(self, which: int, rng) -> Fraction:
        """A random input admissible for this argument slot."""
        lo, hi = self.arg_domains()[which]
        return _sample_interval(lo, hi, rng)

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class NonNegCombine(GateFn):
    """(u, v) -> s1 * u + s2 * v + const with s1, s2 >= 0."""

    s1: Fraction
    s2: Fraction
    const: Fraction = Fraction(0)

    def eval(self, u, v):
        return self.s1 * _frac(u) + self.s2 * _frac(v) + self.const

    def to_json(self):
        return {
            "kind": "nonneg-combine",
            "s1": fstr(self.s1),
            "s2": fstr(self.s2),
            "const": fstr(self.const),
        }


@dataclass(frozen=True)
class BumpAccumulate(GateFn):
    """(u, v) -> u + (bump if v >= cut else scale * v).

    Non-decreasing in v iff scale >= 0 and bump >= scale * cut.
    """

    scale: Fraction
    cut: Fraction
    bump: Fraction

    def eval(self, u, v):
        return _frac(u) + Bump(self.scale, self.cut, self.bump).eval(v)

    def critical_args(self):
        return ((), Bump(self.scale, self.cut, self.bump).critical())

    def to_json(self):
        return {
            "kind": "bump-accumulate",
            "scale": fstr(self.scale),
            "cut": fstr(self.cut),
            "bump": fstr(self.bump),
        }


@dataclass(frozen=True)
class FloorCarry(GateFn):
    """Carry the step-floor of the flagged argument(s), apply the inner
    function to the fractional part(s).

    Sound when the inner function has range inside (0, 1/2): a crossing
    of a step boundary drops the inner term by less than 1/2 while the
    floor rises by a full step.
    """

    step: Fraction
    mode: str  # "first", "second" or "both"
    inner: GateFn

    def __post_init__(self):
        if self.mode not in ("first", "second", "both"):
            raise ValueError(f"bad floor-carry mode {self.mode!r}")

    def eval(self, u, v):
        u = _frac(u)
        v = _frac(v)
        if self.mode == "first":
            base = floor_step(u, self.step)
            return base + self.inner.eval(u - base, v)
        if self.mode == "second":
            base = floor_step(v, self.step)
            return base + self.inner.eval(u, v - base)
        bu = floor_step(u, self.step)
        bv = floor_step(v, self.step)
        return (bu + bv) / 2 + self.inner.eval(u - bu, v - bv)

    def arg_domains(self):
        inner = self.inner.arg_domains()
        wide = (-BIG, BIG)
        if self.mode == "first":
            return (wide, inner[1])
        if self.mode == "second":
            return (inner[0], wide)
        return (wide, wide)

    def _frac_probes(self, which):
        """Admissible fractional offsets for step-boundary probes."""
        lo, hi = self.inner.arg_domains()[which]
        if hi - lo < 2 * BIG - 2:
            gap = hi - lo
            return (lo + gap / 4, lo + 3 * gap / 4)
        return (self.step / 8, 3 * self.step / 8)

    def critical_args(self):
        def lattice(which):
            return tuple(
                self.step * k + off
                for k in (-1, 0, 1)
                for off in self._frac_probes(which)
            )

        inner = self.inner.critical_args()
        if self.mode == "first":
            return (lattice(0), inner[1])
        if self.mode == "second":
            return (inner[0], lattice(1))
        return (lattice(0), lattice(1))

    def sample_arg(self, which, rng):
        # Flagged arguments live on the step lattice plus whatever the
        # inner function accepts as the fractional part.
        flagged = (
            which == 0 and self.mode in ("first", "both")
        ) or (which == 1 and self.mode in ("second", "both"))
        if flagged:
            return self.step * rng.randint(-20, 20) + self.inner.sample_arg(which, rng)
        return self.inner.sample_arg(which, rng)

    def to_json(self):
        return {
            "kind": "floor-carry",
            "step": fstr(self.step),
            "mode": self.mode,
            "inner": self.inner.to_json(),
        }


@dataclass(frozen=True)
class Composed(GateFn):
    """inner with unary pre-chains per argument and a post chain.

    Pre-chains apply right-to-left (last entry touches the raw input
    first); the post chain applies left-to-right to the inner output.
    """

    inner: GateFn
    pre1: tuple = ()
    pre2: tuple = ()
    post: tuple = ()

    def eval(self, u, v):
        for fn in reversed(self.pre1):
            u = fn.eval(u)
        for fn in reversed(self.pre2):
            v = fn.eval(v)
        out = self.inner.eval(u, v)
        for fn in self.post:
            out = fn.eval(out)
        return out

    def arg_domains(self):
        inner = self.inner.arg_domains()

        def chain_domain(chain, fallback):
            if chain:
                return chain[-1].domain()
            return fallback

        return (chain_domain(self.pre1, inner[0]), chain_domain(self.pre2, inner[1]))

    def critical_args(self):
        inner = self.inner.critical_args()

        def chain_critical(chain, fallback):
            if chain:
                return chain[-1].critical()
            return fallback

        return (chain_critical(self.pre1, inner[0]), chain_critical(self.pre2, inner[1]))

    def sample_arg(self, which, rng):
        chain = self.pre1 if which == 0 else self.pre2
        if chain:
            lo, hi = chain[-1].domain()
            return _sample_interval(lo, hi, rng)
        return self.inner.sample_arg(which, rng)

    def to_json(self):
        return {
            "kind": "composed",
            "inner": self.inner.to_json(),
            "pre1": [f.to_json() for f in self.pre1],
            "pre2": [f.to_json() for f in self.pre2],
            "post": [f.to_json() for f in self.post],
        }


def post_compose(fn: GateFn, unary: UnaryFn) -> GateFn:
    if isinstance(fn, Composed):
        return Composed(fn.inner, fn.pre1, fn.pre2, fn.post + (unary,))
    return Composed(fn, post=(unary,))


def pre_compose(fn: GateFn, arg: int, unary: UnaryFn) -> GateFn:
    """Wrap one argument; the new unary is applied to the raw input first."""
    if not isinstance(fn, Composed):
        fn = Composed(fn)
    if arg == 0:
        return Composed(fn.inner, fn.pre1 + (unary,), fn.pre2, fn.post)
    return Composed(fn.inner, fn.pre1, fn.pre2 + (unary,), fn.post)


# ---------------------------------------------------------------------------
# serialization

_UNARY_KINDS = {
    "squash": lambda d: Squash(),
    "unsquash": lambda d: Unsquash(),
    "scale-add": lambda d: ScaleAdd(Fraction(d["scale"]), Fraction(d["offset"])),
    "const": lambda d: Const(Fraction(d["value"])),
    "threshold": lambda d: StepThreshold(Fraction(d["cut"]), bool(d["strict"])),
    "bump": lambda d: Bump(Fraction(d["scale"]), Fraction(d["cut"]), Fraction(d["bump"])),
    "round-phase": lambda d: RoundPhase(Fraction(d["step"]), Fraction(d["half"]), Fraction(d["cut"])),
    "staircase-search": lambda d: StaircaseSearch(
        Fraction(d["step"]), Fraction(d["top"]), Fraction(d["offset"])
    ),
}


def unary_from_json(d) -> UnaryFn:
    try:
        return _UNARY_KINDS[d["kind"]](d)
    except KeyError:
        raise ValueError(f"unknown unary template {d.get('kind')!r}") from None


def gatefn_from_json(d) -> GateFn:
    kind = d.get("kind")
    if kind == "nonneg-combine":
        return NonNegCombine(Fraction(d["s1"]), Fraction(d["s2"]), Fraction(d["const"]))
    if kind == "bump-accumulate":
        return BumpAccumulate(Fraction(d["scale"]), Fraction(d["cut"]), Fraction(d["bump"]))
    if kind == "floor-carry":
        return FloorCarry(Fraction(d["step"]), d["mode"], gatefn_from_json(d["inner"]))
    if kind == "composed":
        return Composed(
            gatefn_from_json(d["inner"]),
            tuple(unary_from_json(x) for x in d["pre1"]),
            tuple(unary_from_json(x) for x in d["pre2"]),
            tuple(unary_from_json(x) for x in d["post"]),
        )
    raise ValueError(f"unknown gate template {kind!r}")
