"""
Homogeneous causal networks and Lorentz kinematics from event counting.

The network is the diamond tiling in light-cone coordinates: an event is an
integer pair ``(u, v)``; its two out-links go to ``(u+1, v)`` (label ``R``,
a right-moving wire) and ``(u, v+1)`` (label ``L``).  Unstretched
coordinates are ``t = u + v`` and ``x = u - v``.

A boost by a rational ``beta = p/q`` is a foliation whose leaves are the
level sets of ``q t - p x = (q-p) u + (q+p) v``, an integer that grows along
every link, so leaves are antichains and totally ordered by construction.
Stretching the circuit only changes how leaves are drawn; all counting below
is done on the link structure and the integer leaf labels.

A clock comoving with ``beta`` is the light-cone image of a rest clock: its
right-going leg spans ``k d`` links and its left-going leg ``d / k``, with
``k = sqrt((q+p)/(q-p))`` the Doppler factor, each return to the left mirror
rounded to the nearest event.  Observers count leaves of their own foliation crossed by
the moving clock and divide by the count for an identical clock at rest in
their frame.  For the unstretched observer the rest clock spans exactly
``2 d`` leaves, so the estimate is ``raw_count / (2 d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import ArgumentError, GeometryError

ZERO = Fraction(0)


def parse_beta(beta) -> Fraction:
    """Accept ``Fraction``, ``int``, ``"p/q"`` or ``(p, q)``; reject non-reduced input."""
    if isinstance(beta, Fraction):
        value = beta
    elif isinstance(beta, bool):
        raise ArgumentError(f"invalid boost {beta!r}")
    elif isinstance(beta, int):
        value = Fraction(beta)
    elif isinstance(beta, (tuple, list, str)):
        if isinstance(beta, str):
            parts = beta.strip().split("/")
            if len(parts) == 1:
                parts.append("1")
            if len(parts) != 2:
                raise ArgumentError(f"boost must look like 'p/q', got {beta!r}")
            try:
                p, q = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ArgumentError(f"boost must look like 'p/q', got {beta!r}") from exc
        else:
            if len(beta) != 2:
                raise ArgumentError(f"boost must be a (p, q) pair, got {beta!r}")
            p, q = int(beta[0]), int(beta[1])
        if q <= 0:
            raise ArgumentError(f"boost denominator must be positive, got {q}")
        if math.gcd(p, q) != 1:
            raise ArgumentError(f"boost {p}/{q} is not in lowest terms")
        value = Fraction(p, q)
    else:
        raise ArgumentError(f"boost must be rational, got {type(beta).__name__}")
    if abs(value) >= 1:
        raise ArgumentError(f"boost must satisfy |beta| < 1, got {value}")
    return value


def lorentz_gamma(beta) -> float:
    b = float(beta)
    return 1.0 / math.sqrt(1.0 - b * b)


_SPAN_SCALE = 1 << 48


def doppler_span(beta: Fraction, d: int) -> Fraction:
    """``d * sqrt((q+p)/(q-p))``: the right-going leg of a comoving clock.

    Exact whenever the Doppler factor is rational (e.g. beta = 3/5 gives 2),
    otherwise rounded down to a 2**-48 grid.
    """
    p, q = beta.numerator, beta.denominator
    radicand = d * d * (q + p) * (q - p)
    root = math.isqrt(radicand)
    if root * root == radicand:
        return Fraction(root, q - p)
    return Fraction(math.isqrt(radicand * _SPAN_SCALE**2), (q - p) * _SPAN_SCALE)


def _nearest(value: Fraction) -> int:
    """Nearest integer; exact halves go down (toward the earlier leaf)."""
    return math.ceil(value - Fraction(1, 2))


# ---------------------------------------------------------------------------
# network and foliation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tile:
    """Repeated unit: one event with its labelled in- and out-links."""

    out_links: tuple = (((1, 0), "R"), ((0, 1), "L"))
    in_links: tuple = (((-1, 0), "R"), ((0, -1), "L"))


DIAMOND = Tile()


@dataclass(frozen=True)
class CausalNetwork:
    """Finite patch ``0 <= u < rows, 0 <= v < cols`` of the diamond tiling."""

    rows: int
    cols: int
    tile: Tile = DIAMOND

    def __post_init__(self):
        if int(self.rows) != self.rows or int(self.cols) != self.cols:
            raise ArgumentError("network extent must be integral")
        if self.rows < 2 or self.cols < 2:
            raise ArgumentError(f"network extent must be at least 2x2, got {self.rows}x{self.cols}")

    @property
    def n_events(self) -> int:
        return self.rows * self.cols

    def contains(self, event) -> bool:
        u, v = event
        return 0 <= u < self.rows and 0 <= v < self.cols

    def events(self) -> Iterator[tuple]:
        for u in range(self.rows):
            for v in range(self.cols):
                yield (u, v)

    def successors(self, event) -> list:
        u, v = event
        out = []
        for (du, dv), label in self.tile.out_links:
            nxt = (u + du, v + dv)
            if self.contains(nxt):
                out.append((nxt, label))
        return out

    def predecessors(self, event) -> list:
        u, v = event
        out = []
        for (du, dv), label in self.tile.in_links:
            prv = (u + du, v + dv)
            if self.contains(prv):
                out.append((prv, label))
        return out

    def links(self) -> list:
        """All links as ``(source, target, label)``, in a fixed order."""
        return [(e, nxt, label) for e in self.events() for nxt, label in self.successors(e)]

    def tile_links(self, event) -> frozenset:
        """Out-links of one tile as offsets relative to the tile's event."""
        u, v = event
        return frozenset(((w[0] - u, w[1] - v), label) for w, label in self.successors(event))

    def is_interior(self, event) -> bool:
        u, v = event
        return 1 <= u < self.rows - 1 and 1 <= v < self.cols - 1

    def topological_order(self) -> list:
        """Kahn's algorithm; raises if the link relation had a cycle."""
        indeg = {e: len(self.predecessors(e)) for e in self.events()}
        ready = [e for e, n in indeg.items() if n == 0]
        order = []
        while ready:
            e = ready.pop()
            order.append(e)
            for nxt, _ in self.successors(e):
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        if len(order) != self.n_events:
            raise ArgumentError("causal network contains a cycle")
        return order

    @staticmethod
    def coordinates(event) -> tuple:
        u, v = event
        return (u + v, u - v)


def build_network(rows: int, cols: int) -> CausalNetwork:
    return CausalNetwork(rows, cols)


def leaf_value(beta: Fraction, t: int, x: int) -> int:
    """Integer leaf label of the unstretched event ``(t, x)`` under boost ``beta``."""
    p, q = beta.numerator, beta.denominator
    g = math.gcd(q - p, q + p)
    return (q * t - p * x) // g


@dataclass(frozen=True)
class Foliation:
    """Boosted slicing of a network; ``stretch`` only affects :meth:`embed`."""

    net: CausalNetwork
    beta: Fraction
    stretch: float = 1.0

    @property
    def label_step(self) -> int:
        p, q = self.beta.numerator, self.beta.denominator
        return math.gcd(q - p, q + p)

    def leaf_of(self, event) -> int:
        t, x = CausalNetwork.coordinates(event)
        return leaf_value(self.beta, t, x)

    @property
    def leaves(self) -> list:
        """Events grouped by leaf, in increasing leaf order."""
        groups: dict = {}
        for e in self.net.events():
            groups.setdefault(self.leaf_of(e), []).append(e)
        return [groups[k] for k in sorted(groups)]

    def leaf_labels(self) -> list:
        return sorted({self.leaf_of(e) for e in self.net.events()})

    def embed(self, event) -> tuple:
        """Drawing coordinates with leaves on horizontal lines ``y = stretch * leaf``."""
        p, q = self.beta.numerator, self.beta.denominator
        t, x = CausalNetwork.coordinates(event)
        return (float(q * x - p * t) / q, self.stretch * self.leaf_of(event))


def foliate(net: CausalNetwork, beta, stretch: float = 1.0) -> Foliation:
    return Foliation(net, parse_beta(beta), stretch)


# ---------------------------------------------------------------------------
# clocks and rods
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClockSpec:
    mirror_separation: int
    n_ticks: int = 1

    def __post_init__(self):
        if int(self.mirror_separation) != self.mirror_separation or self.mirror_separation < 1:
            raise ArgumentError("mirror_separation must be a positive integer")
        if int(self.n_ticks) != self.n_ticks or self.n_ticks < 1:
            raise ArgumentError("n_ticks must be a positive integer")


@dataclass(frozen=True)
class _Mirrors:
    """Ideal mirror worldlines: ``x = beta t`` and its copy shifted ``span`` along u."""

    beta: Fraction
    span: Fraction
    d: int


def _bounce(mirrors: _Mirrors, n_ticks: int):
    """Tick marks of a signal bouncing between the mirrors at one link per step.

    The ``i``-th return to the left mirror is the event nearest the ideal
    return point ``(i * span, i * d**2 / span)`` in light-cone coordinates.
    Between returns the signal runs along ``u`` to the right mirror and then
    along ``v`` back, so the link path is fixed by the marks and rounding
    never accumulates from tick to tick.

    Returns the unstretched ``(t, x)`` of each mark and the largest ``u`` and
    ``v`` on the path.
    """
    back = Fraction(mirrors.d * mirrors.d) / mirrors.span
    marks = []
    for i in range(n_ticks + 1):
        u, v = _nearest(i * mirrors.span), _nearest(i * back)
        marks.append((u + v, u - v))
    last_t, last_x = marks[-1]
    return marks, (last_t + last_x) // 2, (last_t - last_x) // 2


def signal_path(mirrors: _Mirrors, n_ticks: int) -> list:
    """Every event visited by the signal, as ``(u, v)``, one link apart."""
    marks, _, _ = _bounce(mirrors, n_ticks)
    path = [(0, 0)]
    for t, x in marks[1:]:
        u1, v1 = (t + x) // 2, (t - x) // 2
        u, v = path[-1]
        path.extend((w, v) for w in range(u + 1, u1 + 1))
        path.extend((u1, w) for w in range(v + 1, v1 + 1))
    return path


def _rod_samples(mirrors: _Mirrors, observer: Fraction, n_leaves: int):
    """Light-cone endpoints of the rod on ``n_leaves`` consecutive observer half-leaves.

    Sampling is midway between leaves so no endpoint sits on an event.
    Returns ``(samples, max_u, max_v)`` where each sample is
    ``(u_left, v_left, u_right, v_right)`` as exact fractions.
    """
    po, qo = observer.numerator, observer.denominator
    g = math.gcd(qo - po, qo + po)
    b = mirrors.beta
    # first leaf on which both endpoints have u, v >= 0
    # right endpoint at t >= span is inside the future cone of the origin
    start = leaf_value(observer, math.ceil(mirrors.span), math.ceil(mirrors.span)) + 1
    samples = []
    max_u = max_v = 0
    lam = start
    while len(samples) < n_leaves:
        level = Fraction(2 * lam + 1, 2) * g  # q_o t - p_o x on the half-leaf
        # left: x = b t  -> t (q_o - p_o b) = level
        tl = level / (qo - po * b)
        xl = b * tl
        # right: x = span (1 - b) + b t
        c = mirrors.span * (1 - b)
        tr = (level + po * c) / (qo - po * b)
        xr = c + b * tr
        ul, vl = (tl + xl) / 2, (tl - xl) / 2
        ur, vr = (tr + xr) / 2, (tr - xr) / 2
        lam += 1
        if min(ul, vl, ur, vr) < 0:
            continue
        samples.append((ul, vl, ur, vr))
        max_u = max(max_u, math.ceil(max(ul, ur)))
        max_v = max(max_v, math.ceil(max(vl, vr)))
    return samples, max_u, max_v


def _wire_count(sample, factor: int = 1) -> int:
    """Macro-wires of both labels crossed between the rod endpoints."""
    ul, vl, ur, vr = sample
    return abs(_nearest(ur / factor) - _nearest(ul / factor)) + abs(
        _nearest(vr / factor) - _nearest(vl / factor)
    )


@dataclass(frozen=True)
class EventCountReport:
    """Counts behind one time-dilation / length-contraction measurement.

    ``raw_count`` is the mean number of observer leaves crossed per tick of
    the moving clock (in macro-leaves once coarse-grained).  The estimates
    are ratios of the moving object's counts to those of an identical object
    at rest in the observer's frame.
    """

    beta: Fraction
    d: int
    raw_count: float
    dilation_estimate: float
    contraction_estimate: float
    coarse_grain_factor: int = 1
    observer_beta: Fraction = ZERO
    n_ticks: int = 1
    phase: int = 0
    observed_marks: tuple = field(default=(), repr=False)
    reference_marks: tuple = field(default=(), repr=False)
    rod_samples: tuple = field(default=(), repr=False)
    reference_rod_samples: tuple = field(default=(), repr=False)

    def as_dict(self) -> dict:
        return {
            "beta_num": self.beta.numerator,
            "beta_den": self.beta.denominator,
            "observer_beta_num": self.observer_beta.numerator,
            "observer_beta_den": self.observer_beta.denominator,
            "d": self.d,
            "n_ticks": self.n_ticks,
            "raw_count": self.raw_count,
            "observed_leaves": self.observed_marks[-1] - self.observed_marks[0],
            "reference_leaves": self.reference_marks[-1] - self.reference_marks[0],
            "dilation": self.dilation_estimate,
            "contraction": self.contraction_estimate,
            "factor": self.coarse_grain_factor,
            "phase": self.phase,
        }


def _require_inside(net: CausalNetwork, max_u: int, max_v: int, what: str):
    need = (max_u + 1, max_v + 1)
    if need[0] > net.rows or need[1] > net.cols:
        raise GeometryError(
            f"{what} leaves the {net.rows}x{net.cols} network; needs at least {need[0]}x{need[1]}",
            required=(max(need[0], net.rows), max(need[1], net.cols)),
        )


def _rod_leaves(observer: Fraction, clock_beta: Fraction) -> int:
    # the endpoint offsets repeat after lcm-many leaves; sample a full cycle
    return 2 * clock_beta.denominator * observer.denominator * max(
        1, abs(observer.numerator) + abs(clock_beta.numerator)
    )


def _measure(net, observer: Fraction, clock_beta: Fraction, clock: ClockSpec) -> EventCountReport:
    d, n = clock.mirror_separation, clock.n_ticks
    moving = _Mirrors(clock_beta, doppler_span(clock_beta, d), d)
    resting = _Mirrors(observer, doppler_span(observer, d), d)

    marks, mu_, mv_ = _bounce(moving, n)
    ref_marks, ru, rv = _bounce(resting, n)
    n_leaves = _rod_leaves(observer, clock_beta)
    rod, qu, qv = _rod_samples(moving, observer, n_leaves)
    ref_rod, su, sv = _rod_samples(resting, observer, n_leaves)
    _require_inside(net, max(mu_, ru, qu, su), max(mv_, rv, qv, sv), "clock")

    obs = tuple(leaf_value(observer, t, x) for t, x in marks)
    ref = tuple(leaf_value(observer, t, x) for t, x in ref_marks)
    return _finish(
        EventCountReport(
            beta=clock_beta,
            d=d,
            raw_count=0.0,
            dilation_estimate=0.0,
            contraction_estimate=0.0,
            observer_beta=observer,
            n_ticks=n,
            observed_marks=obs,
            reference_marks=ref,
            rod_samples=tuple(rod),
            reference_rod_samples=tuple(ref_rod),
        ),
        factor=1,
        phase=0,
    )


def _macro_span(marks: Sequence[int], factor: int, phase: int) -> int:
    """Macro-leaves between the first and last mark."""
    return _nearest(Fraction(marks[-1] + phase, factor)) - _nearest(Fraction(marks[0] + phase, factor))


def _finish(report: EventCountReport, factor: int, phase: int) -> EventCountReport:
    obs = _macro_span(report.observed_marks, factor, phase)
    ref = _macro_span(report.reference_marks, factor, phase)
    if ref == 0:
        raise ArgumentError(f"coarse-graining factor {factor} leaves no reference leaves to count")
    rod = sum(_wire_count(s, factor) for s in report.rod_samples)
    ref_rod = sum(_wire_count(s, factor) for s in report.reference_rod_samples)
    contraction = rod / ref_rod if ref_rod else math.nan
    return replace(
        report,
        raw_count=obs / report.n_ticks,
        dilation_estimate=obs / ref,
        contraction_estimate=contraction,
        coarse_grain_factor=factor,
        phase=phase,
    )


def clock_events(net: CausalNetwork, fol: Foliation, clock: ClockSpec) -> EventCountReport:
    """Unstretched observer times a clock comoving with ``fol.beta``.

    The mirrors move at ``fol.beta`` across the unstretched circuit; each
    tick is counted in unstretched leaves, so ``dilation_estimate`` equals
    ``raw_count / (2 d)``.  ``contraction_estimate`` compares wires crossed
    between the mirror worldlines with those of a rest rod of length ``d``.
    """
    return _measure(net, ZERO, fol.beta, clock)


def reciprocal_clock_events(net: CausalNetwork, fol: Foliation, clock: ClockSpec) -> EventCountReport:
    """The boosted observer times a clock at rest in the unstretched circuit.

    Boosted leaves are denser than unstretched ones, so the count is
    normalized by the observer's own comoving clock rather than by ``2 d``.
    """
    return _measure(net, fol.beta, ZERO, clock)


def rod_events(net: CausalNetwork, fol: Foliation, d: int) -> float:
    """Length-contraction estimate for a rod of rest length ``d`` comoving with ``fol``."""
    return clock_events(net, fol, ClockSpec(d, 1)).contraction_estimate


def coarse_grain(report: EventCountReport, factor: int, phase: int = 0) -> EventCountReport:
    """Regroup leaves and wires into blocks of ``factor`` and recount.

    Macro-unit boundaries sit at half-multiples of ``factor`` (shifted by
    ``phase`` leaves); an event exactly on a boundary goes to the earlier
    macro-unit, the same tie rule the tick marks use.  Summed over all
    phases the macro counts telescope to the fine counts divided by
    ``factor``.  ``factor = 1`` with ``phase = 0`` reproduces the report.
    """
    if int(factor) != factor or factor < 1:
        raise ArgumentError(f"coarse-graining factor must be a positive integer, got {factor}")
    if report.coarse_grain_factor != 1:
        raise ArgumentError("coarse_grain expects a report at factor 1")
    if factor == 1 and phase == 0:
        return report
    return _finish(report, int(factor), int(phase))


def coarse_grain_phase_average(report: EventCountReport, factor: int) -> float:
    """Dilation from macro counts summed over all ``factor`` boundary phases."""
    phases = range(int(factor))
    obs = sum(_macro_span(report.observed_marks, factor, ph) for ph in phases)
    ref = sum(_macro_span(report.reference_marks, factor, ph) for ph in phases)
    return obs / ref


def leaf_density(fol: Foliation, d: int = 64) -> float:
    """Leaves per unit proper time in ``fol``, relative to the unstretched slicing."""
    report = reciprocal_clock_events(CausalNetwork(8 * d + 8, 8 * d + 8), fol, ClockSpec(d, 1))
    return (report.reference_marks[-1] - report.reference_marks[0]) / (2.0 * d)


def required_extent(fol: Foliation, clock: ClockSpec, reciprocal: bool = False) -> tuple:
    """Minimal (rows, cols) that fits the measurement."""
    probe = CausalNetwork(2, 2)
    try:
        (_measure(probe, fol.beta, ZERO, clock) if reciprocal else _measure(probe, ZERO, fol.beta, clock))
    except GeometryError as exc:
        return exc.required
    return (2, 2)


def sweep(beta, ds: Sequence[int], n_ticks: int = 1, factor: int = 1) -> list:
    """Clock and rod reports for each separation in ``ds`` on a just-large-enough network."""
    b = parse_beta(beta)
    reports = []
    for d in ds:
        clock = ClockSpec(int(d), n_ticks)
        rows, cols = required_extent(Foliation(CausalNetwork(2, 2), b), clock)
        net = CausalNetwork(rows, cols)
        report = clock_events(net, foliate(net, b), clock)
        reports.append(coarse_grain(report, factor))
    return reports
