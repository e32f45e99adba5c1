"""
Lattice state and single-step evolution laws for the two-component flow.

The field lives on a periodic ring of ``n_sites`` sites.  ``plus`` carries
right-moving amplitude, ``minus`` left-moving amplitude.  All evolution is
done in lattice units (chorus = chronon = 1, so the maximal speed is one
site per step); ``LatticeParams.chorus`` and ``chronon`` only enter the unit
conversions in :mod:`infoflow.units`.

Three steppers are provided:

* :func:`step_massless` -- pure transport, an exact permutation.
* :func:`step_unitary` -- the exactly unitary automaton with momentum-space
  matrix ``[[nu e^{ik}, -i mu], [-i mu, nu e^{-ik}]]``.
* :func:`step_finite_difference` -- forward-Euler integration of the
  literal difference equation with a five-point spatial stencil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgumentError, StructuralError, UndefinedMomentError


@dataclass(frozen=True)
class LatticeParams:
    """Periodic 1-D lattice: site count plus the chorus/chronon unit scales."""

    n_sites: int
    chorus: float = 1.0
    chronon: float = 1.0

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 4 or self.n_sites % 2:
            raise ArgumentError(f"n_sites must be an even integer >= 4, got {self.n_sites}")
        if not (self.chorus > 0 and math.isfinite(self.chorus)):
            raise ArgumentError(f"chorus must be positive, got {self.chorus}")
        if not (self.chronon > 0 and math.isfinite(self.chronon)):
            raise ArgumentError(f"chronon must be positive, got {self.chronon}")

    def max_speed(self) -> float:
        return self.chorus / self.chronon


@dataclass(frozen=True)
class MassCoupling:
    """Dimensionless mass ``mu = m/M`` in [0, 1]."""

    mu: float

    def __post_init__(self):
        if not (0.0 <= self.mu <= 1.0):
            raise ArgumentError(f"mu must lie in [0, 1], got {self.mu}")

    def nu(self) -> float:
        return math.sqrt(1.0 - self.mu * self.mu)


@dataclass
class FieldState:
    """Complex amplitudes of the right-mover (``plus``) and left-mover (``minus``)."""

    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self):
        self.plus = np.asarray(self.plus, dtype=np.complex128)
        self.minus = np.asarray(self.minus, dtype=np.complex128)
        if self.plus.ndim != 1 or self.plus.shape != self.minus.shape:
            raise StructuralError(
                f"components must be 1-D of equal length, got {self.plus.shape} and {self.minus.shape}"
            )

    @property
    def n_sites(self) -> int:
        return self.plus.shape[0]

    def copy(self) -> "FieldState":
        return FieldState(self.plus.copy(), self.minus.copy())

    def probability(self) -> np.ndarray:
        return np.abs(self.plus) ** 2 + np.abs(self.minus) ** 2

    @classmethod
    def delta(cls, n_sites: int, site: int, component: str = "plus") -> "FieldState":
        """Unit amplitude on a single site of one component."""
        plus = np.zeros(n_sites, dtype=np.complex128)
        minus = np.zeros(n_sites, dtype=np.complex128)
        target = {"plus": plus, "minus": minus}.get(component)
        if target is None:
            raise ArgumentError(f"component must be 'plus' or 'minus', got {component!r}")
        target[site % n_sites] = 1.0
        return cls(plus, minus)


@dataclass(frozen=True)
class WavepacketSpec:
    """Gaussian packet; ``width`` is the standard deviation of |psi|^2 in sites."""

    center: float
    width: float
    k0: float = 0.0
    spinor_weights: tuple = (1.0, 0.0)

    def __post_init__(self):
        if not self.width >= 1.0:
            raise ArgumentError(f"width must be >= 1 lattice unit, got {self.width}")
        w = tuple(complex(c) for c in self.spinor_weights)
        if len(w) != 2 or (w[0] == 0 and w[1] == 0):
            raise ArgumentError("spinor_weights must be a nonzero pair")
        object.__setattr__(self, "spinor_weights", w)


def _check(state: FieldState, params: LatticeParams) -> None:
    if state.n_sites != params.n_sites:
        raise StructuralError(
            f"state has {state.n_sites} sites but lattice has {params.n_sites}"
        )


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------

def step_massless(state: FieldState, params: LatticeParams) -> FieldState:
    """Shift ``plus`` one site right and ``minus`` one site left (periodic)."""
    _check(state, params)
    return FieldState(np.roll(state.plus, 1), np.roll(state.minus, -1))


def unstep_massless(state: FieldState, params: LatticeParams) -> FieldState:
    """Inverse of :func:`step_massless`."""
    _check(state, params)
    return FieldState(np.roll(state.plus, -1), np.roll(state.minus, 1))


def step_unitary(state: FieldState, params: LatticeParams, mass: MassCoupling) -> FieldState:
    """One step of the exactly unitary automaton.

    In position space::

        plus'(x)  = nu * plus(x-1) - i mu * minus(x)
        minus'(x) = -i mu * plus(x) + nu * minus(x+1)

    This is the Strang composition half-shift / coin rotation by
    ``arcsin(mu)`` / half-shift, so it is second order accurate for the
    continuum equation with mass frequency ``arcsin(mu)/tau``.
    """
    if mass.mu == 0.0:
        return step_massless(state, params)
    _check(state, params)
    nu = mass.nu()
    mu = mass.mu
    plus = nu * np.roll(state.plus, 1) - 1j * mu * state.minus
    minus = -1j * mu * state.plus + nu * np.roll(state.minus, -1)
    return FieldState(plus, minus)


def stencil_derivative(f: np.ndarray) -> np.ndarray:
    """Five-point central difference (two sites each way), lattice units."""
    return (np.roll(f, 2) - 8.0 * np.roll(f, 1) + 8.0 * np.roll(f, -1) - np.roll(f, -2)) / 12.0


def step_finite_difference(
    state: FieldState,
    params: LatticeParams,
    mass: MassCoupling,
    substeps: int = 16,
) -> FieldState:
    """Advance one chronon with explicit Euler substeps of the difference equation.

    The generator is ``d/dt plus = -D plus - i mu minus`` and
    ``d/dt minus = +D minus - i mu plus`` with ``D`` the five-point stencil.
    The stencil is antisymmetric, so every Fourier mode is amplified by
    exactly ``|1 + i lambda dt|`` per substep: the norm grows and the caller
    is expected to monitor it.
    """
    if int(substeps) != substeps or substeps < 1:
        raise ArgumentError(f"substeps must be a positive integer, got {substeps}")
    _check(state, params)
    dt = 1.0 / substeps
    mu = mass.mu
    plus = state.plus.copy()
    minus = state.minus.copy()
    for _ in range(int(substeps)):
        d_plus = -stencil_derivative(plus) - 1j * mu * minus
        d_minus = stencil_derivative(minus) - 1j * mu * plus
        plus = plus + dt * d_plus
        minus = minus + dt * d_minus
    return FieldState(plus, minus)


@dataclass
class Trajectory:
    """Snapshots of an evolution, ``steps[i]`` paired with ``states[i]``."""

    steps: list = field(default_factory=list)
    states: list = field(default_factory=list)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(zip(self.steps, self.states))

    @property
    def final(self) -> FieldState:
        return self.states[-1]


def evolve(
    state: FieldState,
    params: LatticeParams,
    mass: MassCoupling,
    n_steps: int,
    mode: str = "unitary",
    cadence: int = 1,
    substeps: int = 16,
) -> Trajectory:
    """Evolve ``n_steps`` chronons, keeping every ``cadence``-th state and the last one."""
    if int(n_steps) != n_steps or n_steps < 0:
        raise ArgumentError(f"n_steps must be a nonnegative integer, got {n_steps}")
    if int(cadence) != cadence or cadence < 1:
        raise ArgumentError(f"cadence must be a positive integer, got {cadence}")
    if mode == "unitary":
        stepper = lambda s: step_unitary(s, params, mass)  # noqa: E731
    elif mode == "finite_difference":
        stepper = lambda s: step_finite_difference(s, params, mass, substeps)  # noqa: E731
    else:
        raise ArgumentError(f"mode must be 'unitary' or 'finite_difference', got {mode!r}")
    _check(state, params)

    traj = Trajectory([0], [state])
    current = state
    for n in range(1, int(n_steps) + 1):
        current = stepper(current)
        if n % cadence == 0 or n == n_steps:
            traj.steps.append(n)
            traj.states.append(current)
    return traj


# ---------------------------------------------------------------------------
# initial conditions and observables
# ---------------------------------------------------------------------------

def periodic_displacement(x: np.ndarray, origin: float, n_sites: int) -> np.ndarray:
    """Signed distance from ``origin`` to ``x`` on the ring, in [-n/2, n/2)."""
    return (x - origin + n_sites / 2.0) % n_sites - n_sites / 2.0


def make_wavepacket(spec: WavepacketSpec, params: LatticeParams) -> FieldState:
    """Normalized Gaussian-modulated plane wave with the requested spinor."""
    n = params.n_sites
    disp = periodic_displacement(np.arange(n, dtype=float), spec.center, n)
    envelope = np.exp(-disp**2 / (4.0 * spec.width**2))
    # k0 is a physical wavenumber; on the lattice the phase per site is k0 * a
    carrier = np.exp(1j * spec.k0 * params.chorus * disp)
    base = envelope * carrier
    w_plus, w_minus = spec.spinor_weights
    state = FieldState(w_plus * base, w_minus * base)
    return normalized(state)


def normalized(state: FieldState) -> FieldState:
    norm = total_norm(state)
    if norm == 0.0:
        raise UndefinedMomentError("cannot normalize a zero state")
    scale = 1.0 / math.sqrt(norm)
    return FieldState(state.plus * scale, state.minus * scale)


def total_norm(state: FieldState) -> float:
    return float(np.sum(state.probability()))


def _weights(state: FieldState) -> np.ndarray:
    prob = state.probability()
    norm = prob.sum()
    if norm == 0.0:
        raise UndefinedMomentError("position moments are undefined for a zero state")
    return prob / norm


def _circular_angle(state: FieldState) -> float:
    n = state.n_sites
    phasor = np.sum(_weights(state) * np.exp(2j * np.pi * np.arange(n) / n))
    return float(np.angle(phasor))


def position_mean(state: FieldState) -> float:
    """Circular mean position in [0, n_sites)."""
    n = state.n_sites
    return (_circular_angle(state) * n / (2.0 * np.pi)) % n


def position_variance(state: FieldState) -> float:
    """Second moment of the periodic displacement about the circular mean."""
    n = state.n_sites
    disp = periodic_displacement(np.arange(n, dtype=float), position_mean(state), n)
    return float(np.sum(_weights(state) * disp**2))


# ---------------------------------------------------------------------------
# Zitterbewegung
# ---------------------------------------------------------------------------

@dataclass
class ZitterTrace:
    """<x>(t) trace plus the two candidate reference frequencies.

    ``omega_dispersion`` is the lattice gap ``arccos(nu)/tau`` (the ZB line
    sits at twice this value); ``omega_conversion`` is ``mu c / (2a)``, the
    frequency implied by the mass conversion relations.
    """

    times: np.ndarray
    positions: np.ndarray
    mu: float
    omega_dispersion: float
    omega_conversion: float

    @property
    def predicted_frequency(self) -> float:
        return 2.0 * self.omega_dispersion

    def as_rows(self):
        return list(zip(self.times.tolist(), self.positions.tolist()))


def unwrapped_means(states: Sequence[FieldState]) -> np.ndarray:
    """Circular means along a trajectory, unwrapped across the ring boundary."""
    if not states:
        return np.zeros(0)
    n = states[0].n_sites
    angles = np.unwrap([_circular_angle(s) for s in states])
    return angles * n / (2.0 * np.pi)


def zitterbewegung_trace(
    spec: WavepacketSpec,
    params: LatticeParams,
    mass: MassCoupling,
    n_steps: int,
) -> ZitterTrace:
    state = make_wavepacket(spec, params)
    traj = evolve(state, params, mass, n_steps, mode="unitary")
    times = np.asarray(traj.steps, dtype=float) * params.chronon
    omega_disp = math.acos(mass.nu()) / params.chronon
    omega_conv = mass.mu * params.max_speed() / (2.0 * params.chorus)
    return ZitterTrace(times, unwrapped_means(traj.states), mass.mu, omega_disp, omega_conv)


def detrend(times: np.ndarray, values: np.ndarray):
    """Least-squares line fit; returns ``(slope, intercept, residual)``."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    # centred normal equations: avoids cancellation when values sit far from 0
    tc = times - times.mean()
    vm = values.mean()
    vc = values - vm
    slope = float(np.dot(tc, vc) / np.dot(tc, tc))
    intercept = float(vm - slope * times.mean())
    return slope, intercept, vc - slope * tc


def dominant_frequency(times: np.ndarray, signal: np.ndarray, pad_factor: int = 64) -> float:
    """Angular frequency of the strongest spectral line of a uniformly sampled signal.

    Hann window, zero padding and a parabolic fit on the log magnitude
    around the peak bin.
    """
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if len(times) < 8:
        raise ArgumentError("need at least 8 samples for a frequency estimate")
    dt = times[1] - times[0]
    nfft = 1 << int(math.ceil(math.log2(len(signal) * pad_factor)))
    spectrum = np.abs(np.fft.rfft((signal - signal.mean()) * np.hanning(len(signal)), n=nfft))
    freqs = np.fft.rfftfreq(nfft, d=dt) * 2.0 * np.pi
    i = int(np.argmax(spectrum[1:])) + 1
    if 1 <= i < len(spectrum) - 1 and spectrum[i - 1] > 0 and spectrum[i + 1] > 0:
        a, b, c = np.log(spectrum[i - 1 : i + 2])
        denom = a - 2.0 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    else:
        shift = 0.0
    return float(freqs[i] + shift * (freqs[1] - freqs[0]))
