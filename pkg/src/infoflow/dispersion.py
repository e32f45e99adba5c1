"""
Momentum-space analysis of the unitary automaton.

Plane waves ``psi(x) ~ exp(i k x)`` are eigenmodes of the lattice shift, so
one step acts on each wavenumber through a 2x2 unitary.  Its eigenphases
``-/+ omega(k)`` obey ``cos(omega tau) = nu cos(k a)``; the group velocity of
the upper branch is ``nu sin(ka) / sin(omega tau)`` and never exceeds
``nu = sqrt(1 - mu^2)`` (attained at ``ka = pi/2``).

Everything here works in lattice units (a = tau = 1) unless a
``LatticeParams`` is passed explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, InformationHaltError, MeasurementInvalidError
from .lattice import (
    FieldState,
    LatticeParams,
    MassCoupling,
    WavepacketSpec,
    detrend,
    evolve,
    make_wavepacket,
    position_variance,
    step_unitary,
    unwrapped_means,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def step_matrix(mass: MassCoupling, k: float) -> np.ndarray:
    """Momentum-space step matrix ``[[nu e^{ik}, -i mu], [-i mu, nu e^{-ik}]]``.

    Written with the transform ``psi_k = sum_x psi(x) e^{+ikx}``; under the
    numpy convention (``e^{-ikx}``) the diagonal phases swap, which leaves
    the spectrum unchanged.
    """
    nu, mu = mass.nu(), mass.mu
    return np.array(
        [[nu * np.exp(1j * k), -1j * mu], [-1j * mu, nu * np.exp(-1j * k)]],
        dtype=np.complex128,
    )


def eigenphases(mass: MassCoupling, k: float) -> np.ndarray:
    """Sorted eigenphases (in (-pi, pi]) of :func:`step_matrix`."""
    return np.sort(np.angle(np.linalg.eigvals(step_matrix(mass, k))))


def omega_of_k(mass: MassCoupling, k) -> np.ndarray:
    """Upper-branch frequency from the closed form ``arccos(nu cos k)``."""
    return np.arccos(np.clip(mass.nu() * np.cos(k), -1.0, 1.0))


def group_velocity(mass: MassCoupling, k) -> np.ndarray:
    """Upper-branch group velocity in units of c.

    Where ``sin(omega) == 0`` (only for mu == 0 at k = 0 or pi, where the two
    branches touch) the one-sided limits are +1 and -1 and the symmetric
    value 0 is returned.
    """
    k = np.asarray(k, dtype=float)
    nu = mass.nu()
    s = np.sqrt(np.clip(1.0 - (nu * np.cos(k)) ** 2, 0.0, None))
    num = nu * np.sin(k)
    safe = np.where(s > 0.0, s, 1.0)
    # |v| <= nu holds analytically (sin^2 omega >= sin^2 k); clip rounding overshoot
    return np.clip(np.where(s > 0.0, num / safe, 0.0), -nu, nu)


@dataclass
class DispersionCurve:
    mu: float
    k: np.ndarray
    omega: np.ndarray
    group_velocity: np.ndarray
    lower_phase: np.ndarray = field(repr=False, default=None)

    @property
    def nu(self) -> float:
        return math.sqrt(1.0 - self.mu**2)

    def rows(self):
        return list(zip(self.k.tolist(), self.omega.tolist(), self.group_velocity.tolist()))


def k_grid(n_k: int) -> np.ndarray:
    """``n_k`` cell-centred wavenumbers in (-pi, pi), symmetric under k -> -k."""
    return -np.pi + 2.0 * np.pi * (np.arange(n_k) + 0.5) / n_k


def dispersion(mass: MassCoupling, n_k: int = 256) -> DispersionCurve:
    """Sample the spectrum by numerically diagonalizing the step matrix."""
    if int(n_k) != n_k or n_k < 8:
        raise ArgumentError(f"n_k must be an integer >= 8, got {n_k}")
    ks = k_grid(int(n_k))
    upper = np.empty_like(ks)
    lower = np.empty_like(ks)
    for i, k in enumerate(ks):
        lo, hi = eigenphases(mass, k)
        lower[i], upper[i] = lo, hi
    omega = np.abs(upper)
    return DispersionCurve(mass.mu, ks, omega, group_velocity(mass, ks), lower)


def golden_section_max(func, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200):
    """Maximize a unimodal function on [lo, hi]; returns ``(argmax, max)``."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = func(d)
    x = 0.5 * (a + b)
    return x, float(func(x))


def zeta(mass: MassCoupling) -> float:
    """Renormalized maximal speed: max over k of |group velocity|."""
    if mass.mu == 1.0:
        return 0.0
    _, best = golden_section_max(lambda k: abs(float(group_velocity(mass, k))), 0.0, math.pi)
    return best


def maximizing_wavenumber(mass: MassCoupling) -> float:
    if mass.mu == 1.0:
        return math.pi / 2.0
    k, _ = golden_section_max(lambda k: abs(float(group_velocity(mass, k))), 0.0, math.pi)
    return k


def refraction_index(mass: MassCoupling) -> float:
    """Vacuum refraction index ``1/zeta``."""
    if mass.mu >= 1.0:
        raise InformationHaltError("refraction index diverges at mu = 1: propagation halts")
    return 1.0 / zeta(mass)


# ---------------------------------------------------------------------------
# eigenvectors in position convention (psi ~ e^{ikx}) and packet speed
# ---------------------------------------------------------------------------

def _position_matrix(mass: MassCoupling, k: float) -> np.ndarray:
    nu, mu = mass.nu(), mass.mu
    return np.array(
        [[nu * np.exp(-1j * k), -1j * mu], [-1j * mu, nu * np.exp(1j * k)]],
        dtype=np.complex128,
    )


def branch_spinor(mass: MassCoupling, ka: float, direction: int = 1) -> tuple:
    """Spinor of the eigenmode at wavenumber ``ka`` moving in ``direction``.

    The velocity of each eigenvector follows from first-order perturbation
    of its eigenvalue, ``dE/dk = -Im(<v|dU/dk|v> / lambda)``.
    """
    u = _position_matrix(mass, ka)
    du = np.array(
        [[-1j * mass.nu() * np.exp(-1j * ka), 0.0], [0.0, 1j * mass.nu() * np.exp(1j * ka)]]
    )
    lam, vecs = np.linalg.eig(u)
    velocities = [
        -np.imag(np.vdot(vecs[:, j], du @ vecs[:, j]) / lam[j]) for j in range(2)
    ]
    j = int(np.argmax(velocities)) if direction >= 0 else int(np.argmin(velocities))
    v = vecs[:, j] / np.linalg.norm(vecs[:, j])
    return complex(v[0]), complex(v[1])


def wavepacket_speed(
    spec: WavepacketSpec,
    params: LatticeParams,
    mass: MassCoupling,
    n_steps: int,
    burn_in: int = 0,
) -> float:
    """Fitted drift of <x>(t) in units of c."""
    if spec.width < 8:
        raise ArgumentError(f"packet width must be >= 8 sites, got {spec.width}")
    if not 0 <= burn_in < n_steps - 1:
        raise ArgumentError("burn_in must leave at least two samples to fit")
    traj = evolve(make_wavepacket(spec, params), params, mass, n_steps)
    limit = params.n_sites**2 / 16.0
    for step, state in traj:
        if position_variance(state) >= limit:
            raise MeasurementInvalidError(
                f"packet wrapped around the ring at step {step}: variance reached n_sites^2/16"
            )
    steps = np.asarray(traj.steps, dtype=float)
    means = unwrapped_means(traj.states)
    keep = steps >= burn_in
    slope, _, _ = detrend(steps[keep], means[keep])
    return slope


# ---------------------------------------------------------------------------
# continuum reference and convergence
# ---------------------------------------------------------------------------

def continuum_oracle(
    spec: WavepacketSpec,
    params: LatticeParams,
    mass_physical: tuple,
    t: float,
) -> FieldState:
    """Exact spectral solution of the continuum two-component equation.

    ``mass_physical = (omega, speed)``: ``omega`` in 1/time and ``speed`` in
    units of c.  Right-movers obey ``d/dt plus = -speed c d/dx plus - i omega
    minus`` (and mirror-image for ``minus``), sampled on the lattice of
    ``params``.
    """
    omega, speed = mass_physical
    state = make_wavepacket(spec, params)
    if t == 0:
        return state
    n, a = params.n_sites, params.chorus
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=a)
    sk = speed * params.max_speed() * k
    energy = np.sqrt(sk**2 + omega**2)
    cos = np.cos(energy * t)
    sinc = np.where(energy > 0, np.sin(energy * t) / np.where(energy > 0, energy, 1.0), t)
    ph = np.fft.fft(state.plus)
    mh = np.fft.fft(state.minus)
    new_p = cos * ph - 1j * sinc * (sk * ph + omega * mh)
    new_m = cos * mh - 1j * sinc * (omega * ph - sk * mh)
    return FieldState(np.fft.ifft(new_p), np.fft.ifft(new_m))


def l2_distance(a: FieldState, b: FieldState) -> float:
    return float(np.sqrt(np.sum(np.abs(a.plus - b.plus) ** 2 + np.abs(a.minus - b.minus) ** 2)))


@dataclass
class ConvergenceTable:
    spacing: list
    errors: list

    @property
    def ratios(self) -> list:
        return [e0 / e1 if e1 > 0 else math.inf for e0, e1 in zip(self.errors, self.errors[1:])]

    @property
    def orders(self) -> list:
        return [math.log2(r) if r > 0 else math.nan for r in self.ratios]

    def rows(self):
        return list(zip(self.spacing, self.errors))


def convergence_report(
    spec: WavepacketSpec,
    params: LatticeParams,
    mass: MassCoupling,
    t_physical: float,
    refinement_levels: int = 4,
) -> ConvergenceTable:
    """Automaton vs continuum on successively halved lattices.

    Level ``l`` refines chorus and chronon by ``2**l`` with the packet held
    fixed in physical units and ``mu = omega tau`` scaled with the spacing,
    so the physical mass frequency ``mu / tau`` of the coarsest level is
    kept.  The oracle propagates with that frequency at speed c.
    """
    if refinement_levels < 3:
        raise ArgumentError("convergence_report needs at least 3 refinement levels")
    omega = mass.mu / params.chronon
    spacing, errors = [], []
    for level in range(refinement_levels):
        f = 2**level
        p = LatticeParams(params.n_sites * f, params.chorus / f, params.chronon / f)
        s = WavepacketSpec(spec.center * f, spec.width * f, spec.k0, spec.spinor_weights)
        n_steps = t_physical / p.chronon
        if abs(n_steps - round(n_steps)) > 1e-9:
            raise ArgumentError("t_physical must be a whole number of chronons at every level")
        m = MassCoupling(mass.mu / f)
        state = make_wavepacket(s, p)
        for _ in range(int(round(n_steps))):
            state = step_unitary(state, p, m)
        reference = continuum_oracle(s, p, (omega, 1.0), t_physical)
        spacing.append(p.chorus)
        errors.append(l2_distance(state, reference))
    return ConvergenceTable(spacing, errors)
