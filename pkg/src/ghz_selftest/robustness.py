"""Robustness of the certification: local channels, operator inequalities,
relabeling unitaries, and fidelity lower bounds.

The central object is the operator inequality ``K_s >= r W_s + mu I`` where
``K_s`` is a local unital channel applied to the GHZ projector and ``W_s``
the witness at antipodal message angles. Its validity over all angles turns
an observed score deficit ``eps = 1 - S`` into a lower bound on the average
GHZ fidelity of the measurement. Analytic ``(r, mu)`` are built in for two
senders; for more senders the caller supplies a pair and certifies it by
grid sweep.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, Unsupported
from .linalg import I2, SIGMA_A, SIGMA_B, SIGMA_X, SIGMA_Z, herm_eigvals, projector, tensor
from .parallel import ordered_map
from .scenario import witness_operator
from .states import ghz_basis_state, outcome_bits, outcome_label

SQRT2 = np.sqrt(2)

ANALYTIC_R_2 = (4 + 5 * SQRT2) / 16
ANALYTIC_MU_2 = -(1 + 2 * SQRT2) / 4

GRID_STEP = np.pi / 80
GRID_PASS_FLOOR = -1e-8
GRID_FAIL_FLOOR = -1e-6


@dataclass(frozen=True)
class FidelityBoundParams:
    """Coefficients of the operator inequality, with ``r (n-1) 2 sqrt2 + mu = 1``."""

    r: float
    mu: float
    n: int

    def __post_init__(self):
        if abs(self.r * (self.n - 1) * 2 * SQRT2 + self.mu - 1) > 1e-12:
            raise InvalidInput("params must satisfy r*(n-1)*2*sqrt(2) + mu = 1")

    @property
    def slope(self) -> float:
        return self.r * (self.n - 1) * 2 * SQRT2


def analytic_params(n: int = 2) -> FidelityBoundParams:
    """The analytically known inequality coefficients (two senders only)."""
    if n != 2:
        raise Unsupported(f"analytic (r, mu) known only for n=2, got n={n}")
    return FidelityBoundParams(r=ANALYTIC_R_2, mu=ANALYTIC_MU_2, n=2)


def _check_angle(x: float) -> float:
    x = float(x)
    if not 0 <= x <= np.pi / 2 + 1e-12:
        raise InvalidInput(f"angle {x} outside [0, pi/2]")
    return min(x, np.pi / 2)


def _check_angles(angles, n: int | None = None) -> np.ndarray:
    arr = np.array([_check_angle(a) for a in angles], dtype=float)
    if n is not None and arr.shape != (n,):
        raise InvalidInput(f"expected {n} angles, got {arr.shape[0]}")
    if arr.size == 0:
        raise InvalidInput("need at least one angle")
    return arr


def channel_g(x: float) -> float:
    """Channel strength ``(1 + sqrt2)(sin x + cos x - 1)``; 1 at pi/4, 0 at the ends."""
    x = _check_angle(x)
    return float((1 + SQRT2) * (math.sin(x) + math.cos(x) - 1))


def gamma_operator(j: int, x: float) -> np.ndarray:
    """Conjugation axis of sender ``j``'s channel; branch switches at pi/4."""
    x = _check_angle(x)
    if j == 1:
        return SIGMA_X if x <= np.pi / 4 else SIGMA_Z
    return SIGMA_A if x <= np.pi / 4 else SIGMA_B


def local_channel(j: int, x: float, rho) -> np.ndarray:
    """Single-qubit unital channel ``(1+g)/2 rho + (1-g)/2 G rho G``.

    Trace-preserving, unital and self-dual; the identity channel at
    ``x = pi/4`` where ``g = 1``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidInput(f"expected a qubit operator, got shape {rho.shape}")
    g = channel_g(x)
    gam = gamma_operator(j, x)
    return (1 + g) / 2 * rho + (1 - g) / 2 * (gam @ rho @ gam)


def apply_channel(angles, m) -> np.ndarray:
    """Tensor product of the local channels applied to an n-qubit operator."""
    angles = _check_angles(angles)
    n = angles.shape[0]
    m = np.asarray(m, dtype=complex)
    if m.shape != (2**n, 2**n):
        raise InvalidInput(f"operator shape {m.shape} does not match {n} qubits")
    out = m
    for j in range(1, n + 1):
        g = channel_g(angles[j - 1])
        gam_full = tensor([np.eye(2 ** (j - 1)), gamma_operator(j, angles[j - 1]), np.eye(2 ** (n - j))])
        out = (1 + g) / 2 * out + (1 - g) / 2 * (gam_full @ out @ gam_full)
    return out


def k_operator(n: int, s, angles) -> np.ndarray:
    """The channel image of the GHZ projector for outcome ``s``."""
    angles = _check_angles(angles, n)
    xi = ghz_basis_state(s, n)
    return apply_channel(angles, projector(xi))


def parametrized_a_operators(angles) -> np.ndarray:
    """Antipodal message operators at the given angles.

    Sender 1: ``cos(a) X +/- sin(a) Z``; senders >= 2 use the rotated pair
    ``cos(a) A +/- sin(a) B`` with ``A, B = (X +/- Z)/sqrt2``. At all angles
    equal to pi/4 this is the canonical frame of the reference strategy.
    """
    angles = _check_angles(angles)
    n = angles.shape[0]
    ops = np.zeros((n, 2, 2, 2), dtype=complex)
    ops[0, 0] = math.cos(angles[0]) * SIGMA_X + math.sin(angles[0]) * SIGMA_Z
    ops[0, 1] = math.cos(angles[0]) * SIGMA_X - math.sin(angles[0]) * SIGMA_Z
    for j in range(1, n):
        ops[j, 0] = math.cos(angles[j]) * SIGMA_A + math.sin(angles[j]) * SIGMA_B
        ops[j, 1] = math.cos(angles[j]) * SIGMA_A - math.sin(angles[j]) * SIGMA_B
    return ops


def inequality_margin(n: int, s, angles, params: FidelityBoundParams) -> float:
    """Minimum eigenvalue of ``K_s - r W_s - mu I`` at one angle point."""
    angles = _check_angles(angles, n)
    k = k_operator(n, s, angles)
    w = witness_operator(n, s, parametrized_a_operators(angles))
    shifted = k - params.r * w - params.mu * np.eye(2**n)
    return float(herm_eigvals(shifted)[0])


def relabel_unitary(s, s_prime, n: int | None = None) -> np.ndarray:
    """Local unitary mapping GHZ vector ``xi_s`` to ``xi_s'`` (up to phase).

    ``sigma_Z`` on slot 1 where the sign bits differ, ``sigma_X`` on any
    other slot whose bits differ, identity elsewhere.
    """
    if n is None:
        if not isinstance(s, str) or not isinstance(s_prime, str):
            raise InvalidInput("pass n explicitly for non-string outcomes")
        if len(s) != len(s_prime):
            raise InvalidInput("outcome words must have equal length")
        n = len(s)
    b = outcome_bits(s, n)
    bp = outcome_bits(s_prime, n)
    factors = [SIGMA_Z if b[0] != bp[0] else I2]
    factors += [SIGMA_X if b[j] != bp[j] else I2 for j in range(1, n)]
    return tensor(factors)


def reflected_angles(s, s_prime, angles, n: int) -> np.ndarray:
    """Angles matching the relabeled frame: slots j >= 2 whose bit flips
    reflect ``a -> pi/2 - a`` (conjugating by sigma_X swaps the rotated
    Pauli pair, which the channel family absorbs as an angle reflection);
    slot 1 is unchanged."""
    b = outcome_bits(s, n)
    bp = outcome_bits(s_prime, n)
    out = np.array(_check_angles(angles, n))
    for j in range(1, n):
        if b[j] != bp[j]:
            out[j] = np.pi / 2 - out[j]
    return out


def relabel_covariance_defect(n: int, s, s_prime, angles, params: FidelityBoundParams) -> float:
    """Entrywise defect of ``K-rW`` covariance under outcome relabeling."""
    angles = _check_angles(angles, n)
    refl = reflected_angles(s, s_prime, angles, n)
    u = relabel_unitary(s, s_prime, n)
    base = k_operator(n, s, angles) - params.r * witness_operator(
        n, s, parametrized_a_operators(angles)
    )
    moved = k_operator(n, s_prime, refl) - params.r * witness_operator(
        n, s_prime, parametrized_a_operators(refl)
    )
    return float(np.abs(moved - u @ base @ u.conj().T).max())


@dataclass(frozen=True)
class GridResult:
    """Outcome of a margin sweep."""

    min_margin: float
    argmin_outcome: int
    argmin_angles: tuple
    points: int
    passed: bool


def margin_grid(
    n: int,
    params: FidelityBoundParams | None = None,
    step: float = GRID_STEP,
    outcomes="all",
    csv_path=None,
    refine: bool = True,
    workers: int | None = None,
) -> GridResult:
    """Sweep ``inequality_margin`` over an angle grid on ``[0, pi/2]**n``.

    A nonnegative minimum (above ``-1e-8``) certifies the supplied
    inequality coefficients on the grid; any value below ``-1e-6`` raises.
    With ``refine`` the neighborhood of the minimum is re-swept at one
    quarter of the step. Optionally writes rows ``(s, alpha_1..alpha_n,
    margin)`` to ``csv_path`` (outcome words listed sign-bit first).
    """
    if params is None:
        params = analytic_params(n)
    if params.n != n:
        raise InvalidInput(f"params are for n={params.n}, grid is for n={n}")
    if n > 7:
        raise Unsupported("operator-inequality certification supported for n <= 7 only")
    if outcomes == "all":
        outcome_list = list(range(2**n))
    else:
        outcome_list = [int(m) for m in outcomes]
    if not outcome_list:
        raise InvalidInput("no outcomes to sweep")
    axis = np.linspace(0, np.pi / 2, int(round((np.pi / 2) / step)) + 1)

    rows = []

    def eval_point(args):
        m, point = args
        return inequality_margin(n, m, point, params)

    tasks = [(m, pt) for m in outcome_list for pt in itertools.product(axis, repeat=n)]
    margins = ordered_map(eval_point, tasks, workers=workers)
    best = None
    for (m, pt), val in zip(tasks, margins):
        rows.append((m, pt, val))
        if best is None or val < best[2]:
            best = (m, pt, val)
    assert best is not None
    min_m, min_pt, min_val = best

    if refine and min_val < 0:
        fine = step / 4
        local_axes = [
            np.clip(np.arange(c - step, c + step + fine / 2, fine), 0, np.pi / 2)
            for c in min_pt
        ]
        for pt in itertools.product(*local_axes):
            val = inequality_margin(n, min_m, pt, params)
            if val < min_val:
                min_val, min_pt = val, tuple(pt)

    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8") as fh:
            cols = ",".join(f"alpha_{j}" for j in range(1, n + 1))
            fh.write(f"s,{cols},margin\n")
            for m, pt, val in rows:
                pts = ",".join(f"{p:.12g}" for p in pt)
                fh.write(f"{outcome_label(m, n)},{pts},{val:.17g}\n")

    if min_val < GRID_FAIL_FLOOR:
        raise InvalidInput(
            f"inequality violated: margin {min_val:.3e} at outcome "
            f"{outcome_label(min_m, n)}, angles {tuple(float(p) for p in min_pt)}"
        )
    return GridResult(
        min_margin=float(min_val),
        argmin_outcome=int(min_m),
        argmin_angles=tuple(float(p) for p in min_pt),
        points=len(rows),
        passed=min_val >= GRID_PASS_FLOOR,
    )


def fidelity_lower_bound(n: int, eps: float, params: FidelityBoundParams | None = None) -> float:
    """Affine fidelity floor ``1 - r (n-1) 2 sqrt2 eps``, clamped at 0.

    Uses the analytic coefficients for ``n = 2``; for ``3 <= n <= 7``
    caller-certified coefficients are required.
    """
    if eps < 0:
        raise InvalidInput("eps must be nonnegative")
    if params is None:
        if n != 2:
            raise Unsupported(
                "no built-in inequality coefficients for n != 2; pass params "
                "certified via margin_grid"
            )
        params = analytic_params(2)
    if params.n != n:
        raise InvalidInput(f"params are for n={params.n}, bound requested for n={n}")
    if n > 7:
        raise Unsupported("fidelity bounds supported for n <= 7 only")
    return max(0.0, 1.0 - params.slope * eps)


def meaningful_eps(n: int = 2, params: FidelityBoundParams | None = None) -> float:
    """Largest score deficit at which the fidelity bound still exceeds 1/2."""
    if params is None:
        params = analytic_params(n)
    return 0.5 / params.slope


def avg_fidelity(povm, angles) -> float:
    """Mean GHZ fidelity of the channel-processed POVM elements.

    ``sum_s <xi_s| Lambda[M_s] |xi_s> / 2**n`` -- a certified lower estimate
    of the channel-maximized extraction fidelity.
    """
    angles = _check_angles(angles)
    n = angles.shape[0]
    if len(povm) != 2**n or povm.dim != 2**n:
        raise InvalidInput(
            f"POVM has {len(povm)} elements on dim {povm.dim}, expected 2**{n}"
        )
    total = 0.0
    for m in range(2**n):
        xi = ghz_basis_state(m, n)
        processed = apply_channel(angles, povm.elements[m])
        total += float((xi.conj() @ (processed @ xi)).real)
    return total / 2**n


RAC_OPTIMUM = (1 + 1 / SQRT2) / 2


def partial_fidelity_bound(eps: float, rac_value: float) -> float:
    """Fidelity floor for the two entangled partial-Bell outcomes.

    ``1 - (8 sqrt2 eps / 3)(r - mu/sqrt2)
    + mu * arccos(2 sqrt2 (rac - 1/2)) * (2 - 4 eps / 3)`` with the
    analytic two-sender coefficients. ``rac_value`` may not exceed the
    quantum optimum (the arccos argument must stay in [-1, 1]).
    """
    if eps < 0:
        raise InvalidInput("eps must be nonnegative")
    if rac_value > RAC_OPTIMUM + 1e-12:
        raise InvalidInput(f"RAC score {rac_value} exceeds the quantum optimum")
    r, mu = ANALYTIC_R_2, ANALYTIC_MU_2
    arg = np.clip(2 * SQRT2 * (rac_value - 0.5), -1.0, 1.0)
    return float(
        1
        - (8 * SQRT2 * eps / 3) * (r - mu / SQRT2)
        + mu * math.acos(arg) * (2 - 4 * eps / 3)
    )


def partial_meaningful_eps() -> float:
    """Score deficit at which the RAC-independent part of the bound hits 1/2.

    Solves ``1 - (8 sqrt2 eps / 3)(r - mu/sqrt2) = 1/2`` for ``eps``.
    """
    r, mu = ANALYTIC_R_2, ANALYTIC_MU_2
    return 0.5 / ((8 * SQRT2 / 3) * (r - mu / SQRT2))
