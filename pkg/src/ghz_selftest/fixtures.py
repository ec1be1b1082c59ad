"""Reference strategies used by the CLI, the tests and the benchmarks."""

import numpy as np

from .errors import InvalidInput
from .linalg import I2, SIGMA_A, SIGMA_X, SIGMA_Z, projector, tensor
from .scenario import CounterexampleStrategy
from .states import (
    Povm,
    Strategy,
    aligned_sender_states,
    ghz_basis_state,
    ghz_povm,
    ideal_sender_states,
)


def ideal_strategy(n: int) -> Strategy:
    """Optimal strategy in canonical frame: aligned states + GHZ basis POVM."""
    senders = tuple(aligned_sender_states(j, n) for j in range(1, n + 1))
    return Strategy(n=n, senders=senders, povm=ghz_povm(n))


def literal_ideal_strategy(n: int) -> Strategy:
    """Optimal strategy with the reference states as listed (inputs unswapped).

    The difference operators of senders >= 2 then sit in the Hadamard-rotated
    frame, so the matching optimal POVM is the GHZ basis conjugated by
    Hadamards on those slots. Score 1, like :func:`ideal_strategy`.
    """
    senders = tuple(ideal_sender_states(j, n) for j in range(1, n + 1))
    h = tensor([I2] + [SIGMA_A] * (n - 1))  # sigma_A is the Hadamard
    els = np.stack(
        [h @ projector(ghz_basis_state(m, n)) @ h for m in range(2**n)]
    )
    return Strategy(n=n, senders=senders, povm=Povm(els))


def computational_strategy(n: int) -> Strategy:
    """Aligned states with a computational-basis measurement.

    Outcome decoding reads the sign bit off qubit 1 and XORs it into the
    remaining bits, so every element overlaps its GHZ vector with
    probability exactly 1/2: the canonical sub-optimal reference.
    """
    senders = tuple(aligned_sender_states(j, n) for j in range(1, n + 1))
    d = 2**n
    els = np.zeros((d, d, d), dtype=complex)
    for m in range(d):
        bits = [(m >> (j - 1)) & 1 for j in range(1, n + 1)]
        q = [bits[0]] + [b ^ bits[0] for b in bits[1:]]
        idx = sum(q[j] << (n - 1 - j) for j in range(n))
        els[m, idx, idx] = 1.0
    return Strategy(n=n, senders=senders, povm=Povm(els))


def depolarized_strategy(n: int, noise: float) -> Strategy:
    """Ideal strategy with white noise mixed into every POVM element."""
    if not 0 <= noise <= 1:
        raise InvalidInput(f"noise must lie in [0, 1], got {noise}")
    base = ideal_strategy(n)
    d = 2**n
    els = (1 - noise) * base.povm.elements + noise * np.eye(d) / d
    return Strategy(n=n, senders=base.senders, povm=Povm(els))


def bell_vectors() -> dict:
    """The four two-qubit Bell vectors keyed ``phi+ phi- psi+ psi-``."""
    inv = 1 / np.sqrt(2)
    return {
        "phi+": np.array([inv, 0, 0, inv], dtype=complex),
        "phi-": np.array([inv, 0, 0, -inv], dtype=complex),
        "psi+": np.array([0, inv, inv, 0], dtype=complex),
        "psi-": np.array([0, inv, -inv, 0], dtype=complex),
    }


def partial_bell_strategy() -> Strategy:
    """Optimal three-outcome strategy: two Bell projectors plus the psi block."""
    senders = (aligned_sender_states(1, 2), aligned_sender_states(2, 2))
    b = bell_vectors()
    els = np.stack(
        [
            projector(b["phi+"]),
            projector(b["phi-"]),
            projector(b["psi+"]) + projector(b["psi-"]),
        ]
    )
    observables = np.stack([SIGMA_X, SIGMA_Z])
    return Strategy(
        n=2, senders=senders, povm=Povm(els), task="partial_bell", observables=observables
    )


def depolarized_partial_bell(noise: float) -> Strategy:
    """Partial-Bell strategy with white noise on the POVM (trace-weighted)."""
    if not 0 <= noise <= 1:
        raise InvalidInput(f"noise must lie in [0, 1], got {noise}")
    base = partial_bell_strategy()
    els = np.stack(
        [
            (1 - noise) * m + noise * np.trace(m).real * np.eye(4) / 4
            for m in base.povm.elements
        ]
    )
    return Strategy(
        n=2,
        senders=base.senders,
        povm=Povm(els),
        task="partial_bell",
        observables=base.observables,
    )


# ---------------------------------------------------------------------------
# three-input game reference parameters
# ---------------------------------------------------------------------------


def state_from_angles(theta_deg: float, phi_deg: float) -> np.ndarray:
    """Qubit ket ``cos(t/2)|0> + e^{i p} sin(t/2)|1>`` from degrees."""
    t = np.radians(theta_deg)
    p = np.radians(phi_deg)
    return np.array([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)])


def _antipodal_ket(theta_deg: float, phi_deg: float) -> np.ndarray:
    return state_from_angles(180 - theta_deg, phi_deg + 180)


ENTANGLING_SENDER1 = ((118.05, 0.0), (125.58, 243.78), (125.73, 244.07))
ENTANGLING_SENDER2 = ((151.45, 287.40), (69.76, 116.28), (65.49, 296.09))
ENTANGLING_WEIGHTS = (0.9413, 0.3375)
ENTANGLING_PERP_WEIGHTS = (0.9240, 0.3357)
ENTANGLING_PERP_AXES = ((179.61, 354.23), (48.93, 116.69))

SEPARABLE_SENDER1 = ((8.35, 0.0), (177.0, 46.08), (177.0, 46.08))
SEPARABLE_SENDER2 = ((123.49, 231.77), (0.0, 0.0), (134.92, 46.08))
SEPARABLE_AXIS = (89.84, 46.08)


def _three_input_states(angles1, angles2) -> np.ndarray:
    states = np.zeros((2, 3, 2, 2), dtype=complex)
    for y, ang in enumerate(angles1):
        states[0, y] = projector(state_from_angles(*ang))
    for y, ang in enumerate(angles2):
        states[1, y] = projector(state_from_angles(*ang))
    return states


def entangling_fixture() -> CounterexampleStrategy:
    """Three-input game parameters with a two-projector entangling measurement.

    Both measurement kets are normalized after construction from the listed
    amplitudes; no re-orthogonalization is applied, so the two projectors
    are only approximately orthogonal and validation of this fixture needs
    the relaxed effect tolerance.
    """
    states = _three_input_states(ENTANGLING_SENDER1, ENTANGLING_SENDER2)
    l1, l2 = ENTANGLING_WEIGHTS
    psi = np.zeros(4, dtype=complex)
    psi[0], psi[3] = l1, l2
    t1, t2 = ENTANGLING_PERP_WEIGHTS
    (na, ma) = ENTANGLING_PERP_AXES
    perp = t1 * np.kron(state_from_angles(*na), state_from_angles(*ma)) + t2 * np.kron(
        _antipodal_ket(*na), _antipodal_ket(*ma)
    )
    m0 = projector(psi) + projector(perp)
    return CounterexampleStrategy(states=states, m0=m0)


def separable_fixture() -> CounterexampleStrategy:
    """Three-input game parameters with a product-form measurement."""
    states = _three_input_states(SEPARABLE_SENDER1, SEPARABLE_SENDER2)
    u = state_from_angles(*SEPARABLE_AXIS)
    m0 = np.kron(projector([1, 0]), projector(u)) + np.kron(
        projector([0, 1]), projector([1, 0])
    )
    return CounterexampleStrategy(states=states, m0=m0)
