"""Numerical certification of GHZ-basis measurements.

Given a strategy achieving (close to) the optimal score, the checks here
verify every piece of the self-testing argument at machine precision: the
sum-of-squares identity for the shifted witnesses, the closed-form witness
spectrum, extraction of the aligning local unitaries, the GHZ fidelities of
the aligned measurement, partial-transpose entanglement of the outcomes, and
antipodality of the messages. ``certify_strategy`` bundles them into a
:class:`CertReport`.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NotSelfTestable, PreconditionViolated
from .linalg import (
    I2,
    SIGMA_X,
    SIGMA_Z,
    herm_eig,
    herm_eigvals,
    partial_transpose,
    tensor,
)
from .scenario import a_operators, success_metric, witness_operator, witness_operators
from .states import Strategy, ghz_basis_state, outcome_bits

SQRT2 = np.sqrt(2)

ANTIPODAL_GATE = 1e-6
ANTICOMMUTATOR_GATE = 1e-6

DEFAULT_TOLERANCES = {
    "metric": 1e-8,
    "antipodality": ANTIPODAL_GATE,
    "alignment": 1e-8,
    "ghz_fidelity": 1e-8,
    "unit_trace": 1e-8,
    "sos_residual": 1e-8,
    "spectrum": 1e-9,
    "ppt": 1e-8,
}


def _abs_norm(m) -> float:
    """Largest |eigenvalue| of a Hermitian matrix."""
    ev = herm_eigvals(m)
    return float(max(abs(ev[0]), abs(ev[-1])))


def _unit_square_defect(ops: np.ndarray) -> float:
    """How far each difference operator is from squaring to the identity."""
    worst = 0.0
    for j in range(ops.shape[0]):
        for x in range(2):
            worst = max(worst, float(np.abs(ops[j, x] @ ops[j, x] - I2).max()))
    return worst


def _sos_projector_terms(n: int, s, ops: np.ndarray) -> list:
    bits = outcome_bits(s, n)
    p1 = (-1) ** bits[0] / SQRT2 * tensor(
        [ops[0, 0] + ops[0, 1]] + [ops[j, 0] for j in range(1, n)]
    )
    terms = [p1]
    for j in range(2, n + 1):
        factors = [(ops[0, 0] - ops[0, 1]) / SQRT2] + [I2] * (n - 1)
        factors[j - 1] = ops[j - 1, 1]
        terms.append((-1) ** bits[j - 1] * tensor(factors))
    return terms


def sos_residual(n: int, s, ops: np.ndarray) -> float:
    """Defect of the sum-of-squares form of the shifted witness.

    For antipodal pure messages, ``2*sqrt(2)*(n-1)*I - W_s`` equals the sum
    of three manifestly positive terms built from the message operators; the
    returned value is the largest |eigenvalue| of the difference. Messages
    must be antipodal (each difference operator squares to the identity).
    """
    if ops.shape != (n, 2, 2, 2):
        raise InvalidInput(f"operators have shape {ops.shape}, expected ({n},2,2,2)")
    if _unit_square_defect(ops) > ANTIPODAL_GATE:
        raise PreconditionViolated("messages are not antipodal pure states")
    p = _sos_projector_terms(n, s, ops)
    d = 2**n
    eye = np.eye(d)
    t_a = (n - 1) / SQRT2 * ((eye - p[0]) @ (eye - p[0]))
    t_b = sum((eye - pj) @ (eye - pj) for pj in p[1:]) / SQRT2
    psum = (n - 1) * (p[0] @ p[0]) + sum(pj @ pj for pj in p[1:])
    t_c = SQRT2 * (n - 1) * (eye - psum / (2 * (n - 1)))
    shifted = 2 * SQRT2 * (n - 1) * eye - witness_operator(n, s, ops)
    return _abs_norm(shifted - (t_a + t_b + t_c))


def spectrum_closed_form(n: int, s) -> np.ndarray:
    """Witness eigenvalues in closed form, indexed by outcome word ``s'``.

    ``mu[s'] = sqrt(2) * sum_{j>=2} (-1)^{s'_j xor s_j}
    + sqrt(2)*(n-1)*(-1)^{s'_1 xor s_1}``; the maximum ``2*sqrt(2)*(n-1)`` is
    attained only at ``s' = s``.
    """
    bits = outcome_bits(s, n)
    out = np.empty(2**n)
    for m in range(2**n):
        mb = outcome_bits(m, n)
        val = SQRT2 * sum((-1) ** (mb[j] ^ bits[j]) for j in range(1, n))
        val += SQRT2 * (n - 1) * (-1) ** (mb[0] ^ bits[0])
        out[m] = val
    return out


def _fix_phase(v: np.ndarray) -> np.ndarray:
    for c in v:
        if abs(c) > 1e-12:
            return v * (c.conjugate() / abs(c))
    return v


def _frame_unitary(x_op: np.ndarray, z_op: np.ndarray) -> np.ndarray:
    """Unitary mapping the (x_op, z_op) frame onto (sigma_X, sigma_Z)."""
    es = herm_eig(z_op)
    v_minus = _fix_phase(es.vectors[:, 0].copy())
    v_plus = _fix_phase(es.vectors[:, 1].copy())
    x01 = complex(v_plus.conj() @ (x_op @ v_minus))
    if abs(x01) < 1e-9:
        raise NotSelfTestable("frame operators are too degenerate to align")
    v_minus = v_minus * (x01.conjugate() / abs(x01))
    return np.stack([v_plus.conj(), v_minus.conj()])


def _frame_pair(ops: np.ndarray, j: int) -> tuple:
    if j == 0:
        return (ops[0, 0] + ops[0, 1]) / SQRT2, (ops[0, 0] - ops[0, 1]) / SQRT2
    return ops[j, 0], ops[j, 1]


def align_locals(ops: np.ndarray) -> list:
    """Local unitaries bringing each sender's operators to the canonical frame.

    Sender 1's sum/difference combinations map to ``sigma_X``/``sigma_Z``;
    every other sender's pair maps to ``(sigma_X, sigma_Z)`` directly. The
    pairs must anticommute within ``1e-6``; beyond that the alignment is
    ill-posed and ``NotSelfTestable`` is raised.
    """
    n = ops.shape[0]
    for j in range(n):
        anti = ops[j, 0] @ ops[j, 1] + ops[j, 1] @ ops[j, 0]
        if _abs_norm(anti) > ANTICOMMUTATOR_GATE:
            raise NotSelfTestable(
                f"sender {j + 1} operators do not anticommute "
                f"(defect {_abs_norm(anti):.3g})"
            )
    return [_frame_unitary(*_frame_pair(ops, j)) for j in range(n)]


def alignment_error(ops: np.ndarray, unitaries) -> float:
    """Largest residual of the two frame mappings over all senders."""
    worst = 0.0
    for j, u in enumerate(unitaries):
        x_op, z_op = _frame_pair(ops, j)
        worst = max(worst, float(np.abs(u @ x_op @ u.conj().T - SIGMA_X).max()))
        worst = max(worst, float(np.abs(u @ z_op @ u.conj().T - SIGMA_Z).max()))
    return worst


def verify_ghz_measurement(povm, unitaries) -> np.ndarray:
    """GHZ fidelities of the POVM after applying the aligning unitaries.

    Returns ``f[s] = <xi_s| U M_s U^dag |xi_s>`` for every outcome; the
    certification criterion is ``min_s f_s >= 1 - 1e-8`` together with unit
    traces of all elements.
    """
    n = len(unitaries)
    if len(povm) != 2**n or povm.dim != 2**n:
        raise InvalidInput(
            f"POVM has {len(povm)} elements on dim {povm.dim}, expected 2**{n} on 2**{n}"
        )
    u = tensor(list(unitaries))
    out = np.empty(2**n)
    for m in range(2**n):
        xi = ghz_basis_state(m, n)
        rotated = u @ povm.elements[m] @ u.conj().T
        out[m] = float((xi.conj() @ (rotated @ xi)).real)
    return out


def ppt_min_eig(m) -> float:
    """Minimum eigenvalue of the partial transpose of a two-qubit operator.

    Negative iff entangled (decisive in dimension 2x2).
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise InvalidInput(f"expected a 4x4 two-qubit operator, got shape {m.shape}")
    return float(herm_eigvals(partial_transpose(m, [2, 2], 1))[0])


def antipodality_gap(strategy: Strategy) -> float:
    """Distance of the messages from the pure-antipodal regime.

    Worst same-input overlap ``Tr(rho_0 rho_1)`` plus worst purity deficit
    ``1 - Tr(rho^2)``; zero iff every input's two messages are orthogonal
    pure states.
    """
    overlap = 0.0
    deficit = 0.0
    for st in strategy.senders:
        for x in range(2):
            overlap = max(overlap, float(np.trace(st.rho[0, x] @ st.rho[1, x]).real))
            for a in range(2):
                deficit = max(
                    deficit, 1 - float(np.trace(st.rho[a, x] @ st.rho[a, x]).real)
                )
    return overlap + deficit


@dataclass
class CertReport:
    """Outcome of a full certification run."""

    metric_value: float
    antipodality: float
    povm_traces: list
    alignment_err: float | None = None
    ghz_fidelities: list | None = None
    sos_residuals: list | None = None
    spectrum_diff: float | None = None
    ppt_min_eigs: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "metric_value": self.metric_value,
            "antipodality_gap": self.antipodality,
            "povm_traces": self.povm_traces,
            "alignment_error": self.alignment_err,
            "ghz_fidelities": self.ghz_fidelities,
            "sos_residuals": self.sos_residuals,
            "spectrum_diff": self.spectrum_diff,
            "ppt_min_eigs": self.ppt_min_eigs,
            "checks": dict(sorted(self.checks.items())),
            "passed": self.passed,
        }


def certify_strategy(strategy: Strategy, tolerances: dict | None = None) -> CertReport:
    """Run every certification check on a GHZ-task strategy."""
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise InvalidInput(f"unknown tolerance names: {sorted(unknown)}")
        tol.update(tolerances)
    strategy.validate()
    n = strategy.n
    metric = success_metric(strategy)
    gap = antipodality_gap(strategy)
    traces = [float(np.trace(m).real) for m in strategy.povm.elements]
    ops = a_operators(strategy)

    report = CertReport(
        metric_value=metric,
        antipodality=gap,
        povm_traces=traces,
        checks={
            "metric": abs(metric - 1) <= tol["metric"],
            "antipodality": gap <= tol["antipodality"],
            "unit_traces": max(abs(t - 1) for t in traces) <= tol["unit_trace"],
        },
    )

    if n == 2:
        report.ppt_min_eigs = [
            ppt_min_eig(m / np.trace(m).real) if np.trace(m).real > 1e-12 else 0.0
            for m in strategy.povm.elements
        ]
        # a genuine GHZ-basis measurement has all outcomes entangled,
        # decided by the partial transpose on two qubits
        report.checks["outcome_entanglement"] = max(report.ppt_min_eigs) < -tol["ppt"]

    aligned = None
    try:
        unitaries = align_locals(ops)
        report.alignment_err = alignment_error(ops, unitaries)
        report.checks["alignment"] = report.alignment_err <= tol["alignment"]
        fids = verify_ghz_measurement(strategy.povm, unitaries)
        report.ghz_fidelities = [float(f) for f in fids]
        report.checks["ghz_fidelity"] = min(fids) >= 1 - tol["ghz_fidelity"]
        aligned = np.stack(
            [
                np.stack([u @ ops[j, x] @ u.conj().T for x in range(2)])
                for j, u in enumerate(unitaries)
            ]
        )
    except NotSelfTestable:
        report.checks["alignment"] = False
        report.checks["ghz_fidelity"] = False

    try:
        report.sos_residuals = [float(sos_residual(n, m, ops)) for m in range(2**n)]
        report.checks["sos"] = max(report.sos_residuals) <= tol["sos_residual"]
    except PreconditionViolated:
        report.checks["sos"] = False

    if aligned is not None:
        ws = witness_operators(aligned)
        diff = 0.0
        for m in range(2**n):
            numeric = herm_eigvals(ws[m])
            diff = max(diff, float(np.abs(numeric - np.sort(spectrum_closed_form(n, m))).max()))
        report.spectrum_diff = diff
        report.checks["spectrum"] = diff <= tol["spectrum"]
    else:
        report.checks["spectrum"] = False

    return report
