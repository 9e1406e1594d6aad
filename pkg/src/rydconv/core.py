"""Five-level ladder model and its steady-state master-equation solution.

Level ordering (fixed, used as array indices everywhere)::

    0  g   5S1/2
    1  e   5P3/2
    2  r1  55D5/2
    3  r2  54F7/2
    4  s   5D5/2

Sign convention: a detuning is laser frequency minus transition frequency, so
red detuning is negative.  In the rotating frame the level energies are
``-delta_k`` with cumulative detunings ``delta_e = dp``, ``delta_r1 = dp + dc``,
``delta_r2 = dp + dc + dmw`` and ``delta_s = delta_r2 - dd`` (the decoupling
field drives the downward r2 -> s transition).  A velocity class ``v`` along z
sees every detuning shifted to ``delta_n - k_n * v`` with signed ``k_n``.

Density matrices are vectorised row-major (``rho.reshape(-1)``), so that
``vec(A rho B) = kron(A, B.T) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConverterConfig

G, E, R1, R2, S = range(5)
N_LEVELS = 5
_DIM = N_LEVELS * N_LEVELS
_TRACE_IDX = np.arange(N_LEVELS) * (N_LEVELS + 1)


@dataclass(frozen=True)
class LevelScheme:
    labels: tuple = ("5S1/2", "5P3/2", "55D5/2", "54F7/2", "5D5/2")
    names: tuple = ("g", "e", "r1", "r2", "s")
    # (lower, upper, name); the decoupling transition is driven downward r2 -> s
    driven: tuple = ((G, E, "probe"), (E, R1, "coupling"), (R1, R2, "mw"), (S, R2, "decoupling"))
    emission: tuple = ((E, S, "signal"),)


LEVEL_SCHEME = LevelScheme()


class SingularLiouvillian(np.linalg.LinAlgError):
    """The steady state is not unique (null space dimension != 1)."""

    def __init__(self, message, node=None, null_dim=None):
        super().__init__(message)
        self.node = node
        self.null_dim = null_dim


def hamiltonian(rabi, detunings) -> np.ndarray:
    """Rotating-frame ladder Hamiltonian (units of rad/s, hbar = 1).

    Parameters
    ----------
    rabi : sequence of 4 (array_like, possibly complex)
        Rabi frequencies of the probe, coupling, MW and decoupling fields.
    detunings : sequence of 4 array_like
        Doppler-shifted field detunings in the same order.

    All entries broadcast against each other; the result has shape
    ``broadcast_shape + (5, 5)``.
    """
    dp, dc, dm, dd = (np.asarray(d, dtype=float) for d in detunings)
    op, oc, om, od = (np.asarray(o) for o in rabi)
    shape = np.broadcast_shapes(dp.shape, dc.shape, dm.shape, dd.shape, op.shape, oc.shape, om.shape, od.shape)
    H = np.zeros(shape + (N_LEVELS, N_LEVELS), dtype=complex)
    d_e = dp
    d_r1 = d_e + dc
    d_r2 = d_r1 + dm
    d_s = d_r2 - dd
    H[..., E, E] = -d_e
    H[..., R1, R1] = -d_r1
    H[..., R2, R2] = -d_r2
    H[..., S, S] = -d_s
    for (lo, hi, _), om_n in zip(LEVEL_SCHEME.driven, (op, oc, om, od)):
        H[..., lo, hi] = om_n / 2
        H[..., hi, lo] = np.conj(om_n) / 2
    return H


def doppler_detunings(config: ConverterConfig, velocity=0.0):
    """Field detunings seen by atoms moving at ``velocity`` (m/s) along z."""
    v = np.asarray(velocity, dtype=float)
    return (
        config.detuning_probe - config.wavevector_probe * v,
        config.detuning_coupling - config.wavevector_coupling * v,
        config.detuning_mw - config.wavevector_mw * v,
        config.detuning_decoupling - config.wavevector_decoupling * v,
    )


def build_hamiltonian(config: ConverterConfig, velocity=0.0, optical_scale=1.0) -> np.ndarray:
    """Hamiltonian for one velocity class.

    ``optical_scale`` multiplies the three optical Rabi frequencies (used for
    the transverse beam profile); the MW amplitude is uniform.
    """
    a = np.asarray(optical_scale, dtype=float)
    rabi = (config.rabi_probe * a, config.rabi_coupling * a, config.rabi_mw, config.rabi_decoupling * a)
    return hamiltonian(rabi, doppler_detunings(config, velocity))


def level_energies(config: ConverterConfig, velocity=0.0) -> np.ndarray:
    """Rotating-frame level energies (Hamiltonian diagonal), shape (..., 5)."""
    zero = (0.0, 0.0, 0.0, 0.0)
    H = hamiltonian(zero, doppler_detunings(config, velocity))
    return np.diagonal(H, axis1=-2, axis2=-1).real.copy()


def coupling_matrix(config: ConverterConfig, optical_scale=1.0) -> np.ndarray:
    """Off-diagonal (field) part of the Hamiltonian, shape (..., 5, 5)."""
    a = np.asarray(optical_scale, dtype=float)
    rabi = (config.rabi_probe * a, config.rabi_coupling * a, config.rabi_mw, config.rabi_decoupling * a)
    return hamiltonian(rabi, (0.0, 0.0, 0.0, 0.0))


def _ket_bra(i, j):
    op = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    op[i, j] = 1.0
    return op


def build_jump_operators(config: ConverterConfig) -> list[np.ndarray]:
    """Weighted jump operators (``sqrt(rate) * |to><from|``); zero rates are dropped."""
    channels = [
        (config.decay_e, G, E),
        (config.decay_r1, E, R1),
        (config.decay_r2, R1, R2),
        (config.decay_s, E, S),
    ]
    # transit: every state is replaced by a fresh ground-state atom
    channels += [(config.transit_rate, G, k) for k in range(N_LEVELS)]
    channels += [(config.dephasing_rate, k, k) for k in (E, R1, R2, S)]
    return [np.sqrt(rate) * _ket_bra(to, frm) for rate, to, frm in channels if rate > 0]


def dissipator(jumps) -> np.ndarray:
    """Superoperator of the Lindblad dissipator, shape (25, 25)."""
    eye = np.eye(N_LEVELS)
    D = np.zeros((_DIM, _DIM), dtype=complex)
    for J in jumps:
        JdJ = J.conj().T @ J
        D += np.kron(J, J.conj()) - 0.5 * np.kron(JdJ, eye) - 0.5 * np.kron(eye, JdJ.T)
    return D


def hamiltonian_superop(H) -> np.ndarray:
    """``-i[H, .]`` as a (..., 25, 25) superoperator."""
    H = np.asarray(H)
    eye = np.eye(N_LEVELS)
    left = np.einsum("...ij,kl->...ikjl", H, eye)
    right = np.einsum("ij,...lk->...ikjl", eye, H)
    return (-1j * (left - right)).reshape(H.shape[:-2] + (_DIM, _DIM))


def liouvillian(H, jumps) -> np.ndarray:
    return hamiltonian_superop(H) + dissipator(jumps)


def lindblad_rhs(H, jumps, rho) -> np.ndarray:
    """Direct matrix form of the master-equation right-hand side (for checks)."""
    out = -1j * (H @ rho - rho @ H)
    for J in jumps:
        Jd = J.conj().T
        out += J @ rho @ Jd - 0.5 * (Jd @ J @ rho + rho @ Jd @ J)
    return out


def null_space_dim(L, tol=1e-8) -> int:
    s = np.linalg.svd(L, compute_uv=False)
    return int(np.sum(s <= tol * s[0]))


def _solve_with_trace(L):
    """Solve ``L x = 0`` with ``Tr rho = 1`` replacing the ground-population row."""
    A = np.array(L, dtype=complex, copy=True)
    A[..., 0, :] = 0.0
    A[..., 0, _TRACE_IDX] = 1.0
    b = np.zeros(A.shape[:-1], dtype=complex)
    b[..., 0] = 1.0
    x = np.linalg.solve(A, b[..., None])[..., 0]
    return x.reshape(L.shape[:-2] + (N_LEVELS, N_LEVELS))


def _clean(rho):
    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    tr = np.trace(rho, axis1=-2, axis2=-1).real
    return rho / tr[..., None, None]


def steady_state(H, jumps, tol=1e-8) -> np.ndarray:
    """Unique steady state of the master equation for a single Hamiltonian.

    Raises
    ------
    SingularLiouvillian
        If the Liouvillian null space is not one-dimensional at ``tol``
        (relative to the largest singular value).
    """
    L = liouvillian(H, jumps)
    dim = null_space_dim(L, tol)
    if dim != 1:
        raise SingularLiouvillian(f"Liouvillian null space has dimension {dim}", null_dim=dim)
    return _clean(_solve_with_trace(L))


def steady_state_batch(H, jumps, D=None) -> np.ndarray:
    """Steady states for a stack of Hamiltonians of shape (..., 5, 5).

    The per-node singular-value check is skipped for speed; instead every
    solution is screened for non-physical entries and offending nodes are
    re-examined with :func:`steady_state`, whose error carries the node index.
    """
    if D is None:
        D = dissipator(jumps)
    H = np.asarray(H)
    L = hamiltonian_superop(H) + D
    try:
        rho = _clean(_solve_with_trace(L))
        bad = ~np.all(np.isfinite(rho), axis=(-2, -1)) | (np.abs(rho).max(axis=(-2, -1)) > 1 + 1e-6)
    except np.linalg.LinAlgError:
        rho, bad = None, np.ones(H.shape[:-2], dtype=bool)
    if np.any(bad):
        flat = H.reshape(-1, N_LEVELS, N_LEVELS)
        for idx in map(int, np.flatnonzero(bad.reshape(-1))):
            try:
                steady_state(flat[idx], jumps)
            except SingularLiouvillian as exc:
                node = np.unravel_index(idx, H.shape[:-2])
                raise SingularLiouvillian(f"{exc} at node {node}", node=node, null_dim=exc.null_dim) from None
        raise SingularLiouvillian("ill-conditioned steady state", node=None)
    return rho


def steady_state_grid(H_coupling, energies, jumps) -> np.ndarray:
    """Steady states for every pair of coupling matrix and level-energy vector.

    ``H_coupling`` has shape (nA, 5, 5) and holds the off-diagonal (field)
    part; ``energies`` has shape (nB, 5) and holds the rotating-frame level
    energies (the Hamiltonian diagonal).  The result has shape (nA, nB, 5, 5).
    Equivalent to :func:`steady_state_batch` on the full grid of
    Hamiltonians, but the superoperator is assembled once per coupling row.
    """
    H_coupling = np.asarray(H_coupling, dtype=complex)
    energies = np.asarray(energies, dtype=float)
    D = dissipator(jumps)
    base = hamiltonian_superop(H_coupling) + D
    # -i[diag(E), .] is diagonal in the vectorised basis: -i (E_i - E_j)
    diag = -1j * (energies[:, :, None] - energies[:, None, :]).reshape(len(energies), _DIM)
    L = np.repeat(base[:, None], len(energies), axis=1)
    idx = np.arange(_DIM)
    L[..., idx, idx] += diag[None, :, :]
    try:
        rho = _clean(_solve_with_trace(L))
        bad = ~np.all(np.isfinite(rho), axis=(-2, -1)) | (np.abs(rho).max(axis=(-2, -1)) > 1 + 1e-6)
    except np.linalg.LinAlgError:
        rho, bad = None, np.ones(L.shape[:2], dtype=bool)
    if np.any(bad):
        for ia, ib in zip(*np.nonzero(bad)):
            H = H_coupling[ia] + np.diag(energies[ib])
            try:
                steady_state(H, jumps)
            except SingularLiouvillian as exc:
                raise SingularLiouvillian(f"{exc} at node {(int(ia), int(ib))}",
                                          node=(int(ia), int(ib)), null_dim=exc.null_dim) from None
        raise SingularLiouvillian("ill-conditioned steady state", node=None)
    return rho


def residual(H, jumps, rho) -> float:
    """Relative residual ``|L rho| / (|L| |rho|)`` (Frobenius norms)."""
    L = liouvillian(H, jumps)
    r = L @ rho.reshape(-1)
    return float(np.linalg.norm(r) / (np.linalg.norm(L) * np.linalg.norm(rho)))


def check_density_matrix(rho, atol=1e-12, psd_tol=1e-10) -> None:
    """Raise ``ValueError`` if ``rho`` violates trace, hermiticity or positivity."""
    rho = np.asarray(rho)
    if rho.shape != (N_LEVELS, N_LEVELS):
        raise ValueError(f"expected a 5x5 matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -psd_tol:
        raise ValueError("density matrix has negative eigenvalues")


def signal_coherence(rho):
    """Optical coherence on the signal transition, ``Tr(|s><e| rho) = rho[e, s]``."""
    return np.asarray(rho)[..., E, S]


def eit_signal(rho):
    """Probe absorption, ``Im rho[g, e]``.

    With the ``+Omega/2`` coupling convention used here this equals
    ``-Im Tr(|g><e| rho)`` and is positive for an absorbing medium.
    """
    return np.asarray(rho)[..., G, E].imag


def solve(config: ConverterConfig, velocity=0.0) -> np.ndarray:
    """Convenience: steady state of one velocity class with on-axis fields."""
    return steady_state(build_hamiltonian(config, velocity), build_jump_operators(config))
