"""Tracking control: batch linear quadratic tracking and receding-horizon
stepping where states live on a manifold.

The manifold variant solves each window in the chart at the current state:
reference means enter through the log map, reference precisions are
parallel-transported into that chart, and only the first command of the
window solution is applied through the exponential map.
"""

import numpy as np
from scipy.linalg import block_diag, cho_factor, cho_solve

from .exceptions import DimensionMismatchError, SingularSystemError
from .manifolds import make_manifold
from .stats import regularize_covariance
from .validation import as_float_array, check_positive


class LinearSystem:
    """Time-varying linear dynamics x_{t+1} = A_t x_t + B_t u_t.

    Parameters
    ----------
    A : ndarray, shape (T-1, d, d)
    B : ndarray, shape (T-1, d, m)
    """

    def __init__(self, A, B):
        A = as_float_array(A, "A")
        B = as_float_array(B, "B")
        if A.ndim != 3 or B.ndim != 3:
            raise DimensionMismatchError("A and B must be stacks of matrices")
        if A.shape[0] != B.shape[0] or A.shape[0] < 1:
            raise DimensionMismatchError(
                f"need matching stacks of at least one step, got {A.shape[0]} A "
                f"and {B.shape[0]} B blocks"
            )
        if A.shape[1] != A.shape[2] or B.shape[1] != A.shape[1]:
            raise DimensionMismatchError(
                f"inconsistent block shapes A {A.shape[1:]}, B {B.shape[1:]}"
            )
        self.A = A
        self.B = B

    @classmethod
    def integrator(cls, dim, horizon, dt=0.1):
        """Single integrator: A = I, B = dt * I over the given horizon."""
        check_positive(dt, "dt")
        if horizon < 2:
            raise ValueError("horizon must be at least 2")
        A = np.tile(np.eye(dim), (horizon - 1, 1, 1))
        B = np.tile(dt * np.eye(dim), (horizon - 1, 1, 1))
        return cls(A, B)

    @property
    def horizon(self):
        return self.A.shape[0] + 1

    @property
    def state_dim(self):
        return self.A.shape[1]

    @property
    def input_dim(self):
        return self.B.shape[2]

    def prefix(self, horizon):
        """The first ``horizon`` states of this system."""
        if not 2 <= horizon <= self.horizon:
            raise ValueError(f"prefix horizon must be in [2, {self.horizon}]")
        return LinearSystem(self.A[: horizon - 1], self.B[: horizon - 1])

    def step(self, t, x, u):
        return self.A[t] @ x + self.B[t] @ u


class LqtWeights:
    """Per-step tracking precisions plus an isotropic control penalty.

    Q stacks one d x d precision per timestep; the control cost is r * I.
    """

    def __init__(self, Q, r):
        Q = as_float_array(Q, "Q")
        if Q.ndim != 3 or Q.shape[1] != Q.shape[2]:
            raise DimensionMismatchError("Q must be a stack of square matrices")
        self.Q = Q
        self.r = check_positive(r, "r")

    @property
    def horizon(self):
        return self.Q.shape[0]


def build_transfer(system):
    """Stack the rollout into x = S_x x_1 + S_u u.

    Block row t of S_x is the product A_{t-1} ... A_1; S_u is lower block
    triangular with entry (t, j) = A_{t-1} ... A_{j+1} B_j.
    """
    A, B = system.A, system.B
    T, d, m = system.horizon, system.state_dim, system.input_dim
    S_x = np.zeros((T * d, d))
    S_u = np.zeros((T * d, (T - 1) * m))
    S_x[:d] = np.eye(d)
    for t in range(1, T):
        rows = slice(t * d, (t + 1) * d)
        prev = slice((t - 1) * d, t * d)
        S_x[rows] = A[t - 1] @ S_x[prev]
        S_u[rows, : (t - 1) * m] = A[t - 1] @ S_u[prev, : (t - 1) * m]
        S_u[rows, (t - 1) * m : t * m] = B[t - 1]
    return S_x, S_u


def _assemble(system, weights, mu, x1):
    T, d = system.horizon, system.state_dim
    mu = as_float_array(mu, "mu").reshape(-1)
    x1 = as_float_array(x1, "x1")
    if mu.shape[0] != T * d:
        raise DimensionMismatchError(
            f"reference must stack {T} states of dimension {d}, got {mu.shape[0]}"
        )
    if x1.shape != (d,):
        raise DimensionMismatchError(f"x1 must have shape ({d},), got {x1.shape}")
    if weights.horizon != T or weights.Q.shape[1] != d:
        raise DimensionMismatchError(
            f"weights cover {weights.horizon} states of dim {weights.Q.shape[1]}, "
            f"system has {T} of dim {d}"
        )
    return mu, x1


def lqt_solve(system, weights, mu, x1):
    """Batch tracking solution u = (S_u' Q S_u + R)^-1 S_u' Q (mu - S_x x1)."""
    mu, x1 = _assemble(system, weights, mu, x1)
    S_x, S_u = build_transfer(system)
    Q = block_diag(*weights.Q)
    H = S_u.T @ Q @ S_u + weights.r * np.eye(S_u.shape[1])
    try:
        factor = cho_factor(H, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("control Hessian is not positive definite") from exc
    return cho_solve(factor, S_u.T @ (Q @ (mu - S_x @ x1)))


def lqt_objective(system, weights, mu, x1, u):
    """Tracking cost (mu - x)' Q (mu - x) + r u'u of a command sequence."""
    mu, x1 = _assemble(system, weights, mu, x1)
    S_x, S_u = build_transfer(system)
    err = mu - (S_x @ x1 + S_u @ np.asarray(u, dtype=float))
    Q = block_diag(*weights.Q)
    return float(err @ Q @ err + weights.r * np.dot(u, u))


class StepwiseReference:
    """Per-timestep viapoints drawn from mixture components.

    ``sequence[t]`` names the component whose mean and precision act as the
    tracking target at step t.  Past the end of the sequence the final
    component keeps serving as the target (the hold policy), unless a caller
    asks for the truncated view.
    """

    def __init__(self, gmm, sequence, precisions=None):
        sequence = np.asarray(sequence, dtype=int)
        if sequence.ndim != 1 or sequence.size < 1:
            raise DimensionMismatchError("sequence must be a non-empty 1-d index list")
        if np.any(sequence < 0) or np.any(sequence >= gmm.n_components):
            raise ValueError(
                f"sequence entries must name components 0..{gmm.n_components - 1}"
            )
        self.gmm = gmm
        self.sequence = sequence
        self._precisions = {}
        if precisions is not None:
            if len(precisions) != gmm.n_components:
                raise DimensionMismatchError(
                    "precision overrides must cover every component"
                )
            dim = gmm.manifold.dim
            for k, P in enumerate(precisions):
                P = as_float_array(P, f"precisions[{k}]")
                if P.shape != (dim, dim):
                    raise DimensionMismatchError(
                        f"precisions[{k}] must have shape ({dim}, {dim})"
                    )
                self._precisions[k] = 0.5 * (P + P.T)

    @classmethod
    def equal_segments(cls, gmm, horizon):
        """Split the horizon into one contiguous segment per component."""
        if horizon < gmm.n_components:
            raise ValueError("horizon shorter than the number of components")
        seq = np.empty(horizon, dtype=int)
        for k, chunk in enumerate(np.array_split(np.arange(horizon), gmm.n_components)):
            seq[chunk] = k
        return cls(gmm, seq)

    @property
    def horizon(self):
        return self.sequence.shape[0]

    def component(self, t, hold=True):
        if t < self.horizon:
            return int(self.sequence[t])
        if hold:
            return int(self.sequence[-1])
        raise ValueError(f"step {t} is past the reference horizon {self.horizon}")

    def mean(self, k):
        return self.gmm.components[k].mean

    def precision(self, k):
        """Inverse of the (regularized) component covariance, cached."""
        if k not in self._precisions:
            cov = regularize_covariance(self.gmm.components[k].cov)
            factor = cho_factor(cov, lower=True)
            P = cho_solve(factor, np.eye(cov.shape[0]))
            self._precisions[k] = 0.5 * (P + P.T)
        return self._precisions[k]

    def window_components(self, start, length, hold=True):
        if not hold:
            length = min(length, self.horizon - start)
        return [self.component(start + j, hold=hold) for j in range(length)]


def riemannian_mpc_step(
    manifold, x, reference, system, r, window=None, start=0, hold=True
):
    """One receding-horizon update of a manifold-valued state.

    Solves the window's tracking problem in the chart at ``x``: the stacked
    reference is log(x, mean_t) and each precision is parallel-transported
    from its component mean into that chart.  The chart state is the origin,
    so only the forced response enters the solve.  Applies the first command
    through the exponential map and returns (next state, full command stack).
    """
    manifold = make_manifold(manifold)
    x = as_float_array(x, "x")
    if window is None:
        window = max(reference.horizon - start, 2)
    slots = reference.window_components(start, window, hold=hold)
    if len(slots) < 2:
        raise ValueError("window must cover at least two states")
    if system.horizon < len(slots):
        raise DimensionMismatchError(
            f"system covers {system.horizon} states, window needs {len(slots)}"
        )
    sub = system.prefix(len(slots))

    mu = np.concatenate([manifold.log_coords(x, reference.mean(s)) for s in slots])
    Q = np.stack(
        [
            manifold.transport_cov(reference.mean(s), x, reference.precision(s))
            for s in slots
        ]
    )
    u_hat = lqt_solve(sub, LqtWeights(Q, r), mu, np.zeros(manifold.dim))
    m = sub.input_dim
    x_next = manifold.exp_coords(x, sub.B[0] @ u_hat[:m])
    return x_next, u_hat


def mpc_rollout(
    manifold, start_point, reference, system, r, window, steps, hold=True
):
    """Closed-loop rollout: re-solve the window at each step, apply the
    first command, move the window one slot forward.

    With ``hold=False`` the window truncates at the reference horizon
    instead of holding the final target, so ``steps`` may not exceed
    ``reference.horizon - 1``.
    """
    manifold = make_manifold(manifold)
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if not hold and steps > reference.horizon - 1:
        raise ValueError(
            f"a truncating window supports at most {reference.horizon - 1} steps"
        )
    x = as_float_array(start_point, "start_point").copy()
    manifold.check_point(x)
    trajectory = [x]
    commands = []
    for t in range(steps):
        x, u_hat = riemannian_mpc_step(
            manifold, x, reference, system, r, window=window, start=t, hold=hold
        )
        trajectory.append(x)
        commands.append(u_hat[: system.input_dim])
    return np.stack(trajectory), np.stack(commands)
