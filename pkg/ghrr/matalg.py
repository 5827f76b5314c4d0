"""
Dense small complex matrix kernel.

Matrices are ``numpy`` complex128 arrays of shape ``(m, m)``; every function here also
accepts stacks of shape ``(..., m, m)`` so the hypervector algebra can work on all D
elements at once. Randomness always comes from an explicit ``numpy.random.Generator``.
"""

from dataclasses import dataclass

import numpy as np

from ghrr.exceptions import (ConvergenceError, GHRRError, InvalidDistributionError, NotHermitianError,
                             ShapeMismatchError)
from ghrr.log import console

UNITARY_TOL = 1e-10

SAMPLING_MODES = ('haar', 'hermitian-exp')


def as_matrix(a):
    """Coerce to a complex128 array and check the trailing two axes are square."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ShapeMismatchError('Expected square matrices, got shape {0}'.format(a.shape))
    return a


def matmul(a, b):
    """Matrix product; stacks multiply pairwise."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[-1] != b.shape[-1]:
        raise ShapeMismatchError('Cannot multiply {0}x{0} by {1}x{1} matrices'.format(a.shape[-1], b.shape[-1]))
    return np.matmul(a, b)


def dagger(a):
    """Conjugate transpose."""
    a = as_matrix(a)
    return np.conj(np.swapaxes(a, -1, -2))


def trace_re(a):
    """Real part of the trace."""
    a = as_matrix(a)
    result = np.trace(a, axis1=-2, axis2=-1).real
    return float(result) if np.ndim(result) == 0 else result


def hermitian_part(x):
    """(X + X^dagger) / 2."""
    x = as_matrix(x)
    return (x + dagger(x)) / 2


def is_hermitian(a, tol=UNITARY_TOL):
    a = as_matrix(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def is_unitary(a, tol=UNITARY_TOL):
    """Whether ``max|A A^dagger - I| <= tol`` for every matrix in the stack."""
    a = as_matrix(a)
    deviation = np.matmul(a, dagger(a)) - np.eye(a.shape[-1])
    return bool(np.max(np.abs(deviation), initial=0.0) <= tol)


def unitary_exp(h):
    """
    exp(i h) for Hermitian h, through the eigendecomposition h = V diag(theta) V^dagger.

    The result V diag(e^{i theta}) V^dagger is unitary up to the accuracy of V.
    """
    h = as_matrix(h)
    if not is_hermitian(h):
        raise NotHermitianError('unitary_exp needs a Hermitian generator')

    theta, v = np.linalg.eigh(h)
    phases = np.exp(1j * theta)
    return np.matmul(v * phases[..., np.newaxis, :], dagger(v))


def sample_ginibre(m, rng, size=None):
    """Matrices with independent entries a + bi, a and b standard normal."""
    shape = (m, m) if size is None else (size, m, m)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def sample_unitaries(m, count, mode, rng):
    """
    Stack of ``count`` random m x m unitaries.

    ``haar``: QR of a complex Ginibre matrix, with column k of Q rescaled by the phase of
    R[k, k] so the factorization is unique and Q is exactly Haar distributed.
    ``hermitian-exp``: exp(i (X + X^dagger)/2) for a Ginibre X.
    """
    if m < 1:
        raise ShapeMismatchError('Matrix dimension must be at least 1, got {0}'.format(m))
    if mode not in SAMPLING_MODES:
        raise GHRRError('Unknown unitary sampling mode "{0}". Valid modes are: {1}'.format(
            mode, ', '.join(SAMPLING_MODES)))

    z = sample_ginibre(m, rng, size=count)
    if mode == 'hermitian-exp':
        return unitary_exp(hermitian_part(z))

    q, r = np.linalg.qr(z / np.sqrt(2))
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., np.newaxis, :]


def sample_unitary(m, mode, rng):
    """A single random unitary; see :func:`sample_unitaries`."""
    return sample_unitaries(m, 1, mode, rng)[0]


def permutation_matrix(perm):
    """Unitary 0/1 matrix P with P[k, perm[k]] = 1."""
    perm = np.asarray(perm, dtype=int)
    m = len(perm)
    if sorted(perm.tolist()) != list(range(m)):
        raise GHRRError('{0} is not a permutation of 0..{1}'.format(perm.tolist(), m - 1))
    p = np.zeros((m, m), dtype=np.complex128)
    p[np.arange(m), perm] = 1
    return p


def diagonality(q):
    """sum_j |Q_jj| / sum_jk |Q_jk|, in [0, 1]."""
    q = as_matrix(q)
    magnitudes = np.abs(q)
    total = magnitudes.sum(axis=(-2, -1))
    if np.any(total == 0):
        raise GHRRError('Diagonality is undefined for the zero matrix')
    result = np.trace(magnitudes, axis1=-2, axis2=-1) / total
    return float(result) if np.ndim(result) == 0 else result


@dataclass(frozen=True)
class AngleDistribution(object):
    """
    Distribution of the diagonal phase angles theta.

    ``uniform`` is uniform on [low, high) where high - low must be a positive multiple of
    2 pi; ``roots`` picks uniformly among the ``order``-th roots of unity. Both give
    E[e^{i theta}] = 0, which quasi-orthogonality relies on.
    """

    kind: str = 'uniform'
    low: float = 0.0
    high: float = 2 * np.pi
    order: int = 0

    def __post_init__(self):
        if self.kind == 'uniform':
            if self.high <= self.low:
                raise InvalidDistributionError('Empty angle interval [{0}, {1})'.format(self.low, self.high))
        elif self.kind == 'roots':
            if self.order < 2:
                raise InvalidDistributionError('Roots of unity need an order of at least 2')
        else:
            raise InvalidDistributionError('Unknown angle distribution "{0}"'.format(self.kind))

        if abs(self.mean_phasor()) > 1e-12:
            raise InvalidDistributionError(
                'Angle distribution {0} has E[exp(i theta)] = {1:.3g}, not zero'.format(
                    self.describe(), self.mean_phasor()))

    @classmethod
    def parse(cls, descriptor):
        """
        Build from a descriptor string: ``uniform``, ``uniform:LOW:HIGH`` or ``roots:K``.
        """
        if isinstance(descriptor, cls):
            return descriptor
        parts = (descriptor or 'uniform').split(':')
        try:
            if parts[0] == 'uniform' and len(parts) == 1:
                return cls()
            if parts[0] == 'uniform' and len(parts) == 3:
                return cls(kind='uniform', low=float(parts[1]), high=float(parts[2]))
            if parts[0] == 'roots' and len(parts) == 2:
                return cls(kind='roots', order=int(parts[1]))
        except ValueError:
            pass
        raise InvalidDistributionError('Invalid angle distribution descriptor "{0}"'.format(descriptor))

    def describe(self):
        if self.kind == 'roots':
            return 'roots:{0}'.format(self.order)
        if self.low == 0.0 and self.high == 2 * np.pi:
            return 'uniform'
        return 'uniform:{0!r}:{1!r}'.format(self.low, self.high)

    def mean_phasor(self):
        """Analytic E[e^{i theta}]."""
        if self.kind == 'roots':
            return complex(np.exp(2j * np.pi * np.arange(self.order) / self.order).mean())
        return complex((np.exp(1j * self.high) - np.exp(1j * self.low)) / (1j * (self.high - self.low)))

    def sample(self, rng, size):
        if self.kind == 'roots':
            return 2 * np.pi * rng.integers(0, self.order, size=size) / self.order
        return rng.uniform(self.low, self.high, size=size)


@dataclass(frozen=True)
class DiagonalPhases(object):
    """diag(e^{i theta_1}, ..., e^{i theta_m}) stored as its angles."""

    angles: np.ndarray

    @property
    def dim(self):
        return len(self.angles)

    def phasors(self):
        return np.exp(1j * np.asarray(self.angles, dtype=float))

    def matrix(self):
        return np.diag(self.phasors())


def random_phases(m, rng, dist=None):
    dist = AngleDistribution.parse(dist)
    return DiagonalPhases(angles=dist.sample(rng, m))


def _params_to_unitaries(params, m):
    """Map stacked real parameter vectors (2 m^2 each) to exp(i H(X))."""
    size = m * m
    x = params[..., :size] + 1j * params[..., size:]
    x = x.reshape(params.shape[:-1] + (m, m))
    return unitary_exp(hermitian_part(x))


STALL_WINDOW = 200
STALL_RATIO = 0.9
MIN_LEARNING_RATE = 1e-12


def optimize_diagonality(m, target, tol=0.02, max_iters=2000, rng=None, start=None,
                         step=1e-5, learning_rate=0.1, logger=None):
    """
    Find a unitary Q = exp(i H(X)) whose diagonality is within ``tol`` of ``target``.

    Plain gradient descent on the 2 m^2 real parameters of X, minimizing
    (diagonality(Q) - target)^2. The gradient is taken by central differences with step
    ``step``; all perturbed parameter vectors go through one stacked eigendecomposition.
    An accepted step grows the learning rate by 20%; a step that does not lower the
    objective is rejected and the learning rate halved.

    A descent stalls when the learning rate drops below 1e-12 or the objective shrinks by
    less than 10% over 200 iterations. It then restarts from a fresh Ginibre X scaled by a
    random factor in [0.05, 2) with the initial learning rate, until ``max_iters``
    iterations have been spent in total.

    Raises ConvergenceError with the best iterate in ``extra`` when ``max_iters`` runs out.
    """
    logger = logger or console
    if not 0.0 <= target <= 1.0:
        raise GHRRError('Diagonality target must be in [0, 1], got {0}'.format(target))
    if m < 1:
        raise ShapeMismatchError('Matrix dimension must be at least 1, got {0}'.format(m))
    if m == 1 and target < 1.0 - tol:
        raise GHRRError('Every 1x1 unitary has diagonality 1; target {0} is unreachable'.format(target))

    rng = rng if rng is not None else np.random.default_rng()
    x0 = sample_ginibre(m, rng) if start is None else as_matrix(start)
    n_params = 2 * m * m
    offsets = np.concatenate([np.eye(n_params), -np.eye(n_params)]) * step

    def evaluate(stack):
        q = _params_to_unitaries(stack, m)
        d = diagonality(q)
        return (d - target) ** 2, d, q

    best_q, best_achieved = None, None
    iterations, restarts = 0, 0
    while True:
        params = np.concatenate([x0.real.ravel(), x0.imag.ravel()])
        rate = learning_rate
        objective, achieved, q = evaluate(params[np.newaxis, :])
        objective, achieved, q = float(objective[0]), float(achieved[0]), q[0]
        checkpoint_iteration, checkpoint_objective = iterations, objective

        while True:
            if best_achieved is None or abs(achieved - target) < abs(best_achieved - target):
                best_q, best_achieved = q, achieved
            if abs(achieved - target) <= tol:
                logger.debug('Diagonality {0:.4f} reached target {1} after {2} iterations and {3} restarts'.format(
                    achieved, target, iterations, restarts))
                return q
            if iterations >= max_iters:
                raise ConvergenceError(
                    'Diagonality optimizer stopped at {0:.4f} for target {1} (tolerance {2})'.format(
                        best_achieved, target, tol),
                    extra={'best': best_q, 'diagonality': best_achieved, 'iterations': iterations,
                           'restarts': restarts})
            iterations += 1

            values, _, _ = evaluate(params + offsets)
            gradient = (values[:n_params] - values[n_params:]) / (2 * step)

            candidate = params - rate * gradient
            c_objective, c_achieved, c_q = evaluate(candidate[np.newaxis, :])
            if c_objective[0] < objective:
                params = candidate
                objective, achieved, q = float(c_objective[0]), float(c_achieved[0]), c_q[0]
                rate *= 1.2
            else:
                rate /= 2
                if rate < MIN_LEARNING_RATE:
                    break

            if iterations - checkpoint_iteration >= STALL_WINDOW:
                if objective > STALL_RATIO * checkpoint_objective:
                    break
                checkpoint_iteration, checkpoint_objective = iterations, objective

            if iterations % 100 == 0:
                logger.debug('Diagonality optimizer iteration {0}: diagonality {1:.4f}, learning rate {2:g}'.format(
                    iterations, achieved, rate))

        restarts += 1
        logger.debug('Diagonality optimizer stalled at {0:.4f} for target {1}; restart {2}'.format(
            achieved, target, restarts))
        x0 = sample_ginibre(m, rng) * rng.uniform(0.05, 2.0)
