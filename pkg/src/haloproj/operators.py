"""Quasi-nonexpansive operators and the subgradient projector.

An operator is any object with ``evaluate(x) -> Tx`` and ``describe()``.
The concrete classes below also record what is known about their fixed
point set, so callers (and tests) can check quasi-nonexpansiveness:

* ``fixed_point`` -- one known fixed point, or ``None``;
* ``fix_empty`` -- ``True`` when the fixed point set is known to be empty;
* ``dim`` -- the dimension the operator is defined on, ``None`` if any.
"""
import numpy as np

from .geometry import as_vector

ELL2_BOX = 10.0


class StationaryPointError(ArithmeticError):
    """f is positive at a point where its gradient vanishes."""


class Operator:
    """Base class; subclasses implement :meth:`evaluate`."""

    dim = None
    fixed_point = None
    fix_empty = False

    def evaluate(self, x):
        raise NotImplementedError

    def describe(self):
        return type(self).__name__

    def __call__(self, x):
        return self.evaluate(x)

    def __repr__(self):
        return f"<{self.describe()}>"


class Identity(Operator):
    def evaluate(self, x):
        return as_vector(x)

    def describe(self):
        return "identity"


class ContractionOperator(Operator):
    """``x -> alpha * x`` with ``0 <= alpha < 1``; the only fixed point is 0."""

    def __init__(self, alpha, dim=None):
        alpha = float(alpha)
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
        self.alpha = alpha
        self.dim = dim

    @property
    def fixed_point(self):
        return None if self.dim is None else np.zeros(self.dim)

    def evaluate(self, x):
        return as_vector(self.alpha * as_vector(x, self.dim))

    def describe(self):
        return f"contraction(alpha={self.alpha!r})"


class TranslationOperator(Operator):
    """``x -> x + alpha * direction``; nonexpansive without fixed points."""

    fix_empty = True

    def __init__(self, alpha, direction):
        alpha = float(alpha)
        if not alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        direction = as_vector(direction, name="direction")
        if abs(np.linalg.norm(direction) - 1.0) > 1e-12:
            raise ValueError("direction must have unit norm")
        self.alpha = alpha
        self.direction = direction
        self.dim = direction.shape[0]

    def evaluate(self, x):
        return as_vector(as_vector(x, self.dim) + self.alpha * self.direction)

    def describe(self):
        return f"translation(alpha={self.alpha!r}, direction={self.direction.tolist()})"


def step_sigma(x):
    """Sign selector with sigma(0) = +1 and sigma(1/2) = -1: +1 below 1/2, -1 from 1/2 on."""
    return 1.0 if float(x[0]) < 0.5 else -1.0


class SignOperator(Operator):
    """``x -> x + sigma(x)`` on the real line, ``sigma`` valued in {-1, +1}.

    Since ``x - Tx`` is always ``-1`` or ``+1`` there are no fixed points,
    which makes the operator trivially quasi-nonexpansive and fixed-point
    closed.
    """

    dim = 1
    fix_empty = True

    def __init__(self, sigma=step_sigma):
        self.sigma = sigma

    def evaluate(self, x):
        x = as_vector(x, 1)
        s = float(self.sigma(x))
        if s not in (-1.0, 1.0):
            raise ValueError(f"sigma must return -1 or +1, got {s}")
        return as_vector(x + s)

    def describe(self):
        name = "step" if self.sigma is step_sigma else getattr(self.sigma, "__name__", "custom")
        return f"sign(sigma={name})"


class SmoothConvexFunction:
    """A nonnegative convex differentiable function with its gradient."""

    dim = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError


class Ell2Example(SmoothConvexFunction):
    """``f(x) = sum_n n * x_n**(2n)`` over ``n = 1..dim``.

    The gradient is ``(2 n**2 x_n**(2n - 1))_n``. The only zero is the
    origin. Inputs must lie in the box ``[-10, 10]^dim``; larger
    coordinates raise ValueError rather than silently overflowing.
    """

    def __init__(self, dim):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self._n = np.arange(1, dim + 1, dtype=float)

    def _check(self, x):
        x = as_vector(x, self.dim)
        if np.max(np.abs(x)) > ELL2_BOX:
            i = int(np.argmax(np.abs(x)))
            raise ValueError(f"coordinate {i} = {x[i]!r} outside [-{ELL2_BOX}, {ELL2_BOX}]")
        return x

    def value(self, x):
        x = self._check(x)
        with np.errstate(over="raise"):
            try:
                return float(np.sum(self._n * x ** (2 * self._n)))
            except FloatingPointError:
                raise OverflowError(f"value overflow in dimension {self.dim}") from None

    def gradient(self, x):
        x = self._check(x)
        with np.errstate(over="raise"):
            try:
                return 2.0 * self._n**2 * x ** (2 * self._n - 1)
            except FloatingPointError:
                raise OverflowError(f"gradient overflow in dimension {self.dim}") from None


def ell2_example(dim):
    return Ell2Example(dim)


class SubgradientProjector(Operator):
    """Subgradient projector onto the level set ``{f <= 0}``.

    Points with ``f(x) <= 0`` are left in place; otherwise
    ``x - f(x) / ||g(x)||**2 * g(x)`` with ``g`` the gradient of ``f``.
    """

    def __init__(self, f, fixed_point=None):
        self.f = f
        self.dim = getattr(f, "dim", None)
        if fixed_point is None and isinstance(f, Ell2Example):
            fixed_point = np.zeros(f.dim)
        self.fixed_point = fixed_point

    def step(self, x):
        """Return ``(f(x), g(x))`` or ``(f(x), None)`` on the level set."""
        fx = self.f.value(x)
        if fx <= 0.0:
            return fx, None
        return fx, np.asarray(self.f.gradient(x), dtype=float)

    def evaluate(self, x):
        x = as_vector(x, self.dim)
        fx, g = self.step(x)
        if g is None:
            return x
        g2 = float(g @ g)
        if np.sqrt(g2) <= 1e-14:
            raise StationaryPointError("stationary point with positive value: the level set is empty near x")
        return as_vector(x - (fx / g2) * g)

    def describe(self):
        return f"subgradient_projector({type(self.f).__name__}, dim={self.dim})"


def subgradient_projector(f):
    return SubgradientProjector(f)


def contraction_operator(alpha, dim=None):
    return ContractionOperator(alpha, dim)


def translation_operator(alpha, direction=(1.0,)):
    return TranslationOperator(alpha, direction)


def sign_operator(sigma=step_sigma):
    return SignOperator(sigma)


def check_quasi_firm(T, x, y, tol=1e-9):
    """Whether ``||Tx - y||^2 + ||x - Tx||^2 <= ||x - y||^2 + tol``.

    ``y`` is assumed to be a fixed point of ``T``.
    """
    x = as_vector(x)
    y = as_vector(y, x.shape[0], "y")
    Tx = T.evaluate(x)
    lhs = np.sum((Tx - y) ** 2) + np.sum((x - Tx) ** 2)
    return bool(lhs <= np.sum((x - y) ** 2) + tol)


def check_quasi_nonexpansive(T, x, y, tol=1e-9):
    x = as_vector(x)
    y = as_vector(y, x.shape[0], "y")
    return bool(np.linalg.norm(T.evaluate(x) - y) <= np.linalg.norm(x - y) + tol)
