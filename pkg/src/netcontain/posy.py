"""Monomial/posynomial algebra and the log-scale view used by the solver.

A monomial is ``d * prod(x_i ** a_i)`` with ``d > 0``; a posynomial is a
nonempty sum of monomials.  Under ``y = log x`` a posynomial becomes a
log-sum-exp of affine functions, hence convex; :func:`log_eval`,
:func:`log_grad` and :func:`log_hess` give that convex view with
max-shifted exponentials so realistic coefficient scales cannot overflow.

Exponent maps are sparse dicts keyed by opaque integer variable ids handed
out by :class:`VariableRegistry`.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Monomial",
    "Posynomial",
    "VariableRegistry",
    "GpProgram",
    "monomial",
    "constant",
    "variable",
    "evaluate",
    "mul",
    "div",
    "add",
    "log_eval",
    "log_grad",
    "log_hess",
    "CompiledPosynomial",
    "compile_posynomial",
    "substitute_var",
]


@dataclass(frozen=True)
class Monomial:
    """coeff * prod(x_v ** exponents[v]); coeff strictly positive."""

    coeff: float
    exponents: tuple  # sorted ((var_id, exp), ...), zero exponents dropped

    def __post_init__(self):
        if not (np.isfinite(self.coeff) and self.coeff > 0):
            raise ValueError(f"monomial coefficient must be positive, got {self.coeff}")
        cleaned = tuple(sorted((int(v), float(a)) for v, a in self.exponents if a != 0))
        object.__setattr__(self, "exponents", cleaned)

    def exponent_dict(self):
        return dict(self.exponents)


@dataclass(frozen=True)
class Posynomial:
    """Nonempty sum of monomials."""

    terms: tuple

    def __post_init__(self):
        if len(self.terms) == 0:
            raise ValueError("posynomial needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))

    def variables(self):
        out = set()
        for t in self.terms:
            out.update(v for v, _ in t.exponents)
        return out


def monomial(coeff, exponents=None):
    return Monomial(float(coeff), tuple((exponents or {}).items()))


def constant(value):
    return Posynomial((monomial(value),))


def variable(var_id, coeff=1.0, power=1.0):
    return Posynomial((monomial(coeff, {var_id: power}),))


class VariableRegistry:
    """Hands out dense integer ids for named decision variables."""

    def __init__(self):
        self._names = []
        self._ids = {}

    def fresh(self, name):
        if name in self._ids:
            raise ValueError(f"variable {name!r} already registered")
        vid = len(self._names)
        self._names.append(name)
        self._ids[name] = vid
        return vid

    def id_of(self, name):
        return self._ids[name]

    def name_of(self, vid):
        return self._names[vid]

    @property
    def names(self):
        return tuple(self._names)

    def __len__(self):
        return len(self._names)


@dataclass(frozen=True)
class GpProgram:
    """Minimize a posynomial subject to posynomial <= 1 and monomial == 1.

    Every variable referenced by the objective or a constraint must be
    registered; the registry defines the coordinate order used by the
    solver.
    """

    objective: Posynomial
    inequalities: tuple
    equalities: tuple  # Monomials, each meaning h(x) == 1
    registry: VariableRegistry

    def __post_init__(self):
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        if len(self.registry) == 0:
            raise ValueError("program has no variables")
        nv = len(self.registry)
        referenced = set(self.objective.variables())
        for q in self.inequalities:
            referenced.update(q.variables())
        for h in self.equalities:
            referenced.update(v for v, _ in h.exponents)
        bad = [v for v in referenced if not (0 <= v < nv)]
        if bad:
            raise ValueError(f"unregistered variable ids {bad}")


def evaluate(p, x):
    """Value of a posynomial at a strictly positive point."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("posynomials are evaluated on positive vectors only")
    total = 0.0
    for t in p.terms:
        val = t.coeff
        for v, a in t.exponents:
            val *= x[v] ** a
        total += val
    return total


def mul(p, m):
    """Posynomial times monomial."""
    return Posynomial(
        tuple(_merge_mono(t, m, +1.0) for t in p.terms)
    )


def div(p, m):
    """Posynomial divided by monomial."""
    return Posynomial(
        tuple(_merge_mono(t, m, -1.0) for t in p.terms)
    )


def _merge_mono(t, m, sign):
    expo = t.exponent_dict()
    for v, a in m.exponents:
        expo[v] = expo.get(v, 0.0) + sign * a
    coeff = t.coeff * (m.coeff if sign > 0 else 1.0 / m.coeff)
    return monomial(coeff, expo)


def add(p, q):
    """Sum of posynomials; terms with identical exponent maps merge."""
    acc = {}
    for t in list(p.terms) + list(q.terms):
        acc[t.exponents] = acc.get(t.exponents, 0.0) + t.coeff
    return Posynomial(tuple(Monomial(c, e) for e, c in sorted(acc.items())))


def _term_arrays(p, nvars):
    logc = np.array([np.log(t.coeff) for t in p.terms])
    A = np.zeros((len(p.terms), nvars))
    for k, t in enumerate(p.terms):
        for v, a in t.exponents:
            A[k, v] = a
    return logc, A


def log_eval(p, y):
    """F(y) = log p(exp y), stabilized by max subtraction."""
    y = np.asarray(y, dtype=float)
    z = np.array([np.log(t.coeff) + sum(a * y[v] for v, a in t.exponents) for t in p.terms])
    zmax = np.max(z)
    return float(zmax + np.log(np.sum(np.exp(z - zmax))))


def log_grad(p, y, nvars=None):
    """Gradient of F(y); a convex combination of the term exponent rows."""
    y = np.asarray(y, dtype=float)
    if nvars is None:
        nvars = len(y)
    logc, A = _term_arrays(p, nvars)
    z = logc + A @ y[:nvars]
    s = np.exp(z - np.max(z))
    s /= s.sum()
    return A.T @ s


def log_hess(p, y, nvars=None):
    """Hessian of F(y): ``A' diag(s) A - g g'`` with softmax weights s."""
    y = np.asarray(y, dtype=float)
    if nvars is None:
        nvars = len(y)
    logc, A = _term_arrays(p, nvars)
    z = logc + A @ y[:nvars]
    s = np.exp(z - np.max(z))
    s /= s.sum()
    g = A.T @ s
    return (A.T * s) @ A - np.outer(g, g)


@dataclass(frozen=True)
class CompiledPosynomial:
    """Posynomial flattened onto its support for fast repeated evaluation.

    ``support`` lists the variable ids the posynomial touches; ``A`` holds
    exponents in support coordinates.  ``value_grad_hess`` returns the
    log-scale value together with gradient and Hessian in support
    coordinates, which callers scatter into the full space.
    """

    support: np.ndarray
    logc: np.ndarray
    A: np.ndarray

    def value(self, y):
        z = self.logc + self.A @ y[self.support]
        zmax = np.max(z)
        return float(zmax + np.log(np.sum(np.exp(z - zmax))))

    def value_grad_hess(self, y):
        z = self.logc + self.A @ y[self.support]
        zmax = np.max(z)
        e = np.exp(z - zmax)
        tot = e.sum()
        val = float(zmax + np.log(tot))
        s = e / tot
        g = self.A.T @ s
        H = (self.A.T * s) @ self.A - np.outer(g, g)
        return val, g, H


def compile_posynomial(p):
    support = np.array(sorted(p.variables()), dtype=int)
    pos = {v: k for k, v in enumerate(support)}
    logc = np.array([np.log(t.coeff) for t in p.terms])
    A = np.zeros((len(p.terms), len(support)))
    for k, t in enumerate(p.terms):
        for v, a in t.exponents:
            A[k, pos[v]] = a
    return CompiledPosynomial(support=support, logc=logc, A=A)


def substitute_var(p, old_id, new_id):
    """Retag one variable id; used to instantiate univariate cost templates."""
    out = []
    for t in p.terms:
        expo = t.exponent_dict()
        if old_id in expo:
            expo[new_id] = expo.pop(old_id)
        out.append(monomial(t.coeff, expo))
    return Posynomial(tuple(out))
