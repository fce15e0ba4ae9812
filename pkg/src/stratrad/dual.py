"""Forward-mode dual numbers carrying one derivative channel.

A :class:`Dual` holds a value and the derivative of that value with respect to
a single seed parameter. Both parts may be Python floats or numpy arrays of the
same shape, so the vectorized solver runs on duals without a separate code path.

Comparisons look at the value only. Branches in the solver therefore take the
same path whether or not a derivative is being carried.
"""

from __future__ import annotations

import numpy as np


class Dual:
    __slots__ = ("val", "der")
    # make numpy defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, val, der=0.0):
        if np.ndim(val) == 0 and np.ndim(der) == 0:
            self.val = float(val)
            self.der = float(der)
        else:
            val = np.asarray(val, dtype=float)
            der = np.asarray(der, dtype=float)
            shape = np.broadcast_shapes(val.shape, der.shape)
            self.val = np.array(np.broadcast_to(val, shape), dtype=float)
            self.der = np.array(np.broadcast_to(der, shape), dtype=float)

    @classmethod
    def seed(cls, val):
        """Independent variable: derivative one."""
        return cls(val, np.ones_like(np.asarray(val, dtype=float)))

    def __repr__(self):
        return f"Dual({self.val!r}, {self.der!r})"

    # arithmetic
    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.der + other.der)
        return Dual(self.val + other, self.der)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.der - other.der)
        return Dual(self.val - other, self.der)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.der)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val, self.val * other.der + self.der * other.val)
        return Dual(self.val * other, self.der * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            q = self.val / other.val
            return Dual(q, (self.der - q * other.der) / other.val)
        return Dual(self.val / other, self.der / other)

    def __rtruediv__(self, other):
        q = other / self.val
        return Dual(q, -q * self.der / self.val)

    def __pow__(self, other):
        if isinstance(other, Dual):
            return exp(other * log(self))
        if other == 0:
            return Dual(np.ones_like(self.val) if np.ndim(self.val) else 1.0, 0.0 * self.der)
        return Dual(self.val**other, other * self.val ** (other - 1) * self.der)

    def __rpow__(self, other):
        p = other**self.val
        return Dual(p, p * np.log(other) * self.der)

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __pos__(self):
        return self

    def __abs__(self):
        return absolute(self)

    # comparisons act on the value
    def __lt__(self, other):
        return self.val < value(other)

    def __le__(self, other):
        return self.val <= value(other)

    def __gt__(self, other):
        return self.val > value(other)

    def __ge__(self, other):
        return self.val >= value(other)

    __hash__ = None

    # container protocol
    def __getitem__(self, idx):
        return Dual(self.val[idx], self.der[idx])

    def __setitem__(self, idx, item):
        if isinstance(item, Dual):
            self.val[idx] = item.val
            self.der[idx] = item.der
        else:
            self.val[idx] = item
            self.der[idx] = 0.0

    def __len__(self):
        return len(self.val)

    @property
    def shape(self):
        return np.shape(self.val)

    @property
    def ndim(self):
        return np.ndim(self.val)

    def sum(self, axis=None):
        return Dual(np.sum(self.val, axis=axis), np.sum(self.der, axis=axis))

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Dual(np.reshape(self.val, shape), np.reshape(self.der, shape))

    def copy(self):
        return Dual(np.copy(self.val), np.copy(self.der))


def is_dual(x) -> bool:
    return isinstance(x, Dual)


def value(x):
    """Value part of a dual, or ``x`` itself."""
    return x.val if isinstance(x, Dual) else x


def derivative(x):
    """Derivative part of a dual; zero for plain numbers."""
    if isinstance(x, Dual):
        return x.der
    return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0


def exp(x):
    if isinstance(x, Dual):
        e = np.exp(x.val)
        return Dual(e, e * x.der)
    return np.exp(x)


def expm1(x):
    if isinstance(x, Dual):
        return Dual(np.expm1(x.val), np.exp(x.val) * x.der)
    return np.expm1(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(np.log(x.val), x.der / x.val)
    return np.log(x)


def sqrt(x):
    if isinstance(x, Dual):
        r = np.sqrt(x.val)
        return Dual(r, 0.5 * x.der / r)
    return np.sqrt(x)


def absolute(x):
    if isinstance(x, Dual):
        s = np.sign(x.val)
        return Dual(np.abs(x.val), s * x.der)
    return np.abs(x)


def where(cond, a, b):
    """Elementwise select; ``cond`` is a plain boolean mask."""
    if isinstance(a, Dual) or isinstance(b, Dual):
        return Dual(np.where(cond, value(a), value(b)), np.where(cond, derivative(a), derivative(b)))
    return np.where(cond, a, b)


def maximum(a, b):
    return where(value(a) >= value(b), a, b)


def minimum(a, b):
    return where(value(a) <= value(b), a, b)


def asarray(x):
    if isinstance(x, Dual):
        return Dual(np.atleast_1d(x.val), np.atleast_1d(x.der))
    return np.asarray(x, dtype=float)


def zeros(shape, like=None):
    """Zero array, dual if ``like`` is dual."""
    if isinstance(like, Dual):
        return Dual(np.zeros(shape), np.zeros(shape))
    return np.zeros(shape)


def einsum(subscripts, a, b):
    """Two-operand ``np.einsum`` with the product rule."""
    if isinstance(a, Dual) or isinstance(b, Dual):
        av, bv = value(a), value(b)
        val = np.einsum(subscripts, av, bv)
        der = 0.0
        if isinstance(a, Dual):
            der = der + np.einsum(subscripts, a.der, bv)
        if isinstance(b, Dual):
            der = der + np.einsum(subscripts, av, b.der)
        return Dual(val, der)
    return np.einsum(subscripts, a, b)
