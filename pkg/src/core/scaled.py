# src/core/scaled.py
"""
High-Dynamic-Range Arithmetic
Values stored as mantissa * 2**exponent with |mantissa| in [1, 2), so products
of mode functions spanning several hundred decades never overflow a double.
"""

import math
from typing import Tuple, Union

import numpy as np

from src.utils.error_handler import ScaledOverflowError

Number = Union[int, float, complex, np.ndarray]

LOG10_2 = math.log10(2.0)
_MAX_EXPONENT = 1023
# |x| beyond which exp(x) leaves the int64 exponent range
_EXP_LIMIT = 1e15


def _ldexp(mantissa: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    """np.ldexp for real or complex mantissas"""
    if np.iscomplexobj(mantissa):
        return np.ldexp(mantissa.real, exponent) + 1j * np.ldexp(mantissa.imag, exponent)
    return np.ldexp(mantissa, exponent)


class ScaledArray:
    """
    Elementwise scaled representation of real or complex numbers.

    Zero is stored as mantissa 0 with exponent 0. All arithmetic renormalizes,
    so equal inputs always give bit-identical mantissas.
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: Number, exponent: Number = 0, normalize: bool = True):
        m = np.asarray(mantissa)
        if m.dtype.kind not in "fc":
            m = m.astype(float)
        e = np.broadcast_to(np.asarray(exponent, dtype=np.int64), m.shape).copy()
        if normalize:
            m, e = self._normalized(m, e)
        self.mantissa = m
        self.exponent = e

    @staticmethod
    def _normalized(m: np.ndarray, e: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        frac, shift = np.frexp(np.abs(m))
        shift = shift.astype(np.int64) - 1
        zero = frac == 0
        shift = np.where(zero, 0, shift)
        m = _ldexp(m, -shift)
        e = np.where(zero, 0, e + shift)
        return m, e

    @classmethod
    def from_log10(cls, log10_abs: Number, sign: Number = 1.0) -> "ScaledArray":
        """Build from log10|x| and a sign (or unit phase)"""
        l2 = np.asarray(log10_abs, dtype=float) / LOG10_2
        e = np.floor(l2)
        m = np.asarray(sign) * np.exp2(l2 - e)
        return cls(m, e.astype(np.int64))

    @staticmethod
    def coerce(value: Union["ScaledArray", Number]) -> "ScaledArray":
        return value if isinstance(value, ScaledArray) else ScaledArray(value)

    # -- arithmetic ---------------------------------------------------------
    def __mul__(self, other):
        o = ScaledArray.coerce(other)
        return ScaledArray(self.mantissa * o.mantissa, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ScaledArray.coerce(other)
        if np.any(o.mantissa == 0):
            raise ZeroDivisionError("division by a scaled zero")
        return ScaledArray(self.mantissa / o.mantissa, self.exponent - o.exponent)

    def __rtruediv__(self, other):
        return ScaledArray.coerce(other) / self

    def _aligned_sum(self, other: "ScaledArray", sign: float) -> "ScaledArray":
        e1, e2 = np.broadcast_arrays(self.exponent, other.exponent)
        top = np.maximum(e1, e2)
        # zeros must not drag the alignment exponent
        top = np.where(self.mantissa == 0, e2, np.where(other.mantissa == 0, e1, top))
        m = _ldexp(self.mantissa, e1 - top) + sign * _ldexp(other.mantissa, e2 - top)
        return ScaledArray(m, top)

    def __add__(self, other):
        return self._aligned_sum(ScaledArray.coerce(other), 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._aligned_sum(ScaledArray.coerce(other), -1.0)

    def __rsub__(self, other):
        return ScaledArray.coerce(other)._aligned_sum(self, -1.0)

    def __neg__(self):
        return ScaledArray(-self.mantissa, self.exponent, normalize=False)

    def __pow__(self, power: float):
        """Real powers; non-integer powers need a positive real base"""
        if float(power).is_integer():
            n = int(power)
            m = self.mantissa.astype(complex) if np.iscomplexobj(self.mantissa) else self.mantissa
            return ScaledArray(m ** n, self.exponent * n)
        if np.iscomplexobj(self.mantissa) or np.any(self.mantissa <= 0):
            raise ValueError("fractional power of a non-positive scaled value")
        total = self.exponent * float(power)
        whole = np.floor(total)
        m = self.mantissa ** power * np.exp2(total - whole)
        return ScaledArray(m, whole.astype(np.int64))

    def conj(self) -> "ScaledArray":
        return ScaledArray(np.conj(self.mantissa), self.exponent, normalize=False)

    conjugate = conj

    @property
    def real(self) -> "ScaledArray":
        return ScaledArray(np.real(self.mantissa), self.exponent)

    @property
    def imag(self) -> "ScaledArray":
        return ScaledArray(np.imag(self.mantissa), self.exponent)

    def abs(self) -> "ScaledArray":
        return ScaledArray(np.abs(self.mantissa), self.exponent, normalize=False)

    def sign(self) -> np.ndarray:
        return np.sign(np.real(self.mantissa))

    def __getitem__(self, index) -> "ScaledArray":
        return ScaledArray(self.mantissa[index], self.exponent[index], normalize=False)

    @property
    def shape(self):
        return self.mantissa.shape

    # -- reductions ---------------------------------------------------------
    def sum(self, axis=None) -> "ScaledArray":
        """Aligned sum in fixed (memory) order"""
        nonzero = self.mantissa != 0
        if not np.any(nonzero):
            shape = np.sum(self.mantissa, axis=axis).shape
            return ScaledArray(np.zeros(shape, dtype=self.mantissa.dtype), 0)
        low = np.iinfo(np.int64).min
        masked = np.where(nonzero, self.exponent, low)
        top = np.max(masked, axis=axis, keepdims=True)
        top = np.where(top == low, 0, top)
        shifted = _ldexp(self.mantissa, np.maximum(self.exponent - top, -1100))
        total = np.sum(shifted, axis=axis)
        top = np.squeeze(top, axis=axis) if axis is not None else top.reshape(())
        return ScaledArray(total, top)

    # -- conversion ---------------------------------------------------------
    def log10_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log10(np.abs(self.mantissa)) + self.exponent * LOG10_2

    def overflows(self) -> np.ndarray:
        return (self.mantissa != 0) & (self.exponent > _MAX_EXPONENT)

    def to_numpy(self) -> np.ndarray:
        """Convert to doubles; raises ScaledOverflowError instead of returning inf"""
        if np.any(self.overflows()):
            worst = float(np.max(np.where(self.overflows(), self.log10_abs(), -np.inf)))
            raise ScaledOverflowError(f"scaled value ~1e{worst:.1f} exceeds double range")
        return _ldexp(self.mantissa, np.maximum(self.exponent, -1100))

    def item(self) -> Union[float, complex]:
        value = self.to_numpy()
        return value.item() if value.ndim == 0 else value.ravel()[0].item()

    def __float__(self):
        return float(np.real(self.item()))

    def decompose(self) -> Tuple[Union[float, complex], int]:
        """(mantissa, exponent) of a scalar, for reporting"""
        if self.mantissa.size != 1:
            raise ValueError("decompose() needs a scalar")
        return self.mantissa.ravel()[0].item(), int(self.exponent.ravel()[0])

    def __repr__(self):
        if self.mantissa.size == 1:
            m, e = self.decompose()
            return f"ScaledArray({m!r} * 2**{e})"
        return f"ScaledArray(shape={self.shape})"


def scaled(value: Union[ScaledArray, Number]) -> ScaledArray:
    return ScaledArray.coerce(value)


def scaled_exp(exponent: Number) -> ScaledArray:
    """exp(x) for real x; below -_EXP_LIMIT the result is an exact zero"""
    x = np.asarray(exponent, dtype=float)
    if np.any(x > _EXP_LIMIT) or np.any(np.isnan(x)):
        raise ScaledOverflowError(f"exp argument outside the scaled range: {exponent!r}")
    vanishing = x < -_EXP_LIMIT
    l2 = np.where(vanishing, 0.0, x) / math.log(2.0)
    whole = np.floor(l2)
    mantissa = np.where(vanishing, 0.0, np.exp2(l2 - whole))
    return ScaledArray(mantissa, np.where(vanishing, 0, whole).astype(np.int64))
