# src/core/kernels.py
"""
Correction Kernels
Bilinear mode coefficients and the integrand kernels of the collapse-induced
correction to <R^2>: exact quadratic operator, its leading superhorizon forms,
and the linearized collapse operator.

Double-precision evaluations go through ScaledArray; extended-precision ones
through mpmath. Kernel values are reported as KernelEval (mantissa, exponent).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional, Union

import mpmath
import numpy as np

from src.core.background import CosmoParams, Era, check_window, horizon_crossing_time, resolve_era
from src.core.modes import mode, precision, scaled_mode
from src.core.scaled import ScaledArray
from src.utils.error_handler import DomainError, ScaledOverflowError

Value = Union[complex, mpmath.mpc, ScaledArray]

# extra digits per decade of |k eta_e| below 1 for the symmetric part
DPS_BASE = 30
DPS_PER_DECADE = 7
# doubles are kept where the symmetric part is at least this fraction of its terms
CANCELLATION_FLOOR = 1e-6
LEADING_TERMS = (2, 4)


class KernelVariant(str, Enum):
    EXACT_QUADRATIC = "exact"
    LEADING_QUADRATIC = "leading"
    LINEARIZED = "linear"

    @classmethod
    def parse(cls, name: Union[str, "KernelVariant"]) -> "KernelVariant":
        if isinstance(name, KernelVariant):
            return name
        aliases = {
            "exact": cls.EXACT_QUADRATIC, "exactquadratic": cls.EXACT_QUADRATIC,
            "leading": cls.LEADING_QUADRATIC, "leadingquadratic": cls.LEADING_QUADRATIC,
            "linear": cls.LINEARIZED, "linearized": cls.LINEARIZED,
        }
        key = str(name).replace("_", "").replace("-", "").lower()
        if key not in aliases:
            raise DomainError(f"unknown kernel variant {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class BilinearCoeffs:
    """f = v_p v_q, g = v_p v_q*, j = v'_p v'_q, l = v'_p v'_q*, b = j - C f, d = l - C g"""
    f: Value
    g: Value
    j: Value
    l: Value
    b: Value
    d: Value


@dataclass(frozen=True)
class KernelEval:
    """Real kernel value stored as mantissa * 2**exponent"""
    era: Era
    variant: KernelVariant
    mantissa: float
    exponent: int

    @classmethod
    def from_number(cls, era: Era, variant: KernelVariant, number: Any) -> "KernelEval":
        if isinstance(number, ScaledArray):
            m, e = number.real.decompose()
            return cls(era, variant, float(m), int(e))
        if isinstance(number, (mpmath.mpf, mpmath.mpc)):
            m, e = mpmath.frexp(mpmath.re(number))
            return cls(era, variant, *ScaledArray(float(m), int(e)).decompose())
        m, e = ScaledArray(float(np.real(number))).decompose()
        return cls(era, variant, float(m), int(e))

    @property
    def scaled(self) -> ScaledArray:
        return ScaledArray(self.mantissa, self.exponent)

    @property
    def value(self) -> float:
        """Float value; raises ScaledOverflowError when outside double range"""
        return float(self.scaled)

    def log10_abs(self) -> float:
        return float(self.scaled.log10_abs())

    def as_dict(self) -> Dict[str, Any]:
        try:
            value: Optional[float] = self.value
        except ScaledOverflowError:
            value = None
        return {"era": self.era.tag.value, "variant": self.variant.value, "value": value,
                "mantissa": self.mantissa, "exponent": self.exponent,
                "log10_abs": self.log10_abs()}


# -- bilinear coefficients ---------------------------------------------------

def _check_momenta(p, q, costheta):
    for name, value in (("p", p), ("q", q)):
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    if not -1.0 <= costheta <= 1.0:
        raise DomainError(f"costheta must lie in [-1, 1], got {costheta!r}")


def _coupling(era: Era, p, q, costheta, eta, num=ScaledArray):
    """Era coupling p.q + 2/eta^2 (inflation) or p.q/3 (radiation)"""
    dot = num(p) * num(q) * costheta
    if era.is_inflation:
        return dot + 2 / num(eta) ** 2
    return dot / 3


def bilinear_coeffs(era: Union[Era, str], p: float, q: float, costheta: float, eta: float,
                    params: CosmoParams, dps: Optional[int] = None) -> BilinearCoeffs:
    """
    Bilinear coefficients of the modes p and q at conformal time eta.

    Args:
        era: inflation or radiation
        p, q: momenta in M_P
        costheta: cosine of the angle between p and q
        eta: conformal time inside the era window
        params: background parameters
        dps: mpmath working precision; None evaluates in ScaledArray doubles

    Returns:
        BilinearCoeffs holding ScaledArray (dps=None) or mpmath values
    """
    era = resolve_era(era, params)
    _check_momenta(p, q, costheta)
    check_window(era, eta, params)
    if dps is None:
        vp, vdp = scaled_mode(era, p, eta, params)
        vq, vdq = scaled_mode(era, q, eta, params)
        coupling = _coupling(era, p, q, costheta, eta)
    else:
        sp, sq = mode(era, p, eta, params, dps=dps), mode(era, q, eta, params, dps=dps)
        vp, vdp, vq, vdq = sp.v, sp.v_dot, sq.v, sq.v_dot
    with precision(dps) as m:
        if dps is not None:
            coupling = _coupling(era, p, q, m.num(costheta), eta, num=m.num)
        f, g = vp * vq, vp * vq.conjugate()
        j, l = vdp * vdq, vdp * vdq.conjugate()
        return BilinearCoeffs(f=f, g=g, j=j, l=l, b=j - coupling * f, d=l - coupling * g)


def _end_amplitudes(era, p, q, eta_end, params, dps):
    """(f_qq, g_pp) at the evaluation time"""
    if dps is None:
        vq, _ = scaled_mode(era, q, eta_end, params)
        vp, _ = scaled_mode(era, p, eta_end, params)
    else:
        vq, vp = mode(era, q, eta_end, params, dps=dps).v, mode(era, p, eta_end, params, dps=dps).v
    with precision(dps):
        return vq * vq, vp * vp.conjugate()


def _check_times(era: Era, eta_prime: float, eta_end: float, params: CosmoParams):
    check_window(era, eta_end, params)
    if eta_prime > eta_end:
        raise DomainError(f"eta' = {eta_prime} lies after the evaluation time {eta_end}")


def default_eta_end(era: Era, params: CosmoParams) -> float:
    return params.eta_e if era.is_inflation else params.eta_r


# -- exact quadratic kernel --------------------------------------------------

def _compose(era, p, q, costheta, eta_prime, eta_end, params, dps):
    pq = bilinear_coeffs(era, p, q, costheta, eta_prime, params, dps)
    qp = bilinear_coeffs(era, q, p, costheta, eta_prime, params, dps)
    f_qq, g_pp = _end_amplitudes(era, p, q, eta_end, params, dps)
    with precision(dps):
        total = pq.b * qp.d * f_qq.conjugate() - pq.b * qp.b.conjugate() * g_pp
        return total.real


def kernel_exact(era: Union[Era, str], p: float, q: float, costheta: float, eta_prime: float,
                 eta_end: Optional[float], params: CosmoParams,
                 dps: Optional[int] = None) -> KernelEval:
    """
    Re[b^{pq} d^{qp} (f^{qq}_end)* - b^{pq} (b^{qp})* g^{pp}_end], composed from
    bilinear_coeffs at eta' and mode amplitudes at eta_end.

    eta_end defaults to eta_e for inflation and eta_r for radiation.
    """
    era = resolve_era(era, params)
    eta_end = default_eta_end(era, params) if eta_end is None else eta_end
    _check_times(era, eta_prime, eta_end, params)
    value = _compose(era, p, q, costheta, eta_prime, eta_end, params, dps)
    return KernelEval.from_number(era, KernelVariant.EXACT_QUADRATIC, value)


def _transcribed_inflation(m, p, q, c, eta, eta_end):
    j = m.j
    X = eta ** 2 * p * q * c + 2
    A1 = ((1 - eta ** 2 * p ** 2 + j * eta * p) * (eta ** 2 * q ** 2 - 1 - j * eta * q)
          - (eta * p - j) * (eta * q - j) * X)
    A2 = ((eta ** 2 * p ** 2 - 1 + j * eta * p) * (eta ** 2 * q ** 2 - 1 - j * eta * q)
          - (eta * p + j) * (eta * q - j) * X)
    B2 = (-(eta ** 2 * p ** 2 - 1 + j * eta * p) * (eta ** 2 * q ** 2 - 1 + j * eta * q)
          - (eta * p + j) * (eta * q + j) * X)
    t1 = (1 / (8 * eta ** 8 * p ** 3 * q ** 4) * (1 + j / (eta_end * q)) ** 2
          * m.exp(-2 * j * q * (eta - eta_end)) * A1 * A2)
    t2 = (1 / (8 * eta ** 8 * p ** 4 * q ** 3) * (1 - j / (eta_end * p)) * (1 + j / (eta_end * p))
          * A1 * B2)
    return (t1 - t2).real


def _transcribed_radiation(m, p, q, c, eta, eta_r, eta_e, eps):
    j, s3 = m.j, m.sqrt(3)

    def phase(t):
        return m.exp(j * t / s3)

    pd = p * q * c
    g1 = -2 * q * eta_e * (q ** 3 * eta_e ** 3 - 2 * q * eta_e + j * s3) - 3
    g2 = 2 * q * eta_e * (-q ** 3 * eta_e ** 3 + 2 * q * eta_e + j * s3) - 3
    h = 4 * p ** 4 * eta_e ** 4 - 2 * p ** 2 * eta_e ** 2 + 3
    km = 2 * p * eta_e * (p ** 3 * eta_e ** 3 - 2 * p * eta_e - j * s3) + 3
    kp = 2 * p * eta_e * (p ** 3 * eta_e ** 3 - 2 * p * eta_e + j * s3) + 3
    D = p ** 2 * q ** 2 - pd ** 2
    mid = (4 * p ** 4 * q ** 3 * (p * q + pd) ** 2 * eta_e ** 4
           - 2 * p ** 2 * q ** 2 * (2 * pd * p ** 3 + q ** 3 * p ** 2 + q * pd ** 2) * eta_e ** 2
           + 3 * (2 * pd * p ** 5 + q ** 5 * p ** 2 + q ** 3 * pd ** 2))
    terms = [
        4 * pd * p ** 5 * phase(2 * (p + q) * (eta - eta_e)) * g1,
        4 * pd * p ** 5 * phase(2 * (p * (eta - eta_e) + q * (eta + 2 * eta_r - 3 * eta_e))) * g2,
        2 * q ** 3 * D * h * phase(2 * (p + 2 * q) * (eta - eta_e)),
        2 * q ** 3 * D * h * phase(2 * (p * eta + 2 * q * eta_r - (p + 2 * q) * eta_e)),
        4 * mid * phase(2 * (p * (eta - eta_e) + q * (eta + eta_r - 2 * eta_e))),
        q ** 3 * (pd - p * q) ** 2 * phase(4 * (p * eta + q * eta_r - (p + q) * eta_e)) * km,
        q ** 3 * (p * q + pd) ** 2 * phase(4 * (p + q) * (eta - eta_e)) * km,
        2 * q ** 3 * D * phase(2 * (2 * p * eta + q * eta + q * eta_r - 2 * (p + q) * eta_e)) * km,
        q ** 3 * (pd - p * q) ** 2 * phase(4 * q * (eta - eta_e)) * kp,
        q ** 3 * (p * q + pd) ** 2 * phase(4 * q * (eta_r - eta_e)) * kp,
        2 * q ** 3 * D * phase(2 * q * (eta + eta_r - 2 * eta_e)) * kp,
    ]
    prefactor = (-9 / (8 * p ** 5 * q ** 5 * eps ** 3 * eta_e ** 4)
                 * phase(-2 * (p * (eta - eta_e) + q * (eta + eta_r - 2 * eta_e))))
    return (prefactor * sum(terms)).real


def kernel_transcribed(era: Union[Era, str], p: float, q: float, costheta: float,
                       eta_prime: float, eta_end: Optional[float], params: CosmoParams,
                       dps: int = 50) -> KernelEval:
    """
    The kernel from its fully expanded closed form, in extended precision.

    The inflationary form equals kernel_exact pointwise. The radiation form differs
    from it by a part antisymmetric in p and q, so only symmetrized values agree.
    """
    era = resolve_era(era, params)
    _check_momenta(p, q, costheta)
    check_window(era, eta_prime, params)
    eta_end = default_eta_end(era, params) if eta_end is None else eta_end
    _check_times(era, eta_prime, eta_end, params)
    with precision(dps) as m:
        args = [m.num(x) for x in (p, q, costheta, eta_prime, eta_end)]
        if era.is_inflation:
            value = _transcribed_inflation(m, *args)
        else:
            value = _transcribed_radiation(m, *args, m.num(params.eta_e), m.num(params.eps_inf))
    return KernelEval.from_number(era, KernelVariant.EXACT_QUADRATIC, value)


def symmetric_dps(p: float, q: float, params: CosmoParams) -> int:
    """Working precision that resolves the p<->q symmetric part"""
    smallest = min(abs(p * params.eta_e), abs(q * params.eta_e))
    decades = max(0.0, -math.log10(smallest)) if smallest > 0 else 0.0
    return int(DPS_BASE + DPS_PER_DECADE * math.ceil(decades))


def kernel_symmetrized(era: Union[Era, str], p: float, q: float, costheta: float,
                       eta_prime: float, eta_end: Optional[float], params: CosmoParams,
                       dps: Optional[int] = None, route: str = "compose") -> KernelEval:
    """(F(p,q) + F(q,p))/2 in extended precision; the symmetric part can sit |k eta|^6 below each term"""
    era = resolve_era(era, params)
    eta_end = default_eta_end(era, params) if eta_end is None else eta_end
    _check_times(era, eta_prime, eta_end, params)
    dps = symmetric_dps(p, q, params) if dps is None else dps
    if route == "compose":
        one = _compose(era, p, q, costheta, eta_prime, eta_end, params, dps)
        two = _compose(era, q, p, costheta, eta_prime, eta_end, params, dps)
        with precision(dps):
            value = (one + two) / 2
    elif route == "transcribe":
        with precision(dps) as m:
            args = [m.num(x) for x in (costheta, eta_prime, eta_end)]
            pp, qq = m.num(p), m.num(q)
            if era.is_inflation:
                value = (_transcribed_inflation(m, pp, qq, *args)
                         + _transcribed_inflation(m, qq, pp, *args)) / 2
            else:
                extra = (m.num(params.eta_e), m.num(params.eps_inf))
                value = (_transcribed_radiation(m, pp, qq, *args, *extra)
                         + _transcribed_radiation(m, qq, pp, *args, *extra)) / 2
    else:
        raise DomainError(f"route must be 'compose' or 'transcribe', got {route!r}")
    return KernelEval.from_number(era, KernelVariant.EXACT_QUADRATIC, value)


@dataclass(frozen=True)
class ScaledSymmetric:
    """Symmetrized kernel on a node array with the size of the terms that cancel in it"""
    value: ScaledArray
    scale: ScaledArray

    def resolved(self, floor: float = CANCELLATION_FLOOR) -> np.ndarray:
        """True where |value| >= floor * scale, so doubles still resolve the node"""
        return self.value.log10_abs() >= math.log10(floor) + self.scale.log10_abs()


def kernel_symmetrized_scaled(era: Union[Era, str], p, q: float, costheta, eta_prime: float,
                              eta_end: Optional[float], params: CosmoParams) -> ScaledSymmetric:
    """
    (F(p,q) + F(q,p))/2 in ScaledArray doubles for arrays p, costheta at one q.

    Swapping p and q leaves b unchanged and conjugates d, so both orderings
    come from one set of bilinear coefficients. `scale` bounds the terms that
    cancel; nodes failing ScaledSymmetric.resolved() need kernel_symmetrized.
    """
    era = resolve_era(era, params)
    eta_end = default_eta_end(era, params) if eta_end is None else eta_end
    _check_times(era, eta_prime, eta_end, params)
    p, c = np.asarray(p, dtype=float), np.asarray(costheta, dtype=float)
    if not (math.isfinite(q) and q > 0) or not np.all(np.isfinite(p) & (p > 0)):
        raise DomainError(f"momenta must be finite and > 0, got q = {q!r}")
    if np.any(np.abs(c) > 1.0):
        raise DomainError("costheta must lie in [-1, 1]")
    check_window(era, eta_prime, params)

    vp, vdp = scaled_mode(era, p, eta_prime, params)
    vq, vdq = scaled_mode(era, q, eta_prime, params)
    coupling = _coupling(era, p, q, c, eta_prime)
    f, g = vp * vq, vp * vq.conj()
    j, l = vdp * vdq, vdp * vdq.conj()
    b, d = j - coupling * f, l - coupling * g
    b_size = j.abs() + coupling.abs() * f.abs()
    d_size = l.abs() + coupling.abs() * g.abs()

    up, _ = scaled_mode(era, p, eta_end, params)
    uq, _ = scaled_mode(era, q, eta_end, params)
    f_pp, f_qq = up * up, uq * uq
    g_pp, g_qq = up.abs() * up.abs(), uq.abs() * uq.abs()
    bb = b * b.conj()
    one = (b * d.conj() * f_qq.conj() - bb * g_pp).real
    two = (b * d * f_pp.conj() - bb * g_qq).real
    scale = b_size * d_size * (f_qq.abs() + f_pp.abs()) + b_size * b_size * (g_pp + g_qq)
    return ScaledSymmetric((one + two) * 0.5, scale)


# -- leading superhorizon kernels --------------------------------------------

def _check_terms(terms: int):
    if terms not in LEADING_TERMS:
        raise DomainError(f"leading kernel has 2 or 4 terms, got {terms!r}")


def leading_kernel_scaled(era: Union[Era, str], p, q, eta_prime, params: CosmoParams,
                          terms: int = 4) -> ScaledArray:
    """Leading kernel for scalar or array arguments"""
    era = resolve_era(era, params)
    _check_terms(terms)
    sq = ScaledArray(q)
    if not era.is_inflation:
        return -54.0 / (ScaledArray(params.eps_inf) ** 3 * ScaledArray(params.eta_e) ** 4 * sq ** 3)
    sp, se, ee = ScaledArray(p), ScaledArray(eta_prime), ScaledArray(params.eta_e)
    value = (-0.5 / (sq ** 3 * ee ** 2 * se ** 2)
             - (4.0 / 9.0) / (sp ** 3 * ee ** 2 * se ** 2))
    if terms == 4:
        value = value - ee ** 4 / (36.0 * sp ** 3 * se ** 8) + 2.0 * ee / (9.0 * sp ** 3 * se ** 5)
    return value


def kernel_leading(era: Union[Era, str], p: float, q: float, eta_prime: float,
                   params: CosmoParams, terms: int = 4) -> KernelEval:
    """
    Leading superhorizon form of the exact kernel.

    Inflation keeps either the two eta_e-enhanced terms (terms=2) or all four
    (terms=4); radiation is -54/(eps^3 eta_e^4 q^3), independent of p and eta'.
    """
    era = resolve_era(era, params)
    _check_momenta(p, q, 0.0)
    check_window(era, eta_prime, params)
    value = leading_kernel_scaled(era, p, q, eta_prime, params, terms)
    return KernelEval.from_number(era, KernelVariant.LEADING_QUADRATIC, value)


def effective_kernel_scaled(era: Union[Era, str], q, eta_prime, params: CosmoParams,
                            terms: int = 4) -> ScaledArray:
    """Leading kernel with every single-momentum term relabelled onto q"""
    era = resolve_era(era, params)
    _check_terms(terms)
    sq = ScaledArray(q)
    if not era.is_inflation:
        return -54.0 / (ScaledArray(params.eps_inf) ** 3 * ScaledArray(params.eta_e) ** 4 * sq ** 3)
    se, ee = ScaledArray(eta_prime), ScaledArray(params.eta_e)
    bracket = (17.0 / 18.0) / (ee ** 2 * se ** 2)
    if terms == 4:
        bracket = bracket + ee ** 4 / (36.0 * se ** 8) - 2.0 * ee / (9.0 * se ** 5)
    return -bracket / sq ** 3


def kernel_effective(era: Union[Era, str], q: float, eta_prime: float, params: CosmoParams,
                     terms: int = 4) -> KernelEval:
    era = resolve_era(era, params)
    _check_momenta(q, q, 0.0)
    check_window(era, eta_prime, params)
    value = effective_kernel_scaled(era, q, eta_prime, params, terms)
    return KernelEval.from_number(era, KernelVariant.LEADING_QUADRATIC, value)


def symmetrize(kernel: Callable[..., KernelEval], p: float, q: float, *args, **kwargs) -> ScaledArray:
    """(K(p, q, ...) + K(q, p, ...))/2 for any kernel taking (p, q) first"""
    return (kernel(p, q, *args, **kwargs).scaled + kernel(q, p, *args, **kwargs).scaled) * 0.5


# -- linearized collapse operator --------------------------------------------

def chi_linear(k: float, eta: float, params: CosmoParams, dps: Optional[int] = None):
    """chi_k = alpha_k v_k + beta_k v'_k for the linearized energy-density operator"""
    if not (math.isfinite(k) and k > 0):
        raise DomainError(f"k must be finite and > 0, got {k!r}")
    if not eta < 0:
        raise DomainError(f"chi_linear needs eta < 0, got {eta!r}")
    state = mode("inflation", k, eta, params, dps=dps)
    with precision(dps) as m:
        kk, ee = m.num(k), m.num(eta)
        h3, eps, eps2 = m.num(params.h_inf) ** 3, m.num(params.eps_inf), m.num(params.eps2)
        pre = h3 * eps / m.sqrt(2 * eps)
        alpha = ee * pre * (-6 * eps * (eps2 / 2 + 1) / (ee ** 2 * kk ** 2) + eps2 + 8)
        beta = -ee ** 2 * pre * (6 * eps / (ee ** 2 * kk ** 2) - 2)
        chi = alpha * state.v + beta * state.v_dot
        return complex(chi) if dps is None else chi


def linear_kernel_leading_scaled(q, eta_prime, params: CosmoParams) -> ScaledArray:
    """-18 eps^3 H^6 eta'^2/(q^4 eta_e^2)"""
    return (-18.0 * ScaledArray(params.eps_inf) ** 3 * ScaledArray(params.h_inf) ** 6
            * ScaledArray(eta_prime) ** 2 / (ScaledArray(q) ** 4 * ScaledArray(params.eta_e) ** 2))


def kernel_linear(q: float, eta_prime: float, params: CosmoParams, variant: str = "exact",
                  dps: Optional[int] = None) -> KernelEval:
    """
    Integrand of the linearized-operator correction,
    chi*^2 f + chi^2 f* - |chi|^2 (g + g*), with f, g of mode q at eta_e.

    variant="leading" returns the superhorizon limit instead.
    """
    era = Era.inflation(params.eps_inf)
    _check_momenta(q, q, 0.0)
    check_window(era, eta_prime, params)
    if variant == "leading":
        value = linear_kernel_leading_scaled(q, eta_prime, params)
        return KernelEval.from_number(era, KernelVariant.LINEARIZED, value)
    if variant != "exact":
        raise DomainError(f"variant must be 'exact' or 'leading', got {variant!r}")
    dps = symmetric_dps(q, q, params) if dps is None else dps
    chi = chi_linear(q, eta_prime, params, dps)
    v_end = mode(era, q, params.eta_e, params, dps=dps).v
    with precision(dps):
        f, g = v_end * v_end, v_end * v_end.conjugate()
        cc = chi.conjugate()
        value = (cc * cc * f + chi * chi * f.conjugate() - chi * cc * (g + g.conjugate())).real
    return KernelEval.from_number(era, KernelVariant.LINEARIZED, value)


def energy_scale_comparison(k: float, params: CosmoParams, dps: int = 50) -> Dict[str, float]:
    """
    Magnitudes of the two collapse operators for mode k at horizon crossing
    eta = -1/k: k^3 |b^{kk}| for the quadratic one, k^{3/2} |chi_k| for the linear one.
    """
    if not math.isfinite(k):
        raise DomainError(f"k must be finite, got {k!r}")
    eta = horizon_crossing_time(k)
    era = Era.inflation(params.eps_inf)
    check_window(era, eta, params)
    coeffs = bilinear_coeffs(era, k, k, 1.0, eta, params, dps=dps)
    chi = chi_linear(k, eta, params, dps=dps)
    with precision(dps):
        quadratic = ScaledArray(1.0) * float(k) ** 3 * float(abs(coeffs.b))
        linear = ScaledArray(float(k) ** 1.5) * float(abs(chi))
    ratio = quadratic / linear
    return {
        "k": k,
        "eta": eta,
        "log10_quadratic": float(quadratic.log10_abs()),
        "log10_linear": float(linear.log10_abs()),
        "log10_ratio": float(ratio.log10_abs()),
    }
