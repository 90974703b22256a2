"""Group elements of Gamma and truncated series in the period scalar t.

A group element sigma = gamma^n g is stored as (n, c, chi): the vector of
geometric exponents, the cocycle scalar c(g), and the cyclotomic unit chi(g).
The semidirect law is (n, c, chi) (m, c', chi') = (n + chi m, c + chi c',
chi chi').

t stands for the single period lambda (1 - zeta_p); the two factors never
appear separately.  Formally v(t) = 1/(p-1), but that is bookkeeping only:
coefficients do all the real valuation work.  The derived Galois action is

    sigma(t) = chi * t * (1 - beta c t)^{-1},      beta = pi E'(pi),

extended coefficientwise (trivially on K and on chart variables).  It is not
assumed: the evaluation/face compatibility oracle in the cosimplicial module
certifies it.
"""

from .errors import PrecisionExhausted


class GroupElt:
    """(n, c, chi) with n a d-vector; parameters live in Z_p mod p^N."""

    __slots__ = ("cfg", "n", "c", "chi")

    def __init__(self, cfg, n, c, chi):
        M = cfg.p**cfg.N
        self.cfg = cfg
        self.n = tuple(x % M for x in n)
        self.c = c % M
        if chi % cfg.p == 0:
            raise ValueError("chi must be a unit")
        self.chi = chi % M

    @classmethod
    def identity(cls, cfg, d=0):
        return cls(cfg, (0,) * d, 0, 1)

    @property
    def d(self):
        return len(self.n)

    def __mul__(self, other):
        if self.d != other.d:
            raise ValueError("mismatched geometric dimensions")
        n = tuple(a + self.chi * b for a, b in zip(self.n, other.n))
        return GroupElt(self.cfg, n, self.c + self.chi * other.c, self.chi * other.chi)

    def inverse(self):
        M = self.cfg.p**self.cfg.N
        ci = pow(self.chi, -1, M)
        return GroupElt(self.cfg, tuple(-ci * x for x in self.n), -ci * self.c, ci)

    def is_identity(self):
        return all(x == 0 for x in self.n) and self.c == 0 and self.chi == 1

    def to_json(self):
        return {"n": [str(x) for x in self.n], "c": str(self.c), "chi": str(self.chi)}

    @classmethod
    def from_json(cls, cfg, d):
        return cls(cfg, [int(x) for x in d.get("n", [])], int(d["c"]), int(d["chi"]))

    def __eq__(self, other):
        if not isinstance(other, GroupElt):
            return NotImplemented
        return self.n == other.n and self.c == other.c and self.chi == other.chi

    def __hash__(self):
        return hash((self.n, self.c, self.chi))

    def __repr__(self):
        return f"GroupElt(n={self.n}, c={self.c}, chi={self.chi})"


def group_compose(s, u):
    return s * u


class FormalCElem:
    """Polynomial in t of degree < T with coefficients in the base ring."""

    __slots__ = ("base", "T", "coeffs")

    def __init__(self, base, T, coeffs=None, reduce=True):
        self.base = base
        self.T = T
        if coeffs is None:
            coeffs = {}
        if reduce:
            coeffs = {k: v for k, v in coeffs.items() if k < T and not v.droppable()}
        self.coeffs = coeffs

    @classmethod
    def scalar(cls, base, T, s):
        return cls(base, T, {0: s})

    @classmethod
    def t_times(cls, base, T, s):
        return cls(base, T, {1: s})

    def _zip(self, other, op):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            if k in out:
                out[k] = getattr(out[k], op)(v)
            else:
                out[k] = v if op == "__add__" else -v
        return FormalCElem(self.base, self.T, out)

    def __add__(self, other):
        return self._zip(other, "__add__")

    def __sub__(self, other):
        return self._zip(other, "__sub__")

    def __neg__(self):
        return FormalCElem(self.base, self.T, {k: -v for k, v in self.coeffs.items()}, reduce=False)

    def __mul__(self, other):
        out = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                if i + j >= self.T:
                    continue
                prod = a * b
                k = i + j
                out[k] = out[k] + prod if k in out else prod
        return FormalCElem(self.base, self.T, out)

    def mul_scalar(self, s):
        return FormalCElem(self.base, self.T, {k: v * s for k, v in self.coeffs.items()})

    def smul(self, n):
        return FormalCElem(self.base, self.T, {k: v.smul(n) for k, v in self.coeffs.items()})

    def is_zero(self):
        return all(v.is_zero() for v in self.coeffs.values())

    def storage_zero(self):
        return not self.coeffs

    def droppable(self):
        return not self.coeffs

    @property
    def truncated(self):
        return any(v.truncated for v in self.coeffs.values())

    def eq(self, other):
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, FormalCElem):
            return NotImplemented
        return self.eq(other)

    def __hash__(self):
        raise TypeError("FormalCElem compares at precision; not hashable")

    def subs_t(self, t_img):
        """Substitute t -> t_img (no constant term), coefficients untouched."""
        if 0 in t_img.coeffs:
            raise ValueError("substitution target must have positive t-order")
        out = FormalCElem(self.base, self.T)
        power = FormalCElem.scalar(self.base, self.T, self.base.one())
        for k in range(0, max(self.coeffs, default=-1) + 1):
            if k in self.coeffs:
                out = out + power.mul_scalar(self.coeffs[k])
            power = power * t_img
        return out

    def coeff(self, k):
        if k in self.coeffs:
            return self.coeffs[k]
        return self.base.zero()

    def residual_valuation(self):
        """Smallest coefficient valuation in pi-units; None if zero."""
        best = None
        for v in self.coeffs.values():
            mv = v.min_val()
            if mv is not None and (best is None or mv < best):
                best = mv
        return best

    def __repr__(self):
        return f"FormalCElem({self.coeffs}, T={self.T})"


class FormalRing:
    """Ring handle for matrices whose entries are truncated t-series."""

    __slots__ = ("base", "T")

    def __init__(self, base, T):
        self.base = base
        self.T = T

    @property
    def cfg(self):
        return self.base.cfg

    def zero(self):
        return FormalCElem(self.base, self.T)

    def one(self):
        return FormalCElem.scalar(self.base, self.T, self.base.one())

    def from_k(self, x):
        return FormalCElem.scalar(self.base, self.T, self.base.from_k(x))

    def __repr__(self):
        return f"FormalRing({self.base!r}, T={self.T})"


def sigma_t(base, s, T=None, alpha=None):
    """sigma(t) = chi t (1 - alpha c t)^{-1} expanded to order T.

    alpha is the twist unit of the 0th face map; it defaults to
    beta = pi E'(pi), the twist of the logarithmic normalization.
    """
    from .base import KElem

    cfg = s.cfg
    T = cfg.cutoffs.T if T is None else T
    if alpha is None:
        alpha = KElem(cfg.beta, 0)
    ac = alpha.smul(s.c)
    coeffs = {}
    power = cfg.k_from_int(s.chi)
    for k in range(1, T):
        coeffs[k] = base.from_k(power)
        power = power * ac
    return FormalCElem(base, T, coeffs)


def galois_act_t(s, x, alpha=None):
    """Apply sigma to a t-series coefficientwise in the derived action."""
    if s.c == 0 and s.chi == 1:
        return x
    return x.subs_t(sigma_t(x.base, s, T=x.T, alpha=alpha))
