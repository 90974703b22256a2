"""Coefficient base rings: a point, or a small semistable chart.

Point mode is the fast path: scalars are plain K elements and the factory
methods hand them straight back.  Chart mode models

    O_K<T_0, ..., T_r, T_{r+1}^{+-1}, ..., T_d^{+-1}> / (T_0 ... T_r - pi)

truncated at total degree Dy.  Monomials are exponent tuples of length d+1;
positions 0..r must stay nonnegative, the rest are Laurent.  The relation is
applied as a normal form: the minimum exponent over positions 0..r is
stripped off and absorbed into the coefficient as a power of pi, so every
stored monomial has min(e_0..e_r) = 0.  Products that leave the degree box
are dropped and flagged, never silently wrapped.

Both kinds of scalar speak the same protocol (arithmetic dunders, smul,
div_int, is_zero, storage_zero, droppable, min_val, integral, truncated) so
the pd rings, matrices, and t-series above never branch on the mode.
droppable is the sparse-drop rule: a stored zero may be forgotten only when
it still carries the ambient precision, otherwise dropping it would silently
sharpen later comparisons.
"""

from .base import KElem
from .errors import BadIndex


class ChartRing:
    __slots__ = ("cfg", "mode", "d", "r", "Dy")

    def __init__(self, cfg, mode="point", d=0, r=0, Dy=None):
        if mode not in ("point", "chart"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "chart":
            if not (0 <= r <= d):
                raise BadIndex("need 0 <= r <= d")
            if Dy is None:
                Dy = cfg.cutoffs.Dy
        self.cfg = cfg
        self.mode = mode
        self.d = d if mode == "chart" else 0
        self.r = r if mode == "chart" else 0
        self.Dy = Dy if mode == "chart" else None

    @property
    def is_point(self):
        return self.mode == "point"

    def zero(self):
        if self.is_point:
            return self.cfg.k_zero()
        return ChartElem(self, {})

    def one(self):
        return self.from_k(self.cfg.k_one())

    def from_int(self, n):
        return self.from_k(self.cfg.k_from_int(n))

    def from_k(self, x):
        if self.is_point:
            return x
        return ChartElem(self, {(0,) * (self.d + 1): x})

    def var(self, i, power=1):
        """T_i^power as an element; Laurent powers only past position r."""
        if self.is_point:
            raise BadIndex("point base has no chart variables")
        if not (0 <= i <= self.d):
            raise BadIndex(f"variable index {i} out of range")
        exps = [0] * (self.d + 1)
        exps[i] = power
        return self.monomial(tuple(exps))

    def monomial(self, exps, coeff=None):
        if self.is_point:
            raise BadIndex("point base has no chart variables")
        if coeff is None:
            coeff = self.cfg.k_one()
        return ChartElem(self, {tuple(exps): coeff})

    def eq_ring(self, other):
        return (
            self.cfg is other.cfg
            and self.mode == other.mode
            and self.d == other.d
            and self.r == other.r
        )

    def to_json(self):
        if self.is_point:
            return {"mode": "point"}
        return {"mode": "chart", "d": str(self.d), "r": str(self.r)}

    @classmethod
    def from_json(cls, cfg, data):
        mode = data["mode"]
        if mode == "point":
            return cls(cfg, "point")
        return cls(cfg, "chart", d=int(data["d"]), r=int(data["r"]))

    def __repr__(self):
        if self.is_point:
            return "ChartRing(point)"
        return f"ChartRing(chart d={self.d} r={self.r} Dy={self.Dy})"


class ChartElem:
    __slots__ = ("ring", "coeffs", "truncated")

    def __init__(self, ring, coeffs, truncated=False):
        norm = {}
        for exps, c in coeffs.items():
            if c.droppable():
                continue
            if len(exps) != ring.d + 1:
                raise BadIndex("wrong monomial length")
            m = min(exps[: ring.r + 1])
            if m < 0:
                raise BadIndex("negative exponent in a non-Laurent position")
            if m > 0:
                # apply T_0 ... T_r = pi
                exps = tuple(e - m if i <= ring.r else e for i, e in enumerate(exps))
                pim = KElem(ring.cfg.pi, 0)
                for _ in range(m - 1):
                    pim = pim * KElem(ring.cfg.pi, 0)
                c = c * pim
            if sum(abs(e) for e in exps) > ring.Dy:
                truncated = True
                continue
            if exps in norm:
                c = norm[exps] + c
                if c.droppable():
                    del norm[exps]
                    continue
            norm[exps] = c
        self.ring = ring
        self.coeffs = norm
        self.truncated = truncated

    def _combine(self, other, sub):
        out = dict(self.coeffs)
        for exps, c in other.coeffs.items():
            if exps in out:
                s = out[exps] - c if sub else out[exps] + c
                if s.droppable():
                    del out[exps]
                else:
                    out[exps] = s
            else:
                out[exps] = -c if sub else c
        return ChartElem(self.ring, out, self.truncated or other.truncated)

    def __add__(self, other):
        return self._combine(other, False)

    def __sub__(self, other):
        return self._combine(other, True)

    def __neg__(self):
        return ChartElem(self.ring, {e: -c for e, c in self.coeffs.items()}, self.truncated)

    def __mul__(self, other):
        out = {}
        trunc = self.truncated or other.truncated
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                if exps in out:
                    out[exps] = out[exps] + c
                else:
                    out[exps] = c
        return ChartElem(self.ring, out, trunc)

    def smul(self, n):
        return ChartElem(
            self.ring, {e: c.smul(n) for e, c in self.coeffs.items()}, self.truncated
        )

    def div_int(self, n):
        return ChartElem(
            self.ring, {e: c.div_int(n) for e, c in self.coeffs.items()}, self.truncated
        )

    def clamp_prec(self, prec):
        return ChartElem(
            self.ring, {e: c.clamp_prec(prec) for e, c in self.coeffs.items()}, self.truncated
        )

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs.values())

    def storage_zero(self):
        return not self.coeffs

    def droppable(self):
        # constructor already pruned droppable coefficients
        return not self.coeffs

    def min_val(self):
        best = None
        for c in self.coeffs.values():
            v = c.val_pi()
            if v is not None and (best is None or v < best):
                best = v
        return best

    def integral(self):
        return all(c.integral() for c in self.coeffs.values())

    def coeff(self, exps):
        return self.coeffs.get(tuple(exps), self.ring.cfg.k_zero())

    def eq(self, other):
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, ChartElem):
            return NotImplemented
        return self.eq(other)

    def __hash__(self):
        raise TypeError("ChartElem compares at precision; not hashable")

    def __repr__(self):
        parts = []
        for exps in sorted(self.coeffs):
            parts.append(f"{exps}:{self.coeffs[exps]!r}")
        flag = ", truncated" if self.truncated else ""
        return f"ChartElem({{{', '.join(parts)}}}{flag})"
