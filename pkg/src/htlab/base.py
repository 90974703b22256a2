"""Exact truncated arithmetic for the base rings of the laboratory.

Everything downstream works over one of

    W = W(F_{p^f})            (unramified coefficients, Frobenius phi)
    O_K = W[u]/(E(u))         (monogenic Eisenstein extension, uniformizer pi)
    K = O_K[1/p]              (fraction field, elements p^{-shift} * unit)

at a declared absolute p-adic precision.  Elements carry their attained
precision with them; operations never report more digits than they actually
know.  Valuations are measured in pi-units, so v(pi) = 1 and v(p) = e.
"""

import math
from dataclasses import dataclass

from .errors import (
    NotAUnit,
    NotEisenstein,
    NotPrime,
    PrecisionExhausted,
)


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# W(F_{p^f})
#
# f = 1: elements are plain ints mod p^prec.
# f > 1: length-f tuples of ints, coordinates with respect to 1, g, ..,
# g^{f-1}, where g generates the unramified extension.  The modulus is the
# lexicographically least monic lift of an irreducible polynomial over F_p,
# which makes the representation deterministic across runs.
# ---------------------------------------------------------------------------


def _poly_mulmod_p(a, b, modpoly, p):
    f = len(modpoly)
    c = [0] * (2 * f - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                c[i + j] = (c[i + j] + ai * bj) % p
    for m in range(2 * f - 2, f - 1, -1):
        w = c[m]
        if w:
            c[m] = 0
            for j in range(f):
                c[m - f + j] = (c[m - f + j] - w * modpoly[j]) % p
    return tuple(c[:f])


def _poly_powmod_p(a, n, modpoly, p):
    f = len(modpoly)
    r = (1,) + (0,) * (f - 1)
    while n:
        if n & 1:
            r = _poly_mulmod_p(r, a, modpoly, p)
        a = _poly_mulmod_p(a, a, modpoly, p)
        n >>= 1
    return r


def _irreducible_mod_p(modpoly, p):
    # x^(p^f) == x mod (p, m) and x^(p^(f/r)) != x for prime r | f.
    f = len(modpoly)
    x = ((0, 1) + (0,) * (f - 2))[:f]
    if f == 1:
        return True
    y = _poly_powmod_p(x, p**f, modpoly, p)
    if y != x:
        return False
    for r in range(2, f + 1):
        if f % r == 0 and _is_prime(r):
            y = _poly_powmod_p(x, p ** (f // r), modpoly, p)
            if y == x:
                return False
    return True


class WittRing:
    """Arithmetic context for W(F_{p^f}) truncated at p^N."""

    def __init__(self, p, f, N):
        self.p = p
        self.f = f
        self.N = N
        self.q = p**f
        if f > 1:
            self.modpoly = self._find_modulus()
            self._frob_g = None  # filled lazily; needs inversion below
        else:
            self.modpoly = None

    def _find_modulus(self):
        # least-lex (c_0, .., c_{f-1}) with x^f + sum c_i x^i irreducible
        p, f = self.p, self.f
        idx = [0] * f
        while True:
            cand = tuple(idx)
            if _irreducible_mod_p(cand, p):
                return cand
            i = 0
            while i < f and idx[i] == p - 1:
                idx[i] = 0
                i += 1
            if i == f:
                raise RuntimeError("no irreducible modulus found")
            idx[i] += 1

    # -- raw element ops; M is the modulus p^prec ---------------------------

    def zero(self):
        return 0 if self.f == 1 else (0,) * self.f

    def one(self):
        return 1 if self.f == 1 else (1,) + (0,) * (self.f - 1)

    def from_int(self, n, M):
        n %= M
        return n if self.f == 1 else (n,) + (0,) * (self.f - 1)

    def red(self, a, M):
        if self.f == 1:
            return a % M
        return tuple(x % M for x in a)

    def add(self, a, b, M):
        if self.f == 1:
            return (a + b) % M
        return tuple((x + y) % M for x, y in zip(a, b))

    def sub(self, a, b, M):
        if self.f == 1:
            return (a - b) % M
        return tuple((x - y) % M for x, y in zip(a, b))

    def neg(self, a, M):
        if self.f == 1:
            return (-a) % M
        return tuple((-x) % M for x in a)

    def smul(self, n, a, M):
        if self.f == 1:
            return (n * a) % M
        return tuple((n * x) % M for x in a)

    def mul(self, a, b, M):
        if self.f == 1:
            return (a * b) % M
        f = self.f
        c = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    c[i + j] += ai * bj
        for m in range(2 * f - 2, f - 1, -1):
            w = c[m] % M
            if w:
                c[m] = 0
                for j in range(f):
                    c[m - f + j] -= w * self.modpoly[j]
        return tuple(x % M for x in c[:f])

    def pow(self, a, n, M):
        r = self.one() if self.f > 1 else 1 % M
        while n:
            if n & 1:
                r = self.mul(r, a, M)
            a = self.mul(a, a, M)
            n >>= 1
        return r

    def is_zero(self, a, M):
        if self.f == 1:
            return a % M == 0
        return all(x % M == 0 for x in a)

    def val(self, a, prec):
        """p-adic valuation; None when indistinguishable from 0 at prec digits."""
        M = self.p**prec
        if self.is_zero(a, M):
            return None
        coords = (a,) if self.f == 1 else a
        v = prec
        for x in coords:
            x %= M
            if x:
                w = 0
                while x % self.p == 0:
                    x //= self.p
                    w += 1
                v = min(v, w)
        return v

    def div_p_exact(self, a, M):
        # caller guarantees divisibility; result taken mod M
        if self.f == 1:
            return (a // self.p) % M
        return tuple((x // self.p) % M for x in a)

    def inv(self, a, prec):
        """Inverse of a unit mod p^prec (Newton from the residue-field inverse)."""
        p, f = self.p, self.f
        M = p**prec
        if self.val(a, prec) != 0:
            raise NotAUnit("not a unit in W")
        if f == 1:
            return pow(a, -1, M)
        z = _poly_powmod_p(self.red(a, p), self.q - 2, self.modpoly, p)
        k = 1
        while k < prec:
            k = min(2 * k, prec)
            Mk = p**k
            az = self.mul(a, z, Mk)
            two_minus = self.sub(self.from_int(2, Mk), az, Mk)
            z = self.mul(z, two_minus, Mk)
        return self.red(z, M)

    # -- Frobenius ----------------------------------------------------------

    def _frobenius_generator(self):
        """phi(g): the root of the modulus congruent to g^p mod p."""
        p, f, N = self.p, self.f, self.N
        m = self.modpoly  # low coefficients; leading 1 implied
        r = self.pow((0, 1) + (0,) * (f - 2), p, p)

        def m_at(x, M):
            # x^f + sum m_j x^j
            acc = self.pow(x, f, M)
            xp = self.one()
            for j in range(f):
                if m[j]:
                    acc = self.add(acc, self.smul(m[j], xp, M), M)
                xp = self.mul(xp, x, M)
            return acc

        def mprime_at(x, M):
            acc = self.smul(f, self.pow(x, f - 1, M), M)
            xp = self.one()
            for j in range(1, f):
                if m[j]:
                    acc = self.add(acc, self.smul(j * m[j], xp, M), M)
                xp = self.mul(xp, x, M)
            return acc

        k = 1
        while k < N:
            k = min(2 * k, N)
            M = p**k
            corr = self.mul(m_at(r, M), self.inv(mprime_at(r, M), k), M)
            r = self.sub(r, corr, M)
        return r

    def frob(self, a, k, prec):
        """phi^k; phi is Z_p-linear with phi(g^i) = phi(g)^i, phi^{-1} = phi^{f-1}."""
        f = self.f
        if f == 1:
            return self.red(a, self.p**prec)
        k %= f
        if k == 0:
            return self.red(a, self.p**prec)
        if self._frob_g is None:
            self._frob_g = self._frobenius_generator()
        M = self.p**prec
        out = a
        for _ in range(k):
            h = self._frob_g
            acc = self.from_int(out[0], M)
            hp = h
            for i in range(1, f):
                acc = self.add(acc, self.smul(out[i], hp, M), M)
                hp = self.mul(hp, h, M)
            out = acc
        return out

    def teichmuller(self, a, prec):
        """Fixpoint of x -> x^(p^f) over the residue a (Hensel limit)."""
        M = self.p**prec
        x = self.red(a, M) if self.f > 1 else a % M
        for _ in range(prec + 1):
            y = self.pow(x, self.q, M)
            if y == x:
                break
            x = y
        return x


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cutoffs:
    D: int = 5       # divided-power total degree
    T: int = 6       # truncation order in the period variable t
    Dy: int = 4      # degree bound in chart / period polynomial variables
    n_max: int = 64  # horizon for convergence certificates

    def validate(self):
        if min(self.D, self.T, self.Dy, self.n_max) < 1:
            raise ValueError("all cutoffs must be >= 1")


class BaseConfig:
    """Base prism data: p, Eisenstein E(u), residue degree f, precision N.

    E_coeffs lists the lower coefficients of E in ascending order, so
    E(u) = u^e + E_coeffs[e-1] u^(e-1) + ... + E_coeffs[0].  Eisenstein means
    every listed coefficient is divisible by p and the constant one is not
    divisible by p^2.
    """

    def __init__(self, p, E_coeffs, f=1, N=8, cutoffs=None):
        if not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        E_coeffs = tuple(int(c) for c in E_coeffs)
        e = len(E_coeffs)
        if e < 1:
            raise NotEisenstein("E must have positive degree")
        for c in E_coeffs:
            if c % p != 0:
                raise NotEisenstein(f"coefficient {c} not divisible by {p}")
        if E_coeffs[0] % (p * p) == 0:
            raise NotEisenstein("constant term divisible by p^2")
        if N < 2:
            raise ValueError("precision N must be >= 2")
        if f < 1:
            raise ValueError("residue degree f must be >= 1")
        self.p = p
        self.e = e
        self.E_coeffs = E_coeffs
        self.f = f
        self.N = N
        self.cutoffs = cutoffs or Cutoffs()
        self.cutoffs.validate()
        self.w = WittRing(p, f, N)
        # pi^e = -p * B with B = sum (E_coeffs[i]/p) pi^i; B is a unit.
        self.B_int_coeffs = tuple(c // p for c in E_coeffs)
        self.pi = self.ok_monomial(1) if e > 1 else self.ok_from_int(-E_coeffs[0])
        self.Ep = self._derivative_at_pi()
        self.beta = self.pi * self.Ep
        self._pi_inv = None
        self._beta_inv = None
        self._neg_b_inv = None

    # -- constructors -------------------------------------------------------

    def ok_zero(self, prec=None):
        prec = self.N if prec is None else prec
        return OkElem(self, (self.w.zero(),) * self.e, prec)

    def ok_one(self, prec=None):
        prec = self.N if prec is None else prec
        z = [self.w.zero()] * self.e
        z[0] = self.w.from_int(1, self.p**prec)
        return OkElem(self, tuple(z), prec)

    def ok_from_int(self, n, prec=None):
        prec = self.N if prec is None else prec
        z = [self.w.zero()] * self.e
        z[0] = self.w.from_int(n, self.p**prec)
        return OkElem(self, tuple(z), prec)

    def ok_from_coeffs(self, coeffs, prec=None):
        """coeffs: ints (or W elements) for 1, pi, .., pi^(e-1)."""
        prec = self.N if prec is None else prec
        M = self.p**prec
        out = []
        for c in coeffs:
            if isinstance(c, int):
                out.append(self.w.from_int(c, M))
            else:
                out.append(self.w.red(c, M))
        while len(out) < self.e:
            out.append(self.w.zero())
        if len(out) > self.e:
            raise ValueError("too many coefficients")
        return OkElem(self, tuple(out), prec)

    def ok_monomial(self, i, prec=None):
        prec = self.N if prec is None else prec
        z = [self.w.zero()] * self.e
        z[i] = self.w.from_int(1, self.p**prec)
        return OkElem(self, tuple(z), prec)

    def k_zero(self, prec=None):
        return KElem(self.ok_zero(prec), 0)

    def k_one(self, prec=None):
        return KElem(self.ok_one(prec), 0)

    def k_from_int(self, n, prec=None):
        return KElem(self.ok_from_int(n, prec), 0)

    def k_pi(self):
        return KElem(self.pi, 0)

    def k_beta(self):
        return KElem(self.beta, 0)

    # -- derived constants --------------------------------------------------

    def _derivative_at_pi(self):
        # E'(pi) = e pi^(e-1) + sum_{i>=1} i E_coeffs[i] pi^(i-1); degree < e
        M = self.p**self.N
        coeffs = [self.w.zero()] * self.e
        coeffs[self.e - 1] = self.w.from_int(self.e, M)
        for i in range(1, self.e):
            c = i * self.E_coeffs[i]
            coeffs[i - 1] = self.w.add(coeffs[i - 1], self.w.from_int(c, M), M)
        return OkElem(self, tuple(coeffs), self.N)

    def pi_inv(self):
        """1/pi as a K element: p^{-1} * (-pi^(e-1) * B^{-1})."""
        if self._pi_inv is None:
            if self.e == 1:
                b0 = self.ok_from_int(self.B_int_coeffs[0])
                self._pi_inv = KElem(-b0.inv(), 1)
            else:
                B = self.ok_from_coeffs(self.B_int_coeffs)
                num = -(self.ok_monomial(self.e - 1) * B.inv())
                self._pi_inv = KElem(num, 1)
        return self._pi_inv

    def beta_inv(self):
        if self._beta_inv is None:
            self._beta_inv = KElem(self.beta, 0).inv()
        return self._beta_inv

    def neg_b_inv(self):
        """(-B)^{-1}, the unit with pi^e * (-B)^{-1} = p."""
        if self._neg_b_inv is None:
            B = self.ok_from_coeffs(self.B_int_coeffs)
            self._neg_b_inv = (-B).inv()
        return self._neg_b_inv

    # -- serialization ------------------------------------------------------

    def to_json(self):
        c = self.cutoffs
        return {
            "p": str(self.p),
            "E_coeffs": [str(x) for x in self.E_coeffs],
            "f": str(self.f),
            "N": str(self.N),
            "cutoffs": {"D": str(c.D), "T": str(c.T), "Dy": str(c.Dy), "n_max": str(c.n_max)},
        }

    @classmethod
    def from_json(cls, d):
        cut = d.get("cutoffs", {})
        cutoffs = Cutoffs(
            D=int(cut.get("D", 5)),
            T=int(cut.get("T", 6)),
            Dy=int(cut.get("Dy", 4)),
            n_max=int(cut.get("n_max", 64)),
        )
        return cls(
            int(d["p"]),
            [int(x) for x in d["E_coeffs"]],
            f=int(d.get("f", 1)),
            N=int(d.get("N", 8)),
            cutoffs=cutoffs,
        )

    def __repr__(self):
        return f"BaseConfig(p={self.p}, e={self.e}, f={self.f}, N={self.N})"


def make_base_config(p, E_coeffs, f=1, precision=8, cutoffs=None):
    return BaseConfig(p, E_coeffs, f=f, N=precision, cutoffs=cutoffs)


# ---------------------------------------------------------------------------
# O_K elements
# ---------------------------------------------------------------------------


class OkElem:
    """Element of O_K known modulo p^prec; coeffs are W elements for 1..pi^(e-1)."""

    __slots__ = ("cfg", "coeffs", "prec")

    def __init__(self, cfg, coeffs, prec, reduce=True):
        self.cfg = cfg
        self.prec = prec
        if reduce:
            M = cfg.p**prec if prec > 0 else 1
            coeffs = tuple(cfg.w.red(c, M) for c in coeffs)
        self.coeffs = coeffs

    def _bin(self, other, op):
        cfg = self.cfg
        prec = min(self.prec, other.prec)
        M = cfg.p**prec if prec > 0 else 1
        w = cfg.w
        f = getattr(w, op)
        return OkElem(cfg, tuple(f(a, b, M) for a, b in zip(self.coeffs, other.coeffs)), prec, reduce=False)

    def __add__(self, other):
        return self._bin(other, "add")

    def __sub__(self, other):
        return self._bin(other, "sub")

    def __neg__(self):
        cfg = self.cfg
        M = cfg.p**self.prec if self.prec > 0 else 1
        return OkElem(cfg, tuple(cfg.w.neg(c, M) for c in self.coeffs), self.prec, reduce=False)

    def __mul__(self, other):
        cfg = self.cfg
        e, w, p = cfg.e, cfg.w, cfg.p
        prec = min(self.prec, other.prec)
        if prec <= 0:
            return cfg.ok_zero(0)
        M = p**prec
        if e == 1:
            return OkElem(cfg, (w.mul(self.coeffs[0], other.coeffs[0], M),), prec, reduce=False)
        tmp = [w.zero()] * (2 * e - 1)
        for i, a in enumerate(self.coeffs):
            if not w.is_zero(a, M):
                for j, b in enumerate(other.coeffs):
                    tmp[i + j] = w.add(tmp[i + j], w.mul(a, b, M), M)
        # reduce via pi^e = -p*B
        for m in range(2 * e - 2, e - 1, -1):
            c = tmp[m]
            if not w.is_zero(c, M):
                tmp[m] = w.zero()
                for j in range(e):
                    bj = cfg.B_int_coeffs[j]
                    if bj:
                        tmp[m - e + j] = w.sub(tmp[m - e + j], w.smul(p * bj, c, M), M)
        return OkElem(cfg, tuple(tmp[:e]), prec, reduce=False)

    def smul(self, n):
        cfg = self.cfg
        M = cfg.p**self.prec if self.prec > 0 else 1
        return OkElem(cfg, tuple(cfg.w.smul(n, c, M) for c in self.coeffs), self.prec, reduce=False)

    def scale_pk(self, k):
        """Exact multiplication by p^k (k >= 0); gains k digits of precision."""
        if k == 0:
            return self
        cfg = self.cfg
        prec = self.prec + k
        M = cfg.p**prec
        pk = cfg.p**k
        return OkElem(cfg, tuple(cfg.w.smul(pk, c, M) for c in self.coeffs), prec, reduce=False)

    def is_zero(self):
        if self.prec <= 0:
            raise PrecisionExhausted("no digits left")
        M = self.cfg.p**self.prec
        return all(self.cfg.w.is_zero(c, M) for c in self.coeffs)

    def storage_zero(self):
        # all stored digits vanish; no precision semantics
        if self.cfg.f == 1:
            return not any(self.coeffs)
        return not any(any(c) for c in self.coeffs)

    def clamp_prec(self, prec):
        if prec >= self.prec:
            return self
        M = self.cfg.p**prec
        return OkElem(self.cfg, [self.cfg.w.red(c, M) for c in self.coeffs], prec)

    def divisible_p(self):
        M = self.cfg.p**self.prec
        w = self.cfg.w
        for c in self.coeffs:
            v = w.val(c, self.prec)
            if v == 0:
                return False
        return True

    def div_p_exact(self):
        """Divide by p; caller guarantees divisibility.  Loses one digit."""
        cfg = self.cfg
        if self.prec <= 1:
            raise PrecisionExhausted("division by p exhausts precision")
        M = cfg.p ** (self.prec - 1)
        return OkElem(cfg, tuple(cfg.w.div_p_exact(c, M) for c in self.coeffs), self.prec - 1, reduce=False)

    def val(self):
        """pi-adic valuation (v(p) = e); None if zero at this precision."""
        if self.prec <= 0:
            raise PrecisionExhausted("no digits left")
        e = self.cfg.e
        best = None
        for i, c in enumerate(self.coeffs):
            v = self.cfg.w.val(c, self.prec)
            if v is not None:
                cand = e * v + i
                if best is None or cand < best:
                    best = cand
        return best

    def inv(self):
        """Newton inversion of a unit (valuation 0)."""
        cfg = self.cfg
        if self.val() != 0:
            raise NotAUnit("O_K inversion requires valuation 0")
        w = cfg.w
        z0 = w.inv(self.coeffs[0], self.prec)  # inverse of the constant W part
        z = cfg.ok_from_coeffs([z0], self.prec)
        one = cfg.ok_one(self.prec)
        steps = max(1, math.ceil(math.log2(max(2, cfg.e * self.prec))) + 1)
        for _ in range(steps):
            z = z * (one + (one - self * z))
        return z

    def eq(self, other):
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, OkElem):
            return NotImplemented
        return self.eq(other)

    def __hash__(self):
        raise TypeError("OkElem compares at precision; not hashable")

    def __repr__(self):
        return f"OkElem({list(self.coeffs)}, prec={self.prec})"


def ok_arith(x, y, op):
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


def ok_invert(x):
    return x.inv()


def ok_valuation(x):
    return x.val()


# ---------------------------------------------------------------------------
# K elements
# ---------------------------------------------------------------------------


class KElem:
    """p^{-shift} * num with shift >= 0; normalized so p does not divide num
    while shift > 0.  Absolute p-adic precision is num.prec - shift."""

    __slots__ = ("num", "shift")

    def __init__(self, num, shift=0, norm=True):
        if norm:
            while shift > 0 and num.prec > 1 and num.divisible_p():
                num = num.div_p_exact()
                shift -= 1
        self.num = num
        self.shift = shift

    @property
    def cfg(self):
        return self.num.cfg

    @property
    def abs_prec(self):
        return self.num.prec - self.shift

    def __add__(self, other):
        s = max(self.shift, other.shift)
        n1 = self.num.scale_pk(s - self.shift)
        n2 = other.num.scale_pk(s - other.shift)
        return KElem(n1 + n2, s)

    def __sub__(self, other):
        s = max(self.shift, other.shift)
        n1 = self.num.scale_pk(s - self.shift)
        n2 = other.num.scale_pk(s - other.shift)
        return KElem(n1 - n2, s)

    def __neg__(self):
        return KElem(-self.num, self.shift, norm=False)

    def __mul__(self, other):
        return KElem(self.num * other.num, self.shift + other.shift)

    def smul(self, n):
        return KElem(self.num.smul(n), self.shift)

    def mul_ok(self, ok):
        return KElem(self.num * ok, self.shift)

    def div_int(self, n):
        """Divide by a nonzero integer; p-part raises the shift."""
        if n == 0:
            raise ZeroDivisionError
        sign = 1
        if n < 0:
            sign = -1
            n = -n
        p = self.cfg.p
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        num = self.num
        if n > 1:
            ninv = pow(n, -1, p**num.prec)
            num = num.smul(ninv)
        if sign < 0:
            num = -num
        return KElem(num, self.shift + k)

    def div_pi_exact(self, v):
        """Divide by pi^v, for an element of valuation >= v.

        Whole blocks of e use pi^e = -p B, so they cost only a shift and a
        unit multiply; just the remainder v mod e pays one p-digit each.
        """
        if v <= 0:
            return self
        cfg = self.cfg
        k, r = divmod(v, cfg.e)
        out = self
        if k:
            m = cfg.neg_b_inv()
            acc = m
            for _ in range(k - 1):
                acc = acc * m
            out = KElem(out.num * acc, out.shift + k)
        piv = cfg.pi_inv()
        for _ in range(r):
            out = out * piv
        return out

    def is_zero(self):
        return self.num.is_zero()

    def val_pi(self):
        v = self.num.val()
        if v is None:
            return None
        return v - self.cfg.e * self.shift

    def min_val(self):
        # scalar-protocol name shared with chart elements
        return self.val_pi()

    def storage_zero(self):
        return self.num.storage_zero()

    def droppable(self):
        # sparse containers may forget this scalar: it is zero as stored and
        # carries at least the ambient precision, so nothing is lost
        return self.num.prec - self.shift >= self.cfg.N and self.num.storage_zero()

    def clamp_prec(self, prec):
        """Cap the absolute precision at prec p-digits."""
        if self.num.prec - self.shift <= prec:
            return self
        return KElem(self.num.clamp_prec(prec + self.shift), self.shift)

    @property
    def truncated(self):
        return False

    def integral(self):
        """val >= 0 (zero-at-precision counts as integral)."""
        v = self.val_pi()
        return v is None or v >= 0

    def to_ok(self):
        if self.shift != 0:
            raise NotAUnit("element is not integral")
        return self.num

    def inv(self):
        cfg = self.cfg
        if self.val_pi() is None:
            raise NotAUnit("cannot invert something indistinguishable from 0")
        if self.shift > 0:
            # (p^-s u)^-1 = p^s u^-1 with u integral
            ui = KElem(self.num, 0, norm=False).inv()
            if ui.shift >= self.shift:
                return KElem(ui.num, ui.shift - self.shift, norm=False)
            return KElem(ui.num.scale_pk(self.shift - ui.shift), 0, norm=False)
        w = self.num.val()
        if w == 0:
            return KElem(self.num.inv(), 0, norm=False)
        # peel pi factors: x^-1 = (x pi^-w)^-1 * pi^-w
        piv = cfg.pi_inv()
        x = self
        acc = cfg.k_one(self.num.prec)
        for _ in range(w):
            x = x * piv
            acc = acc * piv
        return x.inv() * acc

    def eq(self, other):
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, KElem):
            return NotImplemented
        return self.eq(other)

    def __hash__(self):
        raise TypeError("KElem compares at precision; not hashable")

    def __repr__(self):
        return f"KElem(p^-{self.shift} * {self.num!r})"


# ---------------------------------------------------------------------------
# Witt vectors with explicit Frobenius bookkeeping
# ---------------------------------------------------------------------------


class WittElem:
    """Element of W(F_{p^f}) mod p^prec plus a record of applied phi-twists."""

    __slots__ = ("cfg", "w", "prec", "frob_power")

    def __init__(self, cfg, w, prec=None, frob_power=0):
        self.cfg = cfg
        self.prec = cfg.N if prec is None else prec
        self.w = cfg.w.red(w, cfg.p**self.prec) if self.prec > 0 else w
        self.frob_power = frob_power % cfg.f

    def _M(self):
        return self.cfg.p**self.prec

    def __add__(self, other):
        prec = min(self.prec, other.prec)
        return WittElem(self.cfg, self.cfg.w.add(self.w, other.w, self.cfg.p**prec), prec)

    def __sub__(self, other):
        prec = min(self.prec, other.prec)
        return WittElem(self.cfg, self.cfg.w.sub(self.w, other.w, self.cfg.p**prec), prec)

    def __neg__(self):
        return WittElem(self.cfg, self.cfg.w.neg(self.w, self._M()), self.prec)

    def __mul__(self, other):
        prec = min(self.prec, other.prec)
        return WittElem(self.cfg, self.cfg.w.mul(self.w, other.w, self.cfg.p**prec), prec)

    def pow(self, n):
        return WittElem(self.cfg, self.cfg.w.pow(self.w, n, self._M()), self.prec)

    def smul(self, n):
        return WittElem(self.cfg, self.cfg.w.smul(n, self.w, self._M()), self.prec)

    def scale_pk(self, k):
        """Exact multiplication by p^k (k >= 0); gains k digits."""
        if k == 0:
            return self
        cfg = self.cfg
        prec = self.prec + k
        return WittElem(cfg, cfg.w.smul(cfg.p**k, self.w, cfg.p**prec), prec)

    def is_zero(self):
        if self.prec <= 0:
            raise PrecisionExhausted("no digits left")
        return self.cfg.w.is_zero(self.w, self._M())

    def val(self):
        return self.cfg.w.val(self.w, self.prec)

    def is_unit(self):
        return self.val() == 0

    def inv(self):
        return WittElem(self.cfg, self.cfg.w.inv(self.w, self.prec), self.prec)

    def div_p_exact(self):
        if self.prec <= 1:
            raise PrecisionExhausted("division by p exhausts precision")
        return WittElem(self.cfg, self.cfg.w.div_p_exact(self.w, self.cfg.p ** (self.prec - 1)), self.prec - 1)

    def eq(self, other):
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, WittElem):
            return NotImplemented
        return self.eq(other)

    def __hash__(self):
        raise TypeError("WittElem compares at precision; not hashable")

    def __repr__(self):
        return f"WittElem({self.w}, prec={self.prec}, phi^{self.frob_power})"


def teichmuller(cfg, a, prec=None):
    """Teichmuller lift of a residue; fixed by x -> x^(p^f)."""
    prec = cfg.N if prec is None else prec
    if isinstance(a, WittElem):
        a = a.w
    return WittElem(cfg, cfg.w.teichmuller(a, prec), prec)


def frobenius(x, k=1):
    """phi^k on W(F_{p^f}); k may be negative (phi^{-1} = phi^{f-1})."""
    cfg = x.cfg
    k %= cfg.f
    return WittElem(cfg, cfg.w.frob(x.w, k, x.prec), x.prec, frob_power=x.frob_power + k)


def teich_factor(cfg, u, prec=None):
    """Split a Witt unit as (teichmuller part, one-unit part).

    Returns (t, u1) with u = t * u1, t fixed by the p^f power map, and
    u1 congruent to 1 mod p.  The input may be an int or a WittElem.
    """
    prec = cfg.N if prec is None else prec
    if not isinstance(u, WittElem):
        u = WittElem(cfg, cfg.w.from_int(u, cfg.p**prec), prec)
    if u.val() != 0:
        raise NotAUnit("cannot factor a non-unit")
    t = teichmuller(cfg, u, prec)
    u1 = u * t.inv()
    return t, u1
