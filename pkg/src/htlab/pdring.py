"""Truncated divided-power rings underlying the cosimplicial nerve.

Three variants, one per site flavor:

  abs-arith   R{X_1..X_n}           arithmetic directions only
  abs-geom    R{X_1..X_n, Y_{k,j}}  arithmetic and geometric directions
  rel-geom    R{Y_{k,j}}            geometric directions only

with 1 <= j <= n (the cosimplicial degree) and 1 <= k <= d.  A basis monomial
is a product of divided powers v^[a]; multiplication uses
v^[a] v^[b] = C(a+b, a) v^[a+b].  Everything of pd-degree above the cutoff D
is dropped and flagged.  Because all structure maps only raise pd-degree, the
retained graded pieces stay exact, so identity checks below the cutoff are
meaningful even when the flag fires.

The degeneracy-0 face is twisted by a unit alpha, either E'(pi) or
pi E'(pi) = beta depending on whether the boundary is carried logarithmically:

  d^0: X_j |-> (X_{j+1} - X_1) (1 - alpha X_1)^{-1}
       Y_{k,j} |-> (Y_{k,j+1} - Y_{k,1}) (1 - alpha X_1)^{-1}   (abs-geom)
       Y_{k,j} |-> Y_{k,j+1} - Y_{k,1}                          (rel-geom)
  d^i (i > 0): index shift j -> j+1 for j >= i.

evaluate_at_group sends a degree-n element to a t-series by X_j |-> c(s_1..s_j) t
and Y_{k,j} |-> n_k(s_1..s_j) t, with v^[m] |-> v^m / m! in K.  The face maps
and this evaluation are tied together by check_face_evaluation, which is the
oracle certifying the twisted d^0 above against the group law.
"""

from math import comb, factorial

from .errors import AxiomViolation, BadIndex, InsufficientPrecision
from .galois import FormalCElem, galois_act_t

VARIANTS = ("abs-arith", "abs-geom", "rel-geom")


def _key_degree(key):
    return sum(a for _, a in key)


def _merge_keys(k1, k2):
    """Combine two pd monomials; returns (key, integer binomial factor)."""
    d = dict(k1)
    mult = 1
    for v, b in k2:
        a = d.get(v)
        if a is None:
            d[v] = b
        else:
            mult *= comb(a + b, a)
            d[v] = a + b
    return tuple(sorted(d.items())), mult


class PdRing:
    __slots__ = ("cfg", "base", "variant", "degree", "d", "D")

    def __init__(self, cfg, base, variant, degree, d=0, D=None):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        if degree < 0 or d < 0:
            raise BadIndex("degree and d must be nonnegative")
        if variant == "abs-arith":
            d = 0
        self.cfg = cfg
        self.base = base
        self.variant = variant
        self.degree = degree
        self.d = d
        self.D = cfg.cutoffs.D if D is None else D

    @property
    def has_x(self):
        return self.variant != "rel-geom"

    @property
    def has_y(self):
        return self.variant != "abs-arith"

    def bump(self, degree):
        return PdRing(self.cfg, self.base, self.variant, degree, self.d, self.D)

    def eq_ring(self, other):
        return (
            self.cfg is other.cfg
            and self.base.eq_ring(other.base)
            and self.variant == other.variant
            and self.degree == other.degree
            and self.d == other.d
        )

    def x_id(self, j):
        if not self.has_x:
            raise BadIndex("no arithmetic variables in this variant")
        if not (1 <= j <= self.degree):
            raise BadIndex(f"X index {j} out of range")
        return (0, 0, j)

    def y_id(self, k, j):
        if not self.has_y:
            raise BadIndex("no geometric variables in this variant")
        if not (1 <= k <= self.d and 1 <= j <= self.degree):
            raise BadIndex(f"Y index ({k},{j}) out of range")
        return (1, k, j)

    def generators(self):
        out = []
        if self.has_x:
            out.extend(self.x_id(j) for j in range(1, self.degree + 1))
        if self.has_y:
            for k in range(1, self.d + 1):
                out.extend(self.y_id(k, j) for j in range(1, self.degree + 1))
        return out

    def zero(self):
        return PdElement(self, {})

    def one(self):
        return PdElement(self, {(): self.base.one()})

    def from_scalar(self, s):
        return PdElement(self, {(): s})

    def from_k(self, x):
        return self.from_scalar(self.base.from_k(x))

    def from_int(self, n):
        return self.from_scalar(self.base.from_int(n))

    def var(self, vid, exp=1):
        """The basis element v^[exp]."""
        if exp < 0:
            raise BadIndex("divided-power exponents are nonnegative")
        if exp == 0:
            return self.one()
        if exp > self.D:
            return PdElement(self, {}, truncated=True)
        return PdElement(self, {((vid, exp),): self.base.one()})

    def x(self, j, exp=1):
        return self.var(self.x_id(j), exp)

    def y(self, k, j, exp=1):
        return self.var(self.y_id(k, j), exp)

    def __repr__(self):
        return f"PdRing({self.variant}, n={self.degree}, d={self.d}, D={self.D})"


class PdElement:
    __slots__ = ("ring", "coeffs", "truncated")

    def __init__(self, ring, coeffs, truncated=False):
        clean = {}
        for key, c in coeffs.items():
            if c.truncated:
                truncated = True
            if c.droppable():
                continue
            clean[key] = c
        self.ring = ring
        self.coeffs = clean
        self.truncated = truncated

    def _combine(self, other, sub):
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            if key in out:
                s = out[key] - c if sub else out[key] + c
                if s.droppable():
                    del out[key]
                else:
                    out[key] = s
            else:
                out[key] = -c if sub else c
        return PdElement(self.ring, out, self.truncated or other.truncated)

    def __add__(self, other):
        return self._combine(other, False)

    def __sub__(self, other):
        return self._combine(other, True)

    def __neg__(self):
        return PdElement(self.ring, {k: -c for k, c in self.coeffs.items()}, self.truncated)

    def __mul__(self, other):
        ring = self.ring
        D = ring.D
        out = {}
        trunc = self.truncated or other.truncated
        for k1, c1 in self.coeffs.items():
            d1 = _key_degree(k1)
            for k2, c2 in other.coeffs.items():
                if d1 + _key_degree(k2) > D:
                    trunc = True
                    continue
                key, mult = _merge_keys(k1, k2)
                c = c1 * c2
                if mult != 1:
                    c = c.smul(mult)
                if key in out:
                    out[key] = out[key] + c
                else:
                    out[key] = c
        return PdElement(ring, out, trunc)

    def smul(self, n):
        return PdElement(self.ring, {k: c.smul(n) for k, c in self.coeffs.items()}, self.truncated)

    def mul_scalar(self, s):
        return PdElement(self.ring, {k: c * s for k, c in self.coeffs.items()}, self.truncated)

    def div_int(self, n):
        return PdElement(self.ring, {k: c.div_int(n) for k, c in self.coeffs.items()}, self.truncated)

    def coeff(self, key):
        key = tuple(sorted(key))
        if key in self.coeffs:
            return self.coeffs[key]
        return self.ring.base.zero()

    def constant_term(self):
        return self.coeff(())

    def pd_degree(self):
        return max((_key_degree(k) for k in self.coeffs), default=0)

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs.values())

    def storage_zero(self):
        return not self.coeffs

    def droppable(self):
        return not self.coeffs and not self.truncated

    def integral(self):
        return all(c.integral() for c in self.coeffs.values())

    def eq(self, other):
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, PdElement):
            return NotImplemented
        return self.eq(other)

    def __hash__(self):
        raise TypeError("PdElement compares at precision; not hashable")

    def __repr__(self):
        def vname(vid):
            kind, k, j = vid
            return f"X_{j}" if kind == 0 else f"Y_{k}_{j}"

        parts = []
        for key in sorted(self.coeffs):
            mono = "*".join(f"{vname(v)}^[{a}]" for v, a in key) or "1"
            parts.append(f"({self.coeffs[key]!r})*{mono}")
        flag = " +trunc" if self.truncated else ""
        return f"PdElement({' + '.join(parts) or '0'}{flag})"


def pd_power(x, n):
    out = x.ring.one()
    for _ in range(n):
        out = out * x
    return out


def divided_power(x, n):
    """gamma_n(x) = x^n / n! for x with no constant term.

    Computed over K, then integrality is re-certified: an integral input
    must produce an integral output (dropped terms cannot leak downward
    because the product grading is exact below the cutoff).
    """
    if n < 0:
        raise BadIndex("divided-power exponents are nonnegative")
    if n == 0:
        return x.ring.one()
    if n == 1:
        return x
    if () in x.coeffs:
        raise AxiomViolation("pd-constant", "divided powers need positive pd-degree")
    was_integral = x.integral()
    out = pd_power(x, n).div_int(factorial(n))
    if was_integral and not out.integral():
        raise AxiomViolation("pd-integrality", f"gamma_{n} broke integrality")
    return out


class FaceParams:
    """Twist unit for the 0th face: alpha = E'(pi) or pi E'(pi)."""

    __slots__ = ("alpha", "label")

    def __init__(self, alpha, label="custom"):
        self.alpha = alpha
        self.label = label

    @classmethod
    def log(cls, cfg):
        return cls(cfg.k_beta(), "log")

    @classmethod
    def nonlog(cls, cfg):
        from .base import KElem

        return cls(KElem(cfg.Ep, 0), "nonlog")


class FaceContext:
    """One face map with generator images precomputed and gamma-cached.

    Reuse a single context when pushing a whole matrix through the same
    face; the divided-power images of the generators are shared.
    """

    def __init__(self, ring, i, params=None):
        n = ring.degree
        if not (0 <= i <= n + 1):
            raise BadIndex(f"face index {i} out of range for degree {n}")
        self.ring = ring
        self.i = i
        self.target = ring.bump(n + 1)
        self.params = params
        self._images = {}
        self._gammas = {}
        if i == 0:
            if ring.variant == "rel-geom":
                self._geom = None
            else:
                if params is None:
                    raise ValueError("twisted face needs a FaceParams")
                self._geom = self._geometric_series(params.alpha)

    def _geometric_series(self, alpha):
        # (1 - alpha X_1)^{-1} = sum alpha^k k! X_1^[k]
        t = self.target
        coeffs = {(): t.base.one()}
        apow = t.cfg.k_one()
        fact = 1
        xid = t.x_id(1)
        for k in range(1, t.D + 1):
            apow = apow * alpha
            fact *= k
            coeffs[((xid, k),)] = t.base.from_k(apow).smul(fact)
        return PdElement(t, coeffs)

    def _image(self, vid):
        img = self._images.get(vid)
        if img is not None:
            return img
        kind, k, j = vid
        t = self.target
        if kind == 0:
            diff = t.x(j + 1) - t.x(1)
        else:
            diff = t.y(k, j + 1) - t.y(k, 1)
        if self._geom is not None:
            img = diff * self._geom
        else:
            img = diff
        self._images[vid] = img
        return img

    def _gamma_image(self, vid, a):
        key = (vid, a)
        g = self._gammas.get(key)
        if g is None:
            g = divided_power(self._image(vid), a)
            self._gammas[key] = g
        return g

    def apply(self, x):
        if not x.ring.eq_ring(self.ring):
            raise BadIndex("element from a different ring")
        i, t = self.i, self.target
        if i > 0:
            # plain index shift: bijection on the pd basis
            out = {}
            for key, c in x.coeffs.items():
                nk = tuple(
                    ((kind, k, j if j < i else j + 1), a) for (kind, k, j), a in key
                )
                out[tuple(sorted(nk))] = c
            return PdElement(t, out, x.truncated)
        acc = t.zero()
        for key, c in x.coeffs.items():
            term = t.from_scalar(c)
            for vid, a in key:
                term = term * self._gamma_image(vid, a)
            acc = acc + term
        return acc


def face_map(i, x, params=None):
    return FaceContext(x.ring, i, params).apply(x)


def check_cosimplicial_identities(cfg, base, variant, d=0, params=None, max_degree=2, D=None):
    """Verify d^j d^i = d^i d^{j-1} for i < j on every generator.

    Runs over source degrees 1..max_degree (max_degree <= 2); residuals are
    exact below the pd cutoff.  Returns a report dict; 'ok' is the verdict.
    """
    if not (1 <= max_degree <= 2):
        raise BadIndex("source degree must be 1 or 2")
    if params is None and variant != "rel-geom":
        params = FaceParams.log(cfg)
    checks = []
    ok = True
    for n in range(1, max_degree + 1):
        ring = PdRing(cfg, base, variant, n, d=d, D=D)
        inner = [FaceContext(ring, i, params) for i in range(n + 2)]
        outer_ring = ring.bump(n + 1)
        outer = [FaceContext(outer_ring, j, params) for j in range(n + 3)]
        for gen in ring.generators():
            v = ring.var(gen)
            for i in range(n + 2):
                vi = inner[i].apply(v)
                for j in range(i + 1, n + 3):
                    lhs = outer[j].apply(vi)
                    rhs = outer[i].apply(inner[j - 1].apply(v))
                    res = lhs - rhs
                    good = res.is_zero()
                    ok = ok and good
                    checks.append(
                        {
                            "degree": n,
                            "i": i,
                            "j": j,
                            "generator": gen,
                            "ok": good,
                            "truncated": res.truncated,
                        }
                    )
    return {"ok": ok, "count": len(checks), "failures": [c for c in checks if not c["ok"]], "checks": checks}


def evaluate_at_group(x, sigmas, T=None):
    """Evaluate a degree-n element against (s_1, ..., s_n) into K[t]/t^T.

    X_j goes to c(s_1..s_j) t, Y_{k,j} to the k-th geometric exponent of
    s_1..s_j times t, and v^[m] to v^m / m!.

    A degree-m coefficient of x that collapsed to an ambient-precision zero
    may hide a contribution as large as p^N / m!, so every t^m output slot
    is clamped to absolute precision N - v_p(m!).  Without the clamp, zero
    residuals in the face compatibility check would be compared at a
    precision the evaluation cannot actually certify.
    """
    ring = x.ring
    n = ring.degree
    if len(sigmas) != n:
        raise BadIndex(f"need exactly {n} group elements")
    cfg = ring.cfg
    if T is None:
        T = cfg.cutoffs.T
    values = {}
    acc = None
    for j, s in enumerate(sigmas, start=1):
        if s.d != ring.d:
            raise BadIndex("group element has wrong geometric dimension")
        acc = s if acc is None else acc * s
        if ring.has_x:
            values[(0, 0, j)] = acc.c
        if ring.has_y:
            for k in range(1, ring.d + 1):
                values[(1, k, j)] = acc.n[k - 1]
    out = {}
    base = ring.base
    for key, c in x.coeffs.items():
        m = _key_degree(key)
        if m >= T:
            continue
        num = 1
        den = 1
        for vid, a in key:
            num *= values[vid] ** a
            den *= factorial(a)
        if num == 0:
            continue
        scal = c * base.from_k(cfg.k_from_int(num).div_int(den))
        if m in out:
            out[m] = out[m] + scal
        else:
            out[m] = scal
    vloss = 0
    for m in range(1, T):
        mm = m
        while mm % cfg.p == 0:
            vloss += 1
            mm //= cfg.p
        if vloss == 0:
            continue
        cap = cfg.N - vloss
        if cap <= 0:
            raise InsufficientPrecision(f"t^{m} slot has no certified digits left")
        cur = out.get(m)
        if cur is None:
            cur = base.from_k(cfg.k_zero())
        out[m] = cur.clamp_prec(cap)
    return FormalCElem(base, T, out)


def check_face_evaluation(x, sigmas, params=None, T=None):
    """Certify the twisted faces against the group law.

    For every face index i, evaluating d^i(x) at (s_1..s_{n+1}) must agree
    with the group-side operation: i = 0 lets s_1 act on t, middle indices
    merge s_i s_{i+1}, and the last index forgets s_{n+1}.
    """
    ring = x.ring
    n = ring.degree
    if len(sigmas) != n + 1:
        raise BadIndex(f"need exactly {n + 1} group elements")
    if params is None and ring.variant != "rel-geom":
        params = FaceParams.log(ring.cfg)
    sigmas = list(sigmas)
    results = []
    ok = True
    alpha = params.alpha if params is not None else None
    for i in range(n + 2):
        lhs = evaluate_at_group(face_map(i, x, params), sigmas, T=T)
        if i == 0:
            rhs = galois_act_t(sigmas[0], evaluate_at_group(x, sigmas[1:], T=T), alpha=alpha)
        elif i == n + 1:
            rhs = evaluate_at_group(x, sigmas[:n], T=T)
        else:
            merged = sigmas[: i - 1] + [sigmas[i - 1] * sigmas[i]] + sigmas[i + 1 :]
            rhs = evaluate_at_group(x, merged, T=T)
        res = lhs - rhs
        good = res.is_zero()
        ok = ok and good
        results.append({"i": i, "ok": good})
    return {"ok": ok, "faces": results}
