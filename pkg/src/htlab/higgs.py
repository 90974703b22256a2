"""Enhanced Higgs modules, their stratifications, and the cocycle oracle.

A module of rank l over a base chart carries commuting nilpotent operators
theta_1..theta_d and, in the arithmetic flavors, an endomorphism phi braided
against them by

    [theta_i, phi] = beta theta_i        (log normalization, beta = pi E'(pi))
    [theta_i, phi] = E'(pi) theta_i      (smooth normalization)

The stratification packages the action of the degree-1 nerve: coefficients

    A_{n,I} = theta^I P_n,   P_0 = id,  P_{n+1} = (phi + n beta) P_n,

indexed by n + |I| <= D.  check_cocycle builds the degree-1 matrix

    eps = sum A_{n,I} X_1^[n] Y_1^[I]

and verifies the descent identity p_2*(eps) p_1... the composition order is
p_2*(eps) * p_0*(eps) = p_1*(eps); with the other order the degree-(1,1)
coefficient would come out as [phi, theta] + 2 beta theta instead of
[phi, theta] + beta theta = 0.

Flavors: 'abs-arith' has phi only, 'rel-geom' has thetas only, 'abs-geom'
has both.  Everything raises a specific failure with a witness rather than
returning a bare False; convergence questions that the cutoffs cannot settle
come back as undecided certificates, never as silent passes.
"""

from .base import KElem
from .errors import (
    BraidFailure,
    ClosedFormMismatch,
    CommutationFailure,
    NilpotenceFailure,
    ValidationFailure,
)
from .linalg import Mat, commutator
from .pdring import FaceContext, FaceParams, PdRing

FLAVORS = ("abs-arith", "abs-geom", "rel-geom")
TWISTS = ("log", "smooth")


class ConvergenceCertificate:
    __slots__ = ("subject", "status", "n_star", "n_max")

    def __init__(self, subject, status, n_star, n_max):
        self.subject = subject
        self.status = status
        self.n_star = n_star
        self.n_max = n_max

    @classmethod
    def converged(cls, subject, n_star, n_max):
        return cls(subject, "converged", n_star, n_max)

    @classmethod
    def undecided(cls, subject, n_max):
        return cls(subject, "undecided", None, n_max)

    @property
    def ok(self):
        return self.status == "converged"

    def __repr__(self):
        if self.ok:
            return f"Converged({self.subject}, n*={self.n_star})"
        return f"Undecided({self.subject}, n_max={self.n_max})"


class HiggsData:
    __slots__ = ("cfg", "base", "flavor", "twist", "rank", "theta", "phi", "integral")

    def __init__(self, base, flavor, theta, phi=None, integral=True, twist="log"):
        if flavor not in FLAVORS:
            raise ValidationFailure(f"unknown flavor {flavor!r}")
        if twist not in TWISTS:
            raise ValidationFailure(f"unknown twist {twist!r}")
        if flavor == "abs-arith" and theta:
            raise ValidationFailure("abs-arith carries no theta operators")
        if flavor == "rel-geom" and phi is not None:
            raise ValidationFailure("rel-geom carries no phi")
        if flavor != "rel-geom" and phi is None:
            raise ValidationFailure(f"{flavor} needs a phi")
        mats = list(theta) + ([phi] if phi is not None else [])
        if not mats:
            raise ValidationFailure("empty module")
        rank = mats[0].nrows
        for m in mats:
            if m.nrows != rank or m.ncols != rank:
                raise ValidationFailure("operator shapes disagree")
        self.cfg = base.cfg
        self.base = base
        self.flavor = flavor
        self.twist = twist
        self.rank = rank
        self.theta = list(theta)
        self.phi = phi
        self.integral = bool(integral)

    @property
    def d(self):
        return len(self.theta)

    def braid_unit(self):
        if self.twist == "log":
            return self.cfg.k_beta()
        return KElem(self.cfg.Ep, 0)

    def face_params(self):
        if self.twist == "log":
            return FaceParams.log(self.cfg)
        return FaceParams.nonlog(self.cfg)

    def __repr__(self):
        return (
            f"HiggsData({self.flavor}, rank={self.rank}, d={self.d}, "
            f"twist={self.twist}, base={self.base!r})"
        )


def _first_nonzero(mat):
    for i, row in enumerate(mat.rows):
        for j, a in enumerate(row):
            if not a.is_zero():
                return (i, j)
    return None


def _beta_scalar(h):
    return h.base.from_k(h.braid_unit())


def validate_higgs(h, n_max=None):
    """Check the axioms; raises with a witness, returns certificates.

    Exact obligations (commuting thetas, braiding, strict nilpotence in the
    absolute flavors, claimed integrality) raise on failure.  Convergence
    obligations return certificates that are either converged at some n* or
    undecided within n_max; undecided is reported, not raised.
    """
    cfg = h.cfg
    if n_max is None:
        n_max = cfg.cutoffs.n_max
    if h.integral:
        for m in list(h.theta) + ([h.phi] if h.phi is not None else []):
            if not m.integral():
                raise ValidationFailure("integrality claimed but an entry is not integral")
    for i in range(h.d):
        for j in range(i + 1, h.d):
            c = commutator(h.theta[i], h.theta[j])
            if not c.is_zero():
                raise CommutationFailure(i + 1, j + 1, _first_nonzero(c))
    certificates = []
    beta = _beta_scalar(h)
    if h.phi is not None:
        for i, th in enumerate(h.theta):
            res = commutator(th, h.phi) - th.mul_scalar(beta)
            if not res.is_zero():
                raise BraidFailure(i + 1, _first_nonzero(res))
    for i, th in enumerate(h.theta):
        power = Mat.identity(h.base, h.rank)
        for _ in range(h.rank):
            power = th * power
        if power.is_zero():
            continue
        if h.flavor != "rel-geom":
            raise NilpotenceFailure(i + 1, _first_nonzero(power))
        # topological nilpotence is enough on the relative site
        subject = f"theta_{i + 1}-powers"
        n, cert = h.rank, None
        while n < n_max:
            power = th * power
            n += 1
            if power.is_zero():
                cert = ConvergenceCertificate.converged(subject, n, n_max)
                break
        certificates.append(cert or ConvergenceCertificate.undecided(subject, n_max))
    if h.phi is not None:
        certificates.append(_phi_sequence_certificate(h, n_max))
    undecided = [c for c in certificates if not c.ok]
    return {
        "ok": not undecided,
        "undecided": bool(undecided),
        "certificates": certificates,
    }


def _phi_sequence_certificate(h, n_max):
    beta = _beta_scalar(h)
    p_n = Mat.identity(h.base, h.rank)
    factor = h.phi
    for n in range(1, n_max + 1):
        p_n = factor * p_n
        if p_n.is_zero():
            return ConvergenceCertificate.converged("phi-sequence", n, n_max)
        factor = factor.add_scalar_diag(beta)
    return ConvergenceCertificate.undecided("phi-sequence", n_max)


def _multi_indices(d, maxw):
    if d == 0:
        yield ()
        return
    def rec(prefix, rem, left):
        if left == 1:
            yield prefix + (rem,)
            return
        for v in range(rem + 1):
            yield from rec(prefix + (v,), rem - v, left - 1)
    for w in range(maxw + 1):
        yield from rec((), w, d)


class Stratification:
    """The coefficients A_{n,I} of the degree-1 descent matrix."""

    __slots__ = ("cfg", "base", "flavor", "twist", "rank", "D", "coeffs")

    def __init__(self, base, flavor, coeffs, D, rank, twist="log"):
        self.cfg = base.cfg
        self.base = base
        self.flavor = flavor
        self.twist = twist
        self.rank = rank
        self.D = D
        self.coeffs = dict(coeffs)

    @property
    def d(self):
        for _, index in self.coeffs:
            return len(index)
        return 0

    def indices(self):
        return sorted(self.coeffs)

    def matrix(self, n, index):
        return self.coeffs[(n, tuple(index))]

    def __repr__(self):
        return f"Stratification({self.flavor}, rank={self.rank}, D={self.D}, {len(self.coeffs)} terms)"


def stratification_from_higgs(h, D=None):
    cfg = h.cfg
    if D is None:
        D = cfg.cutoffs.D
    beta = _beta_scalar(h)
    if h.phi is not None:
        p_seq = [Mat.identity(h.base, h.rank)]
        factor = h.phi
        for n in range(1, D + 1):
            p_seq.append(factor * p_seq[-1])
            factor = factor.add_scalar_diag(beta)
    else:
        p_seq = [Mat.identity(h.base, h.rank)]
    theta_pows = {(0,) * h.d: Mat.identity(h.base, h.rank)}
    coeffs = {}
    for index in _multi_indices(h.d, D):
        w = sum(index)
        tp = theta_pows.get(index)
        if tp is None:
            k = next(i for i, v in enumerate(index) if v > 0)
            prev = list(index)
            prev[k] -= 1
            tp = h.theta[k] * theta_pows[tuple(prev)]
            theta_pows[index] = tp
        n_top = (D - w) if h.phi is not None else 0
        for n in range(n_top + 1):
            coeffs[(n, index)] = tp * p_seq[n] if n else tp
    return Stratification(h.base, h.flavor, coeffs, D, h.rank, twist=h.twist)


def higgs_from_stratification(strat, integral=None):
    """Reconstruct the module and verify every coefficient's closed form."""
    d = strat.d
    zero_index = (0,) * d
    ident = Mat.identity(strat.base, strat.rank)
    a00 = strat.coeffs.get((0, zero_index))
    if a00 is None or not a00.eq(ident):
        raise ClosedFormMismatch(0, zero_index)
    theta = []
    for k in range(d):
        e_k = tuple(1 if i == k else 0 for i in range(d))
        m = strat.coeffs.get((0, e_k))
        if m is None:
            raise ClosedFormMismatch(0, e_k)
        theta.append(m)
    phi = strat.coeffs.get((1, zero_index)) if strat.flavor != "rel-geom" else None
    if strat.flavor != "rel-geom" and phi is None:
        raise ClosedFormMismatch(1, zero_index)
    if integral is None:
        integral = all(m.integral() for m in strat.coeffs.values())
    h = HiggsData(strat.base, strat.flavor, theta, phi, integral=integral, twist=strat.twist)
    expect = stratification_from_higgs(h, D=strat.D)
    if set(expect.coeffs) != set(strat.coeffs):
        extra = set(strat.coeffs) ^ set(expect.coeffs)
        n, index = sorted(extra)[0]
        raise ClosedFormMismatch(n, index)
    for key, m in strat.coeffs.items():
        if not m.eq(expect.coeffs[key]):
            raise ClosedFormMismatch(key[0], key[1])
    return h


def check_recursions(strat):
    """Walk both defining recursions independently of the closed form.

    A_{n+1,I} = (phi + (n + |I|) beta) A_{n,I}  and  A_{n,I} = theta_k A_{n,I-e_k},
    with phi and theta read off the stratification itself.
    """
    d = strat.d
    zero_index = (0,) * d
    beta = strat.base.from_k(
        strat.cfg.k_beta() if strat.twist == "log" else KElem(strat.cfg.Ep, 0)
    )
    theta = []
    for k in range(d):
        e_k = tuple(1 if i == k else 0 for i in range(d))
        theta.append(strat.coeffs[(0, e_k)])
    phi = strat.coeffs.get((1, zero_index))
    checked = 0
    failures = []
    for (n, index), m in strat.coeffs.items():
        w = sum(index)
        if phi is not None and (n + 1, index) in strat.coeffs:
            lhs = strat.coeffs[(n + 1, index)]
            rhs = (phi.add_scalar_diag(beta.smul(n + w))) * m
            checked += 1
            if not lhs.eq(rhs):
                failures.append({"rule": "phi-step", "n": n, "index": index})
        for k in range(d):
            if index[k] == 0:
                continue
            prev = list(index)
            prev[k] -= 1
            rhs = theta[k] * strat.coeffs[(n, tuple(prev))]
            checked += 1
            if not m.eq(rhs):
                failures.append({"rule": "theta-step", "n": n, "index": index, "k": k + 1})
    return {"ok": not failures, "checked": checked, "failures": failures}


def descent_matrix(strat, ring=None):
    """eps = sum A_{n,I} X_1^[n] Y_1^[I] as a matrix of degree-1 pd elements."""
    from .pdring import PdElement

    if ring is None:
        ring = PdRing(strat.cfg, strat.base, strat.flavor, 1, d=strat.d, D=strat.D)
    entries = [[{} for _ in range(strat.rank)] for _ in range(strat.rank)]
    for (n, index), m in strat.coeffs.items():
        key = []
        if n:
            key.append((ring.x_id(1), n))
        for k, ik in enumerate(index):
            if ik:
                key.append((ring.y_id(k + 1, 1), ik))
        key = tuple(sorted(key))
        for i in range(strat.rank):
            for j in range(strat.rank):
                s = m.entry(i, j)
                if not s.storage_zero():
                    entries[i][j][key] = s
    return Mat(ring, [[PdElement(ring, e) for e in row] for row in entries])


def check_cocycle(h, D=None, params=None):
    """The descent oracle: p_2*(eps) p_0*(eps) = p_1*(eps) entrywise."""
    strat = stratification_from_higgs(h, D=D)
    return check_cocycle_strat(strat, params=params)


def check_cocycle_strat(strat, params=None):
    ring1 = PdRing(strat.cfg, strat.base, strat.flavor, 1, d=strat.d, D=strat.D)
    eps = descent_matrix(strat, ring=ring1)
    if params is None and strat.flavor != "rel-geom":
        params = (
            FaceParams.log(strat.cfg) if strat.twist == "log" else FaceParams.nonlog(strat.cfg)
        )
    contexts = [FaceContext(ring1, i, params) for i in range(3)]
    ring2 = contexts[0].target
    p0, p1, p2 = (eps.map(c.apply, ring=ring2) for c in contexts)
    residual = p2 * p0 - p1
    ok = residual.is_zero()
    return {
        "ok": ok,
        "rank": strat.rank,
        "terms": len(strat.coeffs),
        "truncated": residual.truncated,
        "witness": None if ok else _first_nonzero(residual),
    }


def log_from_smooth(h):
    """Rescale a smooth-normalized module to the log normalization.

    Validates the smooth braiding first, multiplies phi by pi, and validates
    the result; theta operators are untouched.
    """
    if h.twist != "smooth":
        raise ValidationFailure("input is not smooth-normalized")
    if h.phi is None:
        raise ValidationFailure("smooth data needs a phi")
    validate_higgs(h)
    phi_log = h.phi.mul_scalar(h.base.from_k(h.cfg.k_pi()))
    out = HiggsData(h.base, h.flavor, h.theta, phi_log, integral=h.integral, twist="log")
    validate_higgs(out)
    return out
