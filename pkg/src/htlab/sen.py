"""Group cocycles, the Sen operator, fixed vectors, and the period kernel.

A stratification A_{n,I} determines a 1-cochain on the group: for
sigma = (n, c, chi),

    U(sigma) = sum A_{n,I} (prod_k n_k^{i_k} / i_k!) (c^n / n!) t^{n+|I|},

a matrix of truncated t-series.  The cocycle law U(s u) = U(s) * s(U(u)),
with s moving only t, is what check_cocycle certifies at the pd level;
verify_cocycle_law re-checks it directly on sampled group pairs.

The Sen operator of log-normalized data is -phi / beta.  Fixed vectors of
the whole action are the common kernel of the positive-weight coefficients.

The geometric part of the action is trivialized by the period matrix

    B = sum_I Theta^I Y^[I] t^{|I|}     (Y^[I] divided-power monomials),

whose columns kill the operators -t theta_i + d/dY_i.  Conjugating by B and
letting the group act by sigma(t) = chi t (1 - alpha c t)^{-1} (alpha the
data's twist unit, beta = pi E'(pi) in the log normalization) and
sigma(Y_k) = chi^{-1} (Y_k + n_k) strips U(sigma) down to its phi-only part:
crosscheck_inverse_simpson verifies B^{-1} F(sigma) B(sigma t, sigma Y) =
U(sigma) with F the cocycle of the phi-only sub-stratification.
"""

import math

from .base import KElem
from .errors import HorizonTooSmall, KernelRankDeficit, ValidationFailure
from .galois import FormalCElem, FormalRing, GroupElt, galois_act_t, sigma_t
from .higgs import (
    HiggsData,
    Stratification,
    _multi_indices,
    stratification_from_higgs,
)
from .linalg import Mat, kernel_basis
from .pdring import PdElement, PdRing


def _as_strat(data, D=None):
    if isinstance(data, HiggsData):
        return stratification_from_higgs(data, D=D)
    return data


def cocycle_matrix(data, s, T=None):
    """U(sigma) as a matrix of t-series over the module's base.

    Accepts a module or a stratification.  Requires T <= D + 1: the t-degree
    of every contribution equals its weight n + |I|, so with that bound each
    retained slot is complete.
    """
    strat = _as_strat(data)
    cfg = strat.cfg
    T = cfg.cutoffs.T if T is None else T
    if T > strat.D + 1:
        raise HorizonTooSmall(f"t-order {T} needs coefficient weight {T - 1}, have {strat.D}")
    if s.d != strat.d:
        raise ValidationFailure("group element dimension does not match the module")
    base = strat.base
    mats = {}
    for (n, index), A in strat.coeffs.items():
        m = n + sum(index)
        if m >= T:
            continue
        num = s.c**n
        for nk, ik in zip(s.n, index):
            num *= nk**ik
        if num == 0 and m > 0:
            continue
        den = math.factorial(n)
        for ik in index:
            den *= math.factorial(ik)
        sc = cfg.k_from_int(num).div_int(den)
        term = A.mul_scalar(base.from_k(sc))
        mats[m] = mats[m] + term if m in mats else term
    ring = FormalRing(base, T)
    rows = []
    for i in range(strat.rank):
        row = []
        for j in range(strat.rank):
            row.append(FormalCElem(base, T, {m: mm.entry(i, j) for m, mm in mats.items()}))
        rows.append(row)
    return Mat(ring, rows)


def galois_act_mat(s, mat, alpha=None):
    """sigma applied entrywise to a matrix of t-series (t moves, nothing else)."""
    return mat.map(lambda e: galois_act_t(s, e, alpha=alpha))


def _witness(mat):
    for i, row in enumerate(mat.rows):
        for j, a in enumerate(row):
            if not a.is_zero():
                return (i, j)
    return None


def _twist_alpha(strat):
    if strat.twist == "log":
        return KElem(strat.cfg.beta, 0)
    return KElem(strat.cfg.Ep, 0)


def verify_cocycle_law(data, s, u, T=None):
    """Check U(s u) = U(s) * s(U(u)) for one pair of group elements.

    The action of s on t is twisted by the same unit alpha as the 0th face
    map, read off the data's normalization.  The law holds for the
    arithmetic flavors on the whole group.  For the purely geometric flavor
    it holds on the c = 0 subgroup, which is all that site sees; the
    (1 - alpha c t)^{-1} twist belongs to the arithmetic faces.
    """
    strat = _as_strat(data)
    alpha = _twist_alpha(strat)
    lhs = cocycle_matrix(strat, s * u, T=T)
    rhs = cocycle_matrix(strat, s, T=T) * galois_act_mat(
        s, cocycle_matrix(strat, u, T=T), alpha=alpha
    )
    residual = lhs - rhs
    ok = residual.is_zero()
    return {"ok": ok, "witness": None if ok else _witness(residual)}


def sen_operator(h):
    """-phi / beta; defined for log-normalized data carrying a phi."""
    if h.phi is None:
        raise ValidationFailure("no phi: the purely geometric flavor has no Sen operator")
    if h.twist != "log":
        raise ValidationFailure("normalize with log_from_smooth first")
    return h.phi.mul_scalar(h.base.from_k(-h.cfg.beta_inv()))


def h0_fixed_points(data, T=None):
    """Basis of the vectors fixed by the whole group action.

    A constant vector is fixed exactly when every coefficient of positive
    weight kills it (group elements separate the coefficients), so stack
    the A_{n,I} with 1 <= n + |I| <= T - 1 and take the kernel.  Point-mode
    scalars only.
    """
    strat = _as_strat(data)
    T = strat.cfg.cutoffs.T if T is None else T
    rows = []
    for key in strat.indices():
        m = key[0] + sum(key[1])
        if 1 <= m <= T - 1:
            rows.extend(strat.coeffs[key].rows)
    if not rows:
        ident = Mat.identity(strat.base, strat.rank)
        return {"dim": strat.rank, "basis": [ident.col(j) for j in range(strat.rank)]}
    basis = kernel_basis(Mat(strat.base, rows))
    return {"dim": len(basis), "basis": basis}


# ---------------------------------------------------------------------------
# the geometric period and the conjugation crosscheck
# ---------------------------------------------------------------------------


def _embed_mat(mat, fring):
    ring = fring.base
    T = fring.T
    return mat.map(
        lambda a: FormalCElem.scalar(ring, T, ring.from_scalar(a)),
        ring=fring,
    )


def _embed_series_mat(mat, fring):
    ring = fring.base
    T = fring.T
    return mat.map(
        lambda e: FormalCElem(ring, T, {m: ring.from_scalar(v) for m, v in e.coeffs.items()}),
        ring=fring,
    )


def _pd_partial(x, vid):
    """d/dv on divided powers: gamma_a -> gamma_{a-1}, coefficients kept."""
    out = {}
    for key, c in x.coeffs.items():
        parts = dict(key)
        a = parts.get(vid)
        if a is None:
            continue
        if a == 1:
            del parts[vid]
        else:
            parts[vid] = a - 1
        newkey = tuple(sorted(parts.items()))
        out[newkey] = out[newkey] + c if newkey in out else c
    return PdElement(x.ring, out, x.truncated)


def _t_shift(e):
    return FormalCElem(e.base, e.T, {m + 1: v for m, v in e.coeffs.items()})


def period_kernel_rep(h, T=None, D=None):
    """B = sum_I Theta^I Y^[I] t^{|I|} with its inverse, both certified.

    Certifies that B's columns kill every -t theta_i + d/dY_i and that
    B * B(-Y) = 1; a residual raises KernelRankDeficit, since the columns
    then fail to fill out the kernel.  Needs T <= D + 1 so the retained
    t-slots are complete.
    """
    cfg = h.cfg
    T = cfg.cutoffs.T if T is None else T
    D = cfg.cutoffs.D if D is None else D
    if T > D + 1:
        raise HorizonTooSmall(f"t-order {T} needs pd degree {T - 1}, have {D}")
    ring = PdRing(cfg, h.base, "rel-geom", 1, d=h.d, D=D)
    fring = FormalRing(ring, T)
    maxw = min(D, T - 1)
    pows = {(0,) * h.d: Mat.identity(h.base, h.rank)}
    cellsB = [[{} for _ in range(h.rank)] for _ in range(h.rank)]
    cellsBi = [[{} for _ in range(h.rank)] for _ in range(h.rank)]
    for index in _multi_indices(h.d, maxw):
        tp = pows.get(index)
        if tp is None:
            k = next(i for i, v in enumerate(index) if v > 0)
            prev = list(index)
            prev[k] -= 1
            tp = h.theta[k] * pows[tuple(prev)]
            pows[index] = tp
        m = sum(index)
        key = tuple(sorted((ring.y_id(k + 1, 1), ik) for k, ik in enumerate(index) if ik))
        for i in range(h.rank):
            for j in range(h.rank):
                a = tp.entry(i, j)
                if a.droppable():
                    continue
                cellsB[i][j].setdefault(m, {})[key] = a
                cellsBi[i][j].setdefault(m, {})[key] = -a if m % 2 else a
    def _collect(cells):
        return Mat(
            fring,
            [
                [
                    FormalCElem(ring, T, {m: PdElement(ring, d) for m, d in cell.items()})
                    for cell in row
                ]
                for row in cells
            ],
        )
    B = _collect(cellsB)
    Binv = _collect(cellsBi)
    if not (B * Binv - _embed_mat(Mat.identity(h.base, h.rank), fring)).is_zero():
        raise KernelRankDeficit("period matrix is not invertible by the sign flip")
    for k in range(h.d):
        vid = ring.y_id(k + 1, 1)
        d_b = B.map(lambda e: FormalCElem(ring, T, {m: _pd_partial(v, vid) for m, v in e.coeffs.items()}))
        t_theta_b = _embed_mat(h.theta[k], fring) * B.map(_t_shift)
        if not (d_b - t_theta_b).is_zero():
            raise KernelRankDeficit(f"columns do not kill -t theta_{k + 1} + d/dY_{k + 1}")
    return {"ring": ring, "T": T, "B": B, "Binv": Binv}


def _gamma_image(ring, s, k, a, chi_inv):
    """sigma(Y_k^[a]) = chi^{-a} sum_j Y_k^[j] n_k^{a-j} / (a-j)!."""
    cfg = ring.cfg
    M = cfg.p**cfg.N
    nk = s.n[k]
    out = None
    for j in range(a + 1):
        sc = cfg.k_from_int(pow(chi_inv, a, M) * nk ** (a - j)).div_int(math.factorial(a - j))
        term = ring.y(k + 1, 1, j).mul_scalar(ring.base.from_k(sc))
        out = term if out is None else out + term
    return out


def crosscheck_inverse_simpson(h, s, T=None, D=None):
    """B^{-1} F(sigma) B(sigma t, sigma Y) = U(sigma), checked in the pd ring.

    F is the cocycle of the phi-only sub-stratification; the group acts by
    sigma(t) = chi t (1 - alpha c t)^{-1} with the data's twist unit alpha,
    and sigma(Y_k) = chi^{-1}(Y_k + n_k).  Substituted images never raise
    the pd degree above the t-degree, so with T <= D + 1 the comparison is
    exact in every retained slot.
    """
    if h.phi is None:
        raise ValidationFailure("the crosscheck needs a phi")
    cfg = h.cfg
    T = cfg.cutoffs.T if T is None else T
    D = cfg.cutoffs.D if D is None else D
    per = period_kernel_rep(h, T=T, D=D)
    ring, fring = per["ring"], per["B"].ring
    strat = stratification_from_higgs(h, D=D)
    u_pd = _embed_series_mat(cocycle_matrix(strat, s, T=T), fring)
    arith = {(n, ()): A for (n, index), A in strat.coeffs.items() if sum(index) == 0}
    sa = Stratification(h.base, "abs-arith", arith, strat.D, h.rank, twist=h.twist)
    f_pd = _embed_series_mat(cocycle_matrix(sa, GroupElt(cfg, (), s.c, s.chi), T=T), fring)
    # assemble B(sigma t, sigma Y) term by term
    chi_inv = pow(s.chi, -1, cfg.p**cfg.N)
    st = sigma_t(ring, s, T=T, alpha=_twist_alpha(strat))
    one_series = FormalCElem.scalar(ring, T, ring.one())
    st_pows = [one_series]
    maxw = min(D, T - 1)
    for _ in range(maxw):
        st_pows.append(st_pows[-1] * st)
    gamma_cache = {}
    pows = {(0,) * h.d: Mat.identity(h.base, h.rank)}
    b_sub = None
    for index in _multi_indices(h.d, maxw):
        tp = pows.get(index)
        if tp is None:
            k = next(i for i, v in enumerate(index) if v > 0)
            prev = list(index)
            prev[k] -= 1
            tp = h.theta[k] * pows[tuple(prev)]
            pows[index] = tp
        if tp.storage_zero():
            continue
        coeff = ring.one()
        for k, ik in enumerate(index):
            if ik == 0:
                continue
            if (k, ik) not in gamma_cache:
                gamma_cache[(k, ik)] = _gamma_image(ring, s, k, ik, chi_inv)
            coeff = coeff * gamma_cache[(k, ik)]
        series = st_pows[sum(index)].mul_scalar(coeff)
        term = _embed_mat(tp, fring).map(lambda e: e * series)
        b_sub = term if b_sub is None else b_sub + term
    conj = per["Binv"] * f_pd * b_sub
    residual = conj - u_pd
    ok = residual.is_zero()
    return {"ok": ok, "witness": None if ok else _witness(residual)}
