"""Cohomology of enhanced Higgs modules via Smith reduction over O_K.

For the relative flavor the complex is the Koszul complex on the commuting
operators theta_1..theta_d, concentrated in degrees 0..d.  The arithmetic
flavors fold in phi: writing L^n for the Koszul term on subsets of size n,
the total complex has terms T^n = L^n + L^{n-1} in degrees 0..d+1 and
differential

    D(x, z) = (dK x, (phi + n beta) x - dK z),   x in L^n, z in L^{n-1},

with beta the braiding unit of the module's normalization.  D D = 0 reduces
to the braiding relation, so verify_complex doubles as an independent check
on the algebra feeding it.

snf_dvr puts an integral matrix in diagonal form with pivots pi^v, ascending,
tracking the row and column transforms together with their inverses.  A zero
that is only zero at its stored precision makes the answer provisional: the
result carries a precision_limited flag, and strict mode raises instead.
Cohomology in each degree comes from two rounds of reduction (kernel basis,
then invariant factors of the image inside it) and is reported as a module
shape: a free rank plus a list of pi-power torsion exponents.
"""

from itertools import combinations
from math import comb as _math_comb

from .errors import InsufficientPrecision, ValidationFailure
from .linalg import Mat


def comb(n, k):
    return _math_comb(n, k) if 0 <= k <= n else 0


class ComplexRep:
    """A bounded complex of free modules: ranks per degree and differentials."""

    __slots__ = ("base", "ranks", "diffs")

    def __init__(self, base, ranks, diffs):
        if len(diffs) != len(ranks) - 1:
            raise ValidationFailure("need one differential per adjacent pair")
        for i, m in enumerate(diffs):
            if m.nrows != ranks[i + 1] or m.ncols != ranks[i]:
                raise ValidationFailure(f"differential {i} has the wrong shape")
        self.base = base
        self.ranks = list(ranks)
        self.diffs = list(diffs)

    @property
    def top(self):
        return len(self.ranks) - 1

    def __repr__(self):
        return f"ComplexRep(ranks={self.ranks})"


def _koszul_blocks(h, n):
    """Blocks of L^n -> L^{n+1}; position maps subset pairs, sign by count below."""
    d = h.d
    subs_n = list(combinations(range(d), n))
    subs_n1 = list(combinations(range(d), n + 1))
    col_of = {S: j for j, S in enumerate(subs_n)}
    row_of = {T: i for i, T in enumerate(subs_n1)}
    blocks = {}
    for S in subs_n:
        for i in range(d):
            if i in S:
                continue
            T = tuple(sorted(S + (i,)))
            blk = h.theta[i]
            if sum(1 for j in S if j < i) % 2:
                blk = -blk
            blocks[(row_of[T], col_of[S])] = blk
    return len(subs_n1), len(subs_n), blocks


def _block_mat(base, grid, l):
    rows = []
    for brow in grid:
        for i in range(l):
            row = []
            for blk in brow:
                row.extend(blk.rows[i])
            rows.append(row)
    return Mat(base, rows)


def build_higgs_complex(h):
    """The cohomology complex of a module, shaped by its flavor.

    Relative: the Koszul complex, degrees 0..d.  Arithmetic flavors: the
    weighted total complex above, degrees 0..d+1.
    """
    l, d, base = h.rank, h.d, h.base
    if h.flavor == "rel-geom":
        ranks = [comb(d, n) * l for n in range(d + 1)]
        diffs = []
        for n in range(d):
            nr, nc, blocks = _koszul_blocks(h, n)
            zero = Mat.zero(base, l)
            grid = [[blocks.get((i, j), zero) for j in range(nc)] for i in range(nr)]
            diffs.append(_block_mat(base, grid, l))
        return ComplexRep(base, ranks, diffs)
    beta = base.from_k(h.braid_unit())
    ranks = [(comb(d, n) + comb(d, n - 1)) * l for n in range(d + 2)]
    diffs = []
    zero = Mat.zero(base, l)
    for n in range(d + 1):
        rows_top, cols_left, kosz = _koszul_blocks(h, n)
        rows_bot = cols_left
        cols_right = comb(d, n - 1)
        grid = [[zero] * (cols_left + cols_right) for _ in range(rows_top + rows_bot)]
        for (i, j), blk in kosz.items():
            grid[i][j] = blk
        phi_n = h.phi.add_scalar_diag(beta.smul(n)) if n else h.phi
        for k in range(cols_left):
            grid[rows_top + k][k] = phi_n
        if cols_right:
            _, _, kosz_prev = _koszul_blocks(h, n - 1)
            for (i, j), blk in kosz_prev.items():
                grid[rows_top + i][cols_left + j] = -blk
        diffs.append(_block_mat(base, grid, l))
    return ComplexRep(base, ranks, diffs)


def verify_complex(rep):
    """Check that consecutive differentials compose to zero."""
    failures = []
    for i in range(len(rep.diffs) - 1):
        if not (rep.diffs[i + 1] * rep.diffs[i]).is_zero():
            failures.append(i)
    return {"ok": not failures, "top": rep.top, "failures": failures}


# ---------------------------------------------------------------------------
# Smith reduction over the valuation ring
# ---------------------------------------------------------------------------


class SnfResult:
    __slots__ = ("vals", "U", "V", "Uinv", "Vinv", "nrows", "ncols", "precision_limited")

    def __init__(self, vals, U, V, Uinv, Vinv, nrows, ncols, precision_limited):
        self.vals = vals
        self.U = U
        self.V = V
        self.Uinv = Uinv
        self.Vinv = Vinv
        self.nrows = nrows
        self.ncols = ncols
        self.precision_limited = precision_limited

    def diag(self, ring):
        """The reduced matrix itself: diag(pi^v) padded with zeros."""
        pi = ring.from_k(ring.cfg.k_pi())
        rows = [[ring.zero() for _ in range(self.ncols)] for _ in range(self.nrows)]
        for t, v in enumerate(self.vals):
            x = ring.one()
            for _ in range(v):
                x = x * pi
            rows[t][t] = x
        return Mat(ring, rows)

    def __repr__(self):
        flag = ", precision_limited" if self.precision_limited else ""
        return f"SnfResult(vals={self.vals}{flag})"


def _abs_prec(x):
    return x.num.prec - x.shift


def snf_dvr(mat, strict=False):
    """Diagonalize an integral matrix: U * mat * V = diag(pi^v), v ascending.

    Global minimal-valuation pivoting; the pivot row is rescaled so the pivot
    becomes exactly a power of pi.  U and V are invertible over O_K and their
    inverses are tracked alongside.  Entries must be point-mode scalars.
    """
    ring = mat.ring
    cfg = ring.cfg
    if not mat.integral():
        raise ValidationFailure("Smith reduction expects an integral matrix")
    a, b = mat.nrows, mat.ncols
    M = [list(r) for r in mat.rows]
    one, zero = ring.one(), ring.zero()
    U = [[one if i == j else zero for j in range(a)] for i in range(a)]
    Uinv = [[one if i == j else zero for j in range(a)] for i in range(a)]
    V = [[one if i == j else zero for j in range(b)] for i in range(b)]
    Vinv = [[one if i == j else zero for j in range(b)] for i in range(b)]
    vals = []
    t = 0
    drained = False
    while t < min(a, b):
        best, pos = None, None
        for i in range(t, a):
            for j in range(t, b):
                x = M[i][j]
                if _abs_prec(x) <= 0:
                    # no certified digits left; unusable as a pivot
                    drained = True
                    continue
                if x.is_zero():
                    continue
                v = x.val_pi()
                if best is None or v < best:
                    best, pos = v, (i, j)
        if pos is None:
            break
        pi_, pj = pos
        if pi_ != t:
            M[pi_], M[t] = M[t], M[pi_]
            U[pi_], U[t] = U[t], U[pi_]
            for row in Uinv:
                row[pi_], row[t] = row[t], row[pi_]
        if pj != t:
            for row in M:
                row[pj], row[t] = row[t], row[pj]
            for row in V:
                row[pj], row[t] = row[t], row[pj]
            Vinv[pj], Vinv[t] = Vinv[t], Vinv[pj]
        # rescale the pivot row so the pivot is pi^v on the nose; the unit
        # part comes from an exact divide so ramified bases lose no digits
        u = M[t][t].div_pi_exact(best)
        if u.val_pi() != 0:
            # the pivot digit fell below certified precision during the divide
            if strict:
                raise InsufficientPrecision("pivot unit part has no certified digits")
            drained = True
            break
        uinv = u.inv()
        M[t] = [uinv * x for x in M[t]]
        U[t] = [uinv * x for x in U[t]]
        for row in Uinv:
            row[t] = row[t] * u
        # the rescaled pivot is pi^best by construction; keep the exact
        # representative so later quotients divide by it exactly
        M[t][t] = _pi_power(ring, best)
        for i in range(t + 1, a):
            x = M[i][t]
            if x.storage_zero():
                continue
            f = x.div_pi_exact(best)
            M[i] = [y - f * z for y, z in zip(M[i], M[t])]
            U[i] = [y - f * z for y, z in zip(U[i], U[t])]
            for row in Uinv:
                row[t] = row[t] + f * row[i]
        for j in range(t + 1, b):
            x = M[t][j]
            if x.storage_zero():
                continue
            f = x.div_pi_exact(best)
            for row in M:
                row[j] = row[j] - f * row[t]
            for row in V:
                row[j] = row[j] - f * row[t]
            Vinv[t] = [y + f * z for y, z in zip(Vinv[t], Vinv[j])]
        vals.append(best)
        t += 1
    limited = drained
    for i in range(t, a):
        for j in range(t, b):
            if _abs_prec(M[i][j]) < cfg.N:
                limited = True
    if limited and strict:
        raise InsufficientPrecision("a residual zero is certified below working precision")
    return SnfResult(
        vals,
        Mat(ring, U),
        Mat(ring, V),
        Mat(ring, Uinv),
        Mat(ring, Vinv),
        a,
        b,
        limited,
    )


# ---------------------------------------------------------------------------
# module-shaped cohomology
# ---------------------------------------------------------------------------


def _pi_power(ring, v):
    x = ring.one()
    pi = ring.from_k(ring.cfg.k_pi())
    for _ in range(v):
        x = x * pi
    return x


def _dot(row, vec, zero):
    acc = None
    for a, x in zip(row, vec):
        if a.droppable() or x.droppable():
            continue
        acc = a * x if acc is None else acc + a * x
    return acc if acc is not None else zero


def cohomology(rep, degree, strict=False):
    """H^degree as {free_rank, torsion exponents, precision_limited}.

    Kernel basis from the outgoing reduction, image columns from the incoming
    one, invariant factors from a second reduction of the image expressed in
    the kernel basis.  Degrees outside the complex give the zero module.
    """
    if degree < 0 or degree > rep.top:
        return {"degree": degree, "free_rank": 0, "torsion": [], "precision_limited": False}
    base = rep.base
    l = rep.ranks[degree]
    limited = False
    if degree < rep.top:
        out = snf_dvr(rep.diffs[degree], strict=strict)
        limited = limited or out.precision_limited
        r_out = len(out.vals)
        vinv_rows = out.Vinv.rows
    else:
        r_out = 0
        vinv_rows = None
    k = l - r_out
    torsion = []
    free = k
    if degree > 0 and k > 0 and vinv_rows is None:
        # top degree: the quotient is the plain cokernel, whose invariant
        # factors are those of the incoming map; no second reduction needed
        inc = snf_dvr(rep.diffs[degree - 1], strict=strict)
        limited = limited or inc.precision_limited
        torsion = [v for v in inc.vals if v > 0]
        free = k - len(inc.vals)
        return {"degree": degree, "free_rank": free, "torsion": torsion, "precision_limited": limited}
    if degree > 0 and k > 0:
        inc = snf_dvr(rep.diffs[degree - 1], strict=strict)
        limited = limited or inc.precision_limited
        cols = []
        for j, v in enumerate(inc.vals):
            scal = _pi_power(base, v)
            w = [inc.Uinv.rows[i][j] * scal for i in range(l)]
            c = [_dot(row, w, base.zero()) for row in vinv_rows]
            for x in c[:r_out]:
                if not x.is_zero():
                    if limited:
                        # the kernel basis is not certified finely enough to
                        # absorb this image column; project and carry the flag
                        break
                    raise ValidationFailure(f"image escapes the kernel in degree {degree}")
            cols.append(c[r_out:])
        if cols:
            C = Mat(base, [[col[i] for col in cols] for i in range(k)])
            sec = snf_dvr(C, strict=strict)
            limited = limited or sec.precision_limited
            torsion = [v for v in sec.vals if v > 0]
            free = k - len(sec.vals)
    return {"degree": degree, "free_rank": free, "torsion": torsion, "precision_limited": limited}


def cohomology_all(rep, strict=False):
    return [cohomology(rep, i, strict=strict) for i in range(rep.top + 1)]


def kernel_cokernel_mod(mat, prec, strict=False):
    """|ker| and |coker| of the induced map on (O_K / p^prec)-modules.

    Read off the Smith form: an invariant factor pi^v contributes
    q^min(v, e*prec) to both sides, a missing pivot contributes a full
    q^(e*prec) to the side it leaves free (q the residue field size).
    """
    cfg = mat.ring.cfg
    s = snf_dvr(mat, strict=strict)
    m = prec * cfg.e
    q = cfg.p**cfg.f
    shared = sum(min(v, m) for v in s.vals)
    r = len(s.vals)
    return {
        "kernel": q ** (shared + m * (mat.ncols - r)),
        "cokernel": q ** (shared + m * (mat.nrows - r)),
        "precision_limited": s.precision_limited,
    }
