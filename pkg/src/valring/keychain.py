"""Key-polynomial chains for nu(f) = v(f(eta)) by successive augmentation.

A chain entry holds a monic key polynomial Q_i together with its exact value
gamma_i = nu(Q_i).  Augmentation expands the generator g in the current key,
reads the residual polynomial of the minimal segment, lifts a chosen
irreducible factor to the next key and assigns its value from the admissible
slopes of the new Newton polygon.  Branch choices (several admissible slopes
or several residual factors) select the extension of v to L.

The per-entry residue data (a small finite field and the residue z_i of the
normalized key at eta) drives residual-polynomial computation; values are
computed by an exact recursive evaluator which, on the domains used here,
agrees with the true valuation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd

from .algebra import (
    INF,
    BranchDescriptor,
    OracleValue,
    ResidueClass,
    ResidueField,
    UniPoly,
    ValuedFieldCtx,
    _embedded,
    _qexpand_any,
    is_finite,
    nu_oracle,
    pval,
    qexpand,
)
from .errors import (
    AmbiguousBranch,
    MalformedInput,
    OracleUnavailable,
    RamifiedBranch,
    UnsupportedNormalization,
)

FULL = "full"
COLLAPSED = "collapsed"
IMAX = "imax"


@dataclass(frozen=True)
class ChainEntry:
    position: int
    Q: UniPoly
    gamma: object            # int, Fraction (synthetic only) or INF
    a: Fraction | None       # p**gamma for finite gamma, None at i_max
    Qt: UniPoly              # Q / a (Q itself at i_max)
    res_field: ResidueField | None = None   # field containing z
    z: tuple | None = None                  # residue of Qt(eta); None until known
    emb_prev: tuple | None = None           # image of previous entry's field generator


def _entry(ctx: ValuedFieldCtx, position: int, Q: UniPoly, gamma,
           res_field=None, z=None, emb_prev=None) -> ChainEntry:
    if gamma is INF:
        return ChainEntry(position, Q, INF, None, Q, res_field, z, emb_prev)
    a = Fraction(ctx.p) ** gamma
    return ChainEntry(position, Q, gamma, a, Q / a, res_field, z, emb_prev)


@dataclass(frozen=True)
class KeyChain:
    ctx: ValuedFieldCtx
    g: UniPoly
    entries: tuple
    status: str              # "complete" | "prefix-of-infinite-plateau"
    mode: str                # "full" | "collapsed"
    branch_log: tuple = ()

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    @property
    def imax_pos(self):
        return self.entries[-1].position if self.complete else None

    @property
    def star_positions(self):
        n = len(self.entries)
        return list(range(n - 1 if self.complete else n))

    def entry(self, i: int) -> ChainEntry:
        if not 0 <= i < len(self.entries):
            raise MalformedInput(f"position {i} out of range")
        return self.entries[i]

    # -- recursive value evaluator ------------------------------------------

    def value_below(self, k: int, f: UniPoly):
        """Exact value of f computed from entries 0..k by cascaded
        expansions; valid whenever deg f stays below the next plateau degree
        above k."""
        if f.is_zero:
            return INF
        if k < 0 or f.degree == 0:
            if f.degree > 0:
                raise AssertionError("nonconstant reached the base of the evaluator")
            return pval(self.ctx, f.coeffs[0])
        ent = self.entries[k]
        if not is_finite(ent.gamma):
            return self.value_below(k - 1, f)
        if f.degree < ent.Q.degree:
            return self.value_below(k - 1, f)
        best = INF
        for j, fj in enumerate(qexpand(f, ent.Q)):
            if fj.is_zero:
                continue
            t = self.value_below(k - 1, fj) + j * ent.gamma
            if t < best:
                best = t
        return best

    def resval(self, k: int, f: UniPoly):
        """(value, residue) of f from entries 0..k; the residue of
        f(eta)/p^value lives in the stage field of entry k and is nonzero on
        the evaluator's exactness domain."""
        if f.is_zero:
            raise ValueError("resval of zero")
        if k < 0:
            c = f.coeffs[0]
            v = pval(self.ctx, c)
            u = c / Fraction(self.ctx.p) ** v
            fp = ResidueField.prime(self.ctx.p)
            return v, fp.from_int(u.numerator * pow(u.denominator, -1, self.ctx.p)), fp
        ent = self.entries[k]
        if ent.z is None or ent.res_field is None:
            raise AssertionError(f"residue data missing at position {k}")
        fld = ent.res_field
        pairs = []
        best = INF
        for j, fj in enumerate(_qexpand_any(f, ent.Qt)):
            if fj.is_zero:
                continue
            v, r, sub = self.resval(k - 1, fj)
            pairs.append((j, v, r, sub))
            if v < best:
                best = v
        res = fld.zero
        for j, v, r, sub in pairs:
            if v != best:
                continue
            rbig = _embedded(sub, fld, ent.emb_prev, r) if sub != fld else r
            res = fld.add(res, fld.mul(rbig, fld.pow(ent.z, j)))
        if fld.is_zero(res):
            raise AssertionError("vanishing residue: evaluator used outside its domain")
        return best, res, fld

    # -- oracle plumbing ------------------------------------------------------

    def branch_descriptor(self) -> BranchDescriptor:
        if self.complete:
            if not self.branch_log:
                return BranchDescriptor("unique")
            raise OracleUnavailable(
                "complete chain with branching choices: no certified method")
        last = self.entries[-1]
        if last.Q.degree != 1:
            raise OracleUnavailable(
                "truncated plateau of degree > 1: branch root not in the completion")
        c = -last.Q.coeffs[0]
        if c.denominator != 1:
            raise OracleUnavailable("non-integral approximation")
        seed = ResidueClass(int(c) % self.ctx.p ** int(last.gamma), int(last.gamma))
        return BranchDescriptor("hensel", seed)

    def nu(self, h: UniPoly) -> OracleValue:
        desc = self.branch_descriptor()
        if desc.kind != "hensel":
            return nu_oracle(self.ctx, self.g, desc, h)
        return self._nu_hensel_cached(desc, h)

    def _nu_hensel_cached(self, desc, h: UniPoly) -> OracleValue:
        """Hensel-method oracle reusing the deepest root approximation
        computed so far (chains are immutable, so the cache is sound)."""
        from .algebra import hensel_root, resultant
        if h.is_zero:
            return OracleValue(INF, "divisibility")
        if h.degree >= self.g.degree:
            h = h % self.g
            if h.is_zero:
                return OracleValue(INF, "divisibility")
        p = self.ctx.p
        dh = h.denominator_lcm()
        hh = h * dh
        bound = pval(self.ctx, resultant(self.g, hh))
        margin = 2
        cap = int(bound) + margin + 8
        root = self.cache().get("hensel_root")
        if root is None:
            root = hensel_root(self.ctx, self.g, desc.seed, max(desc.seed.precision + 2, 8))
        n = root.precision
        while True:
            if root.precision < n:
                root = hensel_root(self.ctx, self.g, root, n)
            self.cache()["hensel_root"] = root
            val = pval(self.ctx, hh(root.value))
            if val is not INF and val < n - margin:
                return OracleValue(val - pval(self.ctx, Fraction(dh)), "hensel")
            if n > cap:
                raise OracleUnavailable("valuation exceeds its certified bound")
            n = 2 * n

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    def cache(self):
        return self._cache


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    slope: Fraction
    length: int         # horizontal extent
    multiplicity: int   # lattice subdivisions, gcd(length, |rise|)


@dataclass(frozen=True)
class NewtonPolygon:
    points: tuple     # all (j, value) with nonzero coefficient
    vertices: tuple   # points lying on the lower hull, left to right
    segments: tuple   # merged hull edges by increasing slope


def _lower_hull(points):
    pts = sorted(points)
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # strict right turn keeps only corners
            if (x2 - x1) * (pt[1] - y1) - (pt[0] - x1) * (y2 - y1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(chain: KeyChain, i: int, f: UniPoly) -> NewtonPolygon:
    """Lower hull of (j, nu(f_j)) over the Q_i-expansion of f; coefficient
    values come from the chain-internal evaluator."""
    ent = chain.entry(i)
    if not is_finite(ent.gamma):
        raise MalformedInput("polygon needs a position of finite value")
    if f.is_zero:
        raise MalformedInput("polygon of the zero polynomial")
    pts = []
    for j, fj in enumerate(qexpand(f, ent.Q)):
        if fj.is_zero:
            continue
        pts.append((j, chain.value_below(i - 1, fj) if fj.degree >= 1
                    else pval(chain.ctx, fj.coeffs[0])))
    if len(pts) == 1:
        return NewtonPolygon((pts[0],), (pts[0],), ())
    corners = _lower_hull(pts)
    segments = []
    for (x1, y1), (x2, y2) in zip(corners, corners[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        length = x2 - x1
        rise = abs(y2 - y1)
        mult = gcd(length, int(rise)) if rise == int(rise) else 1
        segments.append(Segment(slope, length, mult))
    on_hull = []
    for pt in pts:
        for (x1, y1), (x2, y2) in zip(corners, corners[1:]):
            if x1 <= pt[0] <= x2 and (pt[1] - y1) * (x2 - x1) == (pt[0] - x1) * (y2 - y1):
                on_hull.append(pt)
                break
    return NewtonPolygon(tuple(pts), tuple(on_hull), tuple(segments))


def residual_poly(chain: KeyChain, i: int, f: UniPoly, slope):
    """Residual polynomial of f along the polygon segment of the given
    slope, over the stage residue field below position i.

    Returns (coeff tuple over the field, field).  A fractional slope means
    the value increment is not in vK = Z: that branch is ramified.
    """
    slope = Fraction(slope)
    poly = newton_polygon(chain, i, f)
    seg = next((s for s in poly.segments if s.slope == slope), None)
    if seg is None and len(poly.points) == 1:
        raise MalformedInput("degenerate polygon has no segments")
    if seg is None:
        raise MalformedInput(f"no segment of slope {slope}")
    t = -slope
    if t.denominator != 1:
        raise RamifiedBranch(f"fractional slope {slope}: e = 1 fails on this branch")
    t = int(t)
    x1, y1 = _segment_left(poly, slope)
    x2 = x1 + seg.length
    intercept = y1 + t * x1  # value of f_j p^{jt} on the line
    exp = qexpand(f, chain.entry(i).Q)
    fld = _stage_field_below(chain, i)
    coeffs = []
    for j in range(x1, x2 + 1):
        fj = exp[j] if j < len(exp) else UniPoly()
        if fj.is_zero:
            coeffs.append(fld.zero)
            continue
        cj = fj * Fraction(chain.ctx.p) ** (t * j - intercept)
        v, r, sub = chain.resval(i - 1, cj) if cj.degree >= 1 else _const_resval(chain, cj)
        if v > 0:
            coeffs.append(fld.zero)
        elif v == 0:
            coeffs.append(r if sub == fld else _embed_into(chain, i, sub, fld, r))
        else:
            raise AssertionError("negative normalized value on a hull point")
    return tuple(coeffs), fld


def _segment_left(poly: NewtonPolygon, slope):
    hull = _lower_hull(list(poly.points))
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if Fraction(y2 - y1, x2 - x1) == slope:
            return x1, y1
    raise MalformedInput(f"no segment of slope {slope}")


def _stage_field_below(chain: KeyChain, i: int) -> ResidueField:
    if i == 0:
        return ResidueField.prime(chain.ctx.p)
    ent = chain.entries[i - 1]
    if ent.res_field is None:
        raise AssertionError("stage field missing")
    return ent.res_field


def _const_resval(chain: KeyChain, c: UniPoly):
    fp = ResidueField.prime(chain.ctx.p)
    v = pval(chain.ctx, c.coeffs[0])
    u = c.coeffs[0] / Fraction(chain.ctx.p) ** v
    return v, fp.from_int(u.numerator * pow(u.denominator, -1, chain.ctx.p)), fp


def _embed_into(chain, i, sub, fld, r):
    # adjacent-stage embedding: entry i-1 carries the image of its
    # predecessor's generator
    ent = chain.entries[i - 1]
    return _embedded(sub, fld, ent.emb_prev, r)


# ---------------------------------------------------------------------------
# Chain construction
# ---------------------------------------------------------------------------

def gauss_start(ctx: ValuedFieldCtx, g: UniPoly) -> KeyChain:
    """Initial chain [x with value 0]; requires every root of g to be a
    unit, i.e. integral monic g with unit constant term and flat Newton
    polygon."""
    if not g.is_monic or g.degree < 1:
        raise UnsupportedNormalization("generator must be monic nonconstant")
    if not g.is_integral:
        raise UnsupportedNormalization("generator must have integral coefficients")
    if pval(ctx, g.coeffs[0]) != 0:
        raise UnsupportedNormalization(
            "v(g(0)) != 0: rescale the generator so every root is a unit")
    entry = _entry(ctx, 0, UniPoly.x(), 0)
    chain = KeyChain(ctx, g, (entry,), "prefix-of-infinite-plateau", FULL)
    poly = newton_polygon(chain, 0, g)
    if any(s.slope != 0 for s in poly.segments):
        raise UnsupportedNormalization(
            "nonzero Newton slope: rescale the generator so every root is a unit")
    return chain


@dataclass(frozen=True)
class BranchPoint:
    """Record of one augmentation step's menus and the picks made."""
    step: int
    factor_options: tuple
    factor_pick: int
    slope_options: tuple
    slope_pick: int

    @property
    def forced(self) -> bool:
        return len(self.factor_options) <= 1 and len(self.slope_options) <= 1


def _min_segment_residual(chain: KeyChain):
    """Residual of g along the minimal segment at the top entry, plus the
    segment data (min value m, left index j0)."""
    top = chain.entries[-1]
    exp = qexpand(chain.g, top.Q)
    vals = {}
    for j, gj in enumerate(exp):
        if gj.is_zero:
            continue
        vals[j] = (chain.value_below(len(chain.entries) - 2, gj)
                   if gj.degree >= 1 else pval(chain.ctx, gj.coeffs[0])) + j * top.gamma
    if 0 not in vals:
        raise MalformedInput("generator is divisible by a key polynomial; g is reducible")
    m = min(vals.values())
    s_set = [j for j, v in vals.items() if v == m]
    j0, j1 = min(s_set), max(s_set)
    if len(s_set) < 2:
        raise AssertionError("minimal value attained once; chain data inconsistent")
    k = len(chain.entries) - 1
    fld = _stage_field_below(chain, k)
    coeffs = []
    for j in range(j0, j1 + 1):
        gj = exp[j]
        if gj.is_zero or vals.get(j, INF) > m:
            coeffs.append(fld.zero)
            continue
        cj = gj * Fraction(chain.ctx.p) ** (j * int(top.gamma) - int(m))
        v, r, sub = (chain.resval(k - 1, cj) if cj.degree >= 1
                     else _const_resval(chain, cj))
        if v != 0:
            raise AssertionError("segment term does not normalize to a unit")
        coeffs.append(r if sub == fld else _embed_into(chain, k, sub, fld, r))
    return tuple(coeffs), fld, int(m), j0


def _refine_key(chain: KeyChain, root, fld: ResidueField) -> UniPoly:
    """Same-degree refinement of the top key along a linear residual factor."""
    top = chain.entries[-1]
    p = chain.ctx.p
    if top.Q.degree != 1:
        raise MalformedInput(
            "within-plateau refinement above degree 1 is not constructible here")
    if fld.k != 1:
        raise AssertionError("degree-1 plateau with extended residue field")
    zhat = root[0] % p
    c_prev = -top.Q.coeffs[0]
    gamma = int(top.gamma)
    if gamma == 0:
        # first refinement of the Gauss key: coefficientwise lift of the
        # factor y - root, i.e. x - c with c = -(p - zhat) reduced: x + lift
        c_new = -((p - zhat) % p)
    else:
        modulus = p ** (gamma + 1)
        c_new = (int(c_prev) + zhat * p ** gamma) % modulus
    return UniPoly((-c_new, 1))


def _jump_key(chain: KeyChain, phi, fld: ResidueField) -> UniPoly:
    """Degree-jump lift: recombine the coefficientwise-smallest lift of the
    chosen factor with powers of the current key."""
    top = chain.entries[-1]
    p = chain.ctx.p
    if fld.k != 1:
        raise MalformedInput(
            "degree jump over an extended residue field is not constructible here")
    d = len(phi) - 1
    gamma = int(top.gamma)
    out = UniPoly()
    for k, c in enumerate(phi):
        ck = c[0] % p
        if ck == 0:
            continue
        out = out + top.Q ** k * (ck * Fraction(p) ** ((d - k) * gamma))
    return out


def _admissible_slopes(chain: KeyChain, cand: UniPoly):
    """Slopes -t of the candidate's polygon with t above the current
    truncation value of the candidate; these are the possible values
    nu(candidate) across branches through the current stage."""
    k = len(chain.entries) - 1
    threshold = chain.value_below(k, cand)
    exp = qexpand(chain.g, cand)
    pts = []
    for j, gj in enumerate(exp):
        if gj.is_zero:
            continue
        pts.append((j, chain.value_below(k, gj) if gj.degree >= 1
                    else pval(chain.ctx, gj.coeffs[0])))
    if 0 not in dict(pts):
        raise MalformedInput("candidate key divides g; g is reducible")
    hull = _lower_hull(pts)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        t = -Fraction(y2 - y1, x2 - x1)
        if t > threshold:
            slopes.append(t)
    slopes.sort(reverse=True)  # hull order: steepest (largest t) first
    return slopes, threshold


def augment(chain: KeyChain, branch_choice=None) -> KeyChain:
    """One augmentation step; returns a new chain.

    branch_choice is a (slope index, factor index) pair consumed only when
    the step presents more than one option in either menu.
    """
    if chain.complete:
        raise MalformedInput("chain already complete")
    coeffs, fld, m, j0 = _min_segment_residual(chain)
    factors = [f for f, mult in fld.factor_monic(coeffs)]
    step = len(chain.entries) - 1
    choiceful = len(factors) > 1
    if choiceful and branch_choice is None:
        raise AmbiguousBranch(f"step {step}: {len(factors)} residual factors")
    fac_idx, slope_idx = 0, 0
    if branch_choice is not None:
        slope_idx, fac_idx = branch_choice
    if not 0 <= fac_idx < len(factors):
        raise AmbiguousBranch(f"factor index {fac_idx} out of range at step {step}")
    phi = factors[fac_idx]
    top = chain.entries[-1]
    if top.Q.degree * (len(phi) - 1) == chain.g.degree:
        # the chosen factor exhausts g: append g itself with value infinity
        gent = ChainEntry(top.position + 1, chain.g, INF, None, chain.g)
        log = chain.branch_log
        if choiceful:
            log = log + (BranchPoint(step, tuple(factors), fac_idx, (), 0),)
        return KeyChain(chain.ctx, chain.g, chain.entries + (gent,), "complete",
                        chain.mode, log)
    # fix the top entry's residue data from the chosen factor
    if len(phi) - 1 == 1:
        root = fld.neg(phi[0])
        new_field, emb, z_top = fld, fld.gen, root
        cand = _refine_key(chain, root, fld)
    else:
        new_field, emb, z_top = fld.extend_by(phi)
        cand = _jump_key(chain, phi, fld)
    patched_top = replace(top, res_field=new_field, z=z_top,
                          emb_prev=_prev_emb(chain, fld, new_field))
    patched = KeyChain(chain.ctx, chain.g, chain.entries[:-1] + (patched_top,),
                       chain.status, chain.mode, chain.branch_log)
    slopes, threshold = _admissible_slopes(patched, cand)
    if not slopes:
        raise AssertionError("no admissible slope for a freshly built key")
    choiceful = choiceful or len(slopes) > 1
    if len(slopes) > 1 and branch_choice is None:
        raise AmbiguousBranch(
            f"step {step}: {len(slopes)} admissible slopes")
    if not 0 <= slope_idx < len(slopes):
        raise AmbiguousBranch(f"slope index {slope_idx} out of range at step {step}")
    t = slopes[slope_idx]
    if t.denominator != 1:
        raise RamifiedBranch(
            f"chosen branch has value increment {t}: e = 1 fails on this branch")
    gamma_new = int(t)
    new_entry = _entry(chain.ctx, top.position + 1, cand, gamma_new)
    log = patched.branch_log
    if choiceful:
        log = log + (BranchPoint(step, tuple(factors), fac_idx, tuple(slopes), slope_idx),)
    return KeyChain(chain.ctx, chain.g, patched.entries + (new_entry,),
                    chain.status, chain.mode, log)


def _prev_emb(chain: KeyChain, old_field: ResidueField, new_field: ResidueField):
    """Image of the previous entry's field generator inside the (possibly
    extended) stage field of the top entry."""
    k = len(chain.entries) - 1
    below = _stage_field_below(chain, k)
    if new_field == below:
        return below.gen
    # below embeds into new_field; canonical root of below's modulus
    from .algebra import _embed_generator
    return _embed_generator(below, new_field)


def build_chain(ctx: ValuedFieldCtx, g: UniPoly, branch_selector="unique",
                depth: int = 16, mode: str = FULL) -> KeyChain:
    """Drive augmentation to completion or to a prefix of `depth` entries.

    branch_selector is "unique" (every step must be forced) or a list of
    (slope index, factor index) pairs consumed by choiceful steps in order.
    """
    if depth < 1:
        raise MalformedInput("depth must be >= 1")
    if mode not in (FULL, COLLAPSED):
        raise MalformedInput(f"unknown mode {mode!r}")
    chain = gauss_start(ctx, g)
    picks = list(branch_selector) if branch_selector != "unique" else None
    used = 0
    while not chain.complete:
        at_depth = len(chain.entries) >= depth
        try:
            nxt, used2 = _try_augment(chain, picks, used)
        except AmbiguousBranch:
            if at_depth:
                break
            raise
        if at_depth and not nxt.complete:
            # depth reached and the next step only refines: stop here
            break
        chain, used = nxt, used2
    if mode == COLLAPSED:
        chain = collapse(chain)
    return chain


def _try_augment(chain, picks, used):
    try:
        return augment(chain, None), used
    except AmbiguousBranch:
        if picks is None or used >= len(picks):
            raise
        return augment(chain, tuple(picks[used])), used + 1


def collapse(chain: KeyChain) -> KeyChain:
    """Keep only the last element of every finite plateau (truncated-infinite
    plateaus and the final entry are kept whole) and re-index positions."""
    seg = segment(chain)
    keep = []
    for pl in seg.plateaus:
        if pl.flag in ("singleton", "truncated-infinite"):
            keep.extend(pl.positions)
        else:
            keep.append(pl.positions[-1])
    new_entries = []
    for newpos, old in enumerate(keep):
        ent = chain.entries[old]
        new_entries.append(replace(ent, position=newpos))
    return KeyChain(chain.ctx, chain.g, tuple(new_entries), chain.status,
                    COLLAPSED, chain.branch_log)


# ---------------------------------------------------------------------------
# Plateau and segment combinatorics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Plateau:
    q: int                # 1-based plateau index
    degree: int
    positions: tuple
    first: int            # ell_q
    flag: str             # "singleton" | "finite-multi" | "truncated-infinite"


@dataclass(frozen=True)
class Segmentation:
    plateaus: tuple
    n_plus: dict          # plateau degree -> next plateau degree
    q_of: dict            # position -> plateau index
    succ_pairs: tuple     # (i, ell, kind) with ell a position or IMAX
    imax_sources: tuple   # positions i with Q_i <_succ Q_imax

    def plateau_of(self, i: int) -> Plateau:
        return self.plateaus[self.q_of[i] - 1]

    def offset(self, i: int) -> int:
        return i - self.plateau_of(i).first

    def level(self, ell, i) -> int:
        """s(ell, i) for a successor pair."""
        if ell != IMAX and ell == i + 1:
            return self.offset(i)
        ell_off = 0 if ell == IMAX else self.offset(ell)
        return max(self.offset(i), ell_off)

    def is_neat_pair(self, ell, i) -> bool:
        if ell == IMAX:
            return True  # the final plateau is a singleton
        qi, ql = self.q_of[i], self.q_of[ell]
        if qi == ql:
            return True
        pi, pl = self.plateaus[qi - 1], self.plateaus[ql - 1]
        if pi.flag == "truncated-infinite" and pl.flag == "truncated-infinite":
            return self.offset(i) == self.offset(ell)
        return True


def segment(chain: KeyChain) -> Segmentation:
    cache = chain.cache()
    if "segmentation" in cache:
        return cache["segmentation"]
    plateaus = []
    positions_by_degree = []
    for ent in chain.entries:
        d = ent.Q.degree
        if positions_by_degree and positions_by_degree[-1][0] == d:
            positions_by_degree[-1][1].append(ent.position)
        else:
            positions_by_degree.append((d, [ent.position]))
    q_of = {}
    for qi, (d, poss) in enumerate(positions_by_degree, start=1):
        last_block = qi == len(positions_by_degree)
        if last_block and not chain.complete:
            flag = "truncated-infinite"
        elif len(poss) == 1:
            flag = "singleton"
        else:
            flag = "finite-multi"
        plateaus.append(Plateau(qi, d, tuple(poss), poss[0], flag))
        for i in poss:
            q_of[i] = qi
    n_plus = {}
    for a, b in zip(plateaus, plateaus[1:]):
        n_plus[a.degree] = b.degree
    n_plus[plateaus[-1].degree] = chain.g.degree
    pairs = []
    star = set(chain.star_positions)
    for i in star:
        ell = i + 1
        if ell in q_of:
            kind = "imm"
            if not chain.complete or ell != chain.imax_pos:
                pairs.append((i, ell, kind))
        # limit successors inside the chain would need an infinite non-final
        # plateau, which prefixes never contain
    if chain.complete:
        imax = chain.imax_pos
        pairs.append((imax - 1, IMAX, "imm"))
        sources = (imax - 1,)
    else:
        final = plateaus[-1]
        if final.flag != "truncated-infinite":
            raise AssertionError("incomplete chain without a truncated plateau")
        for i in final.positions:
            pairs.append((i, IMAX, "lim"))
        sources = final.positions
    seg = Segmentation(tuple(plateaus), n_plus, q_of, tuple(pairs), tuple(sources))
    cache["segmentation"] = seg
    return seg


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    subject: object
    passed: bool
    witness: object = None


def validate(chain: KeyChain):
    """Report-based checks: strong monicity along successor pairs, e = 1
    integrality, strict value increase within plateaus, the normalization
    a_i = p^gamma_i and nu(Qt_i) = 0 against the oracle."""
    ctx = chain.ctx
    seg = segment(chain)
    out = []
    for i in chain.star_positions:
        ent = chain.entries[i]
        g_ok = is_finite(ent.gamma) and Fraction(ent.gamma).denominator == 1
        out.append(CheckResult("gamma-integral", i, bool(g_ok), ent.gamma))
        if g_ok:
            out.append(CheckResult("a-is-p-power", i,
                                   ent.a == Fraction(ctx.p) ** int(ent.gamma), ent.a))
    if chain.mode == FULL and chain.entries:
        first = chain.entries[0]
        out.append(CheckResult("first-entry-gauss", 0,
                               first.Q == UniPoly.x() and first.gamma == 0, first.Q))
    for pl in seg.plateaus:
        gs = [chain.entries[i].gamma for i in pl.positions]
        finite = [g for g in gs if is_finite(g)]
        out.append(CheckResult("plateau-strictly-increasing", pl.q,
                               all(a < b for a, b in zip(finite, finite[1:])), tuple(gs)))
    for (i, ell, kind) in seg.succ_pairs:
        ql = chain.g if ell == IMAX else chain.entries[ell].Q
        if ell == IMAX and not chain.complete:
            continue
        exp = qexpand(ql, chain.entries[i].Q)
        r = len(exp) - 1
        monic = exp[r] == UniPoly((1,))
        vals = {}
        for j, fj in enumerate(exp):
            if fj.is_zero:
                continue
            vals[j] = chain.value_below(i - 1, fj) if fj.degree >= 1 else \
                pval(ctx, fj.coeffs[0])
            vals[j] = vals[j] + j * chain.entries[i].gamma
        m = min(vals.values())
        label = "strongly-monic" if ell != IMAX else "strongly-monic-imax"
        out.append(CheckResult(label, (ell, i), monic and vals.get(r) == m,
                               {"top_index": r, "monic": monic, "values": vals}))
    # oracle-backed normalization checks when a branch descriptor exists
    try:
        for i in chain.star_positions:
            ent = chain.entries[i]
            got = chain.nu(ent.Qt).value
            out.append(CheckResult("qt-unit-value", i, got == 0, got))
            gotq = chain.nu(ent.Q).value
            out.append(CheckResult("gamma-matches-oracle", i, gotq == ent.gamma, gotq))
    except OracleUnavailable as e:
        out.append(CheckResult("oracle-available", None, False, str(e)))
    return out


def validation_passed(report) -> bool:
    return all(c.passed for c in report)
