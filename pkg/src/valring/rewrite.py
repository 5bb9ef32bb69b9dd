"""The rewriting calculus on K[X]: virtual degree, the termination order,
neat polynomials, buildings and reductions with cofactor traces, the total
s-building and the total reduction.

A building trades powers of a relation body Q_{li}/b_{li} for the variable
X_l; a reduction substitutes the body back.  Traces record exact cofactors:
output = input + sum(cofactor * relation generator) syntactically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import UniPoly
from .errors import MalformedInput, StepCapExceeded
from .keychain import KeyChain, segment
from .presentrel import ideal_generators, relation
from .xpoly import XPoly, power_expansion

LESS = "less"
GREATER = "greater"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


def _check_positions(chain: KeyChain, F: XPoly):
    star = set(chain.star_positions)
    for k in F.variables():
        if k not in star:
            raise MalformedInput(f"variable X_{k} out of range for this chain")


def vdeg(chain: KeyChain, F: XPoly) -> int:
    """Virtual degree: each X_i weighs deg_x Q_i."""
    if F.is_zero:
        raise MalformedInput("virtual degree of zero")
    _check_positions(chain, F)
    out = 0
    for m in F.terms:
        out = max(out, sum(e * chain.entries[k].Q.degree for k, e in m))
    return out


def _vdeg_monom(chain, m):
    return sum(e * chain.entries[k].Q.degree for k, e in m)


def _monom_lex_key(chain, m):
    """Exponent vector scanned from X_0 upward; smaller exponent first
    difference = lex-smaller monomial."""
    top = max((k for k, _ in m), default=-1)
    return tuple(dict(m).get(k, 0) for k in range(top + 1))


def _lex_less(chain, m1, m2) -> bool:
    k1, k2 = _monom_lex_key(chain, m1), _monom_lex_key(chain, m2)
    n = max(len(k1), len(k2))
    k1 = k1 + (0,) * (n - len(k1))
    k2 = k2 + (0,) * (n - len(k2))
    return k1 < k2


def prec_compare(chain: KeyChain, F: XPoly, G: XPoly) -> str:
    """The partial order on polynomials: compare virtually homogeneous
    components from the top degree down; within a degree compare the sorted
    monomial support lists lexicographically.  Equal supports with different
    coefficients are incomparable."""
    if F == G:
        return EQUAL
    parts_f = {}
    parts_g = {}
    for m, c in F.terms.items():
        parts_f.setdefault(_vdeg_monom(chain, m), {})[m] = c
    for m, c in G.terms.items():
        parts_g.setdefault(_vdeg_monom(chain, m), {})[m] = c
    degrees = sorted(set(parts_f) | set(parts_g), reverse=True)
    for d in degrees:
        pf, pg = parts_f.get(d, {}), parts_g.get(d, {})
        if pf == pg:
            continue
        sf = sorted(pf, key=lambda m: _monom_lex_key(chain, m), reverse=True)
        sg = sorted(pg, key=lambda m: _monom_lex_key(chain, m), reverse=True)
        for mf, mg in zip(sf, sg):
            if mf == mg:
                continue
            return LESS if _lex_less(chain, mf, mg) else GREATER
        if len(sf) != len(sg):
            # the shorter list is padded with zeroes, which are lex-smallest
            return LESS if len(sf) < len(sg) else GREATER
        return INCOMPARABLE
    return INCOMPARABLE


@dataclass(frozen=True)
class NeatReport:
    neat: bool
    level: int
    note: str | None = None


def is_neat(chain: KeyChain, F: XPoly) -> NeatReport:
    """The three neatness conditions.

    Condition (1), one variable per plateau, is enforced literally on
    truncated-infinite plateaus; on finite multi-element plateaus (full
    mode) a violation is tolerated and flagged, since collapsed indexing
    would separate those positions.
    """
    if F.is_zero:
        raise MalformedInput("neatness of zero")
    _check_positions(chain, F)
    seg = segment(chain)
    vars_ = F.variables()
    note = None
    level_offsets = []
    for pl in seg.plateaus:
        hits = [k for k in vars_ if k in pl.positions]
        if len(hits) > 1:
            if pl.flag == "truncated-infinite":
                return NeatReport(False, 0, "two variables in an infinite plateau")
            note = "neat under collapsed indexing"
        if hits and pl.flag == "truncated-infinite":
            level_offsets.append(max(hits) - pl.first)
    if len(set(level_offsets)) > 1:
        return NeatReport(False, 0, "offsets disagree across infinite plateaus")
    level = level_offsets[0] if level_offsets else 0
    if vars_:
        top = max(vars_)
        for k in vars_:
            if k == top:
                continue
            dk = chain.entries[k].Q.degree
            if not F.degree_in(k) < Fraction(seg.n_plus[dk], dk):
                return NeatReport(False, 0, f"exponent bound fails at X_{k}")
    return NeatReport(True, level, note)


@dataclass(frozen=True)
class TraceStep:
    pair: tuple           # (i, ell)
    target: object        # the I1 generator's target position
    cofactor: XPoly
    direction: str        # "building" | "reduction"


def replay(chain: KeyChain, steps) -> XPoly:
    """Sum of cofactor * relation generator over a trace."""
    gens = ideal_generators(chain)
    acc = XPoly.zero()
    for st in steps:
        acc = acc + st.cofactor * gens.i1_by_target(st.target).relation_poly
    return acc


def building(chain: KeyChain, F: XPoly, i: int, ell: int, trace=None) -> XPoly:
    """(i, ell)-building: write F in powers of Q_{li}/b_{li} with X_i-degree
    of the coefficients below deg_{Q_i} Q_l, then substitute X_ell."""
    _check_positions(chain, F)
    gen = relation(chain, ell, i)
    p_body = gen.Q_poly / gen.b
    r = chain.entries[ell].Q.degree // chain.entries[i].Q.degree
    if F.degree_in(i) < r:
        return F
    coeffs = power_expansion(F, p_body, i)
    out = XPoly.zero()
    xell = XPoly.var(ell)
    for j, aj in enumerate(coeffs):
        out = out + aj * xell ** j
    if trace is not None:
        # out - F = (X_ell - P) * S = (rel / b) * S
        s_acc = XPoly.zero()
        for j, aj in enumerate(coeffs):
            if j == 0 or aj.is_zero:
                continue
            for mth in range(j):
                s_acc = s_acc + aj * xell ** mth * p_body ** (j - 1 - mth)
        trace.append(TraceStep((i, ell), ell, s_acc / gen.b, "building"))
    return out


def reduction(chain: KeyChain, F: XPoly, i: int, ell: int, trace=None) -> XPoly:
    """(i, ell)-reduction: substitute Q_{li}/b_{li} for X_ell."""
    _check_positions(chain, F)
    gen = relation(chain, ell, i)
    p_body = gen.Q_poly / gen.b
    out = F.substitute(ell, p_body)
    if trace is not None:
        xell = XPoly.var(ell)
        s_acc = XPoly.zero()
        for e, coeff in F.coeffs_in(ell).items():
            if e == 0:
                continue
            for mth in range(e):
                s_acc = s_acc + coeff * xell ** mth * p_body ** (e - 1 - mth)
        trace.append(TraceStep((i, ell), ell, -s_acc / gen.b, "reduction"))
    return out


def _window(chain: KeyChain, F: XPoly, s: int, through=None):
    """The working window Theta: positions of offset <= s in plateaus up to
    the top plateau of F's variables (or of `through`, when given)."""
    seg = segment(chain)
    vars_ = F.variables()
    if not vars_ and through is None:
        return []
    qtop = max((seg.q_of[k] for k in vars_), default=1)
    if through is not None:
        qtop = max(qtop, seg.q_of[through])
    out = []
    for pl in seg.plateaus[:qtop]:
        if pl.positions and pl.positions[-1] == chain.imax_pos:
            continue
        for k in pl.positions:
            if k - pl.first <= s:
                out.append(k)
    return out


def _succ_in_window(chain: KeyChain, i: int, window) -> int | None:
    """The building target for i inside the window: the next position when
    it stays in the window, else the matching-offset (or first) element of
    the next plateau."""
    seg = segment(chain)
    pl = seg.plateau_of(i)
    nxt = i + 1
    if nxt in window and nxt in pl.positions:
        return nxt
    if i == pl.positions[-1]:
        # finite plateau end: the global successor is the next plateau's first
        if nxt in window:
            return nxt
        return None
    if pl.flag == "truncated-infinite":
        qnext = pl.q + 1
        if qnext - 1 < len(seg.plateaus):
            target_pl = seg.plateaus[qnext - 1]
            if target_pl.flag == "truncated-infinite":
                cand = target_pl.first + (i - pl.first)
            else:
                cand = target_pl.first
            if cand in window and seg.is_neat_pair(cand, i):
                return cand
    return None


def _applicable(chain: KeyChain, F: XPoly, i: int, ell: int) -> bool:
    ratio = chain.entries[ell].Q.degree // chain.entries[i].Q.degree
    return F.degree_in(i) >= max(ratio, 1)


def total_s_building(chain: KeyChain, F: XPoly, s: int, trace=None,
                     order: str = "least", through=None) -> XPoly:
    """Apply buildings inside the offset-s window until none is applicable.

    Deterministic pair selection (least applicable source position, or
    greatest with order="greatest"); every step strictly decreases the
    polynomial in the termination order, and a defensive step cap turns an
    impossible loop into a loud failure.  `through` widens the window to
    the plateau of that position (used by certificate generation).
    """
    if F.is_zero:
        return F
    _check_positions(chain, F)
    seg = segment(chain)
    for k in F.variables():
        if seg.offset(k) > s:
            raise MalformedInput(
                f"X_{k} sits at offset {seg.offset(k)} > s = {s}")
    window = _window(chain, F, s, through)
    n_monoms = len(F.terms)
    max_expsum = max((sum(e for _, e in m) for m in F.terms), default=0)
    cap = 10 * max(1, n_monoms) * (len(window) + max_expsum) ** 2 + 10
    cur = F
    steps = 0
    while True:
        candidates = []
        for i in window:
            ell = _succ_in_window(chain, i, window)
            if ell is None:
                continue
            if _applicable(chain, cur, i, ell):
                candidates.append((i, ell))
        if not candidates:
            return cur
        pick = min(candidates) if order == "least" else max(candidates)
        cur = building(chain, cur, pick[0], pick[1], trace)
        steps += 1
        if steps > cap:
            raise StepCapExceeded(f"total s-building exceeded {cap} steps")


def total_reduction(chain: KeyChain, F: XPoly, trace=None) -> UniPoly:
    """Collapse to K[X_0] by substituting Qt_i(X_0) for every variable.

    With a trace, the same result is produced by a chain of reductions at
    immediate-predecessor pairs and both routes are compared exactly.
    """
    _check_positions(chain, F)
    images = {k: XPoly.from_unipoly(chain.entries[k].Qt, 0)
              for k in chain.star_positions}
    direct = F
    for k in sorted(F.variables(), reverse=True):
        if k == 0:
            continue
        direct = direct.substitute(k, images[k])
    if trace is not None:
        stepwise = F
        while True:
            vars_ = [k for k in stepwise.variables() if k >= 1]
            if not vars_:
                break
            top = max(vars_)
            stepwise = reduction(chain, stepwise, top - 1, top, trace)
        if stepwise != direct:
            raise AssertionError("reduction trace disagrees with substitution")
    return direct.to_unipoly(0)
