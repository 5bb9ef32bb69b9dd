"""Truncated valuations, S-sets, full expansions at a chain position, their
levels and neatness, and the combinatorial window-dropping step that aligns
expansion supports across infinite plateaus.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import INF, UniPoly, _qexpand_any, is_finite, pval, qexpand
from .errors import InsufficientDepth, MalformedInput
from .keychain import KeyChain, segment
from .xpoly import XPoly, monom

ORACLE = "oracle"
RECURSIVE = "recursive"


def _coeff_value(chain: KeyChain, f: UniPoly, method: str):
    if f.is_zero:
        return INF
    if f.degree == 0:
        return pval(chain.ctx, f.coeffs[0])
    if method == RECURSIVE:
        return chain.value_below(len(chain.entries) - 1, f)
    return chain.nu(f).value


def truncate(chain: KeyChain, i: int, f: UniPoly, method: str = ORACLE):
    """nu_i(f) = min_j nu(f_j Q_i^j) over the Q_i-expansion.

    Coefficient values come from the valuation oracle by default; the
    chain-internal recursive evaluator is the cross-checking route.
    """
    ent = chain.entry(i)
    if not is_finite(ent.gamma):
        raise MalformedInput("truncation needs a position of finite value")
    if f.is_zero:
        return INF
    best = INF
    for j, fj in enumerate(qexpand(f, ent.Q)):
        if fj.is_zero:
            continue
        t = _coeff_value(chain, fj, method) + j * ent.gamma
        if t < best:
            best = t
    return best


@dataclass(frozen=True)
class SSet:
    position: int
    indices: tuple


def s_set(chain: KeyChain, i: int, f: UniPoly, method: str = ORACLE) -> SSet:
    """Indices of the Q_i-expansion attaining nu_i(f)."""
    ent = chain.entry(i)
    if not is_finite(ent.gamma):
        raise MalformedInput("S-set needs a position of finite value")
    vals = {}
    for j, fj in enumerate(qexpand(f, ent.Q)):
        if fj.is_zero:
            continue
        vals[j] = _coeff_value(chain, fj, method) + j * ent.gamma
    if not vals:
        raise MalformedInput("S-set of the zero polynomial")
    m = min(vals.values())
    return SSet(i, tuple(sorted(j for j, v in vals.items() if v == m)))


@dataclass(frozen=True)
class FullExpansion:
    """A full i-th expansion: f = sum b_j Qt^(lambda_j) with min v(b_j)
    equal to nu_i(f), bounded exponents below the anchor, and at most one
    position per plateau degree."""

    anchor: int
    terms: tuple          # ((coeff, monom), ...) canonically sorted
    nu_value: object
    index_tuple: tuple    # appearing positions, decreasing

    def as_xpoly(self) -> XPoly:
        return XPoly({m: c for c, m in self.terms})

    def evaluate(self, chain: KeyChain) -> UniPoly:
        images = {i: chain.entries[i].Qt for i in range(len(chain.entries))}
        return self.as_xpoly().eval_unipoly(images)


def _pick_common_position(chain: KeyChain, below_plateau: int, polys):
    """Smallest position in a plateau strictly below `below_plateau` whose
    truncation is exact on every given polynomial simultaneously."""
    seg = segment(chain)
    for k in chain.star_positions:
        if seg.q_of[k] >= below_plateau:
            break
        ok = True
        for c in polys:
            if truncate(chain, k, c) != chain.nu(c).value:
                ok = False
                break
        if ok:
            return k
    raise InsufficientDepth(
        "no chain position computes every coefficient value exactly; "
        "the truncated plateau is too shallow")


def full_expansion(chain: KeyChain, i: int, f: UniPoly) -> FullExpansion:
    """Constructive full i-th expansion: expand in Qt_i, then cascade the
    coefficients through one common position per lower plateau."""
    if f.is_zero:
        raise MalformedInput("no full expansion of zero")
    ent = chain.entry(i)
    if i not in chain.star_positions or not is_finite(ent.gamma):
        raise MalformedInput("anchor must be a pre-maximal position")
    seg = segment(chain)
    pending = []
    for j, cj in enumerate(_qexpand_any(f, ent.Qt)):
        if not cj.is_zero:
            pending.append((cj, {i: j} if j else {}))
    level_pos = i
    while any(c.degree >= 1 for c, _ in pending):
        nonconst = [c for c, _ in pending if c.degree >= 1]
        k = _pick_common_position(chain, seg.q_of[level_pos], nonconst)
        nxt = []
        for c, mono in pending:
            if c.degree == 0:
                nxt.append((c, mono))
                continue
            for j, d in enumerate(_qexpand_any(c, chain.entries[k].Qt)):
                if d.is_zero:
                    continue
                m2 = dict(mono)
                if j:
                    m2[k] = j
                nxt.append((d, m2))
        pending = nxt
        level_pos = k
    terms = {}
    for c, mono in pending:
        m = monom(mono)
        terms[m] = terms.get(m, Fraction(0)) + c.coeffs[0]
    items = tuple(sorted(((c, m) for m, c in terms.items() if c != 0),
                         key=lambda cm: cm[1]))
    nu_val = min(pval(chain.ctx, c) for c, _ in items)
    appearing = sorted({k for _, m in items for k, e in m if e > 0}, reverse=True)
    return FullExpansion(i, items, nu_val, tuple(appearing))


def expansion_from_index_tuple(chain: KeyChain, f: UniPoly, anchor: int,
                               index_tuple) -> FullExpansion:
    """Reproduce an expansion from its appearing-index tuple: a pure cascade
    of expansions at exactly those positions, no valuation choices."""
    order = sorted(set(index_tuple) | {anchor}, reverse=True)
    pending = [(f, {})]
    for k in order:
        nxt = []
        for c, mono in pending:
            if c.degree == 0:
                nxt.append((c, mono))
                continue
            for j, d in enumerate(_qexpand_any(c, chain.entries[k].Qt)):
                if d.is_zero:
                    continue
                m2 = dict(mono)
                if j:
                    m2[k] = j
                nxt.append((d, m2))
        pending = nxt
    if any(c.degree >= 1 for c, _ in pending):
        raise MalformedInput("index tuple does not reach constant coefficients")
    terms = {}
    for c, mono in pending:
        m = monom(mono)
        terms[m] = terms.get(m, Fraction(0)) + c.coeffs[0]
    items = tuple(sorted(((c, m) for m, c in terms.items() if c != 0),
                         key=lambda cm: cm[1]))
    nu_val = min(pval(chain.ctx, c) for c, _ in items)
    appearing = sorted({k for _, m in items for k, e in m if e > 0}, reverse=True)
    return FullExpansion(anchor, items, nu_val, tuple(appearing))


def check_conditions(chain: KeyChain, exp: FullExpansion, f: UniPoly) -> dict:
    """The three defining conditions plus the evaluation identity."""
    seg = segment(chain)
    ok1 = exp.nu_value == truncate(chain, exp.anchor, f)
    ok2 = True
    for _, m in exp.terms:
        for k, e in m:
            if k == exp.anchor:
                continue
            deg = chain.entries[k].Q.degree
            if not e < Fraction(seg.n_plus[deg], deg):
                ok2 = False
    degs = [chain.entries[k].Q.degree for k in exp.index_tuple]
    ok3 = len(degs) == len(set(degs))
    ok_eval = exp.evaluate(chain) == f
    return {"min_is_truncation": ok1, "exponent_bounds": ok2,
            "one_position_per_degree": ok3, "evaluation_identity": ok_eval}


def expansion_level(chain: KeyChain, exp: FullExpansion):
    """(level, neat flag, plateau -> appearing position map).

    Neat means all truncated-infinite plateaus carry a common offset; the
    level is that offset, or 0 when no such plateau is involved.
    """
    seg = segment(chain)
    jmap = {}
    for pl in seg.plateaus:
        hits = [k for k in exp.index_tuple if k in pl.positions]
        jmap[pl.q] = max(hits) if hits else None
    offsets = [jmap[pl.q] - pl.first for pl in seg.plateaus
               if pl.flag == "truncated-infinite" and jmap[pl.q] is not None]
    neat = len(set(offsets)) <= 1
    level = offsets[0] if neat and offsets else 0
    return level, neat, jmap


@dataclass(frozen=True)
class NeatRevision:
    plateau_sizes: tuple
    supports: tuple       # tuple of dicts plateau index -> offset
    windows: tuple        # (plateau index, start offset, stop offset) dropped


def make_neat(plateau_sizes, supports, s: int) -> NeatRevision:
    """Align every stored support to offset s on each infinite plateau by
    dropping the index window [s, u) there and re-indexing.

    Operates on the combinatorial skeleton only: plateau_sizes entries are
    ints or None (infinite); supports are maps plateau index -> offset.
    Processes infinite plateaus in decreasing order; at most one pass each.
    """
    sizes = list(plateau_sizes)
    sup = [dict(x) for x in supports]
    windows = []
    for qi in range(len(sizes) - 1, -1, -1):
        if sizes[qi] is not None:
            continue
        used = sorted({d[qi] for d in sup if qi in d})
        above = [o for o in used if o != s]
        if not above:
            continue
        if len(above) > 1 or above[0] < s:
            raise MalformedInput(
                f"plateau {qi}: offsets {used} do not share a single excess offset")
        u = above[0]
        if any(s <= d[qi] < u for d in sup if qi in d):
            raise MalformedInput(
                f"plateau {qi}: a support lies inside the dropped window")
        for d in sup:
            if qi in d and d[qi] >= u:
                d[qi] -= u - s
        windows.append((qi, s, u))
    return NeatRevision(tuple(sizes), tuple(sup), tuple(windows))
