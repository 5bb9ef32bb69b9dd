"""The normalized relation data of a chain: scalars b, relation bodies Q,
the ideals I1 and I2 with their positional filters, within-plateau
relations, and redundancy cofactors along a truncated plateau.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import UniPoly, pval, qexpand
from .errors import MalformedInput
from .expandval import full_expansion, s_set
from .keychain import IMAX, KeyChain, segment
from .xpoly import XPoly, mu0


@dataclass(frozen=True)
class RelationGen:
    kind: str             # "I1" | "I2"
    target: object        # position or IMAX
    source: int
    b: Fraction
    Q_poly: XPoly         # integral, mu0 = 0
    level: int
    relation_poly: XPoly | None  # b*X_target - Q_poly for I1, None for I2

    @property
    def h(self) -> Fraction:
        """For I2 generators: the scalar with evaluation = h * g."""
        if self.kind != "I2":
            raise MalformedInput("h is defined for I2 generators only")
        return self.b


def _strongly_monic(chain: KeyChain, ell: int, i: int) -> bool:
    exp = qexpand(chain.entries[ell].Q, chain.entries[i].Q)
    r = len(exp) - 1
    if exp[r] != UniPoly((1,)):
        return False
    return r in s_set(chain, i, chain.entries[ell].Q).indices


def relation(chain: KeyChain, ell, i: int) -> RelationGen:
    """The relation generator attached to a neat successor pair (ell, i).

    For ell in I*, b is the inverse of the coefficient of the pure power
    Qt_i^r in the full i-th expansion of Qt_ell (the term that strong
    monicity guarantees attains the minimum); for ell = i_max,
    b = p^(-nu_i(g)).
    """
    seg = segment(chain)
    if ell == chain.imax_pos and chain.complete:
        ell = IMAX
    if ell == IMAX:
        if i not in seg.imax_sources:
            raise MalformedInput(f"position {i} is not a successor of the last key")
        exp = full_expansion(chain, i, chain.g)
        nu_g = exp.nu_value
        if Fraction(nu_g).denominator != 1:
            raise MalformedInput("non-integral truncation of g: e = 1 violated")
        b = Fraction(1, chain.ctx.p ** int(nu_g)) if nu_g >= 0 else \
            Fraction(chain.ctx.p) ** int(-nu_g)
        qpoly = exp.as_xpoly() * b
        lvl = seg.level(IMAX, i)
        gen = RelationGen("I2", IMAX, i, b, qpoly, lvl, None)
    else:
        if (i, ell, "imm") not in seg.succ_pairs and (i, ell, "lim") not in seg.succ_pairs:
            raise MalformedInput(f"({ell}, {i}) is not a successor pair")
        if not seg.is_neat_pair(ell, i):
            raise MalformedInput(f"({ell}, {i}) is not a neat pair")
        if not _strongly_monic(chain, ell, i):
            raise MalformedInput(f"Q_{ell} is not strongly Q_{i}-monic")
        exp = full_expansion(chain, i, chain.entries[ell].Qt)
        r = chain.entries[ell].Q.degree // chain.entries[i].Q.degree
        pure = ((i, r),)
        b1 = dict((m, c) for c, m in exp.terms).get(pure)
        if b1 is None:
            raise AssertionError("pure power term missing despite strong monicity")
        if pval(chain.ctx, b1) != exp.nu_value:
            raise AssertionError("pure power term does not attain the minimum")
        b = 1 / b1
        qpoly = exp.as_xpoly() * b
        lvl = seg.level(ell, i)
        gen = RelationGen("I1", ell, i, b, qpoly, lvl,
                          XPoly.var(ell) * b - qpoly)
    if mu0(chain.ctx, gen.Q_poly) != 0:
        raise AssertionError("relation body fails mu0 = 0")
    return gen


@dataclass(frozen=True)
class GeneratorSet:
    i1: tuple
    i2: tuple

    def i1_upto(self, ell: int):
        """I_{1,ell}: generators with target <= ell."""
        return tuple(g for g in self.i1 if g.target <= ell)

    def i1_below(self, ell: int):
        return tuple(g for g in self.i1 if g.target < ell)

    def i2_upto(self, ell: int):
        """I_{2,ell}: generators with source <= ell."""
        return tuple(g for g in self.i2 if g.source <= ell)

    def i2_below(self, ell: int):
        return tuple(g for g in self.i2 if g.source < ell)

    def i1_by_target(self, ell: int):
        hits = [g for g in self.i1 if g.target == ell]
        if len(hits) != 1:
            raise MalformedInput(f"expected one relation with target {ell}, got {len(hits)}")
        return hits[0]


def ideal_generators(chain: KeyChain) -> GeneratorSet:
    """I1 over the neat successor pairs inside I*, I2 over every successor
    of the last key (all members of a truncated final plateau)."""
    cache = chain.cache()
    if "generators" in cache:
        return cache["generators"]
    seg = segment(chain)
    i1 = []
    i2 = []
    for (i, ell, kind) in seg.succ_pairs:
        if ell == IMAX:
            i2.append(relation(chain, IMAX, i))
        elif seg.is_neat_pair(ell, i):
            i1.append(relation(chain, ell, i))
    out = GeneratorSet(tuple(i1), tuple(i2))
    cache["generators"] = out
    return out


@dataclass(frozen=True)
class PlateauRel:
    position: int
    b: Fraction
    A: XPoly


def plateau_relation(chain: KeyChain, i: int) -> PlateauRel:
    """Within-plateau relation b_{i+1,i} Qt_{i+1} = Qt_i + A_i with A_i
    supported below the plateau start."""
    seg = segment(chain)
    if i + 1 not in seg.q_of or seg.q_of[i] != seg.q_of[i + 1]:
        raise MalformedInput(f"positions {i}, {i + 1} are not in one plateau")
    gen = relation(chain, i + 1, i)
    a_poly = gen.Q_poly - XPoly.var(i)
    first = seg.plateau_of(i).first
    if any(k >= first for k in a_poly.variables()):
        raise AssertionError("correction term reaches into the plateau")
    return PlateauRel(i, gen.b, a_poly)


def i1_decompose(chain: KeyChain, d: XPoly, gens: GeneratorSet):
    """Write an element of I1 K[X] as an explicit cofactor combination by
    eliminating the highest variable with its (linear) relation, top down.

    Returns {target: cofactor}; raises if a nonzero remainder survives in
    K[X_0], which certifies the input was not in I1 K[X].
    """
    from .errors import NotInIdeal
    cof = {}
    cur = d
    while True:
        varlist = cur.variables()
        top = max(varlist) if varlist else 0
        if top == 0:
            break
        gen = gens.i1_by_target(top)
        quot = XPoly.zero()
        while cur.degree_in(top) >= 1:
            e = cur.degree_in(top)
            lead = cur.coeffs_in(top)[e]
            q = lead * XPoly({((top, e - 1),) if e > 1 else (): Fraction(1)}) / gen.b
            quot = quot + q
            cur = cur - q * gen.relation_poly
        if not quot.is_zero:
            cof[top] = cof.get(top, XPoly.zero()) + quot
    if not cur.is_zero:
        raise NotInIdeal("nonzero residue in K[X_0] after eliminating all relations")
    return cof


def redundancy_cofactor(chain: KeyChain, i: int, i2: int):
    """Certificate that the I2 generator at source i is redundant given the
    one at source i2 > i: Q_{imax,i} = c0 Q_{imax,i2} + sum cof * I1-gens.

    Returns (c0, {target: cofactor}); verified by exact expansion.
    """
    seg = segment(chain)
    final = seg.plateaus[-1]
    if final.flag != "truncated-infinite":
        raise MalformedInput("redundancy lives on a truncated-infinite plateau")
    if not (i in final.positions and i2 in final.positions and i < i2):
        raise MalformedInput("need plateau positions i < i'")
    gens = ideal_generators(chain)
    by_source = {g.source: g for g in gens.i2}
    gi, gi2 = by_source[i], by_source[i2]
    c0 = gi.b / gi2.b
    if pval(chain.ctx, c0) < 0:
        raise AssertionError("redundancy scalar not integral")
    d = gi.Q_poly - c0 * gi2.Q_poly
    cof = i1_decompose(chain, d, gens)
    # exact re-expansion check
    acc = c0 * gi2.Q_poly
    for tgt, c in cof.items():
        acc = acc + c * gens.i1_by_target(tgt).relation_poly
    if acc != gi.Q_poly:
        raise AssertionError("redundancy certificate failed to re-expand")
    return c0, cof
