"""Exhaustive stable-range-one check for finite quotient rings."""
from __future__ import annotations

from ..quotient import DEFAULT_BUDGET, FiniteQuotient


def check_sr1(fq: FiniteQuotient, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether every unimodular pair (a0, a1) admits a unit a1 + a0 t.

    For each principal ideal I = a0 R the ring splits into cosets of I; a coset
    that is a unit of R/I must contain a unit of R.  Associates generate the
    same ideal, so each ideal is visited once.
    """
    elems = list(fq.elements(budget))
    units = [r for r in elems if fq.is_unit(r)]
    unit_set = set(units)
    done = set()
    for a0 in elems:
        if a0 in done or not any(a0) or a0 in unit_set:
            continue
        done.update(fq.mul(a0, u) for u in units)
        ideal = {fq.mul(a0, x) for x in elems}
        coset_of: dict = {}
        reps = []
        for e in elems:
            if e in coset_of:
                continue
            for i in ideal:
                coset_of[fq.add(e, i)] = len(reps)
            reps.append(e)
        one_class = coset_of[fq.one]
        hit = {coset_of[u] for u in units}
        for c, rep in enumerate(reps):
            if c in hit:
                continue
            if any(coset_of[fq.mul(rep, other)] == one_class for other in reps):
                return False
    return True
