"""Independent oracle for the central-moment recursion.

A "jet" is a differential polynomial in an unknown coefficient function and
its derivatives: a dict mapping (npow, mono) -> Fraction, standing for

    sum  c * n^(-npow) * F0^mono[0] * F1^mono[1] * ...

where F0, F1, F2, ... are the function and its successive derivatives.  The
only structure used is the derivation F_i -> F_{i+1} and the product rule,
so this file shares nothing with the package's rational-function machinery.
Deliberately free of expasym imports.
"""

from fractions import Fraction

Jet = dict  # {(npow, mono): Fraction}


def _trim(mono: tuple) -> tuple:
    while mono and mono[-1] == 0:
        mono = mono[:-1]
    return mono


def jet_add(a: Jet, b: Jet) -> Jet:
    out = dict(a)
    for key, c in b.items():
        v = out.get(key, Fraction(0)) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return out


def jet_scale(a: Jet, c) -> Jet:
    c = Fraction(c)
    if not c:
        return {}
    return {key: v * c for key, v in a.items()}


def jet_mul(a: Jet, b: Jet) -> Jet:
    out: Jet = {}
    for (pa, ma), ca in a.items():
        for (pb, mb), cb in b.items():
            width = max(len(ma), len(mb))
            mono = _trim(tuple(
                (ma[i] if i < len(ma) else 0) + (mb[i] if i < len(mb) else 0)
                for i in range(width)
            ))
            key = (pa + pb, mono)
            v = out.get(key, Fraction(0)) + ca * cb
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def jet_derive(a: Jet) -> Jet:
    """Apply the derivation: each factor F_i^e contributes e F_i^(e-1) F_(i+1)."""
    out: Jet = {}
    for (p, mono), c in a.items():
        for i, e in enumerate(mono):
            if not e:
                continue
            lifted = list(mono) + [0] * (i + 2 - len(mono))
            lifted[i] -= 1
            lifted[i + 1] += 1
            key = (p, _trim(tuple(lifted)))
            v = out.get(key, Fraction(0)) + c * e
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


PHI_OVER_N: Jet = {(1, (1,)): Fraction(1)}


def moment_jets(s_max: int) -> list[Jet]:
    """mu[0..s_max] for any family with vanishing first moment and index n:
    mu_(s+1) = (F0/n) (s mu_(s-1) + D mu_s)."""
    jets = [{(0, ()): Fraction(1)}, {}]
    while len(jets) <= s_max:
        s = len(jets) - 1
        bracket = jet_add(jet_scale(jets[s - 1], s), jet_derive(jets[s]))
        jets.append(jet_mul(PHI_OVER_N, bracket))
    return jets


def jet_value(jet: Jet, n: int, derivs: list) -> Fraction:
    """Substitute n and the numeric derivative values F_i = derivs[i]."""
    total = Fraction(0)
    for (p, mono), c in jet.items():
        term = c * Fraction(1, n**p)
        for i, e in enumerate(mono):
            if e:
                term *= Fraction(derivs[i]) ** e
        total += term
    return total
