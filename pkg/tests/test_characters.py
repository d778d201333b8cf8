import json

import pytest
from hypothesis import given, strategies as st

from ffdensity.characters import (ZERO, AdmissibilityError, FamilySpec, build_family,
                                  char_eval, char_parity, enumerate_conductors, fix_omega,
                                  kummer_character, nonkummer_character, reciprocity_check,
                                  residue_symbol, write_manifest)
from ffdensity.euler import series_coefficient
from ffdensity.gfpoly import Poly, enumerate_monic, factorize, field_make


def _poly(F, c):
    return Poly(tuple(x % F.order for x in c), F)


monic7 = st.lists(st.integers(0, 6), min_size=1, max_size=5).map(lambda c: c + [1])


def test_omega_pins():
    om = fix_omega(field_make(7), 3, "kummer")
    assert om.field.order == 7 and om.zeta == 2
    assert om.field.power(om.zeta, 3) == 1
    om5 = fix_omega(field_make(5), 3, "nk")
    assert om5.field.order == 25
    assert om5.field.power(om5.zeta, 3) == 1 and om5.zeta != 1


@given(monic7, monic7)
def test_residue_symbol_multiplicative(a, b):
    ctx = field_make(7)
    F = ctx.Fq
    om = fix_omega(ctx, 3, "kummer")
    P = Poly((3, 1, 1), F)  # t^2 + t + 3 is irreducible over F_7
    A, B = _poly(F, a), _poly(F, b)
    ja, jb, jab = (residue_symbol(X, P, 3, om) for X in (A, B, A * B))
    if ZERO in (ja, jb):
        assert jab == ZERO
    else:
        assert jab == (ja + jb) % 3


@given(monic7)
def test_fast_evaluator_matches_symbol_kummer(f):
    ctx = field_make(7)
    F = ctx.Fq
    fam = build_family(FamilySpec(ctx, 3, "kummer", 1))
    om = fix_omega(ctx, 3, "kummer")
    chi = fam[len(f) * 5 % len(fam)]
    fp = _poly(F, f)
    j = 0
    for P, e in chi.parts:
        r = residue_symbol(fp, Poly(P, F), 3, om)
        if r == ZERO:
            j = ZERO
            break
        j += e * r
    assert char_eval(chi, fp) == (ZERO if j == ZERO else j % 3)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=5).map(lambda c: c + [1]))
def test_fast_evaluator_matches_symbol_nonkummer(f):
    ctx = field_make(5)
    fam = build_family(FamilySpec(ctx, 3, "nk", 2))
    om = fix_omega(ctx, 3, "nk")
    chi = fam[len(f) * 37 % len(fam)]
    fq = _poly(ctx.Fq, f)
    j = 0
    for P, e in chi.parts:
        r = residue_symbol(Poly(fq.coeffs, ctx.Fq2), Poly(P, ctx.Fq2), 3, om)
        if r == ZERO:
            j = ZERO
            break
        j += e * r
    assert char_eval(chi, fq) == (ZERO if j == ZERO else j % 3)


@given(monic7, monic7)
def test_cubic_reciprocity(a, b):
    ctx = field_make(7)
    A, B = _poly(ctx.Fq, a), _poly(ctx.Fq, b)
    if A.gcd(B).degree != 0:
        return
    assert reciprocity_check(A, B, 3, ctx)


def test_reciprocity_requires_admissible_q():
    ctx = field_make(5)
    with pytest.raises(AdmissibilityError):
        reciprocity_check(ctx.poly((1, 1)), ctx.poly((2, 1)), 3, ctx)


def test_family_counts_match_series():
    ctx7, ctx5 = field_make(7), field_make(5)
    for g, n in [(1, 42), (2, 252), (3, 3864)]:
        spec = FamilySpec(ctx7, 3, "kummer", g)
        assert len(build_family(spec)) == n == series_coefficient(spec)
    spec = FamilySpec(ctx5, 3, "nk", 2)
    assert len(build_family(spec)) == 480 == series_coefficient(spec)
    assert len(enumerate_conductors(spec, primitive=False)) == 490 == series_coefficient(spec, primitive=False)


def test_kummer_g1_splits_and_parity():
    spec = FamilySpec(field_make(7), 3, "kummer", 1)
    assert spec.kummer_splits() == [(0, 2)]
    for chi in build_family(spec):
        assert chi.conductor_degree == 2
        assert char_parity(chi)[0] == "odd" and chi.b == 0


def test_nonkummer_family_even_and_closed_under_conjugation():
    fam = build_family(FamilySpec(field_make(5), 3, "nk", 2))
    keys = {c.key() for c in fam}
    for chi in fam:
        assert chi.is_even and chi.b == 1 and chi.conductor_degree == 4
        assert chi.conjugate().key() in keys


def test_conjugate_values():
    ctx = field_make(7)
    chi = build_family(FamilySpec(ctx, 3, "kummer", 2))[17]
    cb = chi.conjugate()
    for f in enumerate_monic(ctx, 2):
        a, b = char_eval(chi, f), char_eval(cb, f)
        assert (a == ZERO) == (b == ZERO)
        if a != ZERO:
            assert (a + b) % 3 == 0


def test_constructors():
    ctx = field_make(7)
    F = ctx.Fq
    chi = kummer_character(ctx, 3, {2: Poly((3, 1, 1), F)})
    assert chi.genus == 1 and chi.parts == (((3, 1, 1), 2),)
    with pytest.raises(ValueError):
        kummer_character(ctx, 3, {1: Poly((0, 0, 1), F)})
    ctx5 = field_make(5)
    with pytest.raises(ValueError):
        nonkummer_character(ctx5, 3, Poly((1, 1), ctx5.Fq2))  # t + 1 lies in F_5[t]


def test_admissibility_messages():
    with pytest.raises(AdmissibilityError, match=r"requires q ≡ 1 \(mod 6\); got q=5"):
        FamilySpec(field_make(5), 3, "kummer", 1).check()
    with pytest.raises(AdmissibilityError):
        FamilySpec(field_make(7), 3, "nk", 2).check()
    with pytest.raises(AdmissibilityError):
        FamilySpec(field_make(5), 3, "nk", 1).check()
    with pytest.raises(AdmissibilityError):
        FamilySpec(field_make(13), 4, "kummer", 4).check()


def test_manifest_is_deterministic(tmp_path):
    fam = build_family(FamilySpec(field_make(7), 3, "kummer", 1))
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert write_manifest(fam, a, {"q": 7}) == 42
    write_manifest(build_family(FamilySpec(field_make(7), 3, "kummer", 1)), b, {"q": 7})
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert json.loads(lines[0]) == {"_meta": {"q": 7}}
    row = json.loads(lines[1])
    assert row["parity"] == "odd" and row["genus"] == 1


def test_conductor_parts_are_squarefree_coprime():
    ctx = field_make(7)
    for chi in build_family(FamilySpec(ctx, 3, "kummer", 2)):
        primes = [P for P, _ in chi.parts]
        assert len(set(primes)) == len(primes)
        for P in primes:
            assert factorize(Poly(P, ctx.Fq)).is_irreducible
