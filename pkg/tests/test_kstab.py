import copy
import json
import random
from fractions import Fraction as Fr

import numpy as np
import pytest

from oracles import FloatZariski, flag_float, s_invariant_float
from toricstab import fixtures
from toricstab.kstab import (
    FlagConfig,
    IncidenceError,
    KStabError,
    NoWallError,
    NotPseudoEffectiveError,
    UnsupportedInputError,
    ValuationSpec,
    beta,
    dp_plurianticanonical_dim,
    flag_refine,
    flag_volume_2d,
    local_volume_bound,
    pseff_threshold,
    quasimonomial_combine,
    s_invariant,
    valuation_from_json,
    volume,
    volume_fn,
    wall_solve,
    walls,
    zariski_decompose,
)
from toricstab.piecewise import Aff, PiecewisePolynomial, Poly2


@pytest.fixture(scope="module")
def s29():
    return fixtures.surface("surface29")


@pytest.fixture(scope="module")
def s33():
    return fixtures.surface("surface33")


def floats(model, cls):
    return [float(x) for x in model.as_class(cls)]


def gram_float(model):
    return [[float(x) for x in row] for row in model.gram]


# --------------------------------------------------------------- Zariski


def test_zariski_29(s29):
    z = zariski_decompose(s29, "-K - 3/2 C")
    assert s29.numerically_equal(z.positive, s29.as_class("1/2 C + C'"))
    assert z.negative == (("C'", 1),)
    assert z.volume == Fr(3, 8)


def test_zariski_33(s33):
    z = zariski_decompose(s33, "-K - 3/2 B")
    # the pullback of O(3) is B + E1 + E2; the positive part is half of it
    assert s33.numerically_equal(z.positive, s33.as_class("1/2 B + 1/2 E1 + 1/2 E2"))
    assert dict(z.negative) == {"E1": Fr(1, 2), "E2": Fr(1, 2)}


def test_nef_class_has_no_negative_part(s29, s33):
    assert zariski_decompose(s29, "-K").negative == ()
    assert zariski_decompose(s33, "-K").volume == 4


def test_not_pseudoeffective_error_carries_functional(s29):
    with pytest.raises(NotPseudoEffectiveError) as e:
        zariski_decompose(s29, "-K - 3 C")
    err = e.value
    d = s29.as_class("-K - 3 C")
    assert sum(a * b for a, b in zip(err.functional, s29.numerical(d))) == err.value < 0


def test_floats_rejected(s29):
    with pytest.raises(KStabError):
        volume(s29, [0.5, 1, 0, 0])


# --------------------------------------------------------------- thresholds and volumes


def test_thresholds(s29, s33):
    assert pseff_threshold(s29, "-K", "C") == 2
    assert pseff_threshold(s29, "-K", "B") == 3
    assert pseff_threshold(s33, "-K", "E1") == Fr(3, 2)
    with pytest.raises(KStabError):
        pseff_threshold(s29, "-K", [0, 0, 0, 0])


def poly(*cs):
    return tuple(Fr(c) for c in cs)


def test_volume_fn_29_c(s29):
    v = volume_fn(s29, "-K", "C")
    assert v.breakpoints == (0, 1, 2)
    assert v.pieces[0] == poly(4, -2, Fr(-1, 2))
    assert v.pieces[1] == poly(6, -6, Fr(3, 2))  # (3/2)(2-t)^2


def test_volume_fn_29_b(s29):
    v = volume_fn(s29, "-K", "B").merged()
    assert v.breakpoints == (0, 2, 3)
    assert v.pieces == (poly(4, -2, Fr(1, 6)), poly(6, -4, Fr(2, 3)))  # (2/3)(3-t)^2


def test_volume_fn_33_c1(s33):
    v = volume_fn(s33, "-K", "C1")
    assert v.breakpoints == (0, 1, Fr(3, 2), 2)
    assert v.pieces == (poly(4, -2, Fr(-1, 3)), poly(5, -4, Fr(2, 3)), poly(8, -8, 2))


@pytest.mark.parametrize(
    "surface, f",
    [("surface29", "C"), ("surface29", "B"), ("surface33", "C1"), ("surface33", "E1"), ("surface33", "B+E2-C1")],
)
def test_volume_fn_shape(surface, f):
    m = fixtures.surface(surface)
    v = volume_fn(m, "-K", f)
    assert v.is_continuous() and v.degree() <= 2
    assert v(0) == volume(m, "-K")
    assert v(v.breakpoints[-1]) == 0
    assert v.breakpoints[-1] == pseff_threshold(m, "-K", f)


def test_volume_fn_matches_dense_rational_sampling(s33):
    v = volume_fn(s33, "-K", "C1")
    tau = v.breakpoints[-1]
    for k in range(10001):
        t = tau * Fr(k, 10000)
        assert v(t) == volume(s33, s33.as_class(f"-K - {t} C1")), t


def test_volume_fn_sampling_29(s29):
    v = volume_fn(s29, "-K", "B")
    for k in range(1001):
        t = Fr(3 * k, 1000)
        assert v(t) == volume(s29, s29.as_class(f"-K - {t} B"))


# --------------------------------------------------------------- S invariants


@pytest.mark.parametrize(
    "surface, f, expected",
    [
        ("surface29", "C", Fr(5, 6)),
        ("surface29", "C'", Fr(5, 6)),
        ("surface29", "B", Fr(7, 6)),
        ("surface29", "-K", Fr(1, 3)),
        ("surface29", "2B'", Fr(7, 12)),
        ("surface33", "B", Fr(5, 6)),
        ("surface33", "B+E2-C1", Fr(7, 6)),
        ("surface33", "C1", Fr(7, 8)),
        ("surface33", "2B+2E2-2C1", Fr(7, 12)),
    ],
)
def test_s_invariants(surface, f, expected):
    assert s_invariant(fixtures.surface(surface), "-K", f) == expected


def test_s_e1_against_quadrature(s33):
    exact = s_invariant(s33, "-K", "E1")
    approx = s_invariant_float(gram_float(s33), floats(s33, "-K"), floats(s33, "E1"))
    assert abs(float(exact) - approx) < 1e-9
    assert exact == Fr(17, 24)


@pytest.mark.parametrize("f", ["C", "B", "B'", "2B'"])
def test_s_29_against_quadrature(s29, f):
    approx = s_invariant_float(gram_float(s29), floats(s29, "-K"), floats(s29, f))
    assert abs(float(s_invariant(s29, "-K", f)) - approx) < 1e-9


# --------------------------------------------------------------- valuations, beta, walls


def test_quasimonomial_combinations(s29):
    def part(w, d):
        return (w, 1, 1 - s_invariant(s29, "-K", d))

    v0 = quasimonomial_combine([part(1, "C"), part(1, "C'")])
    assert (v0.A, v0.S) == (2, Fr(5, 3))
    v1 = quasimonomial_combine([part(Fr(2, 3), "B"), part(Fr(1, 3), "B'")])
    assert (v1.A, v1.S) == (1, Fr(7, 6))
    v2 = quasimonomial_combine([part(1, "B"), part(1, "B'")])
    assert (v2.A, v2.S) == (2, Fr(7, 3))
    with pytest.raises(KStabError):
        quasimonomial_combine([(0, 1, 1)])


def test_beta_values():
    s = Fr(5, 6)
    assert beta(Fr(1, 28), 4, ValuationSpec(1, 8, s)) == 0
    assert beta(Fr(1, 19), 4, ValuationSpec(1, 6, s)) == Fr(1, 38)
    assert beta(Fr(1, 19), 4, ValuationSpec(1, 0, Fr(7, 6))) == Fr(3, 38)
    v2 = ValuationSpec(2, 5, Fr(7, 3))
    for c in (Fr(0), Fr(1, 13), Fr(1, 16), Fr(2, 7)):
        assert beta(c, 4, v2) == (13 * c - 1) / 3
    assert beta(0, 4, ValuationSpec(1, None, s)) == Fr(1, 6)


def test_beta_is_affine_and_wall_is_its_root():
    rng = random.Random(3)
    for _ in range(200):
        v = ValuationSpec(Fr(rng.randint(1, 5)), Fr(rng.randint(0, 20)), Fr(rng.randint(1, 30), rng.randint(1, 12)))
        c1, c2 = Fr(rng.randint(0, 50), 200), Fr(rng.randint(0, 50), 200)
        mid = (c1 + c2) / 2
        assert beta(mid, 4, v) == (beta(c1, 4, v) + beta(c2, 4, v)) / 2
        try:
            c = wall_solve(v, 4)
        except NoWallError:
            assert beta(c1, 4, v) == beta(c2, 4, v)
            continue
        if c >= 0:
            assert beta(c, 4, v) == 0


def test_wall_solve_examples():
    assert wall_solve(ValuationSpec(1, 8, Fr(5, 6)), 4) == Fr(1, 28)
    assert wall_solve(ValuationSpec(1, 7, Fr(5, 6)), 4) == Fr(1, 22)
    assert wall_solve(ValuationSpec(2, 13, Fr(5, 3)), 4) == Fr(1, 19)
    assert wall_solve(ValuationSpec(1, 6, Fr(5, 6)), 4) == Fr(1, 16)
    with pytest.raises(NoWallError):
        wall_solve(ValuationSpec(1, 4, 1), 4)


def test_wall_lists(s29, s33):
    spec = fixtures.read_json("walls29.json")
    vals = [valuation_from_json(s29, v) for v in spec["valuations"]]
    found = walls(vals, 4, 0, Fr(1, 16))
    assert [w.c for w in found] == [Fr(1, 28), Fr(1, 22), Fr(1, 19), Fr(1, 16)]
    v33 = [valuation_from_json(s33, v) for v in fixtures.read_json("walls33.json")["valuations"]]
    assert [w.c for w in walls(v33, 4, 0, Fr(1, 16))] == [Fr(1, 16)]
    assert walls(vals, 4, Fr(1, 10), Fr(1, 9)) == []
    with pytest.raises(KStabError):
        walls([], 4)


# --------------------------------------------------------------- local numbers


def test_local_volume_bound():
    assert local_volume_bound(Fr(1, 16)) == 4
    assert local_volume_bound(0) == 2
    assert local_volume_bound(Fr(1, 28)) == 3
    with pytest.raises(KStabError):
        local_volume_bound(Fr(1, 4))


def test_plurianticanonical_dim():
    assert dp_plurianticanonical_dim(4, 4) == 41
    assert dp_plurianticanonical_dim(7, 0) == 1
    assert dp_plurianticanonical_dim(1, 1) == 2


# --------------------------------------------------------------- flags


@pytest.fixture(scope="module")
def smooth():
    return fixtures.flag("flag_smooth")


@pytest.fixture(scope="module")
def singular():
    return fixtures.flag("flag_singular")


def test_flag_divisor_values(smooth):
    r = flag_refine(smooth)
    assert r.volume == poly(4, -6, 0, 2)
    assert (r.L_cubed, r.S_divisor, r.beta_divisor, r.S_curve) == (4, Fr(3, 8), Fr(5, 8), Fr(3, 4))
    assert r.F_point is None


def test_flag_singular_values(singular):
    r = flag_refine(singular)
    assert (r.S_curve, r.F_point, r.S_point, r.delta_lower_bound) == (Fr(13, 16), Fr(183, 320), Fr(13, 16), Fr(16, 13))
    assert r.delta_lower_bound == min(1 / r.S_point, 1 / r.S_curve, 1 / r.S_divisor) > 1


def _cell_table(cells):
    return sorted((c.u_lo, c.u_hi, str(c.v_lo), str(c.v_hi), c.volume) for c in cells)


def _p(text):
    """Poly2 from a {(i, j): coeff} literal in u^i v^j."""
    return Poly2({k: Fr(v) for k, v in text.items()})


def test_smooth_cells(smooth):
    cells = flag_volume_2d(smooth)
    assert len(cells) == 2
    lower = next(c for c in cells if c.v_lo == Aff(0))
    upper = next(c for c in cells if c is not lower)
    assert lower.v_hi == Aff(0, 2) and upper.v_hi == Aff(2)
    assert lower.volume == _p({(0, 0): 2, (2, 0): -2, (1, 1): 2, (0, 1): -2})
    assert upper.volume == _p({(0, 0): 2, (0, 1): -2, (0, 2): Fr(1, 2)})


def test_singular_cells_first_range(singular):
    cells = [c for c in flag_volume_2d(singular) if c.u_hi == Fr(1, 5)]
    assert len(cells) == 4
    got = {(str(c.v_lo), str(c.v_hi)): c.volume for c in cells}
    assert got[("0", "2*u")] == _p({(0, 0): 2, (2, 0): -2, (1, 1): 1, (0, 2): -1, (0, 1): -1})
    assert got[("2*u", "1/2 - 1/2*u")] == _p({(0, 0): 2, (0, 1): -1, (2, 0): -1, (0, 2): Fr(-3, 4)})
    assert got[("1/2 - 1/2*u", "1/2 + 3/2*u")] == _p(
        {(0, 0): Fr(9, 4), (2, 0): Fr(-3, 4), (1, 1): 1, (0, 2): Fr(1, 4), (1, 0): Fr(-1, 2), (0, 1): -2}
    )
    assert got[("1/2 + 3/2*u", "2")] == _p({(0, 0): Fr(7, 3), (0, 1): Fr(-7, 3), (0, 2): Fr(7, 12)})


def test_cells_tile_the_rectangle(singular, smooth):
    for cfg in (smooth, singular):
        cells = flag_volume_2d(cfg)
        assert sum(c.area() for c in cells) == 2  # [0,1] x [0,2]
        rng = random.Random(5)
        for _ in range(400):
            u, v = Fr(rng.randint(1, 999), 1000), Fr(rng.randint(1, 1999), 1000)
            inside = [c for c in cells if c.contains(u, v)]
            assert inside
            # continuity: overlapping closures agree
            vals = {c.volume(u, v) for c in inside}
            assert len(vals) == 1


def test_cells_agree_with_pointwise_zariski(singular):
    cells = flag_volume_2d(singular)
    surf = singular.surface
    rng = random.Random(9)
    for _ in range(300):
        u, v = Fr(rng.randint(0, 100), 100), Fr(rng.randint(0, 200), 100)
        d = singular.restrict(singular.p_of_u()).at(u) - surf.as_class("C0").scale(v)
        c = next(c for c in cells if c.contains(u, v))
        assert c.volume(u, v) == volume(surf, d)


def test_beyond_threshold_is_not_pseudoeffective(singular):
    cells = flag_volume_2d(singular)
    surf = singular.surface
    u, v = Fr(1, 3), Fr(5, 2)
    assert not any(c.contains(u, v) for c in cells)
    d = singular.restrict(singular.p_of_u()).at(u) - surf.as_class("C0").scale(v)
    with pytest.raises(NotPseudoEffectiveError):
        zariski_decompose(surf, d)


def test_flag_values_against_quadrature(smooth, singular):
    for cfg in (smooth, singular):
        exact = flag_refine(cfg)
        approx = flag_float(cfg)
        assert abs(float(exact.S_divisor) - approx["S_divisor"]) < 1e-9
        assert abs(float(exact.S_curve) - approx["S_curve"]) < 1e-9
        if exact.F_point is not None:
            assert abs(float(exact.F_point) - approx["F_point"]) < 1e-9
            assert abs(float(exact.S_point) - approx["S_point"]) < 1e-9


def test_missing_incidence_is_an_error():
    obj = fixtures.read_json("flag_singular.json")
    del obj["point"]["C1"]
    with pytest.raises(IncidenceError):
        flag_refine(FlagConfig.from_json(obj))


def test_non_affine_n_is_unsupported():
    obj = fixtures.read_json("flag_singular.json")
    obj["N"]["E0"] = ["0", "0", "1"]
    with pytest.raises(UnsupportedInputError):
        FlagConfig.from_json(obj)


# --------------------------------------------------------------- serialisation


def test_surface_json_round_trip(s29):
    again = type(s29).from_json(json.loads(json.dumps(s29.to_json())))
    assert again.to_json() == s29.to_json()


def test_piecewise_validation():
    with pytest.raises(ValueError):
        PiecewisePolynomial((Fr(0), Fr(1)), ())
    p = PiecewisePolynomial((Fr(0), Fr(1), Fr(2)), ((Fr(1),), (Fr(1),)))
    assert p.integral() == 2 and p.merged().breakpoints == (0, 2)
