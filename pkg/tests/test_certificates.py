from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oscsec.certificates import (
    DegenerationInstance,
    HyperplaneCertificate,
    binomial_matrix,
    binomial_matrix_prime,
    exact_determinant,
    m_regularity_certificate,
    solve_full_system,
    solve_m_regularity_system,
    solve_strong2_system,
    strong2_certificate,
    verify_hyperplane_identity,
)
from oscsec.indices import (
    delta_closure_down,
    distance,
    enumerate_shapes,
    shape,
    veronese,
)


def det_cofactor(m):
    if len(m) == 1:
        return m[0][0]
    total = 0
    for col in range(len(m)):
        minor = [row[:col] + row[col + 1 :] for row in m[1:]]
        term = m[0][col] * det_cofactor(minor)
        total += term if col % 2 == 0 else -term
    return total


def test_exact_determinant_small():
    assert exact_determinant([]) == 1
    assert exact_determinant([[7]]) == 7
    assert exact_determinant([[1, 2], [3, 4]]) == -2
    assert exact_determinant([[0, 1], [1, 0]]) == -1
    assert exact_determinant([[1, 2, 3], [4, 5, 6], [7, 8, 9]]) == 0


@given(
    st.lists(
        st.lists(st.integers(min_value=-6, max_value=6), min_size=4, max_size=4),
        min_size=4,
        max_size=4,
    )
)
def test_exact_determinant_matches_cofactor(m):
    assert exact_determinant(m) == det_cofactor(m)


def test_binomial_matrix_one_by_one():
    # s = D - k2 gives a single entry C(s_bar+s, s_bar+1), nonzero since s >= 1
    m = binomial_matrix(0, 2, 3, 1)
    assert m == [[2]]
    m = binomial_matrix(3, 4, 6, 2)
    assert m == [[35]]  # C(7, 4)


def test_binomial_matrix_empty_refused():
    with pytest.raises(ValueError):
        binomial_matrix(0, 1, 3, 1)
    with pytest.raises(ValueError):
        binomial_matrix_prime(2, 0, 4, 2)


def test_binomial_determinants_nonzero_on_grid():
    # all parameter tuples with matrix size <= 8 and s_bar <= 8, in the valid
    # regime D - k2 >= 2, s <= D
    checked = 0
    for s_bar in range(9):
        for k2 in range(5):
            for D in range(k2 + 2, k2 + 10):
                for s in range(D - k2, min(D, D - k2 + 7) + 1):
                    m2 = binomial_matrix(s_bar, s, D, k2)
                    m1 = binomial_matrix_prime(s_bar, s, D, k2)
                    d2 = exact_determinant(m2)
                    assert d2 != 0, (s_bar, s, D, k2)
                    assert exact_determinant(m1) == d2, (s_bar, s, D, k2)
                    checked += 1
    assert checked > 1000


# ---------------------------------------------------------------------------
# strong-2 profile solutions
# ---------------------------------------------------------------------------


def test_strong2_trivial_when_s_below_curve_range():
    # I = (0,0,1,2,2,2) on the n=2, d=6 Veronese: D=4, s^-=1, so s < D-k2
    sh = veronese(2, 6)
    inst = DegenerationInstance(sh, "strong-2", ((0, 0, 1, 2, 2, 2),), (1, 1), 1)
    cert = solve_strong2_system(inst)
    assert cert.coefficients == (1, 0)
    assert verify_hyperplane_identity(cert)


def test_strong2_quartic_curve_profile():
    # I = (1,1,1,1) on the rational normal quartic, k1 = k2 = 1: the two
    # binomial rows are 3c1 + 3c2 = -1 and 4c1 + 6c2 = -1
    sh = veronese(1, 4)
    inst = DegenerationInstance(sh, "strong-2", ((1, 1, 1, 1),), (1, 1), 1)
    cert = solve_strong2_system(inst)
    assert cert.coefficients == (1, Fraction(-1, 2), Fraction(1, 6), 0, 0)
    report = verify_hyperplane_identity(cert)
    assert report
    assert report.collapse_exact  # single factor: the collapse is exact
    assert report.checked_curves == 2  # K = (0,0,0,1) and the corner itself


def test_strong2_forced_zero_block():
    sh = veronese(1, 6)
    inst = DegenerationInstance(sh, "strong-2", ((1,) * 6,), (2, 1), 1)
    cert = solve_strong2_system(inst)
    # forced block: c_j = 0 for j = D-k1 .. s = 4..6
    assert cert.coefficients[4:] == (0, 0, 0)
    assert cert.coefficients[0] == 1
    assert verify_hyperplane_identity(cert)


def test_instance_rejects_bad_parameters():
    sh = veronese(1, 4)
    with pytest.raises(ValueError):
        DegenerationInstance(sh, "strong-2", ((1, 1, 1, 1),), (2, 1), 1)  # k1+k2 > d-2
    with pytest.raises(ValueError):
        DegenerationInstance(sh, "strong-2", ((0, 0, 1, 1),), (1, 1), 1)  # D too small
    with pytest.raises(ValueError):
        DegenerationInstance(sh, "nonsense", ((1, 1, 1, 1),), (1, 1), 1)
    with pytest.raises(ValueError):
        DegenerationInstance(sh, "m-regularity", ((1, 1, 1, 1),), (1,), 2)  # digit > n_1


def test_perturbed_certificate_fails_with_witness():
    sh = veronese(1, 4)
    inst = DegenerationInstance(sh, "strong-2", ((1, 1, 1, 1),), (1, 1), 1)
    cert = solve_strong2_system(inst)
    bumped = dict(cert.coefficient_map)
    bumped[((0, 1, 1, 1),)] += 1  # bump c_1
    bad = HyperplaneCertificate(inst, None, bumped, cert.support, False)
    report = verify_hyperplane_identity(bad)
    assert not report
    kind, generator, power, value = report.witness
    assert kind == "curve generator"
    assert value != 0


# ---------------------------------------------------------------------------
# bundles
# ---------------------------------------------------------------------------


def test_strong2_bundle_veronese_quartic_surface():
    bundle = strong2_certificate(veronese(2, 4), 1, 1)
    assert len(bundle.certificates) == 2  # (1,1,1,1) and (1,1,1,2)
    assert bundle.all_verified
    assert bundle.fallback_solved == 0  # single factor: profile always works
    targets = {c.instance.target for c in bundle.certificates}
    assert ((1, 1, 1, 1),) in targets
    assert ((1, 1, 1, 2),) in targets


def test_strong2_bundle_two_factors_needs_fallback():
    # the distance-class ansatz breaks on both D=3 targets of this shape:
    # an upward shift of K can leave the support via mixed-sign offsets, so
    # the collapsed system differs from the true one (see the frozen
    # counterexample in test_indices); the full per-index solve recovers them
    bundle = strong2_certificate(shape((1, 1), (2, 2)), 0, 1)
    assert bundle.all_verified
    assert len(bundle.certificates) == 3
    assert bundle.profile_solved == 1  # the deep corner ((1,1),(1,1))
    assert bundle.fallback_solved == 2
    by_target = {c.instance.target: c for c in bundle.certificates}
    deep = by_target[((1, 1), (1, 1))]
    assert deep.coefficients == (1, Fraction(-1, 2), Fraction(1, 6), 0, 0)
    mixed = by_target[((1, 1), (0, 1))]
    assert mixed.coefficients is None
    report = verify_hyperplane_identity(mixed)
    assert report
    assert not report.collapse_exact


def test_strong2_bundle_rejects_bad_orders_and_budget():
    with pytest.raises(ValueError):
        strong2_certificate(veronese(1, 4), 2, 1)  # k1+k2 > d-2
    with pytest.raises(ValueError):
        strong2_certificate(veronese(1, 4), -1, 0)
    with pytest.raises(ValueError):
        strong2_certificate(veronese(30, 5), 0, 1)  # |Lambda| = 324632 > 10^5
    with pytest.raises(ValueError):
        strong2_certificate(veronese(2, 4), 1, 1, max_lambda=10)


def test_certificate_supports_stay_in_the_down_closure():
    for sh, k1, k2 in [(veronese(1, 5), 1, 2), (shape((1, 1), (2, 2)), 0, 1)]:
        bundle = strong2_certificate(sh, k1, k2)
        corner = sh.corner((0,) * sh.r)
        for cert in bundle.certificates:
            I = cert.instance.target
            closure = delta_closure_down(I, 1)
            assert set(cert.support) <= closure
            assert distance(I, corner) > k1 + k2 + 1
            assert cert.coefficient_map[I] == 1
            for J in cert.support:
                if distance(J, corner) <= k1:
                    assert cert.coefficient_map[J] == 0


# ---------------------------------------------------------------------------
# m-regularity
# ---------------------------------------------------------------------------


def test_m_regularity_single_family_profile():
    # n_1 = 1 reduces to a single curve family; the k=1 system on the quartic
    # has levels 0..2 and the same solution as the strong-2 quartic example
    sh = veronese(1, 4)
    inst = DegenerationInstance(sh, "m-regularity", ((1, 1, 1, 1),), (1,), 1)
    cert = solve_m_regularity_system(inst)
    assert cert.coefficients == (1, Fraction(-1, 2), Fraction(1, 6))
    assert len(cert.support) == 3  # levels 0, 1, 2 only
    assert verify_hyperplane_identity(cert)

    bundle = m_regularity_certificate(sh, 1)
    assert bundle.all_verified
    assert [c.instance.target for c in bundle.certificates] == [((1, 1, 1, 1),)]
    assert bundle.fallback_solved == 0


def test_m_regularity_two_families():
    # n_1 = 2 on P^2 x P^2 in degrees (1,2): every target D > 1 owns a unique
    # curve digit, and the r = 2 profile shortcut fails for some targets
    sh = shape((2, 2), (1, 2))
    bundle = m_regularity_certificate(sh, 0)
    assert bundle.all_verified
    assert len(bundle.certificates) > 0
    assert bundle.fallback_solved >= 1
    corner = sh.corner((0, 0))
    for cert in bundle.certificates:
        inst = cert.instance
        assert distance(inst.target, corner) > 1
        # the owning digit is the unique one reachable from the order-k ball
        digits = [
            j for j in range(1, sh.factor_dims[0] + 1)
            if distance(inst.target, corner) - sum(f.count(j) for f in inst.target) <= 0
        ]
        assert digits == [inst.digit]


def test_m_regularity_empty_when_orders_swallow_the_shape():
    # 2k+1 >= d leaves no index far enough from the corner
    bundle = m_regularity_certificate(veronese(2, 3), 5)
    assert bundle.certificates == ()
    assert bundle.all_verified
    assert bundle.to_record()["instances"] == 0


def test_full_system_agrees_with_profile_when_both_hold():
    sh = veronese(1, 4)
    inst = DegenerationInstance(sh, "strong-2", ((1, 1, 1, 1),), (1, 1), 1)
    a = solve_strong2_system(inst)
    b = solve_full_system(inst)
    assert verify_hyperplane_identity(a)
    assert verify_hyperplane_identity(b)
    # both are genuine certificates; they need not be identical, but both pin
    # the target coefficient
    assert b.coefficient_map[inst.target] == 1


def test_small_shape_sweep_all_orders_certify():
    for sh in enumerate_shapes(36):
        d = sh.d
        for k1 in range(0, 2):
            for k2 in range(0, 2):
                if k1 + k2 > d - 2:
                    continue
                bundle = strong2_certificate(sh, k1, k2)
                assert bundle.all_verified, (sh.label(), k1, k2)
        for k in range(0, 2):
            if 2 * k + 1 >= d:
                continue
            bundle = m_regularity_certificate(sh, k)
            assert bundle.all_verified, (sh.label(), k)


def test_bundle_record_roundtrip():
    bundle = strong2_certificate(shape((1, 1), (2, 2)), 0, 1)
    rec = bundle.to_record()
    assert rec["kind"] == "strong-2"
    assert rec["orders"] == [0, 1]
    assert rec["instances"] == 3
    assert rec["all_verified"] is True
    assert rec["profile_solved"] + rec["fallback_solved"] == 3
