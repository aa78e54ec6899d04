import pytest

from tsblab import verify as vf
from tsblab.qcatalog import StructureProfile, parse_profile


def contact_sp(qlit, r):
    return StructureProfile(
        q=parse_profile(qlit), a0_recipe="contact", alambda_recipe="contact", radius=r
    )


def standard_sp():
    return StructureProfile(
        q=parse_profile("id:1"), a0_recipe="const", alambda_recipe="ak", kappa=1.0
    )


def test_parse_space_id():
    assert vf.parse_space_id("su_so3") == ("su_so", 3)
    assert vf.parse_space_id("sphere4") == ("sphere", 4)
    assert vf.parse_space_id("hp1") == ("hp", 1)
    with pytest.raises(ValueError):
        vf.parse_space_id("torus2")


def test_sample_points_grids():
    from tsblab.symspace import decompose_space
    import numpy as np

    r1 = vf.sample_points(decompose_space("sphere", 3), 2.0)
    assert len(r1) == 1 and r1[0][0] == 2.0
    roots2 = decompose_space("su_so", 3)
    pts = vf.sample_points(roots2, 1.0)
    assert len(pts) == 10
    for w in pts:
        assert abs(w @ w - 1.0) < 1e-12
        assert np.all(roots2.lambda_values(w) > 0)
    roots3 = decompose_space("su_so", 4)
    pts = vf.sample_points(roots3, 1.0, seed=1, count=5)
    assert len(pts) == 5
    for w in pts:
        assert np.all(roots3.lambda_values(w) > 0)
    # determinism
    again = vf.sample_points(roots3, 1.0, seed=1, count=5)
    assert all(np.array_equal(a, b) for a, b in zip(pts, again))


def test_check_contact_verdicts():
    assert vf.check_contact("su_so3", contact_sp("tanh:1", 1.0), 1.0).verdict == "pass"
    assert vf.check_contact("sphere3", standard_sp(), 0.5).verdict == "pass"
    rep = vf.check_contact("sphere3", standard_sp(), 1.0)
    assert rep.verdict == "expected-fail-confirmed"
    assert rep.residuals["non_contact_detected"] >= 1e-3


def test_check_killing_verdicts():
    assert vf.check_killing("sphere3", standard_sp(), 1.0).verdict == "pass"
    rep = vf.check_killing("cp2", standard_sp(), 1.0)
    assert rep.verdict == "pass"
    assert rep.residuals["non_killing_detected"] >= 1e-3
    assert rep.residuals["offending_component"] <= 1e-8
    rep = vf.check_killing("su_so3", contact_sp("tanh:1", 1.0), 1.0)
    assert rep.residuals["offending_component"] <= 1e-8


def test_check_rank1():
    rep = vf.check_rank1_classification("cp2", 1.0, (1.0,))
    assert rep.verdict == "pass"
    assert "sasakian_normality" in rep.residuals
    rep = vf.check_rank1_classification("sphere3", 2.0, (3.0,))
    assert rep.verdict == "pass"
    assert rep.residuals["h_eigenvalues"] <= 1e-8
    with pytest.raises(ValueError):
        vf.check_rank1_classification("su_so3", 1.0, (1.0,))


def test_check_rank1_sasakian_coefficients():
    # cp(2), kappa, q = 1: metric coefficients kappa^2, kappa/2, kappa/4
    from tsblab.qcatalog import realize
    from tsblab.symspace import decompose_space
    import numpy as np

    kappa = 1.0
    roots = decompose_space("cp", 2)
    sp = StructureProfile(
        q=parse_profile("const:1"), a0_recipe="const", alambda_recipe="contact",
        kappa=kappa, radius=1.0,
    )
    co = realize(sp, roots, np.array([1.0]))
    assert co.a0**2 == pytest.approx(kappa**2)
    assert sorted(co.a_lam) == [pytest.approx(kappa / 4), pytest.approx(kappa / 2)]


def test_check_almost_kahler_verdicts():
    rep = vf.check_almost_kahler("su_so3", parse_profile("tanh:1"))
    assert rep.verdict == "pass"
    assert rep.residuals["nijenhuis_max"] <= 1e-8
    rep = vf.check_almost_kahler("su_so3", parse_profile("id:1"))
    assert rep.verdict == "pass"
    assert rep.residuals["nijenhuis_nonzero"] >= 1e-3
    rep = vf.check_almost_kahler("su_so3", parse_profile("coth"))
    assert rep.parameters["limit_class"] == "infinite"
    assert rep.residuals["riccati_residual"] <= 1e-12
    assert any("no invariant extension" in n for n in rep.discrepancies)


def test_check_normality_grid_and_cross_consistency():
    for tag, qv, r in [
        ("sphere3", 1.0, 1.0), ("sphere3", 2.0, 0.5),
        ("cp2", 1.0, 0.5), ("su_so3", 2.0, 1.0),
    ]:
        sp = StructureProfile(
            q=parse_profile(f"const:{qv}"), a0_recipe="contact",
            alambda_recipe="contact", radius=r,
        )
        rep = vf.check_normality(tag, sp, r)
        assert rep.verdict == "pass", (tag, qv, r, rep.residuals)
        # Killing boolean agrees with check_killing on identical inputs
        krep = vf.check_killing(tag, sp, r)
        killing_by_normality = "killing_residual" in rep.residuals
        killing_by_checker = "killing_residual" in krep.residuals
        assert killing_by_normality == killing_by_checker


def test_check_tables():
    rep = vf.check_catalog_tables()
    assert rep.verdict == "pass"
    assert rep.residuals["su_so3_theta_max"] <= 1e-9
    assert rep.residuals["su_so3_alignment"] <= 1e-8
    assert any("printed signs" in n for n in rep.discrepancies)


def test_report_serialization_deterministic():
    rep1 = vf.check_catalog_tables()
    rep2 = vf.check_catalog_tables()
    assert rep1.to_dict() == rep2.to_dict()
    assert "timing" not in rep1.to_dict()
    assert "timing" in rep1.to_dict(include_timing=True)
