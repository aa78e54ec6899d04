import numpy as np
import pytest

from tsblab import frames as fr
from tsblab import qcatalog as qc
from tsblab.symspace import decompose_space


@pytest.fixture(scope="module")
def su_so3():
    return decompose_space("su_so", 3)


@pytest.fixture(scope="module")
def sphere3():
    return decompose_space("sphere", 3)


def contact_sp(qlit, r):
    return qc.StructureProfile(
        q=qc.parse_profile(qlit), a0_recipe="contact", alambda_recipe="contact",
        radius=r,
    )


def standard_sp():
    return qc.StructureProfile(
        q=qc.parse_profile("id:1"), a0_recipe="const", alambda_recipe="ak", kappa=1.0
    )


def test_lemma_brackets_su_so3(su_so3):
    """The four bracket displays at 10 sampled arc points, within 1e-9."""
    roots = su_so3
    r = 1.0
    split = fr.Splitter(roots)
    xiS = fr._xi_s_field(roots, r)
    alg = roots.pair.algebra
    worst = 0.0
    for theta in np.linspace(0.1, np.pi / 3 - 0.1, 10):
        w = r * np.array([np.cos(theta), np.sin(theta)])
        frame = fr.sphere_frame(roots, r, w)
        j0 = frame.j0
        for j in range(2):
            if j == j0:
                continue
            Y = fr._y_field(roots, j0, j)
            P = fr._p_field(roots, j0, j)
            b1, _ = fr.field_bracket(xiS, Y, w, split)
            worst = max(worst, alg.norm(b1.mbar), np.linalg.norm(b1.a))
            b2, _ = fr.field_bracket(xiS, P, w, split)
            expect = Y.value(w) * (-1.0 / r)
            diff = b2 - expect
            worst = max(worst, alg.norm(diff.mbar), np.linalg.norm(diff.a))
        lam_w = roots.lambda_values(w)
        for i, rs in enumerate(roots.positive_roots):
            xi_l = fr._const_field(roots, rs.m_basis[0])
            zeta_l = fr._const_field(roots, rs.k_basis[0])
            b3, _ = fr.field_bracket(xiS, xi_l, w, split)
            d3 = b3 - fr.TangentValue(-lam_w[i] / r * rs.k_basis[0], np.zeros(2))
            b4, _ = fr.field_bracket(xiS, zeta_l, w, split)
            d4 = b4 - fr.TangentValue(lam_w[i] / r * rs.m_basis[0], np.zeros(2))
            worst = max(worst, alg.norm(d3.mbar), alg.norm(d4.mbar))
    assert worst <= 1e-9


def test_field_bracket_antisymmetry(su_so3):
    split = fr.Splitter(su_so3)
    w = np.array([np.cos(0.5), np.sin(0.5)])
    frame = fr.sphere_frame(su_so3, 1.0, w)
    A, B = frame.fields[0], frame.fields[2]
    ab, _ = fr.field_bracket(A, B, w, split)
    ba, _ = fr.field_bracket(B, A, w, split)
    s = ab + ba
    assert su_so3.pair.algebra.norm(s.mbar) < 1e-10
    aa, _ = fr.field_bracket(A, A, w, split)
    assert np.linalg.norm(aa.a) < 1e-12


def test_frame_shapes(su_so3, sphere3):
    w2 = np.array([np.cos(0.5), np.sin(0.5)])
    dim_mbar = su_so3.pair.dim_m + sum(
        rs.multiplicity for rs in su_so3.positive_roots
    )
    full = fr.full_w_frame(su_so3, w2)
    assert full.dim == dim_mbar + 2  # mbar + W factor
    sph = fr.sphere_frame(su_so3, 1.0, w2)
    assert sph.dim == dim_mbar + 2 - 1  # sphere factor drops one direction
    sph1 = fr.sphere_frame(sphere3, 1.0, np.array([1.0]))
    assert sph1.dim == sphere3.pair.dim_m + sum(
        rs.multiplicity for rs in sphere3.positive_roots
    )  # mbar only: a + m_eps + k_eps = 1 + 2 + 2
    with pytest.raises(fr.FrameError):
        fr.sphere_frame(sphere3, 1.0, np.array([2.0]))
    with pytest.raises(fr.FrameError):
        fr.full_w_frame(su_so3, np.array([1.0, 0.0]))  # wall


def test_standard_structure_values(su_so3):
    w = np.array([np.cos(0.4), np.sin(0.4)])
    frame = fr.full_w_frame(su_so3, w)
    pack = fr.standard_structure_at(frame)
    lam_w = su_so3.lambda_values(w)
    # g^S diagonal: 1 on a, W and m_lambda; lambda_R(w)^2 on k_lambda
    diag = np.diag(pack.g)
    np.testing.assert_allclose(pack.g, np.diag(diag), atol=1e-12)
    for j in range(2):
        assert diag[frame.index(f"X{j + 1}")] == pytest.approx(1.0)
        assert diag[frame.index(f"dx{j + 1}")] == pytest.approx(1.0)
    for i in range(3):
        assert diag[frame.index(f"xi[{i}]1")] == pytest.approx(1.0)
        assert diag[frame.index(f"zeta[{i}]1")] == pytest.approx(lam_w[i] ** 2)
    # J^S: (X_j,0) -> (0,d_j); (xi,0) -> -(1/lambda) (zeta,0)
    col = pack.J_or_phi[:, frame.index("X1")]
    expect = np.zeros(frame.dim)
    expect[frame.index("dx1")] = 1.0
    np.testing.assert_allclose(col, expect, atol=1e-12)
    col = pack.J_or_phi[:, frame.index("xi[1]1")]
    assert col[frame.index("zeta[1]1")] == pytest.approx(-1.0 / lam_w[1])
    assert pack.j_squared_residual() <= 1e-10
    assert pack.compatibility_residual() <= 1e-9


@pytest.mark.parametrize("qlit", ["id:1", "tanh:1", "sinh:1"])
@pytest.mark.parametrize("mode", ["full", "sphere"])
def test_tensor_pack_invariants(su_so3, qlit, mode):
    r = 1.0
    w = r * np.array([np.cos(0.6), np.sin(0.6)])
    sp = contact_sp(qlit, r)
    if mode == "full":
        frame = fr.full_w_frame(su_so3, w)
    else:
        frame = fr.sphere_frame(su_so3, r, w)
    pack = fr.structure_at(frame, sp)
    assert pack.j_squared_residual() <= 1e-10
    assert pack.compatibility_residual() <= 1e-9
    assert np.all(np.linalg.eigvalsh(pack.g) > 0)
    np.testing.assert_allclose(pack.dtheta, -pack.dtheta.T, atol=1e-12)
    if mode == "sphere":
        assert float(pack.eta @ pack.xi) == pytest.approx(1.0)
        # phi kills xi
        np.testing.assert_allclose(pack.J_or_phi @ pack.xi, 0.0, atol=1e-10)


def test_dtheta_components(su_so3):
    w = np.array([np.cos(0.4), np.sin(0.4)])
    frame = fr.full_w_frame(su_so3, w)
    dth = fr.dtheta_at(frame)
    lam_w = su_so3.lambda_values(w)
    for j in range(2):
        assert dth[frame.index(f"X{j + 1}"), frame.index(f"dx{j + 1}")] == pytest.approx(
            -0.5
        )
    for i in range(3):
        assert dth[
            frame.index(f"xi[{i}]1"), frame.index(f"zeta[{i}]1")
        ] == pytest.approx(lam_w[i] / 2.0)


def test_omega_is_scaled_dtheta_under_ak_rule(su_so3):
    w = np.array([np.cos(0.7), np.sin(0.7)])
    frame = fr.full_w_frame(su_so3, w)
    for a0 in [1.0, 0.6]:
        sp = qc.StructureProfile(
            q=qc.parse_profile("tanh:1"), a0_recipe="const", alambda_recipe="ak",
            kappa=a0,
        )
        pack = fr.structure_at(frame, sp)
        assert np.max(np.abs(pack.omega - 2 * a0**2 * pack.dtheta)) <= 1e-10


def test_deta_matches_metric_route(su_so3, sphere3):
    # independent derivative-based dEta equals g(., phi .) for contact profiles
    for roots, w in [
        (sphere3, np.array([1.0])),
        (su_so3, np.array([np.cos(0.5), np.sin(0.5)])),
    ]:
        frame = fr.sphere_frame(roots, 1.0, w)
        sp = contact_sp("tanh:1", 1.0)
        pack = fr.structure_at(frame, sp)
        deta = fr.deta_at(frame, sp)
        assert np.max(np.abs(deta - pack.g @ pack.J_or_phi)) <= 1e-9


def test_nijenhuis_closed_form_and_integrability(su_so3):
    w = np.array([np.cos(0.45), np.sin(0.45)])
    frame = fr.full_w_frame(su_so3, w)
    for qlit in ["id:1", "sinh:1", "tanh:1"]:
        sp = qc.StructureProfile(
            q=qc.parse_profile(qlit), a0_recipe="const", alambda_recipe="ak", kappa=1.0
        )
        nij = fr.nijenhuis_at(frame, sp)
        co = qc.realize(sp, su_so3, w)
        lam_w = su_so3.lambda_values(w)
        for i, rs in enumerate(su_so3.positive_roots):
            q, dq = co.q_lam[i], co.dq_lam[i]
            closed = rs.lambda_R / q**2 * (1.0 - q**2 - dq)
            for j in range(2):
                got = nij.component(
                    frame.index(f"X{j + 1}"), frame.index(f"xi[{i}]1"),
                    f"zeta[{i}]1",
                )
                assert got == pytest.approx(closed[j], abs=1e-8)
        if qlit == "tanh:1":
            assert nij.max_norm <= 1e-8
        else:
            assert nij.max_norm > 1e-3
        assert nij.discarded_h_norm < 1e-9


def test_nijenhuis_requires_full_frame(su_so3):
    w = np.array([np.cos(0.5), np.sin(0.5)])
    frame = fr.sphere_frame(su_so3, 1.0, w)
    with pytest.raises(fr.FrameError):
        fr.nijenhuis_at(frame, contact_sp("tanh:1", 1.0))


def test_lie_derivative_rank_one(sphere3):
    r = 1.0
    frame = fr.sphere_frame(sphere3, r, np.array([r]))
    # q = 1: a = b, Killing
    sp1 = qc.StructureProfile(
        q=qc.parse_profile("const:1"), a0_recipe="const", alambda_recipe="contact",
        kappa=2.0, radius=r,
    )
    assert np.max(np.abs(fr.lie_derivative_metric(frame, sp1))) <= 1e-9
    # q = 2: entry lambda_R(X)(b-a)/kappa
    sp2 = qc.StructureProfile(
        q=qc.parse_profile("const:2"), a0_recipe="const", alambda_recipe="contact",
        kappa=2.0, radius=r,
    )
    L = fr.lie_derivative_metric(frame, sp2)
    co = qc.realize(sp2, sphere3, np.array([r]))
    lam_x = sphere3.lambda_values(np.array([1.0]))
    want = lam_x[0] * (co.b_lam[0] - co.a_lam[0]) / 2.0
    assert L[frame.index("xi[0]1"), frame.index("zeta[0]1")] == pytest.approx(want)


def test_lie_derivative_rank_two_component(su_so3):
    r = 1.0
    sp = contact_sp("tanh:1", r)
    for theta in [0.3, 0.6, 0.9]:
        w = r * np.array([np.cos(theta), np.sin(theta)])
        frame = fr.sphere_frame(su_so3, r, w)
        L = fr.lie_derivative_metric(frame, sp)
        j0 = frame.j0
        j = 1 - j0
        want = (0.5 / r) * (w[j0] ** 2 + w[j] ** 2)
        got = L[frame.index(f"Y{j + 1}"), frame.index(f"P{j + 1}")]
        assert got == pytest.approx(want, abs=1e-8)


def test_h_tensor_properties(sphere3):
    kappa, qv, r = 2.0, 3.0, 1.0
    frame = fr.sphere_frame(sphere3, r, np.array([r]))
    sp = qc.StructureProfile(
        q=qc.parse_profile(f"const:{qv}"), a0_recipe="const",
        alambda_recipe="contact", kappa=kappa, radius=r,
    )
    H = fr.h_tensor(frame, sp)
    pack = fr.structure_at(frame, sp)
    lam_x = sphere3.lambda_values(np.array([1.0]))
    want = lam_x[0] / (2 * kappa * qv) * (qv**2 - 1)
    i = frame.index("xi[0]1")
    assert H[i, i] == pytest.approx(want)
    assert want == pytest.approx(2.0 / 3.0)  # (1/12) * 8
    np.testing.assert_allclose(
        H @ pack.J_or_phi + pack.J_or_phi @ H, 0.0, atol=1e-9
    )
    np.testing.assert_allclose(H @ pack.xi, 0.0, atol=1e-10)
    assert abs(np.trace(H)) < 1e-10
    # K-contact case: h = 0
    sp1 = qc.StructureProfile(
        q=qc.parse_profile("const:1"), a0_recipe="const", alambda_recipe="contact",
        kappa=kappa, radius=r,
    )
    assert np.max(np.abs(fr.h_tensor(frame, sp1))) <= 1e-10


def test_normality_components(sphere3, su_so3):
    r = 1.0
    frame1 = fr.sphere_frame(sphere3, r, np.array([r]))
    kappa, qv = 1.5, 2.0
    sp = qc.StructureProfile(
        q=qc.parse_profile(f"const:{qv}"), a0_recipe="const",
        alambda_recipe="contact", kappa=kappa, radius=r,
    )
    N = fr.normality_tensor_at(frame1, sp)
    lam_x = sphere3.lambda_values(np.array([1.0]))
    # frame holds xi^S = kappa * xi; divide by a0 to read the (xi, .) component
    got = N.component(frame1.index("xiS"), frame1.index("xi[0]1"), "zeta[0]1") / kappa
    want = lam_x[0] / (kappa * qv**2) * (qv**2 - 1)
    assert got == pytest.approx(want, abs=1e-8)
    # q = 1: normal
    sp1 = qc.StructureProfile(
        q=qc.parse_profile("const:1"), a0_recipe="const", alambda_recipe="contact",
        kappa=kappa, radius=r,
    )
    assert fr.normality_tensor_at(frame1, sp1).max_norm <= 1e-8

    # rank 2: (xi, (Y_j,0)) component is (1/(r a0)) (0, P_j)
    w = r * np.array([np.cos(0.6), np.sin(0.6)])
    frame2 = fr.sphere_frame(su_so3, r, w)
    sp2 = contact_sp("tanh:1", r)
    a0 = 1.0 / (2 * r)
    N2 = fr.normality_tensor_at(frame2, sp2)
    j = 1 - frame2.j0
    got = N2.component(frame2.index("xiS"), frame2.index(f"Y{j + 1}"), f"P{j + 1}") / a0
    assert got == pytest.approx(1.0 / (r * a0), abs=1e-8)


def test_koszul_rank_one(sphere3, su_so3):
    kappa, qv, r = 2.0, 3.0, 1.0
    frame = fr.sphere_frame(sphere3, r, np.array([r]))
    sp = qc.StructureProfile(
        q=qc.parse_profile(f"const:{qv}"), a0_recipe="const",
        alambda_recipe="contact", kappa=kappa, radius=r,
    )
    kz = fr.koszul_at(frame, sp)
    lam_x = sphere3.lambda_values(np.array([1.0]))
    want = (1.0 / qv) * (1.0 + lam_x[0] / (2 * kappa * qv) * (qv**2 - 1))
    got = kz.nabla_xi[frame.index("zeta[0]1"), frame.index("xi[0]1")]
    assert got == pytest.approx(want)
    assert kz.phi_identity_residual <= 1e-8
    # q = 1, kappa = 1: nabla_{xi_l} xi = zeta_l
    sp1 = qc.StructureProfile(
        q=qc.parse_profile("const:1"), a0_recipe="const", alambda_recipe="contact",
        kappa=1.0, radius=r,
    )
    kz1 = fr.koszul_at(frame, sp1)
    assert kz1.nabla_xi[
        frame.index("zeta[0]1"), frame.index("xi[0]1")
    ] == pytest.approx(1.0)
    # rank >= 2 unsupported
    w = np.array([np.cos(0.5), np.sin(0.5)])
    with pytest.raises(fr.FrameError):
        fr.koszul_at(fr.sphere_frame(su_so3, 1.0, w), contact_sp("id:1", 1.0))


def test_induced_standard_metric(sphere3):
    got = fr.induced_standard_metric(sphere3, 1.0)
    assert got["k"] == [pytest.approx(1.0)]
    cp2 = decompose_space("cp", 2)
    got = fr.induced_standard_metric(cp2, 2.0)
    assert got["k"] == [pytest.approx(1.0), pytest.approx(4.0)]
    assert got["m"] == [pytest.approx(1.0), pytest.approx(1.0)]
    su_so3 = decompose_space("su_so", 3)
    with pytest.raises(fr.FrameError):
        fr.induced_standard_metric(su_so3, 1.0)


def test_ad_h_equivariance():
    cp2 = decompose_space("cp", 2)
    frame = fr.sphere_frame(cp2, 1.0, np.array([1.0]))
    sp = contact_sp("tanh:1", 1.0)
    for seed in range(3):
        assert fr.ad_h_equivariance_residual(frame, sp, seed=seed) <= 1e-8


def test_richardson_derivative_cross_check(su_so3):
    # analytic derivatives of linear fields agree with the FD fallback
    r = 1.0
    w = r * np.array([np.cos(0.5), np.sin(0.5)])
    fields = [
        fr._xi_s_field(su_so3, r),
        fr._y_field(su_so3, 1, 0),
        fr._p_field(su_so3, 1, 0),
    ]
    direction = np.array([0.3, -0.2])
    for f in fields:
        analytic = f.deriv(w, direction)
        numeric = fr.richardson_derivative(f.value, w, direction)
        diff = analytic - numeric
        assert np.linalg.norm(diff.mbar) < 1e-6
        assert np.linalg.norm(diff.a) < 1e-6
