import json
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import weighted_graphs
from helpers import flip_entry, sign_flip_survivors
from ramsey_flags.certificates import (
    AlphaCertificate, CertificateError, FlagBlock, LowerBoundCertificate, RecoveryContext,
    RecoveryError, attachment_subsets, certificate_from_json, certificate_to_json, check_p_common,
    dump_certificate, guess_from_names, load_certificate, recover_block, recover_flag_ordering,
    shipped_certificates, tight_vectors, verify_alpha, verify_lower,
)
from ramsey_flags.densities import ConstGraphon, from_graph, objective
from ramsey_flags.exact import RatMatrix
from ramsey_flags.flags import Flag, a_coeff, enumerate_flags
from ramsey_flags.graphs import complete_graph, empty_graph, named_graph


@pytest.fixture(scope="module")
def k3c5():
    return load_certificate("k3c5.json")


@pytest.fixture(scope="module")
def c5b():
    return load_certificate("c5b.json")


@pytest.fixture(scope="module")
def dm():
    return load_certificate("d_m.json")


def test_shipped_files():
    assert shipped_certificates() == ["c5b.json", "c5b_alpha.json", "d_m.json", "d_m_alpha.json",
                                      "k3c5.json", "k3c5_alpha.json"]


def test_k3c5_certificate(k3c5):
    assert (k3c5.lam, k3c5.alpha, k3c5.ell) == (Fraction(10, 17), Fraction(3, 34), 5)
    assert [len(b.flags) for b in k3c5.blocks] == [6]
    rep = verify_lower(k3c5)
    assert rep.verdict and rep.minimum == Fraction(3, 34)
    assert rep.value_at(complete_graph(5)) == Fraction(5, 34)
    assert len(rep.values) == 34


def test_c5b_certificate(c5b):
    assert [len(b.flags) for b in c5b.blocks] == [8, 8, 8, 8]
    rep = verify_lower(c5b)
    assert rep.verdict
    assert set(rep.values) == {Fraction(1, 16)}
    assert len(rep.tight) == 34


def test_dm_certificate(dm):
    assert (dm.lam, dm.alpha, dm.ell) == (Fraction(5, 6), Fraction(1, 36), 6)
    assert [len(b.flags) for b in dm.blocks] == [8, 20, 16, 16, 16]
    rep = verify_lower(dm)
    assert rep.verdict and all(rep.psd)
    assert rep.minimum == Fraction(1, 36)
    assert len(rep.values) == 156
    assert len(rep.tight) == 72


def test_parallel_verification_matches(dm):
    a, b = verify_lower(dm), verify_lower(dm, threads=2)
    assert a.values == b.values and a.verdict == b.verdict


def test_verification_is_monotone_in_alpha(k3c5):
    assert verify_lower(replace(k3c5, alpha=Fraction(1, 34))).verdict
    assert not verify_lower(replace(k3c5, alpha=Fraction(3, 34) + Fraction(1, 10**9))).verdict


@pytest.mark.parametrize("name", ["k3c5.json", "c5b.json"])
def test_every_sign_flip_breaks_small_certificates(name):
    survivors, tried = sign_flip_survivors(load_certificate(name))
    assert tried > 0 and survivors == []


def test_sign_flips_in_dm_certificate(dm):
    # two tiny entries of the fourth block have slack to spare: flipping either
    # keeps the matrix PSD and every value >= 1/36
    survivors, tried = sign_flip_survivors(dm)
    assert tried == 654
    assert survivors == [(3, 6, 13), (3, 9, 14)]


def test_sign_flip_fast_path_agrees_with_full_verification(dm):
    b = dm.blocks[3]
    for i, j, expect in [(6, 13, True), (0, 1, False)]:
        blocks = list(dm.blocks)
        blocks[3] = replace(b, matrix=flip_entry(b.matrix, i, j))
        assert verify_lower(replace(dm, blocks=tuple(blocks))).verdict is expect


@pytest.mark.parametrize("name", ["k3c5.json", "c5b.json", "d_m.json"])
@settings(max_examples=10)
@given(w=weighted_graphs(max_n=3))
def test_soundness_on_step_graphons(name, w):
    cert = load_certificate(name)
    assert objective(cert.h1, cert.h2, cert.lam, w) >= cert.alpha


def test_alpha_certificates():
    k = verify_alpha(load_certificate("k3c5_alpha.json"))
    assert k.verdict
    c = verify_alpha(load_certificate("c5b_alpha.json"))
    assert c.verdict and {c.red1, c.blue1, c.red2, c.blue2} == {Fraction(1, 32)}
    d = load_certificate("d_m_alpha.json")
    rep = verify_alpha(d)
    assert rep.verdict and rep.red1 == rep.blue1 == Fraction(1, 72)
    # equal red and blue densities: the same pair works for every lambda
    for lam in [0, Fraction(1, 3), 1, 2]:
        assert verify_alpha(replace(d, lam=Fraction(lam))).verdict


def test_alpha_certificate_failure():
    cert = AlphaCertificate(complete_graph(3), named_graph("C5"), Fraction(10, 17), Fraction(1, 34),
                            from_graph(named_graph("C6_complement")), from_graph(complete_graph(2)))
    rep = verify_alpha(cert)
    assert not rep.verdict and rep.conditions[2] and rep.conditions[3]


def test_check_p_common():
    k3, c5, b = complete_graph(3), named_graph("C5"), named_graph("B")
    lhs, rhs, ok = check_p_common(k3, c5, Fraction(1, 3), ConstGraphon(Fraction(1, 3)))
    assert ok and lhs == rhs
    # K3 vs K3 at p=1/2 on W_K2: t(K3,W)=0, t(K3,1-W)=1/4 (diagonal 1)
    lhs, rhs, ok = check_p_common(k3, k3, Fraction(1, 2), from_graph(complete_graph(2)))
    assert (lhs, rhs) == (Fraction(1, 3), Fraction(1, 3)) and ok
    with pytest.raises(CertificateError):
        check_p_common(k3, empty_graph(3), Fraction(1, 2), ConstGraphon(Fraction(1, 2)))
    with pytest.raises(CertificateError):
        check_p_common(k3, c5, 1, ConstGraphon(Fraction(1, 2)))


@settings(max_examples=50)
@given(weighted_graphs(max_n=4))
def test_c5_b_is_balanced_common(w):
    assert check_p_common(named_graph("C5"), named_graph("B"), Fraction(1, 2), w)[2]


@pytest.mark.parametrize("name", shipped_certificates())
def test_json_round_trip(name, tmp_path):
    cert = load_certificate(name)
    path = tmp_path / name
    dump_certificate(cert, path)
    assert load_certificate(path) == cert
    assert certificate_from_json(json.loads(path.read_text())) == cert


def test_json_errors(k3c5):
    obj = certificate_to_json(k3c5)
    with pytest.raises(CertificateError, match="version"):
        certificate_from_json({**obj, "version": 99})
    with pytest.raises(CertificateError, match="kind"):
        certificate_from_json({**obj, "kind": "upper"})
    with pytest.raises(CertificateError, match="missing"):
        certificate_from_json({k: v for k, v in obj.items() if k != "ell"})
    bad = json.loads(json.dumps(obj))
    bad["blocks"][0]["matrix"] = bad["blocks"][0]["matrix"][:5]
    with pytest.raises(ValueError):
        certificate_from_json(bad)
    bad = json.loads(json.dumps(obj))
    bad["blocks"][0]["k"] = 4
    with pytest.raises(CertificateError, match="r/k"):
        certificate_from_json(bad)


def test_block_validation():
    flags = enumerate_flags(complete_graph(1), 3).flags
    with pytest.raises(CertificateError, match="matrix"):
        FlagBlock(flags, RatMatrix.identity(5))
    with pytest.raises(CertificateError):
        FlagBlock((flags[1], flags[1]), RatMatrix.identity(2))
    with pytest.raises(CertificateError, match="root"):
        FlagBlock((Flag.from_text("2 0; "),), RatMatrix.identity(1))


def test_lower_certificate_lambda_range(k3c5):
    with pytest.raises(CertificateError):
        replace(k3c5, lam=Fraction(5, 2))


# ---------------------------------------------------------------------------
# ordering recovery


def _ctx(cert):
    return RecoveryContext(cert.h1, cert.h2, cert.lam, cert.alpha, cert.ell)


def test_recovery_from_enumerated_flags(k3c5):
    block = k3c5.blocks[0]
    cands = enumerate_flags(complete_graph(1), 3).flags
    order = recover_flag_ordering(block.matrix, cands, _ctx(k3c5), scale=block.scale)
    flags = tuple(cands[i] for i in order)
    rec = replace(k3c5, blocks=(FlagBlock(flags, block.matrix, block.scale),))
    assert verify_lower(rec).verdict
    k14 = named_graph("K_1_4")
    assert a_coeff(flags[2], flags[2], k14) == Fraction(1, 5)
    assert a_coeff(flags[0], flags[4], k14) == Fraction(1, 5)


@pytest.mark.parametrize("name", ["k3c5.json", "c5b.json"])
def test_recovery_identity_on_resolved_files(name):
    cert = load_certificate(name)
    for q in range(len(cert.blocks)):
        assert recover_block(cert, q) == tuple(range(len(cert.blocks[q].flags)))


def test_recovery_of_shuffled_block(c5b):
    block = c5b.blocks[1]
    shuffled = block.reordered([3, 0, 6, 1, 7, 2, 5, 4])
    cert = replace(c5b, blocks=(c5b.blocks[0], shuffled) + c5b.blocks[2:])
    assert not verify_lower(cert).verdict
    order = recover_block(cert, 1)
    fixed = replace(cert, blocks=(c5b.blocks[0], shuffled.reordered(order)) + c5b.blocks[2:])
    assert verify_lower(fixed).verdict


def test_transposition_breaks_the_certificate(k3c5):
    block = k3c5.blocks[0]
    swapped = replace(k3c5, blocks=(block.reordered([1, 0, 2, 3, 4, 5]),))
    rep = verify_lower(swapped)
    assert not rep.verdict and rep.minimum < k3c5.alpha


def test_recovery_failure(k3c5):
    block = k3c5.blocks[0]
    cands = enumerate_flags(complete_graph(1), 3).flags
    with pytest.raises(RecoveryError):
        recover_flag_ordering(block.matrix.scaled(-1), cands, _ctx(k3c5), scale=block.scale)
    with pytest.raises(RecoveryError):
        recover_flag_ordering(RatMatrix.identity(5), cands, _ctx(k3c5))


def test_name_guess_and_subsets():
    assert attachment_subsets(2) == [(), (0,), (1,), (0, 1)]
    flags = guess_from_names(["OneZeroZero", "OneZeroThree"], empty_graph(2))
    assert [f.to_text() for f in flags] == ["3 2; ", "3 2; 0-2,1-2"]
    with pytest.raises(RecoveryError):
        guess_from_names(["Nothing"], empty_graph(2))


def test_tight_vectors_lie_in_kernel(dm):
    w = from_graph(named_graph("K3xK4"))
    for b in dm.blocks:
        for v in tight_vectors(b.flags, w):
            assert all(sum(x * y for x, y in zip(row, v)) == 0 for row in b.matrix.rows)
