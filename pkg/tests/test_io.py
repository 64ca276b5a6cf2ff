import pytest
from hypothesis import given

from conftest import hypergraphs
from unituran.conditions import paper_split_certificate, verdict
from unituran.hypergraph import Hypergraph, family_F, tight_path
from unituran.io import (
    FormatError,
    certificate_from_dict,
    certificate_to_dict,
    format_hypergraph,
    hypergraph_from_dict,
    hypergraph_to_dict,
    parse_hypergraph,
    verify_certificate,
)
from unituran.palette import conj_palette
from unituran.reduced import anchor_certified_graph, build_reduced_map_from_anchors
from unituran.vanishing import build_type_digraph, find_vanishing_ordering


@given(hypergraphs(max_n=7))
def test_text_round_trip(H):
    assert parse_hypergraph(format_hypergraph(H)) == H
    assert hypergraph_from_dict(hypergraph_to_dict(H)) == H


def test_comments_and_blank_lines():
    H = parse_hypergraph("# a path\n3 4\n\n0 1 2  # first\n1 2 3\n")
    assert H == tight_path(3, 4)


@pytest.mark.parametrize(
    "text,where",
    [
        ("3 4\n0 1\n", "line 2"),
        ("3 4\n0 1 9\n", "line 2"),
        ("3\n", "line 1"),
        ("3 4\n0 1 1\n", "line 2"),
        ("", "header"),
        ('{"k": 3, "n": 4}', "edges"),
        ('{"k": 3,', "line 1"),
    ],
)
def test_errors_name_the_line(text, where):
    with pytest.raises(FormatError, match=where):
        parse_hypergraph(text)


def test_certificate_round_trips():
    F = family_F(3, 1)
    cert = paper_split_certificate(3, 1, 1, 2)
    data = certificate_to_dict(cert)
    assert certificate_from_dict(data) == cert
    assert verify_certificate(F, data)
    P = conj_palette(3, 1, 2)
    assert certificate_from_dict(certificate_to_dict(P)) == P


def test_ordering_and_digraph():
    F = tight_path(3, 5)
    tau = find_vanishing_ordering(F)
    assert verify_certificate(F, certificate_to_dict(tau))
    D = build_type_digraph(F, tau)
    data = certificate_to_dict(D, beta=0)
    assert certificate_from_dict(data) == D
    assert verify_certificate(F, data)


def test_bad_ordering_is_invalid():
    F = Hypergraph(3, 4, ((0, 1, 2), (0, 2, 3)))
    assert not verify_certificate(F, {"kind": "ordering", "ordering": [0, 1, 2, 3]})


def test_verdict_certificates_verify():
    F = family_F(3, 1)
    assert verify_certificate(F, certificate_to_dict(verdict(F)))


def test_reduced_objects():
    F = family_F(3, 1)
    A, anchors = anchor_certified_graph(3, 8, 2, (1, 3), seed=0)
    rm = build_reduced_map_from_anchors(F, A, anchors, paper_split_certificate(3, 1, 1, 3))
    A2 = certificate_from_dict(certificate_to_dict(A))
    assert A2.constituents == A.constituents and A2.classes == A.classes
    assert verify_certificate(F, certificate_to_dict(rm), reduced=A2)
    assert verify_certificate(F, certificate_to_dict(anchors), reduced=A2)
    with pytest.raises(FormatError):
        verify_certificate(F, certificate_to_dict(rm))


def test_unknown_kind():
    with pytest.raises(FormatError, match="kind"):
        certificate_from_dict({"kind": "nope"})
    with pytest.raises(FormatError, match="pair"):
        certificate_from_dict({"kind": "split", "ordering": [0]})
