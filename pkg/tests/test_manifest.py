from __future__ import annotations

from fractions import Fraction

import pytest

from einstein_obs.manifest import ManifestError, load, parse


def test_packaged_catalog():
    man = load()
    assert {"taub-nut", "eguchi-hanson", "cusp-model-t2"} <= set(man.names())
    assert man.quadrature_spec().rmax_schedule == (1e2, 1e3, 1e4)
    g = man.get("taub-nut").build()
    assert g.name == "taub-nut" and g.end.euler == 1
    f = man.get("taub-nut").build("flipped")
    assert f.orientation == -1 and f.end.euler == -1


def test_overrides_and_params():
    man = parse("""
[defaults]
rmax = 10, 100
orbit_samples = 4

[metric:tn2]
kind = taub_nut
m = 2
chi = 1
tau = 0
domain = 0, 50

[metric:eh]
kind = eguchi_hanson
link_eta = 1/3
orientation = flipped
""")
    tn = man.get("tn2").build()
    assert tn.params["m"] == 2 and tn.domain == (0, 50)
    assert man.quadrature_spec().orbit_samples == 4
    eh = man.get("eh").build()
    assert eh.end.link_eta == Fraction(1, 3) and eh.orientation == 1 and eh.topo.tau == 1


@pytest.mark.parametrize("text, msg", [
    ("[metric:x]\nkind = nope\n", "unknown kind"),
    ("[metric:x]\nkind = taub_nut\ncolour = red\n", "takes no parameter"),
    ("[other]\nkey = 1\n", "unexpected section"),
    ("[metric:x]\nkind = taub_nut\n[metric:x]\nkind = taub_nut\n", "already exists"),
    ("[metric: ]\nkind = taub_nut\n", "empty metric name"),
    ("not an ini file", None),
])
def test_parse_errors(text, msg):
    with pytest.raises(ManifestError, match=msg):
        parse(text)


def test_build_errors():
    man = parse("[metric:a]\nkind = taub_nut\nend = cone\n"
                "[metric:b]\nkind = eguchi_hanson\ndomain = 0.1, 5\n"
                "[metric:c]\nkind = taub_nut\nm = -1\n")
    for name in "abc":
        with pytest.raises(ManifestError):
            man.get(name).build()
    with pytest.raises(ManifestError):
        man.get("zzz")
    with pytest.raises(ManifestError):
        load("/nonexistent/catalog.ini")
