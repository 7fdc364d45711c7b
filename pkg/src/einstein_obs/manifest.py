"""INI-style manifest of named metrics (``[metric:NAME]`` sections)."""
from __future__ import annotations

import configparser
import inspect
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import metrics as M
from .char_integrals import QuadratureSpec

# keys that describe declared data rather than constructor arguments
_DECLARED = {"kind", "end", "chi", "tau", "euler", "link_eta", "domain", "orientation"}


class ManifestError(ValueError):
    pass


@dataclass
class MetricEntry:
    name: str
    kind: str
    params: dict
    declared: dict

    def build(self, orientation: str = "default"):
        ctor = M.CATALOG[self.kind]
        try:
            g = ctor(**self.params)
        except (TypeError, ValueError) as exc:
            raise ManifestError(f"[metric:{self.name}] {exc}") from None
        d = self.declared
        if "end" in d and d["end"] != g.end.type:
            raise ManifestError(f"[metric:{self.name}] end = {d['end']} but {self.kind} "
                                f"has a {g.end.type} end")
        if "chi" in d or "tau" in d:
            topo = g.topo or M.TopologicalData(0, 0)
            g = replace(g, topo=M.TopologicalData(int(d.get("chi", topo.chi)),
                                                  int(d.get("tau", topo.tau))))
        end = g.end
        if "euler" in d:
            end = replace(end, euler=int(d["euler"]))
        if "link_eta" in d:
            end = replace(end, link_eta=Fraction(d["link_eta"]))
        g = replace(g, end=end)
        if "domain" in d:
            lo, hi = d["domain"]
            r0, r1 = g.domain
            if lo < r0 or hi > r1 or lo >= hi:
                raise ManifestError(f"[metric:{self.name}] domain {lo, hi} is outside {r0, r1}")
            g = replace(g, domain=(lo, hi))
        g.name = self.name
        if d.get("orientation", "default") == "flipped":
            g = M.with_orientation(g, -g.orientation)
        if orientation == "flipped":
            g = M.with_orientation(g, -g.orientation)
        elif orientation != "default":
            raise ManifestError(f"unknown orientation {orientation!r}")
        return g


@dataclass
class Manifest:
    entries: dict[str, MetricEntry] = field(default_factory=dict)
    defaults: dict = field(default_factory=dict)

    def names(self) -> list[str]:
        return list(self.entries)

    def get(self, name: str) -> MetricEntry:
        try:
            return self.entries[name]
        except KeyError:
            raise ManifestError(f"unknown metric {name!r}; known: {', '.join(self.entries)}") from None

    def quadrature_spec(self) -> QuadratureSpec:
        d = self.defaults
        return QuadratureSpec(abs_tol=d.get("abs_tol", 1e-10), rel_tol=d.get("rel_tol", 1e-10),
                              rmax_schedule=tuple(d.get("rmax", (1e2, 1e3, 1e4))),
                              orbit_samples=int(d.get("orbit_samples", 8)))


def _value(text: str):
    text = text.strip()
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse(text: str, source: str = "<manifest>") -> Manifest:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ManifestError(str(exc)) from None
    man = Manifest()
    if cp.has_section("defaults"):
        for k, v in cp.items("defaults"):
            if k == "rmax":
                man.defaults[k] = tuple(float(x) for x in v.split(","))
            else:
                man.defaults[k] = _value(v)
    for sec in cp.sections():
        if sec == "defaults":
            continue
        if not sec.startswith("metric:"):
            raise ManifestError(f"unexpected section [{sec}]")
        name = sec.split(":", 1)[1].strip()
        if not name:
            raise ManifestError("empty metric name")
        if name in man.entries:
            raise ManifestError(f"duplicate metric {name!r}")
        items = dict(cp.items(sec))
        kind = items.get("kind")
        if kind not in M.CATALOG:
            raise ManifestError(f"[{sec}] unknown kind {kind!r}")
        accepted = set(inspect.signature(M.CATALOG[kind]).parameters)
        params, declared = {}, {}
        for k, v in items.items():
            if k in accepted:
                # constructor arguments win (the model ends take their Euler number this way)
                params[k] = _value(v)
            elif k in _DECLARED:
                if k == "domain":
                    lo, hi = (float(x) for x in v.split(","))
                    declared[k] = (lo, hi)
                else:
                    declared[k] = _value(v) if k != "link_eta" else v.strip()
            else:
                raise ManifestError(f"[{sec}] {kind} takes no parameter {k!r}")
        man.entries[name] = MetricEntry(name, kind, params, declared)
    return man


def load(path: str | Path | None = None) -> Manifest:
    """Read a manifest file, or the packaged default when ``path`` is None."""
    if path is None:
        text = resources.files("einstein_obs").joinpath("data/catalog.ini").read_text()
        return parse(text, "catalog.ini")
    p = Path(path)
    if not p.is_file():
        raise ManifestError(f"manifest {p} not found")
    return parse(p.read_text(), str(p))
