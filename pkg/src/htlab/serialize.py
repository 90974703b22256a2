"""JSON descriptors for base fields, scalars, and module data.

Integers travel as decimal strings so files stay exact at any magnitude.
A module descriptor carries its own base configuration, so a file is a
complete, self-describing problem instance:

    {"config": {...}, "base": {"mode": ...}, "flavor": ..., "twist": ...,
     "rank": "2", "integral": true, "theta": [matrix, ...], "phi": matrix}

Matrices are row-major; each entry is a single coefficient record over a
point base and a list of monomial terms over a chart base.  Canonical
dumps sort keys and drop whitespace, which keeps reports byte-stable for
a fixed input and flag set.
"""

import json

from .base import BaseConfig, KElem, OkElem
from .chart import ChartElem, ChartRing
from .errors import ParseError
from .higgs import HiggsData
from .linalg import Mat


def _w_to_json(w):
    if isinstance(w, tuple):
        return [str(x) for x in w]
    return str(w)


def _w_from_json(v):
    if isinstance(v, list):
        return tuple(int(x) for x in v)
    return int(v)


def k_to_json(x):
    return {
        "coeffs": [_w_to_json(c) for c in x.num.coeffs],
        "prec": str(x.num.prec),
        "shift": str(x.shift),
    }


def k_from_json(cfg, d):
    try:
        coeffs = tuple(_w_from_json(c) for c in d["coeffs"])
        prec = int(d["prec"])
        shift = int(d.get("shift", "0"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad scalar record: {exc}")
    if len(coeffs) != cfg.e:
        raise ParseError("scalar width does not match the base field degree")
    return KElem(OkElem(cfg, coeffs, prec), shift)


def scalar_to_json(x):
    if isinstance(x, KElem):
        return k_to_json(x)
    return {
        "terms": [
            {"exps": [str(e) for e in exps], "coeff": k_to_json(c)}
            for exps, c in sorted(x.coeffs.items())
        ]
    }


def scalar_from_json(base, d):
    if base.is_point:
        return k_from_json(base.cfg, d)
    if "terms" not in d:
        # allow a bare coefficient over a chart base
        return base.from_k(k_from_json(base.cfg, d))
    coeffs = {}
    for term in d["terms"]:
        exps = tuple(int(e) for e in term["exps"])
        coeffs[exps] = k_from_json(base.cfg, term["coeff"])
    return ChartElem(base, coeffs)


def series_to_json(x):
    """Truncated t-series as {power: coefficient}, ascending powers."""
    return {str(k): scalar_to_json(c) for k, c in sorted(x.coeffs.items())}


def series_mat_to_json(m):
    return [[series_to_json(a) for a in row] for row in m.rows]


def mat_to_json(m):
    return [[scalar_to_json(a) for a in row] for row in m.rows]


def mat_from_json(base, rows):
    if not rows:
        raise ParseError("empty matrix")
    return Mat(base, [[scalar_from_json(base, a) for a in row] for row in rows])


def higgs_to_json(h):
    doc = {
        "config": h.cfg.to_json(),
        "base": h.base.to_json(),
        "flavor": h.flavor,
        "twist": h.twist,
        "rank": str(h.rank),
        "integral": h.integral,
        "theta": [mat_to_json(t) for t in h.theta],
    }
    if h.phi is not None:
        doc["phi"] = mat_to_json(h.phi)
    return doc


def higgs_from_json(doc, cfg=None):
    try:
        if cfg is None:
            cfg = BaseConfig.from_json(doc["config"])
        base = ChartRing.from_json(cfg, doc.get("base", {"mode": "point"}))
        flavor = doc["flavor"]
        theta = [mat_from_json(base, t) for t in doc["theta"]]
        phi = mat_from_json(base, doc["phi"]) if doc.get("phi") is not None else None
        return HiggsData(
            base,
            flavor,
            theta,
            phi,
            integral=bool(doc.get("integral", True)),
            twist=doc.get("twist", "log"),
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad module descriptor: {exc}")


def dumps(doc, canonical=False):
    if canonical:
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return json.dumps(doc, indent=2)


def load_higgs(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not a JSON descriptor: {exc}")
    return higgs_from_json(doc)


def dump_higgs(h, path, canonical=False):
    with open(path, "w") as fh:
        fh.write(dumps(higgs_to_json(h), canonical=canonical))
        fh.write("\n")
