"""JSON envelopes around certificates.

An envelope is::

    {"schema": "1", "kind": ..., "tower": {...}, "payload": {...},
     "provenance": {"builder": ..., "timestamp": ...},
     "status": {"state": "unverified" | "pass" | "fail", "clause": ...}}

Elements are stored in nested-array form relative to the envelope's tower
(or, for the two halves of an x-witness, relative to their own towers).
"""

from __future__ import annotations

import json
from datetime import datetime, timezone

from . import __version__
from .constructions import (
    FourSquaresCert,
    Sum32Cert,
    UnitPairCert,
    XWitnessCert,
    verify_four_squares,
    verify_sum32,
    verify_unit_pair,
    verify_x_witness,
)
from .tower import FieldTower

SCHEMA = "1"
KINDS = ("unit_pair", "sum32", "x_witness", "four_squares")


class EnvelopeError(ValueError):
    """The envelope is malformed or does not decode to its certificate kind."""


def _sum32_payload(c: Sum32Cert):
    return {"tower": c.tower.to_json(), **c.to_json()}


def to_envelope(cert, reproducible=False) -> dict:
    if isinstance(cert, UnitPairCert):
        kind, tower, payload = "unit_pair", cert.tower, cert.to_json()
    elif isinstance(cert, Sum32Cert):
        kind, tower, payload = "sum32", cert.tower, cert.to_json()
    elif isinstance(cert, XWitnessCert):
        kind, tower = "x_witness", cert.alpha.tower
        payload = {
            "alpha": cert.alpha.to_json(),
            "d1": cert.d1.to_json(),
            "d2": cert.d2.to_json(),
            "sum1": _sum32_payload(cert.sum1),
            "sum2": _sum32_payload(cert.sum2),
        }
    elif isinstance(cert, FourSquaresCert):
        kind, tower, payload = "four_squares", cert.x.tower, cert.to_json()
    else:
        raise TypeError(f"not a certificate: {type(cert).__name__}")
    provenance = {"builder": f"trcert {__version__}"}
    if not reproducible:
        provenance["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return {
        "schema": SCHEMA,
        "kind": kind,
        "tower": tower.to_json(),
        "payload": payload,
        "provenance": provenance,
        "status": {"state": "unverified"},
    }


def from_envelope(env: dict):
    """Decode an envelope to its certificate object."""
    try:
        if env.get("schema") != SCHEMA:
            raise EnvelopeError(f"unsupported schema {env.get('schema')!r}")
        kind = env["kind"]
        tower = FieldTower.from_json(env["tower"])
        p = env["payload"]
        el = tower.element_from_json
        if kind == "unit_pair":
            return UnitPairCert(el(p["d"]), tower, el(p["u"]), el(p["a"]))
        if kind == "sum32":
            return Sum32Cert.from_json(tower, p)
        if kind == "x_witness":
            halves = [Sum32Cert.from_json(FieldTower.from_json(p[k]["tower"]), p[k]) for k in ("sum1", "sum2")]
            return XWitnessCert(el(p["alpha"]), el(p["d1"]), el(p["d2"]), *halves)
        if kind == "four_squares":
            return FourSquaresCert.from_json(tower, p)
        raise EnvelopeError(f"unknown certificate kind {kind!r}")
    except EnvelopeError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise EnvelopeError(f"malformed envelope: {type(exc).__name__}: {exc}") from exc


def verify_certificate(cert):
    if isinstance(cert, UnitPairCert):
        return verify_unit_pair(cert)
    if isinstance(cert, Sum32Cert):
        return verify_sum32(cert)
    if isinstance(cert, XWitnessCert):
        return verify_x_witness(cert)
    if isinstance(cert, FourSquaresCert):
        return verify_four_squares(cert)
    raise TypeError(f"not a certificate: {type(cert).__name__}")


def verify_envelope(env: dict):
    return verify_certificate(from_envelope(env))


def with_status(env: dict, report) -> dict:
    out = dict(env)
    ff = report.first_failure
    out["status"] = {"state": "pass"} if report.ok else {"state": "fail", "clause": ff.label}
    return out


def dumps(env: dict) -> str:
    return json.dumps(env, indent=2) + "\n"
