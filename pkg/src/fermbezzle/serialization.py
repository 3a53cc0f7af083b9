"""JSON encoding of matrices, covariances and embezzlement plans.

Matrices are stored row-major as ``{"dim": n, "data": [[re, im], ...]}``
with an optional ``"formalism"`` tag (``passive``, ``selfdual`` or
``majorana``).  Eigendata is never stored; it is recomputed on load.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .covariance import Covariance, validate
from .errors import MalformedInput
from .selfdual import MajoranaCovariance, SelfDualCovariance

FORMALISMS = ("passive", "selfdual", "majorana")


def matrix_to_json(matrix, formalism: str | None = None) -> dict:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MalformedInput(f"expected a square matrix, got shape {m.shape}")
    out = {"dim": int(m.shape[0]), "data": [[float(z.real), float(z.imag)] for z in m.ravel()]}
    if formalism is not None:
        if formalism not in FORMALISMS:
            raise MalformedInput(f"unknown formalism {formalism!r}")
        out["formalism"] = formalism
    return out


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        data = np.asarray(obj["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"malformed matrix object: {exc}") from exc
    if dim < 0 or data.shape != (dim * dim, 2):
        raise MalformedInput(f"data of shape {data.shape} does not match dim {dim}")
    return (data[:, 0] + 1j * data[:, 1]).reshape(dim, dim)


def to_json(obj) -> dict:
    if isinstance(obj, Covariance):
        return matrix_to_json(obj.matrix, "passive")
    if isinstance(obj, SelfDualCovariance):
        return matrix_to_json(obj.matrix, "selfdual")
    if isinstance(obj, MajoranaCovariance):
        return matrix_to_json(obj.matrix, "majorana")
    return matrix_to_json(obj)


def from_json(obj: dict):
    """Decode a matrix object into the type named by its formalism tag (default passive)."""
    m = matrix_from_json(obj)
    kind = obj.get("formalism", "passive")
    if kind == "passive":
        return validate(m)
    if kind == "selfdual":
        return SelfDualCovariance(m)
    if kind == "majorana":
        return MajoranaCovariance(m)
    raise MalformedInput(f"unknown formalism {kind!r}")


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc})") from exc


def load_covariance(path) -> Covariance:
    obj = from_json(read_json(path))
    if not isinstance(obj, Covariance):
        raise MalformedInput(f"{path} does not hold a passive covariance")
    return obj


def save_covariance(path, cov: Covariance) -> None:
    write_json(path, to_json(cov))


# --- plans ----------------------------------------------------------------


def plan_to_json(plan) -> dict:
    return {
        "delta": plan.delta,
        "eps": plan.eps,
        "n": plan.n,
        "d": plan.d,
        "subspace_indices": plan.subspace_indices.tolist(),
        "active_indices": plan.active_indices.tolist(),
        "matching": plan.matching.tolist(),
        "eta_achieved": plan.eta_achieved,
        "certified_bound": plan.certified_bound,
        "theorem_bound": plan.theorem_bound,
        "chain_bound": plan.chain_bound,
        "vacuous": plan.vacuous,
        "unitary": matrix_to_json(plan.unitary),
        "block_unitary": matrix_to_json(plan.block_unitary),
        "K": to_json(plan.K),
        "F": to_json(plan.F),
        "G": to_json(plan.G),
    }


def plan_from_json(obj: dict):
    """Rebuild a plan; scalars and the unitary are taken from the file, not recomputed."""
    from .embezzlement import EmbezzlementPlan

    try:
        plan = EmbezzlementPlan(
            K=from_json(obj["K"]),
            F=from_json(obj["F"]),
            G=from_json(obj["G"]),
            eps=float(obj["eps"]),
            delta=float(obj["delta"]),
            subspace_indices=np.asarray(obj["subspace_indices"], dtype=int),
            active_indices=np.asarray(obj["active_indices"], dtype=int),
            matching=np.asarray(obj["matching"], dtype=int),
            block_unitary=matrix_from_json(obj["block_unitary"]),
            eta_achieved=float(obj["eta_achieved"]),
            certified_bound=float(obj["certified_bound"]),
            theorem_bound=float(obj["theorem_bound"]),
            chain_bound=float(obj["chain_bound"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"malformed plan: {exc}") from exc
    if plan.F.dim != plan.G.dim or plan.block_unitary.shape[0] != plan.active_indices.size + plan.d:
        raise MalformedInput("plan fields have inconsistent dimensions")
    if "unitary" in obj:
        stored = matrix_from_json(obj["unitary"])
        if stored.shape != (plan.n + plan.d,) * 2:
            raise MalformedInput("stored unitary has the wrong size")
        # prefer the stored matrix; it is what the run actually used
        plan.__dict__["unitary"] = stored
    return plan
