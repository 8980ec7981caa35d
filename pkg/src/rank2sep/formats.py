"""State files and verdict reports.

State files are JSON documents::

    {
      "schema_version": "1.0",
      "kind": "density_matrix" | "eigen_pair" | "pure_state",
      "N": 2,
      "rho": [[[re, im], ...], ...],             # density_matrix: N^2 x N^2
      "p": 0.25, "E1": [[...]], "E2": [[...]],   # eigen_pair: two N x N matrices
      "A": [[[re, im], ...], ...],               # pure_state: one N x N matrix
      "provenance": {...}                        # optional, free-form
    }

Every complex entry is a two-element ``[re, im]`` array; a bare number is read
as a real entry.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .concurrence import generalized_concurrence, product_factors
from .errors import ParseError, ValidationError
from .linalg import hermiticity_defect
from .states import PureState, Rank2State

SCHEMA_VERSION = "1.0"
REPORT_SCHEMA = "rank2sep.report/1"
VALIDATION_TOL = 1e-8
KINDS = ("density_matrix", "eigen_pair", "pure_state")


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        return [encode_complex(z) for z in M]
    return [encode_matrix(row) for row in M]


def _decode_entry(x, where):
    if isinstance(x, bool):
        raise ValidationError(f"{where}: expected a number or [re, im], got {x!r}", invariant="schema")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(
        isinstance(c, (int, float)) and not isinstance(c, bool) for c in x
    ):
        return complex(x[0], x[1])
    raise ValidationError(f"{where}: expected a number or [re, im], got {x!r}", invariant="schema")


def decode_vector(data, where="vector"):
    if not isinstance(data, list) or not data:
        raise ValidationError(f"{where}: expected a non-empty array", invariant="schema")
    return np.array([_decode_entry(x, f"{where}[{i}]") for i, x in enumerate(data)], dtype=complex)


def decode_matrix(data, where="matrix"):
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ValidationError(f"{where}: expected a non-empty array of rows", invariant="schema")
    rows = [[_decode_entry(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(data)]
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ValidationError(f"{where}: rows have unequal lengths {sorted(width)}", invariant="schema")
    M = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{where}: non-finite entry", invariant="finite")
    return M


@dataclass
class StateFile:
    kind: str
    N: int
    rho: Optional[np.ndarray] = None
    p: Optional[float] = None
    E1: Optional[np.ndarray] = None
    E2: Optional[np.ndarray] = None
    A: Optional[np.ndarray] = None
    schema_version: str = SCHEMA_VERSION
    provenance: dict = field(default_factory=dict)

    def density(self):
        if self.kind == "density_matrix":
            return self.rho
        if self.kind == "eigen_pair":
            return self.rank2_state().density()
        return self.pure_state().density()

    def rank2_state(self):
        return Rank2State(self.p, PureState(self.E1), PureState(self.E2))

    def pure_state(self):
        return PureState(self.A)

    def to_dict(self):
        out = {"schema_version": self.schema_version, "kind": self.kind, "N": self.N}
        if self.kind == "density_matrix":
            out["rho"] = encode_matrix(self.rho)
        elif self.kind == "eigen_pair":
            out.update({"p": self.p, "E1": encode_matrix(self.E1), "E2": encode_matrix(self.E2)})
        else:
            out["A"] = encode_matrix(self.A)
        if self.provenance:
            out["provenance"] = self.provenance
        return out


def _shape(M, shape, name):
    if M.shape != shape:
        raise ValidationError(f"{name} has shape {M.shape}, expected {shape}", invariant="shape")


def _normalized(M, name, tol):
    norm = float(np.linalg.norm(M))
    if abs(norm - 1.0) > tol:
        raise ValidationError(
            f"{name} is not normalized: norm {norm:.12g} (off by {abs(norm - 1):.3g})",
            invariant="normalization",
            amount=abs(norm - 1),
        )


def validate(sf, tol=VALIDATION_TOL):
    """Check every matrix invariant of a :class:`StateFile`, raising ``ValidationError``."""
    N = sf.N
    if sf.kind == "density_matrix":
        _shape(sf.rho, (N * N, N * N), "rho")
        defect = hermiticity_defect(sf.rho)
        if defect > tol:
            raise ValidationError(
                f"rho is not Hermitian: relative defect {defect:.3g}", invariant="hermiticity", amount=defect
            )
        trace = float(np.real(np.trace(sf.rho)))
        if abs(trace - 1.0) > tol:
            deficit = 1.0 - trace
            raise ValidationError(
                f"rho has trace {trace:.12g}, trace deficit {deficit:.6g}", invariant="trace", amount=deficit
            )
        lam_min = float(np.linalg.eigvalsh(0.5 * (sf.rho + sf.rho.conj().T))[0])
        if lam_min < -tol:
            raise ValidationError(
                f"rho is not positive semidefinite: eigenvalue {lam_min:.6g}",
                invariant="positivity",
                amount=-lam_min,
            )
    elif sf.kind == "eigen_pair":
        if not isinstance(sf.p, (int, float)) or isinstance(sf.p, bool) or not 0.0 < sf.p < 1.0:
            raise ValidationError(f"p={sf.p!r} must be a number in (0, 1)", invariant="weight")
        for name in ("E1", "E2"):
            M = getattr(sf, name)
            _shape(M, (N, N), name)
            _normalized(M, name, tol)
        overlap = abs(np.vdot(sf.E1, sf.E2))
        if overlap > tol:
            raise ValidationError(
                f"E1 and E2 are not orthogonal: |<E1|E2>| = {overlap:.6g}", invariant="orthogonality", amount=overlap
            )
    else:
        _shape(sf.A, (N, N), "A")
        _normalized(sf.A, "A", tol)
    return sf


def parse_state_file(text, tol=VALIDATION_TOL):
    """Parse and validate a state file given as ``bytes`` or ``str``."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise ValidationError("top level must be an object", invariant="schema")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {', '.join(KINDS)}; got {kind!r}", invariant="schema")
    N = doc.get("N")
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise ValidationError(f"N must be a positive integer; got {N!r}", invariant="schema")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if str(version).split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise ValidationError(f"unsupported schema_version {version!r}", invariant="schema")

    def need(key):
        if key not in doc:
            raise ValidationError(f"{kind} file is missing '{key}'", invariant="schema")
        return doc[key]

    sf = StateFile(kind=kind, N=N, schema_version=str(version), provenance=doc.get("provenance") or {})
    if kind == "density_matrix":
        sf.rho = decode_matrix(need("rho"), "rho")
    elif kind == "eigen_pair":
        sf.p = need("p")
        sf.E1 = decode_matrix(need("E1"), "E1")
        sf.E2 = decode_matrix(need("E2"), "E2")
    else:
        sf.A = decode_matrix(need("A"), "A")
    return validate(sf, tol)


def serialize_state_file(sf):
    return json.dumps(sf.to_dict(), indent=1) + "\n"


def state_file_from(obj, provenance=None):
    """Wrap a density matrix, :class:`Rank2State` or :class:`PureState` as a :class:`StateFile`."""
    provenance = provenance or {}
    if isinstance(obj, Rank2State):
        return StateFile("eigen_pair", obj.N, p=obj.p, E1=obj.E1.A, E2=obj.E2.A, provenance=provenance)
    if isinstance(obj, PureState):
        return StateFile("pure_state", obj.N, A=obj.A, provenance=provenance)
    rho = np.asarray(obj, dtype=complex)
    N = int(round(np.sqrt(rho.shape[0])))
    return StateFile("density_matrix", N, rho=rho, provenance=provenance)


def input_hash(text):
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


@dataclass
class Report:
    """Human- and machine-readable summary of one verdict."""

    verdict: str
    separable: bool
    branch: str
    note: str = ""
    theta: Optional[float] = None
    roots: Optional[list] = None
    p_prime: Optional[float] = None
    residuals: dict = field(default_factory=dict)
    decomposition: list = field(default_factory=list)
    oracle: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    input_sha256: str = ""
    provenance: dict = field(default_factory=dict)
    schema_version: str = REPORT_SCHEMA

    @classmethod
    def from_verdict(cls, verdict, oracle=None, tolerances=None, input_sha256="", provenance=None):
        thresholds = {}
        for name, value in verdict.residuals.items():
            thresholds[name] = {"value": float(value), "threshold": float(verdict.tol)}
        terms = []
        if verdict.decomposition is not None:
            for t in verdict.decomposition.terms:
                u, v = product_factors(t.state.A)
                terms.append(
                    {
                        "weight": float(t.weight),
                        "u": encode_matrix(u),
                        "v": encode_matrix(v),
                        "state": encode_matrix(t.state.A),
                        "concurrence": generalized_concurrence(PureState(t.state.A, check=False)),
                    }
                )
        return cls(
            verdict="SEPARABLE" if verdict.separable else "ENTANGLED",
            separable=bool(verdict.separable),
            branch=verdict.branch.value,
            note=verdict.note,
            theta=verdict.theta,
            roots=None if verdict.roots is None else [encode_complex(z) for z in verdict.roots],
            p_prime=None if verdict.p_prime is None else float(verdict.p_prime),
            residuals=thresholds,
            decomposition=terms,
            oracle=dict(oracle or {}),
            tolerances=dict(tolerances or {"tol": verdict.tol}),
            input_sha256=input_sha256,
            provenance=dict(provenance or {}),
        )

    @property
    def headline(self):
        detail = self.note or self.branch
        return f"{self.verdict} ({detail})"

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        if data.get("schema_version") != REPORT_SCHEMA:
            raise ValidationError(f"unsupported report schema {data.get('schema_version')!r}", invariant="schema")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc

    def to_decomposition_text(self):
        lines = [self.headline]
        if not self.decomposition:
            lines.append("  no product decomposition exists")
            return "\n".join(lines)
        if self.p_prime is not None:
            lines.append(f"  p'            {self.p_prime:.12g}")
        lines.append("  rho = sum_k weight_k |u_k (x) v_k><u_k (x) v_k|")
        for k, term in enumerate(self.decomposition, 1):
            u = ", ".join(_fmt(complex(*z)) for z in term["u"])
            v = ", ".join(_fmt(complex(*z)) for z in term["v"])
            lines.append(f"    [{k}] weight {term['weight']:.12g}  u = ({u})  v = ({v})")
        err = self.oracle.get("reconstruction_error")
        if err is not None:
            lines.append(f"  reconstruction error {err:.3e}")
        return "\n".join(lines)

    def to_text(self, show_decomposition=True):
        lines = [self.headline, f"  branch        {self.branch}"]
        if self.theta is not None:
            lines.append(f"  theta         {self.theta:.12g}")
        if self.roots is not None:
            mu = [complex(*r) for r in self.roots]
            lines.append(f"  roots         mu1 = {_fmt(mu[0])}, mu2 = {_fmt(mu[1])}")
        if self.p_prime is not None:
            lines.append(f"  p'            {self.p_prime:.12g}")
        if self.residuals:
            lines.append("  residuals     name                      value        threshold")
            for name, r in self.residuals.items():
                mark = "<=" if r["value"] <= r["threshold"] else "> "
                lines.append(f"                {name:<24}  {r['value']:.3e} {mark} {r['threshold']:.1e}")
        if show_decomposition and self.decomposition:
            lines.append("  decomposition")
            for k, term in enumerate(self.decomposition, 1):
                u = ", ".join(_fmt(complex(*z)) for z in term["u"])
                v = ", ".join(_fmt(complex(*z)) for z in term["v"])
                lines.append(f"    [{k}] weight {term['weight']:.12g}")
                lines.append(f"        u = ({u})")
                lines.append(f"        v = ({v})")
        if self.oracle:
            o = self.oracle
            lines.append("  oracle        PPT holds: {}  min eigenvalue of partial transpose: {:.6e}".format(
                o.get("ppt_holds"), o.get("min_pt_eigenvalue", float("nan"))))
            if o.get("reconstruction_error") is not None:
                lines.append(f"                reconstruction error {o['reconstruction_error']:.3e}")
            lines.append(f"                agreement {o.get('agreement')}")
        tol = ", ".join(f"{k}={v:g}" for k, v in self.tolerances.items())
        lines.append(f"  tolerances    {tol}")
        if self.input_sha256:
            lines.append(f"  input sha256  {self.input_sha256}")
        if self.provenance:
            lines.append("  provenance    " + ", ".join(f"{k}={v}" for k, v in self.provenance.items()))
        return "\n".join(lines)


def _fmt(z):
    z = complex(z)
    if abs(z.imag) < 5e-13:
        return f"{z.real:.10g}"
    return f"{z.real:.10g}{z.imag:+.10g}j"


def default_provenance(extra=None):
    prov = {"tool": "rank2sep", "version": __version__}
    prov.update(extra or {})
    return prov
