"""Per-subset verification records, batch runs and their serialization."""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exact as ex
from . import curvature as cv
from .parabolic import (
    SubsetSelection,
    all_subsets,
    attached_solvmanifold,
    complement_trace,
    complementary_block_solvmanifold,
    iwasawa_type_check,
    langlands,
    mean_curvature_from_sigma,
    nilpotency_degree,
    normal_a_component,
    rank_one_reduction,
)
from .realization import Realization, build_realization, load_realization
from .rootsystem import InputError, cartan_from_types, is_trivial_subset, root_system

SCHEMA_VERSION = 1
EXACT_DIM_LIMIT = 80
EINSTEIN_CONSTANT = Fraction(-1, 4)

# every check a record carries, in output order
CHECK_KEYS = (
    "langlands",
    "iwasawa_type",
    "einstein",
    "einstein_constant",
    "routes_agree",
    "nilpotent_route",
    "mean_curvature_in_a",
    "minimal",
    "totally_geodesic_iff_trivial",
    "ricci_restriction",
    "lemma_identity",
    "rank_one_reduction",
    "nilpotency",
    "trivial_block",
)
RESIDUAL_KEYS = (
    "einstein",
    "routes",
    "nilpotent_route",
    "mean_curvature_n",
    "mean_curvature_normal",
    "mean_curvature_routes",
    "second_fundamental_normal",
    "mean_curvature_h",
    "ricci_restriction",
    "lemma_identity",
    "rank_one_einstein",
)
CSV_FIELDS = (
    "schema_version",
    "algebra",
    "form",
    "subset",
    "status",
    "scalar_mode",
    "dim_g",
    "dim_a",
    "dim_n",
    "dim_m",
    "nu",
    "nilpotency_computed",
    "nilpotency_predicted",
    "einstein",
    "einstein_constant",
    "iwasawa_type",
    "minimal",
    "totally_geodesic",
    "trivial_subset",
    "ricci_restriction",
    "mean_curvature",
    "wall_time",
    "note",
) + tuple(f"check_{k}" for k in CHECK_KEYS) + tuple(f"residual_{k}" for k in RESIDUAL_KEYS)


# ----------------------------------------------------------------------------
# Algebra specification
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraSpec:
    types: tuple = ()  # ((series, rank), ...)
    form: str = "split"
    realization_path: str | None = None

    def __post_init__(self):
        if bool(self.types) == bool(self.realization_path):
            raise InputError("give either series/rank pairs or a realization file")

    def build(self) -> Realization:
        # files are re-read every time since they may change between calls
        if self.realization_path:
            return load_realization(self.realization_path)
        return _build_builtin(self.types, self.form)


@lru_cache(maxsize=8)
def _build_builtin(types: tuple, form: str) -> Realization:
    return build_realization(root_system(cartan_from_types(types)), form)


def fmt_scalar(v):
    """Exact values as ``p/q`` strings, floats as shortest round-trip floats."""
    if isinstance(v, Fraction):
        return ex.fmt(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


# ----------------------------------------------------------------------------
# Records
# ----------------------------------------------------------------------------


@dataclass
class VerificationRecord:
    algebra: str
    form: str
    subset: list
    status: str  # pass | fail | skipped
    scalar_mode: str
    dims: dict = field(default_factory=dict)
    nu: int | None = None
    nilpotency: dict = field(default_factory=dict)
    einstein: dict = field(default_factory=dict)
    iwasawa: dict = field(default_factory=dict)
    minimal: bool | None = None
    totally_geodesic: bool | None = None
    trivial_subset: bool | None = None
    ricci_restriction: bool | None = None
    mean_curvature: list = field(default_factory=list)  # H0 in the frame basis
    checks: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    wall_time: float = 0.0
    note: str = ""
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "algebra": self.algebra,
            "form": self.form,
            "subset": list(self.subset),
            "status": self.status,
            "scalar_mode": self.scalar_mode,
            "dims": dict(self.dims),
            "nu": self.nu,
            "nilpotency": dict(self.nilpotency),
            "einstein": dict(self.einstein),
            "iwasawa": dict(self.iwasawa),
            "minimal": self.minimal,
            "totally_geodesic": self.totally_geodesic,
            "trivial_subset": self.trivial_subset,
            "ricci_restriction": self.ricci_restriction,
            "mean_curvature": list(self.mean_curvature),
            "checks": {k: self.checks[k] for k in CHECK_KEYS if k in self.checks},
            "residuals": {k: self.residuals[k] for k in RESIDUAL_KEYS if k in self.residuals},
            "wall_time": self.wall_time,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationRecord":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise InputError(f"unsupported record schema version {d.get('schema_version')!r}")
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in d.items() if k in known})


def _max(*vals):
    vals = [v for v in vals]
    return max(vals) if vals else 0


def _ok(residual, exact: bool, tol: float) -> bool:
    return residual == 0 if exact else float(residual) <= tol


def _rel(diff, scale) -> float:
    scale = float(scale)
    return float(diff) / scale if scale > 0 else float(diff)


@lru_cache(maxsize=8)
def _ambient_data(r: Realization, scalar: str) -> dict:
    """Curvature of the empty-subset algebra, shared by every subset of ``r``."""
    from .parabolic import solvable_frame

    amb = solvable_frame(r).algebra
    if scalar == "float":
        amb = amb.to_float()
    nil = amb.nilradical()
    return {
        "algebra": amb,
        "ricci": cv.ricci_besse(amb),
        "u": cv.u_tensor(amb),
        "ric_op_n": cv.nilpotent_ricci_operator(nil) if amb.exact else _float_ric_op(nil),
    }


def _float_ric_op(nil: cv.MetricLieAlgebra) -> np.ndarray:
    ric = cv.ricci_nilpotent(nil)
    return cv.ricci_operator(nil, ric)


def skipped_record(r: Realization, subset) -> VerificationRecord:
    return VerificationRecord(
        algebra=r.name,
        form=r.form,
        subset=sorted(int(i) for i in subset),
        status="skipped",
        scalar_mode="",
        note="the full set of simple roots does not give a proper parabolic subalgebra",
    )


def verify_case(r: Realization, subset, scalar: str = "exact", tol: float | None = None, lemma: bool = True) -> VerificationRecord:
    """Run every check for one subset and collect the outcome."""
    start = time.perf_counter()
    idx = sorted(int(i) for i in subset)
    if len(set(idx)) == r.rank and all(0 <= i < r.rank for i in idx):
        return skipped_record(r, idx)
    sel = SubsetSelection(r.rank, frozenset(idx))
    if scalar not in ("exact", "float"):
        raise InputError(f"unknown scalar mode {scalar!r}")
    exact = scalar == "exact"
    if tol is None:
        tol = cv.DEFAULT_TOL
    checks, res = {}, {}

    lang = langlands(r, sel)
    checks["langlands"] = lang.ok
    s = attached_solvmanifold(r, sel)
    iw = iwasawa_type_check(s)
    checks["iwasawa_type"] = bool(iw["passed"])

    amb_data = _ambient_data(r, scalar)
    amb = amb_data["algebra"]
    m = s.algebra if exact else s.algebra.to_float()

    # Ricci tensor by every route
    ric = {name: fn(m) for name, fn in cv.ROUTES.items()}
    base = ric["besse"].matrix
    scale = ex.max_abs(base)
    diff = _max(*(ex.max_abs(ric[k].matrix - base) for k in ric))
    res["routes"] = diff if exact else _rel(diff, scale)
    checks["routes_agree"] = _ok(res["routes"], exact, tol)

    e = cv.einstein_check(ric["besse"], m.gram, None if exact else tol)
    res["einstein"] = e.residual
    checks["einstein"] = bool(e.is_einstein)
    checks["einstein_constant"] = e.constant == EINSTEIN_CONSTANT if exact else abs(e.constant - float(EINSTEIN_CONSTANT)) <= tol

    nil = m.nilradical()
    rn, rb = cv.ricci_nilpotent(nil).matrix, cv.ricci_besse(nil).matrix
    res["nilpotent_route"] = ex.max_abs(rn - rb) if exact else _rel(ex.max_abs(rn - rb), max(float(ex.max_abs(rb)), 1.0))
    checks["nilpotent_route"] = _ok(res["nilpotent_route"], exact, tol)

    # mean curvature vector: trace of U on s, and the sigma formula in g
    h0 = cv.mean_curvature(m)
    h0_sigma = mean_curvature_from_sigma(s)
    h0_frame = amb.zeros(amb.dim)
    h0_frame[list(s.embedding)] = h0
    sig = h0_sigma if exact else ex.to_float(h0_sigma)
    rank = r.rank
    res["mean_curvature_n"] = ex.max_abs(sig[rank:])
    res["mean_curvature_normal"] = ex.max_abs(normal_a_component(s, sig))
    res["mean_curvature_routes"] = ex.max_abs(sig - h0_frame)
    checks["mean_curvature_in_a"] = all(
        _ok(res[k], exact, tol) for k in ("mean_curvature_n", "mean_curvature_normal", "mean_curvature_routes")
    )

    # second fundamental form in the empty-subset algebra
    sff = cv.second_fundamental_form(m, amb, s.embedding, amb_data["u"])
    trivial = is_trivial_subset(r.rsd.cartan, sel.indices)
    res["second_fundamental_normal"] = sff.residuals["normal"]
    res["mean_curvature_h"] = sff.residuals["mean_curvature"]
    checks["minimal"] = bool(sff.is_minimal) and _ok(sff.residuals["normal"], exact, tol)
    checks["totally_geodesic_iff_trivial"] = bool(sff.is_totally_geodesic) == trivial
    if not trivial:
        checks["totally_geodesic_iff_trivial"] = checks["totally_geodesic_iff_trivial"] and bool(sff.witnesses)

    ok, rres = cv.ricci_restriction_check(m, amb, s.embedding, ric_ambient=amb_data["ricci"], ric_sub=ric["besse"], tol=tol)
    res["ricci_restriction"] = rres
    checks["ricci_restriction"] = bool(ok)

    if lemma:
        res["lemma_identity"] = lemma_residual(s, m, amb_data)
        checks["lemma_identity"] = _ok(res["lemma_identity"], exact, tol)

    red = rank_one_reduction(s, h0)
    e1 = cv.einstein_check(cv.ricci_besse(red), red.gram, None if exact else tol)
    res["rank_one_einstein"] = e1.residual
    const_ok = e1.constant == EINSTEIN_CONSTANT if exact else abs(e1.constant - float(EINSTEIN_CONSTANT)) <= tol
    checks["rank_one_reduction"] = bool(e1.is_einstein) and const_ok

    computed, predicted = nilpotency_degree(s)
    checks["nilpotency"] = computed == predicted

    block = complementary_block_solvmanifold(r, sel) if sel.indices else None
    if block is not None:
        checks["trivial_block"] = (
            block.dim == s.algebra.dim
            and ex.is_zero(block.bracket - s.algebra.bracket)
            and ex.is_zero(block.gram - s.algebra.gram)
        )

    dims = {"g": r.dimension, **lang.dims}
    rec = VerificationRecord(
        algebra=r.name,
        form=r.form,
        subset=idx,
        status="pass" if all(checks.values()) else "fail",
        scalar_mode=scalar,
        dims=dims,
        nu=lang.grading.nu,
        nilpotency={"computed": computed, "predicted": predicted},
        einstein={"is_einstein": bool(e.is_einstein), "constant": fmt_scalar(e.constant)},
        iwasawa={k: fmt_scalar(v) for k, v in iw.items() if k not in ("a0_eigenvalues",)},
        minimal=bool(sff.is_minimal),
        totally_geodesic=bool(sff.is_totally_geodesic),
        trivial_subset=trivial,
        ricci_restriction=bool(ok),
        mean_curvature=[fmt_scalar(v) for v in h0_frame.tolist()],
        checks={k: bool(v) for k, v in checks.items()},
        residuals={k: fmt_scalar(v) for k, v in res.items()},
    )
    rec.wall_time = round(time.perf_counter() - start, 6)
    return rec


def lemma_residual(s, m: cv.MetricLieAlgebra, amb_data: dict):
    """Largest entry of ``Ric^{n_empty}(X) - Ric^{n}(X) - [H0perp, X]`` over the basis of ``n``.

    ``H0perp`` is the sigma trace over root vectors with ``beta(Z) = 0``.
    """
    amb = amb_data["algebra"]
    exact = m.exact
    rank = s.realization.rank
    nil = m.nilradical()
    op_sub = cv.nilpotent_ricci_operator(nil) if exact else _float_ric_op(nil)
    op_amb = amb_data["ric_op_n"]
    hperp = complement_trace(s)
    if not exact:
        hperp = ex.to_float(hperp)
    ad_h = amb.ad(hperp)
    # positions of n (of s) inside the ambient nilradical (frame index minus rank)
    n_emb = [s.embedding[k] - rank for k in m.n_indices]
    worst = ex.ZERO if exact else 0.0
    for j, pos in enumerate(n_emb):
        lhs = op_amb[:, pos].copy()
        lhs[n_emb] = lhs[n_emb] - op_sub[:, j]
        rhs = ad_h[rank:, rank + pos]
        worst = max(worst, ex.max_abs(lhs - rhs))
    if not exact:
        worst = _rel(worst, max(float(ex.max_abs(op_amb)), 1.0))
    return worst


# ----------------------------------------------------------------------------
# Batch runs
# ----------------------------------------------------------------------------


def default_scalar(r: Realization) -> str:
    return "exact" if r.dimension <= EXACT_DIM_LIMIT else "float"


def _job(args):
    spec, subset, scalar, tol, lemma = args
    r = spec.build()
    return verify_case(r, subset, scalar or default_scalar(r), tol, lemma)


def run(spec: AlgebraSpec, subsets, scalar: str | None = None, tol: float | None = None, threads: int = 1, lemma: bool = True) -> list:
    """Verify each subset; results come back in the order of ``subsets``."""
    jobs = [(spec, tuple(sub), scalar, tol, lemma) for sub in subsets]
    if threads <= 1 or len(jobs) <= 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_job, jobs))


def enumerate_subsets(r: Realization, subsets) -> list:
    """Combinatorial summary rows (no curvature)."""
    from .parabolic import characteristic_element, gradation

    rows = []
    for sub in subsets:
        idx = sorted(sub)
        if len(idx) == r.rank:
            continue
        sel = SubsetSelection(r.rank, frozenset(idx))
        grad = gradation(r, characteristic_element(r, sel))
        n_dim = sum(len(v) for k, v in grad.layers.items() if k > 0)
        g0 = len(grad.layers.get(0, ()))
        a_dim = len(sel.complement)
        predicted = max(
            sum(c for i, c in enumerate(hr.coeffs) if i in set(sel.complement)) for hr in r.rsd.highest_roots
        )
        rows.append(
            {
                "algebra": r.name,
                "subset": idx,
                "dim_g": r.dimension,
                "dim_a": a_dim,
                "dim_n": n_dim,
                "dim_m": g0 - a_dim,
                "nu": grad.nu,
                "nilpotency": predicted,
            }
        )
    return rows


# ----------------------------------------------------------------------------
# Export
# ----------------------------------------------------------------------------


def records_to_json(records) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "records": [rec.to_dict() for rec in records]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def records_from_json(text: str) -> list:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise InputError("not a record file of a supported schema version")
    return [VerificationRecord.from_dict(d) for d in doc.get("records", [])]


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def record_row(rec: VerificationRecord) -> dict:
    row = {
        "schema_version": rec.schema_version,
        "algebra": rec.algebra,
        "form": rec.form,
        "subset": ",".join(str(i) for i in rec.subset),
        "status": rec.status,
        "scalar_mode": rec.scalar_mode,
        "dim_g": rec.dims.get("g"),
        "dim_a": rec.dims.get("a"),
        "dim_n": rec.dims.get("n"),
        "dim_m": rec.dims.get("m"),
        "nu": rec.nu,
        "nilpotency_computed": rec.nilpotency.get("computed"),
        "nilpotency_predicted": rec.nilpotency.get("predicted"),
        "einstein": rec.einstein.get("is_einstein"),
        "einstein_constant": rec.einstein.get("constant"),
        "iwasawa_type": rec.iwasawa.get("passed"),
        "minimal": rec.minimal,
        "totally_geodesic": rec.totally_geodesic,
        "trivial_subset": rec.trivial_subset,
        "ricci_restriction": rec.ricci_restriction,
        "mean_curvature": " ".join(str(v) for v in rec.mean_curvature),
        "wall_time": rec.wall_time,
        "note": rec.note,
    }
    row.update({f"check_{k}": rec.checks.get(k) for k in CHECK_KEYS})
    row.update({f"residual_{k}": rec.residuals.get(k) for k in RESIDUAL_KEYS})
    return {k: _csv_cell(row[k]) for k in CSV_FIELDS}


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for rec in records:
        w.writerow(record_row(rec))
    return buf.getvalue()


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    if "/" not in text:
        try:
            return float(text)
        except ValueError:
            pass
    return text


def records_from_csv(text: str) -> list:
    """Inverse of :func:`records_to_csv`."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise InputError("CSV header does not match the record schema")
    out = []
    for row in reader:
        c = {k: _parse_cell(v) for k, v in row.items()}
        if c["schema_version"] != SCHEMA_VERSION:
            raise InputError(f"unsupported record schema version {c['schema_version']!r}")
        dims = {k: c[f"dim_{k}"] for k in ("g", "a", "n", "m") if c[f"dim_{k}"] is not None}
        rec = VerificationRecord(
            algebra=row["algebra"],
            form=row["form"],
            subset=[int(t) for t in row["subset"].split(",") if t],
            status=row["status"],
            scalar_mode=row["scalar_mode"],
            dims=dims,
            nu=c["nu"],
            nilpotency={k: c[f"nilpotency_{k}"] for k in ("computed", "predicted")} if c["nilpotency_computed"] is not None else {},
            einstein={"is_einstein": c["einstein"], "constant": _keep_str(row["einstein_constant"])} if c["einstein"] is not None else {},
            iwasawa={"passed": c["iwasawa_type"]} if c["iwasawa_type"] is not None else {},
            minimal=c["minimal"],
            totally_geodesic=c["totally_geodesic"],
            trivial_subset=c["trivial_subset"],
            ricci_restriction=c["ricci_restriction"],
            mean_curvature=[_keep_str(t) for t in row["mean_curvature"].split()],
            checks={k: c[f"check_{k}"] for k in CHECK_KEYS if c[f"check_{k}"] is not None},
            residuals={k: _keep_str(row[f"residual_{k}"]) for k in RESIDUAL_KEYS if row[f"residual_{k}"] != ""},
            wall_time=c["wall_time"],
            note=row["note"] or "",
        )
        out.append(rec)
    return out


def _keep_str(text: str):
    """Rationals stay ``p/q`` strings (integers included); floats become floats."""
    if any(ch in text for ch in ".eEn") and "/" not in text:
        try:
            return float(text)
        except ValueError:
            return text
    return text
