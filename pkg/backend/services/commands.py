# backend/services/commands.py
"""
Despacho (grupo, ação) → documento JSON + código de saída.

Cada handler recebe o problema decodificado e devolve (resultado, positivo).
Erros da hierarquia HodgeError viram o membro "error" do documento.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from ..config import Settings
from ..errors import HodgeError, InputError, NonexistenceError
from ..models.filtrations import (
    jordan_strings,
    monodromy_grading,
    monodromy_weight_filtration,
    relative_weight_filtration,
    verify_relative_filtration,
)
from ..models.ih import (
    build_b_complex,
    ih_dim,
    invariant_lift,
    les_verify,
    sing_class,
    sigma_torsion,
    torsion_group,
)
from ..models.linalg import Matrix
from ..models.mhs import (
    MixedHodgeStructure,
    delta_by_dense_solve,
    delta_splitting,
    is_mhs,
    sl2_splitting,
    split_equiv_report,
    verify_bigrading,
)
from ..models.orbits import (
    admissibility_check,
    cone_independence,
    evaluate_F,
    grading_at,
    horizontality_check,
    invariant_grading,
    limit_data,
    limit_nf_value,
    multivariable_limit_probe,
)
from ..models.sl2 import deligne_Y, highest_weight_check, sl2_complete, uniqueness_probe
from ..models.zerolocus import (
    accumulation_verdict,
    defining_equation,
    derivation_chain,
    limit_integrality,
    zero_test,
)
from .codec import (
    Decoded,
    load_problem,
    parse_scalar,
    render_decreasing,
    render_grading,
    render_increasing,
    render_matrix,
    render_subspace,
    render_vector,
)

logger = logging.getLogger(__name__)

Result = Tuple[Dict[str, Any], bool]


@dataclass
class RunOptions:
    twisted: Optional[bool] = None  # None = ambos os limites
    csv_path: Optional[str] = None
    config: Settings = field(default_factory=Settings)


Handler = Callable[[Decoded, RunOptions], Result]
COMMANDS: Dict[Tuple[str, str], Handler] = {}


def command(group: str, action: str) -> Callable[[Handler], Handler]:
    def register(fn: Handler) -> Handler:
        COMMANDS[(group, action)] = fn
        return fn

    return register


def available_commands() -> List[str]:
    return [f"{g} {a}" for g, a in sorted(COMMANDS)]


def _type_key(t: Tuple[int, int]) -> str:
    return f"{t[0]},{t[1]}"


def _fw(dec: Decoded):
    return dec.decreasing(dec.name_param("F", "F")), dec.increasing(dec.name_param("W", "W"))


# --------------- mhs -----------------
@command("mhs", "check")
def _mhs_check(dec: Decoded, opts: RunOptions) -> Result:
    F, W = _fw(dec)
    ok, diagnostic = is_mhs(F, W)
    return {"is_mhs": ok, "diagnostic": diagnostic}, ok


@command("mhs", "bigrading")
def _mhs_bigrading(dec: Decoded, opts: RunOptions) -> Result:
    F, W = _fw(dec)
    mhs = MixedHodgeStructure(F, W)
    bg = mhs.bigrading
    return {
        "pieces": {_type_key(t): render_subspace(bg.pieces[t]) for t in bg.types()},
        "hodge_numbers": {_type_key(t): d for t, d in bg.hodge_numbers().items()},
        "axioms": verify_bigrading(bg, F, W),
    }, True


@command("mhs", "grading")
def _mhs_grading(dec: Decoded, opts: RunOptions) -> Result:
    F, W = _fw(dec)
    y = MixedHodgeStructure(F, W).grading
    return {"grading": render_grading(y), "real": y.is_real()}, True


@command("mhs", "delta")
def _mhs_delta(dec: Decoded, opts: RunOptions) -> Result:
    F, W = _fw(dec)
    delta, F_tilde = delta_splitting(F, W)
    return {
        "delta": render_matrix(delta),
        "F_tilde": render_decreasing(F_tilde),
        "dense_solve_agrees": delta_by_dense_solve(F, W) == delta,
    }, True


@command("mhs", "sl2split")
def _mhs_sl2split(dec: Decoded, opts: RunOptions) -> Result:
    F, W = _fw(dec)
    split = sl2_splitting(F, W, opts.config)
    return {
        "xi": render_matrix(split.xi),
        "F_hat": render_decreasing(split.F_hat),
        "delta": render_matrix(split.delta),
        "zeta": render_matrix(split.zeta),
        "lambda_abelian": split.lambda_abelian,
        "normalization": split.normalization,
    }, True


@command("mhs", "split")
def _mhs_split(dec: Decoded, opts: RunOptions) -> Result:
    F, W = _fw(dec)
    report = split_equiv_report(F, W)
    return {"split_over_R": report["a"], "conditions": report}, True


# --------------- filt -----------------
@command("filt", "rwf")
def _filt_rwf(dec: Decoded, opts: RunOptions) -> Result:
    n = dec.matrix(dec.name_param("N", "N"))
    W = dec.increasing(dec.name_param("W", "W"))
    rel = relative_weight_filtration(n, W)
    doc: Dict[str, Any] = {"status": rel.status, "witness": rel.witness}
    if rel.exists:
        doc["filtration"] = render_increasing(rel.filtration)
        doc["grading"] = render_grading(rel.grading)
    return doc, rel.exists


@command("filt", "verify")
def _filt_verify(dec: Decoded, opts: RunOptions) -> Result:
    n = dec.matrix(dec.name_param("N", "N"))
    ok, witness = verify_relative_filtration(n, dec.increasing(dec.name_param("W", "W")), dec.increasing(dec.name_param("M", "M")))
    return {"valid": ok, "witness": witness}, ok


@command("filt", "monodromy")
def _filt_monodromy(dec: Decoded, opts: RunOptions) -> Result:
    n = dec.matrix(dec.name_param("N", "N"))
    center = dec.int_param("center", 0)
    strings = [{"length": s.length, "top": render_vector(s.top)} for s in jordan_strings(n)]
    return {
        "filtration": render_increasing(monodromy_weight_filtration(n, center)),
        "grading": render_grading(monodromy_grading(n, center)),
        "strings": strings,
    }, True


# --------------- sl2 -----------------
def _y_m(dec: Decoded, n: Matrix, W):
    name = dec.name_param("Y_M", "Y_M")
    if name in dec.problem.gradings:
        return dec.grading(name)
    rel = relative_weight_filtration(n, W)
    if not rel.exists:
        raise NonexistenceError("M(N, W) não existe", {"status": rel.status, **rel.witness})
    return MixedHodgeStructure(dec.decreasing(dec.name_param("F", "F")), rel.filtration).grading


@command("sl2", "deligne-y")
def _sl2_deligne_y(dec: Decoded, opts: RunOptions) -> Result:
    n = dec.matrix(dec.name_param("N", "N"))
    W = dec.increasing(dec.name_param("W", "W"))
    y_m = _y_m(dec, n, W)
    res = deligne_Y(n, y_m, W, method=dec.name_param("method", "auto"))
    highest, witness = highest_weight_check(res.decomposition, res.triple)
    doc = {
        "grading": render_grading(res.grading),
        "method": res.method,
        "components": {str(-j): render_matrix(m) for j, m in sorted(res.decomposition.components.items())},
        "triple": {
            "N0": render_matrix(res.triple.n0),
            "H": render_matrix(res.triple.h),
            "N0_plus": render_matrix(res.triple.n0_plus),
        },
        "highest_weight": highest,
        "highest_weight_witness": witness,
    }
    return doc, True


@command("sl2", "triple")
def _sl2_triple(dec: Decoded, opts: RunOptions) -> Result:
    n0 = dec.matrix(dec.name_param("N0", "N0"))
    h = dec.matrix(dec.name_param("H", "H"))
    return {"N0_plus": render_matrix(sl2_complete(n0, h))}, True


@command("sl2", "uniqueness")
def _sl2_uniqueness(dec: Decoded, opts: RunOptions) -> Result:
    n = dec.matrix(dec.name_param("N", "N"))
    W = dec.increasing(dec.name_param("W", "W"))
    box = dec.int_param("box", 1)
    if box < 0:
        raise InputError("box deve ser >= 0", {"position": "$.params.box"})
    report = uniqueness_probe(n, _y_m(dec, n, W), W, box=box)
    return report, report["unique"]


# --------------- ih -----------------
def _indices_key(indices: Tuple[int, ...]) -> str:
    return ",".join(str(j + 1) for j in indices) or "-"


@command("ih", "dims")
def _ih_dims(dec: Decoded, opts: RunOptions) -> Result:
    ls = dec.local_system()
    cx = build_b_complex(ls)
    groups = [ih_dim(cx, p) for p in range(ls.r + 1)]
    return {
        "dims": [g.dim for g in groups],
        "representatives": [
            [{_indices_key(k): render_vector(v) for k, v in rep.items()} for rep in g.representatives]
            for g in groups
        ],
        "complex_dims": [cx.dim(p) for p in range(ls.r + 1)],
        "euler_characteristic": cx.euler_characteristic(),
    }, True


@command("ih", "sing")
def _ih_sing(dec: Decoded, opts: RunOptions) -> Result:
    anf = dec.anf()
    klass = sing_class(anf)
    lift = invariant_lift(anf)
    return {
        "sing_zero": klass.is_zero,
        "coords": render_vector(klass.coords),
        "vectors": [render_vector(v) for v in klass.vectors],
        "invariant_lift": render_vector(lift) if lift is not None else None,
    }, True


@command("ih", "torsion")
def _ih_torsion(dec: Decoded, opts: RunOptions) -> Result:
    name = dec.name_param("t_minus_1")
    if name is not None:
        group = torsion_group(dec.matrix(name), dec.lattice(dec.name_param("lattice", "L")))
        return {"invariant_factors": group.invariant_factors, "order": group.order}, True
    sigma = sigma_torsion(dec.anf())
    order = 1
    for d in sigma.invariant_factors:
        order *= d
    return {
        "invariant_factors": sigma.invariant_factors,
        "order": order,
        "sigma": sigma.components,
        "sigma_nonzero": sigma.nonzero,
        "lift": render_vector(sigma.lift),
    }, True


@command("ih", "les")
def _ih_les(dec: Decoded, opts: RunOptions) -> Result:
    report = les_verify(dec.anf())
    return {
        "exact": report.exact,
        "nodes": report.nodes,
        "dims": report.dims,
        "facts": report.facts,
        "alternating_sum": report.alternating_sum,
        "sing_zero": report.sing_zero,
    }, report.exact


# --------------- orbit -----------------
def _zs(dec: Decoded, r: int):
    z = dec.scalars_param("z")
    s = dec.scalars_param("s", ["0"] * r)
    return z, s


@command("orbit", "check")
def _orbit_check(dec: Decoded, opts: RunOptions) -> Result:
    report = admissibility_check(dec.orbit())
    return {"admissible": report.passed, "checks": report.checks, "witnesses": report.witnesses}, report.passed


@command("orbit", "eval")
def _orbit_eval(dec: Decoded, opts: RunOptions) -> Result:
    lnf = dec.normal_form()
    z, s = _zs(dec, lnf.orbit.r)
    return {"F": render_decreasing(evaluate_F(lnf, z, s))}, True


@command("orbit", "horizontal")
def _orbit_horizontal(dec: Decoded, opts: RunOptions) -> Result:
    report = horizontality_check(dec.normal_form())
    return {
        "horizontal": report.holds,
        "membership_failures": report.membership_failures,
        "slice_failures": report.slice_failures,
    }, report.holds


@command("orbit", "grading")
def _orbit_grading(dec: Decoded, opts: RunOptions) -> Result:
    lnf = dec.normal_form()
    z, s = _zs(dec, lnf.orbit.r)
    pg = grading_at(lnf, z, s)
    return {"grading": render_grading(pg.grading), "F": render_decreasing(pg.F), "integral": pg.integral}, True


@command("orbit", "limit")
def _orbit_limit(dec: Decoded, opts: RunOptions) -> Result:
    lnf = dec.normal_form()
    s_slice = dec.scalars_param("s_slice", ["0"] * (lnf.orbit.r - 1))
    data = limit_data(lnf, s_slice, opts.config)
    doc: Dict[str, Any] = {
        "xi": render_matrix(data.xi),
        "delta": render_matrix(data.delta),
        "zeta": render_matrix(data.zeta),
        "F_hat": render_decreasing(data.F_hat),
        "checks": data.checks,
    }
    if opts.twisted in (None, False):
        doc["untwisted"] = render_grading(data.untwisted)
    if opts.twisted in (None, True):
        doc["twisted"] = render_grading(data.twisted)
    return doc, True


@command("orbit", "invariant")
def _orbit_invariant(dec: Decoded, opts: RunOptions) -> Result:
    orbit = dec.orbit()
    inv = invariant_grading(orbit)
    return {
        "grading": render_grading(inv.grading),
        "e0": render_vector(inv.e0),
        "cone": cone_independence(orbit),
    }, True


def _clean_float(x: Any) -> Optional[float]:
    value = float(x)
    return value if math.isfinite(value) else None


@command("orbit", "probe")
def _orbit_probe(dec: Decoded, opts: RunOptions) -> Result:
    lnf = dec.normal_form()
    weights = dec.ints_param("weights")
    depth = dec.int_param("depth")
    probe = multivariable_limit_probe(
        lnf,
        pattern=dec.name_param("pattern", "condition-1"),
        weights=weights,
        depth=depth,
        config=opts.config,
    )
    if opts.csv_path:
        Path(opts.csv_path).write_text(probe.to_csv(), encoding="utf-8")
        logger.info("tabela da sonda gravada em %s", opts.csv_path)
    rows = [
        {
            "k": int(row["k"]),
            "y": str(row["y"]),
            "deviation": _clean_float(row["deviation"]),
            "exact_zero": bool(row["exact_zero"]),
            "ratio": _clean_float(row["ratio"]),
        }
        for row in probe.table.to_dict(orient="records")
    ]
    return {
        "pattern": probe.pattern,
        "predicted": render_grading(probe.predicted),
        "table": rows,
        "monotone": probe.monotone,
    }, True


@command("orbit", "nf-value")
def _orbit_nf_value(dec: Decoded, opts: RunOptions) -> Result:
    orbit = dec.orbit()
    name = dec.name_param("Y_Z")
    value = limit_nf_value(orbit, dec.grading(name) if name else None)
    return {
        "representative": render_vector(value.representative),
        "zero": value.zero,
        "K": render_subspace(value.K),
        "F0K": render_subspace(value.F0K),
        "integral_grading": render_grading(value.integral_grading),
        "limit": render_grading(value.limit),
    }, True


# --------------- zloc -----------------
def _certificate_doc(cert) -> Dict[str, Any]:
    doc = {"verdict": cert.verdict, "point": cert.point, "witness": cert.witness}
    if cert.grading is not None:
        doc["grading"] = render_grading(cert.grading)
    return doc


@command("zloc", "test")
def _zloc_test(dec: Decoded, opts: RunOptions) -> Result:
    lnf = dec.normal_form()
    z, s = _zs(dec, lnf.orbit.r)
    cert = zero_test(lnf, z, s)
    return _certificate_doc(cert), cert.holds


@command("zloc", "limit")
def _zloc_limit(dec: Decoded, opts: RunOptions) -> Result:
    lnf = dec.normal_form()
    raw = dec.param("samples") or []
    if not isinstance(raw, list):
        raise InputError("params.samples deve ser lista", {"position": "$.params.samples"})
    samples = []
    for i, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2 or not all(isinstance(part, list) for part in pair):
            raise InputError("amostra deve ser [z, s]", {"position": f"$.params.samples[{i}]"})
        z, s = pair
        samples.append((
            [parse_scalar(x, f"$.params.samples[{i}][0]") for x in z],
            [parse_scalar(x, f"$.params.samples[{i}][1]") for x in s],
        ))
    s_slice = dec.scalars_param("s_slice", ["0"] * (lnf.orbit.r - 1))
    cert = limit_integrality(lnf, samples or None, s_slice)
    return _certificate_doc(cert), cert.holds


def _y_inf(dec: Decoded):
    name = dec.name_param("Y_inf")
    return dec.grading(name) if name else None


@command("zloc", "equation")
def _zloc_equation(dec: Decoded, opts: RunOptions) -> Result:
    lnf = dec.normal_form()
    system = defining_equation(lnf, _y_inf(dec))
    return {
        "verdict": system.verdict,
        "variables": system.variables,
        "equations": system.equations,
        "lambda": render_matrix(system.lam),
        "Y_inf": render_grading(system.y_inf),
        "alpha_in_q": system.alpha_in_q,
        "alpha_lowers_W": system.alpha_lowers_W,
    }, True


@command("zloc", "chain")
def _zloc_chain(dec: Decoded, opts: RunOptions) -> Result:
    lnf = dec.normal_form()
    z, s = _zs(dec, lnf.orbit.r)
    chain = derivation_chain(lnf, z, s, _y_inf(dec))
    return chain, chain["f_in_isotropy"] and chain["in_locus"] == chain["equation_vanishes"]


@command("zloc", "accumulation")
def _zloc_accumulation(dec: Decoded, opts: RunOptions) -> Result:
    cert = accumulation_verdict(dec.anf())
    return _certificate_doc(cert), True


# --------------- despacho -----------------
def run(
    group: str,
    action: str,
    problem: Union[str, bytes, Dict[str, Any]],
    options: Optional[RunOptions] = None,
) -> Tuple[Dict[str, Any], int]:
    """
    Executa um comando sobre um arquivo-problema. Nunca levanta HodgeError:
    devolve o documento com "error" e o código de saída correspondente.
    """
    options = options or RunOptions()
    name = f"{group} {action}"
    doc: Dict[str, Any] = {"command": name}
    handler = COMMANDS.get((group, action))
    try:
        if handler is None:
            raise InputError(f"comando desconhecido: {name}", {"available": available_commands()})
        decoded = Decoded(load_problem(problem), options.config)
        logger.info("executando %s (%s)", name, decoded.problem.name or "sem nome")
        result, positive = handler(decoded, options)
    except HodgeError as exc:
        logger.warning("%s: %s", name, exc.message)
        doc.update({"status": "error", "error": exc.to_dict(), "exit_code": exc.exit_code})
        return doc, exc.exit_code
    code = 0 if positive else 1
    doc.update({"status": "ok" if positive else "negative", "result": result, "exit_code": code})
    return doc, code
