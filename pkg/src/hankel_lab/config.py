"""JSON run configurations: strict schema, defaults and up-front validation.

Top-level keys::

    experiment      trace_H | trace_T | count | hs_norm | wilf | identity_suite | growth_suite
    lambda_domain   domain object ({"shape": "interval", "lo": 0, "hi": 1}, ...), null for wilf
    omega_domain    domain object, null for wilf
    symbol          number, list of {"f": ..., "phi": ...} terms, {"a": ..., "b": ...} for
                    growth_suite, or the kernel block {"kernel": "carleman", "a_lo": 1, ...}
                    for wilf
    g               {"type": "monomial", "p": 2}, {"type": "polynomial", "coefficients": [...]}
                    or {"type": "indicator_above", "lambda": 0.25}; trace_T also takes
                    "weight" (a symbol); wilf takes a list of thresholds in "lambda"
    alphas          strictly increasing list (the upper ends b for wilf); identity_suite
                    entries may be {"alpha": ..., "lambda_domain": ..., "omega_domain": ...}
    grid            {"L", "margin", "m", "oversample", "N", "snap_L", "gate_tol"}
    output          {"dir", "dump", "plot"}
    checks          optional: {"tolerance": {"A": ..., "D": ...}, "constant", "drift_window",
                    "drift_tol", "ratio_limit", "identity_tol"}

Unknown keys anywhere are rejected with their path.
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass, field

from .coefficients import IndicatorAbove, Monomial, Polynomial, test_function_from_spec
from .errors import ConfigParseError, InputError, PreconditionError, SchemaError
from .geometry import domain_from_spec
from .operators.grid import GridPolicy, check_nyquist, check_padding
from .symbols import symbol_from_spec

EXPERIMENTS = ("trace_H", "trace_T", "count", "hs_norm", "wilf", "identity_suite", "growth_suite")
TOP_KEYS = ("experiment", "lambda_domain", "omega_domain", "symbol", "g", "alphas", "grid",
            "output")
OPTIONAL_TOP = ("checks",)

GRID_DEFAULTS = {"L": 2.0, "margin": 0.8, "m": 256, "oversample": 1.0, "N": None,
                 "snap_L": True, "gate_tol": 0.005}
OUTPUT_DEFAULTS = {"dir": "out", "dump": False, "plot": True}
CHECK_DEFAULTS = {"tolerance": {}, "constant": None, "drift_window": 2.0, "drift_tol": 0.15,
                  "ratio_limit": 2.0, "identity_tol": 1e-9}
KERNEL_DEFAULTS = {"kernel": "carleman", "a_lo": 1.0, "nodes_per_panel": 16, "panel_ratio": 2.0}
DOMAIN_KEYS = {
    "interval": ({"shape", "lo", "hi"}, {"shape", "lo", "hi"}),
    "disk": ({"shape"}, {"shape", "r", "center"}),
    "box": ({"shape", "lo", "hi"}, {"shape", "lo", "hi"}),
    "star": ({"shape", "c0"}, {"shape", "c0", "cos", "sin", "center"}),
}
FUNCTION_KEYS = {
    "const": ({"kind"}, {"kind", "value"}),
    "bump": ({"kind", "center", "radius"}, {"kind", "center", "radius", "height"}),
    "gaussian": ({"kind", "center", "width"}, {"kind", "center", "width", "height"}),
}


@dataclass
class RunConfig:
    """Validated configuration plus run options."""

    experiment: str
    settings: dict
    out_dir: str
    deterministic: bool = False
    verbose: bool = False
    sweep: object = None
    instances: list = field(default_factory=list)
    growth: dict = field(default_factory=dict)
    policy: GridPolicy | None = None

    def echo(self):
        """The normalised document, defaults filled in."""
        return copy.deepcopy(self.settings)


# --------------------------------------------------------------------------
# schema


def _fail(path, msg):
    raise SchemaError(f"{path}: {msg}")


def _expect(value, types, path, what):
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        _fail(path, f"expected {what}")
    if not isinstance(value, types):
        _fail(path, f"expected {what}, got {type(value).__name__}")


def _number(value, path, positive=False, integer=False):
    _expect(value, (int, float) if not integer else int, path,
            "an integer" if integer else "a number")
    if not math.isfinite(value):
        _fail(path, "must be finite")
    if positive and value <= 0:
        _fail(path, "must be positive")
    return value


def _keys(obj, path, required, allowed):
    _expect(obj, dict, path, "an object")
    for k in obj:
        if k not in allowed:
            _fail(f"{path}.{k}", "unknown key")
    for k in required:
        if k not in obj:
            _fail(f"{path}.{k}", "missing required key")


def _domain(spec, path):
    _expect(spec, dict, path, "a domain object")
    shape = spec.get("shape")
    if shape not in DOMAIN_KEYS:
        _fail(f"{path}.shape", f"unknown shape {shape!r}")
    _keys(spec, path, *DOMAIN_KEYS[shape])
    try:
        return domain_from_spec(spec)
    except (InputError, TypeError, ValueError) as exc:
        raise PreconditionError(f"{path}: {exc}") from None


def _function(spec, path):
    _expect(spec, dict, path, "a function object")
    kind = spec.get("kind")
    if kind not in FUNCTION_KEYS:
        _fail(f"{path}.kind", f"unknown kind {kind!r}")
    _keys(spec, path, *FUNCTION_KEYS[kind])


def _symbol(spec, path, dimension):
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        _number(spec, path)
        return symbol_from_spec(float(spec), dimension)
    _expect(spec, list, path, "a number or a list of terms")
    if not spec:
        _fail(path, "needs at least one term")
    for i, term in enumerate(spec):
        _keys(term, f"{path}[{i}]", {"f", "phi"}, {"f", "phi"})
        _function(term["f"], f"{path}[{i}].f")
        _function(term["phi"], f"{path}[{i}].phi")
    try:
        return symbol_from_spec(spec, dimension)
    except (InputError, TypeError, ValueError) as exc:
        raise PreconditionError(f"{path}: {exc}") from None


def _test_function(spec, path, experiment):
    _expect(spec, dict, path, "a test-function object")
    kind = spec.get("type")
    allowed = {
        "monomial": ({"type", "p"}, {"type", "p", "weight"}),
        "polynomial": ({"type", "coefficients"}, {"type", "coefficients", "weight"}),
        "indicator_above": ({"type", "lambda"}, {"type", "lambda"}),
    }
    if kind not in allowed:
        _fail(f"{path}.type", f"unknown type {kind!r}")
    _keys(spec, path, *allowed[kind])
    if "weight" in spec and experiment != "trace_T":
        _fail(f"{path}.weight", "only trace_T takes a weight")
    if kind == "indicator_above":
        lam = spec["lambda"]
        if experiment == "wilf":
            lams = lam if isinstance(lam, list) else [lam]
            if not lams:
                _fail(f"{path}.lambda", "needs at least one threshold")
            for i, v in enumerate(lams):
                _number(v, f"{path}.lambda[{i}]", positive=True)
            return tuple(float(v) for v in lams)
        _number(lam, f"{path}.lambda", positive=True)
        return IndicatorAbove(float(lam))
    if kind == "monomial":
        _number(spec["p"], f"{path}.p", positive=True, integer=True)
    else:
        _expect(spec["coefficients"], list, f"{path}.coefficients", "a list")
        for i, c in enumerate(spec["coefficients"]):
            _number(c, f"{path}.coefficients[{i}]")
    try:
        return test_function_from_spec({k: v for k, v in spec.items() if k != "weight"})
    except (InputError, TypeError, ValueError) as exc:
        raise PreconditionError(f"{path}: {exc}") from None


def _grid(spec, path):
    spec = {} if spec is None else spec
    _keys(spec, path, set(), set(GRID_DEFAULTS))
    out = dict(GRID_DEFAULTS)
    out.update(spec)
    _number(out["L"], f"{path}.L", positive=True)
    _number(out["margin"], f"{path}.margin", positive=True)
    if out["margin"] > 1:
        _fail(f"{path}.margin", "must not exceed 1")
    _number(out["m"], f"{path}.m", positive=True, integer=True)
    _number(out["oversample"], f"{path}.oversample", positive=True)
    if out["oversample"] < 1:
        _fail(f"{path}.oversample", "must be at least 1")
    if out["N"] is not None:
        _number(out["N"], f"{path}.N", positive=True, integer=True)
        if out["N"] < 2 or out["N"] & (out["N"] - 1):
            _fail(f"{path}.N", "must be a power of two")
    _expect(out["snap_L"], bool, f"{path}.snap_L", "a boolean")
    _number(out["gate_tol"], f"{path}.gate_tol", positive=True)
    out["L"] = float(out["L"])
    out["margin"] = float(out["margin"])
    out["oversample"] = float(out["oversample"])
    out["gate_tol"] = float(out["gate_tol"])
    return out


def _output(spec, path):
    spec = {} if spec is None else spec
    _keys(spec, path, set(), set(OUTPUT_DEFAULTS))
    out = dict(OUTPUT_DEFAULTS)
    out.update(spec)
    _expect(out["dir"], str, f"{path}.dir", "a string")
    _expect(out["dump"], bool, f"{path}.dump", "a boolean")
    _expect(out["plot"], bool, f"{path}.plot", "a boolean")
    return out


def _checks(spec, path):
    spec = {} if spec is None else spec
    _keys(spec, path, set(), set(CHECK_DEFAULTS))
    out = copy.deepcopy(CHECK_DEFAULTS)
    out.update(spec)
    _expect(out["tolerance"], dict, f"{path}.tolerance", "an object")
    for k, v in out["tolerance"].items():
        if k not in ("A", "D"):
            _fail(f"{path}.tolerance.{k}", "unknown key")
        _number(v, f"{path}.tolerance.{k}", positive=True)
    if out["constant"] is not None:
        _expect(out["constant"], bool, f"{path}.constant", "a boolean or null")
    for k in ("drift_window", "drift_tol", "ratio_limit", "identity_tol"):
        _number(out[k], f"{path}.{k}", positive=True)
    return out


def _alphas(values, path, minimum, lower=1.0):
    _expect(values, list, path, "a list")
    for i, v in enumerate(values):
        _number(v, f"{path}[{i}]")
        if v < lower:
            _fail(f"{path}[{i}]", f"must be >= {lower:g}")
    if any(b <= a for a, b in zip(values, values[1:])):
        _fail(path, "must be strictly increasing")
    if len(values) < minimum:
        _fail(path, f"needs at least {minimum} entries for the fit, got {len(values)}")
    return [float(v) for v in values]


# --------------------------------------------------------------------------
# loading


def parse_config(doc, out_dir=None, deterministic=False, verbose=False) -> RunConfig:
    """Validate a decoded JSON document; every check runs before any computation."""
    from .asymptotics.suites import Instance
    from .asymptotics.sweeps import FitSettings, SweepConfig, WilfSettings

    _expect(doc, dict, "$", "an object")
    for k in doc:
        if k not in TOP_KEYS + OPTIONAL_TOP:
            _fail(f"$.{k}", "unknown key")
    for k in TOP_KEYS:
        if k not in doc:
            _fail(f"$.{k}", "missing required key")
    exp = doc["experiment"]
    if exp not in EXPERIMENTS:
        _fail("$.experiment", f"must be one of {', '.join(EXPERIMENTS)}")
    grid = _grid(doc["grid"], "$.grid")
    output = _output(doc["output"], "$.output")
    checks = _checks(doc.get("checks"), "$.checks")
    policy = GridPolicy(L=grid["L"], margin=grid["margin"], oversample=grid["oversample"],
                        N=grid["N"], snap_L=grid["snap_L"], m=grid["m"],
                        gate_tol=grid["gate_tol"])
    settings = {k: copy.deepcopy(doc[k]) for k in TOP_KEYS}
    settings.update(grid=grid, output=output, checks=checks)
    fit = FitSettings(constant=checks["constant"], tolerance=dict(checks["tolerance"]),
                      drift_window=float(checks["drift_window"]),
                      drift_tol=float(checks["drift_tol"]))
    run = RunConfig(exp, settings, out_dir or output["dir"], deterministic, verbose,
                    policy=policy)

    if exp == "wilf":
        for k in ("lambda_domain", "omega_domain"):
            if doc[k] is not None:
                _fail(f"$.{k}", "must be null for wilf")
        kspec = doc["symbol"]
        _keys(kspec, "$.symbol", {"kernel"}, set(KERNEL_DEFAULTS))
        ker = dict(KERNEL_DEFAULTS)
        ker.update(kspec)
        if ker["kernel"] != "carleman":
            _fail("$.symbol.kernel", "only the carleman kernel can be configured")
        _number(ker["a_lo"], "$.symbol.a_lo")
        if ker["a_lo"] <= 0:
            raise PreconditionError("$.symbol.a_lo: the Carleman kernel needs a_lo > 0")
        _number(ker["nodes_per_panel"], "$.symbol.nodes_per_panel", positive=True, integer=True)
        _number(ker["panel_ratio"], "$.symbol.panel_ratio", positive=True)
        if ker["panel_ratio"] <= 1:
            _fail("$.symbol.panel_ratio", "must exceed 1")
        settings["symbol"] = ker
        lams = _test_function(doc["g"], "$.g", exp)
        if not isinstance(lams, tuple):
            _fail("$.g.type", "wilf needs indicator_above thresholds")
        bs = _alphas(doc["alphas"], "$.alphas", 4, lower=0.0)
        if bs[0] <= ker["a_lo"]:
            raise PreconditionError("$.alphas: every b must exceed a_lo")
        wilf = WilfSettings(float(ker["a_lo"]), "carleman", int(ker["nodes_per_panel"]),
                            float(ker["panel_ratio"]), lams)
        run.sweep = SweepConfig("wilf", alphas=tuple(bs), policy=policy, wilf=wilf, fit=fit)
        return run

    if exp == "identity_suite":
        run.instances = _identity_instances(doc, policy, Instance)
        return run

    lam = _domain(doc["lambda_domain"], "$.lambda_domain")
    omega = _domain(doc["omega_domain"], "$.omega_domain")
    if lam.dimension != omega.dimension:
        raise PreconditionError("$.omega_domain: dimension differs from lambda_domain")
    d = lam.dimension

    if exp == "growth_suite":
        sspec = doc["symbol"]
        _keys(sspec, "$.symbol", {"a", "b"}, {"a", "b"})
        a = _symbol(sspec["a"], "$.symbol.a", d)
        b = _symbol(sspec["b"], "$.symbol.b", d)
        if d != 1:
            raise PreconditionError("$.lambda_domain: the growth suite runs in one dimension")
        alphas = _alphas(doc["alphas"], "$.alphas", 2)
        if doc["g"] is not None:
            _fail("$.g", "must be null for growth_suite")
        xi = max([omega.max_abs()] + [s.xi_support() for s in (a, b)
                                      if math.isfinite(s.xi_support())])
        for i, al in enumerate(alphas):
            _grid_preconditions(policy, al, d, xi, omega.max_abs(),
                                [lam.max_abs(), a.x_support(), b.x_support()],
                                f"$.alphas[{i}]", gate=False)
        run.growth = {"alphas": tuple(alphas), "symbols": (a, b), "lam": lam, "omega": omega,
                      "policy": policy, "ratio_limit": float(checks["ratio_limit"]),
                      "drift_tol": float(checks["drift_tol"]),
                      "drift_window": float(checks["drift_window"])}
        return run

    a = _symbol(doc["symbol"], "$.symbol", d)
    g = _test_function(doc["g"], "$.g", exp)
    weight = None
    threshold = None
    if exp == "count":
        if not isinstance(g, IndicatorAbove):
            _fail("$.g.type", "count needs indicator_above")
        threshold = g.lam
    elif exp == "trace_T":
        if not isinstance(g, (Monomial, Polynomial)):
            _fail("$.g.type", "trace_T needs a polynomial test function")
        if "weight" in doc["g"]:
            weight = _symbol(doc["g"]["weight"], "$.g.weight", d)
    elif exp == "hs_norm":
        if not (isinstance(g, Monomial) and g.p == 2):
            _fail("$.g", "hs_norm measures the squared Hilbert-Schmidt norm; use monomial p=2")
    elif isinstance(g, IndicatorAbove):
        _fail("$.g.type", "trace_H needs a monomial or polynomial test function")
    alphas = _alphas(doc["alphas"], "$.alphas", 4)
    xi = max([omega.max_abs()] + [s.xi_support() for s in (a, weight) if s is not None
                                  and math.isfinite(s.xi_support())])
    extents = [lam.max_abs(), a.x_support()] + ([weight.x_support()] if weight else [])
    for i, al in enumerate(alphas):
        _grid_preconditions(policy, al, d, xi, omega.max_abs(), extents, f"$.alphas[{i}]")
    run.sweep = SweepConfig(exp, lam, omega, a, g, tuple(alphas), policy, weight=weight,
                            threshold=threshold, fit=fit)
    return run


def _grid_preconditions(policy, alpha, d, xi_max, band_edge, extents, path, gate=True):
    try:
        for refine in (1, 2) if gate else (1,):
            g = policy.grid(alpha, d, xi_max, band_edge, refine)
            check_nyquist(g, xi_max, policy.margin)
            check_padding(g, *extents)
    except InputError as exc:
        raise PreconditionError(f"{path} (alpha = {alpha:g}): {exc}") from None


def _identity_instances(doc, policy, Instance):
    if doc["g"] is not None:
        _fail("$.g", "must be null for identity_suite")
    base_lam = doc["lambda_domain"]
    base_om = doc["omega_domain"]
    entries = doc["alphas"]
    _expect(entries, list, "$.alphas", "a list")
    if not entries:
        _fail("$.alphas", "needs at least one instance")
    out = []
    for i, e in enumerate(entries):
        path = f"$.alphas[{i}]"
        if isinstance(e, dict):
            _keys(e, path, {"alpha"}, {"alpha", "lambda_domain", "omega_domain"})
            alpha = e["alpha"]
            lspec = e.get("lambda_domain", base_lam)
            ospec = e.get("omega_domain", base_om)
        else:
            alpha, lspec, ospec = e, base_lam, base_om
        _number(alpha, f"{path}.alpha" if isinstance(e, dict) else path)
        if alpha < 1:
            _fail(path, "alpha must be >= 1")
        lam = _domain(lspec, f"{path}.lambda_domain")
        om = _domain(ospec, f"{path}.omega_domain")
        if lam.dimension != om.dimension:
            raise PreconditionError(f"{path}: domain dimensions differ")
        a = _symbol(doc["symbol"], "$.symbol", lam.dimension)
        xi = max(om.max_abs(), a.xi_support() if math.isfinite(a.xi_support()) else 0.0)
        _grid_preconditions(policy, float(alpha), lam.dimension, xi, om.max_abs(),
                            [lam.max_abs(), a.x_support()], path, gate=False)
        name = f"d{lam.dimension}_alpha{float(alpha):g}"
        out.append(Instance(name, lam, om, float(alpha), a))
    return out


def load_config(path, out_dir=None, deterministic=False, verbose=False) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{os.fspath(path)}: line {exc.lineno} column {exc.colno}: "
                               f"{exc.msg}") from None
    return parse_config(doc, out_dir, deterministic, verbose)
