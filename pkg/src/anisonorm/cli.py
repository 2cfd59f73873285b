"""Experiment runner: every subsystem behind one subcommand each.

Configs are JSON documents validated against per-subcommand schemas
(unknown keys rejected).  Exit codes: 0 success, 2 validation problem,
3 numerical guard trip.  Outputs are deterministic: fixed reduction
order, sorted keys, no wall-clock content.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

GRID_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["N", "L"],
    "properties": {
        "N": {"type": "array", "items": {"type": "integer", "minimum": 4}},
        "L": {"type": "array", "items": {"type": "number",
                                         "exclusiveMinimum": 0}},
        "time_axis": {"type": ["integer", "null"]},
    },
}

PARAMS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["s", "a", "p", "q", "kind"],
    "properties": {
        "s": {"type": "number"},
        "a": {"type": "array", "items": {"type": "number", "minimum": 1}},
        "p": {"type": "array", "items": {"type": ["number", "string"]}},
        "q": {"type": ["number", "string"]},
        "kind": {"enum": ["F", "B"]},
    },
}

SIGMA_BLOCK_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind", "axes"],
    "properties": {
        "kind": {"enum": ["identity", "rotation", "shear", "translation"]},
        "axes": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "angle": {"type": "number"},
        "strength": {"type": "number"},
        "center": {"type": "number"},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "delta": {"type": "array", "items": {"type": "number"}},
    },
}

SCHEMAS = {
    "norm": {
        "type": "object", "additionalProperties": False,
        "required": ["input", "params", "norms"],
        "properties": {
            "input": {"type": "string"},
            "params": PARAMS_SCHEMA,
            "norms": {"type": "array",
                      "items": {"enum": ["f", "b", "mixed"]}},
            "levels": {"type": ["integer", "null"]},
            "output": {"type": "string"},
        },
    },
    "decompose": {
        "type": "object", "additionalProperties": False,
        "required": ["input", "output_prefix"],
        "properties": {
            "input": {"type": "string"},
            "aniso": {"type": "array", "items": {"type": "number"}},
            "levels": {"type": ["integer", "null"]},
            "output_prefix": {"type": "string"},
        },
    },
    "kernels": {
        "type": "object", "additionalProperties": False,
        "required": ["grid", "aniso", "l_max", "side", "output_prefix"],
        "properties": {
            "grid": GRID_SCHEMA,
            "aniso": {"type": "array", "items": {"type": "number"}},
            "l_max": {"type": "integer", "minimum": 1},
            "side": {"enum": ["+", "-"]},
            "generator_grid": GRID_SCHEMA,
            "output_prefix": {"type": "string"},
        },
    },
    "extend": {
        "type": "object", "additionalProperties": False,
        "required": ["input", "side", "l_max", "J", "output"],
        "properties": {
            "input": {"type": "string"},
            "axis": {"type": "integer"},
            "side": {"enum": ["+", "-"]},
            "offset": {"type": "number"},
            "l_max": {"type": "integer", "minimum": 1},
            "J": {"type": "integer", "minimum": 0},
            "generator_grid": GRID_SCHEMA,
            "output": {"type": "string"},
            "report": {"type": "string"},
        },
    },
    "trace": {
        "type": "object", "additionalProperties": False,
        "required": ["input", "axis", "output"],
        "properties": {
            "input": {"type": "string"},
            "axis": {"type": ["integer", "string"]},
            "output": {"type": "string"},
        },
    },
    "rightinv": {
        "type": "object", "additionalProperties": False,
        "required": ["input", "mode", "grid", "aniso", "a_mod", "output"],
        "properties": {
            "input": {"type": "string"},
            "mode": {"enum": ["flat", "normal"]},
            "grid": GRID_SCHEMA,
            "aniso": {"type": "array", "items": {"type": "number"}},
            "a_mod": {"type": "number", "minimum": 1},
            "J": {"type": ["integer", "null"]},
            "profile_grid": GRID_SCHEMA,
            "output": {"type": "string"},
            "report": {"type": "string"},
        },
    },
    "qcheck": {
        "type": "object", "additionalProperties": False,
        "required": ["input", "l_max", "time_grid", "a_t", "J", "report"],
        "properties": {
            "input": {"type": "string"},
            "l_max": {"type": "integer", "minimum": 1},
            "time_grid": GRID_SCHEMA,
            "a_t": {"type": "number", "minimum": 1},
            "J": {"type": "integer", "minimum": 0},
            "delta": {"type": "number"},
            "generator_grid": GRID_SCHEMA,
            "output": {"type": "string"},
            "report": {"type": "string"},
        },
    },
    "invariance": {
        "type": "object", "additionalProperties": False,
        "required": ["input", "params", "sigma"],
        "properties": {
            "input": {"type": "string"},
            "params": PARAMS_SCHEMA,
            "sigma": {
                "type": "object", "additionalProperties": False,
                "required": ["blocks"],
                "properties": {"blocks": {"type": "array",
                                          "items": SIGMA_BLOCK_SCHEMA}},
            },
            "report": {"type": "string"},
        },
    },
    "compat": {
        "type": "object", "additionalProperties": False,
        "required": ["g", "phi", "u0", "params"],
        "properties": {
            "g": {"type": "string"},
            "phi": {"type": "string"},
            "u0": {"type": "string"},
            "params": PARAMS_SCHEMA,
            "l_cap": {"type": "integer", "minimum": 0},
            "report": {"type": "string"},
        },
    },
}


def _emit(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_exponent(x):
    if isinstance(x, str):
        if x.lower() in ("inf", "infinity"):
            return float("inf")
        raise ValueError(f"bad exponent {x!r}")
    return float(x)


def _params_from(doc: dict):
    from .anisotropy import Anisotropy, SpaceParams
    return SpaceParams(
        s=float(doc["s"]), aniso=Anisotropy(tuple(doc["a"])),
        p=tuple(_parse_exponent(x) for x in doc["p"]),
        q=_parse_exponent(doc["q"]), kind=doc["kind"],
    )


def _grid_from(doc: dict):
    from .grid import Grid
    return Grid(N=tuple(doc["N"]), L=tuple(doc["L"]),
                time_axis=doc.get("time_axis"))


def _default_gen_grid(doc: dict | None):
    from .grid import Grid
    if doc is not None:
        return _grid_from(doc)
    return Grid(N=(16384,), L=(13.0,))


def _cmd_norm(cfg: dict) -> int:
    from .agf import read_agf
    from .decomposition import b_norm, build_partition, f_norm
    from .grid import mixed_lp_norm
    u = read_agf(cfg["input"])
    params = _params_from(cfg["params"])
    out = {"input": cfg["input"]}
    levels = cfg.get("levels")
    part = None
    if any(n in cfg["norms"] for n in ("f", "b")):
        part = build_partition(params.aniso, levels, u.grid)
        out["levels"] = part.J
    for name in cfg["norms"]:
        if name == "f":
            out["f_norm"] = f_norm(u, params, part)
        elif name == "b":
            bp = params if params.kind == "B" else type(params)(
                s=params.s, aniso=params.aniso, p=params.p, q=params.q, kind="B")
            out["b_norm"] = b_norm(u, bp, part)
        else:
            out["mixed_lp_norm"] = mixed_lp_norm(u, params.p)
    _emit(out, cfg.get("output"))
    return 0


def _cmd_decompose(cfg: dict) -> int:
    from .agf import read_agf_full, write_agf
    from .anisotropy import Anisotropy
    from .decomposition import build_partition, lp_bands
    u, aniso = read_agf_full(cfg["input"])
    if "aniso" in cfg:
        aniso = Anisotropy(tuple(cfg["aniso"]))
    part = build_partition(aniso, cfg.get("levels"), u.grid)
    bands = lp_bands(u, part)
    prefix = Path(cfg["output_prefix"])
    summary = {"levels": part.J, "bands": []}
    for j, b in enumerate(bands.bands):
        p = prefix.with_suffix(f".band{j}.agf")
        write_agf(b, p, aniso)
        summary["bands"].append({"level": j, "path": str(p),
                                 "sup": b.sup_norm()})
    resid = (bands.resum() - u).sup_norm()
    summary["resum_residual_sup"] = resid
    _emit(summary, str(prefix.with_suffix(".json")))
    return 0


def _cmd_kernels(cfg: dict) -> int:
    from .anisotropy import Anisotropy
    from .kernels import (build_calderon_pair, build_generator, save_family,
                          verify_telescoping)
    grid = _grid_from(cfg["grid"])
    aniso = Anisotropy(tuple(cfg["aniso"]))
    gen = build_generator(cfg["l_max"], _default_gen_grid(cfg.get("generator_grid")))
    fam = build_calderon_pair(gen, aniso, grid, side=cfg["side"])
    save_family(fam, cfg["output_prefix"])
    report = {
        "l_max": fam.l_max,
        "side": fam.support_side,
        "support_leakage": fam.support_leakage,
        "generator_l1_mass": gen.l1_mass,
        "residual_moments": list(gen.residual_moments),
        "next_moment": gen.next_moment,
        "telescoping_residual": verify_telescoping(fam, 5),
    }
    _emit(report, str(Path(cfg["output_prefix"]).with_suffix(".report.json")))
    return 0


def _cmd_extend(cfg: dict) -> int:
    from .agf import read_agf_full, write_agf
    from .extension import HalfspaceFunction, rychkov_extend
    from .kernels import build_calderon_pair, build_generator
    u, aniso = read_agf_full(cfg["input"])
    f = HalfspaceFunction(u, axis=cfg.get("axis", u.grid.d - 1),
                          side=cfg["side"], offset=cfg.get("offset", 0.0))
    gen = build_generator(cfg["l_max"], _default_gen_grid(cfg.get("generator_grid")))
    opposite = "-" if f.side == "+" else "+"
    fam = build_calderon_pair(gen, aniso, u.grid, side=opposite, axis=f.axis)
    ext = rychkov_extend(f, fam, cfg["J"])
    write_agf(ext, cfg["output"], aniso)
    restr = (ext - f.known()).values
    import numpy as np
    x = u.grid.axis_points(f.axis)
    keep = x >= f.offset if f.side == "+" else x <= f.offset
    sl = tuple(keep if i == f.axis else slice(None) for i in range(u.grid.d))
    rep = {"J": cfg["J"], "l_max": cfg["l_max"],
           "restriction_residual_sup": float(np.abs(restr[sl]).max())}
    _emit(rep, cfg.get("report"))
    return 0


def _cmd_trace(cfg: dict) -> int:
    from .agf import read_agf_full, write_agf
    from .anisotropy import Anisotropy
    from .traces import hyperplane_trace, time_trace_r0
    u, aniso = read_agf_full(cfg["input"])
    if cfg["axis"] == "time":
        out = time_trace_r0(u)
        axis = u.grid.time_axis
    else:
        axis = int(cfg["axis"])
        out = hyperplane_trace(u, axis)
    new_a = tuple(a for i, a in enumerate(aniso.a) if i != axis % u.grid.d)
    write_agf(out, cfg["output"], Anisotropy(new_a))
    return 0


def _cmd_rightinv(cfg: dict) -> int:
    import numpy as np
    from .agf import read_agf, write_agf
    from .anisotropy import Anisotropy
    from .decomposition import build_partition
    from .traces import (build_eta, hyperplane_trace, k_flat, k_normal,
                         time_trace_r0)
    v = read_agf(cfg["input"])
    grid = _grid_from(cfg["grid"])
    aniso = Anisotropy(tuple(cfg["aniso"]))
    part = build_partition(aniso, cfg.get("J"), grid)
    profile = build_eta(_default_gen_grid(cfg.get("profile_grid"))
                        if cfg.get("profile_grid") else
                        _grid_from({"N": [1024], "L": [32.0]}))
    if cfg["mode"] == "flat":
        out = k_flat(v, profile, part, a_t=cfg["a_mod"], J=cfg.get("J"))
        retraced = time_trace_r0(out)
    else:
        out = k_normal(v, profile, part, a_n=cfg["a_mod"], J=cfg.get("J"))
        axis = grid.d - 2 if grid.time_axis is not None else grid.d - 1
        retraced = hyperplane_trace(out, axis)
    write_agf(out, cfg["output"], aniso)
    resid = float(np.abs(retraced.values - v.values).max())
    scale = max(v.sup_norm(), 1e-300)
    _emit({"mode": cfg["mode"], "J": part.J,
           "retrace_residual_sup": resid,
           "retrace_residual_rel": resid / scale}, cfg.get("report"))
    return 0


def _cmd_qcheck(cfg: dict) -> int:
    from .agf import read_agf_full, write_agf
    from .kernels import build_calderon_pair, build_generator, \
        calderon_reconstruct
    from .traces import build_eta, q_apply, support_report, time_trace_r0
    u, aniso = read_agf_full(cfg["input"])
    gen = build_generator(cfg["l_max"], _default_gen_grid(cfg.get("generator_grid")))
    fam = build_calderon_pair(gen, aniso, u.grid, side="+")
    profile = build_eta(_grid_from(cfg["time_grid"]))
    qu = q_apply(u, fam, profile, a_t=cfg["a_t"], J=cfg["J"])
    if cfg.get("output"):
        write_agf(qu, cfg["output"])
    rec = calderon_reconstruct(u, fam, cfg["J"])
    r0qu = time_trace_r0(qu)
    delta = cfg.get("delta", 4.0 * u.grid.h[fam.axis])
    rep_obj = support_report(u, qu, fam.axis, delta)
    import numpy as np
    rep = {
        "J": cfg["J"], "l_max": cfg["l_max"],
        "right_inverse_residual_sup":
            float(np.abs(r0qu.values - u.values).max()),
        "reconstruction_residual_sup":
            float(np.abs(rec.values - u.values).max()),
        "cross_check_sup": float(np.abs(r0qu.values - rec.values).max()),
        "support": {
            "applicable": rep_obj.applicable,
            "max_leakage": rep_obj.max_leakage,
            "threshold": rep_obj.threshold,
            "ok": rep_obj.ok,
            "delta": delta,
        },
    }
    _emit(rep, cfg["report"])
    return 0


def _sigma_from(doc: dict, d: int):
    from .diffeo import (StructuredDiffeo, identity_map, rotation_map,
                         shear_map, translation_map)
    blocks = []
    for b in doc["blocks"]:
        kind, axes = b["kind"], tuple(b["axes"])
        if kind == "identity":
            blocks.append(identity_map(axes))
        elif kind == "rotation":
            blocks.append(rotation_map(axes, angle=b["angle"]))
        elif kind == "shear":
            blocks.append(shear_map(axes, strength=b["strength"],
                                    center=b.get("center", 0.0),
                                    width=b.get("width", 1.0)))
        else:
            blocks.append(translation_map(axes, b["delta"]))
    return StructuredDiffeo(blocks=tuple(blocks))


def _cmd_invariance(cfg: dict) -> int:
    from .agf import read_agf
    from .decomposition import build_partition
    from .diffeo import invariance_report
    f = read_agf(cfg["input"])
    params = _params_from(cfg["params"])
    part = build_partition(params.aniso, None, f.grid)
    sigma = _sigma_from(cfg["sigma"], f.grid.d)
    ratio = invariance_report(f, sigma, params, part)
    _emit({"ratio": ratio, "levels": part.J}, cfg.get("report"))
    return 0


def _cmd_compat(cfg: dict) -> int:
    from .agf import read_agf
    from .compatibility import HeatData, admissible_l, compatibility_check
    params = _params_from(cfg["params"])
    data = HeatData(g=read_agf(cfg["g"]), phi=read_agf(cfg["phi"]),
                    u0=read_agf(cfg["u0"]), params=params)
    report = compatibility_check(data, cfg.get("l_cap", 3))
    doc = {
        "l_admissible": report.l_admissible,
        "l_evaluated": report.l_capped,
        "entries": [
            {"l": e.l, "admissible": e.admissible, "lhs_sup": e.lhs_sup,
             "rhs_sup": e.rhs_sup, "residual_sup": e.residual_sup,
             "residual_l2": e.residual_l2}
            for e in report.entries
        ],
    }
    _emit(doc, cfg.get("report"))
    return 0


def _selftest(freeze: bool) -> int:
    """Quick checks of every module's basic identities plus bracket upkeep."""
    import numpy as np
    from .anisotropy import Anisotropy, aniso_distance, dilate
    from .brackets import BracketStore, RELATIVE_BAND
    from .calibration import measure_all
    from .decomposition import build_partition
    from .grid import (Grid, GridFunction, convolve, dft, idft,
                       mixed_lp_norm, spectral_derivative, truncate_halfspace)

    rows = []

    def check(name, ok, detail=""):
        rows.append((name, bool(ok), detail))

    a = Anisotropy((1.0, 2.0))
    check("anisotropy.dilate_identity",
          np.allclose(dilate(1.0, a, (3.0, 5.0)), (3.0, 5.0)))
    check("anisotropy.distance_closed_form",
          abs(aniso_distance((0.0, 4.0), a) - 2.0) < 1e-10)
    check("anisotropy.distance_origin", aniso_distance((0.0, 0.0), a) == 0.0)

    grid = Grid(N=(32, 32), L=(4.0, 4.0))
    rng = np.random.default_rng(0)
    u = GridFunction(grid, rng.standard_normal(grid.shape)
                     + 1j * rng.standard_normal(grid.shape))
    check("grid.roundtrip",
          (idft(dft(u)) - u).sup_norm() <= 1e-12 * u.sup_norm())
    delta_vals = np.zeros(grid.shape)
    delta_vals[grid.N[0] // 2, grid.N[1] // 2] = 1.0 / np.prod(grid.h)
    delta = GridFunction(grid, delta_vals)
    check("grid.convolve_identity",
          (convolve(u, delta) - u).sup_norm() <= 1e-10 * u.sup_norm())
    ones = GridFunction(grid, np.ones(grid.shape))
    check("grid.mixed_norm_constant",
          abs(mixed_lp_norm(ones, (1.0, 1.0)) - 64.0) < 1e-10)
    check("grid.truncate_projection",
          (truncate_halfspace(truncate_halfspace(u, 0, "+"), 0, "+")
           - truncate_halfspace(u, 0, "+")).sup_norm() == 0.0)
    check("grid.derivative_zero_order",
          (spectral_derivative(u, (0, 0)) - u).sup_norm()
          <= 1e-12 * u.sup_norm())

    part = build_partition(Anisotropy((1.0, 1.0)), None, grid)
    check("decomposition.partition_of_unity",
          float(np.abs(part.partial_sum() - 1.0).max()) <= 1e-14)

    from .kernels import build_calderon_pair, build_generator, \
        verify_telescoping
    gen = build_generator(1, Grid(N=(16384,), L=(13.0,)))
    check("kernels.generator_mass", abs(gen.mass - 1.0) < 1e-12)
    check("kernels.generator_moment",
          max(gen.residual_moments) <= 1e-10 * gen.l1_mass)
    fam = build_calderon_pair(gen, Anisotropy((1.0,)),
                              Grid(N=(2048,), L=(13.0,)), side="-")
    check("kernels.telescoping", verify_telescoping(fam, 4) <= 1e-11)
    check("kernels.psi0_hat_at_zero",
          abs(fam.psi_hat_level(0).ravel()[0] - 1.0) < 1e-10)

    from .traces import build_eta
    profile = build_eta(Grid(N=(1024,), L=(32.0,)))
    t0 = profile.grid.N[0] // 2
    check("traces.eta_unit_value",
          abs(profile.eta.values[t0] - 1.0) < 1e-12)

    from .anisotropy import SpaceParams
    from .decomposition import validate_trace_conditions
    p = SpaceParams(s=2.0, aniso=Anisotropy((1.0, 1.0, 2.0)),
                    p=(2.0, 2.0, 2.0), q=2.0, kind="F")
    check("decomposition.trace_condition_r0",
          validate_trace_conditions(p, "r0")["threshold"] == 1.0)

    from .compatibility import admissible_l
    p4 = SpaceParams(s=4.0, aniso=Anisotropy((1.0, 1.0, 2.0)),
                     p=(2.0, 2.0, 2.0), q=2.0, kind="F")
    check("compatibility.admissible_l_example", admissible_l(p4) == 1)

    store = BracketStore.load()
    if freeze:
        measured = measure_all()
        for k, v in measured.items():
            store.set(k, v)
        store.save()
        for k, v in sorted(measured.items()):
            check(f"bracket.{k}", True, f"frozen {v:.6g}")
    else:
        measured = measure_all()
        for k, v in sorted(measured.items()):
            try:
                ok, frozen = store.check(k, v)
                check(f"bracket.{k}", ok,
                      f"measured {v:.6g} frozen {frozen:.6g} "
                      f"band +-{int(RELATIVE_BAND * 100)}%")
            except Exception as e:
                check(f"bracket.{k}", False, str(e))

    width = max(len(r[0]) for r in rows)
    failures = 0
    for name, ok, detail in rows:
        status = "pass" if ok else "FAIL"
        if not ok:
            failures += 1
        line = f"{name:<{width}}  {status}"
        if detail:
            line += f"  {detail}"
        print(line)
    print(f"{len(rows) - failures}/{len(rows)} checks passed")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="anisonorm",
        description="anisotropic mixed-norm calculus experiment runner",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="cap worker threads for numerical backends")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SCHEMAS:
        p = sub.add_parser(name)
        p.add_argument("config", help="path to the JSON experiment config")
    st = sub.add_parser("selftest")
    st.add_argument("--freeze", action="store_true",
                    help="measure and write the bracket store")
    args = parser.parse_args(argv)

    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    from . import errors as err

    try:
        if args.command == "selftest":
            return _selftest(args.freeze)
        try:
            cfg = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            print(f"config not found: {args.config}", file=sys.stderr)
            return 2
        except json.JSONDecodeError as e:
            print(f"config is not valid JSON: {e}", file=sys.stderr)
            return 2
        import jsonschema
        try:
            jsonschema.validate(cfg, SCHEMAS[args.command])
        except jsonschema.ValidationError as e:
            print(f"config schema violation: {e.message}", file=sys.stderr)
            return 2
        handler = {
            "norm": _cmd_norm,
            "decompose": _cmd_decompose,
            "kernels": _cmd_kernels,
            "extend": _cmd_extend,
            "trace": _cmd_trace,
            "rightinv": _cmd_rightinv,
            "qcheck": _cmd_qcheck,
            "invariance": _cmd_invariance,
            "compat": _cmd_compat,
        }[args.command]
        return handler(cfg)
    except err.NumericalGuardError as e:
        print(f"numerical guard: {e}", file=sys.stderr)
        return 3
    except err.ValidationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"missing file: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
