"""Batch front door: parse a walk configuration, run diagnostics, emit results.

Every command is a thin composition of library calls.  Output is bit-stable:
floats are printed with 17 significant digits, rows come in a fixed order,
and the experiment probes use a fixed seed, so identical configs produce
byte-identical files.

Exit codes: 0 success, 2 malformed configuration, 3 unsupported combination,
4 unwritable destination.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import catalog, ergodicity, walks
from .blocks import random_positive, spectral_decomposition, support_of_positive
from .groups import build_group, s3_standard_integral
from .hopf import UnsupportedError

SCHEMA_VERSION = 1

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["group", "state"],
    "properties": {
        "schema": {"const": 1},
        "kmax": {"type": "integer", "minimum": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "group": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {
                "classical": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "family": {"enum": ["cyclic", "symmetric", "dihedral"]},
                        "n": {"type": "integer", "minimum": 1},
                        "cayley_file": {"type": "string"},
                    },
                },
                "dual": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["family", "n"],
                    "properties": {
                        "family": {"enum": ["cyclic", "symmetric"]},
                        "n": {"type": "integer", "minimum": 1},
                    },
                },
                "kac_paljutkin": {"type": "object", "additionalProperties": False},
            },
        },
        "state": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {
                "point": {"type": ["string", "integer"]},
                "uniform": {"type": "array", "items": {"type": ["string", "integer"]},
                            "minItems": 1},
                "weights": {"type": "object"},
                "positive_definite": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["rep", "xi"],
                    "properties": {"rep": {"type": "string"}, "xi": {"type": "array"}},
                },
                "density": {"type": "array"},
                "central": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["coefficients"],
                    "properties": {"coefficients": {"type": "object"}},
                },
            },
        },
    },
}


class ConfigError(Exception):
    exit_code = 2


class UnsupportedCombination(Exception):
    exit_code = 3


def _as_complex(value, where):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) for v in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number or an [re, im] pair, got {value!r}")


def parse_config(source):
    """Validate a config (dict, JSON text, or path) against the documented schema."""
    if isinstance(source, dict):
        raw = source
    else:
        text = source
        if not source.lstrip().startswith("{"):
            try:
                with open(source) as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}")
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: line {exc.lineno}: {exc.msg}")
    try:
        import jsonschema

        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "(top level)"
        raise ConfigError(f"config field {path}: {exc.message}")
    return raw


def build_quantum_group(group_spec):
    if "kac_paljutkin" in group_spec:
        return catalog.kac_paljutkin()
    if "classical" in group_spec:
        g = group_spec["classical"]
        if "cayley_file" in g:
            if "family" in g or "n" in g:
                raise ConfigError("classical group: give a family or a cayley_file, not both")
            try:
                with open(g["cayley_file"]) as fh:
                    payload = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot load cayley_file: {exc}")
            table = payload["table"] if isinstance(payload, dict) else payload
            try:
                return catalog.function_algebra(build_group("cayley", table=table))
            except Exception as exc:
                raise ConfigError(f"invalid Cayley table: {exc}")
        if "family" not in g or "n" not in g:
            raise ConfigError("classical group needs a family and n, or a cayley_file")
        try:
            return catalog.function_algebra(build_group(g["family"], n=g["n"]))
        except Exception as exc:
            raise ConfigError(f"cannot build classical group: {exc}")
    g = group_spec["dual"]
    try:
        return catalog.group_algebra(build_group(g["family"], n=g["n"]))
    except Exception as exc:
        raise UnsupportedCombination(f"cannot build the dual entry: {exc}")


def _resolve_rep(dual, name):
    real = dual.realization
    group = real.group
    if name == "permutation" and group.perms is not None:
        mats = []
        for p in group.perms:
            m = np.zeros((len(p), len(p)))
            for i, x in enumerate(p):
                m[x, i] = 1.0
            mats.append(m)
        return mats, True
    if name == "standard_integral" and group.label == "S3":
        return s3_standard_integral(group), False
    if name.startswith("character:") and group.label.startswith("C"):
        k = int(name.split(":", 1)[1])
        omega = np.exp(2j * np.pi / group.order)
        return [np.array([[omega ** (k * g)]]) for g in range(group.order)], True
    for irr in real.irreps.irreps:
        if irr.name == name:
            return irr.matrices, True
    raise UnsupportedCombination(f"unknown representation {name!r} for {group.label}")


def build_state(qgroup, state_spec, norm_gate=1e-3):
    """Resolve a state spec against a catalog entry."""
    real = qgroup.realization
    kind = next(iter(state_spec))
    payload = state_spec[kind]
    if kind in ("point", "uniform", "weights"):
        if not isinstance(real, catalog.ClassicalRealization):
            raise UnsupportedCombination(f"{kind} states live on classical entries")
        if kind == "weights":
            payload = {k: float(v) for k, v in payload.items()}
        try:
            return catalog.classical_state(qgroup, (kind, payload))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"invalid {kind} state: {exc}")
    if kind == "positive_definite":
        if not isinstance(real, catalog.DualRealization):
            raise UnsupportedCombination("positive_definite states live on dual entries")
        mats, unitary = _resolve_rep(qgroup, payload["rep"])
        xi = np.array([_as_complex(v, "xi") for v in payload["xi"]])
        if xi.shape[0] != mats[0].shape[0]:
            raise ConfigError(
                f"xi has length {len(xi)} but the representation acts on C^{mats[0].shape[0]}"
            )
        nrm = np.linalg.norm(xi)
        if abs(nrm - 1.0) > norm_gate:
            raise ConfigError(f"xi norm {nrm:.6f} is too far from 1 to auto-normalize")
        xi = xi / nrm
        if unitary:
            return catalog.state_from_positive_definite(qgroup, mats, xi)
        values = np.array([np.vdot(xi, m @ xi) for m in mats])
        return catalog.dual_state_from_values(qgroup, values, check=False,
                                              label=payload["rep"])
    if kind == "density":
        coords = np.array([_as_complex(v, "density") for v in payload])
        if coords.shape[0] != qgroup.dim:
            raise ConfigError(
                f"density has {len(coords)} coordinates, the algebra needs {qgroup.dim}"
            )
        try:
            return walks.WalkState.from_density(qgroup, qgroup.structure.from_coords(coords))
        except Exception as exc:
            raise ConfigError(f"invalid density: {exc}")
    if kind == "central":
        coeffs = {k: _as_complex(v, f"coefficients[{k}]") for k, v in payload["coefficients"].items()}
        if isinstance(real, catalog.DualRealization):
            g = real.group
            coords = qgroup.structure.zero().coords().copy()
            for name, c in coeffs.items():
                try:
                    coords = coords + c * real.basis[:, g.index_of(name)]
                except KeyError as exc:
                    raise ConfigError(str(exc))
            try:
                return walks.WalkState.from_density(qgroup, qgroup.structure.from_coords(coords))
            except Exception as exc:
                raise ConfigError(f"coefficients do not give a state: {exc}")
        if isinstance(real, catalog.ClassicalRealization) and real.irreps is not None:
            density = qgroup.structure.zero()
            names = {r.name: r for r in real.irreps.irreps}
            for name, c in coeffs.items():
                if name not in names:
                    raise ConfigError(f"unknown character {name!r}")
                density = density + c * qgroup.structure.from_coords(names[name].character())
            try:
                return walks.WalkState.from_density(qgroup, density)
            except Exception as exc:
                raise ConfigError(f"coefficients do not give a state: {exc}")
        raise UnsupportedCombination("central states need character data for the entry")
    raise ConfigError(f"unknown state kind {kind!r}")


# -- serialization -----------------------------------------------------------------


def _fmt(x):
    return format(float(x), ".17g")


def _pair(z):
    return [_fmt(z.real), _fmt(z.imag)]


def _coords_json(element):
    return [_pair(z) for z in element.coords()]


def emit(text, destination, filename):
    """Write the rendered payload; stdout when no output directory was given."""
    if destination is None:
        sys.stdout.write(text)
        return None
    try:
        os.makedirs(destination, exist_ok=True)
        path = os.path.join(destination, filename)
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        raise SystemExit(4)
    return path


def _json_text(payload):
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


# -- commands ----------------------------------------------------------------------


def cmd_describe(qgroup, state, args):
    report = qgroup.verify_axioms()
    payload = {
        "schema": SCHEMA_VERSION,
        "label": qgroup.label,
        "block_dims": list(qgroup.structure.dims),
        "hopf_residuals": {k: _fmt(v) for k, v in report.residuals.items()},
        "max_residual": _fmt(report.max_residual),
        "haar_block_weights": [_fmt(w) for w in qgroup.haar_weights],
        "haar_element": _coords_json(qgroup.haar_element),
    }
    return _json_text(payload), "describe.json"


def cmd_trace(qgroup, state, args):
    rows = walks.distances_to_random(state, args.kmax)
    if args.format == "json":
        payload = {
            "schema": SCHEMA_VERSION,
            "rows": [{"k": k, "tv": _fmt(tv), "l2": _fmt(l2), "qsd": _fmt(qsd)}
                     for k, tv, l2, qsd in rows],
        }
        return _json_text(payload), "trace.json"
    lines = ["k,tv,l2,qsd"]
    for k, tv, l2, qsd in rows:
        lines.append(f"{k},{_fmt(tv)},{_fmt(l2)},{_fmt(qsd)}")
    return "\n".join(lines) + "\n", "trace.csv"


def cmd_verdict(qgroup, state, args):
    verdict = ergodicity.classify(state)
    payload = {
        "schema": SCHEMA_VERSION,
        "tag": verdict.tag,
        "peripheral": [_pair(z) for z in verdict.peripheral],
        "spectrum": [_pair(z) for z in verdict.spectrum],
        "cesaro_support": _coords_json(verdict.cesaro_support),
        "tv_samples": [[k, _fmt(tv)] for k, tv in verdict.tv_samples],
    }
    if verdict.tag == "reducible":
        payload["quasi_subgroup"] = _coords_json(verdict.quasi_subgroup)
    if verdict.tag == "periodic":
        payload["d"] = verdict.partition.period
        payload["partition"] = [_coords_json(p) for p in verdict.partition.projections]
    return _json_text(payload), "verdict.json"


def cmd_spectrum(qgroup, state, args):
    T = walks.stochastic_operator(state)
    ev = T.eigenvalues
    cluster_tol = args.tol if args.tol is not None else 1e-8
    clusters = []
    for z in ev:
        for c in clusters:
            if abs(c["value"] - z) <= cluster_tol:
                c["mult"] += 1
                break
        else:
            clusters.append({"value": z, "mult": 1})
    if args.format == "json":
        payload = {
            "schema": SCHEMA_VERSION,
            "eigenvalues": [
                {"re": _fmt(c["value"].real), "im": _fmt(c["value"].imag),
                 "multiplicity": c["mult"]}
                for c in clusters
            ],
        }
        return _json_text(payload), "spectrum.json"
    lines = ["re,im,multiplicity"]
    for c in clusters:
        lines.append(f"{_fmt(c['value'].real)},{_fmt(c['value'].imag)},{c['mult']}")
    return "\n".join(lines) + "\n", "spectrum.csv"


def cmd_grouplikes(qgroup, state, args):
    try:
        projections = qgroup.find_group_like_projections()
    except UnsupportedError as exc:
        raise UnsupportedCombination(str(exc))
    entries = []
    for p in projections:
        entries.append({
            "coords": _coords_json(p),
            "central": ergodicity.quasi_subgroup_is_subgroup(qgroup, p),
            "haar_mass": _fmt(qgroup.haar(p).real),
        })
    payload = {"schema": SCHEMA_VERSION, "count": len(entries), "projections": entries}
    return _json_text(payload), "grouplikes.json"


def cmd_experiment(qgroup, state, args):
    """Numeric probes for the open questions; reported, never asserted."""
    rng = np.random.default_rng(0)
    payload = {"schema": SCHEMA_VERSION}

    verdict = ergodicity.classify(state)
    if verdict.tag == "periodic":
        ps = verdict.partition.projections
        d = verdict.partition.period
        worst = 0.0
        for i in range(d):
            target = qgroup.split.product.zero()
            for j in range(d):
                target = target + qgroup.split.elem(ps[(i - j) % d], ps[j])
            worst = max(worst, (qgroup.delta(ps[i]) - target).norm_inf())
        payload["cyclic_comultiplication"] = {
            "period": d,
            "max_residual": _fmt(worst),
            "holds_at_1e-8": bool(worst <= 1e-8),
        }
    else:
        payload["cyclic_comultiplication"] = None

    trials = violations = skipped = 0
    for _ in range(40):
        h = random_positive(qgroup.structure, rng)
        parts = [p for _, p in spectral_decomposition(h)]
        if len(parts) < 2:
            skipped += 1
            continue
        cut1 = rng.integers(1, len(parts))
        cut2 = rng.integers(cut1, len(parts) + 1)
        small = qgroup.structure.zero()
        for p in parts[:cut1]:
            small = small + p
        big = qgroup.structure.zero()
        for p in parts[:cut2]:
            big = big + p
        a = random_positive(qgroup.structure, rng)
        b = random_positive(qgroup.structure, rng)
        da = small * a * small
        db = big * b * big
        if qgroup.haar(da).real < 1e-8 or qgroup.haar(db).real < 1e-8:
            skipped += 1
            continue
        nu = walks.WalkState.from_density(qgroup, da * (1 / qgroup.haar(da).real))
        mu = walks.WalkState.from_density(qgroup, db * (1 / qgroup.haar(db).real))
        p_nu = walks.support_projection(nu)
        p_mu = walks.support_projection(mu)
        if (p_mu * p_nu - p_nu).norm_inf() > 1e-9:
            skipped += 1
            continue
        trials += 1
        p_nu2 = walks.support_projection(walks.convolve(nu, nu))
        p_mu2 = walks.support_projection(walks.convolve(mu, mu))
        if (p_mu2 * p_nu2 - p_nu2).norm_inf() > 1e-7:
            violations += 1
    payload["support_monotonicity"] = {
        "question": "does p_nu <= p_mu force p_{nu*nu} <= p_{mu*mu}",
        "trials": trials,
        "skipped": skipped,
        "violations": violations,
    }

    chain = []
    acc = state.functional.coeffs.copy()
    T = walks.stochastic_operator(state)
    coeffs = state.functional.coeffs
    for n in range(1, 13):
        if n > 1:
            coeffs = T.matrix.T @ coeffs
            acc = acc + coeffs
        avg = walks.WalkState.from_functional_coeffs(qgroup, acc / n, check=state.checked)
        if state.checked:
            supp = support_of_positive(avg.density, 1e-8)
            chain.append({"n": n, "haar_mass": _fmt(qgroup.haar(supp).real)})
    payload["cesaro_chain"] = chain
    return _json_text(payload), "experiment.json"


COMMANDS = {
    "describe": (cmd_describe, "json"),
    "trace": (cmd_trace, "csv"),
    "verdict": (cmd_verdict, "json"),
    "spectrum": (cmd_spectrum, "csv"),
    "grouplikes": (cmd_grouplikes, "json"),
    "experiment": (cmd_experiment, "json"),
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="qergodic",
        description="Random walks on finite quantum groups: diagnostics and the ergodicity verdict.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config file or inline JSON")
    parser.add_argument("--kmax", type=int, default=None, help="trace length override")
    parser.add_argument("--tol", type=float, default=None, help="tolerance override")
    parser.add_argument("--out", default=None, help="output directory (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default=None)
    args = parser.parse_args(argv)

    try:
        config = parse_config(args.config)
        args.kmax = args.kmax or config.get("kmax", 50)
        if args.tol is None:
            args.tol = config.get("tol")  # None means per-command defaults
        handler, default_format = COMMANDS[args.command]
        if args.format is None:
            args.format = default_format
        if args.format == "csv" and default_format == "json":
            raise UnsupportedCombination(f"{args.command} output is JSON only")
        qgroup = build_quantum_group(config["group"])
        state = build_state(qgroup, config["state"])
        text, filename = handler(qgroup, state, args)
    except (ConfigError, UnsupportedCombination) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    path = emit(text, args.out, filename)
    if path:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
