"""Command-line front end: ``mblcavity {bare,spectrum,fluxmap,tree,fit}``."""

import argparse
import io
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import yaml

from . import calibrate
from .config import load_config, phi_label
from .errors import InputError, MBLCavityError
from .fock import dump_json
from .interaction import interaction_scale
from .line import load_jitter, read_quality_file
from .pipeline import default_quality, probe_mode, probe_tree, single_particle
from .response import resonance_frequencies

log = logging.getLogger("mblcavity")


def _run_tasks(func, tasks, workers):
    """Evaluate ``func`` over ``tasks``; results come back sorted by task key."""
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(func, tasks))
    else:
        results = [func(t) for t in tasks]
    return sorted(results, key=lambda r: r[0])


class _guard:
    """Per-point failures are reported, not raised, so the sweep continues."""

    def __init__(self, func):
        self.func = func

    def __call__(self, task):
        key = task[0]
        try:
            return key, self.func(task), None
        except MBLCavityError as exc:
            return key, None, f"{type(exc).__name__}: {exc}"


def _resolve(cfg):
    """Load auxiliary inputs once so workers receive plain arrays."""
    params = cfg.circuit
    quality = read_quality_file(cfg.inputs.quality_file, N=params.N + 1) if cfg.inputs.quality_file else None
    jitter = load_jitter(cfg.inputs.jitter_file, params.N + 1) if cfg.inputs.jitter_file else None
    return params, quality, jitter


def _stage(params, phi, jitter):
    return single_particle(params, phi, jitter=jitter)


def _spectrum_point(task):
    (phi, k), (cfg, quality, jitter) = task
    params = cfg.circuit
    res = probe_mode(params, phi, k, max_particles=cfg.probe.max_particles,
                     window_spacings=cfg.probe.window_spacings,
                     quality=quality or default_quality(params),
                     stage=_stage(params, phi, jitter), step=cfg.probe.step_GHz)
    buf = io.StringIO()
    buf.write("f_GHz,s11_mag,s11_db\n")
    sp = res.spectrum
    for f, m, d in zip(sp.f, sp.s11_mag, sp.s11_db):
        buf.write(f"{f:.9f},{m:.12g},{d:.9g}\n")
    doc = res.eigensystem.to_json()
    doc.update(phi_over_2pi=phi, g_scale_GHz=res.interaction.g_scale,
               f_eg_GHz=res.stage.qubit.f_eg, n_resonances=res.n_resonances,
               resonances_GHz=resonance_frequencies(sp).tolist(),
               brightest=int(res.eigensystem.brightest()))
    return buf.getvalue(), doc


def _fluxmap_point(task):
    (phi, k), (cfg, quality, jitter) = task
    params = cfg.circuit
    res = probe_mode(params, phi, k, max_particles=cfg.probe.max_particles,
                     window_spacings=cfg.probe.window_spacings,
                     quality=quality or default_quality(params),
                     stage=_stage(params, phi, jitter), step=cfg.probe.fluxmap_step_GHz)
    sp = res.spectrum
    return [f"{phi:.6f},{f:.9f},{d:.9g}\n" for f, d in zip(sp.f, sp.s11_db)]


def _tree_point(task):
    (phi, k), (cfg, quality, jitter) = task
    params = cfg.circuit
    tree, sector, _ = probe_tree(params, phi, k, max_particles=cfg.probe.tree_max_particles,
                                 window_spacings=cfg.probe.window_spacings,
                                 stage=_stage(params, phi, jitter))
    doc = tree.to_json()
    dom = tree.dominant_child(tree.root)
    doc.update(phi_over_2pi=phi, probe_k=k, sector_size=sector.size,
               dominant_child=dom.to_json() if dom is not None else None)
    return doc, tree.render()


def _bare_point(task):
    (phi,), (cfg, quality, jitter) = task
    params = cfg.circuit
    st = _stage(params, phi, jitter)
    g = interaction_scale(st.qubit, params.line(), params.Gamma)
    rows = []
    w = st.sp.W[:, 0] ** 2
    for k in range(1, st.sp.f_dressed.shape[0] + 1):
        fb = st.bare[k] if k <= st.bare.N else float("nan")
        wk = w[k - params.j0 - 1] if k > params.j0 else 0.0
        rows.append(f"{phi:.6f},{k},{fb:.9f},{st.sp.f(k):.9f},{wk:.9g}\n")
    qubit_row = f"{phi:.6f},{st.qubit.f_eg:.9f},{st.qubit.dipole_asym:.9g},{g * 1e3:.9g}\n"
    return rows, qubit_row


def _prepare_out(cfg, command):
    out = os.path.join(cfg.output, command)
    os.makedirs(out, exist_ok=True)
    # echo the physics-relevant config; output path and worker count never change results
    echo = cfg.to_dict()
    del echo["output"], echo["workers"]
    with open(os.path.join(out, "config.yaml"), "w") as fh:
        fh.write(yaml.safe_dump(echo, sort_keys=True))
    return out


def _report_failures(results):
    failed = [(key, err) for key, _, err in results if err is not None]
    for key, err in failed:
        log.error("point %s failed: %s", key, err)
    return 1 if failed else 0


def _point_tasks(cfg, ctx):
    return [((phi, int(k)), ctx) for phi in cfg.sweep.points() for k in cfg.probe.modes]


def cmd_spectrum(cfg):
    ctx = (cfg,) + _resolve(cfg)[1:]
    tasks = _point_tasks(cfg, ctx)
    out = _prepare_out(cfg, "spectrum")
    results = _run_tasks(_guard(_spectrum_point), tasks, cfg.workers)
    for (phi, k), payload, _ in results:
        if payload is None:
            continue
        stem = os.path.join(out, f"mode{k}_phi{phi_label(phi)}")
        with open(stem + ".csv", "w") as fh:
            fh.write(payload[0])
        dump_json(payload[1], stem + ".json")
    return _report_failures(results)


def cmd_fluxmap(cfg):
    ctx = (cfg,) + _resolve(cfg)[1:]
    tasks = _point_tasks(cfg, ctx)
    out = _prepare_out(cfg, "fluxmap")
    results = _run_tasks(_guard(_fluxmap_point), tasks, cfg.workers)
    with open(os.path.join(out, "fluxmap.csv"), "w") as fh:
        fh.write("phi_over_2pi,f_GHz,s11_db\n")
        for _, rows, _ in results:
            if rows:
                fh.writelines(rows)
    return _report_failures(results)


def cmd_tree(cfg):
    ctx = (cfg,) + _resolve(cfg)[1:]
    tasks = _point_tasks(cfg, ctx)
    out = _prepare_out(cfg, "tree")
    results = _run_tasks(_guard(_tree_point), tasks, cfg.workers)
    for (phi, k), payload, _ in results:
        if payload is None:
            continue
        stem = os.path.join(out, f"tree_mode{k}_phi{phi_label(phi)}")
        dump_json(payload[0], stem + ".json")
        with open(stem + ".txt", "w") as fh:
            fh.write(payload[1])
    return _report_failures(results)


def cmd_bare(cfg):
    ctx = (cfg,) + _resolve(cfg)[1:]
    tasks = [((phi,), ctx) for phi in cfg.sweep.points()]
    out = _prepare_out(cfg, "bare")
    results = _run_tasks(_guard(_bare_point), tasks, cfg.workers)
    with open(os.path.join(out, "modes.csv"), "w") as fm, open(os.path.join(out, "qubit.csv"), "w") as fq:
        fm.write("phi_over_2pi,mode_k,f_bare_GHz,f_dressed_GHz,qubit_weight\n")
        fq.write("phi_over_2pi,f_eg_GHz,dipole_asym,g_MHz\n")
        for _, payload, _ in results:
            if payload:
                fm.writelines(payload[0])
                fq.write(payload[1])
    return _report_failures(results)


def cmd_fit(cfg):
    files = cfg.inputs.spectroscopy_files
    if not files:
        raise InputError("fit needs inputs.spectroscopy_files")
    records, sigma_given = [], True
    for path in files:
        d = calibrate.read_spectroscopy(path)
        sigma_given &= d.sigma_given
        records.extend(zip(d.phi, d.k, d.f, d.sigma))
    data = calibrate.SpectroscopyData.from_records(records)
    data = calibrate.SpectroscopyData(data.phi, data.k, data.f, data.sigma, sigma_given)
    params = cfg.circuit
    out = _prepare_out(cfg, "fit")
    status = 0
    summary = []
    zero = data.at_flux(0.0)
    circuit_data = data
    if np.unique(zero.k).size >= 5:
        disp = calibrate.fit_dispersion(zero, ell=params.ell, start=cfg.fit.dispersion_start,
                                        delta_k0=params.delta_k0)
        calibrate.write_report(disp, os.path.join(out, "dispersion.json"))
        summary.append("dispersion fit (v, f_p):\n" + disp.summary())
        status |= 0 if disp.ok else 1
        if cfg.fit.use_fitted_line and disp.ok:
            params = params.replace(v=float(disp.values[0]), f_p=float(disp.values[1]))
        # zero-flux rows fixed the line; the circuit is fit to the flux-dependent rows
        rest = data.phi != 0.0
        if np.unique(data.phi[rest]).size >= 2:
            circuit_data = calibrate.SpectroscopyData(data.phi[rest], data.k[rest], data.f[rest],
                                                      data.sigma[rest], data.sigma_given)
            summary.append(f"circuit fit uses the {int(rest.sum())} rows at nonzero flux\n")
    else:
        summary.append("dispersion fit skipped: fewer than 5 zero-flux modes\n")
    circ = calibrate.fit_circuit(circuit_data, params, start=cfg.fit.circuit_start, tol=cfg.fit.tol,
                                 max_iter=cfg.fit.max_iter)
    calibrate.write_report(circ, os.path.join(out, "circuit.json"))
    summary.append("circuit fit (E_J, E_C, E_L):\n" + circ.summary())
    status |= 0 if circ.ok else 1
    if not sigma_given:
        summary.append(f"note: sigma column absent in some rows; {calibrate.DEFAULT_SIGMA * 1e3:g} MHz used\n")
    with open(os.path.join(out, "summary.txt"), "w") as fh:
        fh.write("\n".join(summary))
    sys.stdout.write("\n".join(summary))
    return status


COMMANDS = {"spectrum": cmd_spectrum, "fluxmap": cmd_fluxmap, "fit": cmd_fit,
            "tree": cmd_tree, "bare": cmd_bare}


def build_parser():
    parser = argparse.ArgumentParser(prog="mblcavity", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--workers", type=int, help="worker processes")
        p.add_argument("--phi", type=float, action="append",
                       help="flux point in units of 2 pi (repeatable; overrides the sweep)")
        p.add_argument("--mode", type=int, action="append", help="probe mode (repeatable)")
        if name == "fit":
            p.add_argument("data", nargs="*", help="spectroscopy CSV files")
    return parser


def resolve_config(args):
    from .config import SweepSpec

    cfg = load_config(args.config)
    changes = {}
    if args.out:
        changes["output"] = args.out
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.phi:
        changes["sweep"] = SweepSpec(phi=tuple(args.phi))
    if args.mode:
        changes["probe"] = cfg.probe.__class__(**{**cfg.probe.__dict__, "modes": tuple(args.mode)})
    if getattr(args, "data", None):
        changes["inputs"] = cfg.inputs.__class__(**{**cfg.inputs.__dict__,
                                                    "spectroscopy_files": tuple(args.data)})
    cfg = cfg.replace(**changes) if changes else cfg
    return cfg.validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        for path in (cfg.inputs.quality_file, cfg.inputs.jitter_file, *cfg.inputs.spectroscopy_files):
            if path and not os.path.exists(path):
                raise InputError(f"input file not found: {path}")
        return COMMANDS[args.command](cfg)
    except MBLCavityError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
