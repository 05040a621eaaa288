"""Scenario runners: turn a parsed configuration into output artifacts.

Each runner returns (files, summary): `files` maps artifact names to their
full text content, `summary` is a small JSON-ready dict.  The service sends
both over the wire; the command-line client writes the files verbatim, which
keeps outputs byte-identical wherever they are produced.
"""
from __future__ import annotations

from . import io, model
from .config import RunConfig
from .errors import NoProfileError
from .evolution import init_state, run
from .spectrum import assemble_jacobian, eigen_spectrum
from .stationary import (center_manifold_coeff, decay_report,
                         boundary_slope_sweep, solve_stationary)


def run_classify(cfg: RunConfig):
    J = assemble_jacobian(cfg.params, cfg.far)
    spec = eigen_spectrum(J)
    payload = spec.to_dict()
    files = {"spectrum.json": io.report_json(payload, cfg.raw)}
    return files, {"regime": spec.regime.tag, "mach": spec.regime.mach}


def _profile_bundle(cfg: RunConfig):
    J = assemble_jacobian(cfg.params, cfg.far)
    spec = eigen_spectrum(J)
    prof = solve_stationary(cfg.params, cfg.far, cfg.grid,
                            force_regime=cfg.force_regime)
    cm = None
    if prof.regime.tag == model.SONIC and prof.delta > 0:
        cm = center_manifold_coeff(cfg.params, cfg.far)
    rep = decay_report(prof, spec, cm=cm)
    return spec, prof, rep


def run_stationary(cfg: RunConfig):
    spec, prof, rep = _profile_bundle(cfg)
    files = {
        "profile.csv": io.profile_csv(prof),
        "spectrum.json": io.report_json(spec.to_dict(), cfg.raw),
        "decay_report.json": io.report_json(rep.to_dict(), cfg.raw),
    }
    summary = {
        "regime": prof.regime.tag,
        "delta": prof.delta,
        "residual_norm": prof.residual_norm,
        "boundary_mismatch": list(prof.boundary_mismatch),
        "flux_defects": list(prof.flux_defects()),
        "model_selected": rep.model_selected,
    }
    return files, summary


def run_evolve(cfg: RunConfig):
    _, prof, _ = _profile_bundle(cfg)
    state = init_state(prof, cfg.evolve.get("perturbation"))
    result = run(state, cfg.params, prof,
                 t_end=cfg.evolve["t_end"],
                 report_every=cfg.evolve["report_every"])
    sup0 = result.reports[0].sup_norm
    supT = result.final.sup_norm
    summary = {
        "sup_initial": sup0,
        "sup_final": supT,
        "sup_ratio": supT / sup0 if sup0 > 0 else 0.0,
        "n_steps": result.n_steps,
        "mass_audit": list(result.mass_audit),
        "t_final": result.state.time,
    }
    files = {
        "series.csv": io.series_csv(result.reports),
        "summary.json": io.report_json(summary, cfg.raw),
    }
    if cfg.evolve.get("snapshot", True):
        files["snapshot.csv"] = io.snapshot_csv(result.state)
    return files, summary


def run_sweep(cfg: RunConfig):
    result = boundary_slope_sweep(cfg.params, cfg.far,
                                  cfg.sweep["delta_list"], cfg.grid)
    ok_rows = [r for r in result.rows if r.error is None]
    if not ok_rows:
        raise NoProfileError("every sweep row failed",
                             mismatch=None, iterations=0)
    files = {
        "sweep.csv": io.sweep_csv(result),
        "sweep_fit.json": io.report_json(result.to_dict(), cfg.raw),
    }
    summary = {
        "exponent": result.exponent,
        "r_squared": result.r_squared,
        "max_ratio": result.max_ratio,
        "rows_ok": len(ok_rows),
        "rows_failed": len(result.rows) - len(ok_rows),
    }
    return files, summary


RUNNERS = {
    "classify": run_classify,
    "stationary": run_stationary,
    "evolve": run_evolve,
    "sweep": run_sweep,
}


def run_scenario(cfg: RunConfig):
    return RUNNERS[cfg.scenario](cfg)
