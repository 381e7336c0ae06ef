"""Pipeline orchestration: config validation, determinism, report bundle."""

from pathlib import Path

import pytest

from pdsq import fcidump
from pdsq.pipeline import (
    PipelineError,
    RunConfig,
    build_problem,
    measurement_ladder,
    run_pipeline,
)


def h2_config(tmp_path, **overrides):
    base = dict(
        spacings=(0.7414,),
        k_max=3,
        shots=512,
        seed=3,
        output_dir=tmp_path / "out",
    )
    base.update(overrides)
    return RunConfig(**base)


def test_exactly_one_source_required(tmp_path):
    with pytest.raises(ValueError, match="exactly one"):
        RunConfig(
            spacings=(1.0,), fcidump_path="x.fcidump", output_dir=tmp_path
        ).validate()
    with pytest.raises(ValueError, match="exactly one"):
        RunConfig(output_dir=tmp_path).validate()


def test_config_validation(tmp_path):
    with pytest.raises(ValueError, match="k_max"):
        h2_config(tmp_path, k_max=0).validate()
    with pytest.raises(ValueError, match="mode"):
        h2_config(tmp_path, mode="fast").validate()
    with pytest.raises(ValueError, match="shots"):
        h2_config(tmp_path, mode="serial", shots=0).validate()
    with pytest.raises(ValueError, match="spam_p"):
        h2_config(tmp_path, spam_p=0.7).validate()


def test_validation_precedes_computation(tmp_path):
    bad = RunConfig(
        spacings=(2.0,), geometry_path="also.xyz", output_dir=tmp_path
    )
    with pytest.raises(ValueError, match="exactly one"):
        run_pipeline(bad)


def test_pipeline_error_names_stage(tmp_path):
    cfg = h2_config(tmp_path, fcidump_path=str(tmp_path / "missing.fcidump"),
                    spacings=None)
    with pytest.raises(PipelineError, match="hamiltonian"):
        run_pipeline(cfg)


def test_h2_exact_run_bundle(tmp_path):
    cfg = h2_config(tmp_path)
    report = run_pipeline(cfg)
    out = Path(cfg.output_dir)
    for name in (
        "measurement_counts.csv",
        "energy_vs_order.csv",
        "energies.csv",
        "summary.txt",
    ):
        assert (out / name).exists()
    # H2 exact ground state in the minimal basis
    assert report.energies["singlet"].result.roots[0] == pytest.approx(
        report.exact_reference["S0"], abs=1e-6
    )
    summary = (out / "summary.txt").read_text()
    assert "reference points only" in summary


def test_seeded_serial_run_is_bit_identical(tmp_path):
    cfg_a = h2_config(tmp_path, mode="serial", output_dir=tmp_path / "a")
    cfg_b = h2_config(tmp_path, mode="serial", output_dir=tmp_path / "b")
    run_pipeline(cfg_a)
    run_pipeline(cfg_b)
    for name in ("measurement_counts.csv", "energies.csv", "energy_vs_order.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes()


def test_parallel_mode_runs(tmp_path):
    cfg = h2_config(tmp_path, mode="parallel", shots=1024)
    report = run_pipeline(cfg)
    exact_s0 = report.exact_reference["S0"]
    assert report.energies["singlet"].result.roots[0] == pytest.approx(
        exact_s0, abs=5e-2
    )


def test_fcidump_source(tmp_path, h2_system):
    # export in the orthonormal RHF basis, then run everything off the file
    from pdsq.chem import mo_integrals

    mo = mo_integrals(h2_system["integrals"], h2_system["scf"])
    path = tmp_path / "h2.fcidump"
    fcidump.fcidump_write(mo, path)
    cfg = h2_config(tmp_path, spacings=None, fcidump_path=str(path))
    report = run_pipeline(cfg)
    assert report.energies["singlet"].result.roots[0] == pytest.approx(
        report.exact_reference["S0"], abs=1e-6
    )


def test_ladder_is_rederivable(tmp_path):
    cfg = h2_config(tmp_path)
    problem = build_problem(cfg)
    report = run_pipeline(cfg, problem=problem)
    for sector in ("singlet", "triplet"):
        again = measurement_ladder(problem, sector, cfg.k_max)
        assert again == report.ladders[sector]


def test_spam_noise_with_mitigation_runs(tmp_path):
    cfg = h2_config(tmp_path, mode="serial", spam_p=1e-3, shots=2048)
    report = run_pipeline(cfg)
    assert report.energies["singlet"].result.roots[0] == pytest.approx(
        report.exact_reference["S0"], abs=5e-2
    )


def test_h4_serial_8192_shot_ground_energy(h4_problem):
    """Device-realistic shot budget: the sampled singlet ground bound stays
    within statistical tolerance of the noiseless -1.89778."""
    from pdsq.pds import pds_from_values
    from pdsq.pipeline import estimate_expectations_serial, moments_from_estimates

    ctx = h4_problem.sectors["singlet"]
    estimates = estimate_expectations_serial(ctx, 19, 8192, 19, 0)
    values = moments_from_estimates(ctx.tapered_cache, estimates, 10)
    result = pds_from_values(values, 10)
    assert result.roots[0] == pytest.approx(-1.897768, abs=1e-3)
