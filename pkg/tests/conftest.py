"""Shared fixtures for the acceptance suite.

The expensive pieces -- three trained detectors and the desk-scale BER
estimates they feed -- are built once per session and reused by every
criterion that needs them.  A terminal-summary hook prints one verdict
line per criterion at the end of the run.
"""

import time
from types import SimpleNamespace

import numpy as np
import pytest

from sneakpath import analysis, codec as gs, mlp
from sneakpath.channel import ChannelParams
from sneakpath.detectors import ThresholdDetector, default_grid, derive_threshold

DESK_PARAMS = ChannelParams(sigma=30.0, p_f=1e-3)
DESK_CODEC = gs.CodecConfig.make(8, 4)
TRAIN_COUNT = 20_000
TEST_TRIALS = 10_000
EPOCHS = 120

_criterion_lines: list[tuple[int, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criterion_lines):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record():
    """Store and print one pass/fail line per acceptance criterion."""

    def _record(index: int, passed: bool, detail: str) -> bool:
        line = f"criterion {index:2d}: {'PASS' if passed else 'FAIL'} - {detail}"
        _criterion_lines.append((index, line))
        print(line, flush=True)
        return passed

    return _record


def _train_detector(codec, class_filter, seed):
    dataset = mlp.generate_dataset(DESK_PARAMS, codec, TRAIN_COUNT, class_filter,
                                   seed=seed)
    model = mlp.init_model(DESK_PARAMS.n ** 2, seed,
                           normalizer=1.0 / DESK_PARAMS.r0)
    mlp.train(model, dataset, mlp.TrainConfig(epochs=EPOCHS, seed=seed))
    return model


@pytest.fixture(scope="session")
def desk_lab():
    """Trained detectors and the derived threshold at sigma=30, p_f=1e-3."""
    t0 = time.time()
    model_cc = _train_detector(DESK_CODEC, mlp.AFFECTED_ONLY, 101)
    model_nocc = _train_detector(None, mlp.AFFECTED_ONLY, 102)
    model_unf = _train_detector(None, mlp.ALL, 103)
    pool = mlp.generate_dataset(DESK_PARAMS, DESK_CODEC, 400, mlp.AFFECTED_ONLY,
                                seed=104)
    n = DESK_PARAMS.n
    reads = [(x / model_cc.normalizer).reshape(n, n) for x in pool.inputs]
    hard = [mlp.hard_decide(model_cc, r) for r in reads]
    search = derive_threshold(reads, hard, default_grid(DESK_PARAMS))
    return SimpleNamespace(
        params=DESK_PARAMS,
        codec=DESK_CODEC,
        model_cc=model_cc,
        model_nocc=model_nocc,
        model_unf=model_unf,
        spi_detector=ThresholdDetector(search.r_th_spi),
        train_seconds=time.time() - t0,
    )


@pytest.fixture(scope="session")
def desk_estimates(desk_lab):
    """BER of the four compared detectors plus the threshold variant."""
    p, cc = desk_lab.params, desk_lab.codec
    scenarios = {
        "midpoint": analysis.Scenario(analysis.MIDPOINT, p),
        "cc_mlp": analysis.Scenario(analysis.PIPELINE_DL, p, codec=cc,
                                    model=desk_lab.model_cc),
        "nocc_mlp": analysis.Scenario(analysis.PIPELINE_DL, p,
                                      model=desk_lab.model_nocc),
        "unfiltered_mlp": analysis.Scenario(analysis.MLP_ALL, p,
                                            model=desk_lab.model_unf),
        "cc_threshold": analysis.Scenario(analysis.PIPELINE_THRESHOLD, p,
                                          codec=cc,
                                          spi_detector=desk_lab.spi_detector),
    }
    models = (desk_lab.model_cc, desk_lab.model_nocc, desk_lab.model_unf)
    t0 = time.time()
    estimates = {}
    call_deltas = {}
    for name, scn in scenarios.items():
        before = [m.inference_calls for m in models]
        estimates[name] = analysis.estimate_ber(scn, TEST_TRIALS, 201)
        call_deltas[name] = sum(m.inference_calls - b
                                for m, b in zip(models, before))
    return SimpleNamespace(
        estimates=estimates,
        call_deltas=call_deltas,
        eval_seconds=time.time() - t0,
        total_seconds=desk_lab.train_seconds + (time.time() - t0),
    )
