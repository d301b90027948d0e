import numpy as np
import pytest

from bcghr.synth import SignalModelParams, generate_bcg

FS = 225.0


def tone(freq, duration_s=30.0, fs=FS, phase=0.0, amp=1.0):
    t = np.arange(int(round(duration_s * fs))) / fs
    return t, amp * np.cos(2 * np.pi * freq * t + phase)


@pytest.fixture(scope="session")
def bcg_72bpm_60s():
    return generate_bcg(SignalModelParams(hr_profile=((0.0, 72.0),), duration_s=60.0,
                                          noise_std=0.1, seed=7), label="hr72")


ACCEPTANCE_LINES = []


def record_criterion(name, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
