import pytest
import yaml

FIG2_STAGES = [
    {"kind": "oversample", "params": {"n": 60}},
    {"kind": "integral_match"},
    {"kind": "smooth", "params": {"s": 1.0}},
    {"kind": "repeat", "params": {"k": 7}},
    {"kind": "trend", "params": {"expr": "sin(6.2831853*t)+t"}},
    {"kind": "noise", "params": {"snr_db": 30}},
]

MINIMAL_STAGES = [
    {"kind": "oversample", "params": {"n": 60}},
    {"kind": "integral_match"},
    {"kind": "smooth", "params": {"s": 1.0}},
    {"kind": "noise", "params": {"snr_db": 30}},
]


@pytest.fixture
def write_config(tmp_path):
    def write(stages, name="config.yaml", **extra):
        doc = {"input": {"dataset": "tiktok"}, "seed": 42, "stages": stages, **extra}
        path = tmp_path / name
        path.write_text(yaml.safe_dump(doc, sort_keys=False))
        return path

    return write
