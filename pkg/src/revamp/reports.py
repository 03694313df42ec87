"""Mapping statistics shared by the flows and the bench harness."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass


@dataclass
class MappingReport:
    flow: str
    benchmark: str = ""
    # network / cover shape
    num_pis: int = 0
    n_maj: int | None = None
    n_lut: int | None = None
    levels: int | None = None
    min_dev: int | None = None
    # crossbar geometry (s_d of the delay flow counts packed storage words)
    s_d: int = 0
    w_d: int = 0
    # instruction statistics
    i_apply: int = 0
    i_read: int = 0
    i_total: int = 0
    cycles: int = 0
    # delay-flow packing statistics
    n_blocks: int | None = None
    w_util: float | None = None
    # serial-baseline comparison (9 memory cycles per majority node)
    d_p_star: int | None = None
    speedup: float | None = None
    # depth-bounded mapper accounting
    devices_used: int | None = None
    device_bound: int | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


BENCH_COLUMNS = [
    "benchmark", "flow", "k", "s_d", "w_d", "n_lut", "levels", "min_dev",
    "n_maj", "i_apply", "i_read", "i_total", "n_blocks", "w_util",
    "cycles", "d_p_star", "speedup", "verified", "status", "seconds",
]


@dataclass
class BenchRow:
    benchmark: str
    flow: str
    k: int | None
    s_d: int
    w_d: int
    report: MappingReport | None
    verified: bool
    status: str
    seconds: float

    def to_dict(self) -> dict:
        base = {c: "" for c in BENCH_COLUMNS}
        base.update(benchmark=self.benchmark, flow=self.flow,
                    k=self.k if self.k is not None else "",
                    s_d=self.s_d, w_d=self.w_d,
                    verified=self.verified, status=self.status,
                    seconds=round(self.seconds, 3))
        if self.report is not None:
            rep = self.report.to_dict()
            for c in ("n_lut", "levels", "min_dev", "n_maj", "i_apply",
                      "i_read", "i_total", "n_blocks", "w_util", "cycles",
                      "d_p_star", "speedup"):
                if c in rep:
                    base[c] = rep[c]
            base["s_d"] = rep.get("s_d", self.s_d)
        return base
