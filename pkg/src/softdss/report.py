"""Training report type shared by every trainable paradigm."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field


@dataclass
class TrainReport:
    """Per-epoch error curve plus final metrics for one training run."""

    rmse_per_epoch: list[float]
    final_train_rmse: float
    final_test_rmse: float | None
    wall_time: float
    seed: int
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rmse_per_epoch": [float(v) for v in self.rmse_per_epoch],
            "final_train_rmse": float(self.final_train_rmse),
            "final_test_rmse": None if self.final_test_rmse is None else float(self.final_test_rmse),
            "wall_time": float(self.wall_time),
            "seed": self.seed,
            "extras": self.extras,
        }


def write_curve_csv(path, values, header=("epoch", "train_rmse"), start=1) -> None:
    """Emit an (index, value) curve; index counts from `start`."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, v in enumerate(values, start=start):
            writer.writerow([i, repr(float(v))])
