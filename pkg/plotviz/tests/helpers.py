"""Shared CSV fixture writers."""

import csv
import math

RHOS = (0.1, 4.0, 9.5, 50.0)


def write_regret_csv(path, policies, checkpoints=(20, 1000, 10000)):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["policy", "checkpoint", "mean_regret", "q05", "q95", "std", "replications"])
        for i, policy in enumerate(policies):
            for t in checkpoints:
                mean = (i + 1) * math.sqrt(t)
                writer.writerow(
                    [policy, t, f"{mean:.6g}", f"{0.5 * mean:.6g}", f"{2 * mean:.6g}", f"{0.3 * mean:.6g}", 300]
                )


def write_kinf_csv(path, ns=(100, 1000, 10000), slope=-0.9, intercept=-1.0, stderr=0.05):
    lines = ["n,mean_log_kinf,stderr"]
    for n in ns:
        y = slope * math.log(math.log(n)) + intercept
        lines.append(f"{n},{y:.12g},{stderr}")
    path.write_text("\n".join(lines) + "\n")
