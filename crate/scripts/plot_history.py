#!/usr/bin/env python3
"""Plot total loss and ACC per epoch from a history.jsonl file.

    python scripts/plot_history.py run/history.jsonl curves.png
"""

import json
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main():
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    logs = [json.loads(line) for line in open(sys.argv[1]) if line.strip()]
    epochs = [log["epoch"] for log in logs]
    loss = [log["losses"]["total"] for log in logs]
    acc = [log["metrics"]["acc"] if log["metrics"] else float("nan") for log in logs]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(epochs, loss, color="tab:blue")
    ax.set_xlabel("epoch")
    ax.set_ylabel("total loss", color="tab:blue")
    other = ax.twinx()
    other.plot(epochs, acc, color="tab:red")
    other.set_ylabel("ACC", color="tab:red")
    other.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(sys.argv[2], dpi=120)


if __name__ == "__main__":
    main()
