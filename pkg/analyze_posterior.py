import argparse
import os
from typing import Optional

import pandas as pd

from src.dirs import LOG_PATH
from src.evaluation import PosteriorStatistics


def analyze_log_directory(log_folder: str, run_name: str, threshold: float, fdr_cutoff: float) -> Optional[pd.Series]:
    if not os.path.exists(os.path.join(log_folder, run_name, 'posterior.csv')):
        print(f"   Skipping {run_name}: no posterior.csv")
        return None
    try:
        return PosteriorStatistics(run_name, log_folder, threshold=threshold, fdr_cutoff=fdr_cutoff).get_metric()
    except (pd.errors.ParserError, pd.errors.EmptyDataError, KeyError) as e:
        print(f"   Skipping {run_name}: {e}")
        return None


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description='Summarize normal-model tweedie runs.')
    parser.add_argument('--log-dir', default=str(LOG_PATH))
    parser.add_argument('--prefix', default='tweedie', help='only run directories starting with this prefix')
    parser.add_argument('--threshold', type=float, default=2.0)
    parser.add_argument('--fdr-cutoff', type=float, default=0.2)
    parser.add_argument('--output', default=None, help='write the summary table to this CSV')
    args = parser.parse_args()

    runs = sorted(d for d in os.listdir(args.log_dir)
                  if d.startswith(args.prefix) and os.path.isdir(os.path.join(args.log_dir, d)))
    print(f"Found {len(runs)} run(s) in {args.log_dir}")
    rows = [r for r in (analyze_log_directory(args.log_dir, run, args.threshold, args.fdr_cutoff) for run in runs)
            if r is not None]
    if not rows:
        print("No posterior runs to summarize.")
    else:
        summary = pd.DataFrame(rows)
        print(summary.to_string())
        if args.output:
            summary.to_csv(args.output)
