import os
from typing import Dict, List, Optional

import pandas as pd


class BasicEvaluation:
    """
    Loads the CSV logs of one run directory for summary statistics.

    Attributes:
        keys (List[str]): Log names; each maps to `<log_folder>/<run_name>/<key>.csv`.
        run_name (str): Run directory name.
        log_folder (str): Parent folder of the run directories.
        logs (Dict[str, pd.DataFrame]): The loaded logs by key.
    """

    def __init__(self, keys: List[str], run_name: str, log_folder: str = '', header: Optional[int] = 0) -> None:
        self.keys = keys
        self.run_name = run_name
        self.log_folder = str(log_folder)

        self.logs: Dict[str, pd.DataFrame] = {
            key: pd.read_csv(os.path.join(self.log_folder, run_name, f'{key}.csv'), header=header) for key in keys
        }

    def get_metric(self):
        raise NotImplementedError


class PosteriorStatistics(BasicEvaluation):
    """
    Summary of a normal-model Tweedie run.

    Reads the z,post_mean,post_var,ci_lo,ci_hi,fdr log of one run.
    """

    def __init__(self, run_name: str, log_folder: str = '', run_key: str = 'posterior',
                 threshold: float = 2.0, fdr_cutoff: float = 0.2) -> None:
        super().__init__([run_key], run_name, log_folder=log_folder)
        self.run_key = run_key
        self.threshold = threshold
        self.fdr_cutoff = fdr_cutoff

    def get_metric(self) -> pd.Series:
        """
        Returns:
            pd.Series: number of cases, cases with |E[mu|z]| above the
            threshold, cases with fdr at or below the cutoff, and the case with
            the largest |z|.
        """
        log = self.logs[self.run_key]
        top = log['z'].abs().idxmax()
        return pd.Series({
            'n': len(log),
            'n_flagged': int((log['post_mean'].abs() > self.threshold).sum()),
            'n_fdr': int((log['fdr'] <= self.fdr_cutoff).sum()),
            'max_abs_z_index': int(top),
            'max_abs_z': float(log.loc[top, 'z']),
            'post_mean_at_max': float(log.loc[top, 'post_mean']),
            'mean_shrinkage': float((log['z'] - log['post_mean']).abs().mean()),
        }, name=self.run_name)


class SimulationStatistics(BasicEvaluation):
    """Mean squared errors of the simulation sweeps written by run_simulations.py."""

    def __init__(self, run_name: str, log_folder: str = '', run_key: str = 'simulations') -> None:
        super().__init__([run_key], run_name, log_folder=log_folder)
        self.run_key = run_key

    def get_metric(self) -> pd.DataFrame:
        log = self.logs[self.run_key]
        stats = log.groupby('experiment')[['mse_eb', 'mse_raw']].mean()
        stats['improvement'] = 1 - stats['mse_eb'] / stats['mse_raw']
        stats['n_runs'] = log.groupby('experiment').size()
        return stats
