"""Shipped, synthetic and external data sets.

External data sets are never downloaded; the loaders read a local copy and
the error message names the public page it can be fetched from.
"""
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from src.data_io import read_frame, read_interval_csv
from src.dirs import DATA_PATH, PROSTATE_URL, SUSHI_URL
from src.errors import DataFormatError
from src.linear_eb import IntervalGroupedSample

HORSES_FILE = DATA_PATH / 'horses.csv'
HORSES_PUBLISHED_FILE = DATA_PATH / 'horses_eb_published.csv'
HORSES_GRAND_MEAN = 153.1333
PROSTATE_FILE = DATA_PATH / 'prostz.txt'
SUSHI_ORDER_FILE = DATA_PATH / 'sushi3a.5000.10.order'
SUSHI_USER_FILE = DATA_PATH / 'sushi3.udata'

SUSHI_OBJECTS = ['shrimp', 'sea eel', 'tuna', 'squid', 'sea urchin',
                 'salmon roe', 'egg', 'fatty tuna', 'tuna roll', 'cucumber roll']
# 0-based column of the east/west flag (region lived in until age 15)
SUSHI_EAST_WEST_COL = 6


def load_horses() -> Tuple[np.ndarray, list]:
    """Ten horse size intervals with their numbers."""
    return read_interval_csv(HORSES_FILE, label_col='horse')


def horses_grouped() -> IntervalGroupedSample:
    """Every horse as its own group holding one interval."""
    bounds, labels = load_horses()
    return IntervalGroupedSample([b[None] for b in bounds], labels=labels)


def load_horses_published() -> pd.DataFrame:
    return read_frame(HORSES_PUBLISHED_FILE)


def _require(path, url: str) -> None:
    if not path.exists():
        raise DataFormatError(f'{path} not found; download it from {url}')


def load_prostate_z(path=PROSTATE_FILE) -> np.ndarray:
    """z-values of the prostate microarray, one per line."""
    _require(path, PROSTATE_URL)
    return np.loadtxt(path, dtype=float).ravel()


def load_sushi(order_path=SUSHI_ORDER_FILE, user_path=SUSHI_USER_FILE) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sushi preference orders as a rank matrix plus an East/West label per judge.

    Returns:
        Tuple[np.ndarray, np.ndarray]: N x 10 rankings (1 = most preferred,
        columns in SUSHI_OBJECTS order) and labels 'east' / 'west'.
    """
    _require(order_path, SUSHI_URL)
    _require(user_path, SUSHI_URL)
    orders = np.loadtxt(order_path, dtype=int, skiprows=1)[:, 2:]
    rankings = np.empty_like(orders)
    rows = np.arange(orders.shape[0])[:, None]
    rankings[rows, orders] = np.arange(1, orders.shape[1] + 1)
    users = np.loadtxt(user_path, dtype=int)
    if users.shape[0] != rankings.shape[0]:
        raise DataFormatError(f'{users.shape[0]} judges in {user_path} for {rankings.shape[0]} orders')
    regions = np.where(users[:, SUSHI_EAST_WEST_COL] == 0, 'east', 'west')
    return rankings, regions


def synthetic_systolic_intervals(n_per_group: int = 15, seed: int = 0,
                                 centers: Tuple[float, ...] = (110.0, 135.0, 165.0),
                                 rng: Optional[np.random.Generator] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Daily systolic pressure ranges of patients from well separated populations.

    Returns:
        Tuple[np.ndarray, np.ndarray]: (n, 1, 2) bounds and the population each object came from.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    labels = np.repeat(np.arange(len(centers)), n_per_group)
    mid = np.asarray(centers)[labels] + rng.normal(0.0, 4.0, labels.size)
    half = rng.uniform(5.0, 12.0, labels.size)
    return np.stack([mid - half, mid + half], axis=1)[:, None, :], labels


def synthetic_blood_pressure(n_patients: int = 20, n_readings: int = 3, seed: int = 0,
                             rng: Optional[np.random.Generator] = None) -> Tuple[IntervalGroupedSample, np.ndarray]:
    """
    Systolic/diastolic reading ranges grouped by patient.

    Each patient has true (systolic, diastolic) levels; every reading is an
    interval around the truth plus noise.

    Returns:
        Tuple[IntervalGroupedSample, np.ndarray]: The grouped readings and the
        N x 2 matrix of true levels.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    truth = np.column_stack([rng.normal(130.0, 12.0, n_patients), rng.normal(82.0, 8.0, n_patients)])
    groups = []
    for level in truth:
        mid = level + rng.normal(0.0, [6.0, 4.0], size=(n_readings, 2))
        half = rng.uniform(2.0, 6.0, size=(n_readings, 2))
        groups.append(np.stack([mid - half, mid + half], axis=2))
    return IntervalGroupedSample(groups, labels=list(range(n_patients))), truth
