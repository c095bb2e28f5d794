import json
import os
from datetime import datetime
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np
import pandas as pd

# numeric CSV payloads must survive a write/read cycle bit-for-bit
FLOAT_FORMAT = "%.17g"


def print_config(config):
    for k in config:
        print(k)
        print(config[k])
        print('------------')


def save_readable_config(config, run_name, log_path):
    with open(os.path.join(log_path, run_name, 'readable_summary.txt'), 'a') as f:
        for k in config:
            f.write(f'{k}\n')
            f.writelines(f'{config[k]}\n')
            f.write('------------\n')
        f.write('============\n')


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    raise TypeError(f'Object of type {type(value).__name__} is not JSON serializable')


def dump_json(payload: Any, file_path) -> None:
    with open(file_path, 'w') as json_file:
        json.dump(payload, json_file, indent=4, default=_jsonable)


def write_frame(frame: pd.DataFrame, file_path) -> None:
    """Writes a frame as CSV with every float printed at 17 significant digits."""
    frame.to_csv(file_path, index=False, float_format=FLOAT_FORMAT)


class RunLogger:
    """
    Records one CLI or script run inside its own timestamped directory.

    Attributes:
        keys (List[str]): Names of the CSV logs this run may append to.
        logs_path (str): Parent folder of all run directories.
        run_name (str): Directory name of this run.
    """

    def __init__(
        self, keys: List[str], logs_path: str = "", run_name: str = None, command: str = '', suffix: str = ''
    ) -> None:
        self.keys: List[str] = list(keys)
        self.logs_path: str = str(logs_path)

        if run_name is None:
            self.run_name = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
            if command != '':
                self.run_name = command + '_' + self.run_name
            if suffix != '':
                self.run_name = self.run_name + '_' + suffix
        else:
            self.run_name = run_name

        os.makedirs(self.run_dir, exist_ok=True)

    @property
    def run_dir(self) -> str:
        return os.path.join(self.logs_path, self.run_name)

    def log_json(self, configs: Dict[str, Any]) -> None:
        for config_name, config in configs.items():
            dump_json(config, os.path.join(self.run_dir, f"{config_name}.json"))

    def log(self, values_dict: Mapping[str, Sequence[Mapping[str, Any]]]) -> None:
        """
        Appends rows to the per-key CSV logs.

        Args:
            values_dict: Maps a log key to a list of row dictionaries.
        """
        for key, rows in values_dict.items():
            if key not in self.keys:
                raise ValueError(f'Uninitialized key: {key}')
            file_path = os.path.join(self.run_dir, f"{key}.csv")
            frame = pd.DataFrame(list(rows))
            frame.to_csv(
                file_path, mode='a', index=False, header=not os.path.exists(file_path), float_format=FLOAT_FORMAT
            )

    def save_readable(self, config: Mapping[str, Any]) -> None:
        save_readable_config(config, self.run_name, self.logs_path)

