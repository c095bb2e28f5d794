import argparse

from tqdm import tqdm

from src.dirs import LOG_PATH
from src.evaluation import SimulationStatistics
from src.simulations import EXPERIMENTS, run_experiment
from src.utils import RunLogger, print_config


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description='Simulation oracles for the empirical Bayes estimators.')
    parser.add_argument('--experiments', nargs='*', default=list(EXPERIMENTS), choices=list(EXPERIMENTS))
    parser.add_argument('--n-runs', type=int, default=20, help='number of seeds per experiment')
    parser.add_argument('--first-seed', type=int, default=0)
    parser.add_argument('--log-dir', default=str(LOG_PATH))
    args = parser.parse_args()

    logger = RunLogger(keys=['simulations'], logs_path=args.log_dir, command='simulations')
    config = {'experiments': args.experiments, 'n_runs': args.n_runs, 'first_seed': args.first_seed}
    logger.log_json({'config': config})
    print_config(config)

    seeds = range(args.first_seed, args.first_seed + args.n_runs)
    for name in args.experiments:
        for seed in tqdm(seeds, desc=name):
            logger.log({'simulations': [run_experiment(name, seed)]})

    stats = SimulationStatistics(logger.run_name, args.log_dir).get_metric()
    logger.save_readable({'simulation_stats': stats})
    print(stats.to_string())
    print(f"Finished, logs in {logger.run_dir}")
