from pathlib import Path
import os

BASE_PATH = Path(__file__).parent.parent
DATA_PATH = BASE_PATH / 'data'
LOG_PATH = BASE_PATH / "logs"

# public sources, printed by the CLI; never fetched automatically
PROSTATE_URL = "https://web.stanford.edu/~hastie/CASI/data.html"
SUSHI_URL = "https://www.kamishima.net/sushi/"

os.makedirs(LOG_PATH, exist_ok=True)
