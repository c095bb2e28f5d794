import os
import sys

# the package is imported as `src.*` from the repository root
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
