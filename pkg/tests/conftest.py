import os
import sys

# make tests/ importable (shared oracles and fixtures helpers)
sys.path.insert(0, os.path.dirname(__file__))
