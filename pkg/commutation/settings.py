"""
Configuration for the commutation toolkit
Values come from the environment (a .env file is honoured)
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Largest d^(n+1) we are willing to enumerate or close over
ENUMERATION_CAP = int(os.getenv("COMMUTATION_ENUMERATION_CAP", 1_000_000))

# Largest Hilbert-space dimension d^n for dense operators
DENSE_CAP = int(os.getenv("COMMUTATION_DENSE_CAP", 1024))

DENSE_TOLERANCE = float(os.getenv("COMMUTATION_DENSE_TOLERANCE", 1e-9))

SEARCH_MAX_LEN = int(os.getenv("COMMUTATION_SEARCH_MAX_LEN", 12))

LOG_LEVEL = os.getenv("COMMUTATION_LOG_LEVEL", "WARNING")

# Largest |S|^2 for a pairwise commutation table over a set S
TABLE_CAP = int(os.getenv("COMMUTATION_TABLE_CAP", 25_000_000))

# Largest k accepted in label^k
MAX_EXPONENT = int(os.getenv("COMMUTATION_MAX_EXPONENT", 100_000))

# Groups up to this many elements get every dense image and product checked
DENSE_EXHAUSTIVE_CAP = int(os.getenv("COMMUTATION_DENSE_EXHAUSTIVE_CAP", 256))
