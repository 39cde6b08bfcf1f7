"""
Command-line entry point for the GHZ entanglement broadcasting simulator.

Usage:
    # Entanglement report of the GHZ state
    python main.py analyze --ghz

    # Report of a state file (8 lines of "re im")
    python main.py analyze --state fixtures/product.txt

    # Clone the GHZ state with three local cloners or one non-local cloner
    python main.py broadcast --mode local --ghz
    python main.py broadcast --mode nonlocal --ghz --format text

    # Compare every published number against the simulation
    python main.py verify
"""
import sys

from dotenv import load_dotenv

# Load environment variables from .env
load_dotenv()

from app.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
