"""Management script for the previous-kit command line."""
import os
import sys

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from previous_kit.app import create_app

cli = create_app()


if __name__ == '__main__':
    cli()
