#!/usr/bin/env python3
"""
PPE Sizer
Main application entry point: runs the command line from a source checkout
"""

import sys
from pathlib import Path

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from cli.commands import main

if __name__ == "__main__":
    sys.exit(main())
