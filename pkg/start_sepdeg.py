#!/usr/bin/env python3
"""
Run the sepdeg command line from a source checkout
"""

import os
import sys
from pathlib import Path

def main():
    # Ensure we're in the project root
    project_root = Path(__file__).parent
    os.chdir(project_root)

    # Create the dimension memo directory when one is configured
    sys.path.insert(0, str(project_root))
    from sepdeg.config import Config
    if Config.CACHE_DIR:
        os.makedirs(Config.CACHE_DIR, exist_ok=True)

    from sepdeg.cli import main as cli_main
    try:
        return cli_main(sys.argv[1:])
    except KeyboardInterrupt:
        print("\nStopped.", file=sys.stderr)
        return 3

if __name__ == '__main__':
    sys.exit(main())
