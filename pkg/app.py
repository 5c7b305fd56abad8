"""QED workbench command-line entry point.

Usage: python app.py <check|oracle|laws|describe> --config <file or corpus name> [options]
"""

import sys

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
