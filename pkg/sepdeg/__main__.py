import sys

from sepdeg.cli import main

if __name__ == '__main__':
    sys.exit(main())
