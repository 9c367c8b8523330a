import sys

from modules.cli import main

if __name__ == "__main__":
    # Example: python main.py solve --H0=-1/30-1i --r-end -100
    sys.exit(main())
