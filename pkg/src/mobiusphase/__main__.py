"""python -m mobiusphase delegates to the command line driver."""

from .cli import main

if __name__ == "__main__":
    main()
