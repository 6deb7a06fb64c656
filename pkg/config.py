import os
from dataclasses import dataclass

from modules.module import InputError

THREADS = None

SIGMA_COMMANDS = ("bounds", "np", "quotient", "carleson", "estimate")
FAMILY_COMMANDS = ("sandwich", "bernstein")
COMMANDS = SIGMA_COMMANDS + FAMILY_COMMANDS + ("cs", "table")

def get_threads() -> int:
    if THREADS is not None:
        return THREADS

    value = os.getenv("BLASCHKE_LAB_THREADS")
    if value is None or value.strip() == "":
        return 1

    return parse_threads(value)

def set_threads(value : int|None):
    global THREADS
    THREADS = value

def parse_threads(value : str) -> int:
    try:
        threads = int(value)
    except ValueError:
        raise InputError(f"BLASCHKE_LAB_THREADS is not an integer: {value}")

    if threads < 1:
        raise InputError(f"BLASCHKE_LAB_THREADS must be at least 1, got {threads}")

    return threads


"""
Validated parameters of one command-line run.
"""
@dataclass
class RunConfig:
    command : str
    sigma_path : str|None = None
    n : int|None = None
    r : float|None = None
    space : str = "h2"
    N : int|None = None
    seed : int = 0
    budget : int = 6400
    tol : float = 1e-8
    out_path : str|None = None
    fmt : str = "csv"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InputError(f"Unknown command {self.command}")

        if self.tol <= 0:
            raise InputError(f"tol must be positive, got {self.tol}")

        if self.budget < 1:
            raise InputError(f"budget must be at least 1, got {self.budget}")

        if self.fmt not in ("csv", "json"):
            raise InputError(f"Unknown output format {self.fmt}")

        has_family = self.n is not None or self.r is not None

        if self.command in SIGMA_COMMANDS:
            if not self.sigma_path:
                raise InputError(f"Command {self.command} needs a sigma file")
            if has_family:
                raise InputError(f"Command {self.command} takes a sigma file, not n and r")

        if self.command in FAMILY_COMMANDS:
            if self.sigma_path:
                raise InputError(f"Command {self.command} takes n and r, not a sigma file")
            if self.n is None or self.r is None:
                raise InputError(f"Command {self.command} needs both n and r")
            if self.n < 1:
                raise InputError(f"n must be at least 1, got {self.n}")
            if not 0 <= self.r < 1:
                raise InputError(f"r must lie in [0, 1), got {self.r}")

        if self.N is not None and self.N not in (1, 2):
            raise InputError(f"N must be 1 or 2, got {self.N}")

        return self
