"""
Driving the command line in-process
===================================

Every operation is also reachable through the `mobiusphase` console
script.  Identical configuration and seed produce byte-identical
artifacts, enumeration work is capped by --budget (or the HOFF_BUDGET
environment variable), and exit codes separate bad configuration (2)
from an honest budget refusal (3).
"""

import json
import os
import tempfile

from mobiusphase.cli import run

Q = '{"p":3,"n":4,"terms":[[1,1,0,0,1]]}'

# A one-line artifact: the monic Moebius sum telescopes to zero.
print("mobius-sum exit:", run(["mobius-sum", "--p", "2", "--n", "2", "--monic"]))

# JSON artifacts go to stdout and, with --out, to a file with LF endings.
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "correlation.json")
    code = run(["correlation", "--q", Q, "--out", path])
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    print("correlation exit:", code,
          " magnitude:", round(doc["magnitude"], 6))

# Exact rational artifacts stay exact in transit.
code = run(["bias", "--form", '{"p":3,"dims":[1,1],"entries":[[0,0,1]]}'])
print("bias exit:", code)

# Bad configuration is exit 2: the phase machinery needs p > k.
print("p <= k exit:", run(["correlation", "--p", "5", "--k", "7", "--n", "3"]))

# A budget refusal is exit 3 and does no partial work.
print("tiny budget exit:", run(["correlation", "--q", Q, "--budget", "10"]))

# The environment default can be overridden per-invocation.
os.environ["HOFF_BUDGET"] = "10"
try:
    print("env budget exit:", run(["correlation", "--q", Q]))
    print("explicit --budget beats env:",
          run(["correlation", "--q", Q, "--budget", "1000000"]))
finally:
    del os.environ["HOFF_BUDGET"]

# The acceptance criteria double as a CI gate: verify runs them and
# prints one line per criterion.
print("verify exit:", run(["verify", "--only", "1"]))
