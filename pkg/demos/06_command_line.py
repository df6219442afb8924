"""
The command-line pipeline
=========================

Every stage is also a ``marketmode`` subcommand writing CSV artifacts,
a ``run.log`` and the resolved ``config.ini``. This script drives them
from Python; the shell equivalents are shown in the comments.
"""

import tempfile
from pathlib import Path

from marketmode.cli import main

out = Path(tempfile.mkdtemp())

####################################################################
# Simulate and fit
# ----------------
# ``marketmode simulate --lambda2 0.03 --L-over-dt 256 --length 32768 --seed 1``

main(["simulate", "--lambda2", "0.03", "--L-over-dt", "256", "--length", "32768",
      "--seed", "1", "--out-dir", str(out / "sim")])
# ``marketmode mrw-fit --series sim/mrw_path.csv --max-lag 256 --fit-hi 256``
main(["mrw-fit", "--series", str(out / "sim" / "mrw_path.csv"), "--max-lag", "256",
      "--fit-hi", "256", "--out-dir", str(out / "fit")])
print((out / "fit" / "mrw_fit.json").read_text())

####################################################################
# Sliding indicator with a config file
# ------------------------------------

ini = out / "run.ini"
ini.write_text("[precursor]\nwindow_width = 20000\nstep = 2420\n")
main(["precursor", "--config", str(ini), "--series", str(out / "sim" / "mrw_path.csv"),
      "--delta-t", "5", "--out-dir", str(out / "ind")])
print((out / "ind" / "run.log").read_text())
print((out / "ind" / "indicator.csv").read_text().splitlines()[:4])
