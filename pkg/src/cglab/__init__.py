"""cglab: a conjugate-gradient halting-time laboratory.

Library + CLI for running instrumented CG on random positive definite
perturbations (Laguerre unitary ensemble in a critical scaling), evaluating
the closed-form halting-time and condition-number bounds, and reproducing
the sample-mean growth experiments.
"""

__version__ = "0.1.0"
