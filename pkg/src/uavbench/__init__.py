"""UAV path-planning benchmark toolkit: instance generation, path cost
evaluation, a roster of black-box optimizers, an experiment harness, and the
statistical / landscape analysis pipeline."""

__version__ = "0.1.0"
