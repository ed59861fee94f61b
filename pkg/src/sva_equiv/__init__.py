"""Property-equivalence checking and scoring for SystemVerilog assertions."""

__version__ = "0.1.0"
