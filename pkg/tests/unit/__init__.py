"""Unit tests for snadboy-qlogic library modules."""
