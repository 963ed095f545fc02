# Test package for snadboy-qlogic
