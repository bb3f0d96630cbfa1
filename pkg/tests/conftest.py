import os

# exact transform checks on every lattice reduction while under test
os.environ.setdefault("QUADEXP_STRICT", "1")
