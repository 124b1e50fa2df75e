# -*- coding: utf-8 -*-


# Ring widths
CODE_WIDTH = 16
SUPPORTED_WIDTHS = (16, 32, 48)
DEFAULT_PRECISION_BITS = 16

# Iris codes
DEFAULT_CODE_LENGTH = 12800
DEFAULT_ROTATIONS = 31
ROTATION_STEPS = 64
DEFAULT_MATCH_RATIO = 0.375
DEFAULT_MASK_DENSITY = 0.8

# Parties
NUM_PARTIES = 3
PARTY_IDS = (1, 2, 3)
OT_SENDER = 1
OT_RECEIVER = 2
OT_HELPER = 3
DEFAULT_OUTPUT_PARTY = 1

# Binary lanes are packed into 64-bit words
LANE_BITS = 64

# Ledger phases, index is the framing tag
PHASES = ("setup", "dot", "lift", "ot", "msb", "or_tree", "open")
REPORTED_PHASES = ("dot", "lift", "msb", "or_tree")

# Network
DEFAULT_TIMEOUT = 30.0
FRAME_HEADER_SIZE = 5

# File containers
DB_MAGIC = b"IRMP"
DB_VERSION = 1
SHARE_MAGIC = b"IRS1"
SHARE_VERSION = 1
BACKEND_IDS = {"replicated": 0, "shamir-galois": 1}
SECTION_CODE = 0
SECTION_MASK = 1
SECTION_PUBLIC_MASK = 2

# Variants
VARIANTS = ("plain-mask", "mpc-lift", "const-lift", "no-lift")
SHARED_MASK_VARIANTS = ("mpc-lift", "const-lift", "no-lift")
BACKENDS = ("replicated", "shamir-galois")

# CLI exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_TRANSPORT = 3
EXIT_BOUNDS = 4
