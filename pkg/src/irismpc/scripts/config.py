"""Party configuration files and the digest compared at the handshake."""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field

from irismpc import const
from irismpc.core.errors import ConfigMismatch
from irismpc.core.iris import MatchParams

logger = logging.getLogger(__name__)


@dataclass
class Config:
    party_id: int
    peers: dict
    clients: dict = field(default_factory=dict)
    backend: str = "replicated"
    variant: str = "mpc-lift"
    l: int = const.DEFAULT_CODE_LENGTH
    match_ratio: float = const.DEFAULT_MATCH_RATIO
    a: int = None
    b: int = None
    precision_bits: int = const.DEFAULT_PRECISION_BITS
    share_dir: str = "."
    output_party: int = const.DEFAULT_OUTPUT_PARTY
    timeout: float = const.DEFAULT_TIMEOUT

    def __post_init__(self):
        self.peers = {int(k): v for k, v in self.peers.items()}
        self.clients = {int(k): v for k, v in self.clients.items()}
        if self.party_id not in const.PARTY_IDS:
            raise ConfigMismatch(f"party_id must be one of {const.PARTY_IDS}, got {self.party_id}")
        if sorted(self.peers) != list(const.PARTY_IDS):
            raise ConfigMismatch(f"peers must list endpoints for parties {const.PARTY_IDS}")
        if self.backend not in const.BACKENDS:
            raise ConfigMismatch(f"Unknown backend: {self.backend}")
        if self.variant not in const.VARIANTS:
            raise ConfigMismatch(f"Unknown variant: {self.variant}")
        if self.output_party not in const.PARTY_IDS:
            raise ConfigMismatch(f"output_party must be one of {const.PARTY_IDS}")

    @classmethod
    def from_file(cls, path, environ=None):
        """Load a JSON config and apply environment overrides."""
        try:
            with open(path) as f:
                payload = json.load(f)
            config = cls(**payload)
        except (OSError, ValueError, TypeError) as exc:
            raise ConfigMismatch(f"Invalid config file {path}: {exc}") from exc
        config.apply_env(os.environ if environ is None else environ)
        return config

    def apply_env(self, environ):
        for i in const.PARTY_IDS:
            if f"IRISMPC_PEER_{i}" in environ:
                self.peers[i] = environ[f"IRISMPC_PEER_{i}"]
                logger.debug("Peer endpoint of party %d taken from the environment", i)
            if f"IRISMPC_CLIENT_{i}" in environ:
                self.clients[i] = environ[f"IRISMPC_CLIENT_{i}"]
                logger.debug("Client endpoint of party %d taken from the environment", i)
        if "IRISMPC_SHARE_DIR" in environ:
            self.share_dir = environ["IRISMPC_SHARE_DIR"]
            logger.debug("Share directory taken from the environment: %s", self.share_dir)

    @property
    def params(self):
        if self.a is not None or self.b is not None:
            return MatchParams.from_fraction(self.a, self.b)
        return MatchParams.from_ratio(self.match_ratio, self.precision_bits)

    def widths(self):
        return (const.CODE_WIDTH, self.params.comparison_width)

    def digest(self, s, variant=None):
        """SHA-256 of the canonical JSON of everything the parties must agree on."""
        params = self.params
        payload = {"backend": self.backend, "variant": variant or self.variant, "l": self.l, "s": s,
                   "a": params.a, "b": params.b, "widths": list(self.widths())}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).digest()

    def share_path(self, name):
        return os.path.join(self.share_dir, name)


def share_file_name(party_id):
    return f"party{party_id}.irs"


def seed_file_name(party_id):
    return f"party{party_id}.seeds.json"


PUBLIC_MASK_FILE = "public_masks.irm"
