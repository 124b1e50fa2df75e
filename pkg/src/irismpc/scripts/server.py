"""Long-running party process and the thin query client.

A client request is three frames on a dedicated connection to every party:
a JSON header, the party's query shares as IRS1 sections, and the public
query masks as packed bits. Each party answers with one JSON frame; only the
output party's answer carries the match booleans.
"""

import json
import logging
import socket

from irismpc import const
from irismpc.core.errors import FormatError, IrisMpcError, TransportError, error_from_reply
from irismpc.core.formats import (decode_bits, encode_bits, read_public_masks, read_sections,
                                  read_seed_file, sections_from_bytes, write_sections)
from irismpc.engine.backends.factory import BackendFactory
from irismpc.engine.dealer import Dealer, PartyDatabase, PartyQueries, share_section
from irismpc.engine.protocol import run_query
from irismpc.mpc.party import Party
from irismpc.net.tcp import TcpTransport, dial, parse_endpoint
from irismpc.net.transport import recv_frame, send_frame
from irismpc.scripts.config import PUBLIC_MASK_FILE, seed_file_name, share_file_name

logger = logging.getLogger(__name__)

OP_QUERY = "query"
OP_SHUTDOWN = "shutdown"


def query_to_frames(queries, backend, header):
    sections = [share_section(backend, kind, k, queries.party_id, shares)
                for kind, table in ((const.SECTION_CODE, queries.codes), (const.SECTION_MASK, queries.masks))
                for k, shares in sorted(table.items())]
    header = dict(header, n=queries.n, l=queries.l, persons=queries.persons,
                  rotations=queries.rotations, eyes=queries.eyes)
    return [json.dumps(header).encode(), b"".join(s.to_bytes() for s in sections),
            encode_bits(queries.public_masks)]


def queries_from_frames(party_id, backend, header, body, mask_bits):
    codes, masks = {}, {}
    for section in sections_from_bytes(body):
        if section.party != party_id:
            raise FormatError(f"Query shares for party {section.party} sent to party {party_id}")
        target = codes if section.kind == const.SECTION_CODE else masks
        target[section.k] = backend.from_section(section)
    n, l = header["n"], header["l"]
    public_masks = decode_bits(mask_bits, n * l).reshape(n, l)
    return PartyQueries(party_id, l, codes, masks, public_masks,
                        header["persons"], header["rotations"], header["eyes"])


class PartyServer:
    """One party: holds its database shares, meshes with its peers, answers client requests."""

    def __init__(self, config):
        self.config = config
        self.backend = BackendFactory().create_backend(config.backend)
        self.db = None
        self.seeds = None
        self.party = None

    @property
    def party_id(self):
        return self.config.party_id

    def load(self):
        """Read share, seed and mask files; fold in the one-time preprocessing."""
        path = self.config.share_path(share_file_name(self.party_id))
        sections = read_sections(path)
        public_masks = read_public_masks(self.config.share_path(PUBLIC_MASK_FILE))
        seed_party, self.seeds = read_seed_file(self.config.share_path(seed_file_name(self.party_id)))
        if seed_party != self.party_id:
            raise FormatError(f"Seed file belongs to party {seed_party}, not {self.party_id}")
        for section in sections:
            if section.backend != self.backend.key:
                raise FormatError(f"Share file holds {section.backend} shares, config says {self.backend.key}")
        self.db = PartyDatabase.from_sections(self.party_id, self.backend, sections, public_masks)
        if self.db.l != self.config.l:
            raise FormatError(f"Shares have l={self.db.l}, config says l={self.config.l}")
        if any(not s.lambda_scaled for s in sections) and self.backend.key == "shamir-galois":
            write_sections(self.db.sections(self.backend), path)
            logger.info("Party %d stored its scaled shares back to %s", self.party_id, path)
        logger.info("Party %d loaded s=%d l=%d (%s)", self.party_id, self.db.s, self.db.l, self.backend.key)
        return self

    def connect(self, listener=None):
        transport = TcpTransport.connect(self.party_id, self.config.peers, self.config.timeout, listener)
        self.party = Party(self.party_id, transport, self.seeds)
        return self

    def handle(self, header, body, mask_bits):
        queries = queries_from_frames(self.party_id, self.backend, header, body, mask_bits)
        variant = header.get("variant", self.config.variant)
        digest = self.config.digest(self.db.s, variant)
        outcome = run_query(self.party, queries, self.db, self.config.params, variant, self.backend,
                            self.config.output_party, digest)
        return {"party": self.party_id, "matches": outcome.matches, "stats": outcome.stats}

    def serve(self, client_listener=None, max_requests=None):
        """Answer client requests until a shutdown request arrives.

        Protocol errors are reported to the client and the party keeps serving,
        except after a transport failure, which leaves the peer mesh unusable.
        """
        if client_listener is None:
            client_listener = listen(self.config.clients[self.party_id])
        served = 0
        try:
            while max_requests is None or served < max_requests:
                conn, addr = client_listener.accept()
                with conn:
                    _, raw = recv_frame(conn)
                    header = json.loads(raw)
                    if header.get("op") == OP_SHUTDOWN:
                        logger.info("Party %d shutting down on client request", self.party_id)
                        send_frame(conn, 0, json.dumps({"party": self.party_id, "ok": True}).encode())
                        break
                    _, body = recv_frame(conn)
                    _, mask_bits = recv_frame(conn)
                    fatal = None
                    try:
                        reply = self.handle(header, body, mask_bits)
                    except (IrisMpcError, ValueError) as exc:
                        logger.error("Party %d failed a request: %s: %s",
                                     self.party_id, type(exc).__name__, exc)
                        reply = {"party": self.party_id, "error": type(exc).__name__, "message": str(exc)}
                        if isinstance(exc, TransportError):
                            fatal = exc
                    send_frame(conn, 0, json.dumps(reply).encode())
                served += 1
                if fatal is not None:
                    raise fatal
        finally:
            client_listener.close()
            if self.party is not None:
                self.party.transport.close()
        return served


def listen(endpoint, backlog=4):
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind(parse_endpoint(endpoint))
    sock.listen(backlog)
    return sock


class QueryClient:
    """Plays the capture device: shares query batches and collects the answers."""

    def __init__(self, config, rng=None):
        self.config = config
        self.backend = BackendFactory().create_backend(config.backend)
        self.dealer = Dealer(self.backend, config.widths(), rng)

    def _exchange(self, frames_by_party):
        conns = {}
        try:
            for i in const.PARTY_IDS:
                conns[i] = dial(self.config.clients[i], self.config.timeout)
                for frame in frames_by_party[i]:
                    send_frame(conns[i], 0, frame)
            replies = {}
            for i, conn in conns.items():
                _, raw = recv_frame(conn)
                replies[i] = json.loads(raw)
        except OSError as exc:
            raise TransportError(f"Client exchange failed: {exc}") from exc
        finally:
            for conn in conns.values():
                conn.close()
        _raise_reported(replies)
        return replies

    def query(self, persons, variant=None, rotations=const.DEFAULT_ROTATIONS):
        """Membership of every (left, right) person; returns (matches, per-party stats)."""
        shares = self.dealer.share_batch(persons, rotations)
        header = {"op": OP_QUERY, "variant": variant or self.config.variant}
        replies = self._exchange({i: query_to_frames(shares[i], self.backend, header)
                                  for i in const.PARTY_IDS})
        matches = replies[self.config.output_party]["matches"]
        return matches, [replies[i]["stats"] for i in const.PARTY_IDS]

    def shutdown(self):
        frame = json.dumps({"op": OP_SHUTDOWN}).encode()
        return self._exchange({i: [frame] for i in const.PARTY_IDS})


def _raise_reported(replies):
    """Re-raise the error the parties reported, preferring a root cause over transport noise."""
    errors = [(i, reply) for i, reply in sorted(replies.items()) if "error" in reply]
    if not errors:
        return
    root = [e for e in errors if e[1]["error"] != TransportError.__name__] or errors
    party_id, reply = root[0]
    raise error_from_reply(reply["error"], f"party {party_id}: {reply['message']}")
