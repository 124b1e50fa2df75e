from abc import ABC, abstractmethod

from irismpc.mpc.replicated import reshare_additive


class DotProductBackend(ABC):
    """Base class for the sharings the Hamming phase can run on.

    A backend shares (n, l) matrices of ring values, prepares the enrolled side
    once at ingestion, and produces additive shares of all row/query dot
    products locally. The reshare into replicated form is common to all.
    """

    key = None

    @abstractmethod
    def share(self, values, k, rng):
        """Split an (n, l) matrix of ring values into shares for parties 1..3."""
        pass

    @abstractmethod
    def prepare_rows(self, party_id, shares):
        """One-time local transformation of the enrolled side."""
        pass

    @abstractmethod
    def local_products(self, party, rows, queries):
        """Additive shares of every <queries[q], rows[n]>, shape (q, n)."""
        pass

    @abstractmethod
    def select(self, shares, index):
        """Subset of the rows of a share matrix."""
        pass

    @abstractmethod
    def reconstruct(self, shares, length):
        """Plaintext (n, length) matrix from all three parties' shares."""
        pass

    @abstractmethod
    def section_arrays(self, shares):
        """Arrays of (n, l) words persisted for a share matrix."""
        pass

    @abstractmethod
    def from_section(self, section):
        pass

    def dot(self, party, rows, queries, k, pairs=None):
        """Replicated shares of the selected row/query dot products.

        Args:
            party: Party
            rows: prepared enrolled side
            queries: query shares
            k: ring width
            pairs: optional (query_idx, row_idx) arrays; all pairs row-major otherwise

        Returns:
            RepShare with one lane per selected pair
        """
        z = self.local_products(party, rows, queries)
        z = z[pairs] if pairs is not None else z.reshape(-1)
        return reshare_additive(party, z, k)

    @property
    def name(self):
        name = self.__class__.__name__
        if name.endswith("Backend"):
            name = name[:-7]
        return name
