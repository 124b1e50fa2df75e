from irismpc.engine.backends.replicated import ReplicatedBackend
from irismpc.engine.backends.shamir import ShamirGaloisBackend


class BackendFactory:
    """Factory for dot-product backends."""

    def create_backend(self, backend_type):
        """Create a backend instance.

        Args:
            backend_type: 'replicated' or 'shamir-galois'

        Returns:
            DotProductBackend instance
        """
        backend_map = {
            "replicated": ReplicatedBackend,
            "shamir-galois": ShamirGaloisBackend,
        }

        creator = backend_map.get(backend_type)
        if not creator:
            raise ValueError(f"Unknown backend type: {backend_type}")

        return creator()
