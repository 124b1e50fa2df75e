from irismpc.engine.backends.base import DotProductBackend
from irismpc.engine.backends.factory import BackendFactory
from irismpc.engine.backends.replicated import ReplicatedBackend
from irismpc.engine.backends.shamir import ShamirGaloisBackend
