from .initializer import Initializer
from .peakon_runner import PeakonRunner
from .pde_runner import PdeRunner
from .certifier import Certifier
from .reducer import Reducer
from .prober import Prober
from .tracer import Tracer
from .verifier import Verifier
from .artifact_writer import ArtifactWriter

__all__ = [
    "Initializer",
    "PeakonRunner",
    "PdeRunner",
    "Certifier",
    "Reducer",
    "Prober",
    "Tracer",
    "Verifier",
    "ArtifactWriter"
]
