from .atiyah import AffineConnection
from .atiyah import atiyah_cocycle
from .atiyah import compare_classes
from .atiyah import invariance_harness
from .atiyah import todd_truncation
from .bundle import CurvedBundle
from .bundle import tangent_complex_at
from .bundle import validate_structure
from .commands import run
from .config import Settings
from .contraction import build_contraction
from .document import Document
from .document import parse
from .hochschild import HochschildComplex
from .hochschild import PolyVectors
from .hochschild import hkr_check
from .hochschild import windowed_hh
from .ladder import build_ladder
from .ladder import certify_ladder
from .morphism import LinftyMorphism
from .morphism import classify_morphism
from .tensors import VectorFieldModule

__all__ = [
    "AffineConnection",
    "CurvedBundle",
    "Document",
    "HochschildComplex",
    "LinftyMorphism",
    "PolyVectors",
    "Settings",
    "VectorFieldModule",
    "atiyah_cocycle",
    "build_contraction",
    "build_ladder",
    "certify_ladder",
    "classify_morphism",
    "compare_classes",
    "hkr_check",
    "invariance_harness",
    "parse",
    "run",
    "tangent_complex_at",
    "todd_truncation",
    "validate_structure",
    "windowed_hh",
]
