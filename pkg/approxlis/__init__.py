# Approximate dynamic LIS structures
from approxlis.config import StructureConfig
from approxlis.decremental import DecrementalLIS, WholeArrayLIS
from approxlis.dynamic import DynamicLIS
from approxlis.errors import ContractViolation, ScriptParseError

__all__ = [
    "StructureConfig", "DecrementalLIS", "WholeArrayLIS", "DynamicLIS", "ContractViolation",
    "ScriptParseError",
]
