"""
JSON serialization of reports: numpy scalars and arrays become plain Python
values and non-finite floats become strings, so report output is strict JSON.
"""

import json
import math
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel


def convert_non_serializable_objects(obj):
    """Recursively convert numpy values and non-finite floats for JSON serialization"""
    if isinstance(obj, BaseModel):
        return convert_non_serializable_objects(obj.model_dump(mode="python", by_alias=True))
    elif isinstance(obj, np.ndarray):
        return [convert_non_serializable_objects(item) for item in obj.tolist()]
    elif isinstance(obj, np.generic):
        return convert_non_serializable_objects(obj.item())
    elif isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    elif isinstance(obj, Enum):
        return obj.value
    elif isinstance(obj, dict):
        return {str(key): convert_non_serializable_objects(value) for key, value in obj.items()}
    elif isinstance(obj, (list, tuple)):
        return [convert_non_serializable_objects(item) for item in obj]
    else:
        return obj


def dumps_report(report: Any) -> str:
    """Deterministic, indented JSON text of a report model or plain structure"""
    return json.dumps(convert_non_serializable_objects(report), indent=2, allow_nan=False)
