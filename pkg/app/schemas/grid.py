from pydantic import BaseModel
from typing import List, Optional


class GridOut(BaseModel):
    kind: str
    K: int
    T: Optional[int] = None
    size: int
    p: List[float]
    q: List[float]
