from .core import *
from .optics import *
from .geometry import *
from .engine import *
from .closed_forms import *
from .oracle import *
from .scenarios import *

__version__ = "0.1"
