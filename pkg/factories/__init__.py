from .controls import *  # noqa
from .cellcycle import *  # noqa
