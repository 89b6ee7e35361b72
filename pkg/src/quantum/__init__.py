from .errors import *
from .qmatrix import *
from .gf import *
from .mub import *
from .coherence import *
from .assemblage import *
from .naqc import *
from .optimizer import *
from .oracle import *
