"""Channel flow with a dynamic slip wall, in JAX."""
import jax

# all solvers and constants are calibrated in double precision
jax.config.update('jax_enable_x64', True)

from jaxslip.attractor import *
from jaxslip.constants import *
from jaxslip.constitutive import *
from jaxslip.core import *
from jaxslip.errors import *
from jaxslip.harness import *
from jaxslip.plotting import *
from jaxslip.public import *
from jaxslip.utils import *
