from jaxslip.attractor.absorbing import *
from jaxslip.attractor.dimension import *
from jaxslip.attractor.energy import *
from jaxslip.attractor.family import *
from jaxslip.attractor.tangent import *
from jaxslip.attractor.trace import *
