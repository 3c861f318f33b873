from jaxslip.core.fields import *
from jaxslip.core.grid import *
from jaxslip.core.io import *
from jaxslip.core.scaling import *
