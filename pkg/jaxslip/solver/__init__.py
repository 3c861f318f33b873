from jaxslip.solver.diagnostics import *
from jaxslip.solver.operators import *
from jaxslip.solver.pressure import *
from jaxslip.solver.stepper import *
