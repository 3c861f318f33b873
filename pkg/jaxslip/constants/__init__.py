from jaxslip.constants.eigenvalue import *
from jaxslip.constants.inequalities import *
from jaxslip.constants.reflection import *
