from jaxslip.constitutive.conditions import *
from jaxslip.constitutive.laws import *
