from jaxslip.harness.cli import *
from jaxslip.harness.config import *
from jaxslip.harness.exhaustion import *
from jaxslip.harness.forcing import *
from jaxslip.harness.suite import *
