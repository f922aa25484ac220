from .instance_models import *
from .schedule_models import *
from .energy_models import *
from .result_models import *
from .experiment_models import *
