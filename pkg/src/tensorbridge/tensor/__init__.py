from tensorbridge.tensor.conversion import RestoreFn, astensor, astensor_, astensors, astensors_, raw
from tensorbridge.tensor.handle import TensorHandle

__all__ = ["RestoreFn", "TensorHandle", "astensor", "astensor_", "astensors", "astensors_", "raw"]
