from tensorbridge.autodiff.unify import value_and_grad, value_and_grad_fn, value_aux_and_grad

__all__ = ["value_and_grad", "value_and_grad_fn", "value_aux_and_grad"]
