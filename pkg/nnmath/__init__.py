"""
Small dense-network numerics: layers, loss, Adam, gradient checking and
checkpoints.
"""
from nnmath.layers import (
    DenseLayer, dense_forward, relu, relu_grad, activate, activation_backward,
    mse_loss, l2_normalize, l2_normalize_backward, xavier_uniform,
)
from nnmath.optim import AdamState, adam_step
from nnmath.gradcheck import grad_check, check_gradients, GradCheckReport
from nnmath.checkpoint import Checkpoint, save_checkpoint, load_checkpoint, CHECKPOINT_FORMAT

__all__ = [
    'DenseLayer', 'dense_forward', 'relu', 'relu_grad', 'activate', 'activation_backward',
    'mse_loss', 'l2_normalize', 'l2_normalize_backward', 'xavier_uniform',
    'AdamState', 'adam_step', 'grad_check', 'check_gradients', 'GradCheckReport',
    'Checkpoint', 'save_checkpoint', 'load_checkpoint', 'CHECKPOINT_FORMAT',
]
