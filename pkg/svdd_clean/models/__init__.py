from .autoencoder import (
    DEFAULT_ENCODER_DIMS,
    AutoencoderModel,
    encode,
    pretrain,
    reconstruction_loss,
)
from .deep_svdd import (
    DeepSvddModel,
    ScoreSet,
    init_center,
    normalize_scores,
    score,
    svdd_objective,
    train_one_class,
)
from .oracle import Ball, SoftSvddSolution, min_enclosing_ball, soft_svdd
from .persistence import model_from_dict, model_to_dict
