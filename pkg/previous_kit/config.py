"""Toolkit configuration."""
import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Base configuration."""
    LOG_LEVEL = os.environ.get('PREVIOUS_LOG_LEVEL', 'INFO')
    WORKERS = int(os.environ.get('PREVIOUS_WORKERS', '1'))

    # Frozen CSV layout marker, first line of every CSV we write
    CSV_HEADER = '# previous-kit v1'

    # Regression
    DEFAULT_LAMBDA = 1.0
    RANK_RTOL = 1e-9

    # Profiling protocol
    N_RUNS = 50
    GAP_MS = 300.0
    SAMPLE_PERIOD_S = 40.96e-6
    SEGMENT_SLACK = 0.10
    SEGMENT_MIN_CONTRAST_W = 1e-6

    # Synthetic device
    BASELINE_W = 1.0


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True


class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False
    LOG_LEVEL = os.environ.get('PREVIOUS_LOG_LEVEL', 'WARNING')


class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    LOG_LEVEL = 'DEBUG'
    WORKERS = 1


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
