import math

DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
ROOT_LOG_LEVEL = 'INFO'

LOG_FORMAT_MSG = '%(asctime)s %(name)s[%(process)d]: %(levelname)s %(message)s'

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOT_FOUND = 3

CSV_FLOAT_FORMAT = '.17g'
CSV_COMMENT = '#'

# Landau-Zener Hamiltonian H(a) = DRIFT_X * sx + CONTROL_Z * a * sz, hbar = 1
DRIFT_X = 0.5
CONTROL_Z = 2.0

AMPLITUDE_MIN = -1.0
AMPLITUDE_MAX = 1.0

TIME_MIN = math.pi
DEFAULT_TIME = 2 * TIME_MIN

TARGET_INFIDELITY = 0.001
HIGH_FIDELITY = 0.95
SPEED_LIMIT_FIDELITY = 0.999
SPEED_LIMIT_MAX_TIME = DEFAULT_TIME
SPEED_LIMIT_SCAN_POINTS = 40
SPEED_LIMIT_SEGMENTS = 2

# 100 intervals over [-1, 1], so 0.0 is a lattice point
LATTICE_POINTS = 101

GRID_POINTS = {1: LATTICE_POINTS, 2: LATTICE_POINTS, 3: LATTICE_POINTS, 4: 31}
GRID_POINTS_FALLBACK = 10
GRID_MAX_POINTS = 20_000_000

SUPPORTED_PARAMS = (2, 3, 4)

SGD_LEARNING_RATE = 0.01
SGD_MOMENTUM = 0.95
SGD_MAX_ITERATIONS = 10000
SGD_FD_STEP = 1e-3

GA_POPULATION_SIZE = 100
GA_GENE_COUNT = LATTICE_POINTS
GA_MUTATION_RATE = 0.3
GA_ELITE_FRACTION = 0.30
GA_UNDERDOG_FRACTION = 0.20
GA_MAX_GENERATIONS = 50

NUM_ACTIONS = LATTICE_POINTS
MLP_HIDDEN = (64, 512, 256)
OBSERVATION_SIZE = 5

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# (reward when infidelity > 0.5, <= 0.5, < 0.1, <= 0.001)
QL_REWARDS = (-1.0, 10.0, 100.0, 500.0)
DEEP_REWARDS = (1.0, 10.0, 500.0, 5000.0)
REWARD_THRESHOLDS = (0.5, 0.5, 0.1, TARGET_INFIDELITY)

QL_LEARNING_RATE = 0.001
QL_DISCOUNT = 0.9
QL_EPSILON = 0.1
QL_MAX_EPISODES = 500
QL_THETA_BINS = 20
QL_PHI_BINS = 20

DQN_LEARNING_RATE = 0.0001
DQN_EXPLORATION_FRACTION = 0.25
DQN_EXPLORATION_INITIAL = 1.0
DQN_EXPLORATION_FINAL = 0.05
DQN_DISCOUNT = 0.000001
DQN_BUFFER_SIZE = 10000
DQN_BATCH_SIZE = 64
DQN_TARGET_UPDATE = 250
DQN_TRAIN_FREQ = 4
DQN_LEARNING_STARTS = 1000
DQN_TOTAL_STEPS = 20000

PPO_LEARNING_RATE = 0.0001
PPO_ENTROPY_COEF = 0.25
PPO_DISCOUNT = 0.000001
PPO_CLIP = 0.2
PPO_ROLLOUT_STEPS = 512
PPO_EPOCHS = 4
PPO_BATCH_SIZE = 64
PPO_GAE_LAMBDA = 0.95
PPO_VALUE_COEF = 0.5
PPO_MAX_GRAD_NORM = 0.5
PPO_TOTAL_STEPS = 20000

ALGORITHMS = ('sgd', 'ga', 'ql', 'dqn', 'ppo')

DEFAULT_RUNS = 1000
DEFAULT_SEED = 0

DBSCAN_EPS = 0.1
DBSCAN_MIN_PTS = 5
OVERLAP_XY = 0.02
OVERLAP_FIDELITY = 0.01

HISTOGRAM_BINS = 20

PLOT_COLORMAP = 'coolwarm'
PLOT_MARKER_RADIUS = 2.0
PLOT_OVERLAP_SCALE = 12.0
PLOT_SIZE_INCHES = (6.0, 5.0)
SVG_HASH_SALT = 'qclscape'
